#pragma once

// Machine-readable output: JSON objects for the domain types and CSV orbits.
// Floating-point values are always written with 17 significant digits so
// that identical runs produce byte-identical files.

#include <optional>
#include <ostream>
#include <string>

#include "json.hpp"
#include "semiconj/dynamics.hpp"
#include "semiconj/reduction.hpp"

namespace semiconj {

/// Serializes doc with %.17g floats (NaN/Inf become null).
std::string dump_json(const nlohmann::json& doc, int indent = 2);

std::string format_double(double v);

nlohmann::json to_json(const Poly& p);
nlohmann::json to_json(Complex z);
nlohmann::json to_json(const EquationSpec& eq);
nlohmann::json to_json(const Factorization& f, const EquationSpec& eq);
nlohmann::json to_json(const Cycle& c);
nlohmann::json to_json(const BoundCertificate& c);
nlohmann::json to_json(const Orbit& o);

/// Columns n, x_n and, when a factored orbit is given, r_n or t_n.
void write_orbit_csv(std::ostream& out, const Orbit& orbit, const Orbit* factored = nullptr);

}  // namespace semiconj
