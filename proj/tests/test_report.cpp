#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "semiconj/report.hpp"

using namespace semiconj;
using nlohmann::json;

TEST_CASE("format_double round-trips with 17 significant digits") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(2.0) == "2");
    CHECK(format_double(-0.0) == "0");
    CHECK(format_double(1e-300) == "1e-300");
    CHECK(format_double(std::nan("")) == "null");
    CHECK(format_double(INFINITY) == "null");
    for (double v : {std::numbers::pi, -1.0 / 3.0, 6.02214076e23, 5e-324}) {
        CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
    }
}

TEST_CASE("dump_json is deterministic and sorted") {
    json doc;
    doc["zeta"] = 0.1;
    doc["alpha"] = {1, 2.5, nullptr};
    doc["mid"] = {{"b", true}, {"a", "text"}};
    doc["nan"] = std::nan("");
    const std::string text = dump_json(doc);
    CHECK(text == dump_json(doc));
    CHECK(text.back() == '\n');
    CHECK(text.find("\"alpha\"") < text.find("\"mid\""));
    CHECK(text.find("\"mid\"") < text.find("\"zeta\""));
    CHECK(text.find("0.10000000000000001") != std::string::npos);
    CHECK(text.find("\"nan\": null") != std::string::npos);
    const json back = json::parse(text);
    CHECK(back["zeta"].get<double>() == 0.1);
    CHECK(back["mid"]["a"] == "text");
    CHECK(dump_json(json::array(), 2) == "[]\n");
}

TEST_CASE("domain objects serialize their fields") {
    const EquationSpec eq =
        synth_equation(2, std::sqrt(0.5), std::numbers::pi / 4.0, std::vector{0.0}, std::vector{1.0}, parse("1/u"));
    const json e = to_json(eq);
    CHECK(e["k"] == 2);
    CHECK(e["g"] == "1/u");
    CHECK(e["a"].size() == 3);

    const json p = to_json(Poly::from_real(std::vector<double>{1.0, -2.0}));
    CHECK(p == json({1.0, -2.0}));
    const json pc = to_json(Poly(std::vector<Complex>{1.0, Complex(0.0, 2.0)}));
    CHECK(pc[1]["im"] == 2.0);

    const ConjugatePair f = factor_conjugate_pair(eq, std::sqrt(0.5), std::numbers::pi / 4.0);
    const json fj = to_json(Factorization(f), eq);
    CHECK(fj["type"] == "ConjugatePair");
    CHECK(fj["p_prime"].size() == 1);
    CHECK(fj["trailing_identity_residuals"].contains("a_k"));
    CHECK(fj["cofactor"]["order"] == 2);

    const json sj = to_json(Factorization(SingleReal{0.5, {0.1}, {1.0}}), EquationSpec(1, {0.5, 0.0}, {1.0, -0.5}, GExpr()));
    CHECK(sj["type"] == "SingleReal");
    CHECK(sj["rho"] == 0.5);

    const json cj = to_json(Cycle{{1.0, 2.0}, 2, 1e-9, 5});
    CHECK(cj["prime_period"] == 2);
    CHECK(cj["start_index"] == 5);

    BoundCertificate cert;
    cert.rho_modulus = 0.5;
    cert.M = 1.0;
    cert.N = 3;
    cert.bound = 2.5;
    cert.verified = true;
    const json bj = to_json(cert);
    CHECK(bj["bound"] == 2.5);
    CHECK(bj["N"] == 3);
    CHECK(bj["M_provenance"] == "empirical");
}

TEST_CASE("orbit CSV") {
    const EquationSpec eq(1, {0.5, 0.0}, {1.0, -0.5}, GExpr());
    const Orbit direct = simulate_direct(eq, std::vector{1.0, 2.0}, 2);
    std::ostringstream plain;
    write_orbit_csv(plain, direct);
    CHECK(plain.str() == "n,x_n\n-1,1\n0,2\n1,1\n2,0.5\n");

    const Orbit factored = simulate_factored(Factorization(factor_single(eq, 0.5)), eq, std::vector{1.0, 2.0}, 2);
    std::ostringstream with_t;
    write_orbit_csv(with_t, direct, &factored);
    CHECK(with_t.str() == "n,x_n,t_n\n-1,1,\n0,2,1.5\n1,1,0\n2,0.5,0\n");
}
