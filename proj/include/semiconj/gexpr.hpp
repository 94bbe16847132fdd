#pragma once

// Expression language for the nonlinearity g_n(u).
//
//   expr    := term   { ("+" | "-") term }
//   term    := unary  { ("*" | "/") unary }
//   unary   := "-" unary | "+" unary | power
//   power   := primary [ "^" unary ]            (right associative)
//   primary := number | "u" | "n" | "pi" | "e"
//            | func "(" expr ")" | "(" expr ")"
//   func    := sin | cos | tan | tanh | exp | log | abs | sqrt
//   number  := digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ]

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace semiconj {

enum class Variable { U, N };
enum class Constant { Pi, E };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Function { Sin, Cos, Tan, Tanh, Exp, Log, Abs, Sqrt };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Number {
    double value;
};
struct VarRef {
    Variable var;
};
struct ConstRef {
    Constant constant;
};
struct Negate {
    NodePtr operand;
};
struct Binary {
    BinaryOp op;
    NodePtr lhs;
    NodePtr rhs;
};
struct Call {
    Function fn;
    NodePtr arg;
};

struct Node {
    std::variant<Number, VarRef, ConstRef, Negate, Binary, Call> kind;
    std::size_t offset = 0;  ///< byte offset in the source text; ignored by equality
};

/// Structural equality (source offsets are not compared).
bool structurally_equal(const Node& lhs, const Node& rhs);

/// Immutable parsed expression. Copies share the tree.
class GExpr {
  public:
    GExpr();  ///< the constant 0
    explicit GExpr(NodePtr root);

    const Node& root() const { return *root_; }
    friend bool operator==(const GExpr& lhs, const GExpr& rhs) {
        return structurally_equal(*lhs.root_, *rhs.root_);
    }

  private:
    NodePtr root_;
};

/// Throws SyntaxError with the byte offset of the offending token.
GExpr parse(std::string_view src);

/// Minimal-parenthesis rendering; parse(print(g)) == g.
std::string print(const GExpr& g);

struct DomainFault {
    std::size_t offset;  ///< source offset of the faulting node
    std::string reason;
};

struct EvalResult {
    double value = 0.0;
    std::optional<DomainFault> fault;

    bool ok() const noexcept { return !fault.has_value(); }
};

/// Singularity guard for division: |den| < sing_tol * (1 + |num|) is a fault.
inline constexpr double kSingularityTol = 1e-13;

/// Evaluates g at (u, n). Never yields NaN or Inf: those surface as faults.
EvalResult eval_g(const GExpr& g, double u, std::int64_t n);

}  // namespace semiconj
