#include "semiconj/gexpr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <utility>

#include "semiconj/error.hpp"

namespace semiconj {

namespace {

struct FunctionName {
    std::string_view name;
    Function fn;
};

constexpr std::array kFunctions{
    FunctionName{"sin", Function::Sin},   FunctionName{"cos", Function::Cos},
    FunctionName{"tan", Function::Tan},   FunctionName{"tanh", Function::Tanh},
    FunctionName{"exp", Function::Exp},   FunctionName{"log", Function::Log},
    FunctionName{"abs", Function::Abs},   FunctionName{"sqrt", Function::Sqrt},
};

std::string_view function_name(Function fn) {
    for (const auto& f : kFunctions)
        if (f.fn == fn) return f.name;
    return "?";
}

NodePtr make(decltype(Node::kind) kind, std::size_t offset) {
    return std::make_shared<const Node>(Node{std::move(kind), offset});
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }

class Parser {
  public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr parse_all() {
        NodePtr root = parse_expr();
        skip_space();
        if (pos_ != src_.size()) throw SyntaxError(pos_, "expected operator or end of input");
        return root;
    }

  private:
    void skip_space() {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
                                      src_[pos_] == '\r'))
            ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            skip_space();
            const std::size_t at = pos_;
            if (accept('+')) {
                NodePtr rhs = parse_term();
                lhs = make(Binary{BinaryOp::Add, lhs, rhs}, at);
            } else if (accept('-')) {
                NodePtr rhs = parse_term();
                lhs = make(Binary{BinaryOp::Sub, lhs, rhs}, at);
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            skip_space();
            const std::size_t at = pos_;
            if (accept('*')) {
                NodePtr rhs = parse_unary();
                lhs = make(Binary{BinaryOp::Mul, lhs, rhs}, at);
            } else if (accept('/')) {
                NodePtr rhs = parse_unary();
                lhs = make(Binary{BinaryOp::Div, lhs, rhs}, at);
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_unary() {
        skip_space();
        const std::size_t at = pos_;
        if (accept('-')) {
            NodePtr operand = parse_unary();
            return make(Negate{operand}, at);
        }
        if (accept('+')) return parse_unary();
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        skip_space();
        const std::size_t at = pos_;
        if (accept('^')) {
            // operand first; gcc leaks aggregate members if a later initializer throws
            NodePtr exponent = parse_unary();
            return make(Binary{BinaryOp::Pow, base, exponent}, at);
        }
        return base;
    }

    NodePtr parse_primary() {
        skip_space();
        const std::size_t at = pos_;
        if (pos_ >= src_.size()) throw SyntaxError(pos_, "expected expression, found end of input");
        const char c = src_[pos_];
        if (is_digit(c) || c == '.') return parse_number();
        if (accept('(')) {
            NodePtr inner = parse_expr();
            if (!accept(')')) throw SyntaxError(pos_, "expected ')'");
            return inner;
        }
        if (is_alpha(c)) {
            std::size_t end = pos_;
            while (end < src_.size() && (is_alpha(src_[end]) || is_digit(src_[end]))) ++end;
            const std::string_view ident = src_.substr(pos_, end - pos_);
            pos_ = end;
            if (ident == "u") return make(VarRef{Variable::U}, at);
            if (ident == "n") return make(VarRef{Variable::N}, at);
            if (ident == "pi") return make(ConstRef{Constant::Pi}, at);
            if (ident == "e") return make(ConstRef{Constant::E}, at);
            for (const auto& f : kFunctions) {
                if (f.name == ident) {
                    if (!accept('(')) throw SyntaxError(pos_, "expected '(' after " + std::string(ident));
                    NodePtr arg = parse_expr();
                    if (!accept(')')) throw SyntaxError(pos_, "expected ')'");
                    return make(Call{f.fn, arg}, at);
                }
            }
            throw SyntaxError(at, "unknown identifier '" + std::string(ident) + "'");
        }
        throw SyntaxError(at, std::string("expected expression, found '") + c + "'");
    }

    NodePtr parse_number() {
        const std::size_t at = pos_;
        std::size_t end = pos_;
        while (end < src_.size() && is_digit(src_[end])) ++end;
        if (end < src_.size() && src_[end] == '.') {
            ++end;
            if (end >= src_.size() || !is_digit(src_[end])) throw SyntaxError(end, "expected digit after '.'");
            while (end < src_.size() && is_digit(src_[end])) ++end;
        }
        if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
            std::size_t exp = end + 1;
            if (exp < src_.size() && (src_[exp] == '+' || src_[exp] == '-')) ++exp;
            if (exp < src_.size() && is_digit(src_[exp])) {
                while (exp < src_.size() && is_digit(src_[exp])) ++exp;
                end = exp;
            }
        }
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(src_.data() + at, src_.data() + end, value);
        if (ec != std::errc{} || ptr != src_.data() + end || !std::isfinite(value))
            throw SyntaxError(at, "malformed or out-of-range number");
        pos_ = end;
        return make(Number{value}, at);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

// Binding strength used by the printer.
enum Level : int { kAdditive = 1, kMultiplicative = 2, kUnary = 3, kPower = 4, kPrimary = 5 };

int level(const Node& node) {
    if (const auto* b = std::get_if<Binary>(&node.kind)) {
        switch (b->op) {
            case BinaryOp::Add:
            case BinaryOp::Sub: return kAdditive;
            case BinaryOp::Mul:
            case BinaryOp::Div: return kMultiplicative;
            case BinaryOp::Pow: return kPower;
        }
    }
    if (std::holds_alternative<Negate>(node.kind)) return kUnary;
    if (const auto* num = std::get_if<Number>(&node.kind)) return num->value < 0.0 ? kUnary : kPrimary;
    return kPrimary;
}

void render(const Node& node, std::string& out);

void render_at(const Node& node, int min_level, std::string& out) {
    const bool wrap = level(node) < min_level;
    if (wrap) out += '(';
    render(node, out);
    if (wrap) out += ')';
}

void render(const Node& node, std::string& out) {
    std::visit(
        [&out](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Number>) {
                std::array<char, 32> buf{};
                const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), k.value);
                out.append(buf.data(), res.ptr);
            } else if constexpr (std::is_same_v<T, VarRef>) {
                out += k.var == Variable::U ? "u" : "n";
            } else if constexpr (std::is_same_v<T, ConstRef>) {
                out += k.constant == Constant::Pi ? "pi" : "e";
            } else if constexpr (std::is_same_v<T, Negate>) {
                out += '-';
                render_at(*k.operand, kUnary, out);
            } else if constexpr (std::is_same_v<T, Binary>) {
                switch (k.op) {
                    case BinaryOp::Add:
                    case BinaryOp::Sub:
                        render_at(*k.lhs, kAdditive, out);
                        out += k.op == BinaryOp::Add ? " + " : " - ";
                        render_at(*k.rhs, kMultiplicative, out);
                        break;
                    case BinaryOp::Mul:
                    case BinaryOp::Div:
                        render_at(*k.lhs, kMultiplicative, out);
                        out += k.op == BinaryOp::Mul ? "*" : "/";
                        render_at(*k.rhs, kUnary, out);
                        break;
                    case BinaryOp::Pow:
                        render_at(*k.lhs, kPrimary, out);
                        out += '^';
                        render_at(*k.rhs, kUnary, out);
                        break;
                }
            } else if constexpr (std::is_same_v<T, Call>) {
                out += function_name(k.fn);
                out += '(';
                render(*k.arg, out);
                out += ')';
            }
        },
        node.kind);
}

struct Evaluator {
    double u;
    double n;
    std::optional<DomainFault> fault;

    double fail(const Node& node, std::string reason) {
        if (!fault) fault = DomainFault{node.offset, std::move(reason)};
        return 0.0;
    }

    double checked(const Node& node, double value) {
        if (!std::isfinite(value)) return fail(node, "non-finite result");
        return value;
    }

    double operator()(const Node& node) {
        if (fault) return 0.0;
        return std::visit([this, &node](const auto& k) { return visit(node, k); }, node.kind);
    }

    double visit(const Node&, const Number& k) { return k.value; }
    double visit(const Node&, const VarRef& k) { return k.var == Variable::U ? u : n; }
    double visit(const Node&, const ConstRef& k) {
        return k.constant == Constant::Pi ? std::numbers::pi : std::numbers::e;
    }
    double visit(const Node&, const Negate& k) { return -(*this)(*k.operand); }

    double visit(const Node& node, const Binary& k) {
        const double lhs = (*this)(*k.lhs);
        const double rhs = (*this)(*k.rhs);
        if (fault) return 0.0;
        switch (k.op) {
            case BinaryOp::Add: return checked(node, lhs + rhs);
            case BinaryOp::Sub: return checked(node, lhs - rhs);
            case BinaryOp::Mul: return checked(node, lhs * rhs);
            case BinaryOp::Div:
                if (std::abs(rhs) < kSingularityTol * (1.0 + std::abs(lhs))) return fail(node, "division by ~0");
                return checked(node, lhs / rhs);
            case BinaryOp::Pow:
                if (lhs < 0.0 && std::trunc(rhs) != rhs) return fail(node, "non-integer power of negative base");
                if (std::abs(lhs) < kSingularityTol && rhs < 0.0) return fail(node, "negative power of ~0");
                return checked(node, std::pow(lhs, rhs));
        }
        return 0.0;
    }

    double visit(const Node& node, const Call& k) {
        const double x = (*this)(*k.arg);
        if (fault) return 0.0;
        switch (k.fn) {
            case Function::Sin: return checked(node, std::sin(x));
            case Function::Cos: return checked(node, std::cos(x));
            case Function::Tan: return checked(node, std::tan(x));
            case Function::Tanh: return checked(node, std::tanh(x));
            case Function::Exp: return checked(node, std::exp(x));
            case Function::Log:
                if (x <= 0.0) return fail(node, "log of non-positive value");
                return checked(node, std::log(x));
            case Function::Abs: return std::abs(x);
            case Function::Sqrt:
                if (x < 0.0) return fail(node, "sqrt of negative value");
                return std::sqrt(x);
        }
        return 0.0;
    }
};

}  // namespace

bool structurally_equal(const Node& lhs, const Node& rhs) {
    if (lhs.kind.index() != rhs.kind.index()) return false;
    return std::visit(
        [&rhs](const auto& l) {
            using T = std::decay_t<decltype(l)>;
            const auto& r = std::get<T>(rhs.kind);
            if constexpr (std::is_same_v<T, Number>) {
                return l.value == r.value;
            } else if constexpr (std::is_same_v<T, VarRef>) {
                return l.var == r.var;
            } else if constexpr (std::is_same_v<T, ConstRef>) {
                return l.constant == r.constant;
            } else if constexpr (std::is_same_v<T, Negate>) {
                return structurally_equal(*l.operand, *r.operand);
            } else if constexpr (std::is_same_v<T, Binary>) {
                return l.op == r.op && structurally_equal(*l.lhs, *r.lhs) && structurally_equal(*l.rhs, *r.rhs);
            } else {
                return l.fn == r.fn && structurally_equal(*l.arg, *r.arg);
            }
        },
        lhs.kind);
}

GExpr::GExpr() : root_(make(Number{0.0}, 0)) {}

GExpr::GExpr(NodePtr root) : root_(std::move(root)) {
    if (!root_) throw std::invalid_argument("GExpr: null root");
}

GExpr parse(std::string_view src) { return GExpr(Parser(src).parse_all()); }

std::string print(const GExpr& g) {
    std::string out;
    render(g.root(), out);
    return out;
}

EvalResult eval_g(const GExpr& g, double u, std::int64_t n) {
    Evaluator ev{u, static_cast<double>(n), std::nullopt};
    const double value = ev(g.root());
    if (ev.fault) return {0.0, std::move(ev.fault)};
    if (!std::isfinite(value)) return {0.0, DomainFault{g.root().offset, "non-finite result"}};
    return {value, std::nullopt};
}

}  // namespace semiconj
