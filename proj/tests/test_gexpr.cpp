#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "semiconj/error.hpp"
#include "semiconj/gexpr.hpp"

using namespace semiconj;

namespace {

double value_of(std::string_view src, double u = 0.0, std::int64_t n = 0) {
    const EvalResult r = eval_g(parse(src), u, n);
    REQUIRE(r.ok());
    return r.value;
}

std::size_t syntax_offset(std::string_view src) {
    try {
        parse(src);
    } catch (const SyntaxError& e) {
        return e.offset();
    }
    FAIL("expected a syntax error for: " << src);
    return 0;
}

NodePtr make(decltype(Node::kind) kind) { return std::make_shared<const Node>(Node{std::move(kind), 0}); }

// Random tree of the given maximum depth over the whole grammar. Literals are
// nonnegative because a leading minus parses as a negation node.
NodePtr random_tree(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 1 ? 2 : 5);
    std::uniform_int_distribution<int> small(0, 7);
    switch (pick(rng)) {
        case 0: {
            std::uniform_real_distribution<double> mag(0.0, 1.0);
            std::uniform_int_distribution<int> exp10(-20, 20);
            const double v = small(rng) < 3 ? static_cast<double>(small(rng)) : mag(rng) * std::pow(10.0, exp10(rng));
            return make(Number{v});
        }
        case 1:
            return make(VarRef{small(rng) < 5 ? Variable::U : Variable::N});
        case 2:
            return make(ConstRef{small(rng) < 4 ? Constant::Pi : Constant::E});
        case 3:
            return make(Negate{random_tree(rng, depth - 1)});
        case 4:
            return make(Binary{static_cast<BinaryOp>(small(rng) % 5), random_tree(rng, depth - 1),
                               random_tree(rng, depth - 1)});
        default:
            return make(Call{static_cast<Function>(small(rng)), random_tree(rng, depth - 1)});
    }
}

}  // namespace

TEST_CASE("parse builds the expected trees") {
    const GExpr rational = parse("1/u - sqrt(3) + u");
    const auto* sum = std::get_if<Binary>(&rational.root().kind);
    REQUIRE(sum != nullptr);
    CHECK(sum->op == BinaryOp::Add);
    CHECK(std::holds_alternative<VarRef>(sum->rhs->kind));
    CHECK(rational == parse("((1 / u) - sqrt(3)) + u"));
    CHECK(rational == parse("  1/u-sqrt( 3 )+u  "));

    const GExpr call = parse("tanh(u)");
    const auto* c = std::get_if<Call>(&call.root().kind);
    REQUIRE(c != nullptr);
    CHECK(c->fn == Function::Tanh);
    CHECK(std::get<VarRef>(c->arg->kind).var == Variable::U);

    CHECK(parse("2.5e-3").root().kind.index() == 0);
    CHECK(std::get<Number>(parse("2.5e-3").root().kind).value == 2.5e-3);
    CHECK(std::get<ConstRef>(parse("e").root().kind).constant == Constant::E);
    CHECK(parse("2*e") == parse("2 * e"));
}

TEST_CASE("evaluation examples") {
    CHECK(value_of("2^3^2") == 512.0);
    CHECK(value_of("(2^3)^2") == 64.0);
    CHECK(value_of("1/u", 2.0) == 0.5);
    CHECK(value_of("n*2 + 1", 0.0, 7) == 15.0);
    CHECK(value_of("pi") == std::numbers::pi);
    CHECK(value_of("e") == std::numbers::e);
    CHECK(value_of("-2^2") == -4.0);
    CHECK(value_of("2^-1") == 0.5);
    CHECK(value_of("abs(-3) + exp(0) + log(1) + cos(0) + sin(0) + tan(0)") == 5.0);
    CHECK(value_of("(-2)^3") == -8.0);

    const double sigma0 = (2.0 / std::sqrt(3.0)) * (1.0 + std::cos(std::numbers::pi / 9.0));
    const double expected = 1.0 / sigma0 - std::sqrt(3.0) + sigma0;
    CHECK(value_of("1/u - sqrt(3) + u", sigma0) == doctest::Approx(expected).epsilon(1e-15));
    CHECK(value_of("1/u - sqrt(3) + u", sigma0) == doctest::Approx(0.954188).epsilon(1e-6));
}

TEST_CASE("syntax errors report the offending offset") {
    CHECK(syntax_offset("") == 0);
    CHECK(syntax_offset("1 +") == 3);
    CHECK(syntax_offset("u $ 2") == 2);
    CHECK(syntax_offset("(u + 1") == 6);
    CHECK(syntax_offset("sin u") == 4);
    CHECK(syntax_offset("foo(u)") == 0);
    CHECK(syntax_offset("u u") == 2);
    CHECK(syntax_offset("1.e5") == 2);
    CHECK(syntax_offset("3.") == 2);
    CHECK_THROWS_WITH_AS(parse("2 *"), doctest::Contains("offset 3"), SyntaxError);
}

TEST_CASE("domain faults") {
    const auto fault_of = [](std::string_view src, double u) {
        const GExpr g = parse(src);
        const EvalResult r = eval_g(g, u, 0);
        CHECK_FALSE(r.ok());
        return r.fault.value_or(DomainFault{999, ""});
    };
    CHECK(fault_of("1/u", 1e-18).offset == 1);
    CHECK(fault_of("1/u", 0.0).offset == 1);
    CHECK(fault_of("2 + log(u)", 0.0).offset == 4);
    CHECK(fault_of("log(u)", -1.0).offset == 0);
    CHECK(fault_of("sqrt(u)", -1e-3).offset == 0);
    CHECK(fault_of("u^0.5", -4.0).offset == 1);
    CHECK(fault_of("(-8)^(1/3)", 0.0).offset == 4);
    CHECK(fault_of("u^(-1)", 0.0).offset == 1);
    CHECK(fault_of("exp(u)", 1000.0).offset == 0);
    CHECK(fault_of("u*u", 1e200).offset == 1);
    CHECK_FALSE(fault_of("1/u", 1e-18).reason.empty());

    CHECK(eval_g(parse("1/u"), 1e-12, 0).ok());
    CHECK(eval_g(parse("sqrt(u)"), 0.0, 0).ok());
    CHECK(eval_g(parse("u^2"), -3.0, 0).value == 9.0);
}

TEST_CASE("a default expression is the constant zero") {
    const GExpr g;
    CHECK(eval_g(g, 5.0, 3).value == 0.0);
    CHECK(print(g) == "0");
}

TEST_CASE("print then parse is the identity on random trees") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 1000; ++trial) {
        const GExpr g(random_tree(rng, 1 + trial % 6));
        const std::string text = print(g);
        INFO(text);
        const GExpr back = parse(text);
        CHECK(back == g);
        CHECK(print(back) == text);
    }
}

TEST_CASE("eval never yields NaN or infinity on random trees") {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> arg(-50.0, 50.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const GExpr g(random_tree(rng, 1 + trial % 6));
        for (int s = 0; s < 5; ++s) {
            const EvalResult r = eval_g(g, arg(rng), static_cast<std::int64_t>(trial % 9));
            if (r.ok()) CHECK(std::isfinite(r.value));
        }
    }
    for (double special : {0.0, -0.0, 1e-300, 1e300, -1e300}) {
        for (const char* src : {"1/u", "log(u)", "u^u", "exp(u)", "tan(u)", "u/u", "sqrt(u)*1/u"}) {
            const EvalResult r = eval_g(parse(src), special, 0);
            if (r.ok()) CHECK(std::isfinite(r.value));
        }
    }
}

TEST_CASE("precedence conformance on random substitutions") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> d(-10.0, 10.0);
    const GExpr sum_product = parse("u + n*u*pi");
    const GExpr sum_product_paren = parse("u + ((n*u)*pi)");
    const GExpr neg_pow = parse("-u^2");
    const GExpr neg_pow_paren = parse("-(u^2)");
    const GExpr mixed = parse("u - u/2*3 + 2^2^0.5");
    const GExpr mixed_paren = parse("(u - ((u/2)*3)) + (2^(2^0.5))");
    CHECK(sum_product == sum_product_paren);
    CHECK(neg_pow == neg_pow_paren);
    CHECK(mixed == mixed_paren);
    for (int trial = 0; trial < 500; ++trial) {
        const double u = d(rng);
        const auto n = static_cast<std::int64_t>(trial % 13) - 6;
        CHECK(eval_g(sum_product, u, n).value == eval_g(sum_product_paren, u, n).value);
        CHECK(eval_g(neg_pow, u, n).value == eval_g(neg_pow_paren, u, n).value);
        CHECK(eval_g(neg_pow, u, n).value == -(u * u));
        CHECK(eval_g(mixed, u, n).value == eval_g(mixed_paren, u, n).value);
    }
}

TEST_CASE("structural equality ignores source offsets") {
    CHECK(parse("u+1") == parse(" u + 1"));
    CHECK_FALSE(parse("u+1") == parse("1+u"));
    CHECK_FALSE(parse("u-1") == parse("u+1"));
    CHECK_FALSE(parse("sin(u)") == parse("cos(u)"));
}
