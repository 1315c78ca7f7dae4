#include "doctest.h"

#include "clarith/syntax.hpp"
#include "clarith/text.hpp"

#include <random>

using namespace clarith;

namespace {

std::string round(const std::string& s) { return print(parse_formula(s)); }

}  // namespace

TEST_CASE("numerals") {
    CHECK(Natural(0).bits() == "0");
    CHECK(Natural(0).size() == 0);
    CHECK(Natural::from_bits("101") == Natural(5));
    CHECK(Natural::from_bits("101").size() == 3);
    CHECK_FALSE(Natural::is_numeral("012"));
    CHECK_FALSE(Natural::is_numeral(""));
    CHECK(Natural::from_bits("111010").substring(2, 3) == Natural::from_bits("101"));
    CHECK(Natural::from_bits("111010").substring(0, 6) == Natural::from_bits("111010"));
    CHECK(Natural::from_bits("100").bit_from_left(0));
    CHECK_FALSE(Natural::from_bits("100").bit_from_left(1));
    CHECK(concat(Natural::from_bits("101"), Natural::from_bits("11")) == Natural::from_bits("10111"));
    CHECK(concat(Natural::from_bits("101"), Natural(0)) == Natural::from_bits("101"));
    CHECK(concat(Natural(0), Natural::from_bits("11")) == Natural::from_bits("11"));
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        auto n = Natural::random_bits(rng, 1 + i % 130);
        CHECK(Natural::from_bits(n.bits()) == n);
    }
}

TEST_CASE("axiom 8 parses to the expected tree") {
    auto f = parse_formula("⊓x⊔y(y=x′)");
    REQUIRE(f->kind == FormulaKind::CAll);
    CHECK(f->var == "x");
    auto g = f->kids[0];
    REQUIRE(g->kind == FormulaKind::CEx);
    CHECK(g->var == "y");
    auto a = g->kids[0];
    REQUIRE(a->kind == FormulaKind::Atom);
    CHECK(a->pred == "=");
    CHECK(same_term(a->args[0], var("y")));
    CHECK(same_term(a->args[1], succ(var("x"))));
    CHECK(same(f, parse_formula("!!x: ??y: (y = x')")));
    CHECK(print(f) == "⊓x⊔y(y=x′)");
    CHECK(print(f, Style::Ascii) == "!!x:??y:(y=x')");
}

TEST_CASE("trivial printing and errors") {
    CHECK(print(parse_formula("⊤")) == "⊤");
    try {
        parse_formula("p ∧");
        FAIL("expected a syntax error");
    } catch (const SyntaxError& e) {
        CHECK(e.offset == 3);
    }
    CHECK_THROWS_AS(parse_formula("p(x) ∧ p(x,y)"), SyntaxError);
    CHECK_THROWS_AS(parse_formula("p ∧ q ⊓ r"), SyntaxError);
    CHECK_THROWS_AS(parse_formula("x = 012"), SyntaxError);
}

TEST_CASE("binary successor sugar") {
    auto t = parse_term("x0");
    CHECK(same_term(t, mul(succ(succ(num(0))), var("x"))));
    CHECK(same_term(parse_term("x1"), succ(mul(succ(succ(num(0))), var("x")))));
    CHECK(same_term(parse_term("(x0)′"), parse_term("x1")));
    CHECK(print(parse_term("(101)0")) == "(101)0");
    CHECK(print(parse_term("0′′×s")) == "s0");
    CHECK(print(parse_term("(x+y)1")) == "(x+y)1");
    CHECK(print(parse_term("x³")) == "x³");
    CHECK(print(parse_term("cube(x)"), Style::Ascii) == "cube(x)");
}

TEST_CASE("substitution") {
    auto f = parse_formula("⊔y(y=x0)");
    CHECK(print(substitute(f, "x", num(Natural::from_bits("101")))) == "⊔y(y=(101)0)");
    auto g = parse_formula("p(x) → p(y)");
    CHECK(print(substitute(g, "x", var("y"))) == "p(y) → p(y)");
    auto h = parse_formula("∀y q(x,y)");
    CHECK_THROWS_AS(substitute(h, "x", var("y")), CaptureError);
    // H(y) for the ⊓-Condition: replace free x by y.
    auto body = parse_formula("⊓x(x=0 ⊔ x≠0)")->kids[0];
    CHECK(print(rename_free(body, "x", "s")) == "s=0 ⊔ s≠0");
}

TEST_CASE("elementarization") {
    CHECK(print(elementarize(parse_formula("⊓x(p(x)⊔¬p(x))"))) == "⊤");
    CHECK(print(elementarize(parse_formula("⊔x¬p(x) ∨ ∀x p(x)"))) == "⊥ ∨ ∀x p(x)");
    CHECK(print(elementarize(parse_sequent("p ⟹ p"))) == "p → p");
    auto f = parse_formula("(p ⊓ q) ∧ ∀x(r(x) ∨ ⊔y s(y))");
    auto e = elementarize(f);
    CHECK(is_elementary(e));
    CHECK(same(elementarize(e), e));
}

TEST_CASE("surface occurrences and replacement") {
    auto f = parse_formula("(p⊓q)∨(p⊓q)");
    int hits = 0;
    for (auto& [path, g] : surface_occurrences(f))
        if (g->kind == FormulaKind::CAnd) ++hits;
    CHECK(hits == 2);
    CHECK(print(replace_at(f, {0}, parse_formula("p"))) == "p ∨ (p ⊓ q)");
    auto h = parse_formula("⊓x(p(x) ∧ q)");
    for (auto& [path, g] : surface_occurrences(h)) CHECK(path.empty());
    CHECK_THROWS(replace_at(h, {0}, top()));
}

TEST_CASE("sizebounds and bounded formulas") {
    CHECK(is_sizebound(parse_formula("|x| ≤ |y|+|z|"), "x"));
    CHECK_FALSE(is_sizebound(parse_formula("|x| ≤ |x|+|z|"), "x"));
    CHECK_FALSE(is_sizebound(parse_formula("x ≤ |y|"), "x"));
    CHECK(is_polynomially_bounded(parse_formula("x=0 ⊔ x≠0")));
    CHECK_FALSE(is_polynomially_bounded(parse_formula("⊔y(y=x′)")));
    CHECK(is_polynomially_bounded(parse_formula("0=0 ∧ ⊔y(|y|≤|z|′ ∧ z=y0)")));
    CHECK(is_polynomially_bounded(parse_formula("⊓y(|y|≤|z| → ⊔u(|u|≤|y|+|z| ∧ u=y))")));
    auto bad = unbounded_quantifier(parse_formula("p ∧ ⊔y(y=x+x)"));
    REQUIRE(bad.has_value());
    CHECK(path_string(*bad) == "1");
}

TEST_CASE("closures") {
    CHECK(print(closure(parse_formula("y=x′"), ClosureKind::Choice)) == "⊓x⊓y(y=x′)");
    CHECK(print(closure(parse_formula("0=0"), ClosureKind::Blind)) == "0=0");
    CHECK(print(closure(parse_formula("x=0 ⊔ x≠0"), ClosureKind::Choice)) == "⊓x(x=0 ⊔ x≠0)");
}

TEST_CASE("hygiene") {
    auto f = parse_formula("p(x) ∧ ∀x q(x)");
    CHECK(print(f) == "p(x) ∧ ∀x_1 q(x_1)");
    ParseOptions strict;
    strict.strict_hygiene = true;
    CHECK_THROWS_AS(parse_formula("p(x) ∧ ∀x q(x)", strict), SyntaxError);
    auto s = parse_sequent("∀x(x=0 → x0=0), ∀x(x≠0 → x0≠0) ⟹ s=0 → s0=0");
    CHECK(is_hygienic(s));
    CHECK(print(s.ante[0]) == "∀x(x=0 → x0=0)");
}

TEST_CASE("negation sugar matches the DeMorgan identities") {
    auto a = parse_formula("¬(p ∧ q)");
    CHECK(same(a, parse_formula("¬p ∨ ¬q")));
    CHECK(same(parse_formula("¬⊓x p(x)"), parse_formula("⊔x¬p(x)")));
    CHECK(same(parse_formula("¬(p ⊔ q)"), parse_formula("¬p ⊓ ¬q")));
    CHECK(same(parse_formula("¬¬p"), parse_formula("p")));
    auto f = parse_formula("⊓x(x=0 ⊔ x≠0 → x0=0 ⊔ x0≠0)");
    CHECK(same(negate(negate(f)), f));
}

TEST_CASE("round trips over corpus-style text") {
    const char* texts[] = {
        "⊓x(x=0 ⊔ x≠0 → x0=0 ⊔ x0≠0)",
        "∀x(x³=x×x×x)",
        "⊓x⊓y⊔z(z=x×y)",
        "(0=0 ⊓ 0=1) → 10=11 ⊓ 10=10",
        "∀y(Even(y) ⊔ Odd(y) → ⊓x(Even(x+y) ⊔ Odd(x+y)))",
        "⊓x p(x) → ∀x p(x)",
        "⊔y⊓x(p(x) → p(y))",
        "p ⊓ q → (p ⊓ q) ∧ (p ⊓ q)",
        "0=0 ∧ ⊔y(|y|≤|z|′ ∧ z=y0)",
        "[x]_y=z ∧ [x]_y^z=t ∧ 2^x=y ∧ x<y",
        "¬(x≤y) ∨ ⊥",
        "⊓x⊔y(y=x1)",
    };
    for (auto* t : texts) {
        auto f = parse_formula(t);
        auto p = print(f);
        CAPTURE(p);
        CHECK(same(parse_formula(p), f));
        CHECK(same(parse_formula(print(f, Style::Ascii)), f));
        CHECK(print(parse_formula(p)) == p);
    }
    CHECK(round("(0=0 ⊓ 0=1) → (10=11 ⊓ 10=10)") == "0=0 ⊓ 0=1 → 10=11 ⊓ 10=10");
    auto s = parse_sequent("t=r′, r=s0 ⟹ ⊔y(y=(s0)′)");
    CHECK(print(s) == "t=r′, r=s0 ⟹ ⊔y(y=s1)");
}

TEST_CASE("random formulas survive print and parse") {
    std::mt19937 rng(11);
    std::function<TermP(int)> gen_term = [&](int d) -> TermP {
        int k = d <= 0 ? rng() % 2 : rng() % 7;
        switch (k) {
            case 0: return var(std::string(1, "xyz"[rng() % 3]));
            case 1: return num(Natural(rng() % 6));
            case 2: return succ(gen_term(d - 1));
            case 3: return add(gen_term(d - 1), gen_term(d - 1));
            case 4: return mul(gen_term(d - 1), gen_term(d - 1));
            case 5: return bit0(gen_term(d - 1));
            default: return app("f", {gen_term(d - 1)});
        }
    };
    std::function<FormulaP(int)> gen = [&](int d) -> FormulaP {
        int k = d <= 0 ? rng() % 3 : rng() % 9;
        switch (k) {
            case 0: return eq(gen_term(2), gen_term(2));
            case 1: return negate(atom("p", {gen_term(1)}));
            case 2: return atom("q", {});
            case 3: return conj({gen(d - 1), gen(d - 1)});
            case 4: return disj({gen(d - 1), gen(d - 1)});
            case 5: return cconj({gen(d - 1), gen(d - 1)});
            case 6: return cdisj({gen(d - 1), gen(d - 1), gen(d - 1)});
            case 7: return quant(FormulaKind::CAll, "u", gen(d - 1));
            default: return quant(FormulaKind::All, "v", gen(d - 1));
        }
    };
    for (int i = 0; i < 300; ++i) {
        auto f = gen(4);
        auto p = print(f);
        CAPTURE(p);
        auto g = parse_formula(p);
        CHECK(alpha_equal(g, f));
        CHECK(print(g) == print(parse_formula(print(g))));
    }
}
