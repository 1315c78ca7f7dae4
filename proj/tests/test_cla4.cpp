#include "doctest.h"

#include "clarith/cla4.hpp"
#include "clarith/text.hpp"

#include <fstream>
#include <random>
#include <sstream>

using namespace clarith;

namespace {

std::string slurp(const std::string& rel) {
    std::ifstream in(std::string(CLARITH_SOURCE_DIR) + "/" + rel);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Cla4Proof corpus(const std::string& name) {
    return parse_cla4(slurp("corpus/" + name), std::string(CLARITH_SOURCE_DIR) + "/corpus");
}

}  // namespace

TEST_CASE("axiom recognition") {
    auto a9 = is_axiom(parse_formula("⊓x⊔y(y=x0)"));
    REQUIRE(a9.has_value());
    CHECK(a9->number == 9);
    auto a9r = is_axiom(parse_formula("⊓u⊔v(v=u0)"));
    REQUIRE(a9r.has_value());
    CHECK(a9r->number == 9);
    CHECK(is_axiom(parse_formula("∀x(0≠x′)"))->number == 1);
    CHECK_FALSE(is_axiom(parse_formula("∀x(x′≠0)")).has_value());

    auto a7 = is_axiom(parse_formula("(0=0 ∧ ∀x(x=0 → x′=0)) → ∀x(x=0)"));
    REQUIRE(a7.has_value());
    CHECK(a7->number == 7);
    CHECK(a7->var == "x");

    CHECK_FALSE(is_axiom(parse_formula("⊓x⊔y(y=2^x)")).has_value());
    CHECK_FALSE(is_axiom(parse_formula("⊓x⊔y(y=x1)")).has_value());
}

TEST_CASE("binary 1-successor audit") {
    auto proof = corpus("onesuc.cla4");
    REQUIRE(proof.lines.size() == 3);
    REQUIRE(proof.lines[2].attached.has_value());
    CHECK(proof.lines[2].attached->lines.size() == 7);
    auto rep = check_cla4(proof);
    INFO(rep.summary());
    CHECK(rep.ok);
    CHECK(rep.pa_trusted == 0);
    CHECK(rep.trusted_stability == 0);
    CHECK(rep.lines[0].axiom == 8);
    CHECK(rep.lines[1].axiom == 9);
    CHECK(rep.extraction_ready);
}

TEST_CASE("zeroness audit") {
    auto proof = corpus("zeroness.cla4");
    REQUIRE(proof.lines.size() == 7);
    int attached = 0;
    for (auto& l : proof.lines)
        if (l.attached) ++attached;
    CHECK(attached == 3);
    auto rep = check_cla4(proof);
    INFO(rep.summary());
    CHECK(rep.ok);
    CHECK(rep.pa_trusted == 3);
    CHECK(rep.extraction_ready);
    REQUIRE(rep.lines[6].induction_formula);
    CHECK(print(rep.lines[6].induction_formula, Style::Ascii) ==
          print(parse_formula("x=0 ⊔ x≠0"), Style::Ascii));
}

TEST_CASE("PA steps may be refused") {
    auto proof = corpus("zeroness.cla4");
    Cla4Options opt;
    opt.allow_pa_trusted = false;
    auto rep = check_cla4(proof, opt);
    CHECK_FALSE(rep.ok);
}

TEST_CASE("induction checks") {
    auto basis = parse_formula("0=0 ⊔ 0≠0");
    auto left = parse_formula("⊓x(x=0 ⊔ x≠0 → x0=0 ⊔ x0≠0)");
    auto right = parse_formula("⊓x(x=0 ⊔ x≠0 → x1=0 ⊔ x1≠0)");
    auto concl = parse_formula("⊓x(x=0 ⊔ x≠0)");
    CHECK_FALSE(check_induction(concl, basis, left, right, "x").has_value());
    // Premises exchanged.
    CHECK(check_induction(concl, basis, right, left, "x").has_value());
    // Renaming the induction variable changes nothing.
    CHECK_FALSE(check_induction(parse_formula("⊓z(z=0 ⊔ z≠0)"), basis,
                                parse_formula("⊓z(z=0 ⊔ z≠0 → z0=0 ⊔ z0≠0)"),
                                parse_formula("⊓z(z=0 ⊔ z≠0 → z1=0 ⊔ z1≠0)"), "z")
                    .has_value());
    // F with an unbounded choice quantifier.
    auto v = check_induction(parse_formula("⊓x⊔y(y=x+x)"), parse_formula("⊔y(y=0+0)"),
                             parse_formula("⊓x(⊔y(y=x+x) → ⊔y(y=x0+x0))"),
                             parse_formula("⊓x(⊔y(y=x+x) → ⊔y(y=x1+x1))"), "x");
    REQUIRE(v.has_value());
    CHECK(v->find("unbounded") != std::string::npos);
}

TEST_CASE("LC premise order is immaterial") {
    auto proof = corpus("onesuc.cla4");
    std::swap(proof.lines[2].premises[0], proof.lines[2].premises[1]);
    CHECK(check_cla4(proof).ok);
}

TEST_CASE("PA steps must be elementary") {
    auto proof = parse_cla4("I. ⊓x⊔y(y=x′) ; pa:PA\n");
    auto rep = check_cla4(proof);
    CHECK_FALSE(rep.ok);
    auto false_pa = parse_cla4("I. 0=0′ ; pa:PA\n");
    CHECK_FALSE(check_cla4(false_pa).ok);
    auto decided = check_cla4(parse_cla4("I. 0′+0′=0′′ ; pa:PA\n"));
    CHECK(decided.ok);
    CHECK(decided.pa_trusted == 0);
    CHECK(decided.lines[0].discharged);
}

TEST_CASE("unattached LC steps are searched") {
    auto proof = parse_cla4(
        "I. ⊓x⊔y(y=x′) ; axiom:8\n"
        "II. ⊓x⊔y(y=x′) ; lc:I\n");
    auto rep = check_cla4(proof);
    INFO(rep.summary());
    CHECK(rep.ok);
    CHECK(rep.lines[1].lc_searched);
}

TEST_CASE("format round trip") {
    auto proof = corpus("zeroness.cla4");
    auto again = parse_cla4(format_cla4(proof));
    CHECK(format_cla4(again) == format_cla4(proof));
    CHECK(check_cla4(again).ok);
}

TEST_CASE("mutations of the arithmetic proofs are rejected") {
    for (auto name : {"onesuc.cla4", "zeroness.cla4"}) {
        INFO(name);
        auto proof = corpus(name);
        auto exp = explicate(proof, check_cla4(proof));
        REQUIRE(check_cla4(exp).ok);
        std::mt19937_64 rng(5);
        auto muts = mutate_cla4(exp, rng, 100);
        CHECK(muts.size() == 100);
        int accepted = 0;
        for (auto& m : muts)
            if (check_cla4(m).ok) {
                ++accepted;
                MESSAGE(format_cla4(m));
            }
        CHECK(accepted == 0);
    }
}
