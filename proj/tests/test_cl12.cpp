#include "doctest.h"

#include "clarith/cl12.hpp"
#include "clarith/text.hpp"

#include <fstream>
#include <functional>
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

Validity validity(const std::string& sequent) {
    return decide_validity(elementarize(parse_sequent(sequent))).verdict;
}

}  // namespace

TEST_CASE("stability oracle") {
    CHECK(validity("∀x(x³=(x×x)×x), t=s×s, r=t×s ⟹ r=s³") == Validity::Valid);
    CHECK(validity("⊔x¬p(x) ∨ ∀x p(x)") == Validity::Refuted);
    CHECK(validity("p ⟹ p") == Validity::Valid);
    CHECK(validity("∀x(y=f(x)) ⟹ f(a)=f(b)") == Validity::Valid);
    CHECK(validity("∀x∃y(y=f(x))") == Validity::Valid);
    CHECK(validity("x=y, p(x) ⟹ p(y)") == Validity::Valid);
    CHECK(validity("p(x) ⟹ p(y)") == Validity::Refuted);
    CHECK(validity("t=r′, r=s0 ⟹ t=(s0)′") == Validity::Valid);
    CHECK(validity("∀x(x1≠0) ⟹ s=0 → s1≠0") == Validity::Valid);
}

TEST_CASE("prover certificates replay") {
    auto phi = elementarize(parse_sequent("∀x(x³=(x×x)×x), t=s×s, r=t×s ⟹ r=s³"));
    auto r = prove_valid(phi);
    REQUIRE(r.verdict == Validity::Valid);
    CHECK(replay_certificate(phi, r.certificate));
    CHECK_FALSE(replay_certificate(phi, {"t"}));
    auto skolem = elementarize(parse_sequent("∀x∃y(y=f(x))"));
    auto rs = prove_valid(skolem);
    REQUIRE(rs.verdict == Validity::Valid);
    CHECK(replay_certificate(skolem, rs.certificate));
    CHECK_FALSE(replay_certificate(elementarize(parse_sequent("p(x) ⟹ p(y)")), {"x", "y"}));
}

TEST_CASE("countermodels falsify") {
    auto cm = find_countermodel(parse_formula("∀x p(x) ∨ ∀x ¬p(x)"), 3, 100000);
    REQUIRE(cm.has_value());
    CHECK(cm->find("domain {0..1}") == 0);
    CHECK_FALSE(find_countermodel(parse_formula("p ∨ ¬p"), 4, 100000).has_value());
}

TEST_CASE("cube proof is accepted line by line") {
    auto proof = parse_cl12(slurp("corpus/cube.cl12"));
    REQUIRE(proof.lines.size() == 10);
    auto rep = check_proof(proof);
    INFO(rep.summary());
    CHECK(rep.ok);
    CHECK(rep.trusted_steps == 0);
    CHECK(rep.lines[1].resolved_params.at("t") == "r");
    CHECK(rep.lines[8].resolved_params.at("index") == "1");
    CHECK(rep.lines[9].links.size() == 1);
    CHECK(rep.lines[9].links[0].kind == PremiseLink::AllCond);
    CHECK(rep.lines[9].links[0].fresh == "s");
}

TEST_CASE("cube proof with a wrong constant is rejected") {
    auto proof = parse_cl12(slurp("corpus/cube.cl12"));
    proof.lines[4].params["t"] = "r";
    auto lc = check_line(proof, 4);
    CHECK_FALSE(lc.ok);
    CHECK(lc.violation.find("AllChoose") != std::string::npos);
    CHECK_FALSE(check_proof(proof).ok);
}

TEST_CASE("Wait conditions are reported by name") {
    auto proof = parse_cl12(
        "1. ⟹ p ; Wait\n"
        "2. ⟹ p ⊓ q ; Wait ; premises=1\n");
    auto rep = check_proof(proof);
    CHECK_FALSE(rep.ok);
    CHECK(rep.first_bad == 0);
    CHECK(rep.lines[0].violation.find("Stability Condition") == 0);

    auto p2 = parse_cl12(
        "1. p ⟹ p ; Wait\n"
        "2. p ⟹ p ⊓ q ; Wait ; premises=1\n");
    auto rep2 = check_proof(p2);
    CHECK_FALSE(rep2.ok);
    CHECK(rep2.lines[1].violation.find("⊓-Condition: missing premise for component 1") == 0);

    auto p3 = parse_cl12(
        "1. p ⟹ p ; Wait\n"
        "2. p ⟹ q ∨ p ; Wait ; premises=1\n");
    auto rep3 = check_proof(p3);
    CHECK(rep3.lines[1].violation.find("not demanded") != std::string::npos);
}

TEST_CASE("Wait freshness") {
    // The fresh variable must not occur in the conclusion.
    auto bad = parse_cl12(
        "1. p(y) ⟹ p(y) ; Wait\n"
        "2. p(y) ⟹ ⊓x p(x) ; Wait ; premises=1\n");
    CHECK_FALSE(check_proof(bad).ok);
    auto good = parse_cl12(
        "1. ∀x p(x) ⟹ p(y) ; Wait\n"
        "2. ∀x p(x) ⟹ ⊓x p(x) ; Wait ; premises=1\n");
    auto rep = check_proof(good);
    CHECK(rep.ok);
    CHECK(rep.lines[1].links[0].fresh == "y");
}

TEST_CASE("Choose term restrictions") {
    auto compound = parse_cl12(
        "1. ⟹ f(a)=f(a) ; Wait\n"
        "2. ⟹ ⊔y(y=f(a)) ; ExistsChoose:t=f(a) ; premises=1\n");
    auto rep = check_proof(compound);
    CHECK_FALSE(rep.ok);
    CHECK(rep.lines[1].violation.find("constant or a variable") != std::string::npos);
}

TEST_CASE("Replicate direction") {
    auto proof = parse_cl12(
        "1. p, q ⟹ p ∧ q ; Wait\n"
        "2. p, p ⊓ q ⟹ p ∧ q ; AndChoose ; premises=1\n"
        "3. p ⊓ q, p ⊓ q ⟹ p ∧ q ; AndChoose ; premises=2\n"
        "4. p ⊓ q ⟹ p ∧ q ; Replicate ; premises=3\n");
    auto rep = check_proof(proof);
    INFO(rep.summary());
    CHECK(rep.ok);
    auto reversed = parse_cl12(
        "1. p ⟹ p ; Wait\n"
        "2. p, p ⟹ p ; Replicate ; premises=1\n");
    CHECK_FALSE(check_proof(reversed).ok);
}

TEST_CASE("format round trip") {
    auto proof = parse_cl12(slurp("corpus/cube.cl12"));
    auto rep = check_proof(proof);
    auto exp = explicate(proof, rep);
    auto again = parse_cl12(format_cl12(exp));
    CHECK(format_cl12(again) == format_cl12(exp));
    CHECK(check_proof(again).ok);
}

TEST_CASE("mutations of the cube proof are rejected") {
    auto proof = parse_cl12(slurp("corpus/cube.cl12"));
    auto exp = explicate(proof, check_proof(proof));
    std::mt19937_64 rng(7);
    auto muts = mutate_cl12(exp, rng, 120);
    CHECK(muts.size() == 120);
    int accepted = 0;
    for (auto& m : muts)
        if (check_proof(m).ok) ++accepted;
    CHECK(accepted == 0);
}

TEST_CASE("search finds the provable forms") {
    for (auto s : {"∀x p(x) → ⊓x p(x)", "⊓x⊔y(p(x) → p(y))", "∀x∃y(y=f(x))",
                   "p ⊓ q ⟹ (p ⊓ q) ∧ (p ⊓ q)", "p ∧ q → p"}) {
        INFO(s);
        auto proof = search_cl12(parse_sequent(s));
        REQUIRE(proof.has_value());
        auto rep = check_proof(*proof);
        INFO(format_cl12(*proof));
        CHECK(rep.ok);
        CHECK(match_sequent(parse_sequent(s), proof->conclusion()).has_value());
    }
}

TEST_CASE("search gives up on the unprovable forms") {
    for (auto s : {"⊓x p(x) → ∀x p(x)", "⊔y⊓x(p(x) → p(y))", "⊓x⊔y(y=f(x))",
                   "p ⊓ q → (p ⊓ q) ∧ (p ⊓ q)"}) {
        INFO(s);
        CHECK_FALSE(search_cl12(parse_sequent(s)).has_value());
    }
}

TEST_CASE("search results recheck on random small sequents") {
    std::mt19937_64 rng(11);
    const char* atoms[] = {"a", "b", "p(x)", "q(x)", "x=y"};
    auto rnd = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
    std::function<std::string(int)> gen = [&](int d) -> std::string {
        if (d == 0 || rnd(3) == 0) return std::string(rnd(4) ? "" : "¬") + atoms[rnd(5)];
        const char* ops[] = {" ∧ ", " ∨ ", " ⊓ ", " ⊔ "};
        switch (rnd(3)) {
            case 0: return "(" + gen(d - 1) + ops[rnd(4)] + gen(d - 1) + ")";
            case 1: return std::string(rnd(2) ? "⊓x" : "∀x") + "(" + gen(d - 1) + ")";
            default: return std::string(rnd(2) ? "⊔x" : "∃x") + "(" + gen(d - 1) + ")";
        }
    };
    int found = 0;
    for (int i = 0; i < 40; ++i) {
        auto text = gen(2) + " ⟹ " + gen(2);
        auto seq = parse_sequent(text);
        SearchBudget b;
        b.depth = 6;
        b.nodes = 2000;
        auto proof = search_cl12(seq, b);
        if (!proof) continue;
        ++found;
        INFO(format_cl12(*proof));
        CHECK(check_proof(*proof).ok);
    }
    CHECK(found > 0);
}
