#include "doctest.h"

#include "clarith/strategy.hpp"
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

std::vector<std::string> machine_moves(const Transcript& t) {
    std::vector<std::string> out;
    for (auto& m : t.run)
        if (m.who == Player::Top) out.push_back(m.move);
    return out;
}

Transcript run_script(const Strategy& s, std::vector<std::string> moves) {
    ScriptedEnvironment env(std::move(moves));
    return play(s, env);
}

Strategy cube_strategy(std::function<Natural(const Valuation&)> product = {}) {
    auto proof = parse_cl12(slurp("corpus/cube.cl12"));
    auto root = proof.conclusion();
    auto mult = witness_strategy(root.ante[1], polynomial_bound({1, 2}), product);
    return compile_cl12(proof, {silent_strategy(root.ante[0]), mult});
}

}  // namespace

TEST_CASE("axiom strategies") {
    auto t8 = run_script(axiom_strategy(8), {"101"});
    CHECK(machine_moves(t8) == std::vector<std::string>{"110"});
    CHECK(t8.verdict.winner == Player::Top);
    auto t9 = run_script(axiom_strategy(9), {"101"});
    CHECK(machine_moves(t9) == std::vector<std::string>{"1010"});
    CHECK(t9.verdict.winner == Player::Top);
    auto t3 = run_script(axiom_strategy(3), {});
    CHECK(t3.run.empty());
    CHECK(t3.verdict.winner == Player::Top);
    CHECK_THROWS_AS(axiom_strategy(10), StrategyError);
}

TEST_CASE("background meter") {
    auto s = silent_strategy(parse_formula("⊓x⊓y(x=y ∨ x≠y)"));
    auto t = run_script(s, {"101", "11111"});
    REQUIRE(t.meters.size() == 2);
    CHECK(t.meters[0].background == 3);
    CHECK(t.meters[1].background == 5);
    auto quiet = run_script(axiom_strategy(8), {});
    CHECK(quiet.run.empty());
    CHECK(quiet.verdict.winner == Player::Top);
    auto t8 = run_script(axiom_strategy(8), {"1"});
    REQUIRE(t8.meters.size() == 2);
    CHECK(t8.meters[1].background == 1);
    CHECK(t8.certificate_ok);
}

TEST_CASE("binary 1-successor justification with axiom providers") {
    auto proof = corpus("onesuc.cla4");
    auto& cl = *proof.lines[2].attached;
    auto s = compile_cl12(cl, {axiom_strategy(8), axiom_strategy(9)});
    auto t = run_script(s, {"101"});
    CHECK(machine_moves(t) == std::vector<std::string>{"1011"});
    CHECK(t.verdict.winner == Player::Top);
    CHECK(t.certificate_ok);
    auto zero = run_script(s, {"0"});
    CHECK(machine_moves(zero) == std::vector<std::string>{"1"});
    CHECK(zero.verdict.winner == Player::Top);
}

TEST_CASE("cube with a multiplication provider") {
    auto t = run_script(cube_strategy(), {"11"});
    CHECK(machine_moves(t) == std::vector<std::string>{"11011"});
    CHECK(t.verdict.winner == Player::Top);
    CHECK(t.certificate_ok);
    std::mt19937_64 rng(2);
    for (int i = 0; i < 50; ++i) {
        auto x = Natural::random_bits(rng, 1 + rng() % 64);
        auto r = run_script(cube_strategy(), {x.bits()});
        CHECK(machine_moves(r) == std::vector<std::string>{(x * x * x).bits()});
        CHECK(r.certificate_ok);
    }
}

TEST_CASE("provider faults") {
    // A wrong product: the machine still follows the proof and loses.
    auto wrong = cube_strategy([](const Valuation& v) {
        Natural p(1);
        for (auto& [k, x] : v) p = p * x;
        return p.succ();
    });
    auto t = run_script(wrong, {"11"});
    CHECK(machine_moves(t).size() == 1);
    CHECK(t.verdict.winner == Player::Bot);

    // A provider making an illegal move is cut off and reported.
    class Garbage : public Agent {
    public:
        std::unique_ptr<Agent> clone() const override { return std::make_unique<Garbage>(*this); }
        void observe(const std::string&) override { armed_ = true; }
        std::vector<std::string> act() override {
            if (!armed_) return {};
            armed_ = false;
            return {"2.2"};
        }
        bool quiescent() const override { return !armed_; }

    private:
        bool armed_ = false;
    };
    auto proof = parse_cl12(slurp("corpus/cube.cl12"));
    auto root = proof.conclusion();
    Strategy bad{root.ante[1], std::make_shared<Garbage>(), polynomial_bound({0}), "garbage"};
    auto s = compile_cl12(proof, {silent_strategy(root.ante[0]), bad});
    auto g = run_script(s, {"11"});
    CHECK(g.verdict.winner == Player::Bot);
    bool noted = false;
    for (auto& n : g.notes)
        if (n.find("provider fault") != std::string::npos) noted = true;
    CHECK(noted);
}

TEST_CASE("moderated synchronization clips unreasonable constants") {
    GameState s(parse_formula("⊓z(0=0 ∧ ⊔y(|y| ≤ |z|′ ∧ z=y0))"));
    s = std::get<GameState>(s.apply({Player::Bot, "11"}));
    bool clipped = false;
    CHECK(moderate(s, "1.1111", &clipped) == "1.0");
    CHECK(clipped);
    CHECK(moderate(s, "1.10", &clipped) == "1.10");
    CHECK_FALSE(clipped);
    CHECK(moderate(s, "1.111", &clipped) == "1.111");
    CHECK_FALSE(clipped);

    auto wrapped = reasonable_wrap(silent_strategy(parse_formula("⊓x(x=x)")));
    auto t = run_script(wrapped, {"1"});
    CHECK(machine_moves(t).empty());
}

TEST_CASE("extracted binary 1-successor") {
    auto ex = extract(corpus("onesuc.cla4"));
    CHECK(ex.label == "III");
    CHECK(alpha_equal(ex.strategy.game, parse_formula("⊓x⊔y(y=x1)")));
    std::mt19937_64 rng(8);
    for (int i = 0; i < 200; ++i) {
        auto x = Natural::random_bits(rng, rng() % 513);
        auto t = run_script(ex.strategy, {x.bits()});
        REQUIRE(machine_moves(t).size() == 1);
        CHECK(machine_moves(t)[0] == (x + x).succ().bits());
        CHECK(t.verdict.winner == Player::Top);
        CHECK(t.certificate_ok);
    }
}

TEST_CASE("extracted zeroness decider") {
    auto ex = extract(corpus("zeroness.cla4"));
    CHECK(ex.label == "VII");
    auto t0 = run_script(ex.strategy, {"0"});
    CHECK(machine_moves(t0) == std::vector<std::string>{"0"});
    CHECK(t0.verdict.winner == Player::Top);
    CHECK(t0.sessions.size() == 1);

    auto t6 = run_script(ex.strategy, {"110"});
    CHECK(machine_moves(t6) == std::vector<std::string>{"1"});
    CHECK(t6.verdict.winner == Player::Top);
    CHECK(t6.sessions.size() == 4);

    auto t9 = run_script(ex.strategy, {"1001"});
    CHECK(t9.sessions == std::vector<std::string>{"N", "K1", "K0", "K0", "K1"});
    CHECK(machine_moves(t9) == std::vector<std::string>{"1"});

    std::mt19937_64 rng(9);
    for (int i = 0; i < 100; ++i) {
        auto x = Natural::random_bits(rng, rng() % 40);
        auto t = run_script(ex.strategy, {x.bits()});
        CHECK(machine_moves(t) == std::vector<std::string>{x.is_zero() ? "0" : "1"});
        CHECK(t.verdict.winner == Player::Top);
        CHECK(t.sessions.size() == (x.is_zero() ? 1 : x.size() + 1));
        CHECK(t.certificate_ok);
    }
}

TEST_CASE("random environments never beat extracted strategies") {
    for (auto name : {"onesuc.cla4", "zeroness.cla4"}) {
        INFO(name);
        auto ex = extract(corpus(name));
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            RandomEnvironment env(seed, 64);
            auto t = play(ex.strategy, env);
            CHECK(t.adjudicated);
            CHECK(t.verdict.winner == Player::Top);
            CHECK_FALSE(t.stalled);
            CHECK(t.certificate_ok);
        }
    }
    auto a8 = axiom_strategy(8);
    int wins = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        RandomEnvironment env(seed, 32);
        if (play(a8, env).verdict.winner == Player::Top) ++wins;
    }
    CHECK(wins == 1000);
}

TEST_CASE("plays are deterministic") {
    auto ex = extract(corpus("zeroness.cla4"));
    auto a = run_script(ex.strategy, {"10110"});
    auto b = run_script(ex.strategy, {"10110"});
    CHECK(a.run == b.run);
    CHECK(a.sessions == b.sessions);
}

TEST_CASE("extraction refuses proofs that are not ready") {
    auto proof = corpus("zeroness.cla4");
    proof.lines[0].attached->lines[1].rule = Rule::AndChoose;
    CHECK_THROWS_AS(extract(proof), StrategyError);
    auto trusted = parse_cla4(
        "I. ⊓x⊔y(y=x′) ; lc: {\n"
        "  1. ⟹ ⊓x⊔y(y=x′) ; Wait ; evidence=trusted:oracle\n"
        "}\n");
    CHECK_THROWS_AS(extract(trusted), StrategyError);
}

TEST_CASE("strategy bundles") {
    auto text = slurp("corpus/onesuc.cla4");
    auto dir = std::string(CLARITH_SOURCE_DIR) + "/corpus";
    auto bundle = make_bundle(text, dir, "");
    auto ex = load_bundle(bundle);
    auto t = run_script(ex.strategy, {"101"});
    CHECK(machine_moves(t) == std::vector<std::string>{"1011"});
    auto tampered = bundle;
    auto at = tampered.find("axiom:9");
    REQUIRE(at != std::string::npos);
    tampered.replace(at, 7, "axiom:8");
    CHECK_THROWS_AS(load_bundle(tampered), StrategyError);
    CHECK_THROWS_AS(load_bundle("{}"), StrategyError);
}
