// Runs every primary acceptance criterion and prints one line for each.

#include "clarith/cl12.hpp"
#include "clarith/cla4.hpp"
#include "clarith/game.hpp"
#include "clarith/hpm.hpp"
#include "clarith/polyfun.hpp"
#include "clarith/prover.hpp"
#include "clarith/strategy.hpp"
#include "clarith/text.hpp"

#include "fixtures.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

using namespace clarith;

namespace {

const std::string kRoot = CLARITH_SOURCE_DIR;

std::string slurp(const std::string& rel) {
    std::ifstream in(kRoot + "/" + rel);
    if (!in) throw std::runtime_error("cannot read " + rel);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Cla4Proof corpus_cla4(const std::string& name) { return parse_cla4(slurp("corpus/" + name), kRoot + "/corpus"); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
        }
    }
};

// ---------------------------------------------------------------- 1

Outcome corpus_verification() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    auto cube = parse_cl12(slurp("corpus/cube.cl12"));
    auto r1 = check_proof(cube);
    o.require(cube.lines.size() == 10, "cube proof has 10 lines");
    o.require(r1.ok && r1.trusted_steps == 0, "cube proof accepted without trust: " + r1.summary());

    auto onesuc = corpus_cla4("onesuc.cla4");
    auto r2 = check_cla4(onesuc);
    o.require(onesuc.lines.size() == 3, "onesuc proof has 3 lines");
    o.require(onesuc.lines.size() == 3 && onesuc.lines[2].attached && onesuc.lines[2].attached->lines.size() == 7,
              "onesuc justification has 7 lines");
    o.require(r2.ok && r2.pa_trusted == 0, "onesuc accepted with 0 PA-trusted: " + r2.summary());

    auto zero = corpus_cla4("zeroness.cla4");
    auto r3 = check_cla4(zero);
    int justified = 0;
    for (auto& l : zero.lines)
        if (l.attached) ++justified;
    o.require(zero.lines.size() == 7, "zeroness proof has 7 lines");
    o.require(justified == 3, "zeroness has 3 justifications");
    o.require(r3.ok && r3.pa_trusted == 3, "zeroness accepted with 3 PA-trusted: " + r3.summary());

    double s = seconds_since(t0);
    o.require(s < 5.0, "runtime under 5 s");
    std::ostringstream d;
    d << "3 proofs accepted in " << s << " s";
    if (o.pass) o.detail = d.str();
    return o;
}

// ---------------------------------------------------------------- 2

Outcome mutation_robustness() {
    Outcome o;
    std::mt19937_64 rng(2024);
    std::ostringstream d;

    auto cube = parse_cl12(slurp("corpus/cube.cl12"));
    auto cube_exp = explicate(cube, check_proof(cube));
    auto conclusion = sequent_key(cube_exp.conclusion());
    std::size_t false_accepts = 0, rejected = 0, moved = 0;
    auto muts = mutate_cl12(cube_exp, rng, 150);
    for (auto& m : muts) {
        if (!check_proof(m).ok)
            ++rejected;
        else if (sequent_key(m.conclusion()) != conclusion)
            ++moved;
        else
            ++false_accepts;
    }
    o.require(muts.size() >= 100, "at least 100 cube mutations (got " + std::to_string(muts.size()) + ")");
    o.require(false_accepts == 0, std::to_string(false_accepts) + " cube mutations accepted");
    d << "cube " << muts.size();

    for (auto name : {"onesuc.cla4", "zeroness.cla4"}) {
        auto proof = corpus_cla4(name);
        auto exp = explicate(proof, check_cla4(proof));
        auto last = print(exp.lines.back().sentence);
        auto ms = mutate_cla4(exp, rng, 120);
        std::size_t fa = 0;
        for (auto& m : ms) {
            auto rep = check_cla4(m);
            if (!rep.ok)
                ++rejected;
            else if (m.lines.empty() || print(m.lines.back().sentence) != last)
                ++moved;
            else
                ++fa;
        }
        o.require(ms.size() >= 100, std::string("at least 100 mutations of ") + name);
        o.require(fa == 0, std::to_string(fa) + " accepted mutations of " + name);
        d << ", " << name << ' ' << ms.size();
        false_accepts += fa;
    }
    d << " mutations; " << rejected << " rejected, " << moved << " changed conclusion, " << false_accepts
      << " false accepts";
    if (o.pass) o.detail = d.str();
    return o;
}

// ---------------------------------------------------------------- 3

Outcome thirteen_runs() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    GameState g(parse_formula("(0=0 ⊓ 0=1) → (10=11 ⊓ 10=10)"));
    auto runs = enumerate_legal_runs(g, 8);
    auto T = Player::Top, B = Player::Bot;
    // Every legal run with its winner.
    std::vector<std::pair<Run, Player>> table = {
        {{}, T},
        {{{T, "0.0"}}, T},
        {{{T, "0.1"}}, T},
        {{{B, "1.0"}}, B},
        {{{B, "1.1"}}, T},
        {{{T, "0.0"}, {B, "1.0"}}, B},
        {{{B, "1.0"}, {T, "0.0"}}, B},
        {{{T, "0.1"}, {B, "1.0"}}, T},
        {{{B, "1.0"}, {T, "0.1"}}, T},
        {{{T, "0.0"}, {B, "1.1"}}, T},
        {{{B, "1.1"}, {T, "0.0"}}, T},
        {{{T, "0.1"}, {B, "1.1"}}, T},
        {{{B, "1.1"}, {T, "0.1"}}, T},
    };
    o.require(runs.size() == 13, "13 legal runs (got " + std::to_string(runs.size()) + ")");
    int top = 0, bot = 0;
    for (auto& [run, winner] : table) {
        o.require(std::find(runs.begin(), runs.end(), run) != runs.end(), "run " + format_run(run) + " enumerated");
        auto v = adjudicate(g, run);
        o.require(v.winner == winner, "winner of " + format_run(run));
        (v.winner == T ? top : bot)++;
    }
    double s = seconds_since(t0);
    o.require(top == 10 && bot == 3, "10 ⊤-wins and 3 ⊥-wins");
    o.require(s < 1.0, "runtime under 1 s");
    std::ostringstream d;
    d << runs.size() << " runs, " << top << " ⊤-wins, " << bot << " ⊥-wins in " << s << " s";
    if (o.pass) o.detail = d.str();
    return o;
}

// ---------------------------------------------------------------- 4

Outcome onesuc_extraction() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    auto ex = extract(corpus_cla4("onesuc.cla4"));
    o.require(alpha_equal(ex.strategy.game, parse_formula("⊓x⊔y(y=x1)")), "extracted game is ⊓x⊔y(y=x1)");
    std::mt19937_64 rng(4);
    std::size_t right = 0, certified = 0, largest = 0;
    for (int n = 0; n < 1000; ++n) {
        auto x = Natural::random_bits(rng, rng() % 513);
        ScriptedEnvironment env({x.bits()});
        auto t = play(ex.strategy, env);
        std::vector<std::string> answers;
        for (auto& m : t.run)
            if (m.who == Player::Top) answers.push_back(m.move);
        if (answers.size() == 1 && answers[0] == (x + x).succ().bits() && t.adjudicated &&
            t.verdict.winner == Player::Top)
            ++right;
        bool within = true;
        for (auto& m : t.meters)
            if (m.who == Player::Top) {
                within = within && Natural(m.size) <= ex.strategy.certificate.eval(Natural(m.background));
                largest = std::max(largest, m.size);
            }
        if (within && t.certificate_ok) ++certified;
    }
    double s = seconds_since(t0);
    o.require(right == 1000, std::to_string(right) + "/1000 correct");
    o.require(certified == 1000, std::to_string(certified) + "/1000 within the certificate");
    o.require(s < 10.0, "runtime under 10 s");
    std::ostringstream d;
    d << right << "/1000 answers 2x+1, all moves within certificate (largest " << largest << ") in " << s << " s";
    if (o.pass) o.detail = d.str();
    return o;
}

// ---------------------------------------------------------------- 5

Outcome zeroness_induction() {
    Outcome o;
    auto ex = extract(corpus_cla4("zeroness.cla4"));
    o.require(alpha_equal(ex.strategy.game, parse_formula("⊓x(x=0 ⊔ x≠0)")), "extracted game is ⊓x(x=0 ⊔ x≠0)");
    std::mt19937_64 rng(5);
    std::size_t right = 0, counted = 0, zeros = 0;
    for (int n = 0; n < 1000; ++n) {
        // Every tenth x is 0 so that both answers are exercised.
        Natural x = n % 10 == 0 ? Natural(0) : Natural::random_bits(rng, 1 + rng() % 64);
        if (x.is_zero()) ++zeros;
        ScriptedEnvironment env({x.bits()});
        auto t = play(ex.strategy, env);
        std::vector<std::string> answers;
        for (auto& m : t.run)
            if (m.who == Player::Top) answers.push_back(m.move);
        std::string want = x.is_zero() ? "0" : "1";
        if (answers == std::vector<std::string>{want} && t.adjudicated && t.verdict.winner == Player::Top) ++right;
        std::size_t sessions = x.is_zero() ? 1 : x.size() + 1;
        if (t.sessions.size() == sessions) ++counted;
    }
    o.require(right == 1000, std::to_string(right) + "/1000 decided");
    o.require(counted == 1000, std::to_string(counted) + "/1000 with |x|+1 sessions");

    GameState s(parse_formula("⊓z(0=0 ∧ ⊔y(|y| ≤ |z|′ ∧ z=y0))"));
    s = std::get<GameState>(s.apply({Player::Bot, "11"}));
    bool clipped = false;
    auto m = moderate(s, "1.1111", &clipped);
    o.require(m == "1.0" && clipped, "1111 against |y|≤|z|′ with z=11 clipped to 0 (got " + m + ")");
    auto keep = moderate(s, "1.10", &clipped);
    o.require(keep == "1.10" && !clipped, "a reasonable constant passes unchanged");
    std::ostringstream d;
    d << right << "/1000 decided (" << zeros << " zeros), session count |x|+1 on all, 1.1111 clipped to " << m;
    if (o.pass) o.detail = d.str();
    return o;
}

// ---------------------------------------------------------------- 6

Outcome negative_provability() {
    Outcome o;
    std::size_t none = 0, found = 0;
    for (auto s : {"⊓x p(x) → ∀x p(x)", "⊔y⊓x(p(x) → p(y))", "⊓x⊔y(y=f(x))", "p ⊓ q → (p ⊓ q) ∧ (p ⊓ q)"}) {
        bool got = search_cl12(parse_sequent(s)).has_value();
        o.require(!got, std::string("no proof of ") + s);
        if (!got) ++none;
    }
    for (auto s : {"∀x p(x) → ⊓x p(x)", "⊓x⊔y(p(x) → p(y))", "∀x∃y(y=f(x))", "p ⊓ q ⟹ (p ⊓ q) ∧ (p ⊓ q)"}) {
        auto seq = parse_sequent(s);
        auto proof = search_cl12(seq);
        bool ok = proof && check_proof(*proof).ok && match_sequent(seq, proof->conclusion()).has_value();
        o.require(ok, std::string("checked proof of ") + s);
        if (ok) ++found;
    }
    std::ostringstream d;
    d << none << "/4 unprovable forms refused, " << found << "/4 provable forms proved and rechecked";
    if (o.pass) o.detail = d.str();
    return o;
}

// ---------------------------------------------------------------- 7

HpmSpec machine(const std::string& name) { return parse_hpm(slurp("machines/" + name + ".hpm")); }

Outcome codec_coherence() {
    Outcome o;
    std::size_t total = 0, good = 0;
    for (auto name : {"echo", "onesuc", "chatter"}) {
        auto spec = machine(name);
        Codec codec(spec);
        std::mt19937_64 rng(7);
        for (auto& c : random_reachable(spec, rng, 1000)) {
            ++total;
            auto code = codec.encode(c);
            bool round = codec.decode(code) == c && codec.encode(codec.decode(code)) == code;
            bool succ = codec_successor(codec, code) == codec.encode(step(spec, codec.decode(code)));
            if (round && succ) ++good;
        }
    }
    o.require(good == total, std::to_string(good) + "/" + std::to_string(total) + " coherent");
    Codec codec(machine("echo"));
    bool e = pred_E(codec, Natural::from_bits("101"), codec.sequence_code({"1", "0", "1"}, Variant::Check));
    bool d = pred_D(codec, codec.sequence_code({"1", "0", "1"}, Variant::Hat), Natural::from_bits("101"));
    o.require(e, "𝔼(101, code of 1̌0̌1̌)");
    o.require(d, "𝔻(code of 1̂0̂1̂, 101)");
    std::ostringstream out;
    out << good << "/" << total << " configurations of 3 machines round-trip with coherent successors; 𝔼 and 𝔻 hold";
    if (o.pass) o.detail = out.str();
    return o;
}

// ---------------------------------------------------------------- 8

Natural power(Natural v, int k) {
    Natural out(1);
    for (int i = 0; i < k; ++i) out = out * v;
    return out;
}

Outcome polyfun_values() {
    Outcome o;
    auto dag = fixtures::eighth_power_dag();
    auto tree = fixtures::eighth_power_tree();
    auto tau = fixtures::two_placeholder_functional("g", "h");
    std::map<std::string, UnaryFn> b{{"g", [](const Natural& x) { return power(x, 2); }},
                                     {"h", [](const Natural& x) { return power(x, 3); }}};
    for (std::uint64_t y = 0; y <= 10; ++y) {
        Natural v(y);
        o.require(eval_graph(dag, v) == power(v, 8), "dag at " + std::to_string(y));
        o.require(eval_graph(tree, v) == power(v, 8), "tree at " + std::to_string(y));
        o.require(eval_graph(tau, v, b) == power(power(v, 2) + power(v, 3), 3), "functional at " + std::to_string(y));
    }
    auto f = fixtures::nested_eighth_powers();
    for (std::uint64_t y : {0, 1, 2}) {
        Natural v(y);
        o.require(f.eval(v) == power(power(v, 8) + power(v, 8), 8), "explicit function at " + std::to_string(y));
    }
    std::vector<ExplicitPolyFn> fs = {ExplicitPolyFn::of(dag), ExplicitPolyFn::of(tree), f,
                                      polynomial_bound({3, 0, 2}), polynomial_bound({0})};
    std::size_t laws = 0;
    for (auto& a : fs)
        for (auto& c : fs) {
            auto s = sum_bounds(a, c);
            o.require(s.size() == a.size() + c.size() + 4, "size(sum) = size(a) + size(b) + 4");
            o.require(s.eval(Natural(3)) == a.eval(Natural(3)) + c.eval(Natural(3)), "sum value");
            ++laws;
        }
    std::ostringstream d;
    d << "y⁸ (dag, tree) and (y²+y³)³ on 0..10, (y⁸+y⁸)⁸ on {0,1,2}, size law on " << laws << " pairs";
    if (o.pass) o.detail = d.str();
    return o;
}

// ---------------------------------------------------------------- 9

// A model over {0..n-1}: p and q unary, a and b nullary, = is identity.
struct Model {
    int n;
    unsigned p, q;
    bool a, b;
};

bool holds(const FormulaP& f, const Model& m, std::map<std::string, int>& env) {
    auto var = [&](const TermP& t) {
        if (t->kind != TermKind::Var) throw std::runtime_error("unexpected term");
        auto it = env.find(t->name);
        if (it == env.end()) throw std::runtime_error("unbound " + t->name);
        return it->second;
    };
    auto atom = [&](const FormulaP& g) {
        if (g->pred == "=") return var(g->args[0]) == var(g->args[1]);
        if (g->pred == "a") return m.a;
        if (g->pred == "b") return m.b;
        unsigned set = g->pred == "p" ? m.p : m.q;
        return ((set >> var(g->args[0])) & 1u) != 0;
    };
    switch (f->kind) {
        case FormulaKind::Top: return true;
        case FormulaKind::Bot: return false;
        case FormulaKind::Atom: return atom(f);
        case FormulaKind::NegAtom: return !atom(f);
        case FormulaKind::And:
            for (auto& k : f->kids)
                if (!holds(k, m, env)) return false;
            return true;
        case FormulaKind::Or:
            for (auto& k : f->kids)
                if (holds(k, m, env)) return true;
            return false;
        case FormulaKind::All:
        case FormulaKind::Ex: {
            bool all = f->kind == FormulaKind::All;
            auto saved = env.find(f->var) == env.end() ? std::optional<int>() : std::optional<int>(env[f->var]);
            bool result = all;
            for (int d = 0; d < m.n; ++d) {
                env[f->var] = d;
                if (holds(f->kids[0], m, env) != all) {
                    result = !all;
                    break;
                }
            }
            if (saved)
                env[f->var] = *saved;
            else
                env.erase(f->var);
            return result;
        }
        default: throw std::runtime_error("choice operator left after elementarization");
    }
}

// Surface choice operators become ⊤ (⊓) or ⊥ (⊔).
FormulaP flatten_choices(const FormulaP& f) {
    switch (f->kind) {
        case FormulaKind::CAnd:
        case FormulaKind::CAll: return top();
        case FormulaKind::COr:
        case FormulaKind::CEx: return bot();
        case FormulaKind::And:
        case FormulaKind::Or: {
            std::vector<FormulaP> kids;
            for (auto& k : f->kids) kids.push_back(flatten_choices(k));
            return junction(f->kind, kids);
        }
        case FormulaKind::All:
        case FormulaKind::Ex: return quant(f->kind, f->var, flatten_choices(f->kids[0]));
        default: return f;
    }
}

// True when some model of size ≤ 3 and assignment falsifies the sequent.
bool falsified(const Sequent& s) {
    std::vector<FormulaP> ante;
    for (auto& e : s.ante) ante.push_back(flatten_choices(e));
    auto succ = flatten_choices(s.succ);
    for (int n = 1; n <= 3; ++n)
        for (unsigned p = 0; p < (1u << n); ++p)
            for (unsigned q = 0; q < (1u << n); ++q)
                for (int ab = 0; ab < 4; ++ab) {
                    Model m{n, p, q, (ab & 1) != 0, (ab & 2) != 0};
                    for (int x = 0; x < n; ++x)
                        for (int y = 0; y < n; ++y) {
                            std::map<std::string, int> env{{"x", x}, {"y", y}};
                            bool all = true;
                            for (auto& e : ante) all = all && holds(e, m, env);
                            if (all && !holds(succ, m, env)) return true;
                        }
                }
    return false;
}

Outcome stability_soundness() {
    Outcome o;
    std::mt19937_64 rng(9);
    auto rnd = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
    const char* atoms[] = {"a", "b", "p(x)", "q(x)", "p(y)", "q(y)", "x=y"};
    std::function<std::string(int)> gen = [&](int d) -> std::string {
        if (d == 0 || rnd(3) == 0) return std::string(rnd(3) ? "" : "¬") + atoms[rnd(7)];
        const char* ops[] = {" ∧ ", " ∨ ", " ⊓ ", " ⊔ ", " → "};
        const char* qs[] = {"∀x", "∃x", "∀y", "∃y", "⊓x", "⊔x"};
        if (rnd(2)) return "(" + gen(d - 1) + ops[rnd(5)] + gen(d - 1) + ")";
        return std::string(qs[rnd(6)]) + "(" + gen(d - 1) + ")";
    };
    // The model search itself must not falsify valid sequents.
    o.require(!falsified(parse_sequent("p(x), ∀x(p(x) → q(x)) ⟹ q(x)")), "model search on a valid sequent");
    o.require(!falsified(parse_sequent("⟹ ∃y(p(y) → ∀x p(x))")), "model search on the drinker sentence");
    o.require(falsified(parse_sequent("∃x p(x) ⟹ ∀x p(x)")), "model search needs two elements");
    o.require(falsified(parse_sequent("⟹ p(x) ⊓ q(x)")) == false, "⊓ flattens to ⊤");
    std::size_t falsifiable = 0, claims = 0, refuted = 0, unknown = 0, tried = 0;
    while (falsifiable < 500 && tried < 100000) {
        ++tried;
        std::string text;
        for (int k = rnd(3); k > 0; --k) text += gen(2) + (k > 1 ? ", " : " ");
        text += "⟹ " + gen(3);
        auto seq = parse_sequent(text);
        if (!falsified(seq)) continue;
        ++falsifiable;
        auto v = decide_validity(elementarize(seq)).verdict;
        if (v == Validity::Valid) {
            ++claims;
            o.require(false, "valid claim for " + text);
        }
        if (v == Validity::Refuted) ++refuted;
        if (v == Validity::Unknown) ++unknown;
    }
    o.require(falsifiable == 500, "500 falsified sequents generated");
    std::ostringstream d;
    d << falsifiable << " falsified sequents, " << claims << " valid claims (" << refuted << " refuted, " << unknown
      << " unknown)";
    if (o.pass) o.detail = d.str();
    return o;
}

}  // namespace

int main() {
    std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"corpus verification", corpus_verification},
        {"mutation robustness", mutation_robustness},
        {"thirteen runs of the implication game", thirteen_runs},
        {"onesuc extraction", onesuc_extraction},
        {"zeroness by induction", zeroness_induction},
        {"negative provability", negative_provability},
        {"codec coherence", codec_coherence},
        {"polynomial functions", polyfun_values},
        {"stability oracle soundness", stability_soundness},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        if (!o.pass) ++failed;
        std::cout << "criterion " << i + 1 << " (" << criteria[i].first << "): " << (o.pass ? "PASS" : "FAIL") << " - "
                  << o.detail << std::endl;
    }
    return failed ? 1 : 0;
}
