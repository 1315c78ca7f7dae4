#pragma once

#include "clarith/cl12.hpp"
#include "clarith/cla4.hpp"
#include "clarith/game.hpp"
#include "clarith/polyfun.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace clarith {

struct StrategyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A deterministic reactive player of ⊤ in its own game.
class Agent {
public:
    virtual ~Agent() = default;
    virtual std::unique_ptr<Agent> clone() const = 0;
    // A legal environment move in the agent's game.
    virtual void observe(const std::string& move) = 0;
    // One activation: the machine moves made now.
    virtual std::vector<std::string> act() = 0;
    // True when act() would make no move before the next observation.
    virtual bool quiescent() const = 0;
    // Simulated sessions spawned so far, in order (induction only).
    virtual std::vector<std::string> sessions() const { return {}; }
    // Faults and clipping events, including those of nested agents.
    virtual std::vector<std::string> notes() const { return notes_; }

protected:
    std::vector<std::string> notes_;
};

struct Strategy {
    FormulaP game;
    std::shared_ptr<const Agent> prototype;
    // Bounds the size of every machine move by the background ℓ.
    ExplicitPolyFn certificate;
    std::string description;

    std::unique_ptr<Agent> spawn() const { return prototype->clone(); }
};

Strategy silent_strategy(FormulaP game);
// Games ⊓x1…⊓xn⊔y(y=τ): once every xi is chosen, answers fn of the chosen
// values, or the value of τ when fn is empty.
Strategy witness_strategy(FormulaP game, ExplicitPolyFn certificate,
                          std::function<Natural(const Valuation&)> fn = {});
// Axioms 1–7 are silent; 8 answers x+1 and 9 answers 2x.
Strategy axiom_strategy(int k);

// The proof-walking interpreter. providers[i] plays antecedent i of the
// conclusion; the proof must pass check_proof.
Strategy compile_cl12(const Cl12Proof& proof, const std::vector<Strategy>& providers,
                      const CheckOptions& opt = {});

// A machine move choosing c for y in ⊔y(S(y)∧G), with S a sizebound false of
// c in state s, is replaced by the choice of 0. Other moves pass unchanged.
std::string moderate(const GameState& s, const std::string& move, bool* clipped = nullptr);
// Move sizes of a player who never makes unreasonable moves in f, as a
// function of the sizes of the constants chosen by the other side.
ExplicitPolyFn reasonable_bound(const FormulaP& f);
Strategy reasonable_wrap(const Strategy& s);

// The chain N′, K′_{b1}, …, K′_{bk} for the environment's choice of x with
// bits b1…bk. conclusion is ⊓x F(x); n, k0, k1 play the basis and the two
// step premises.
Strategy induction_compose(const FormulaP& conclusion, const Strategy& n, const Strategy& k0,
                           const Strategy& k1);

struct Extraction {
    Strategy strategy;
    std::string label;
};

// Strategy for the line with the given label (default: the last line).
// Throws StrategyError unless the audit passes and is extraction-ready.
Extraction extract(const Cla4Proof& proof, const std::string& label = "", const Cla4Options& opt = {});

// Environment agents for the play harness.
class Environment {
public:
    virtual ~Environment() = default;
    // Moves made now; an empty list ends the environment's part of the play.
    virtual std::vector<std::string> act(const GameState& s) = 0;
};

class ScriptedEnvironment : public Environment {
public:
    explicit ScriptedEnvironment(std::vector<std::string> moves) : moves_(std::move(moves)) {}
    std::vector<std::string> act(const GameState& s) override;

private:
    std::vector<std::string> moves_;
    std::size_t next_ = 0;
};

class RandomEnvironment : public Environment {
public:
    RandomEnvironment(std::uint64_t seed, std::size_t max_bits, double stop_probability = 0.05)
        : rng_(seed), max_bits_(max_bits), stop_(stop_probability) {}
    std::vector<std::string> act(const GameState& s) override;

private:
    std::mt19937_64 rng_;
    std::size_t max_bits_;
    double stop_;
};

struct MoveMeter {
    std::size_t index = 0;  // position in the run
    Player who = Player::Top;
    std::size_t size = 0;
    std::size_t background = 0;  // ℓ when the move was made
    std::size_t timecost = 0;    // ticks since the previous move by either player
    Natural bound;               // certificate at ℓ (machine moves)
    bool within = true;
};

struct Transcript {
    Run run;
    Verdict verdict{};
    bool adjudicated = false;
    std::string adjudication_error;
    bool stalled = false;
    std::size_t ticks = 0;
    std::vector<MoveMeter> meters;
    bool certificate_ok = true;
    std::vector<std::string> sessions;
    std::vector<std::string> notes;
};

Transcript play(const Strategy& s, Environment& env, std::size_t tick_budget = 100000);

// Strategy bundles: the proof text with its SHA-256, the label and the
// certificate. Loading re-audits and re-extracts.
std::string make_bundle(const std::string& proof_text, const std::string& base_dir, const std::string& label);
Extraction load_bundle(const std::string& bundle_json);
std::string sha256_hex(const std::string& data);

}  // namespace clarith
