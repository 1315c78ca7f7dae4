#pragma once

#include "clarith/natural.hpp"
#include "clarith/polyfun.hpp"

#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace clarith {

struct HpmError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tape symbols are single characters, except the three reserved ones.
inline constexpr const char* kBlank = "_";
inline constexpr const char* kTopSym = "⊤";
inline constexpr const char* kBotSym = "⊥";

enum class Dir { Left, Right };

struct Transition {
    std::string state;
    std::string write;
    Dir work = Dir::Left;
    Dir run = Dir::Left;
    Dir input = Dir::Left;
};

// A hard-play machine. With arity > 0 it is a GHPM whose numeric inputs sit
// on a read-only input tape as comma-separated numerals.
struct HpmSpec {
    std::string name;
    std::vector<std::string> states;  // states[0] is the start state
    std::vector<std::string> move_states;
    std::vector<std::string> alphabet;  // move symbols, without blank, ⊤, ⊥
    int arity = 0;
    // Keyed by state, work symbol, run symbol, input symbol; "*" matches any.
    // A missing transition leaves the configuration unchanged.
    std::map<std::tuple<std::string, std::string, std::string, std::string>, Transition> delta;

    const std::string& start() const { return states.front(); }
    bool is_move_state(const std::string& q) const;
    // blank, ⊤, ⊥, then the alphabet.
    std::vector<std::string> tape_symbols() const;
    const Transition* lookup(const std::string& q, const std::string& w, const std::string& r,
                             const std::string& i) const;
    void validate() const;
};

// Text format, one item per line, '#' comments:
//   machine <name>
//   states <start> <q>...
//   move <q>...
//   alphabet <c>...
//   arity <n>
//   <q> <work> <run> [<input>] -> <q'> <write|=> <L|R> <L|R> [<L|R>]
HpmSpec parse_hpm(std::string_view text);
std::string format_hpm(const HpmSpec& spec);
// The GHPM code: the canonical text read as a numeral.
Natural machine_code(const HpmSpec& spec);

struct Configuration {
    std::string state;
    std::vector<std::string> work;  // b0..bm, bm blank
    std::vector<std::string> run;   // c0..cn, cn blank
    std::vector<std::string> input;
    std::size_t i = 0, j = 0, k = 0;
    bool operator==(const Configuration&) const = default;
};

Configuration initial_configuration(const HpmSpec& spec, const std::vector<Natural>& inputs = {});
// The spelled string of the run tape, labels included.
std::string run_string(const Configuration& c);
// The string the machine would move now: work cells before the head.
std::string pending_move(const Configuration& c);

// One clock cycle; env_moves are appended ⊥-prefixed after the machine move.
Configuration step(const HpmSpec& spec, const Configuration& c, const std::vector<std::string>& env_moves = {});

struct HpmLabMove {
    bool machine = false;
    std::string move;
    std::size_t timestamp = 0;
};

struct HpmMeter {
    std::size_t cycle = 0;
    std::size_t size = 0;
    std::size_t background = 0;
    std::size_t timecost = 0;
    std::size_t space = 0;  // work cells visited by this cycle
    bool within = true;
};

struct HpmRun {
    std::vector<HpmLabMove> moves;
    std::vector<HpmMeter> meters;  // one per machine move
    std::size_t cycles = 0;
    std::size_t space = 0;
    bool fuel_exhausted = false;
    bool within_bound = true;
    Configuration last;
    std::vector<std::string> trace;  // cycle state i j k +delta
};

struct EnvScript {
    // cycle -> moves made on that cycle
    std::map<std::size_t, std::vector<std::string>> moves;
};

// Runs for `fuel` cycles, or until the script is exhausted and the machine
// sits in a fixed point. h, when given, is the time bound checked against
// every machine move.
HpmRun run_hpm(const HpmSpec& spec, const EnvScript& env, std::size_t fuel,
               const ExplicitPolyFn* h = nullptr, const std::vector<Natural>& inputs = {});

// ---------------------------------------------------------------- codec

enum class Variant { Hat, Check, HatUnder, CheckUnder };

class Codec {
public:
    explicit Codec(const HpmSpec& spec);

    std::size_t k() const { return k_; }          // 𝔨
    std::size_t width() const { return width_; }  // 𝔎 = 2^𝔨
    Natural state_code(const std::string& q) const;
    Natural symbol_code(const std::string& a, Variant v) const;
    // Code of a sequence of tape symbols, all in variant v.
    Natural sequence_code(const std::vector<std::string>& syms, Variant v) const;
    Natural encode(const Configuration& c) const;
    Configuration decode(const Natural& code) const;
    // Computed on code blocks, without decoding.
    Natural successor(const Natural& code) const;
    // Empty when the code is a configuration, else the first violation.
    std::optional<std::string> config_violation(const Natural& code) const;

    struct Block {
        bool is_state = false;
        std::string name;
        Variant variant = Variant::Hat;
    };
    std::optional<std::vector<Block>> blocks(const Natural& code) const;
    Natural block_code(const Block& b) const;

    const HpmSpec& spec() const { return spec_; }

private:
    HpmSpec spec_;
    std::size_t k_ = 0, width_ = 0;
    std::vector<Block> table_;
    std::map<std::string, std::size_t> index_;
    std::size_t index_of(const Block& b) const;
};

// x∘y on codes.
Natural concat_codes(const Natural& x, const Natural& y);
Natural codec_successor(const Codec& codec, const Natural& code);

enum class Tri { False, True, Unknown };

// The configuration predicates. 𝔸, 𝔸′ and 𝔹 simulate at most `fuel` steps.
bool pred_N(const Codec& c, const Natural& x, const Natural& y);
bool pred_C(const Codec& c, const Natural& x);
bool pred_I(const Codec& c, const Natural& x, const Natural& y);
bool pred_J(const Codec& c, const Natural& x, const Natural& y);
bool pred_M(const Codec& c, const Natural& x, const Natural& y);
bool pred_E(const Codec& c, const Natural& x, const Natural& y);
bool pred_D(const Codec& c, const Natural& x, const Natural& y);
bool pred_S(const Codec& c, const Natural& x, const Natural& y);
Tri pred_A(const Codec& c, const Natural& z, const Natural& x, const Natural& y, std::size_t fuel);
Tri pred_A1(const Codec& c, const Natural& z, const Natural& y, std::size_t fuel);
Tri pred_B(const Codec& c, const Natural& z, const Natural& x, std::size_t fuel);

// Configurations met along random plays: random env moves over the alphabet
// at random cycles.
std::vector<Configuration> random_reachable(const HpmSpec& spec, std::mt19937_64& rng, std::size_t count,
                                            std::size_t max_cycles = 60);

}  // namespace clarith
