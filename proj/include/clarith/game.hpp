#pragma once

#include "clarith/syntax.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace clarith {

enum class Player { Top, Bot };  // ⊤ is the machine, ⊥ the environment

inline Player other(Player p) { return p == Player::Top ? Player::Bot : Player::Top; }
const char* player_name(Player p);

struct LabMove {
    Player who;
    std::string move;
    bool operator==(const LabMove&) const = default;
};
using Run = std::vector<LabMove>;

using Valuation = std::map<std::string, Natural>;

struct UndecidableFragment : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Meaning of function and predicate letters. The standard interpretation
// only knows the arithmetic builtins and "cube".
struct Interpretation {
    using Fn = std::function<Natural(const std::vector<Natural>&)>;
    using Pred = std::function<bool(const std::vector<Natural>&)>;
    std::map<std::string, Fn> functions;
    std::map<std::string, Pred> predicates;
    // Range of unbounded blind quantifiers, when finite.
    std::optional<std::vector<Natural>> domain;
    // Consulted before giving up on a blind quantifier.
    std::function<std::optional<bool>(const FormulaP&, const Valuation&)> oracle;
    // Largest bounded-quantifier range enumerated before giving up.
    std::size_t max_range = 1u << 16;

    static std::shared_ptr<const Interpretation> standard();
};

Natural eval_term(const TermP& t, const Valuation& v, const Interpretation& in);
bool eval_elementary(const FormulaP& f, const Valuation& v, const Interpretation& in);
bool eval_elementary(const FormulaP& f, const Valuation& v = {});

// Where a move lands: the surface path of the choice node and what was chosen.
struct MoveTarget {
    OccPath path;
    FormulaKind node;
    std::size_t component = 0;  // ⊓, ⊔
    Natural value;              // ⊓x, ⊔x
    std::string prefix;         // the "i." parts leading to the node
};

// Symbolic description of one family of legal moves.
struct MoveSchema {
    Player who;
    std::string prefix;
    FormulaKind node;
    std::size_t components = 0;  // for ⊓/⊔; numeral choice otherwise
    OccPath path;
    bool numeral() const { return node == FormulaKind::CAll || node == FormulaKind::CEx; }
    std::string describe() const;
};

std::optional<MoveTarget> resolve_move(const FormulaP& f, Player who, const std::string& move,
                                       std::string* why = nullptr);
FormulaP apply_target(const FormulaP& f, const MoveTarget& t);
std::vector<MoveSchema> move_schemas(const FormulaP& f);
std::size_t choice_depth(const FormulaP& f);

struct Illegal {
    LabMove offender;
    std::string reason;
};

class GameState {
public:
    GameState() = default;
    explicit GameState(FormulaP f, Valuation v = {},
                       std::shared_ptr<const Interpretation> in = Interpretation::standard());

    const FormulaP& formula() const { return f_; }
    const Valuation& valuation() const { return val_; }
    const Interpretation& interpretation() const { return *in_; }
    std::shared_ptr<const Interpretation> interpretation_ptr() const { return in_; }

    std::vector<MoveSchema> legal_moves(Player who) const;
    std::vector<MoveSchema> legal_moves() const;
    // Concrete moves, numerals truncated to values ≤ bound.
    std::vector<LabMove> concrete_moves(const Natural& bound) const;
    std::variant<GameState, Illegal> apply(const LabMove& m) const;
    bool is_legal(const LabMove& m) const;
    std::size_t depth() const { return choice_depth(f_); }
    Player wn_empty() const;

private:
    FormulaP f_;
    Valuation val_;
    std::shared_ptr<const Interpretation> in_;
};

enum class VerdictReason { IllegalMove, TerminalTruth };

struct Verdict {
    Player winner;
    VerdictReason reason;
    std::optional<Illegal> illegal;
    std::size_t illegal_index = 0;
};

Verdict adjudicate(const GameState& initial, const Run& run);
std::vector<Run> enumerate_legal_runs(const GameState& s, const Natural& numeral_bound = 8);

std::string format_labmove(const LabMove& m);
LabMove parse_labmove(const std::string& line);
std::string format_run(const Run& r);
Run parse_run(const std::string& text);

}  // namespace clarith
