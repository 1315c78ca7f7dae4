#include "clarith/game.hpp"

#include "clarith/text.hpp"

#include <sstream>

namespace clarith {

const char* player_name(Player p) { return p == Player::Top ? "⊤" : "⊥"; }

std::shared_ptr<const Interpretation> Interpretation::standard() {
    static const auto in = [] {
        auto p = std::make_shared<Interpretation>();
        p->functions["cube"] = [](const std::vector<Natural>& a) { return a[0] * a[0] * a[0]; };
        return std::shared_ptr<const Interpretation>(p);
    }();
    return in;
}

namespace {

constexpr std::size_t kMaxPow = 1u << 20;

}  // namespace

Natural eval_term(const TermP& t, const Valuation& v, const Interpretation& in) {
    switch (t->kind) {
        case TermKind::Var: {
            auto it = v.find(t->name);
            if (it == v.end()) throw UndecidableFragment("variable " + t->name + " has no value");
            return it->second;
        }
        case TermKind::Const: return t->value;
        case TermKind::Succ: return eval_term(t->args[0], v, in).succ();
        case TermKind::Add: return eval_term(t->args[0], v, in) + eval_term(t->args[1], v, in);
        case TermKind::Mul: return eval_term(t->args[0], v, in) * eval_term(t->args[1], v, in);
        case TermKind::App: {
            auto it = in.functions.find(t->name);
            if (it == in.functions.end())
                throw UndecidableFragment("function letter " + t->name + " is uninterpreted");
            std::vector<Natural> args;
            for (auto& a : t->args) args.push_back(eval_term(a, v, in));
            return it->second(args);
        }
        case TermKind::Len: return Natural(eval_term(t->args[0], v, in).size());
        case TermKind::Pow2: {
            auto e = eval_term(t->args[0], v, in);
            if (!e.fits_u64() || e.to_u64() > kMaxPow)
                throw UndecidableFragment("2^x with x too large to evaluate");
            return Natural::pow2(e.to_u64());
        }
        case TermKind::BitAt: {
            auto x = eval_term(t->args[0], v, in);
            auto y = eval_term(t->args[1], v, in);
            if (!y.fits_u64()) return Natural();
            return Natural(x.bit_from_left(y.to_u64()) ? 1 : 0);
        }
        case TermKind::Substr: {
            auto x = eval_term(t->args[0], v, in);
            auto y = eval_term(t->args[1], v, in);
            auto z = eval_term(t->args[2], v, in);
            if (!y.fits_u64() || !z.fits_u64()) return Natural();
            return x.substring(y.to_u64(), z.to_u64());
        }
    }
    return Natural();
}

namespace {

bool eval_atom(const FormulaP& f, const Valuation& v, const Interpretation& in) {
    const auto& p = f->pred;
    if (p == "=" || p == "<=" || p == "<") {
        auto a = eval_term(f->args[0], v, in);
        auto b = eval_term(f->args[1], v, in);
        if (p == "=") return a == b;
        if (p == "<=") return a <= b;
        return a < b;
    }
    auto it = in.predicates.find(p);
    if (it == in.predicates.end()) throw UndecidableFragment("predicate letter " + p + " is uninterpreted");
    std::vector<Natural> args;
    for (auto& a : f->args) args.push_back(eval_term(a, v, in));
    return it->second(args);
}

// x ≤ t, x < t or |x| ≤ t guarding a blind quantifier; yields the exclusive upper limit.
std::optional<Natural> guard_limit(const FormulaP& g, const std::string& x, bool positive,
                                   const Valuation& v, const Interpretation& in) {
    FormulaKind want = positive ? FormulaKind::Atom : FormulaKind::NegAtom;
    if (g->kind != want || (g->pred != "<=" && g->pred != "<") || g->args.size() != 2) return std::nullopt;
    const auto& l = g->args[0];
    const auto& r = g->args[1];
    if (free_vars(r).count(x)) return std::nullopt;
    if (l->kind == TermKind::Var && l->name == x) {
        auto b = eval_term(r, v, in);
        return g->pred == "<=" ? b.succ() : b;
    }
    if (g->pred == "<=" && l->kind == TermKind::Len && l->args[0]->kind == TermKind::Var &&
        l->args[0]->name == x) {
        auto b = eval_term(r, v, in);
        if (!b.fits_u64() || b.to_u64() > 64) throw UndecidableFragment("size-bounded range too large");
        return Natural::pow2(b.to_u64());
    }
    return std::nullopt;
}

bool eval_rec(const FormulaP& f, Valuation& v, const Interpretation& in);

bool eval_quant(const FormulaP& f, Valuation& v, const Interpretation& in) {
    bool universal = f->kind == FormulaKind::All;
    const auto& x = f->var;
    const auto& body = f->kids[0];
    auto saved = v.find(x) == v.end() ? std::optional<Natural>() : std::optional<Natural>(v[x]);
    auto restore = [&] {
        if (saved) v[x] = *saved;
        else v.erase(x);
    };
    if (!free_vars(body).count(x)) {
        v.erase(x);
        bool r = eval_rec(body, v, in);
        restore();
        return r;
    }
    // Guarded form: ∀x(¬G ∨ A) or ∃x(G ∧ A).
    FormulaKind jk = universal ? FormulaKind::Or : FormulaKind::And;
    if (body->kind == jk) {
        std::optional<Natural> limit;
        try {
            limit = guard_limit(body->kids[0], x, !universal, v, in);
        } catch (const UndecidableFragment&) {
            limit.reset();
        }
        if (limit) {
            if (!limit->fits_u64() || limit->to_u64() > in.max_range)
                throw UndecidableFragment("bounded quantifier range too large");
            std::vector<FormulaP> rest(body->kids.begin() + 1, body->kids.end());
            FormulaP tail = rest.size() == 1 ? rest[0] : junction(jk, rest);
            std::uint64_t n = limit->to_u64();
            bool result = universal;
            for (std::uint64_t i = 0; i < n; ++i) {
                v[x] = Natural(i);
                bool b = eval_rec(tail, v, in);
                if (universal && !b) { result = false; break; }
                if (!universal && b) { result = true; break; }
            }
            restore();
            return result;
        }
    }
    if (in.domain) {
        bool result = universal;
        for (auto& d : *in.domain) {
            v[x] = d;
            bool b = eval_rec(body, v, in);
            if (universal && !b) { result = false; break; }
            if (!universal && b) { result = true; break; }
        }
        restore();
        return result;
    }
    if (in.oracle) {
        restore();
        if (auto r = in.oracle(f, v)) return *r;
    }
    restore();
    throw UndecidableFragment("unbounded quantifier over " + x);
}

bool eval_rec(const FormulaP& f, Valuation& v, const Interpretation& in) {
    switch (f->kind) {
        case FormulaKind::Top: return true;
        case FormulaKind::Bot: return false;
        case FormulaKind::Atom: return eval_atom(f, v, in);
        case FormulaKind::NegAtom: return !eval_atom(f, v, in);
        case FormulaKind::And:
            for (auto& k : f->kids)
                if (!eval_rec(k, v, in)) return false;
            return true;
        case FormulaKind::Or:
            for (auto& k : f->kids)
                if (eval_rec(k, v, in)) return true;
            return false;
        case FormulaKind::All:
        case FormulaKind::Ex: return eval_quant(f, v, in);
        default: throw std::invalid_argument("eval_elementary on a non-elementary formula");
    }
}

}  // namespace

bool eval_elementary(const FormulaP& f, const Valuation& v, const Interpretation& in) {
    Valuation w = v;
    return eval_rec(f, w, in);
}

bool eval_elementary(const FormulaP& f, const Valuation& v) {
    return eval_elementary(f, v, *Interpretation::standard());
}

namespace {

bool canonical_decimal(const std::string& s, std::size_t limit, std::size_t& out) {
    if (s.empty() || s.size() > 9) return false;
    if (s.size() > 1 && s[0] == '0') return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    out = std::stoul(s);
    return out < limit;
}

std::optional<MoveTarget> resolve_rec(const FormulaP& f, Player who, const std::string& move,
                                      OccPath& path, std::string& prefix, std::string* why) {
    auto no = [&](const std::string& r) -> std::optional<MoveTarget> {
        if (why) *why = r;
        return std::nullopt;
    };
    switch (f->kind) {
        case FormulaKind::And:
        case FormulaKind::Or: {
            auto dot = move.find('.');
            if (dot == std::string::npos) return no("expected a component prefix i. in a parallel game");
            std::size_t i;
            if (!canonical_decimal(move.substr(0, dot), f->kids.size(), i))
                return no("no component " + move.substr(0, dot));
            path.push_back(static_cast<int>(i));
            prefix += move.substr(0, dot + 1);
            return resolve_rec(f->kids[i], who, move.substr(dot + 1), path, prefix, why);
        }
        case FormulaKind::All:
        case FormulaKind::Ex:
            path.push_back(0);
            return resolve_rec(f->kids[0], who, move, path, prefix, why);
        case FormulaKind::CAnd:
        case FormulaKind::COr: {
            Player mover = f->kind == FormulaKind::CAnd ? Player::Bot : Player::Top;
            if (who != mover) return no("this choice belongs to the other player");
            std::size_t i;
            if (!canonical_decimal(move, f->kids.size(), i)) return no("no component " + move);
            MoveTarget t{path, f->kind, i, {}, prefix};
            return t;
        }
        case FormulaKind::CAll:
        case FormulaKind::CEx: {
            Player mover = f->kind == FormulaKind::CAll ? Player::Bot : Player::Top;
            if (who != mover) return no("this choice belongs to the other player");
            if (!Natural::is_numeral(move)) return no("not a binary numeral: " + move);
            MoveTarget t{path, f->kind, 0, Natural::from_bits(move), prefix};
            return t;
        }
        default: return no("no moves are possible in an elementary game");
    }
}

void schemas_rec(const FormulaP& f, OccPath& path, const std::string& prefix,
                 std::vector<MoveSchema>& out) {
    switch (f->kind) {
        case FormulaKind::And:
        case FormulaKind::Or:
            for (std::size_t i = 0; i < f->kids.size(); ++i) {
                path.push_back(static_cast<int>(i));
                schemas_rec(f->kids[i], path, prefix + std::to_string(i) + ".", out);
                path.pop_back();
            }
            return;
        case FormulaKind::All:
        case FormulaKind::Ex:
            path.push_back(0);
            schemas_rec(f->kids[0], path, prefix, out);
            path.pop_back();
            return;
        case FormulaKind::CAnd:
            out.push_back({Player::Bot, prefix, f->kind, f->kids.size(), path});
            return;
        case FormulaKind::COr:
            out.push_back({Player::Top, prefix, f->kind, f->kids.size(), path});
            return;
        case FormulaKind::CAll: out.push_back({Player::Bot, prefix, f->kind, 0, path}); return;
        case FormulaKind::CEx: out.push_back({Player::Top, prefix, f->kind, 0, path}); return;
        default: return;
    }
}

}  // namespace

std::string MoveSchema::describe() const {
    if (numeral()) return prefix + "<numeral>";
    std::string out = prefix + "{";
    for (std::size_t i = 0; i < components; ++i) {
        if (i) out += ",";
        out += std::to_string(i);
    }
    return out + "}";
}

std::optional<MoveTarget> resolve_move(const FormulaP& f, Player who, const std::string& move,
                                       std::string* why) {
    OccPath path;
    std::string prefix;
    return resolve_rec(f, who, move, path, prefix, why);
}

FormulaP apply_target(const FormulaP& f, const MoveTarget& t) {
    auto node = subformula_at(f, t.path);
    FormulaP next;
    if (node->kind == FormulaKind::CAnd || node->kind == FormulaKind::COr)
        next = node->kids.at(t.component);
    else
        next = substitute(node->kids[0], node->var, num(t.value));
    return replace_at(f, t.path, next);
}

std::vector<MoveSchema> move_schemas(const FormulaP& f) {
    std::vector<MoveSchema> out;
    OccPath path;
    schemas_rec(f, path, "", out);
    return out;
}

std::size_t choice_depth(const FormulaP& f) {
    switch (f->kind) {
        case FormulaKind::CAnd:
        case FormulaKind::COr: {
            std::size_t m = 0;
            for (auto& k : f->kids) m = std::max(m, choice_depth(k));
            return m + 1;
        }
        case FormulaKind::CAll:
        case FormulaKind::CEx: return 1 + choice_depth(f->kids[0]);
        case FormulaKind::And:
        case FormulaKind::Or: {
            std::size_t s = 0;
            for (auto& k : f->kids) s += choice_depth(k);
            return s;
        }
        case FormulaKind::All:
        case FormulaKind::Ex: return choice_depth(f->kids[0]);
        default: return 0;
    }
}

GameState::GameState(FormulaP f, Valuation v, std::shared_ptr<const Interpretation> in)
    : f_(std::move(f)), val_(std::move(v)), in_(std::move(in)) {}

std::vector<MoveSchema> GameState::legal_moves(Player who) const {
    std::vector<MoveSchema> out;
    for (auto& s : move_schemas(f_))
        if (s.who == who) out.push_back(s);
    return out;
}

std::vector<MoveSchema> GameState::legal_moves() const { return move_schemas(f_); }

std::vector<LabMove> GameState::concrete_moves(const Natural& bound) const {
    std::vector<LabMove> out;
    for (auto& s : move_schemas(f_)) {
        if (s.numeral()) {
            for (Natural c = 0; c <= bound; c = c.succ()) out.push_back({s.who, s.prefix + c.bits()});
        } else {
            for (std::size_t i = 0; i < s.components; ++i)
                out.push_back({s.who, s.prefix + std::to_string(i)});
        }
    }
    return out;
}

std::variant<GameState, Illegal> GameState::apply(const LabMove& m) const {
    std::string why;
    auto t = resolve_move(f_, m.who, m.move, &why);
    if (!t) return Illegal{m, why};
    GameState next = *this;
    next.f_ = apply_target(f_, *t);
    return next;
}

bool GameState::is_legal(const LabMove& m) const { return resolve_move(f_, m.who, m.move).has_value(); }

Player GameState::wn_empty() const {
    return eval_elementary(elementarize(f_), val_, *in_) ? Player::Top : Player::Bot;
}

Verdict adjudicate(const GameState& initial, const Run& run) {
    GameState s = initial;
    for (std::size_t i = 0; i < run.size(); ++i) {
        auto r = s.apply(run[i]);
        if (auto* bad = std::get_if<Illegal>(&r))
            return Verdict{other(run[i].who), VerdictReason::IllegalMove, *bad, i};
        s = std::get<GameState>(std::move(r));
    }
    return Verdict{s.wn_empty(), VerdictReason::TerminalTruth, std::nullopt, 0};
}

namespace {

void enum_rec(const GameState& s, Run& run, const Natural& bound, std::vector<Run>& out) {
    out.push_back(run);
    for (auto& m : s.concrete_moves(bound)) {
        auto r = s.apply(m);
        run.push_back(m);
        enum_rec(std::get<GameState>(r), run, bound, out);
        run.pop_back();
    }
}

}  // namespace

std::vector<Run> enumerate_legal_runs(const GameState& s, const Natural& numeral_bound) {
    std::vector<Run> out;
    Run run;
    enum_rec(s, run, numeral_bound, out);
    return out;
}

std::string format_labmove(const LabMove& m) {
    return std::string(m.who == Player::Top ? "T:" : "B:") + m.move;
}

LabMove parse_labmove(const std::string& line) {
    if (line.size() < 2 || line[1] != ':' || (line[0] != 'T' && line[0] != 'B'))
        throw std::invalid_argument("bad transcript line: " + line);
    return {line[0] == 'T' ? Player::Top : Player::Bot, line.substr(2)};
}

std::string format_run(const Run& r) {
    std::string out;
    for (auto& m : r) out += format_labmove(m) + "\n";
    return out;
}

Run parse_run(const std::string& text) {
    Run out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        out.push_back(parse_labmove(line));
    }
    return out;
}

}  // namespace clarith
