#include "clarith/strategy.hpp"

#include "clarith/text.hpp"

#include "json.hpp"
#include <openssl/evp.h>

#include <algorithm>
#include <deque>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace clarith {

namespace {

GameState apply_or_throw(const GameState& s, const LabMove& m) {
    auto r = s.apply(m);
    if (auto* ill = std::get_if<Illegal>(&r)) throw StrategyError("illegal move " + format_labmove(m) + ": " + ill->reason);
    return std::get<GameState>(r);
}

// The "i." path prefix addressing the node at p.
std::string move_prefix(const FormulaP& f, const OccPath& p) {
    std::string out;
    FormulaP node = f;
    for (int i : p) {
        switch (node->kind) {
            case FormulaKind::And:
            case FormulaKind::Or:
                out += std::to_string(i) + ".";
                node = node->kids.at(i);
                break;
            case FormulaKind::All:
            case FormulaKind::Ex: node = node->kids[0]; break;
            default: throw StrategyError("path " + path_string(p) + " leaves the surface");
        }
    }
    return out;
}

// Longest move prefix plus room for a component index.
std::size_t prefix_room(const FormulaP& f) {
    std::size_t best = 0;
    std::function<void(const FormulaP&, std::size_t)> rec = [&](const FormulaP& g, std::size_t len) {
        best = std::max(best, len + std::to_string(g->kids.size()).size());
        if (g->kind == FormulaKind::And || g->kind == FormulaKind::Or) {
            for (std::size_t i = 0; i < g->kids.size(); ++i) rec(g->kids[i], len + std::to_string(i).size() + 1);
        } else {
            for (auto& k : g->kids) rec(k, len);
        }
    };
    rec(f, 0);
    return best + 1;
}

std::size_t const_room(const TermP& t) {
    std::size_t best = t->kind == TermKind::Const ? std::max<std::size_t>(1, t->value.size()) : 0;
    for (auto& a : t->args) best = std::max(best, const_room(a));
    return best;
}

std::size_t const_room(const FormulaP& f) {
    std::size_t best = 0;
    for (auto& a : f->args) best = std::max(best, const_room(a));
    for (auto& k : f->kids) best = std::max(best, const_room(k));
    return best;
}

ExplicitPolyFn zero_bound() {
    GraphTerm t;
    t.zero();
    return ExplicitPolyFn::of(t);
}

// ---------------------------------------------------------------- silent

class SilentAgent : public Agent {
public:
    std::unique_ptr<Agent> clone() const override { return std::make_unique<SilentAgent>(*this); }
    void observe(const std::string&) override {}
    std::vector<std::string> act() override { return {}; }
    bool quiescent() const override { return true; }
};

// ---------------------------------------------------------------- witness

class WitnessAgent : public Agent {
public:
    WitnessAgent(FormulaP game, std::function<Natural(const Valuation&)> fn)
        : state_(std::move(game)), fn_(std::move(fn)) {}
    std::unique_ptr<Agent> clone() const override { return std::make_unique<WitnessAgent>(*this); }

    void observe(const std::string& move) override {
        auto t = resolve_move(state_.formula(), Player::Bot, move);
        if (!t) return;
        if (t->path.empty() && t->node == FormulaKind::CAll) chosen_[state_.formula()->var] = t->value;
        state_ = apply_or_throw(state_, {Player::Bot, move});
    }

    std::vector<std::string> act() override {
        if (done_ || state_.formula()->kind != FormulaKind::CEx) return {};
        done_ = true;
        Natural v;
        if (fn_) {
            v = fn_(chosen_);
        } else {
            const auto& body = state_.formula()->kids[0];
            v = eval_term(body->args[1], state_.valuation(), state_.interpretation());
        }
        auto m = v.bits();
        state_ = apply_or_throw(state_, {Player::Top, m});
        return {m};
    }

    bool quiescent() const override { return done_ || state_.formula()->kind != FormulaKind::CEx; }

private:
    GameState state_;
    std::function<Natural(const Valuation&)> fn_;
    Valuation chosen_;
    bool done_ = false;
};

// ---------------------------------------------------------------- proof walker

struct Compiled {
    Cl12Proof proof;
    Cl12Report report;
    std::vector<Strategy> providers;
    FormulaP game;
};

class ProofAgent : public Agent {
public:
    explicit ProofAgent(std::shared_ptr<const Compiled> c) : c_(std::move(c)), ext_(c_->game) {
        cur_ = static_cast<int>(c_->proof.lines.size()) - 1;
        for (std::size_t i = 0; i < c_->providers.size(); ++i) {
            Session s;
            s.id = next_id_++;
            s.name = "a" + std::to_string(i);
            s.state = GameState(c_->providers[i].game);
            s.agent = c_->providers[i].spawn();
            sessions_.push_back(std::move(s));
        }
    }

    ProofAgent(const ProofAgent& o)
        : Agent(o), c_(o.c_), cur_(o.cur_), bind_(o.bind_), ext_(o.ext_), pending_(o.pending_),
          next_id_(o.next_id_), stuck_(o.stuck_) {
        for (auto& s : o.sessions_) sessions_.push_back(s.copy());
    }

    std::unique_ptr<Agent> clone() const override { return std::make_unique<ProofAgent>(*this); }

    void observe(const std::string& move) override {
        std::string why;
        auto t = resolve_move(ext_.formula(), Player::Bot, move, &why);
        if (!t) {
            notes_.push_back("ignored environment move " + move + ": " + why);
            return;
        }
        ext_ = apply_or_throw(ext_, {Player::Bot, move});
        pending_.push_back({-1, *t});
    }

    std::vector<std::string> act() override {
        std::vector<std::string> out;
        for (int guard = 0; guard < 100000; ++guard) {
            bool progress = false;
            for (auto& s : sessions_) {
                if (s.faulted) continue;
                for (auto& m : s.agent->act()) {
                    std::string why;
                    auto t = resolve_move(s.state.formula(), Player::Top, m, &why);
                    if (!t) {
                        s.faulted = true;
                        notes_.push_back("provider fault in session " + s.name + ": move " + m + ": " + why);
                        break;
                    }
                    s.state = apply_or_throw(s.state, {Player::Top, m});
                    pending_.push_back({s.id, *t});
                    progress = true;
                }
            }
            while (!stuck_ && step(out)) progress = true;
            if (!progress) break;
        }
        return out;
    }

    bool quiescent() const override {
        if (!stuck_ && (c_->proof.lines[cur_].rule != Rule::Wait || !pending_.empty())) return false;
        for (auto& s : sessions_)
            if (!s.faulted && !s.agent->quiescent()) return false;
        return true;
    }

    std::vector<std::string> notes() const override {
        auto n = notes_;
        for (auto& s : sessions_) {
            auto in = s.agent->notes();
            n.insert(n.end(), in.begin(), in.end());
        }
        return n;
    }

private:
    struct Session {
        int id = 0;
        std::string name;
        GameState state;
        std::unique_ptr<Agent> agent;
        bool faulted = false;
        Session copy() const {
            Session s;
            s.id = id;
            s.name = name;
            s.state = state;
            s.agent = agent->clone();
            s.faulted = faulted;
            return s;
        }
    };
    struct Event {
        int session;  // -1: the external game
        MoveTarget target;
    };

    Natural value_of(const TermP& t) {
        if (t->kind == TermKind::Const) return t->value;
        if (t->kind == TermKind::Var) {
            auto it = bind_.find(t->name);
            if (it != bind_.end()) return it->second;
            // Any constant serves for a variable the proof never fixed.
            bind_[t->name] = Natural(0);
            return Natural(0);
        }
        throw StrategyError("choice term " + print(t) + " is not a constant or a variable");
    }

    void transition(const PremiseLink& link) {
        std::vector<Session> next(link.ante_map.size());
        std::vector<int> first(sessions_.size(), -1);
        for (std::size_t j = 0; j < link.ante_map.size(); ++j) {
            int k = link.ante_map[j];
            if (first[k] < 0) {
                first[k] = static_cast<int>(j);
            } else {
                next[j] = sessions_[k].copy();
                next[j].id = next_id_++;
                next[j].name = sessions_[k].name + "'";
            }
        }
        for (std::size_t k = 0; k < sessions_.size(); ++k)
            if (first[k] >= 0) next[first[k]] = std::move(sessions_[k]);
        sessions_ = std::move(next);
        cur_ = link.premise;
    }

    bool step(std::vector<std::string>& out) {
        const auto& line = c_->proof.lines[cur_];
        const auto& chk = c_->report.lines[cur_];
        if (line.rule == Rule::Wait) {
            if (pending_.empty()) return false;
            Event ev = pending_.front();
            pending_.pop_front();
            int side = -1;
            if (ev.session >= 0) {
                auto it = std::find_if(sessions_.begin(), sessions_.end(),
                                       [&](const Session& s) { return s.id == ev.session; });
                if (it == sessions_.end()) return true;
                side = static_cast<int>(it - sessions_.begin());
            }
            PremiseLink::Kind want;
            switch (ev.target.node) {
                case FormulaKind::CAnd: want = PremiseLink::AndCond; break;
                case FormulaKind::COr: want = PremiseLink::OrCond; break;
                case FormulaKind::CAll: want = PremiseLink::AllCond; break;
                default: want = PremiseLink::ExistsCond; break;
            }
            bool quant = want == PremiseLink::AllCond || want == PremiseLink::ExistsCond;
            for (auto& link : chk.links) {
                if (link.kind != want || link.side != side || link.path != ev.target.path) continue;
                if (!quant && link.component != static_cast<int>(ev.target.component)) continue;
                if (quant) bind_[link.fresh] = ev.target.value;
                transition(link);
                return true;
            }
            notes_.push_back("line " + std::to_string(line.number) + " has no premise for the move at " +
                             path_string(ev.target.path));
            return true;
        }
        const auto& link = chk.links.at(0);
        if (line.rule == Rule::Replicate) {
            transition(link);
            return true;
        }
        std::string choice = (line.rule == Rule::OrChoose || line.rule == Rule::AndChoose)
                                 ? std::to_string(link.component)
                                 : value_of(chk.term).bits();
        if (link.side < 0) {
            auto m = move_prefix(ext_.formula(), link.path) + choice;
            auto r = ext_.apply({Player::Top, m});
            if (auto* ill = std::get_if<Illegal>(&r)) {
                notes_.push_back("line " + std::to_string(line.number) + ": move " + m + " is illegal: " + ill->reason);
                stuck_ = true;
                return false;
            }
            ext_ = std::get<GameState>(r);
            out.push_back(m);
        } else {
            auto& s = sessions_.at(link.side);
            auto m = move_prefix(s.state.formula(), link.path) + choice;
            auto r = s.state.apply({Player::Bot, m});
            if (auto* ill = std::get_if<Illegal>(&r)) {
                notes_.push_back("line " + std::to_string(line.number) + ": move " + m + " in session " + s.name +
                                 " is illegal: " + ill->reason);
                stuck_ = true;
                return false;
            }
            s.state = std::get<GameState>(r);
            if (!s.faulted) s.agent->observe(m);
        }
        transition(link);
        return true;
    }

    std::shared_ptr<const Compiled> c_;
    int cur_ = 0;
    std::map<std::string, Natural> bind_;
    GameState ext_;
    std::vector<Session> sessions_;
    std::deque<Event> pending_;
    int next_id_ = 0;
    bool stuck_ = false;
};

// Longest chain of provider answers along any walk from line i.
int rounds(const Cl12Proof& p, const Cl12Report& r, int i, std::map<int, int>& memo) {
    auto it = memo.find(i);
    if (it != memo.end()) return it->second;
    int best = 0;
    for (auto& link : r.lines[i].links) {
        int add = (p.lines[i].rule == Rule::Wait && link.side >= 0 &&
                   (link.kind == PremiseLink::OrCond || link.kind == PremiseLink::ExistsCond))
                      ? 1
                      : 0;
        best = std::max(best, add + rounds(p, r, link.premise, memo));
    }
    memo[i] = best;
    return best;
}

// ---------------------------------------------------------------- reasonable wrap

class ReasonableAgent : public Agent {
public:
    ReasonableAgent(FormulaP game, std::unique_ptr<Agent> inner) : state_(std::move(game)), inner_(std::move(inner)) {}
    ReasonableAgent(const ReasonableAgent& o) : Agent(o), state_(o.state_), inner_(o.inner_->clone()) {}
    std::unique_ptr<Agent> clone() const override { return std::make_unique<ReasonableAgent>(*this); }

    void observe(const std::string& move) override {
        auto r = state_.apply({Player::Bot, move});
        if (auto* g = std::get_if<GameState>(&r)) state_ = *g;
        inner_->observe(move);
    }

    std::vector<std::string> act() override {
        std::vector<std::string> out;
        for (auto& m : inner_->act()) {
            bool clipped = false;
            auto m2 = moderate(state_, m, &clipped);
            if (clipped) notes_.push_back("clipped " + m + " to " + m2);
            auto r = state_.apply({Player::Top, m2});
            if (auto* g = std::get_if<GameState>(&r)) state_ = *g;
            out.push_back(m2);
        }
        return out;
    }

    bool quiescent() const override { return inner_->quiescent(); }

    std::vector<std::string> notes() const override {
        auto n = notes_;
        auto in = inner_->notes();
        n.insert(n.end(), in.begin(), in.end());
        return n;
    }

private:
    GameState state_;
    std::unique_ptr<Agent> inner_;
};

void collect_sizebounds(const FormulaP& f, std::vector<TermP>& out) {
    if (f->kind == FormulaKind::CEx && f->kids[0]->kind == FormulaKind::And &&
        is_sizebound(f->kids[0]->kids[0], f->var))
        out.push_back(f->kids[0]->kids[0]->args[1]);
    if (f->kind == FormulaKind::CAll && f->kids[0]->kind == FormulaKind::Or) {
        auto g = negate(f->kids[0]->kids[0]);
        if (is_sizebound(g, f->var)) out.push_back(g->args[1]);
    }
    for (auto& k : f->kids) collect_sizebounds(k, out);
}

int size_term(const TermP& t, GraphTerm& g, int prev) {
    switch (t->kind) {
        case TermKind::Const:
            if (!t->value.fits_u64()) throw StrategyError("sizebound constant too large");
            return g.constant(t->value.to_u64());
        case TermKind::Succ: return g.succ(size_term(t->args[0], g, prev));
        case TermKind::Add: return g.add(size_term(t->args[0], g, prev), size_term(t->args[1], g, prev));
        case TermKind::Mul: return g.mul(size_term(t->args[0], g, prev), size_term(t->args[1], g, prev));
        case TermKind::Len: return prev;
        default: throw StrategyError("not a sizebound term: " + print(t));
    }
}

// ---------------------------------------------------------------- induction

struct InductionData {
    FormulaP conclusion;
    Strategy n, k0, k1;
};

class InductionAgent : public Agent {
public:
    explicit InductionAgent(std::shared_ptr<const InductionData> d) : d_(std::move(d)), ext_(d_->conclusion) {}
    InductionAgent(const InductionAgent& o)
        : Agent(o), d_(o.d_), ext_(o.ext_), built_(o.built_), log_(o.log_) {
        for (auto& n : o.chain_) chain_.push_back({n.name, n.state, n.agent->clone()});
    }
    std::unique_ptr<Agent> clone() const override { return std::make_unique<InductionAgent>(*this); }

    void observe(const std::string& move) override {
        std::string why;
        auto t = resolve_move(ext_.formula(), Player::Bot, move, &why);
        if (!t) {
            notes_.push_back("ignored environment move " + move + ": " + why);
            return;
        }
        ext_ = apply_or_throw(ext_, {Player::Bot, move});
        if (!built_) {
            build(t->value);
            return;
        }
        deliver(chain_.size() - 1, chain_.size() == 1 ? move : "1." + move);
    }

    std::vector<std::string> act() override {
        std::vector<std::string> out;
        if (!built_) return out;
        for (int guard = 0; guard < 100000; ++guard) {
            bool progress = false;
            for (std::size_t i = 0; i < chain_.size(); ++i) {
                for (auto& m : chain_[i].agent->act()) {
                    progress = true;
                    std::string why;
                    if (!resolve_move(chain_[i].state.formula(), Player::Top, m, &why)) {
                        notes_.push_back("session " + chain_[i].name + " made an illegal move " + m + ": " + why);
                        continue;
                    }
                    chain_[i].state = apply_or_throw(chain_[i].state, {Player::Top, m});
                    route(i, m, out);
                }
            }
            if (!progress) break;
        }
        return out;
    }

    bool quiescent() const override {
        for (auto& n : chain_)
            if (!n.agent->quiescent()) return false;
        return true;
    }

    std::vector<std::string> sessions() const override { return log_; }

    std::vector<std::string> notes() const override {
        auto n = notes_;
        for (auto& c : chain_) {
            auto in = c.agent->notes();
            n.insert(n.end(), in.begin(), in.end());
        }
        return n;
    }

private:
    struct Node {
        std::string name;
        GameState state;
        std::unique_ptr<Agent> agent;
    };

    void build(const Natural& c) {
        built_ = true;
        chain_.push_back({"N", GameState(d_->n.game), d_->n.spawn()});
        std::size_t k = c.size();
        for (std::size_t i = 1; i <= k; ++i) {
            bool b = c.bit_from_left(i - 1);
            const Strategy& ks = b ? d_->k1 : d_->k0;
            Node node{b ? "K1" : "K0", GameState(ks.game), ks.spawn()};
            auto d = (c >> (k - i + 1)).bits();
            node.state = apply_or_throw(node.state, {Player::Bot, d});
            node.agent->observe(d);
            chain_.push_back(std::move(node));
        }
        for (auto& n : chain_) log_.push_back(n.name);
    }

    void deliver(std::size_t j, const std::string& m) {
        auto r = chain_[j].state.apply({Player::Bot, m});
        if (auto* ill = std::get_if<Illegal>(&r)) {
            notes_.push_back("copy of " + m + " into session " + chain_[j].name + " is illegal: " + ill->reason);
            return;
        }
        chain_[j].state = std::get<GameState>(r);
        chain_[j].agent->observe(m);
    }

    void route(std::size_t i, const std::string& m, std::vector<std::string>& out) {
        std::string rest;
        if (i == 0) {
            rest = m;
        } else if (m.rfind("0.", 0) == 0) {
            auto inner = m.substr(2);
            deliver(i - 1, i - 1 == 0 ? inner : "1." + inner);
            return;
        } else if (m.rfind("1.", 0) == 0) {
            rest = m.substr(2);
        } else {
            notes_.push_back("session " + chain_[i].name + " moved outside its two components: " + m);
            return;
        }
        if (i + 1 < chain_.size()) {
            deliver(i + 1, "0." + rest);
            return;
        }
        // The outermost arc: moderated copycat into the real play.
        bool clipped = false;
        auto real = moderate(ext_, rest, &clipped);
        if (clipped) notes_.push_back("clipped " + rest + " to " + real);
        auto r = ext_.apply({Player::Top, real});
        if (auto* g = std::get_if<GameState>(&r)) ext_ = *g;
        out.push_back(real);
    }

    std::shared_ptr<const InductionData> d_;
    GameState ext_;
    bool built_ = false;
    std::vector<Node> chain_;
    std::vector<std::string> log_;
};

}  // namespace

// ---------------------------------------------------------------- public

Strategy silent_strategy(FormulaP game) {
    return {std::move(game), std::make_shared<SilentAgent>(), zero_bound(), "silent"};
}

Strategy witness_strategy(FormulaP game, ExplicitPolyFn certificate, std::function<Natural(const Valuation&)> fn) {
    FormulaP f = game;
    while (f->kind == FormulaKind::CAll) f = f->kids[0];
    if (f->kind != FormulaKind::CEx || f->kids[0]->kind != FormulaKind::Atom || f->kids[0]->pred != "=" ||
        f->kids[0]->args[0]->kind != TermKind::Var || f->kids[0]->args[0]->name != f->var)
        throw StrategyError("witness strategies play ⊓x1…⊓xn⊔y(y=τ), not " + print(game));
    return {game, std::make_shared<WitnessAgent>(game, std::move(fn)), std::move(certificate), "witness"};
}

Strategy axiom_strategy(int k) {
    if (k == 8 || k == 9) {
        auto s = witness_strategy(axiom_formula(k), polynomial_bound({1, 1}));
        s.description = "axiom " + std::to_string(k);
        return s;
    }
    if (k < 1 || k > 9) throw StrategyError("no axiom " + std::to_string(k));
    auto s = silent_strategy(k == 7 ? top() : axiom_formula(k));
    s.description = "axiom " + std::to_string(k);
    return s;
}

Strategy compile_cl12(const Cl12Proof& proof, const std::vector<Strategy>& providers, const CheckOptions& opt) {
    auto c = std::make_shared<Compiled>();
    c->proof = proof;
    c->report = check_proof(proof, opt);
    if (!c->report.ok) throw StrategyError("proof does not check: " + c->report.summary());
    const auto& root = proof.conclusion();
    if (providers.size() != root.ante.size())
        throw StrategyError("expected " + std::to_string(root.ante.size()) + " providers, got " +
                            std::to_string(providers.size()));
    for (std::size_t i = 0; i < providers.size(); ++i)
        if (!alpha_equal(providers[i].game, root.ante[i]))
            throw StrategyError("provider " + std::to_string(i) + " plays " + print(providers[i].game) +
                                " instead of " + print(root.ante[i]));
    c->providers = providers;
    c->game = root.succ;

    // B0 = ℓ + C and B(r+1) = B(r) + C + Σ ξi(B(r)): every constant we pass on
    // came from the environment, from the proof, or from a provider whose
    // background is bounded by our own earlier moves.
    std::size_t room = 1;
    for (auto& l : proof.lines) {
        for (auto& a : l.sequent.ante) room = std::max(room, prefix_room(a) + const_room(a));
        room = std::max(room, prefix_room(l.sequent.succ) + const_room(l.sequent.succ));
    }
    std::map<int, int> memo;
    int r = rounds(proof, c->report, static_cast<int>(proof.lines.size()) - 1, memo);
    PolyFnBuilder b;
    std::vector<std::string> xi;
    for (auto& p : providers)
        if (p.certificate.defs().size() > 1 || p.certificate.defs()[0].term.size() > 1 ||
            p.certificate.defs()[0].term.nodes()[0].op != GraphTerm::Op::Zero)
            xi.push_back(b.import(p.certificate));
    GraphTerm g0;
    g0.add(g0.y(), g0.constant(room));
    auto prev = b.define(g0);
    for (int i = 0; i < r; ++i) {
        GraphTerm g;
        int at = g.call(prev, g.y());
        int acc = g.add(at, g.constant(room));
        for (auto& name : xi) acc = g.add(acc, g.call(name, at));
        prev = b.define(g);
    }
    return {c->game, std::make_shared<ProofAgent>(c), b.build(), "proof of " + print(root)};
}

std::string moderate(const GameState& s, const std::string& move, bool* clipped) {
    if (clipped) *clipped = false;
    auto t = resolve_move(s.formula(), Player::Top, move);
    if (!t || t->node != FormulaKind::CEx) return move;
    auto node = subformula_at(s.formula(), t->path);
    const auto& body = node->kids[0];
    if (body->kind != FormulaKind::And) return move;
    // Chosen values have replaced the variables of the bound by now.
    const auto& sb = body->kids[0];
    if (sb->kind != FormulaKind::Atom || sb->pred != "<=" || sb->args[0]->kind != TermKind::Len ||
        sb->args[0]->args[0]->kind != TermKind::Var || sb->args[0]->args[0]->name != node->var)
        return move;
    try {
        auto bound = substitute(body->kids[0], node->var, num(t->value));
        if (eval_elementary(bound, s.valuation(), s.interpretation())) return move;
    } catch (const std::exception&) {
        return move;
    }
    if (clipped) *clipped = true;
    return t->prefix + "0";
}

ExplicitPolyFn reasonable_bound(const FormulaP& f) {
    std::vector<TermP> taus;
    collect_sizebounds(f, taus);
    std::size_t depth = choice_depth(f);
    PolyFnBuilder b;
    GraphTerm g0;
    g0.y();
    auto prev = b.define(g0);
    if (!taus.empty()) {
        for (std::size_t i = 0; i < depth; ++i) {
            GraphTerm g;
            int at = g.call(prev, g.y());
            int acc = at;
            for (auto& t : taus) acc = g.add(acc, size_term(t, g, at));
            g.set_root(acc);
            prev = b.define(g);
        }
    }
    GraphTerm fin;
    fin.add(fin.call(prev, fin.y()), fin.constant(prefix_room(f) + const_room(f)));
    b.define(fin);
    return b.build();
}

Strategy reasonable_wrap(const Strategy& s) {
    Strategy out = s;
    out.prototype = std::make_shared<ReasonableAgent>(s.game, s.spawn());
    out.certificate = sum_bounds(s.certificate, reasonable_bound(s.game));
    out.description = "reasonable " + s.description;
    return out;
}

Strategy induction_compose(const FormulaP& conclusion, const Strategy& n, const Strategy& k0, const Strategy& k1) {
    if (conclusion->kind != FormulaKind::CAll)
        throw StrategyError("induction conclusion must be ⊓x F(x), got " + print(conclusion));
    auto body = conclusion->kids[0];
    if (free_vars(body) != std::set<std::string>{conclusion->var})
        throw StrategyError("induction with parameters besides " + conclusion->var + " is not supported");
    for (auto* k : {&k0, &k1})
        if (k->game->kind != FormulaKind::CAll)
            throw StrategyError("induction step must be a ⊓-closure, got " + print(k->game));
    auto d = std::make_shared<InductionData>();
    d->conclusion = conclusion;
    d->n = reasonable_wrap(n);
    d->k0 = reasonable_wrap(k0);
    d->k1 = reasonable_wrap(k1);
    // Real-play moves are reasonable, hence within reasonable_bound; the sum
    // φ = ξ′+ζ′0+ζ′1 of the chained machines is carried along.
    auto phi = sum_bounds(d->n.certificate, sum_bounds(d->k0.certificate, d->k1.certificate));
    auto cert = sum_bounds(reasonable_bound(conclusion), phi);
    return {conclusion, std::make_shared<InductionAgent>(d), cert, "induction on " + conclusion->var};
}

Extraction extract(const Cla4Proof& proof, const std::string& label, const Cla4Options& opt) {
    auto audit = check_cla4(proof, opt);
    if (!audit.ok) throw StrategyError("audit failed: " + audit.summary());
    if (!audit.extraction_ready) {
        std::string lines;
        for (auto& l : audit.not_ready) lines += (lines.empty() ? "" : ", ") + l;
        throw StrategyError("proof is not extraction-ready: " + lines);
    }
    std::string want = label.empty() ? proof.lines.back().label : label;
    std::map<std::string, Strategy> done;
    for (std::size_t i = 0; i < proof.lines.size(); ++i) {
        const auto& l = proof.lines[i];
        const auto& lr = audit.lines[i];
        Strategy s;
        switch (l.kind) {
            case Cla4Line::Axiom:
                if (lr.axiom == 8 || lr.axiom == 9) {
                    s = witness_strategy(l.sentence, polynomial_bound({1, 1}));
                    s.description = "axiom " + std::to_string(lr.axiom);
                } else {
                    s = silent_strategy(l.sentence);
                }
                break;
            case Cla4Line::Pa: s = silent_strategy(l.sentence); break;
            case Cla4Line::Lc: {
                const auto& cl = *lr.lc_proof;
                std::vector<FormulaP> prem;
                for (auto& p : l.premises) prem.push_back(done.at(p).game);
                auto map = match_sequent(lc_sequent(l.sentence, prem), cl.conclusion());
                if (!map) throw StrategyError("line " + l.label + ": LC proof does not match");
                std::vector<Strategy> providers;
                for (std::size_t j = 0; j < map->size(); ++j) {
                    auto p = done.at(l.premises[(*map)[j]]);
                    p.game = cl.conclusion().ante[j];
                    providers.push_back(p);
                }
                s = compile_cl12(cl, providers, opt.cl12);
                if (!alpha_equal(s.game, l.sentence))
                    throw StrategyError("line " + l.label + ": quantifier order of the LC conclusion differs");
                s.game = l.sentence;
                break;
            }
            case Cla4Line::Induction:
                s = induction_compose(l.sentence, done.at(l.basis), done.at(l.left), done.at(l.right));
                break;
        }
        done[l.label] = s;
        if (l.label == want) return {s, want};
    }
    throw StrategyError("no line labelled " + want);
}

std::vector<std::string> ScriptedEnvironment::act(const GameState&) {
    if (next_ >= moves_.size()) return {};
    return {moves_[next_++]};
}

std::vector<std::string> RandomEnvironment::act(const GameState& s) {
    auto schemas = s.legal_moves(Player::Bot);
    if (schemas.empty()) return {};
    if (std::uniform_real_distribution<double>(0, 1)(rng_) < stop_) return {};
    const auto& sc = schemas[std::uniform_int_distribution<std::size_t>(0, schemas.size() - 1)(rng_)];
    if (sc.numeral()) {
        auto bits = std::uniform_int_distribution<std::size_t>(0, max_bits_)(rng_);
        return {sc.prefix + Natural::random_bits(rng_, bits).bits()};
    }
    return {sc.prefix + std::to_string(std::uniform_int_distribution<std::size_t>(0, sc.components - 1)(rng_))};
}

Transcript play(const Strategy& s, Environment& env, std::size_t tick_budget) {
    Transcript tr;
    auto agent = s.spawn();
    GameState initial(s.game);
    GameState state = initial;
    std::size_t last = 0, ell = 0;
    bool ended = false;
    auto record = [&](Player who, const std::string& m) {
        MoveMeter mm;
        mm.index = tr.run.size();
        mm.who = who;
        mm.size = m.size();
        mm.timecost = tr.ticks - last;
        last = tr.ticks;
        if (who == Player::Bot) ell = std::max(ell, m.size());
        mm.background = ell;
        if (who == Player::Top) {
            mm.bound = s.certificate.eval(Natural(ell));
            mm.within = Natural(mm.size) <= mm.bound;
            if (!mm.within) tr.certificate_ok = false;
        }
        tr.meters.push_back(mm);
        tr.run.push_back({who, m});
        auto r = state.apply({who, m});
        if (std::holds_alternative<Illegal>(r)) {
            tr.notes.push_back(std::string(player_name(who)) + " made the illegal move " + m);
            return false;
        }
        state = std::get<GameState>(r);
        return true;
    };
    while (!ended && tr.ticks < tick_budget) {
        ++tr.ticks;
        for (auto& m : agent->act())
            if (!record(Player::Top, m)) {
                ended = true;
                break;
            }
        if (ended || !agent->quiescent()) continue;
        auto moves = env.act(state);
        if (moves.empty()) break;
        for (auto& m : moves) {
            if (!record(Player::Bot, m)) {
                ended = true;
                break;
            }
            agent->observe(m);
        }
    }
    tr.stalled = !ended && tr.ticks >= tick_budget && !agent->quiescent();
    try {
        tr.verdict = adjudicate(initial, tr.run);
        tr.adjudicated = true;
    } catch (const std::exception& e) {
        tr.adjudication_error = e.what();
    }
    tr.sessions = agent->sessions();
    auto n = agent->notes();
    tr.notes.insert(tr.notes.end(), n.begin(), n.end());
    return tr;
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr)) throw StrategyError("sha256 failed");
    std::ostringstream os;
    for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return os.str();
}

std::string make_bundle(const std::string& proof_text, const std::string& base_dir, const std::string& label) {
    auto proof = parse_cla4(proof_text, base_dir);
    auto ex = extract(proof, label);
    nlohmann::json j{{"format", "clarith-bundle"},
                     {"version", 1},
                     {"label", ex.label},
                     {"sentence", print(ex.strategy.game)},
                     {"proof", proof_text},
                     {"proof_sha256", sha256_hex(proof_text)},
                     {"base_dir", base_dir},
                     {"certificate", ex.strategy.certificate.format()}};
    return j.dump(2);
}

Extraction load_bundle(const std::string& bundle_json) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bundle_json);
    } catch (const std::exception& e) {
        throw StrategyError(std::string("bundle is not JSON: ") + e.what());
    }
    if (j.value("format", "") != "clarith-bundle" || j.value("version", 0) != 1)
        throw StrategyError("not a version 1 strategy bundle");
    auto text = j.at("proof").get<std::string>();
    if (sha256_hex(text) != j.at("proof_sha256").get<std::string>())
        throw StrategyError("bundle proof does not match its hash");
    auto ex = extract(parse_cla4(text, j.value("base_dir", "")), j.at("label").get<std::string>());
    if (ex.strategy.certificate.format() != j.at("certificate").get<std::string>())
        throw StrategyError("bundle certificate differs from the re-extracted one");
    if (j.contains("sentence") && j["sentence"].get<std::string>() != print(ex.strategy.game))
        throw StrategyError("bundle sentence differs from the proved one");
    return ex;
}

}  // namespace clarith
