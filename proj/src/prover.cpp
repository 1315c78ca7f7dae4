#include "clarith/prover.hpp"

#include "clarith/text.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

namespace clarith {

const char* validity_name(Validity v) {
    switch (v) {
        case Validity::Valid: return "valid";
        case Validity::Refuted: return "refuted";
        case Validity::Unknown: return "unknown";
    }
    return "?";
}

namespace {

// Rename every bound variable apart; "%" never occurs in parsed names.
FormulaP rename_bound_apart(const FormulaP& f, std::map<std::string, TermP>& scope, int& counter) {
    if (is_literal(f->kind)) {
        if (scope.empty()) return f;
        std::vector<TermP> args;
        for (auto& a : f->args) args.push_back(substitute(a, scope));
        auto out = atom(f->pred, std::move(args));
        return f->kind == FormulaKind::NegAtom ? negate(out) : out;
    }
    if (f->kind == FormulaKind::Top || f->kind == FormulaKind::Bot) return f;
    if (is_quantifier(f->kind)) {
        std::string nv = "%" + std::to_string(++counter);
        auto saved = scope;
        scope[f->var] = var(nv);
        auto body = rename_bound_apart(f->kids[0], scope, counter);
        scope = saved;
        return quant(f->kind, nv, body);
    }
    std::vector<FormulaP> kids;
    for (auto& k : f->kids) kids.push_back(rename_bound_apart(k, scope, counter));
    return junction(f->kind, std::move(kids));
}

struct Skolemizer {
    std::string prefix;
    int count = 0;

    FormulaP run(const FormulaP& f, std::vector<std::string>& univ) {
        switch (f->kind) {
            case FormulaKind::All:
            case FormulaKind::CAll: {
                univ.push_back(f->var);
                auto body = run(f->kids[0], univ);
                univ.pop_back();
                return quant(FormulaKind::All, f->var, body);
            }
            case FormulaKind::Ex:
            case FormulaKind::CEx: {
                std::string name = prefix + std::to_string(++count);
                TermP sk;
                if (univ.empty()) {
                    sk = var(name);
                } else {
                    std::vector<TermP> args;
                    for (auto& u : univ) args.push_back(var(u));
                    sk = app(name, std::move(args));
                }
                return run(substitute(f->kids[0], f->var, sk), univ);
            }
            case FormulaKind::And:
            case FormulaKind::Or:
            case FormulaKind::CAnd:
            case FormulaKind::COr: {
                std::vector<FormulaP> kids;
                for (auto& k : f->kids) kids.push_back(run(k, univ));
                return junction(f->kind == FormulaKind::CAnd   ? FormulaKind::And
                                : f->kind == FormulaKind::COr ? FormulaKind::Or
                                                              : f->kind,
                                std::move(kids));
            }
            default:
                return f;
        }
    }
};

void collect_app_names(const TermP& t, std::set<std::string>& out) {
    if (t->kind == TermKind::App) out.insert(t->name);
    for (auto& a : t->args) collect_app_names(a, out);
}

void collect_app_names(const FormulaP& f, std::set<std::string>& out) {
    for (auto& a : f->args) collect_app_names(a, out);
    for (auto& k : f->kids) collect_app_names(k, out);
}

// ¬φ, bound variables renamed apart, Skolemized. Deterministic in φ.
FormulaP refutation_target(const FormulaP& phi) {
    std::set<std::string> names = free_vars(phi);
    collect_app_names(phi, names);
    std::string prefix = "sk_";
    auto clash = [&](const std::string& p) {
        for (auto& n : names)
            if (n.rfind(p, 0) == 0) return true;
        return false;
    };
    while (clash(prefix)) prefix = "s" + prefix;
    std::map<std::string, TermP> scope;
    int counter = 0;
    auto psi = rename_bound_apart(negate(phi), scope, counter);
    Skolemizer sk{prefix};
    std::vector<std::string> univ;
    return sk.run(psi, univ);
}

// Function symbols are keyed by kind and name; the key also fixes the arity.
struct FunSym {
    TermKind kind;
    std::string name;
    std::size_t arity;
    bool operator<(const FunSym& o) const {
        return std::tie(kind, name, arity) < std::tie(o.kind, o.name, o.arity);
    }
};

bool has_var_from(const TermP& t, const std::set<std::string>& bound) {
    if (t->kind == TermKind::Var) return bound.count(t->name) > 0;
    for (auto& a : t->args)
        if (has_var_from(a, bound)) return true;
    return false;
}

void collect_signature(const TermP& t, const std::set<std::string>& bound, std::set<FunSym>& funs,
                       std::map<std::string, TermP>& ground) {
    if (!has_var_from(t, bound)) ground.emplace(term_key(t), t);
    if (t->kind != TermKind::Var && t->kind != TermKind::Const && !t->args.empty())
        funs.insert(FunSym{t->kind, t->name, t->args.size()});
    for (auto& a : t->args) collect_signature(a, bound, funs, ground);
}

void collect_signature(const FormulaP& f, std::set<std::string>& bound, std::set<FunSym>& funs,
                       std::map<std::string, TermP>& ground) {
    if (is_literal(f->kind)) {
        for (auto& a : f->args) collect_signature(a, bound, funs, ground);
        return;
    }
    if (is_quantifier(f->kind)) {
        bool fresh = bound.insert(f->var).second;
        collect_signature(f->kids[0], bound, funs, ground);
        if (fresh) bound.erase(f->var);
        return;
    }
    for (auto& k : f->kids) collect_signature(k, bound, funs, ground);
}

TermP build(const FunSym& s, std::vector<TermP> args) {
    switch (s.kind) {
        case TermKind::Succ: return succ(args[0]);
        case TermKind::Add: return add(args[0], args[1]);
        case TermKind::Mul: return mul(args[0], args[1]);
        case TermKind::Len: return len(args[0]);
        case TermKind::Pow2: return pow2(args[0]);
        case TermKind::BitAt: return bit_at(args[0], args[1]);
        case TermKind::Substr: return substr(args[0], args[1], args[2]);
        default: return app(s.name, std::move(args));
    }
}

std::size_t term_depth(const TermP& t) {
    std::size_t d = 0;
    for (auto& a : t->args) d = std::max(d, term_depth(a) + 1);
    return d;
}

// Herbrand terms: the formula's own ground terms closed under the
// signature `depth` times, capped at max_terms.
std::vector<TermP> herbrand_terms(const FormulaP& psi, int depth, std::size_t max_terms,
                                  bool& truncated) {
    std::set<std::string> bound;
    std::set<FunSym> funs;
    std::map<std::string, TermP> ground;
    collect_signature(psi, bound, funs, ground);
    std::vector<TermP> terms;
    std::set<std::string> keys;
    auto push = [&](const TermP& t) {
        if (keys.insert(term_key(t)).second) terms.push_back(t);
    };
    std::vector<TermP> initial;
    for (auto& [k, t] : ground) initial.push_back(t);
    std::stable_sort(initial.begin(), initial.end(),
                     [](const TermP& a, const TermP& b) { return term_depth(a) < term_depth(b); });
    for (auto& t : initial) push(t);
    if (terms.empty()) push(var("%c"));
    truncated = false;
    for (int d = 0; d < depth; ++d) {
        std::vector<TermP> base = terms;
        for (auto& s : funs) {
            std::vector<std::size_t> idx(s.arity, 0);
            while (true) {
                std::vector<TermP> args;
                for (auto i : idx) args.push_back(base[i]);
                if (terms.size() >= max_terms) {
                    truncated = true;
                    return terms;
                }
                push(build(s, std::move(args)));
                std::size_t k = 0;
                while (k < idx.size() && ++idx[k] == base.size()) idx[k++] = 0;
                if (k == idx.size()) break;
            }
        }
    }
    return terms;
}

// Congruence closure over ground terms.
class Congruence {
public:
    int intern(const TermP& t) {
        auto key = term_key(t);
        auto it = ids_.find(key);
        if (it != ids_.end()) return it->second;
        std::vector<int> args;
        for (auto& a : t->args) args.push_back(intern(a));
        std::string sym;
        switch (t->kind) {
            case TermKind::Var: sym = "v" + t->name; break;
            case TermKind::Const: sym = "c" + t->value.bits(); break;
            case TermKind::App: sym = "f" + t->name; break;
            default: sym = "k" + std::to_string(static_cast<int>(t->kind)); break;
        }
        int id = static_cast<int>(nodes_.size());
        nodes_.push_back({sym, args});
        parent_.push_back(id);
        ids_.emplace(key, id);
        dirty_ = true;
        return id;
    }

    int find(int a) {
        while (parent_[a] != a) a = parent_[a] = parent_[parent_[a]];
        return a;
    }

    void merge(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent_[a] = b;
            dirty_ = true;
        }
    }

    void close() {
        while (dirty_) {
            dirty_ = false;
            std::map<std::pair<std::string, std::vector<int>>, int> sig;
            for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
                std::vector<int> args;
                for (int a : nodes_[i].args) args.push_back(find(a));
                auto [it, fresh] = sig.emplace(std::make_pair(nodes_[i].sym, args), i);
                if (!fresh && find(it->second) != find(i)) merge(it->second, i);
            }
        }
    }

private:
    struct Node {
        std::string sym;
        std::vector<int> args;
    };
    std::vector<Node> nodes_;
    std::vector<int> parent_;
    std::unordered_map<std::string, int> ids_;
    bool dirty_ = false;
};

struct Lit {
    bool pos;
    std::string pred;
    std::vector<TermP> args;
};

bool literals_close(const std::vector<Lit>& lits) {
    Congruence cc;
    std::vector<std::pair<bool, std::vector<int>>> ids;
    for (auto& l : lits) {
        std::vector<int> a;
        for (auto& t : l.args) a.push_back(cc.intern(t));
        ids.push_back({l.pos, a});
    }
    for (std::size_t i = 0; i < lits.size(); ++i)
        if (lits[i].pos && lits[i].pred == "=") cc.merge(ids[i].second[0], ids[i].second[1]);
    cc.close();
    std::map<std::string, std::vector<std::size_t>> pos, neg;
    for (std::size_t i = 0; i < lits.size(); ++i) {
        if (lits[i].pred == "=") {
            if (!lits[i].pos && cc.find(ids[i].second[0]) == cc.find(ids[i].second[1])) return true;
            continue;
        }
        (lits[i].pos ? pos : neg)[lits[i].pred].push_back(i);
    }
    for (auto& [p, is] : pos) {
        auto it = neg.find(p);
        if (it == neg.end()) continue;
        for (auto i : is)
            for (auto j : it->second) {
                auto& a = ids[i].second;
                auto& b = ids[j].second;
                if (a.size() != b.size()) continue;
                bool same_args = true;
                for (std::size_t k = 0; k < a.size() && same_args; ++k)
                    same_args = cc.find(a[k]) == cc.find(b[k]);
                if (same_args) return true;
            }
    }
    return false;
}

struct BudgetExceeded {};

class Tableau {
public:
    Tableau(const std::vector<TermP>& h, std::size_t budget) : herbrand_(h), budget_(budget) {}

    bool closes(const FormulaP& root) {
        Branch b;
        b.alpha.push_back(root);
        return expand(b);
    }

    std::size_t used() const { return used_; }

private:
    struct Branch {
        std::vector<FormulaP> alpha, beta, gamma;
        std::vector<Lit> lits;
        std::set<std::string> seen;
    };

    void tick() {
        if (++used_ > budget_) throw BudgetExceeded{};
    }

    bool expand(Branch& b) {
        while (true) {
            while (!b.alpha.empty()) {
                auto f = b.alpha.back();
                b.alpha.pop_back();
                tick();
                switch (f->kind) {
                    case FormulaKind::Top: break;
                    case FormulaKind::Bot: return true;
                    case FormulaKind::Atom:
                    case FormulaKind::NegAtom: {
                        auto key = (f->kind == FormulaKind::Atom ? "+" : "-") + alpha_key(f);
                        if (b.seen.insert(key).second)
                            b.lits.push_back({f->kind == FormulaKind::Atom, f->pred, f->args});
                        break;
                    }
                    case FormulaKind::And:
                        for (auto& k : f->kids) b.alpha.push_back(k);
                        break;
                    case FormulaKind::Or: b.beta.push_back(f); break;
                    case FormulaKind::All: b.gamma.push_back(f); break;
                    default: throw std::logic_error("tableau: unexpected connective");
                }
            }
            if (literals_close(b.lits)) return true;
            if (!b.gamma.empty()) {
                auto pending = std::move(b.gamma);
                b.gamma.clear();
                for (auto& g : pending)
                    for (auto& t : herbrand_) {
                        tick();
                        b.alpha.push_back(substitute(g->kids[0], g->var, t));
                    }
                continue;
            }
            if (b.beta.empty()) return false;
            auto f = b.beta.front();
            b.beta.erase(b.beta.begin());
            for (auto& k : f->kids) {
                Branch c = b;
                c.alpha.push_back(k);
                if (!expand(c)) return false;
            }
            return true;
        }
    }

    const std::vector<TermP>& herbrand_;
    std::size_t budget_;
    std::size_t used_ = 0;
};

// Finite model evaluation with every symbol uninterpreted.
struct FiniteModel {
    int n = 1;
    std::map<std::string, int> consts;
    std::map<std::pair<std::string, std::size_t>, std::vector<int>> funs;
    std::map<std::pair<std::string, std::size_t>, std::vector<int>> preds;
};

std::string fun_name(const TermP& t) {
    switch (t->kind) {
        case TermKind::App: return t->name;
        case TermKind::Succ: return "′";
        case TermKind::Add: return "+";
        case TermKind::Mul: return "×";
        case TermKind::Len: return "|·|";
        case TermKind::Pow2: return "2^";
        case TermKind::BitAt: return "[·]";
        case TermKind::Substr: return "[·]^";
        default: return "";
    }
}

int eval_model(const TermP& t, const FiniteModel& m, const std::map<std::string, int>& env) {
    if (t->kind == TermKind::Var) {
        auto it = env.find(t->name);
        if (it != env.end()) return it->second;
        return m.consts.at(t->name);
    }
    if (t->kind == TermKind::Const) return m.consts.at(t->value.bits());
    std::size_t idx = 0;
    for (auto& a : t->args) idx = idx * m.n + eval_model(a, m, env);
    return m.funs.at({fun_name(t), t->args.size()})[idx];
}

bool eval_model(const FormulaP& f, const FiniteModel& m, std::map<std::string, int>& env) {
    switch (f->kind) {
        case FormulaKind::Top: return true;
        case FormulaKind::Bot: return false;
        case FormulaKind::Atom:
        case FormulaKind::NegAtom: {
            bool v;
            if (f->pred == "=") {
                v = eval_model(f->args[0], m, env) == eval_model(f->args[1], m, env);
            } else {
                std::size_t idx = 0;
                for (auto& a : f->args) idx = idx * m.n + eval_model(a, m, env);
                v = m.preds.at({f->pred, f->args.size()})[idx] != 0;
            }
            return f->kind == FormulaKind::Atom ? v : !v;
        }
        case FormulaKind::And:
        case FormulaKind::CAnd:
            for (auto& k : f->kids)
                if (!eval_model(k, m, env)) return false;
            return true;
        case FormulaKind::Or:
        case FormulaKind::COr:
            for (auto& k : f->kids)
                if (eval_model(k, m, env)) return true;
            return false;
        default: {
            bool universal = f->kind == FormulaKind::All || f->kind == FormulaKind::CAll;
            auto saved = env.find(f->var) != env.end() ? std::optional<int>(env[f->var]) : std::nullopt;
            bool result = universal;
            for (int d = 0; d < m.n; ++d) {
                env[f->var] = d;
                if (eval_model(f->kids[0], m, env) != universal) {
                    result = !universal;
                    break;
                }
            }
            if (saved) env[f->var] = *saved; else env.erase(f->var);
            return result;
        }
    }
}

struct ModelSignature {
    std::set<std::string> consts;
    std::set<std::pair<std::string, std::size_t>> funs, preds;
};

void model_signature(const TermP& t, const std::set<std::string>& bound, ModelSignature& s) {
    if (t->kind == TermKind::Var) {
        if (!bound.count(t->name)) s.consts.insert(t->name);
        return;
    }
    if (t->kind == TermKind::Const) {
        s.consts.insert(t->value.bits());
        return;
    }
    s.funs.insert({fun_name(t), t->args.size()});
    for (auto& a : t->args) model_signature(a, bound, s);
}

void model_signature(const FormulaP& f, std::set<std::string>& bound, ModelSignature& s) {
    if (is_literal(f->kind)) {
        if (f->pred != "=") s.preds.insert({f->pred, f->args.size()});
        for (auto& a : f->args) model_signature(a, bound, s);
        return;
    }
    if (is_quantifier(f->kind)) {
        bool fresh = bound.insert(f->var).second;
        model_signature(f->kids[0], bound, s);
        if (fresh) bound.erase(f->var);
        return;
    }
    for (auto& k : f->kids) model_signature(k, bound, s);
}

std::size_t ipow(std::size_t b, std::size_t e) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < e; ++i) r *= b;
    return r;
}

std::string describe(const FiniteModel& m) {
    std::string out = "domain {0.." + std::to_string(m.n - 1) + "}";
    for (auto& [c, v] : m.consts) out += "; " + c + "=" + std::to_string(v);
    auto table = [&](const std::string& name, const std::vector<int>& vals) {
        out += "; " + name + "=[";
        for (std::size_t i = 0; i < vals.size(); ++i) out += (i ? "," : "") + std::to_string(vals[i]);
        out += "]";
    };
    for (auto& [k, v] : m.funs) table(k.first, v);
    for (auto& [k, v] : m.preds) table(k.first, v);
    return out;
}

}  // namespace

std::optional<std::string> find_countermodel(const FormulaP& phi, int max_size, std::size_t budget) {
    ModelSignature sig;
    std::set<std::string> bound;
    model_signature(phi, bound, sig);
    std::size_t spent = 0;
    for (int n = 1; n <= max_size; ++n) {
        // Odometer over all table cells: constants, function values, predicate bits.
        std::vector<int> radix;
        for (std::size_t i = 0; i < sig.consts.size(); ++i) radix.push_back(n);
        for (auto& f : sig.funs)
            for (std::size_t i = 0; i < ipow(n, f.second); ++i) radix.push_back(n);
        for (auto& p : sig.preds)
            for (std::size_t i = 0; i < ipow(n, p.second); ++i) radix.push_back(2);
        std::vector<int> digit(radix.size(), 0);
        while (true) {
            if (++spent > budget) return std::nullopt;
            FiniteModel m;
            m.n = n;
            std::size_t k = 0;
            for (auto& c : sig.consts) m.consts[c] = digit[k++];
            for (auto& f : sig.funs) {
                auto& tab = m.funs[f];
                for (std::size_t i = 0; i < ipow(n, f.second); ++i) tab.push_back(digit[k++]);
            }
            for (auto& p : sig.preds) {
                auto& tab = m.preds[p];
                for (std::size_t i = 0; i < ipow(n, p.second); ++i) tab.push_back(digit[k++]);
            }
            std::map<std::string, int> env;
            if (!eval_model(phi, m, env)) return describe(m);
            std::size_t i = 0;
            while (i < digit.size() && ++digit[i] == radix[i]) digit[i++] = 0;
            if (i == digit.size()) break;
        }
    }
    return std::nullopt;
}

ProverResult prove_valid(const FormulaP& phi, const ProverBudget& b) {
    ProverResult r;
    auto psi = refutation_target(phi);
    std::size_t remaining = b.nodes;
    for (int d = 0; d <= b.max_depth; ++d) {
        bool truncated = false;
        auto h = herbrand_terms(psi, d, b.max_terms, truncated);
        Tableau t(h, remaining);
        try {
            bool closed = t.closes(psi);
            r.nodes_used += t.used();
            remaining -= t.used();
            if (closed) {
                r.verdict = Validity::Valid;
                for (auto& term : h)
                    if (term->kind != TermKind::Var || term->name != "%c")
                        r.certificate.push_back(print(term, Style::Ascii));
                return r;
            }
        } catch (const BudgetExceeded&) {
            r.nodes_used += t.used();
            return r;
        }
        if (truncated) break;
    }
    return r;
}

bool replay_certificate(const FormulaP& phi, const std::vector<std::string>& terms,
                        std::size_t node_budget) {
    auto psi = refutation_target(phi);
    std::vector<TermP> h;
    for (auto& s : terms) h.push_back(parse_term(s));
    if (h.empty()) h.push_back(var("%c"));
    Tableau t(h, node_budget);
    try {
        return t.closes(psi);
    } catch (const BudgetExceeded&) {
        return false;
    }
}

ProverResult decide_validity(const FormulaP& phi, const ProverBudget& b) {
    auto r = prove_valid(phi, b);
    if (r.verdict == Validity::Valid) return r;
    if (auto cm = find_countermodel(phi, b.max_model_size, b.model_budget)) {
        r.verdict = Validity::Refuted;
        r.countermodel = *cm;
    }
    return r;
}

}  // namespace clarith
