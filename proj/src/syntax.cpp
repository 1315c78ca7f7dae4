#include "clarith/syntax.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace clarith {

SyntaxError::SyntaxError(const std::string& msg, std::size_t off)
    : std::runtime_error(msg + " at offset " + std::to_string(off)), offset(off) {}

namespace {

TermP mk(TermKind k, std::string name, Natural v, std::vector<TermP> args) {
    return std::make_shared<const Term>(Term{k, std::move(name), std::move(v), std::move(args)});
}

FormulaP mkf(FormulaKind k, std::string pred = {}, std::vector<TermP> args = {},
             std::vector<FormulaP> kids = {}, std::string v = {}) {
    return std::make_shared<const Formula>(
        Formula{k, std::move(pred), std::move(args), std::move(kids), std::move(v)});
}

}  // namespace

TermP var(std::string name) { return mk(TermKind::Var, std::move(name), {}, {}); }
TermP num(Natural n) { return mk(TermKind::Const, {}, std::move(n), {}); }
TermP succ(TermP t) { return mk(TermKind::Succ, {}, {}, {std::move(t)}); }
TermP add(TermP a, TermP b) { return mk(TermKind::Add, {}, {}, {std::move(a), std::move(b)}); }
TermP mul(TermP a, TermP b) { return mk(TermKind::Mul, {}, {}, {std::move(a), std::move(b)}); }
TermP app(std::string f, std::vector<TermP> args) {
    return mk(TermKind::App, std::move(f), {}, std::move(args));
}
TermP len(TermP t) { return mk(TermKind::Len, {}, {}, {std::move(t)}); }
TermP pow2(TermP t) { return mk(TermKind::Pow2, {}, {}, {std::move(t)}); }
TermP bit_at(TermP x, TermP y) { return mk(TermKind::BitAt, {}, {}, {std::move(x), std::move(y)}); }
TermP substr(TermP x, TermP y, TermP z) {
    return mk(TermKind::Substr, {}, {}, {std::move(x), std::move(y), std::move(z)});
}
TermP bit0(TermP t) { return mul(succ(succ(num(0))), std::move(t)); }
TermP bit1(TermP t) { return succ(bit0(std::move(t))); }

FormulaP top() {
    static const FormulaP t = mkf(FormulaKind::Top);
    return t;
}
FormulaP bot() {
    static const FormulaP b = mkf(FormulaKind::Bot);
    return b;
}
FormulaP atom(std::string pred, std::vector<TermP> args) {
    return mkf(FormulaKind::Atom, std::move(pred), std::move(args));
}
FormulaP eq(TermP a, TermP b) { return atom("=", {std::move(a), std::move(b)}); }
FormulaP neq(TermP a, TermP b) { return negate(eq(std::move(a), std::move(b))); }

FormulaP junction(FormulaKind k, std::vector<FormulaP> kids) {
    if (!is_junction(k)) throw std::invalid_argument("not a junction kind");
    if (kids.size() < 2) throw std::invalid_argument("junction needs two or more components");
    return mkf(k, {}, {}, std::move(kids));
}
FormulaP conj(std::vector<FormulaP> kids) { return junction(FormulaKind::And, std::move(kids)); }
FormulaP disj(std::vector<FormulaP> kids) { return junction(FormulaKind::Or, std::move(kids)); }
FormulaP cconj(std::vector<FormulaP> kids) { return junction(FormulaKind::CAnd, std::move(kids)); }
FormulaP cdisj(std::vector<FormulaP> kids) { return junction(FormulaKind::COr, std::move(kids)); }

FormulaP quant(FormulaKind k, std::string v, FormulaP body) {
    if (!is_quantifier(k)) throw std::invalid_argument("not a quantifier kind");
    return mkf(k, {}, {}, {std::move(body)}, std::move(v));
}

FormulaP implies(FormulaP a, FormulaP b) { return disj({negate(a), std::move(b)}); }

bool is_junction(FormulaKind k) {
    return k == FormulaKind::And || k == FormulaKind::Or || k == FormulaKind::CAnd ||
           k == FormulaKind::COr;
}
bool is_quantifier(FormulaKind k) {
    return k == FormulaKind::All || k == FormulaKind::Ex || k == FormulaKind::CAll ||
           k == FormulaKind::CEx;
}
bool is_choice(FormulaKind k) {
    return k == FormulaKind::CAnd || k == FormulaKind::COr || k == FormulaKind::CAll ||
           k == FormulaKind::CEx;
}
bool is_literal(FormulaKind k) { return k == FormulaKind::Atom || k == FormulaKind::NegAtom; }

static FormulaKind dual(FormulaKind k) {
    switch (k) {
        case FormulaKind::Top: return FormulaKind::Bot;
        case FormulaKind::Bot: return FormulaKind::Top;
        case FormulaKind::Atom: return FormulaKind::NegAtom;
        case FormulaKind::NegAtom: return FormulaKind::Atom;
        case FormulaKind::And: return FormulaKind::Or;
        case FormulaKind::Or: return FormulaKind::And;
        case FormulaKind::CAnd: return FormulaKind::COr;
        case FormulaKind::COr: return FormulaKind::CAnd;
        case FormulaKind::All: return FormulaKind::Ex;
        case FormulaKind::Ex: return FormulaKind::All;
        case FormulaKind::CAll: return FormulaKind::CEx;
        case FormulaKind::CEx: return FormulaKind::CAll;
    }
    return k;
}

FormulaP negate(const FormulaP& f) {
    switch (f->kind) {
        case FormulaKind::Top: return bot();
        case FormulaKind::Bot: return top();
        case FormulaKind::Atom:
        case FormulaKind::NegAtom: return mkf(dual(f->kind), f->pred, f->args);
        default: break;
    }
    std::vector<FormulaP> kids;
    kids.reserve(f->kids.size());
    for (auto& k : f->kids) kids.push_back(negate(k));
    return mkf(dual(f->kind), {}, {}, std::move(kids), f->var);
}

bool same_term(const TermP& a, const TermP& b) {
    if (a == b) return true;
    if (a->kind != b->kind || a->name != b->name || a->args.size() != b->args.size()) return false;
    if (a->kind == TermKind::Const && !(a->value == b->value)) return false;
    for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!same_term(a->args[i], b->args[i])) return false;
    return true;
}

bool same(const FormulaP& a, const FormulaP& b) {
    if (a == b) return true;
    if (a->kind != b->kind || a->pred != b->pred || a->var != b->var ||
        a->args.size() != b->args.size() || a->kids.size() != b->kids.size())
        return false;
    for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!same_term(a->args[i], b->args[i])) return false;
    for (std::size_t i = 0; i < a->kids.size(); ++i)
        if (!same(a->kids[i], b->kids[i])) return false;
    return true;
}

namespace {

void key_term(const TermP& t, const std::vector<std::string>& bound, std::string& out) {
    switch (t->kind) {
        case TermKind::Var: {
            for (std::size_t i = bound.size(); i-- > 0;) {
                if (bound[i] == t->name) {
                    out += '#';
                    out += std::to_string(bound.size() - 1 - i);
                    return;
                }
            }
            out += 'v';
            out += t->name;
            return;
        }
        case TermKind::Const: out += 'c'; out += t->value.bits(); return;
        case TermKind::Succ: out += 'S'; break;
        case TermKind::Add: out += '+'; break;
        case TermKind::Mul: out += '*'; break;
        case TermKind::App: out += 'f'; out += t->name; break;
        case TermKind::Len: out += 'L'; break;
        case TermKind::Pow2: out += 'P'; break;
        case TermKind::BitAt: out += 'B'; break;
        case TermKind::Substr: out += 'Z'; break;
    }
    out += '(';
    for (std::size_t i = 0; i < t->args.size(); ++i) {
        if (i) out += ',';
        key_term(t->args[i], bound, out);
    }
    out += ')';
}

void key_formula(const FormulaP& f, std::vector<std::string>& bound, std::string& out) {
    static const char* tags = "TBAN&|ao!?UE";
    out += tags[static_cast<int>(f->kind)];
    if (is_literal(f->kind)) {
        out += f->pred;
        out += '(';
        for (std::size_t i = 0; i < f->args.size(); ++i) {
            if (i) out += ',';
            key_term(f->args[i], bound, out);
        }
        out += ')';
        return;
    }
    if (is_quantifier(f->kind)) {
        bound.push_back(f->var);
        out += '(';
        key_formula(f->kids[0], bound, out);
        out += ')';
        bound.pop_back();
        return;
    }
    if (is_junction(f->kind)) {
        out += '(';
        for (std::size_t i = 0; i < f->kids.size(); ++i) {
            if (i) out += ',';
            key_formula(f->kids[i], bound, out);
        }
        out += ')';
    }
}

}  // namespace

std::string alpha_key(const FormulaP& f) {
    std::vector<std::string> bound;
    std::string out;
    key_formula(f, bound, out);
    return out;
}

std::string term_key(const TermP& t) {
    std::string out;
    key_term(t, {}, out);
    return out;
}

bool alpha_equal(const FormulaP& a, const FormulaP& b) { return alpha_key(a) == alpha_key(b); }

namespace {

void fv_term(const TermP& t, std::set<std::string>& out) {
    if (t->kind == TermKind::Var) out.insert(t->name);
    for (auto& a : t->args) fv_term(a, out);
}

void fv_formula(const FormulaP& f, std::vector<std::string>& bound, std::set<std::string>& out) {
    if (is_literal(f->kind)) {
        std::set<std::string> vs;
        for (auto& a : f->args) fv_term(a, vs);
        for (auto& v : vs)
            if (std::find(bound.begin(), bound.end(), v) == bound.end()) out.insert(v);
        return;
    }
    if (is_quantifier(f->kind)) {
        bound.push_back(f->var);
        fv_formula(f->kids[0], bound, out);
        bound.pop_back();
        return;
    }
    for (auto& k : f->kids) fv_formula(k, bound, out);
}

void bv_formula(const FormulaP& f, std::set<std::string>& out) {
    if (is_quantifier(f->kind)) out.insert(f->var);
    for (auto& k : f->kids) bv_formula(k, out);
}

}  // namespace

std::set<std::string> free_vars(const TermP& t) {
    std::set<std::string> out;
    fv_term(t, out);
    return out;
}

std::set<std::string> free_vars(const FormulaP& f) {
    std::set<std::string> out;
    std::vector<std::string> bound;
    fv_formula(f, bound, out);
    return out;
}

std::set<std::string> bound_vars(const FormulaP& f) {
    std::set<std::string> out;
    bv_formula(f, out);
    return out;
}

std::set<std::string> all_vars(const FormulaP& f) {
    auto out = free_vars(f);
    auto b = bound_vars(f);
    out.insert(b.begin(), b.end());
    return out;
}

std::set<std::string> free_vars(const Sequent& s) {
    std::set<std::string> out = free_vars(s.succ);
    for (auto& a : s.ante) {
        auto v = free_vars(a);
        out.insert(v.begin(), v.end());
    }
    return out;
}

std::set<std::string> all_vars(const Sequent& s) {
    std::set<std::string> out = all_vars(s.succ);
    for (auto& a : s.ante) {
        auto v = all_vars(a);
        out.insert(v.begin(), v.end());
    }
    return out;
}

bool is_ground(const TermP& t) {
    if (t->kind == TermKind::Var) return false;
    for (auto& a : t->args)
        if (!is_ground(a)) return false;
    return true;
}

TermP substitute(const TermP& t, const std::map<std::string, TermP>& sub) {
    if (t->kind == TermKind::Var) {
        auto it = sub.find(t->name);
        return it == sub.end() ? t : it->second;
    }
    if (t->args.empty()) return t;
    bool changed = false;
    std::vector<TermP> args;
    args.reserve(t->args.size());
    for (auto& a : t->args) {
        args.push_back(substitute(a, sub));
        changed |= args.back() != a;
    }
    if (!changed) return t;
    return mk(t->kind, t->name, t->value, std::move(args));
}

namespace {

FormulaP subst_rec(const FormulaP& f, const std::map<std::string, TermP>& sub,
                   const std::map<std::string, std::set<std::string>>& term_vars,
                   std::vector<std::string>& bound) {
    if (f->kind == FormulaKind::Top || f->kind == FormulaKind::Bot) return f;
    if (is_literal(f->kind)) {
        std::map<std::string, TermP> active;
        for (auto& [x, t] : sub) {
            if (std::find(bound.begin(), bound.end(), x) != bound.end()) continue;
            active.emplace(x, t);
        }
        if (active.empty()) return f;
        std::set<std::string> here;
        for (auto& a : f->args) fv_term(a, here);
        for (auto& [x, t] : active) {
            if (!here.count(x)) continue;
            for (auto& v : term_vars.at(x))
                if (std::find(bound.begin(), bound.end(), v) != bound.end())
                    throw CaptureError("substituting for " + x + " would capture " + v);
        }
        std::vector<TermP> args;
        bool changed = false;
        for (auto& a : f->args) {
            args.push_back(substitute(a, active));
            changed |= args.back() != a;
        }
        if (!changed) return f;
        return mkf(f->kind, f->pred, std::move(args));
    }
    if (is_quantifier(f->kind)) {
        bound.push_back(f->var);
        auto body = subst_rec(f->kids[0], sub, term_vars, bound);
        bound.pop_back();
        if (body == f->kids[0]) return f;
        return mkf(f->kind, {}, {}, {body}, f->var);
    }
    std::vector<FormulaP> kids;
    bool changed = false;
    for (auto& k : f->kids) {
        kids.push_back(subst_rec(k, sub, term_vars, bound));
        changed |= kids.back() != k;
    }
    if (!changed) return f;
    return mkf(f->kind, {}, {}, std::move(kids), f->var);
}

}  // namespace

FormulaP substitute(const FormulaP& f, const std::map<std::string, TermP>& sub) {
    std::map<std::string, std::set<std::string>> term_vars;
    for (auto& [x, t] : sub) term_vars[x] = free_vars(t);
    std::vector<std::string> bound;
    return subst_rec(f, sub, term_vars, bound);
}

FormulaP substitute(const FormulaP& f, const std::string& x, const TermP& t) {
    return substitute(f, std::map<std::string, TermP>{{x, t}});
}

FormulaP rename_free(const FormulaP& f, const std::string& x, const std::string& y) {
    return substitute(f, x, var(y));
}

FormulaP elementarize(const FormulaP& f) {
    switch (f->kind) {
        case FormulaKind::CAnd:
        case FormulaKind::CAll: return top();
        case FormulaKind::COr:
        case FormulaKind::CEx: return bot();
        case FormulaKind::Top:
        case FormulaKind::Bot:
        case FormulaKind::Atom:
        case FormulaKind::NegAtom: return f;
        default: break;
    }
    std::vector<FormulaP> kids;
    bool changed = false;
    for (auto& k : f->kids) {
        kids.push_back(elementarize(k));
        changed |= kids.back() != k;
    }
    if (!changed) return f;
    return mkf(f->kind, {}, {}, std::move(kids), f->var);
}

FormulaP elementarize(const Sequent& s) {
    auto rhs = elementarize(s.succ);
    if (s.ante.empty()) return rhs;
    std::vector<FormulaP> left;
    for (auto& a : s.ante) left.push_back(elementarize(a));
    FormulaP l = left.size() == 1 ? left[0] : conj(left);
    return implies(l, rhs);
}

bool is_elementary(const FormulaP& f) {
    if (is_choice(f->kind)) return false;
    for (auto& k : f->kids)
        if (!is_elementary(k)) return false;
    return true;
}

namespace {

void surface_rec(const FormulaP& f, OccPath& p, std::vector<std::pair<OccPath, FormulaP>>& out) {
    out.emplace_back(p, f);
    if (is_choice(f->kind)) return;
    for (std::size_t i = 0; i < f->kids.size(); ++i) {
        p.push_back(static_cast<int>(i));
        surface_rec(f->kids[i], p, out);
        p.pop_back();
    }
}

}  // namespace

std::vector<std::pair<OccPath, FormulaP>> surface_occurrences(const FormulaP& f) {
    std::vector<std::pair<OccPath, FormulaP>> out;
    OccPath p;
    surface_rec(f, p, out);
    return out;
}

bool is_surface_path(const FormulaP& f, const OccPath& p) {
    FormulaP cur = f;
    for (int i : p) {
        if (is_choice(cur->kind)) return false;
        if (i < 0 || static_cast<std::size_t>(i) >= cur->kids.size()) return false;
        cur = cur->kids[i];
    }
    return true;
}

FormulaP subformula_at(const FormulaP& f, const OccPath& p) {
    if (!is_surface_path(f, p)) throw std::invalid_argument("not a surface path: " + path_string(p));
    FormulaP cur = f;
    for (int i : p) cur = cur->kids[i];
    return cur;
}

namespace {

FormulaP replace_rec(const FormulaP& f, const OccPath& p, std::size_t d, const FormulaP& h) {
    if (d == p.size()) return h;
    auto kids = f->kids;
    kids[p[d]] = replace_rec(f->kids[p[d]], p, d + 1, h);
    return mkf(f->kind, f->pred, f->args, std::move(kids), f->var);
}

}  // namespace

FormulaP replace_at(const FormulaP& f, const OccPath& p, const FormulaP& h) {
    if (!is_surface_path(f, p)) throw std::invalid_argument("not a surface path: " + path_string(p));
    return replace_rec(f, p, 0, h);
}

std::string path_string(const OccPath& p) {
    std::string out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) out += '.';
        out += std::to_string(p[i]);
    }
    return out;
}

OccPath parse_path(const std::string& s) {
    OccPath p;
    if (s.empty()) return p;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, '.')) {
        if (part.empty() || !std::all_of(part.begin(), part.end(), ::isdigit))
            throw std::invalid_argument("bad path: " + s);
        p.push_back(std::stoi(part));
    }
    return p;
}

FormulaP closure(const FormulaP& f, ClosureKind kind) {
    auto fv = free_vars(f);
    FormulaP out = f;
    FormulaKind q = kind == ClosureKind::Choice ? FormulaKind::CAll : FormulaKind::All;
    for (auto it = fv.rbegin(); it != fv.rend(); ++it) out = quant(q, *it, out);
    return out;
}

namespace {

bool is_size_combination(const TermP& t, const std::string& x) {
    switch (t->kind) {
        case TermKind::Const: return true;
        case TermKind::Succ:
        case TermKind::Add:
        case TermKind::Mul:
            for (auto& a : t->args)
                if (!is_size_combination(a, x)) return false;
            return true;
        case TermKind::Len:
            return t->args[0]->kind == TermKind::Var && t->args[0]->name != x;
        default: return false;
    }
}

bool unbounded_rec(const FormulaP& f, OccPath& p) {
    if (f->kind == FormulaKind::CAll || f->kind == FormulaKind::CEx) {
        const auto& body = f->kids[0];
        bool ok;
        if (f->kind == FormulaKind::CAll) {
            ok = body->kind == FormulaKind::Or && body->kids.size() == 2 &&
                 is_sizebound(negate(body->kids[0]), f->var);
        } else {
            ok = body->kind == FormulaKind::And && is_sizebound(body->kids[0], f->var);
        }
        if (!ok) return true;
    }
    for (std::size_t i = 0; i < f->kids.size(); ++i) {
        p.push_back(static_cast<int>(i));
        if (unbounded_rec(f->kids[i], p)) return true;
        p.pop_back();
    }
    return false;
}

}  // namespace

bool is_sizebound(const FormulaP& s, const std::string& x) {
    if (s->kind != FormulaKind::Atom || s->pred != "<=" || s->args.size() != 2) return false;
    const auto& l = s->args[0];
    if (l->kind != TermKind::Len || l->args[0]->kind != TermKind::Var || l->args[0]->name != x)
        return false;
    return is_size_combination(s->args[1], x);
}

std::optional<OccPath> unbounded_quantifier(const FormulaP& f) {
    OccPath p;
    if (unbounded_rec(f, p)) return p;
    return std::nullopt;
}

bool is_polynomially_bounded(const FormulaP& f) { return !unbounded_quantifier(f).has_value(); }

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
    std::string stem = base;
    auto us = stem.rfind('_');
    if (us != std::string::npos && us + 1 < stem.size() &&
        std::all_of(stem.begin() + us + 1, stem.end(), ::isdigit))
        stem = stem.substr(0, us);
    if (!avoid.count(stem)) return stem;
    for (int i = 1;; ++i) {
        std::string cand = stem + "_" + std::to_string(i);
        if (!avoid.count(cand)) return cand;
    }
}

namespace {

FormulaP hyg_rec(const FormulaP& f, std::set<std::string>& avoid, std::vector<std::string>& bound) {
    if (is_literal(f->kind) || f->kind == FormulaKind::Top || f->kind == FormulaKind::Bot)
        return f;
    if (is_quantifier(f->kind)) {
        std::string v = f->var;
        FormulaP body = f->kids[0];
        bool clash = avoid.count(v) > 0 ||
                     std::find(bound.begin(), bound.end(), v) != bound.end();
        if (clash) {
            std::set<std::string> all = avoid;
            all.insert(bound.begin(), bound.end());
            auto inner = all_vars(body);
            all.insert(inner.begin(), inner.end());
            std::string nv = fresh_name(v, all);
            body = rename_free(body, v, nv);
            v = nv;
        }
        bound.push_back(v);
        auto nb = hyg_rec(body, avoid, bound);
        bound.pop_back();
        if (v == f->var && nb == f->kids[0]) return f;
        return quant(f->kind, v, nb);
    }
    std::vector<FormulaP> kids;
    bool changed = false;
    for (auto& k : f->kids) {
        kids.push_back(hyg_rec(k, avoid, bound));
        changed |= kids.back() != k;
    }
    if (!changed) return f;
    return junction(f->kind, std::move(kids));
}

}  // namespace

FormulaP hygienic(const FormulaP& f, const std::set<std::string>& reserved_free) {
    std::set<std::string> avoid = reserved_free;
    auto fv = free_vars(f);
    avoid.insert(fv.begin(), fv.end());
    std::vector<std::string> bound;
    return hyg_rec(f, avoid, bound);
}

Sequent hygienic(const Sequent& s) {
    auto fv = free_vars(s);
    Sequent out;
    for (auto& a : s.ante) out.ante.push_back(hygienic(a, fv));
    out.succ = hygienic(s.succ, fv);
    return out;
}

bool is_hygienic(const Sequent& s) {
    auto fv = free_vars(s);
    auto check = [&](const FormulaP& f) {
        std::function<bool(const FormulaP&, std::vector<std::string>&)> rec =
            [&](const FormulaP& g, std::vector<std::string>& bound) {
                if (is_quantifier(g->kind)) {
                    if (fv.count(g->var) ||
                        std::find(bound.begin(), bound.end(), g->var) != bound.end())
                        return false;
                    bound.push_back(g->var);
                    bool ok = rec(g->kids[0], bound);
                    bound.pop_back();
                    return ok;
                }
                for (auto& k : g->kids)
                    if (!rec(k, bound)) return false;
                return true;
            };
        std::vector<std::string> bound;
        return rec(f, bound);
    };
    for (auto& a : s.ante)
        if (!check(a)) return false;
    return check(s.succ);
}

int negation_count(const FormulaP& f) {
    if (f->kind == FormulaKind::NegAtom) return 1;
    int n = 0;
    for (auto& k : f->kids) n += negation_count(k);
    return n;
}

std::size_t formula_size(const FormulaP& f) {
    std::size_t n = 1;
    for (auto& k : f->kids) n += formula_size(k);
    return n;
}

}  // namespace clarith
