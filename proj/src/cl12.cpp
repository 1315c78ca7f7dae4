#include "clarith/cl12.hpp"

#include "clarith/text.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace clarith {

const char* rule_name(Rule r) {
    switch (r) {
        case Rule::Wait: return "Wait";
        case Rule::OrChoose: return "OrChoose";
        case Rule::AndChoose: return "AndChoose";
        case Rule::ExistsChoose: return "ExistsChoose";
        case Rule::AllChoose: return "AllChoose";
        case Rule::Replicate: return "Replicate";
    }
    return "?";
}

std::optional<Rule> parse_rule_name(std::string_view s) {
    static const std::vector<std::pair<std::string_view, Rule>> names = {
        {"Wait", Rule::Wait},
        {"OrChoose", Rule::OrChoose},
        {"⊔-Choose", Rule::OrChoose},
        {"AndChoose", Rule::AndChoose},
        {"⊓-Choose", Rule::AndChoose},
        {"ExistsChoose", Rule::ExistsChoose},
        {"⊔x-Choose", Rule::ExistsChoose},
        {"AllChoose", Rule::AllChoose},
        {"⊓x-Choose", Rule::AllChoose},
        {"Replicate", Rule::Replicate},
    };
    for (auto& [n, r] : names)
        if (n == s) return r;
    return std::nullopt;
}

ProofFormatError::ProofFormatError(const std::string& msg, int l)
    : std::runtime_error("line " + std::to_string(l) + ": " + msg), line(l) {}

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::vector<std::string> load_certificate(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read certificate " + path);
    std::vector<std::string> terms;
    std::string line;
    while (std::getline(in, line)) {
        auto t = trim(line);
        if (!t.empty() && t[0] != '#') terms.push_back(t);
    }
    return terms;
}

}  // namespace

Cl12Proof parse_cl12(std::string_view text, const std::string& base_dir) {
    Cl12Proof proof;
    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        auto line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        auto fields = split(line, ';');
        if (fields.size() < 2) throw ProofFormatError("expected '<n>. <sequent> ; <rule>'", lineno);
        Cl12Line l;
        auto dot = fields[0].find('.');
        if (dot == std::string::npos) throw ProofFormatError("missing line number", lineno);
        try {
            l.number = std::stoi(fields[0].substr(0, dot));
        } catch (const std::exception&) {
            throw ProofFormatError("bad line number", lineno);
        }
        try {
            l.sequent = parse_sequent(fields[0].substr(dot + 1));
        } catch (const SyntaxError& e) {
            throw ProofFormatError(e.what(), lineno);
        }
        auto colon = fields[1].find(':');
        auto rname = trim(fields[1].substr(0, colon));
        auto rule = parse_rule_name(rname);
        if (!rule) throw ProofFormatError("unknown rule '" + rname + "'", lineno);
        l.rule = *rule;
        if (colon != std::string::npos) {
            for (auto& kv : split(fields[1].substr(colon + 1), ',')) {
                if (kv.empty()) continue;
                auto eqp = kv.find('=');
                if (eqp == std::string::npos) throw ProofFormatError("bad parameter '" + kv + "'", lineno);
                l.params[trim(kv.substr(0, eqp))] = trim(kv.substr(eqp + 1));
            }
        }
        for (std::size_t i = 2; i < fields.size(); ++i) {
            auto& f = fields[i];
            if (f.rfind("premises=", 0) == 0) {
                for (auto& p : split(f.substr(9), ',')) {
                    if (p.empty()) continue;
                    try {
                        l.premises.push_back(std::stoi(p));
                    } catch (const std::exception&) {
                        throw ProofFormatError("bad premise '" + p + "'", lineno);
                    }
                }
            } else if (f.rfind("evidence=", 0) == 0) {
                auto ev = f.substr(9);
                if (ev == "builtin") {
                    l.evidence.kind = Evidence::Builtin;
                } else if (ev.rfind("cert:", 0) == 0) {
                    l.evidence.kind = Evidence::Certificate;
                    l.evidence.ref = ev.substr(5);
                    auto path = base_dir.empty() || l.evidence.ref.front() == '/'
                                    ? l.evidence.ref
                                    : base_dir + "/" + l.evidence.ref;
                    l.evidence.terms = load_certificate(path);
                } else if (ev.rfind("trusted:", 0) == 0) {
                    l.evidence.kind = Evidence::Trusted;
                    l.evidence.ref = ev.substr(8);
                } else {
                    throw ProofFormatError("bad evidence '" + ev + "'", lineno);
                }
            } else if (!f.empty()) {
                throw ProofFormatError("unexpected field '" + f + "'", lineno);
            }
        }
        proof.lines.push_back(std::move(l));
    }
    if (proof.lines.empty()) throw ProofFormatError("empty proof", lineno);
    return proof;
}

std::string format_line(const Cl12Line& l) {
    std::string out = std::to_string(l.number) + ". " + print(l.sequent) + " ; " + rule_name(l.rule);
    if (!l.params.empty()) {
        out += ":";
        bool first = true;
        for (auto& [k, v] : l.params) {
            out += (first ? "" : ",") + k + "=" + v;
            first = false;
        }
    }
    if (!l.premises.empty()) {
        out += " ; premises=";
        for (std::size_t i = 0; i < l.premises.size(); ++i)
            out += (i ? "," : "") + std::to_string(l.premises[i]);
    }
    if (l.evidence.kind == Evidence::Certificate) out += " ; evidence=cert:" + l.evidence.ref;
    if (l.evidence.kind == Evidence::Trusted) out += " ; evidence=trusted:" + l.evidence.ref;
    return out;
}

std::string format_cl12(const Cl12Proof& p) {
    std::string out;
    for (auto& l : p.lines) out += format_line(l) + "\n";
    return out;
}

std::string Cl12Report::summary() const {
    if (ok) return "ok, " + std::to_string(lines.size()) + " lines, " + std::to_string(trusted_steps) + " trusted";
    return "rejected at line index " + std::to_string(first_bad) + ": " +
           (first_bad >= 0 ? lines[first_bad].violation : std::string("?"));
}

ProverResult StabilityOracle::decide(const FormulaP& elementary) {
    auto key = alpha_key(elementary);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    auto r = decide_validity(elementary, budget_);
    cache_.emplace(key, r);
    return r;
}

std::string sequent_key(const Sequent& s) {
    std::vector<std::string> keys;
    for (auto& a : s.ante) keys.push_back(alpha_key(a));
    std::sort(keys.begin(), keys.end());
    std::string out;
    for (auto& k : keys) out += k + " , ";
    return out + "=> " + alpha_key(s.succ);
}

std::optional<std::vector<int>> match_sequent(const Sequent& want, const Sequent& have) {
    if (want.ante.size() != have.ante.size()) return std::nullopt;
    if (!alpha_equal(want.succ, have.succ)) return std::nullopt;
    std::vector<std::string> wk;
    for (auto& a : want.ante) wk.push_back(alpha_key(a));
    std::vector<bool> used(wk.size(), false);
    std::vector<int> map;
    for (auto& a : have.ante) {
        auto k = alpha_key(a);
        bool found = false;
        for (std::size_t i = 0; i < wk.size(); ++i)
            if (!used[i] && wk[i] == k) {
                used[i] = true;
                map.push_back(static_cast<int>(i));
                found = true;
                break;
            }
        if (!found) return std::nullopt;
    }
    return map;
}

namespace {

const FormulaP& side_formula(const Sequent& s, int side) {
    return side < 0 ? s.succ : s.ante[side];
}

Sequent with_side(const Sequent& s, int side, const FormulaP& f) {
    Sequent out = s;
    if (side < 0) out.succ = f; else out.ante[side] = f;
    return out;
}

std::string side_string(int side) { return side < 0 ? "s" : "a" + std::to_string(side); }

std::optional<int> parse_side(const std::string& s) {
    if (s == "s") return -1;
    if (s.size() > 1 && s[0] == 'a' && std::all_of(s.begin() + 1, s.end(), ::isdigit))
        return std::stoi(s.substr(1));
    return std::nullopt;
}

std::optional<TermP> instance_term(const TermP& h, const std::string& x, const TermP& g) {
    if (h->kind == TermKind::Var && h->name == x) return g;
    if (h->kind != g->kind || h->args.size() != g->args.size()) return std::nullopt;
    for (std::size_t i = 0; i < h->args.size(); ++i)
        if (auto t = instance_term(h->args[i], x, g->args[i])) return t;
    return std::nullopt;
}

// First term of G sitting where H has a free x; checked afterwards by rebuilding.
std::optional<TermP> instance_term(const FormulaP& h, const std::string& x, const FormulaP& g) {
    if (h->kind != g->kind || h->args.size() != g->args.size() || h->kids.size() != g->kids.size())
        return std::nullopt;
    if (is_quantifier(h->kind) && h->var == x) return std::nullopt;
    for (std::size_t i = 0; i < h->args.size(); ++i)
        if (auto t = instance_term(h->args[i], x, g->args[i])) return t;
    for (std::size_t i = 0; i < h->kids.size(); ++i)
        if (auto t = instance_term(h->kids[i], x, g->kids[i])) return t;
    return std::nullopt;
}

std::set<std::string> sequent_bound_vars(const Sequent& s) {
    std::set<std::string> out = bound_vars(s.succ);
    for (auto& a : s.ante) {
        auto b = bound_vars(a);
        out.insert(b.begin(), b.end());
    }
    return out;
}

// Candidate terms t with premise matching H(t) at the addressed occurrence.
std::vector<TermP> inferred_terms(const FormulaP& qnode, int side, const OccPath& path,
                                  const Sequent& premise) {
    std::vector<TermP> out;
    std::set<std::string> seen;
    auto consider = [&](const FormulaP& f) {
        if (!is_surface_path(f, path)) return;
        auto g = subformula_at(f, path);
        if (auto t = instance_term(qnode->kids[0], qnode->var, g))
            if (seen.insert(term_key(*t)).second) out.push_back(*t);
    };
    if (side < 0) {
        consider(premise.succ);
    } else {
        for (auto& a : premise.ante) consider(a);
    }
    if (!free_vars(qnode->kids[0]).count(qnode->var)) out.push_back(num(0));
    return out;
}

struct Requirement {
    PremiseLink::Kind kind;
    int side;
    OccPath path;
    FormulaP node;
    int component = 0;
};

const char* condition_name(PremiseLink::Kind k) {
    switch (k) {
        case PremiseLink::AndCond: return "⊓-Condition";
        case PremiseLink::OrCond: return "⊔-Condition";
        case PremiseLink::AllCond: return "⊓x-Condition";
        case PremiseLink::ExistsCond: return "⊔x-Condition";
        default: return "?";
    }
}

std::vector<Requirement> wait_requirements(const Sequent& x) {
    std::vector<Requirement> out;
    for (auto& [p, f] : surface_occurrences(x.succ)) {
        if (f->kind == FormulaKind::CAnd)
            for (std::size_t i = 0; i < f->kids.size(); ++i)
                out.push_back({PremiseLink::AndCond, -1, p, f, static_cast<int>(i)});
        if (f->kind == FormulaKind::CAll) out.push_back({PremiseLink::AllCond, -1, p, f});
    }
    for (std::size_t k = 0; k < x.ante.size(); ++k) {
        for (auto& [p, f] : surface_occurrences(x.ante[k])) {
            if (f->kind == FormulaKind::COr)
                for (std::size_t i = 0; i < f->kids.size(); ++i)
                    out.push_back({PremiseLink::OrCond, static_cast<int>(k), p, f, static_cast<int>(i)});
            if (f->kind == FormulaKind::CEx)
                out.push_back({PremiseLink::ExistsCond, static_cast<int>(k), p, f});
        }
    }
    return out;
}

std::string occurrence_text(const Requirement& r) {
    return side_string(r.side) + (r.path.empty() ? "" : ":" + path_string(r.path)) + " " + print(r.node);
}

Sequent required_sequent(const Sequent& x, const Requirement& r, const std::string& y) {
    FormulaP repl = (r.kind == PremiseLink::AndCond || r.kind == PremiseLink::OrCond)
                        ? r.node->kids[r.component]
                        : substitute(r.node->kids[0], r.node->var, var(y));
    return with_side(x, r.side, replace_at(side_formula(x, r.side), r.path, repl));
}

class Checker {
public:
    Checker(const Cl12Proof& p, const CheckOptions& o, StabilityOracle& s) : proof_(p), opt_(o), oracle_(s) {}

    LineCheck check(std::size_t index) {
        const auto& line = proof_.lines[index];
        LineCheck r;
        std::vector<int> prem;
        for (int n : line.premises) {
            int found = -1;
            for (std::size_t j = 0; j < index; ++j)
                if (proof_.lines[j].number == n) found = static_cast<int>(j);
            if (found < 0) return fail(r, "premise " + std::to_string(n) + " is not an earlier line");
            prem.push_back(found);
        }
        static const std::map<Rule, std::set<std::string>> allowed = {
            {Rule::Wait, {}},
            {Rule::OrChoose, {"side", "path", "i"}},
            {Rule::AndChoose, {"side", "path", "i"}},
            {Rule::ExistsChoose, {"side", "path", "t"}},
            {Rule::AllChoose, {"side", "path", "t"}},
            {Rule::Replicate, {"index"}},
        };
        for (auto& [k, v] : line.params)
            if (!allowed.at(line.rule).count(k))
                return fail(r, std::string(rule_name(line.rule)) + " does not take parameter '" + k + "'");
        try {
            switch (line.rule) {
                case Rule::Wait: wait(line, prem, r); break;
                case Rule::Replicate: replicate(line, prem, r); break;
                default: choose(line, prem, r); break;
            }
        } catch (const CaptureError& e) {
            fail(r, std::string("variable capture: ") + e.what());
        } catch (const std::invalid_argument& e) {
            fail(r, e.what());
        }
        return r;
    }

private:
    static LineCheck& fail(LineCheck& r, const std::string& why) {
        r.ok = false;
        r.violation = why;
        return r;
    }

    void choose(const Cl12Line& line, const std::vector<int>& prem, LineCheck& r) {
        const char* rn = rule_name(line.rule);
        if (prem.size() != 1) {
            fail(r, std::string(rn) + " takes exactly one premise");
            return;
        }
        const Sequent& x = line.sequent;
        const Sequent& y = proof_.lines[prem[0]].sequent;
        bool succ_side = line.rule == Rule::OrChoose || line.rule == Rule::ExistsChoose;
        FormulaKind want = line.rule == Rule::OrChoose    ? FormulaKind::COr
                           : line.rule == Rule::AndChoose ? FormulaKind::CAnd
                           : line.rule == Rule::ExistsChoose ? FormulaKind::CEx
                                                           : FormulaKind::CAll;
        std::vector<int> sides;
        if (succ_side) sides.push_back(-1);
        else for (std::size_t k = 0; k < x.ante.size(); ++k) sides.push_back(static_cast<int>(k));
        auto& ps = line.params;
        if (ps.count("side")) {
            auto s = parse_side(ps.at("side"));
            if (!s || std::find(sides.begin(), sides.end(), *s) == sides.end()) {
                fail(r, std::string(rn) + ": side " + ps.at("side") + " is not available");
                return;
            }
            sides = {*s};
        }
        std::optional<OccPath> want_path;
        if (ps.count("path")) want_path = parse_path(ps.at("path"));
        std::optional<int> want_i;
        if (ps.count("i")) {
            auto& v = ps.at("i");
            if (v.empty() || !std::all_of(v.begin(), v.end(), ::isdigit)) {
                fail(r, std::string(rn) + ": bad component " + v);
                return;
            }
            want_i = std::stoi(v);
        }
        std::optional<TermP> want_t;
        if (ps.count("t")) want_t = parse_term(ps.at("t"));
        bool junction_rule = line.rule == Rule::OrChoose || line.rule == Rule::AndChoose;
        std::string term_problem;
        auto prem_bound = sequent_bound_vars(y);
        for (int side : sides) {
            const auto& f = side_formula(x, side);
            for (auto& [path, node] : surface_occurrences(f)) {
                if (node->kind != want) continue;
                if (want_path && *want_path != path) continue;
                std::vector<std::pair<FormulaP, std::optional<int>>> cands;
                std::vector<TermP> terms;
                if (junction_rule) {
                    for (std::size_t i = 0; i < node->kids.size(); ++i)
                        if (!want_i || *want_i == static_cast<int>(i))
                            cands.push_back({node->kids[i], static_cast<int>(i)});
                } else {
                    terms = want_t ? std::vector<TermP>{*want_t} : inferred_terms(node, side, path, y);
                    for (auto& t : terms) {
                        if (t->kind != TermKind::Const && t->kind != TermKind::Var) {
                            term_problem = "t must be a constant or a variable, got " + print(t);
                            cands.push_back({nullptr, std::nullopt});
                            continue;
                        }
                        if (t->kind == TermKind::Var && prem_bound.count(t->name)) {
                            term_problem = "variable " + t->name + " has bound occurrences in the premise";
                            cands.push_back({nullptr, std::nullopt});
                            continue;
                        }
                        FormulaP inst;
                        try {
                            inst = substitute(node->kids[0], node->var, t);
                        } catch (const CaptureError&) {
                            term_problem = "substituting " + print(t) + " would be captured";
                        }
                        cands.push_back({inst, std::nullopt});
                    }
                }
                for (std::size_t c = 0; c < cands.size(); ++c) {
                    if (!cands[c].first) continue;
                    auto wanted = with_side(x, side, replace_at(f, path, cands[c].first));
                    auto map = match_sequent(wanted, y);
                    if (!map) continue;
                    PremiseLink link;
                    link.kind = PremiseLink::Choose;
                    link.side = side;
                    link.path = path;
                    link.premise = prem[0];
                    link.ante_map = *map;
                    r.resolved_params["side"] = side_string(side);
                    r.resolved_params["path"] = path_string(path);
                    if (junction_rule) {
                        link.component = *cands[c].second;
                        r.resolved_params["i"] = std::to_string(link.component);
                    } else {
                        r.term = terms[c];
                        r.resolved_params["t"] = print(terms[c], Style::Ascii);
                    }
                    r.links.push_back(link);
                    r.ok = true;
                    return;
                }
            }
        }
        std::string why = std::string(rn) + ": premise " + std::to_string(proof_.lines[prem[0]].number) +
                          " is not obtained by choosing in any matching occurrence";
        if (!term_problem.empty()) why += " (" + term_problem + ")";
        fail(r, why);
    }

    void replicate(const Cl12Line& line, const std::vector<int>& prem, LineCheck& r) {
        if (prem.size() != 1) {
            fail(r, "Replicate takes exactly one premise");
            return;
        }
        const Sequent& x = line.sequent;
        const Sequent& y = proof_.lines[prem[0]].sequent;
        std::vector<int> ks;
        if (line.params.count("index")) {
            auto& v = line.params.at("index");
            if (v.empty() || !std::all_of(v.begin(), v.end(), ::isdigit) ||
                std::stoul(v) >= x.ante.size()) {
                fail(r, "Replicate: index " + v + " is out of range");
                return;
            }
            ks.push_back(std::stoi(v));
        } else {
            for (std::size_t k = 0; k < x.ante.size(); ++k) ks.push_back(static_cast<int>(k));
        }
        for (int k : ks) {
            Sequent wanted = x;
            wanted.ante.push_back(x.ante[k]);
            auto map = match_sequent(wanted, y);
            if (!map) continue;
            for (auto& m : *map)
                if (m == static_cast<int>(x.ante.size())) m = k;
            PremiseLink link;
            link.kind = PremiseLink::Copy;
            link.side = k;
            link.premise = prem[0];
            link.ante_map = *map;
            r.links.push_back(link);
            r.resolved_params["index"] = std::to_string(k);
            r.ok = true;
            return;
        }
        fail(r, "Replicate: premise " + std::to_string(proof_.lines[prem[0]].number) +
                    " is not the conclusion with one antecedent formula duplicated");
    }

    void wait(const Cl12Line& line, const std::vector<int>& prem, LineCheck& r) {
        const Sequent& x = line.sequent;
        auto el = elementarize(x);
        switch (line.evidence.kind) {
            case Evidence::Builtin: {
                auto res = oracle_.decide(el);
                r.stability = res.verdict;
                if (res.verdict == Validity::Refuted) {
                    fail(r, "Stability Condition: elementarization " + print(el) +
                                " is not classically valid (countermodel: " + res.countermodel + ")");
                    return;
                }
                if (res.verdict == Validity::Unknown) {
                    fail(r, "Stability Condition: validity of " + print(el) + " undetermined within budget");
                    return;
                }
                break;
            }
            case Evidence::Certificate:
                if (!replay_certificate(el, line.evidence.terms)) {
                    fail(r, "Stability Condition: certificate " + line.evidence.ref + " does not close");
                    return;
                }
                r.stability = Validity::Valid;
                break;
            case Evidence::Trusted:
                if (!opt_.allow_trusted) {
                    fail(r, "Stability Condition: trusted evidence is not allowed");
                    return;
                }
                r.trusted = true;
                r.stability = Validity::Unknown;
                break;
        }
        auto xvars = all_vars(x);
        std::vector<bool> used(prem.size(), false);
        for (auto& req : wait_requirements(x)) {
            bool quant_req = req.kind == PremiseLink::AllCond || req.kind == PremiseLink::ExistsCond;
            bool met = false;
            for (std::size_t p = 0; p < prem.size() && !met; ++p) {
                const Sequent& y = proof_.lines[prem[p]].sequent;
                std::vector<std::string> ys;
                if (quant_req) {
                    for (auto& t : inferred_terms(req.node, req.side, req.path, y))
                        if (t->kind == TermKind::Var && !xvars.count(t->name)) ys.push_back(t->name);
                    if (!free_vars(req.node->kids[0]).count(req.node->var))
                        ys.push_back(fresh_name(req.node->var, xvars));
                } else {
                    ys.push_back("");
                }
                for (auto& yv : ys) {
                    auto map = match_sequent(required_sequent(x, req, yv), y);
                    if (!map) continue;
                    PremiseLink link;
                    link.kind = req.kind;
                    link.side = req.side;
                    link.path = req.path;
                    link.component = req.component;
                    link.fresh = yv;
                    link.premise = prem[p];
                    link.ante_map = *map;
                    r.links.push_back(link);
                    used[p] = true;
                    met = true;
                    break;
                }
            }
            if (!met) {
                std::string what = quant_req ? "a fresh instance of " + occurrence_text(req)
                                             : "component " + std::to_string(req.component) + " of " +
                                                   occurrence_text(req);
                fail(r, std::string(condition_name(req.kind)) + ": missing premise for " + what);
                return;
            }
        }
        if (opt_.strict_wait_premises)
            for (std::size_t p = 0; p < prem.size(); ++p)
                if (!used[p]) {
                    fail(r, "Wait: premise " + std::to_string(proof_.lines[prem[p]].number) +
                                " is not demanded by any condition");
                    return;
                }
        r.ok = true;
    }

    const Cl12Proof& proof_;
    const CheckOptions& opt_;
    StabilityOracle& oracle_;
};

}  // namespace

LineCheck check_line(const Cl12Proof& proof, std::size_t index, const CheckOptions& opt,
                     StabilityOracle* oracle) {
    StabilityOracle local(opt.budget);
    Checker c(proof, opt, oracle ? *oracle : local);
    return c.check(index);
}

Cl12Report check_proof(const Cl12Proof& proof, const CheckOptions& opt) {
    Cl12Report rep;
    StabilityOracle oracle(opt.budget);
    Checker c(proof, opt, oracle);
    rep.ok = !proof.lines.empty();
    for (std::size_t i = 0; i < proof.lines.size(); ++i) {
        auto lc = c.check(i);
        if (lc.trusted) ++rep.trusted_steps;
        if (!lc.ok && rep.ok) {
            rep.ok = false;
            rep.first_bad = static_cast<int>(i);
        }
        rep.lines.push_back(std::move(lc));
        if (!rep.ok) break;
    }
    return rep;
}

Cl12Proof explicate(const Cl12Proof& proof, const Cl12Report& report) {
    Cl12Proof out = proof;
    for (std::size_t i = 0; i < out.lines.size() && i < report.lines.size(); ++i)
        for (auto& [k, v] : report.lines[i].resolved_params) out.lines[i].params[k] = v;
    return out;
}

std::vector<Cl12Proof> mutate_cl12(const Cl12Proof& proof, std::mt19937_64& rng, std::size_t count) {
    std::vector<Cl12Proof> out;
    std::set<std::string> seen{format_cl12(proof)};
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    int max_number = 0;
    for (auto& l : proof.lines) max_number = std::max(max_number, l.number);
    const Rule rules[] = {Rule::Wait, Rule::OrChoose, Rule::AndChoose,
                          Rule::ExistsChoose, Rule::AllChoose, Rule::Replicate};
    for (std::size_t attempt = 0; attempt < count * 200 && out.size() < count; ++attempt) {
        Cl12Proof m = proof;
        auto& l = m.lines[pick(m.lines.size())];
        switch (pick(4)) {
            case 0: {
                Rule r = rules[pick(6)];
                if (r == l.rule) continue;
                l.rule = r;
                break;
            }
            case 1: {
                OccPath p;
                auto depth = pick(4);
                for (std::size_t d = 0; d < depth; ++d) p.push_back(static_cast<int>(pick(3)));
                l.params["path"] = path_string(p);
                break;
            }
            case 2: {
                switch (pick(4)) {
                    case 0: l.params["i"] = std::to_string(pick(3)); break;
                    case 1: {
                        auto vars = all_vars(l.sequent);
                        std::vector<std::string> pool(vars.begin(), vars.end());
                        pool.push_back(std::string(1, static_cast<char>('a' + pick(26))));
                        if (pick(2)) {
                            l.params["t"] = Natural(static_cast<std::uint64_t>(pick(64))).bits();
                        } else {
                            l.params["t"] = pool[pick(pool.size())];
                        }
                        break;
                    }
                    case 2: l.params["index"] = std::to_string(pick(l.sequent.ante.size() + 2)); break;
                    default: {
                        auto k = pick(l.sequent.ante.size() + 1);
                        l.params["side"] = k == 0 ? "s" : "a" + std::to_string(k - 1);
                        break;
                    }
                }
                break;
            }
            default: {
                auto op = pick(3);
                int ref = static_cast<int>(pick(static_cast<std::size_t>(max_number) + 1));
                if (op == 0 && !l.premises.empty()) {
                    l.premises[pick(l.premises.size())] = ref;
                } else if (op == 1 && !l.premises.empty()) {
                    l.premises.erase(l.premises.begin() + static_cast<long>(pick(l.premises.size())));
                } else {
                    l.premises.push_back(ref);
                }
                break;
            }
        }
        if (seen.insert(format_cl12(m)).second) out.push_back(std::move(m));
    }
    return out;
}

namespace {

struct SearchExhausted {};

class Searcher {
public:
    explicit Searcher(const SearchBudget& b) : b_(b) {}

    std::optional<Cl12Proof> run(const Sequent& goal) {
        try {
            for (int d = 1; d <= b_.depth; ++d)
                if (auto n = prove(goal, d, b_.replicate_cap)) return emit(*n);
        } catch (const SearchExhausted&) {
        }
        return std::nullopt;
    }

private:
    struct Node {
        Sequent s;
        Rule rule;
        std::map<std::string, std::string> params;
        std::vector<int> kids;
    };

    std::optional<int> prove(const Sequent& x, int depth, int reps) {
        auto skey = sequent_key(x);
        if (auto it = proven_.find(skey); it != proven_.end()) return it->second;
        if (depth <= 0) return std::nullopt;
        auto fkey = skey + "#" + std::to_string(reps);
        if (auto it = failed_.find(fkey); it != failed_.end() && it->second >= depth) return std::nullopt;
        if (++nodes_ > b_.nodes) throw SearchExhausted{};

        auto done = [&](Node n) {
            nodes_list_.push_back(std::move(n));
            int id = static_cast<int>(nodes_list_.size()) - 1;
            proven_[skey] = id;
            return id;
        };

        if (oracle_.decide(elementarize(x)).verdict == Validity::Valid) {
            auto xvars = all_vars(x);
            std::vector<int> kids;
            bool all = true;
            std::set<std::string> requested;
            for (auto& req : wait_requirements(x)) {
                std::string y;
                if (req.kind == PremiseLink::AllCond || req.kind == PremiseLink::ExistsCond)
                    y = fresh_name("s", xvars);
                auto prem = required_sequent(x, req, y);
                if (!requested.insert(sequent_key(prem)).second) continue;
                auto k = prove(prem, depth - 1, reps);
                if (!k) {
                    all = false;
                    break;
                }
                kids.push_back(*k);
            }
            if (all) return done(Node{x, Rule::Wait, {}, kids});
        }

        // Machine choices: ⊔ and ⊔x in the succedent, ⊓ and ⊓x in the antecedent.
        for (int side = -1; side < static_cast<int>(x.ante.size()); ++side) {
            const auto& f = side_formula(x, side);
            for (auto& [path, node] : surface_occurrences(f)) {
                bool junction_choice = side < 0 ? node->kind == FormulaKind::COr : node->kind == FormulaKind::CAnd;
                bool quant_choice = side < 0 ? node->kind == FormulaKind::CEx : node->kind == FormulaKind::CAll;
                Rule rule = side < 0 ? (junction_choice ? Rule::OrChoose : Rule::ExistsChoose)
                                     : (junction_choice ? Rule::AndChoose : Rule::AllChoose);
                std::map<std::string, std::string> base{{"side", side_string(side)}, {"path", path_string(path)}};
                if (junction_choice) {
                    for (std::size_t i = 0; i < node->kids.size(); ++i) {
                        auto prem = with_side(x, side, replace_at(f, path, node->kids[i]));
                        if (auto k = prove(prem, depth - 1, reps)) {
                            auto ps = base;
                            ps["i"] = std::to_string(i);
                            return done(Node{x, rule, ps, {*k}});
                        }
                    }
                } else if (quant_choice) {
                    for (auto& t : choice_terms(x, node)) {
                        FormulaP inst;
                        try {
                            inst = substitute(node->kids[0], node->var, t);
                        } catch (const CaptureError&) {
                            continue;
                        }
                        auto prem = with_side(x, side, replace_at(f, path, inst));
                        if (auto k = prove(prem, depth - 1, reps)) {
                            auto ps = base;
                            ps["t"] = print(t, Style::Ascii);
                            return done(Node{x, rule, ps, {*k}});
                        }
                    }
                }
            }
        }

        if (reps > 0) {
            for (std::size_t k = 0; k < x.ante.size(); ++k) {
                if (is_elementary(x.ante[k])) continue;
                Sequent prem = x;
                prem.ante.push_back(x.ante[k]);
                if (auto n = prove(prem, depth - 1, reps - 1))
                    return done(Node{x, Rule::Replicate, {{"index", std::to_string(k)}}, {*n}});
            }
        }
        failed_[fkey] = std::max(failed_[fkey], depth);
        return std::nullopt;
    }

    std::vector<TermP> choice_terms(const Sequent& x, const FormulaP& node) {
        std::vector<TermP> out;
        auto bound = sequent_bound_vars(x);
        for (auto& v : free_vars(x))
            if (!bound.count(v)) out.push_back(var(v));
        for (int i = 0; i < b_.numeral_cap; ++i) out.push_back(num(Natural(static_cast<std::uint64_t>(i))));
        out.push_back(var(fresh_name(node->var, all_vars(x))));
        return out;
    }

    Cl12Proof emit(int root) {
        Cl12Proof p;
        std::map<int, int> number;
        std::function<void(int)> visit = [&](int id) {
            if (number.count(id)) return;
            for (int k : nodes_list_[id].kids) visit(k);
            Cl12Line l;
            l.number = static_cast<int>(p.lines.size()) + 1;
            l.sequent = nodes_list_[id].s;
            l.rule = nodes_list_[id].rule;
            l.params = nodes_list_[id].params;
            for (int k : nodes_list_[id].kids) {
                int n = number.at(k);
                if (std::find(l.premises.begin(), l.premises.end(), n) == l.premises.end())
                    l.premises.push_back(n);
            }
            number[id] = l.number;
            p.lines.push_back(std::move(l));
        };
        visit(root);
        return p;
    }

    SearchBudget b_;
    StabilityOracle oracle_;
    std::size_t nodes_ = 0;
    std::vector<Node> nodes_list_;
    std::map<std::string, int> proven_;
    std::map<std::string, int> failed_;
};

}  // namespace

std::optional<Cl12Proof> search_cl12(const Sequent& goal, const SearchBudget& b) {
    Searcher s(b);
    return s.run(goal);
}

}  // namespace clarith
