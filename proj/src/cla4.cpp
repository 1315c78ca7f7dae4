#include "clarith/cla4.hpp"

#include "clarith/game.hpp"
#include "clarith/text.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace clarith {

namespace {

const char* kAxioms[] = {
    "",
    "∀x(0≠x′)",
    "∀x∀y(x′=y′ → x=y)",
    "∀x(x+0=x)",
    "∀x∀y(x+y′=(x+y)′)",
    "∀x(x×0=0)",
    "∀x∀y(x×y′=(x×y)+x)",
    "",
    "⊓x⊔y(y=x′)",
    "⊓x⊔y(y=x0)",
};

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, sep)) out.push_back(trim(part));
    return out;
}

bool cla4_term(const TermP& t) {
    if (t->kind == TermKind::App) return false;
    for (auto& a : t->args)
        if (!cla4_term(a)) return false;
    return true;
}

// Only 0, ′, +, ×, = and the builtin pseudoterm predicates.
std::optional<std::string> outside_language(const FormulaP& f) {
    if (is_literal(f->kind)) {
        if (f->pred != "=" && f->pred != "<=" && f->pred != "<")
            return "predicate letter " + f->pred + " is not in the language of CLA4";
        for (auto& a : f->args)
            if (!cla4_term(a)) return "function letters are not in the language of CLA4";
        return std::nullopt;
    }
    for (auto& k : f->kids)
        if (auto e = outside_language(k)) return e;
    return std::nullopt;
}

void permute_all(std::vector<int>& perm, std::size_t i, const std::function<bool()>& visit, bool& stop) {
    if (stop) return;
    if (i == perm.size()) {
        stop = visit();
        return;
    }
    for (std::size_t j = i; j < perm.size() && !stop; ++j) {
        std::swap(perm[i], perm[j]);
        permute_all(perm, i + 1, visit, stop);
        std::swap(perm[i], perm[j]);
    }
}

}  // namespace

FormulaP axiom_formula(int k) {
    if (k < 1 || k > 9 || k == 7) throw std::invalid_argument("no fixed axiom " + std::to_string(k));
    return parse_formula(kAxioms[k]);
}

std::optional<AxiomMatch> is_axiom(const FormulaP& s) {
    for (int k : {1, 2, 3, 4, 5, 6, 8, 9})
        if (alpha_equal(s, axiom_formula(k))) return AxiomMatch{k, nullptr, {}};
    // Axiom 7: ∀(F(0) ∧ ∀x(F(x) → F(x′)) → ∀x F(x)) with F elementary.
    if (!free_vars(s).empty() || !is_elementary(s)) return std::nullopt;
    FormulaP body = s;
    std::vector<std::string> prefix;
    while (true) {
        if (body->kind == FormulaKind::Or && body->kids.size() == 2 &&
            body->kids[1]->kind == FormulaKind::All) {
            const auto& last = body->kids[1];
            auto g = last->kids[0];
            const std::string& x = last->var;
            try {
                auto expect = implies(conj({substitute(g, x, num(0)),
                                            quant(FormulaKind::All, x,
                                                  implies(g, substitute(g, x, succ(var(x)))))}),
                                      last);
                std::set<std::string> pre(prefix.begin(), prefix.end());
                if (alpha_equal(expect, body) && pre == free_vars(body) && pre.size() == prefix.size())
                    return AxiomMatch{7, g, x};
            } catch (const CaptureError&) {
            }
        }
        if (body->kind != FormulaKind::All) break;
        prefix.push_back(body->var);
        body = body->kids[0];
    }
    return std::nullopt;
}

bool same_closure(const FormulaP& a, const FormulaP& b) {
    if (alpha_equal(a, b)) return true;
    auto peel = [](FormulaP f, std::vector<std::string>& vs) {
        while (f->kind == FormulaKind::CAll) {
            vs.push_back(f->var);
            f = f->kids[0];
        }
        return f;
    };
    std::vector<std::string> va, vb;
    auto ra = peel(a, va);
    auto rb = peel(b, vb);
    if (va.size() != vb.size() || va.size() > 6) return false;
    if (std::set<std::string>(va.begin(), va.end()).size() != va.size()) return false;
    if (std::set<std::string>(vb.begin(), vb.end()).size() != vb.size()) return false;
    std::set<std::string> avoid = all_vars(ra);
    auto vbv = all_vars(rb);
    avoid.insert(vbv.begin(), vbv.end());
    std::vector<std::string> common;
    for (std::size_t i = 0; i < va.size(); ++i) {
        common.push_back(fresh_name("c", avoid));
        avoid.insert(common.back());
    }
    std::map<std::string, TermP> sa;
    for (std::size_t i = 0; i < va.size(); ++i) sa[va[i]] = var(common[i]);
    FormulaP ca;
    try {
        ca = substitute(ra, sa);
    } catch (const CaptureError&) {
        return false;
    }
    auto ka = alpha_key(ca);
    std::vector<int> perm(vb.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
    bool found = false;
    permute_all(perm, 0, [&] {
        std::map<std::string, TermP> sb;
        for (std::size_t i = 0; i < vb.size(); ++i) sb[vb[i]] = var(common[perm[i]]);
        try {
            return alpha_key(substitute(rb, sb)) == ka;
        } catch (const CaptureError&) {
            return false;
        }
    }, found);
    return found;
}

std::optional<std::string> check_induction(const FormulaP& conclusion, const FormulaP& basis,
                                           const FormulaP& left, const FormulaP& right,
                                           const std::string& x, FormulaP* f_out) {
    // Candidate F(x): strip k leading ⊓ so that they close exactly F's free variables.
    std::vector<FormulaP> cands;
    std::vector<std::string> stripped;
    FormulaP cur = conclusion;
    while (cur->kind == FormulaKind::CAll) {
        stripped.push_back(cur->var);
        cur = cur->kids[0];
        std::set<std::string> pre(stripped.begin(), stripped.end());
        if (pre.count(x) && free_vars(cur) == pre && pre.size() == stripped.size()) cands.push_back(cur);
    }
    if (cands.empty())
        return "Induction: the conclusion is not the ⊓-closure of a formula with free variable " + x;
    std::string last_problem;
    for (auto& f : cands) {
        if (auto bad = unbounded_quantifier(f)) {
            last_problem = "Induction: F(" + x + ") is not polynomially bounded (unbounded quantifier at " +
                           path_string(*bad) + ")";
            continue;
        }
        try {
            auto f0 = closure(substitute(f, x, num(0)), ClosureKind::Choice);
            auto fl = closure(implies(f, substitute(f, x, bit0(var(x)))), ClosureKind::Choice);
            auto fr = closure(implies(f, substitute(f, x, bit1(var(x)))), ClosureKind::Choice);
            if (!same_closure(basis, f0)) {
                last_problem = "Induction: basis is not " + print(f0);
                continue;
            }
            if (!same_closure(left, fl)) {
                last_problem = "Induction: left step is not " + print(fl);
                continue;
            }
            if (!same_closure(right, fr)) {
                last_problem = "Induction: right step is not " + print(fr);
                continue;
            }
        } catch (const CaptureError& e) {
            last_problem = std::string("Induction: ") + e.what();
            continue;
        }
        if (f_out) *f_out = f;
        return std::nullopt;
    }
    return last_problem;
}

Sequent lc_sequent(const FormulaP& conclusion, const std::vector<FormulaP>& premises) {
    Sequent s;
    for (auto& p : premises) s.ante.push_back(closure(p, ClosureKind::Choice));
    s.succ = closure(conclusion, ClosureKind::Choice);
    return s;
}

std::optional<std::string> check_lc(const FormulaP& conclusion, const std::vector<FormulaP>& premises,
                                    const Cl12Proof& proof, const CheckOptions& opt, Cl12Report* report) {
    auto want = lc_sequent(conclusion, premises);
    if (!match_sequent(want, proof.conclusion()))
        return "LC: attached proof concludes " + print(proof.conclusion()) + " instead of " + print(want);
    auto rep = check_proof(proof, opt);
    if (report) *report = rep;
    if (!rep.ok) return "LC: attached proof " + rep.summary();
    return std::nullopt;
}

Cla4Proof parse_cla4(std::string_view text, const std::string& base_dir) {
    Cla4Proof proof;
    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        auto line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        auto semi = line.find(';');
        auto dot = line.find('.');
        if (semi == std::string::npos || dot == std::string::npos || dot > semi)
            throw ProofFormatError("expected '<label>. <sentence> ; <justification>'", lineno);
        Cla4Line l;
        l.label = trim(line.substr(0, dot));
        try {
            l.sentence = parse_formula(line.substr(dot + 1, semi - dot - 1));
        } catch (const SyntaxError& e) {
            throw ProofFormatError(e.what(), lineno);
        }
        auto just = trim(line.substr(semi + 1));
        bool block = !just.empty() && just.back() == '{';
        if (block) just = trim(just.substr(0, just.size() - 1));
        auto colon = just.find(':');
        auto kind = trim(just.substr(0, colon));
        auto arg = colon == std::string::npos ? std::string() : trim(just.substr(colon + 1));
        if (kind == "axiom") {
            l.kind = Cla4Line::Axiom;
            if (!arg.empty()) {
                try {
                    l.axiom = std::stoi(arg);
                } catch (const std::exception&) {
                    throw ProofFormatError("bad axiom number", lineno);
                }
            }
        } else if (kind == "pa") {
            l.kind = Cla4Line::Pa;
            l.tag = arg.empty() ? "PA" : arg;
        } else if (kind == "lc") {
            l.kind = Cla4Line::Lc;
            for (auto& p : split(arg, ','))
                if (!p.empty()) l.premises.push_back(p);
        } else if (kind == "ind") {
            l.kind = Cla4Line::Induction;
            std::istringstream ws(arg);
            std::string word;
            ws >> l.ind_var;
            while (ws >> word) {
                auto eq = word.find('=');
                if (eq == std::string::npos) throw ProofFormatError("bad induction field " + word, lineno);
                auto k = word.substr(0, eq), v = word.substr(eq + 1);
                if (k == "basis") l.basis = v;
                else if (k == "left") l.left = v;
                else if (k == "right") l.right = v;
                else throw ProofFormatError("bad induction field " + word, lineno);
            }
            if (l.ind_var.empty() || l.basis.empty() || l.left.empty() || l.right.empty())
                throw ProofFormatError("induction needs x, basis, left and right", lineno);
        } else {
            throw ProofFormatError("unknown justification '" + kind + "'", lineno);
        }
        if (block) {
            if (l.kind != Cla4Line::Lc) throw ProofFormatError("only LC takes an attached proof", lineno);
            std::string body;
            int start = lineno;
            bool closed = false;
            while (std::getline(in, raw)) {
                ++lineno;
                if (trim(raw) == "}") {
                    closed = true;
                    break;
                }
                body += raw + "\n";
            }
            if (!closed) throw ProofFormatError("unterminated LC block", start);
            try {
                l.attached = parse_cl12(body, base_dir);
            } catch (const ProofFormatError& e) {
                throw ProofFormatError(std::string("in LC block: ") + e.what(), start);
            }
        }
        proof.lines.push_back(std::move(l));
    }
    if (proof.lines.empty()) throw ProofFormatError("empty proof", lineno);
    return proof;
}

std::string format_cla4(const Cla4Proof& p) {
    std::string out;
    for (auto& l : p.lines) {
        out += l.label + ". " + print(l.sentence) + " ; ";
        switch (l.kind) {
            case Cla4Line::Axiom: out += l.axiom ? "axiom:" + std::to_string(l.axiom) : "axiom"; break;
            case Cla4Line::Pa: out += "pa:" + l.tag; break;
            case Cla4Line::Lc: {
                out += "lc:";
                for (std::size_t i = 0; i < l.premises.size(); ++i) out += (i ? "," : "") + l.premises[i];
                break;
            }
            case Cla4Line::Induction:
                out += "ind:" + l.ind_var + " basis=" + l.basis + " left=" + l.left + " right=" + l.right;
                break;
        }
        if (l.attached) {
            out += " {\n";
            for (auto& cl : l.attached->lines) out += "  " + format_line(cl) + "\n";
            out += "}";
        }
        out += "\n";
    }
    return out;
}

std::string AuditReport::summary() const {
    std::string out;
    if (ok) {
        out = "ok, " + std::to_string(lines.size()) + " lines, " + std::to_string(pa_trusted) +
              " PA-trusted, " + std::to_string(trusted_stability) + " trusted stability";
        out += extraction_ready ? ", extraction-ready" : ", not extraction-ready";
    } else {
        out = "rejected at line index " + std::to_string(first_bad) + ": " +
              (first_bad >= 0 ? lines[first_bad].violation : std::string("?"));
    }
    return out;
}

AuditReport check_cla4(const Cla4Proof& proof, const Cla4Options& opt) {
    AuditReport rep;
    rep.ok = true;
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < proof.lines.size(); ++i) {
        const auto& l = proof.lines[i];
        Cla4LineReport lr;
        auto ref = [&](const std::string& label) -> std::optional<FormulaP> {
            auto it = index.find(label);
            if (it == index.end()) return std::nullopt;
            return proof.lines[it->second].sentence;
        };
        auto fail = [&](const std::string& why) {
            lr.ok = false;
            lr.violation = why;
        };
        lr.ok = true;
        if (index.count(l.label)) {
            fail("duplicate label " + l.label);
        } else if (auto bad = outside_language(l.sentence)) {
            fail(*bad);
        } else {
            switch (l.kind) {
                case Cla4Line::Axiom: {
                    auto m = is_axiom(l.sentence);
                    if (!m) fail("not an axiom of CLA4");
                    else if (l.axiom && l.axiom != m->number)
                        fail("sentence is Axiom " + std::to_string(m->number) + ", not Axiom " +
                             std::to_string(l.axiom));
                    else {
                        lr.axiom = m->number;
                        lr.induction_formula = m->instance;
                    }
                    break;
                }
                case Cla4Line::Pa: {
                    if (!is_elementary(l.sentence)) {
                        fail("PA-trusted steps must be elementary");
                        break;
                    }
                    if (!opt.allow_pa_trusted) {
                        fail("PA-trusted steps are not allowed");
                        break;
                    }
                    try {
                        if (eval_elementary(closure(l.sentence, ClosureKind::Blind))) {
                            lr.discharged = true;
                        } else {
                            fail("PA step is false in the standard model");
                        }
                    } catch (const std::exception&) {
                        lr.pa_trusted = true;
                    }
                    break;
                }
                case Cla4Line::Lc: {
                    std::vector<FormulaP> prem;
                    for (auto& p : l.premises) {
                        auto f = ref(p);
                        if (!f) {
                            fail("LC: premise " + p + " is not an earlier line");
                            break;
                        }
                        prem.push_back(*f);
                    }
                    if (!lr.ok) break;
                    if (l.attached) {
                        lr.lc_proof = l.attached;
                    } else if (opt.search_missing_lc) {
                        lr.lc_proof = search_cl12(lc_sequent(l.sentence, prem), opt.search);
                        lr.lc_searched = true;
                        if (!lr.lc_proof) {
                            fail("LC: no attached proof and bounded search found none");
                            break;
                        }
                    } else {
                        fail("LC: no attached proof");
                        break;
                    }
                    if (auto bad = check_lc(l.sentence, prem, *lr.lc_proof, opt.cl12, &lr.lc_report))
                        fail(*bad);
                    break;
                }
                case Cla4Line::Induction: {
                    auto b = ref(l.basis), le = ref(l.left), r = ref(l.right);
                    if (!b || !le || !r) {
                        fail("Induction: premises must be earlier lines");
                        break;
                    }
                    FormulaP f;
                    if (auto bad = check_induction(l.sentence, *b, *le, *r, l.ind_var, &f)) fail(*bad);
                    else lr.induction_formula = f;
                    break;
                }
            }
        }
        index.emplace(l.label, i);
        if (lr.pa_trusted) ++rep.pa_trusted;
        rep.trusted_stability += lr.lc_report.trusted_steps;
        if (lr.lc_report.trusted_steps > 0)
            rep.not_ready.push_back("line " + l.label + " relies on trusted stability");
        if (!lr.ok && rep.ok) {
            rep.ok = false;
            rep.first_bad = static_cast<int>(i);
        }
        rep.lines.push_back(std::move(lr));
    }
    rep.extraction_ready = rep.ok && rep.not_ready.empty();
    return rep;
}

Cla4Proof explicate(const Cla4Proof& proof, const AuditReport& report) {
    Cla4Proof out = proof;
    for (std::size_t i = 0; i < out.lines.size() && i < report.lines.size(); ++i)
        if (out.lines[i].attached && report.lines[i].lc_report.ok)
            out.lines[i].attached = explicate(*out.lines[i].attached, report.lines[i].lc_report);
    return out;
}

std::vector<Cla4Proof> mutate_cla4(const Cla4Proof& proof, std::mt19937_64& rng, std::size_t count) {
    std::vector<Cla4Proof> out;
    auto key = [](const Cla4Proof& p) {
        // LC premises form a multiset; reordering them is not an edit.
        auto q = p;
        for (auto& l : q.lines) std::sort(l.premises.begin(), l.premises.end());
        return format_cla4(q);
    };
    std::set<std::string> seen{key(proof)};
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    std::vector<std::string> labels;
    for (auto& l : proof.lines) labels.push_back(l.label);
    labels.push_back("XX");
    for (std::size_t attempt = 0; attempt < count * 200 && out.size() < count; ++attempt) {
        Cla4Proof m = proof;
        auto& l = m.lines[pick(m.lines.size())];
        switch (pick(5)) {
            case 0:
                l.kind = Cla4Line::Axiom;
                l.axiom = static_cast<int>(pick(9)) + 1;
                l.attached.reset();
                break;
            case 1: {
                auto k = pick(3);
                if (k == 0) {
                    l.kind = Cla4Line::Pa;
                    l.tag = "PA";
                    l.attached.reset();
                } else if (k == 1) {
                    l.kind = Cla4Line::Lc;
                } else {
                    l.kind = Cla4Line::Induction;
                    l.ind_var = "x";
                    l.basis = labels[pick(labels.size())];
                    l.left = labels[pick(labels.size())];
                    l.right = labels[pick(labels.size())];
                    l.attached.reset();
                }
                break;
            }
            case 2: {
                auto op = pick(3);
                auto lab = labels[pick(labels.size())];
                if (op == 0 && !l.premises.empty()) l.premises[pick(l.premises.size())] = lab;
                else if (op == 1 && !l.premises.empty())
                    l.premises.erase(l.premises.begin() + static_cast<long>(pick(l.premises.size())));
                else l.premises.push_back(lab);
                break;
            }
            case 3: {
                if (l.kind != Cla4Line::Induction) continue;
                auto lab = labels[pick(labels.size())];
                switch (pick(4)) {
                    case 0: l.basis = lab; break;
                    case 1: l.left = lab; break;
                    case 2: l.right = lab; break;
                    default: l.ind_var = std::string(1, static_cast<char>('a' + pick(26))); break;
                }
                break;
            }
            default: {
                if (!l.attached) continue;
                auto edits = mutate_cl12(*l.attached, rng, 1);
                if (edits.empty()) continue;
                l.attached = edits[0];
                break;
            }
        }
        if (seen.insert(key(m)).second) out.push_back(std::move(m));
    }
    return out;
}

}  // namespace clarith
