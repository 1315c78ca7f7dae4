#include "clarith/text.hpp"

#include <map>

namespace clarith {

namespace {

std::u32string decode_utf8(std::string_view s) {
    std::u32string out;
    for (std::size_t i = 0; i < s.size();) {
        unsigned char c = s[i];
        char32_t cp;
        int n;
        if (c < 0x80) { cp = c; n = 1; }
        else if ((c >> 5) == 0x6) { cp = c & 0x1f; n = 2; }
        else if ((c >> 4) == 0xe) { cp = c & 0x0f; n = 3; }
        else if ((c >> 3) == 0x1e) { cp = c & 0x07; n = 4; }
        else throw SyntaxError("invalid UTF-8", out.size());
        if (i + n > s.size()) throw SyntaxError("truncated UTF-8", out.size());
        for (int k = 1; k < n; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3f);
        out.push_back(cp);
        i += n;
    }
    return out;
}

bool is_letter(char32_t c) { return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z'); }
bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

class Parser {
public:
    explicit Parser(std::string_view text) : s_(decode_utf8(text)) {}

    Sequent sequent() {
        Sequent out;
        ws();
        if (arrow()) {
            out.succ = formula();
            end();
            return out;
        }
        std::vector<FormulaP> items{formula()};
        ws();
        while (accept(U",")) {
            items.push_back(formula());
            ws();
        }
        if (arrow()) {
            out.ante = std::move(items);
            out.succ = formula();
        } else if (items.size() == 1) {
            out.succ = items[0];
        } else {
            fail("expected ⟹ after antecedent");
        }
        end();
        return out;
    }

    FormulaP whole_formula() {
        auto f = formula();
        end();
        return f;
    }

    TermP whole_term() {
        auto t = term();
        end();
        return t;
    }

private:
    std::u32string s_;
    std::size_t p_ = 0;
    std::map<std::string, std::pair<char, std::size_t>> letters_;

    [[noreturn]] void fail(const std::string& msg) { throw SyntaxError(msg, p_); }

    void ws() {
        while (p_ < s_.size() && (s_[p_] == U' ' || s_[p_] == U'\t' || s_[p_] == U'\n' || s_[p_] == U'\r'))
            ++p_;
    }

    bool at_end() {
        ws();
        return p_ >= s_.size();
    }

    void end() {
        if (!at_end()) fail("unexpected trailing input");
    }

    bool peek(std::u32string_view lit) const {
        return s_.compare(p_, lit.size(), lit) == 0;
    }

    bool accept(std::u32string_view lit) {
        if (!peek(lit)) return false;
        p_ += lit.size();
        return true;
    }

    void expect(std::u32string_view lit, const char* what) {
        ws();
        if (!accept(lit)) fail(std::string("expected ") + what);
    }

    bool arrow() {
        ws();
        return accept(U"⟹") || accept(U"=>") || accept(U"∘–") || accept(U"o-");
    }

    void note_letter(const std::string& name, char kind, std::size_t arity, std::size_t at) {
        auto [it, fresh] = letters_.emplace(name, std::make_pair(kind, arity));
        if (!fresh && it->second != std::make_pair(kind, arity))
            throw SyntaxError("arity mismatch for letter " + name, at);
    }

    void note_functions(const TermP& t, std::size_t at) {
        if (t->kind == TermKind::App) note_letter(t->name, 'f', t->args.size(), at);
        for (auto& a : t->args) note_functions(a, at);
    }

    std::string ident() {
        std::string out;
        while (p_ < s_.size() && is_letter(s_[p_])) out.push_back(static_cast<char>(s_[p_++]));
        if (p_ + 1 < s_.size() && s_[p_] == U'_' && is_digit(s_[p_ + 1])) {
            out.push_back('_');
            ++p_;
            while (p_ < s_.size() && is_digit(s_[p_])) out.push_back(static_cast<char>(s_[p_++]));
        }
        return out;
    }

    FormulaP formula() {
        auto left = orlevel();
        ws();
        if (accept(U"→") || accept(U"->")) {
            auto right = formula();
            return implies(left, right);
        }
        return left;
    }

    FormulaP orlevel() {
        std::vector<FormulaP> kids{andlevel()};
        FormulaKind kind = FormulaKind::Top;
        for (;;) {
            ws();
            std::size_t at = p_;
            FormulaKind k;
            if (accept(U"∨") || accept(U"\\/")) k = FormulaKind::Or;
            else if (accept(U"⊔") || accept(U"||")) k = FormulaKind::COr;
            else break;
            if (kind != FormulaKind::Top && kind != k)
                throw SyntaxError("mixed ∨ and ⊔ need parentheses", at);
            kind = k;
            kids.push_back(andlevel());
        }
        if (kids.size() == 1) return kids[0];
        return junction(kind, std::move(kids));
    }

    FormulaP andlevel() {
        std::vector<FormulaP> kids{unary()};
        FormulaKind kind = FormulaKind::Top;
        for (;;) {
            ws();
            std::size_t at = p_;
            FormulaKind k;
            if (accept(U"∧") || accept(U"/\\")) k = FormulaKind::And;
            else if (accept(U"⊓") || accept(U"&&")) k = FormulaKind::CAnd;
            else break;
            if (kind != FormulaKind::Top && kind != k)
                throw SyntaxError("mixed ∧ and ⊓ need parentheses", at);
            kind = k;
            kids.push_back(unary());
        }
        if (kids.size() == 1) return kids[0];
        return junction(kind, std::move(kids));
    }

    // A quantifier symbol followed by a variable.
    bool quantifier(FormulaKind& kind, std::string& v) {
        std::size_t save = p_;
        bool ascii = false;
        if (accept(U"∀")) kind = FormulaKind::All;
        else if (accept(U"∃")) kind = FormulaKind::Ex;
        else if (accept(U"⊓")) kind = FormulaKind::CAll;
        else if (accept(U"⊔")) kind = FormulaKind::CEx;
        else if (accept(U"!!")) { kind = FormulaKind::CAll; ascii = true; }
        else if (accept(U"??")) { kind = FormulaKind::CEx; ascii = true; }
        else if (accept(U"!")) { kind = FormulaKind::All; ascii = true; }
        else if (accept(U"?")) { kind = FormulaKind::Ex; ascii = true; }
        else return false;
        ws();
        if (p_ >= s_.size() || !is_letter(s_[p_])) {
            p_ = save;
            return false;
        }
        v = ident();
        if (v == "true" || v == "false") fail("keyword used as variable");
        if (ascii) {
            ws();
            accept(U":");
        }
        return true;
    }

    FormulaP unary() {
        ws();
        if (p_ >= s_.size()) fail("expected formula");
        if (accept(U"¬") || accept(U"~")) return negate(unary());
        if (accept(U"⊤")) return top();
        if (accept(U"⊥")) return bot();
        FormulaKind qk;
        std::string v;
        if (quantifier(qk, v)) return quant(qk, v, unary());
        std::size_t start = p_;
        if (is_letter(s_[p_])) {
            std::size_t save = p_;
            auto word = ident();
            if (word == "true") return top();
            if (word == "false") return bot();
            p_ = save;
        }
        // Either an atom built from terms or a parenthesized formula.
        std::optional<SyntaxError> term_err;
        try {
            return term_atom();
        } catch (const SyntaxError& e) {
            term_err = e;
        }
        p_ = start;
        if (s_[p_] == U'(') {
            try {
                ++p_;
                auto f = formula();
                expect(U")", "')'");
                return f;
            } catch (const SyntaxError& e) {
                if (e.offset >= term_err->offset) throw;
            }
        }
        throw *term_err;
    }

    FormulaP term_atom() {
        std::size_t at = p_;
        auto t = term();
        ws();
        std::string rel;
        bool negated = false;
        if (accept(U"≠") || accept(U"!=")) { rel = "="; negated = true; }
        else if (accept(U"≤") || accept(U"<=")) rel = "<=";
        else if (accept(U"<")) rel = "<";
        else if (!peek(U"=>") && accept(U"=")) rel = "=";
        if (!rel.empty()) {
            auto r = term();
            note_functions(t, at);
            note_functions(r, at);
            auto a = atom(rel, {t, r});
            return negated ? negate(a) : a;
        }
        if (t->kind == TermKind::Var) {
            note_letter(t->name, 'p', 0, at);
            return atom(t->name, {});
        }
        if (t->kind == TermKind::App && t->name != "cube") {
            for (auto& a : t->args) note_functions(a, at);
            note_letter(t->name, 'p', t->args.size(), at);
            return atom(t->name, t->args);
        }
        fail("expected a relation after term");
    }

    TermP term() {
        auto t = product();
        for (;;) {
            ws();
            if (accept(U"+")) t = add(t, product());
            else return t;
        }
    }

    TermP product() {
        auto t = postfix();
        for (;;) {
            ws();
            if (accept(U"×") || accept(U"*") || accept(U"·")) t = mul(t, postfix());
            else return t;
        }
    }

    TermP postfix() {
        auto [t, adjacent_digits] = primary();
        for (;;) {
            if (accept(U"′") || accept(U"'")) { t = succ(t); adjacent_digits = true; continue; }
            if (accept(U"³")) { t = app("cube", {t}); adjacent_digits = true; continue; }
            if (adjacent_digits && p_ < s_.size() && (s_[p_] == U'0' || s_[p_] == U'1')) {
                t = s_[p_] == U'0' ? bit0(t) : bit1(t);
                ++p_;
                continue;
            }
            if (adjacent_digits && p_ < s_.size() && is_digit(s_[p_]))
                fail("only 0 and 1 may follow a term");
            return t;
        }
    }

    std::pair<TermP, bool> primary() {
        ws();
        if (p_ >= s_.size()) fail("expected term");
        std::size_t at = p_;
        char32_t c = s_[p_];
        if (c == U'2' && p_ + 1 < s_.size() && s_[p_ + 1] == U'^') {
            p_ += 2;
            return {pow2(postfix()), false};
        }
        if (c == U'0' || c == U'1') {
            std::string bits;
            while (p_ < s_.size() && is_digit(s_[p_])) bits.push_back(static_cast<char>(s_[p_++]));
            if (!Natural::is_numeral(bits)) throw SyntaxError("not a canonical binary numeral: " + bits, at);
            return {num(Natural::from_bits(bits)), false};
        }
        if (is_digit(c)) fail("numerals are binary");
        if (accept(U"(")) {
            auto t = term();
            expect(U")", "')'");
            return {t, true};
        }
        if (accept(U"|")) {
            auto t = term();
            expect(U"|", "'|'");
            return {len(t), true};
        }
        if (accept(U"[")) {
            auto x = term();
            expect(U"]", "']'");
            expect(U"_", "'_'");
            auto y = postfix();
            if (accept(U"^")) return {substr(x, y, postfix()), false};
            return {bit_at(x, y), false};
        }
        if (is_letter(c)) {
            auto name = ident();
            if (name == "true" || name == "false") throw SyntaxError("keyword in term position", at);
            if (accept(U"(")) {
                std::vector<TermP> args{term()};
                ws();
                while (accept(U",")) args.push_back(term());
                expect(U")", "')'");
                return {app(name, std::move(args)), true};
            }
            return {var(name), true};
        }
        fail("expected term");
    }
};

FormulaP finish(const FormulaP& f, const ParseOptions& opt) {
    Sequent s{{}, f};
    if (is_hygienic(s)) return f;
    if (opt.strict_hygiene) throw SyntaxError("variable used both free and bound", 0);
    return hygienic(s).succ;
}

}  // namespace

FormulaP parse_formula(std::string_view text, const ParseOptions& opt) {
    Parser p(text);
    return finish(p.whole_formula(), opt);
}

Sequent parse_sequent(std::string_view text, const ParseOptions& opt) {
    Parser p(text);
    auto s = p.sequent();
    if (is_hygienic(s)) return s;
    if (opt.strict_hygiene) throw SyntaxError("variable used both free and bound", 0);
    return hygienic(s);
}

TermP parse_term(std::string_view text) {
    Parser p(text);
    return p.whole_term();
}

// ---------------------------------------------------------------------------
// Printing

namespace {

bool is_two(const TermP& t) {
    return t->kind == TermKind::Succ && t->args[0]->kind == TermKind::Succ &&
           t->args[0]->args[0]->kind == TermKind::Const && t->args[0]->args[0]->value.is_zero();
}

bool is_bit0(const TermP& t) { return t->kind == TermKind::Mul && is_two(t->args[0]); }
bool is_bit1(const TermP& t) { return t->kind == TermKind::Succ && is_bit0(t->args[0]); }

int term_level(const TermP& t) {
    switch (t->kind) {
        case TermKind::Add: return 1;
        case TermKind::Mul: return is_bit0(t) ? 4 : 2;
        case TermKind::Pow2:
        case TermKind::BitAt:
        case TermKind::Substr: return 3;
        default: return 4;
    }
}

struct Printer {
    Style st;

    const char* sym(const char* uni, const char* ascii) const { return st == Style::Unicode ? uni : ascii; }

    std::string term_at(const TermP& t, int level) {
        auto s = term(t);
        if (term_level(t) < level) return "(" + s + ")";
        return s;
    }

    // Operand of a digit suffix: constants need parentheses.
    std::string digit_operand(const TermP& t) {
        if (t->kind == TermKind::Const) return "(" + term(t) + ")";
        return term_at(t, 4);
    }

    std::string term(const TermP& t) {
        switch (t->kind) {
            case TermKind::Var: return t->name;
            case TermKind::Const: return t->value.bits();
            case TermKind::Succ:
                if (is_bit1(t)) return digit_operand(t->args[0]->args[1]) + "1";
                return term_at(t->args[0], 4) + sym("′", "'");
            case TermKind::Add: return term_at(t->args[0], 1) + "+" + term_at(t->args[1], 2);
            case TermKind::Mul:
                if (is_bit0(t)) return digit_operand(t->args[1]) + "0";
                return term_at(t->args[0], 2) + sym("×", "*") + term_at(t->args[1], 4);
            case TermKind::App: {
                if (t->name == "cube" && t->args.size() == 1 && st == Style::Unicode)
                    return term_at(t->args[0], 4) + "³";
                std::string out = t->name + "(";
                for (std::size_t i = 0; i < t->args.size(); ++i) {
                    if (i) out += ",";
                    out += term(t->args[i]);
                }
                return out + ")";
            }
            case TermKind::Len: return "|" + term(t->args[0]) + "|";
            case TermKind::Pow2: return "2^" + term_at(t->args[0], 4);
            case TermKind::BitAt:
                return "[" + term(t->args[0]) + "]_" + term_at(t->args[1], 4);
            case TermKind::Substr:
                return "[" + term(t->args[0]) + "]_" + term_at(t->args[1], 4) + "^" +
                       term_at(t->args[2], 4);
        }
        return "?";
    }

    std::string literal(const FormulaP& f) {
        bool neg = f->kind == FormulaKind::NegAtom;
        const auto& p = f->pred;
        if (p == "=" || p == "<=" || p == "<") {
            std::string rel;
            if (p == "=") rel = neg ? sym("≠", "!=") : "=";
            else if (p == "<=") rel = sym("≤", "<=");
            else rel = "<";
            std::string core = term(f->args[0]) + rel + term(f->args[1]);
            if (neg && p != "=") return std::string(sym("¬", "~")) + "(" + core + ")";
            return core;
        }
        std::string core = p;
        if (!f->args.empty()) {
            core += "(";
            for (std::size_t i = 0; i < f->args.size(); ++i) {
                if (i) core += ",";
                core += term(f->args[i]);
            }
            core += ")";
        }
        return neg ? std::string(sym("¬", "~")) + core : core;
    }

    static bool leftmost_negative(const FormulaP& f) {
        if (f->kind == FormulaKind::NegAtom) return true;
        if (f->kind == FormulaKind::Atom || f->kids.empty()) return false;
        return leftmost_negative(f->kids[0]);
    }

    static bool as_implication(const FormulaP& f) {
        if (f->kind != FormulaKind::Or || f->kids.size() != 2) return false;
        int here = negation_count(f->kids[0]);
        auto d = negate(f->kids[0]);
        int there = negation_count(d);
        if (there < here) return true;
        return there == here && here > 0 && leftmost_negative(f->kids[0]);
    }

    // 3: literal/quantifier/parenthesized, 2: ∧ ⊓, 1: ∨ ⊔, 0: →.
    static int level(const FormulaP& f) {
        switch (f->kind) {
            case FormulaKind::And:
            case FormulaKind::CAnd: return 2;
            case FormulaKind::Or: return as_implication(f) ? 0 : 1;
            case FormulaKind::COr: return 1;
            default: return 3;
        }
    }

    std::string formula(const FormulaP& f) {
        switch (f->kind) {
            case FormulaKind::Top: return sym("⊤", "true");
            case FormulaKind::Bot: return sym("⊥", "false");
            case FormulaKind::Atom:
            case FormulaKind::NegAtom: return literal(f);
            default: break;
        }
        if (is_quantifier(f->kind)) return quantified(f);
        if (f->kind == FormulaKind::Or && as_implication(f)) {
            auto a = negate(f->kids[0]);
            std::string left = level(a) <= 0 ? "(" + formula(a) + ")" : formula(a);
            return left + sym(" → ", " -> ") + formula(f->kids[1]);
        }
        const char* op = "";
        int need = 0;
        switch (f->kind) {
            case FormulaKind::And: op = sym(" ∧ ", " /\\ "); need = 3; break;
            case FormulaKind::CAnd: op = sym(" ⊓ ", " && "); need = 3; break;
            case FormulaKind::Or: op = sym(" ∨ ", " \\/ "); need = 2; break;
            case FormulaKind::COr: op = sym(" ⊔ ", " || "); need = 2; break;
            default: break;
        }
        std::string out;
        for (std::size_t i = 0; i < f->kids.size(); ++i) {
            if (i) out += op;
            const auto& k = f->kids[i];
            bool mixed = is_junction(k->kind) && is_choice(k->kind) != is_choice(f->kind);
            if (level(k) < need || mixed) out += "(" + formula(k) + ")";
            else out += formula(k);
        }
        return out;
    }

    std::string quantified(const FormulaP& f) {
        std::string q;
        switch (f->kind) {
            case FormulaKind::All: q = sym("∀", "!"); break;
            case FormulaKind::Ex: q = sym("∃", "?"); break;
            case FormulaKind::CAll: q = sym("⊓", "!!"); break;
            case FormulaKind::CEx: q = sym("⊔", "??"); break;
            default: break;
        }
        q += f->var;
        if (st == Style::Ascii) q += ":";
        const auto& b = f->kids[0];
        bool pred_atom = is_literal(b->kind) && b->pred != "=" && b->pred != "<=" && b->pred != "<";
        if (is_quantifier(b->kind)) return q + formula(b);
        if (pred_atom) {
            if (st == Style::Unicode && b->kind == FormulaKind::Atom) return q + " " + formula(b);
            return q + formula(b);
        }
        if (b->kind == FormulaKind::Top || b->kind == FormulaKind::Bot) return q + formula(b);
        return q + "(" + formula(b) + ")";
    }
};

}  // namespace

std::string print(const TermP& t, Style st) { return Printer{st}.term(t); }
std::string print(const FormulaP& f, Style st) { return Printer{st}.formula(f); }

std::string print(const Sequent& s, Style st) {
    Printer p{st};
    if (s.ante.empty()) return p.formula(s.succ);
    std::string out;
    for (std::size_t i = 0; i < s.ante.size(); ++i) {
        if (i) out += ", ";
        out += p.formula(s.ante[i]);
    }
    out += st == Style::Unicode ? " ⟹ " : " => ";
    return out + p.formula(s.succ);
}

}  // namespace clarith
