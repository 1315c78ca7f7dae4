#pragma once

#include "clarith/natural.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace clarith {

struct Term;
struct Formula;
using TermP = std::shared_ptr<const Term>;
using FormulaP = std::shared_ptr<const Formula>;

enum class TermKind { Var, Const, Succ, Add, Mul, App, Len, Pow2, BitAt, Substr };

struct Term {
    TermKind kind;
    std::string name;   // Var, App
    Natural value;      // Const
    std::vector<TermP> args;
};

// Term constructors.
TermP var(std::string name);
TermP num(Natural n);
TermP succ(TermP t);
TermP add(TermP a, TermP b);
TermP mul(TermP a, TermP b);
TermP app(std::string f, std::vector<TermP> args);
TermP len(TermP t);
TermP pow2(TermP t);
TermP bit_at(TermP x, TermP y);
TermP substr(TermP x, TermP y, TermP z);
// t𝟎 = 0′′×t and t𝟏 = (0′′×t)′.
TermP bit0(TermP t);
TermP bit1(TermP t);

enum class FormulaKind { Top, Bot, Atom, NegAtom, And, Or, CAnd, COr, All, Ex, CAll, CEx };

// Atoms carry a predicate name; "=", "<=" and "<" are the builtin ones.
// ∧, ∨, ⊓, ⊔ take two or more components.
struct Formula {
    FormulaKind kind;
    std::string pred;
    std::vector<TermP> args;
    std::vector<FormulaP> kids;
    std::string var;  // quantifiers; body is kids[0]
};

FormulaP top();
FormulaP bot();
FormulaP atom(std::string pred, std::vector<TermP> args);
FormulaP eq(TermP a, TermP b);
FormulaP neq(TermP a, TermP b);
FormulaP conj(std::vector<FormulaP> kids);
FormulaP disj(std::vector<FormulaP> kids);
FormulaP cconj(std::vector<FormulaP> kids);
FormulaP cdisj(std::vector<FormulaP> kids);
FormulaP junction(FormulaKind k, std::vector<FormulaP> kids);
FormulaP quant(FormulaKind k, std::string v, FormulaP body);
FormulaP implies(FormulaP a, FormulaP b);  // ¬a ∨ b
FormulaP negate(const FormulaP& f);         // pushes ¬ down to atoms

bool is_junction(FormulaKind k);
bool is_quantifier(FormulaKind k);
bool is_choice(FormulaKind k);
bool is_literal(FormulaKind k);

struct Sequent {
    std::vector<FormulaP> ante;
    FormulaP succ;
};

using OccPath = std::vector<int>;

struct SyntaxError : std::runtime_error {
    std::size_t offset;
    SyntaxError(const std::string& msg, std::size_t off);
};

struct CaptureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Structural equality (bound names significant) and α-equivalence.
bool same_term(const TermP& a, const TermP& b);
bool same(const FormulaP& a, const FormulaP& b);
std::string alpha_key(const FormulaP& f);
bool alpha_equal(const FormulaP& a, const FormulaP& b);
std::string term_key(const TermP& t);

std::set<std::string> free_vars(const TermP& t);
std::set<std::string> free_vars(const FormulaP& f);
std::set<std::string> bound_vars(const FormulaP& f);
std::set<std::string> all_vars(const FormulaP& f);
std::set<std::string> free_vars(const Sequent& s);
std::set<std::string> all_vars(const Sequent& s);
bool is_ground(const TermP& t);

TermP substitute(const TermP& t, const std::map<std::string, TermP>& sub);
// Throws CaptureError if a substituted term would be captured.
FormulaP substitute(const FormulaP& f, const std::map<std::string, TermP>& sub);
FormulaP substitute(const FormulaP& f, const std::string& x, const TermP& t);
// Capture-free renaming of free occurrences of x to y.
FormulaP rename_free(const FormulaP& f, const std::string& x, const std::string& y);

FormulaP elementarize(const FormulaP& f);
FormulaP elementarize(const Sequent& s);
bool is_elementary(const FormulaP& f);

// Occurrences reachable from the root without entering a choice operator.
std::vector<std::pair<OccPath, FormulaP>> surface_occurrences(const FormulaP& f);
bool is_surface_path(const FormulaP& f, const OccPath& p);
FormulaP subformula_at(const FormulaP& f, const OccPath& p);
FormulaP replace_at(const FormulaP& f, const OccPath& p, const FormulaP& h);
std::string path_string(const OccPath& p);
OccPath parse_path(const std::string& s);

enum class ClosureKind { Choice, Blind };
FormulaP closure(const FormulaP& f, ClosureKind kind);

bool is_sizebound(const FormulaP& s, const std::string& x);
// Returns the path of the first offending choice quantifier, if any.
std::optional<OccPath> unbounded_quantifier(const FormulaP& f);
bool is_polynomially_bounded(const FormulaP& f);

// Variable naming.
std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);
// Renames bound variables so that no variable is both free and bound, and
// no quantifier rebinds a variable already bound above it.
FormulaP hygienic(const FormulaP& f, const std::set<std::string>& reserved_free);
Sequent hygienic(const Sequent& s);
bool is_hygienic(const Sequent& s);

// Number of ¬ in the formula (negated atoms).
int negation_count(const FormulaP& f);
std::size_t formula_size(const FormulaP& f);

}  // namespace clarith
