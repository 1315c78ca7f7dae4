#pragma once

#include "clarith/prover.hpp"
#include "clarith/syntax.hpp"

#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace clarith {

enum class Rule { Wait, OrChoose, AndChoose, ExistsChoose, AllChoose, Replicate };
const char* rule_name(Rule r);
std::optional<Rule> parse_rule_name(std::string_view s);

struct Evidence {
    enum Kind { Builtin, Certificate, Trusted } kind = Builtin;
    std::string ref;                 // certificate file or trust tag
    std::vector<std::string> terms;  // loaded certificate terms
};

// Parameters are optional in files; missing ones are inferred by the checker.
//   side=s | side=a<k>   succedent or antecedent k (0-based, conclusion order)
//   path=<i.j...>        surface occurrence inside that formula
//   i=<n>                component for OrChoose/AndChoose
//   t=<term>             constant or variable for ExistsChoose/AllChoose
//   index=<k>            antecedent position duplicated by Replicate
struct Cl12Line {
    int number = 0;
    Sequent sequent;
    Rule rule = Rule::Wait;
    std::map<std::string, std::string> params;
    std::vector<int> premises;  // line numbers
    Evidence evidence;
};

struct Cl12Proof {
    std::vector<Cl12Line> lines;
    const Sequent& conclusion() const { return lines.back().sequent; }
};

struct ProofFormatError : std::runtime_error {
    int line;
    ProofFormatError(const std::string& msg, int line);
};

// One step per non-blank line:
//   n. <sequent> ; <Rule>[:k=v,...] [; premises=i,j] [; evidence=builtin|cert:<file>|trusted:<tag>]
// '#' starts a comment line. Certificate files are resolved against base_dir.
Cl12Proof parse_cl12(std::string_view text, const std::string& base_dir = "");
std::string format_cl12(const Cl12Proof& p);
std::string format_line(const Cl12Line& l);

// How one premise serves the conclusion. ante_map[j] is the conclusion
// antecedent position that premise antecedent j descends from.
struct PremiseLink {
    enum Kind { Choose, Copy, AndCond, OrCond, AllCond, ExistsCond } kind = Choose;
    int side = -1;  // -1 succedent, k antecedent k of the conclusion
    OccPath path;
    int component = 0;
    std::string fresh;  // AllCond/ExistsCond: the variable standing for the chosen constant
    int premise = -1;   // index into proof lines
    std::vector<int> ante_map;
};

struct LineCheck {
    bool ok = false;
    std::string violation;
    bool trusted = false;
    Validity stability = Validity::Unknown;
    std::vector<PremiseLink> links;  // Choose/Replicate: one; Wait: one per condition instance
    TermP term;                      // ExistsChoose/AllChoose
    std::map<std::string, std::string> resolved_params;
};

struct Cl12Report {
    bool ok = false;
    int first_bad = -1;  // index of the first failing line
    int trusted_steps = 0;
    std::vector<LineCheck> lines;
    std::string summary() const;
};

struct CheckOptions {
    bool allow_trusted = true;
    ProverBudget budget;
    // Wait: every listed premise must be demanded by some condition.
    bool strict_wait_premises = true;
};

// Shared validity cache keyed by the elementarization.
class StabilityOracle {
public:
    explicit StabilityOracle(ProverBudget b = {}) : budget_(b) {}
    ProverResult decide(const FormulaP& elementary);

private:
    ProverBudget budget_;
    std::map<std::string, ProverResult> cache_;
};

LineCheck check_line(const Cl12Proof& proof, std::size_t index, const CheckOptions& opt = {},
                     StabilityOracle* oracle = nullptr);
Cl12Report check_proof(const Cl12Proof& proof, const CheckOptions& opt = {});

// Antecedents compared as multisets, formulas up to bound renaming. On
// success returns, for each antecedent of `have`, its position in `want`.
std::optional<std::vector<int>> match_sequent(const Sequent& want, const Sequent& have);
std::string sequent_key(const Sequent& s);

// The proof with every inferred parameter written out (requires a passing report).
Cl12Proof explicate(const Cl12Proof& proof, const Cl12Report& report);

// Distinct single edits of rule id, path, parameter or premise reference.
std::vector<Cl12Proof> mutate_cl12(const Cl12Proof& proof, std::mt19937_64& rng, std::size_t count);

struct SearchBudget {
    int depth = 10;
    int replicate_cap = 2;
    int numeral_cap = 1;  // numerals 0..cap-1 tried as Choose terms besides variables
    std::size_t nodes = 20000;
};

std::optional<Cl12Proof> search_cl12(const Sequent& goal, const SearchBudget& b = {});

}  // namespace clarith
