#pragma once

#include "clarith/cl12.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace clarith {

struct AxiomMatch {
    int number = 0;       // 1..9; 7 is the Peano induction scheme
    FormulaP instance;    // Axiom 7: F(x)
    std::string var;      // Axiom 7: x
};

// Exact match up to bound-variable renaming.
std::optional<AxiomMatch> is_axiom(const FormulaP& sentence);
FormulaP axiom_formula(int k);  // k ∈ {1..6, 8, 9}

struct Cla4Line {
    enum Kind { Axiom, Pa, Lc, Induction } kind = Axiom;
    std::string label;
    FormulaP sentence;
    int axiom = 0;  // 0: recognize
    std::string tag;
    std::vector<std::string> premises;  // LC
    std::optional<Cl12Proof> attached;  // LC
    std::string ind_var, basis, left, right;
};

struct Cla4Proof {
    std::vector<Cla4Line> lines;
};

// One step per line:
//   <label>. <sentence> ; axiom[:k] | pa:<tag> | lc:<labels> [{ ...cl12 lines... }]
//                       | ind:<x> basis=<label> left=<label> right=<label>
// An LC block opened with '{' runs until a line holding only '}'.
Cla4Proof parse_cla4(std::string_view text, const std::string& base_dir = "");
std::string format_cla4(const Cla4Proof& p);

struct Cla4LineReport {
    bool ok = false;
    std::string violation;
    int axiom = 0;
    bool pa_trusted = false;
    bool discharged = false;  // PA line decided by the evaluator
    FormulaP induction_formula;
    std::optional<Cl12Proof> lc_proof;  // attached or found by search
    bool lc_searched = false;
    Cl12Report lc_report;
};

struct AuditReport {
    bool ok = false;
    int first_bad = -1;
    int pa_trusted = 0;
    int trusted_stability = 0;
    bool extraction_ready = false;
    std::vector<std::string> not_ready;
    std::vector<Cla4LineReport> lines;
    std::string summary() const;
};

struct Cla4Options {
    CheckOptions cl12;
    bool allow_pa_trusted = true;
    // Unattached LC steps are justified by bounded search when enabled.
    bool search_missing_lc = true;
    SearchBudget search;
};

// Returns a violation, or nullopt when the step is a correct induction on x.
std::optional<std::string> check_induction(const FormulaP& conclusion, const FormulaP& basis,
                                           const FormulaP& left, const FormulaP& right,
                                           const std::string& x, FormulaP* f_out = nullptr);
// Returns a violation, or nullopt when `proof` proves ⊓E1,…,⊓En ⟹ ⊓F.
std::optional<std::string> check_lc(const FormulaP& conclusion, const std::vector<FormulaP>& premises,
                                    const Cl12Proof& proof, const CheckOptions& opt,
                                    Cl12Report* report = nullptr);
// ⊓-closures equal up to the order of the closing quantifiers.
bool same_closure(const FormulaP& a, const FormulaP& b);
// The sequent an LC step must prove.
Sequent lc_sequent(const FormulaP& conclusion, const std::vector<FormulaP>& premises);

AuditReport check_cla4(const Cla4Proof& proof, const Cla4Options& opt = {});

// Attached proofs with their inferred parameters written out.
Cla4Proof explicate(const Cla4Proof& proof, const AuditReport& report);
// Distinct single edits: axiom number, justification kind, premise labels,
// induction variable or premises, or one edit inside an attached proof.
std::vector<Cla4Proof> mutate_cla4(const Cla4Proof& proof, std::mt19937_64& rng, std::size_t count);

}  // namespace clarith
