#pragma once

#include "clarith/syntax.hpp"

#include <optional>
#include <string>
#include <vector>

namespace clarith {

// Classical first-order reasoning for stability checks. All function and
// predicate letters (including ′, +, ×, ≤ and the pseudoterm builtins) are
// uninterpreted; = is the identity.

enum class Validity { Valid, Refuted, Unknown };
const char* validity_name(Validity v);

struct ProverBudget {
    std::size_t nodes = 100000;  // tableau expansions
    int max_depth = 2;           // Herbrand term depth beyond the formula's own terms
    std::size_t max_terms = 400;
    std::size_t model_budget = 200000;  // interpretations tried by the countermodel search
    int max_model_size = 4;
};

struct ProverResult {
    Validity verdict = Validity::Unknown;
    // For Valid: the ground instantiation terms that closed the tableau, in
    // the term syntax (Skolem functions are named sk_1, sk_2, ...).
    std::vector<std::string> certificate;
    // For Refuted: a short description of the countermodel.
    std::string countermodel;
    std::size_t nodes_used = 0;
};

// Attempts to show that φ is valid; never claims validity wrongly.
ProverResult prove_valid(const FormulaP& phi, const ProverBudget& b = {});
// Checks a certificate produced by prove_valid: the tableau for ¬φ must
// close using only the listed instantiation terms.
bool replay_certificate(const FormulaP& phi, const std::vector<std::string>& terms,
                        std::size_t node_budget = 1000000);
// Exhaustive search for a finite model of ¬φ with domain size ≤ max_size.
std::optional<std::string> find_countermodel(const FormulaP& phi, int max_size,
                                             std::size_t budget);
// prove_valid, then the countermodel search.
ProverResult decide_validity(const FormulaP& phi, const ProverBudget& b = {});

}  // namespace clarith
