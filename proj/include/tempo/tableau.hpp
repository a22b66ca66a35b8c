#pragma once

#include <optional>

#include "tempo/foltl.hpp"
#include "tempo/system.hpp"

namespace tempo {

// One fresh relation ⟨ψ⟩ per ◻ψ in the closure set, with arity given by
// ψ's free variables (canonical v1..vk order).
struct BoxInfo {
  FormulaPtr box;                // canonical ◻ψ
  FormulaPtr body;               // canonical ψ
  uint32_t rel = 0;              // relation index of ⟨ψ⟩ in sigma_a
  std::vector<SortedVar> vars;   // v1..vk and their sorts
  FormulaPtr body_fo;            // FO(ψ) over sigma_a
  FormulaPtr constraint;         // FO(◻ψ ∨ ¬ψ) over sigma_a, free v1..vk
};

// Tableau vocabulary and bookkeeping for a subformula-closed set A over a
// base vocabulary Σ.
struct TableauArtifacts {
  ClosureSet A;
  VocabPtr sigma;
  VocabPtr sigma_a;
  std::vector<BoxInfo> boxes;

  int find_box(const FormulaPtr& canonical_body) const;
};

TableauArtifacts make_tableau(const ClosureSet& A, const VocabPtr& sigma);

// The first-order representation FO(·): boxes become their fresh
// relations, everything else is structural. Every ◻-subformula must be
// housed in A.
FormulaPtr fo_translate(const FormulaPtr& f, const TableauArtifacts& t);

// τ_A over a joint vocabulary whose unprimed half is Σ_A.
FormulaPtr tableau_constraint_formula(const TableauArtifacts& t, const Vocabulary& joint);

// T_A = (Σ_A, true, τ_A) with τ_A the conjunction of the box update
// biconditionals. The Σ symbols are unconstrained.
TransitionSystem tableau_system(const TableauArtifacts& t);

// Product of a system with the tableau of ¬goal over A. A must contain
// ¬goal (after normalization/canonicalization).
struct ProductResult {
  TransitionSystem system;
  std::shared_ptr<const TableauArtifacts> artifacts;
};
ProductResult product_system(const TransitionSystem& S, const FormulaPtr& goal,
                             const ClosureSet& A);

// Fairness of an ultimately periodic trace: every constraint instance is
// met at least once inside the loop, for every assignment over the full
// domain.
bool is_fair_trace(const LassoTrace& pi, const TableauArtifacts& t);

// Materialized fairness-constraint instances at a fixed bound.
struct FairnessInstance {
  uint32_t box = 0;
  std::vector<Elem> args;
};
std::vector<FairnessInstance> fairness_instances(const TableauArtifacts& t,
                                                 const DomainBound& bound);
bool instance_holds(const Structure& s, const TableauArtifacts& t, const FairnessInstance& inst);

// Explicit fair-lasso search over the reachable product graph at a fixed
// bound: SCC decomposition plus coverage of every constraint instance.
struct FairLassoOutcome {
  enum class Kind { None, Found, Budget } kind = Kind::None;
  std::optional<LassoTrace> trace;
  size_t explored = 0;
};
FairLassoOutcome find_fair_lasso(const TransitionSystem& P, const TableauArtifacts& t,
                                 const DomainBound& bound, size_t node_budget = 0);

// Lifts a Σ-sequence to a fair trace of T_A interpreting each ⟨ψ⟩ by the
// temporal truth of ◻ψ at that position.
LassoTrace extend_to_fair(const LassoTrace& sigma_trace, const TableauArtifacts& t,
                          const DomainBound& bound);

}  // namespace tempo
