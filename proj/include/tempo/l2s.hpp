#pragma once

#include "tempo/tableau.hpp"

namespace tempo {

// Per-sort footprint closure: optionally close element sets downward under
// a declared static total order.
struct FootprintHooks {
  struct Hook {
    bool downward = false;
    uint32_t order_rel = 0;
  };
  std::vector<Hook> per_sort;

  const Hook* hook_for(SortId s) const {
    if (s < per_sort.size() && per_sort[s].downward) return &per_sort[s];
    return nullptr;
  }
};

// fp(s): the elements named by constants, closed under the hooks.
std::vector<std::vector<Elem>> footprint(const Structure& s, const FootprintHooks& hooks);

// f(pi, i): union of the state footprints of pi[0..i]; monotone in i.
std::vector<std::vector<Elem>> trace_footprint(const std::vector<Structure>& pi, size_t i,
                                               const FootprintHooks& hooks);

// Fair segment [i,j]: every fairness-constraint instance over F is met at
// some position of the segment.
bool segment_fair(const std::vector<Structure>& pi, size_t i, size_t j,
                  const TableauArtifacts& t, const std::vector<std::vector<Elem>>& F);

// A prophecy witness: fresh constants serving as witnesses for an
// existential member of A.
struct WitnessDecl {
  FormulaPtr body;                       // ψ with the witness names free
  std::vector<std::string> const_names;  // one constant per free variable
};

// Temporal prophecy: extra closure formulas beyond sub(¬goal), plus the
// witnessed subset B.
struct ProphecySpec {
  std::vector<FormulaPtr> a_extra;
  std::vector<WitnessDecl> witnesses;
};

// T_W: the product system extended with fresh frame-preserved witness
// constants and their initial witnessing obligation. Returns ids of the
// added constants through `added` when non-null.
TransitionSystem augment_with_witnesses(const TransitionSystem& P,
                                        const std::shared_ptr<const TableauArtifacts>& t,
                                        const std::vector<WitnessDecl>& B,
                                        std::vector<uint32_t>* added = nullptr);

// Bookkeeping symbols of the safety monitor.
struct MonitorInfo {
  uint32_t frozen_rel = 0;
  uint32_t saved_rel = 0;
  std::vector<uint32_t> d_rels;   // per sort: accumulated footprint
  std::vector<uint32_t> a_rels;   // per sort: frozen abstraction domain
  std::vector<uint32_t> w1_rels;  // per box: waiting before the freeze
  std::vector<uint32_t> w2_rels;  // per box: waiting between saved states
  std::vector<uint32_t> saved_rel_of;  // per Σ_W relation
  std::vector<uint32_t> saved_fun_of;  // per Σ_W function
  std::vector<uint32_t> saved_con_of;  // per Σ_W constant
  size_t base_actions = 0;   // leading step-wrapped actions
  int freeze_action = -1;
  size_t save_action_base = 0;
};

struct MonitorSystem {
  TransitionSystem system;
  FormulaPtr error_condition;  // closed over the monitor vocabulary
  MonitorInfo info;
  std::shared_ptr<const TableauArtifacts> artifacts;
  VocabPtr sigma_w;
  FootprintHooks hooks;
};

MonitorSystem build_monitor(const TransitionSystem& W,
                            const std::shared_ptr<const TableauArtifacts>& t,
                            const FootprintHooks& hooks);

// Extracts the prophecy content of an inductive invariant: every temporal
// subformula of the conjectures joins A, and the declared witnesses that
// are actually used form B. Conjectures are given with witness constants
// parsed as free variables.
ProphecySpec mine_prophecy(const std::vector<WitnessDecl>& declared,
                           const std::vector<FormulaPtr>& conjectures);

// Number of prophecy formulas beyond the closure of ¬goal: maximal members
// of A that are not subformulas of the goal's own closure.
size_t prophecy_formula_count(const ClosureSet& full, const FormulaPtr& goal);

// Full transformation chain for a system, goal, and prophecy.
struct Pipeline {
  ClosureSet A;
  std::shared_ptr<const TableauArtifacts> artifacts;
  TransitionSystem product;
  TransitionSystem witness;
  std::vector<uint32_t> witness_constants;
  MonitorSystem monitor;
};
Pipeline build_pipeline(const TransitionSystem& S, const FormulaPtr& goal,
                        const ProphecySpec& spec, const FootprintHooks& hooks);

}  // namespace tempo
