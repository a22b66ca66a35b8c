#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "tempo/structure.hpp"

namespace tempo {

struct TableauArtifacts;

// A guarded action: existentially quantified parameters, a guard over the
// pre-state, and per-symbol updates. Symbols without an update are framed.
// Updates marked post_stage may read next-state symbols that were fixed in
// earlier stages (system part, then tableau relations); they are used for
// monitor bookkeeping.
struct Action {
  struct RelUpdate {
    uint32_t rel = 0;
    std::vector<SortedVar> args;
    FormulaPtr rhs;  // r'(args) <-> rhs
    bool post_stage = false;
  };
  struct ConstUpdate {
    uint32_t con = 0;
    TermPtr rhs;  // c' = rhs
  };
  struct FunUpdate {
    uint32_t fun = 0;
    std::vector<SortedVar> args;
    std::string res;
    FormulaPtr rhs;  // f'(args) = res <-> rhs; must determine res uniquely
    bool post_stage = false;
  };

  std::string name;
  std::vector<SortedVar> params;
  FormulaPtr guard;  // over the pre-state (+ params)
  std::vector<RelUpdate> rel_updates;
  std::vector<ConstUpdate> con_updates;
  std::vector<FunUpdate> fun_updates;
  // Monitor-only stutter: the system part (including tableau relations) is
  // framed and exempt from the tableau transition constraint.
  bool stutter = false;

  bool updates_rel(uint32_t r) const;
  bool updates_con(uint32_t c) const;
  bool updates_fun(uint32_t f) const;
};

// First-order transition system (Σ, ι, τ). τ is a closed formula over the
// joint vocabulary Σ ⊎ Σ'; when `actions` is nonempty it is their
// disjunction and the explicit engine uses the action structure directly.
struct TransitionSystem {
  VocabPtr vocab;
  VocabPtr joint;
  FormulaPtr init;
  FormulaPtr tau;
  std::vector<Action> actions;
  std::shared_ptr<const TableauArtifacts> tableau;  // tableau-managed relations
  std::vector<FormulaPtr> axioms;  // static-symbol axioms, already conjoined into init

  // Initial-state enumeration splits ι into an enumerated part and
  // deterministic definitions for derived symbols (monitor bookkeeping).
  struct DerivedInit {
    SymbolKind kind = SymbolKind::Relation;
    uint32_t index = 0;
    std::vector<SortedVar> args;  // relation/function argument variables
    std::string res;              // function result variable
    FormulaPtr rhs;               // relation: r(args)<->rhs; function: f(args)=res<->rhs
    TermPtr term;                 // constant: c = term
  };
  FormulaPtr base_init;  // enumerated part; equals init when no derived symbols
  std::vector<DerivedInit> derived_inits;
};

// Appends a primed copy of every symbol (name + "'").
VocabPtr make_joint_vocab(const VocabPtr& v);

// Rewrites a formula over Σ into the same formula over the primed half of
// the joint vocabulary.
FormulaPtr prime_formula(const FormulaPtr& f, const Vocabulary& base);

// Rebuilds `tau` (and `init`/`base_init` bookkeeping) from the action list,
// static frames, and the tableau constraint. Call after mutating actions.
void finalize_system(TransitionSystem& sys);

// Single-action transition formula (∃ params. guard ∧ updates ∧ frames),
// conjoined with the tableau constraint unless the action is a stutter.
FormulaPtr action_formula(const TransitionSystem& sys, const Action& a);

// Enumerates completions of `start` that satisfy `phi`; `pre` supplies the
// current state when `phi` ranges over the joint vocabulary. Deterministic
// order: scalar slots ascending (constants, then function tables), then
// relation bits ascending with false before true. Return false from the
// callback to stop early.
void enumerate_models(const SchemaPtr& schema, PartialState& start, const FormulaPtr& phi,
                      const Structure* pre,
                      const std::function<bool(PartialState&)>& emit);

// All states over `bound` satisfying ι, in enumeration order. When
// `iso_reduce` is set, keeps only the canonical representative of each
// isomorphism orbit (permutations that respect pinned orders).
std::vector<Structure> initial_states(const TransitionSystem& sys, const DomainBound& bound,
                                      bool iso_reduce = false);

// All τ-successors of `s` over the same domain, in deterministic order.
// The callback also receives the index of the producing action (or -1 for
// the brute-force path); return false to stop.
void successors(const TransitionSystem& sys, const Structure& s,
                const std::function<bool(Structure&&, int)>& emit);
std::vector<Structure> successor_list(const TransitionSystem& sys, const Structure& s);

// Emits every trace of length 1..maxlen exactly once (DFS pre-order).
void bounded_traces(const TransitionSystem& sys, const DomainBound& bound, size_t maxlen,
                    const std::function<bool(const std::vector<Structure>&)>& emit);

// Canonical representative under sort permutations that fix every
// pinned-order sort pointwise.
Structure canonical_form(const Structure& s);

}  // namespace tempo
