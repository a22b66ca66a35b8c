#pragma once

#include <unordered_map>
#include <vector>

#include "tempo/structure.hpp"

namespace tempo {

// A finite set of FO-LTL formulas closed under subformulas. Members are
// normalized and alpha-canonical (free variables v1..vk by first
// occurrence, bound variables positional), in deterministic
// first-occurrence order.
struct ClosureSet {
  std::vector<FormulaPtr> items;

  bool contains(const FormulaPtr& canonical) const { return find(canonical) >= 0; }
  int find(const FormulaPtr& canonical) const;
  // Inserts a canonical formula if new; returns its index.
  int insert(const FormulaPtr& canonical);
  size_t size() const { return items.size(); }
};

// Minimal subformula-closed superset of the given roots. Roots are
// normalized and canonicalized first.
ClosureSet subformula_closure(const std::vector<FormulaPtr>& roots);

// Extends `base` with more roots (the result contains base's members with
// their indices preserved).
ClosureSet extend_closure(const ClosureSet& base, const std::vector<FormulaPtr>& roots);

// An ultimately periodic trace: a finite stem followed by a loop repeated
// forever. All states share one domain (one schema).
struct LassoTrace {
  std::vector<Structure> stem;
  std::vector<Structure> loop;

  size_t positions() const { return stem.size() + loop.size(); }
  const Structure& at(size_t i) const {
    return i < stem.size() ? stem[i] : loop[i - stem.size()];
  }
  size_t next(size_t i) const { return i + 1 < positions() ? i + 1 : stem.size(); }
  bool in_loop(size_t i) const { return i >= stem.size(); }
};

// FO-LTL truth at a position of an ultimately periodic trace. On loop
// positions ◻ψ holds iff ψ holds at every loop position; stem positions
// propagate backward through the expansion law.
bool ltl_eval(const LassoTrace& pi, size_t pos, const Formula& f, Assignment& env);
bool ltl_eval_closed(const LassoTrace& pi, size_t pos, const Formula& f);

}  // namespace tempo
