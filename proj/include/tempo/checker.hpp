#pragma once

#include <optional>
#include <string>

#include "tempo/l2s.hpp"

namespace tempo {

// A reconstructed abstract lasso: the Σ_W trace, the freeze point i, the
// repeating states j and k, the frozen footprint, and per-instance
// fairness evidence for both fair segments.
struct AbstractLassoWitness {
  std::vector<Structure> trace;  // over Σ_W
  size_t i = 0;
  size_t j = 0;
  size_t k = 0;
  std::vector<std::vector<Elem>> fp_i;  // f(π, i), per sort

  struct Evidence {
    uint32_t box = 0;
    std::vector<Elem> args;
    size_t met_at = 0;
  };
  std::vector<Evidence> evidence_prefix;  // instances over fp(s0), met in [0,i]
  std::vector<Evidence> evidence_loop;    // instances over f(π,j), met in [j,k]
  std::vector<std::string> actions;       // monitored action names along the run
};

struct CounterexampleToInduction {
  enum class Vc { Init, Consecution, Safety };
  Vc vc = Vc::Init;
  Structure state;
  std::optional<Structure> post;  // consecution only
};

struct CheckResult {
  enum class Kind { LassoFound, NoLassoWithinBound, InvariantHolds, Cti, Budget };
  Kind kind = Kind::NoLassoWithinBound;
  std::optional<AbstractLassoWitness> witness;
  std::optional<CounterexampleToInduction> cti;
  size_t explored = 0;
  std::string note;
};

struct SearchLimits {
  size_t node_budget = 0;    // 0 = unlimited
  double time_budget = 0.0;  // seconds; 0 = unlimited
};

// Breadth-first search for a reachable monitor error, up to maxlen
// monitored steps. Found witnesses are independently re-validated before
// being reported.
CheckResult search_abstract_lasso(const MonitorSystem& m, const DomainBound& bound,
                                  size_t maxlen, const SearchLimits& limits = {});

// Checks a witness directly against the abstract-lasso definition: trace
// validity, fairness of [0,i] over fp(s0) and [j,k] over f(π,j), and
// equality of the j/k projections to f(π,i).
bool validate_witness(const TransitionSystem& W, const TableauArtifacts& t,
                      const FootprintHooks& hooks, const AbstractLassoWitness& w,
                      std::string* why = nullptr);

// Bounded-domain check of the three verification conditions by structure
// enumeration: (1) init ⇒ inv, (2) inv ∧ τ ⇒ inv', (3) inv ⇒ ¬error.
CheckResult check_inductive_invariant(const MonitorSystem& m, const FormulaPtr& inv,
                                      const DomainBound& bound,
                                      const SearchLimits& limits = {});

// SMT-LIB 2 text (declare-sort / declare-fun / assert / check-sat) for the
// three VCs, each negated for unsat checking.
struct VcExport {
  std::string init;
  std::string consecution;
  std::string safety;
};
VcExport export_vcs(const MonitorSystem& m, const FormulaPtr& inv);

// Closure-under-first-order-reasoning harness: if every premise (φ_i with
// its prophecy) admits no abstract lasso at the bound, the conclusion ψ
// checked with the union of the premises' prophecy must admit none either.
struct ClosureCase {
  FormulaPtr goal;
  ProphecySpec spec;
};
struct ClosureReport {
  bool premises_ok = false;
  bool conclusion_ok = false;
  bool violation = false;  // premises passed, conclusion found a lasso
  std::vector<std::string> lines;
};
ClosureReport closure_harness(const TransitionSystem& S,
                              const std::vector<ClosureCase>& premises,
                              const FormulaPtr& conclusion, const FootprintHooks& hooks,
                              const DomainBound& bound, size_t maxlen);

// Union of prophecy specs with witness constants renamed apart.
ProphecySpec union_prophecy(const std::vector<ProphecySpec>& specs);

}  // namespace tempo
