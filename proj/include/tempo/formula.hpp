#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "tempo/vocabulary.hpp"

namespace tempo {

struct Term;
struct Formula;
using TermPtr = std::shared_ptr<const Term>;
using FormulaPtr = std::shared_ptr<const Formula>;

enum class TermKind : uint8_t { Var, Const, App, Elem };

// Terms: variables, constants, function applications, and (internal only)
// element literals used by generated invariants and monitor bookkeeping.
// Element literals never appear in user-facing files or exported VCs.
struct Term {
  TermKind kind;
  SortId sort = 0;
  std::string var;             // Var
  uint32_t sym = 0;            // Const / App symbol index
  std::vector<TermPtr> args;   // App
  Elem elem = 0;               // Elem
  uint64_t hash = 0;
};

enum class FKind : uint8_t {
  True,
  False,
  RelApp,
  Eq,
  Not,
  Or,
  And,
  Implies,
  Iff,
  Exists,
  Forall,
  Globally,
  Eventually,
};

struct SortedVar {
  std::string name;
  SortId sort;
  bool operator==(const SortedVar& o) const { return name == o.name && sort == o.sort; }
};

// FO-LTL formulas; plain first-order formulas are the temporal-free
// fragment of the same type. Nodes are immutable and freely shared.
// Free variables are computed at construction and cached per node.
struct Formula {
  FKind kind;
  uint32_t rel = 0;                  // RelApp
  std::vector<TermPtr> terms;        // RelApp args; Eq's two sides
  std::vector<FormulaPtr> kids;
  std::string var;                   // quantifiers
  SortId var_sort = 0;
  std::vector<SortedVar> free;       // free variables, first-occurrence order
  uint64_t hash = 0;
};

// Term builders (well-sortedness checked against the vocabulary).
TermPtr mk_var(const std::string& name, SortId sort);
TermPtr mk_const(const Vocabulary& voc, uint32_t id);
TermPtr mk_app(const Vocabulary& voc, uint32_t fun, std::vector<TermPtr> args);
TermPtr mk_elem(SortId sort, Elem e);

// Formula builders.
FormulaPtr mk_true();
FormulaPtr mk_false();
FormulaPtr mk_rel(const Vocabulary& voc, uint32_t rel, std::vector<TermPtr> args);
FormulaPtr mk_eq(TermPtr a, TermPtr b);
FormulaPtr mk_not(FormulaPtr f);
FormulaPtr mk_binary(FKind kind, FormulaPtr a, FormulaPtr b);
FormulaPtr mk_or(std::vector<FormulaPtr> fs);    // empty -> False
FormulaPtr mk_and(std::vector<FormulaPtr> fs);   // empty -> True
FormulaPtr mk_implies(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_iff(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_quant(FKind kind, const std::string& var, SortId sort, FormulaPtr body);
FormulaPtr mk_globally(FormulaPtr f);
FormulaPtr mk_eventually(FormulaPtr f);

bool term_equal(const Term& a, const Term& b);
bool formula_equal(const Formula& a, const Formula& b);

struct FormulaPtrHash {
  size_t operator()(const FormulaPtr& f) const { return static_cast<size_t>(f->hash); }
};
struct FormulaPtrEq {
  bool operator()(const FormulaPtr& a, const FormulaPtr& b) const {
    return formula_equal(*a, *b);
  }
};

// True when the formula contains no temporal operator.
bool is_first_order(const Formula& f);
int temporal_depth(const Formula& f);

// Rewrites to the core grammar {atoms, =, not, or, exists, globally} with
// double negations cancelled. and/implies/iff/forall/eventually are
// expanded; the result is what closure sets and canonical identity use.
FormulaPtr normalize(const FormulaPtr& f);

// Alpha-canonical form: free variables renamed to v1..vk in order of first
// occurrence, bound variables renamed positionally by quantifier depth.
// `args_out`, when given, receives the original free variables in the
// v1..vk order.
FormulaPtr canonicalize(const FormulaPtr& f, std::vector<SortedVar>* args_out = nullptr);

// Substitutes ground terms for free variables (no capture possible).
FormulaPtr substitute(const FormulaPtr& f,
                      const std::unordered_map<std::string, TermPtr>& map);

// Renames free variables (capture across binders is the caller's problem;
// used for canonical variable juggling where targets are fresh).
FormulaPtr rename_free(const FormulaPtr& f,
                       const std::unordered_map<std::string, std::string>& map);

// Rewrites every symbol index through the given map (hashes are rebuilt).
FormulaPtr map_symbols(const FormulaPtr& f,
                       const std::function<uint32_t(SymbolKind, uint32_t)>& m);

// Rewrites every symbol index by the given per-kind offsets. Used to build
// primed copies of formulas over a joint (current ⊎ next) vocabulary.
FormulaPtr shift_symbols(const FormulaPtr& f, uint32_t rel_off, uint32_t fun_off,
                         uint32_t con_off);

// Replaces constant symbol `con` with the given term everywhere.
FormulaPtr replace_constant(const FormulaPtr& f, uint32_t con, const TermPtr& to);

std::string print_term(const Term& t, const Vocabulary& voc);
std::string print_formula(const Formula& f, const Vocabulary& voc);

// All subformulas of a normalized formula in DFS pre-order (the formula
// itself first), without deduplication.
void collect_subformulas(const FormulaPtr& f, std::vector<FormulaPtr>& out);

}  // namespace tempo
