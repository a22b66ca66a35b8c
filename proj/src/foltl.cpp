#include "tempo/foltl.hpp"

namespace tempo {

int ClosureSet::find(const FormulaPtr& canonical) const {
  for (size_t i = 0; i < items.size(); i++) {
    if (items[i]->hash == canonical->hash && formula_equal(*items[i], *canonical)) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

int ClosureSet::insert(const FormulaPtr& canonical) {
  int at = find(canonical);
  if (at >= 0) return at;
  items.push_back(canonical);
  return static_cast<int>(items.size()) - 1;
}

namespace {

void close_over(ClosureSet& set, const FormulaPtr& canonical) {
  set.insert(canonical);
  for (const auto& kid : canonical->kids) {
    close_over(set, canonicalize(kid));
  }
  // atoms and equalities have no formula children
}

}  // namespace

ClosureSet subformula_closure(const std::vector<FormulaPtr>& roots) {
  ClosureSet set;
  for (const auto& r : roots) {
    close_over(set, canonicalize(normalize(r)));
  }
  return set;
}

ClosureSet extend_closure(const ClosureSet& base, const std::vector<FormulaPtr>& roots) {
  ClosureSet set = base;
  for (const auto& r : roots) {
    close_over(set, canonicalize(normalize(r)));
  }
  return set;
}

bool ltl_eval(const LassoTrace& pi, size_t pos, const Formula& f, Assignment& env) {
  switch (f.kind) {
    case FKind::True:
      return true;
    case FKind::False:
      return false;
    case FKind::RelApp:
    case FKind::Eq:
      return eval(pi.at(pos), f, env);
    case FKind::Not:
      return !ltl_eval(pi, pos, *f.kids[0], env);
    case FKind::Or:
      return ltl_eval(pi, pos, *f.kids[0], env) || ltl_eval(pi, pos, *f.kids[1], env);
    case FKind::And:
      return ltl_eval(pi, pos, *f.kids[0], env) && ltl_eval(pi, pos, *f.kids[1], env);
    case FKind::Implies:
      return !ltl_eval(pi, pos, *f.kids[0], env) || ltl_eval(pi, pos, *f.kids[1], env);
    case FKind::Iff:
      return ltl_eval(pi, pos, *f.kids[0], env) == ltl_eval(pi, pos, *f.kids[1], env);
    case FKind::Exists:
    case FKind::Forall: {
      uint32_t n = pi.at(pos).schema()->domain_size(f.var_sort);
      bool is_exists = f.kind == FKind::Exists;
      for (Elem d = 0; d < n; d++) {
        env.bind(f.var, d);
        bool v = ltl_eval(pi, pos, *f.kids[0], env);
        env.pop();
        if (is_exists && v) return true;
        if (!is_exists && !v) return false;
      }
      return !is_exists;
    }
    case FKind::Globally: {
      if (pi.in_loop(pos)) {
        for (size_t q = pi.stem.size(); q < pi.positions(); q++) {
          if (!ltl_eval(pi, q, *f.kids[0], env)) return false;
        }
        return true;
      }
      return ltl_eval(pi, pos, *f.kids[0], env) && ltl_eval(pi, pos + 1, f, env);
    }
    case FKind::Eventually: {
      if (pi.in_loop(pos)) {
        for (size_t q = pi.stem.size(); q < pi.positions(); q++) {
          if (ltl_eval(pi, q, *f.kids[0], env)) return true;
        }
        return false;
      }
      return ltl_eval(pi, pos, *f.kids[0], env) || ltl_eval(pi, pos + 1, f, env);
    }
  }
  throw std::logic_error("ltl_eval: bad kind");
}

bool ltl_eval_closed(const LassoTrace& pi, size_t pos, const Formula& f) {
  if (!f.free.empty()) {
    throw SpecError::sort("closed temporal evaluation of open formula: " + f.free[0].name);
  }
  Assignment env;
  return ltl_eval(pi, pos, f, env);
}

}  // namespace tempo
