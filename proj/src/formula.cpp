#include "tempo/formula.hpp"

#include <algorithm>
#include <sstream>

namespace tempo {

namespace {

constexpr uint64_t kFnvOffset = 1469598103934665603ull;
constexpr uint64_t kFnvPrime = 1099511628211ull;

uint64_t mix(uint64_t h, uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

uint64_t hash_string(const std::string& s) {
  uint64_t h = kFnvOffset;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return h;
}

uint64_t term_hash(const Term& t) {
  uint64_t h = mix(0x7e72, static_cast<uint64_t>(t.kind));
  h = mix(h, t.sort);
  switch (t.kind) {
    case TermKind::Var: return mix(h, hash_string(t.var));
    case TermKind::Const: return mix(h, t.sym);
    case TermKind::Elem: return mix(h, t.elem);
    case TermKind::App: {
      h = mix(h, t.sym);
      for (const auto& a : t.args) h = mix(h, a->hash);
      return h;
    }
  }
  return h;
}

void merge_free(std::vector<SortedVar>& into, const std::vector<SortedVar>& from) {
  for (const auto& v : from) {
    bool seen = false;
    for (const auto& w : into) {
      if (w.name == v.name) {
        seen = true;
        break;
      }
    }
    if (!seen) into.push_back(v);
  }
}

void term_free_vars(const TermPtr& t, std::vector<SortedVar>& out) {
  switch (t->kind) {
    case TermKind::Var: {
      for (const auto& w : out) {
        if (w.name == t->var) return;
      }
      out.push_back(SortedVar{t->var, t->sort});
      return;
    }
    case TermKind::App:
      for (const auto& a : t->args) term_free_vars(a, out);
      return;
    default:
      return;
  }
}

FormulaPtr finish(std::shared_ptr<Formula> f) {
  uint64_t h = mix(0x9b97, static_cast<uint64_t>(f->kind));
  h = mix(h, f->rel);
  f->free.clear();
  for (const auto& t : f->terms) {
    h = mix(h, t->hash);
    term_free_vars(t, f->free);
  }
  for (const auto& k : f->kids) {
    h = mix(h, k->hash);
    merge_free(f->free, k->free);
  }
  if (f->kind == FKind::Exists || f->kind == FKind::Forall) {
    h = mix(h, hash_string(f->var));
    h = mix(h, f->var_sort);
    auto& fv = f->free;
    fv.erase(std::remove_if(fv.begin(), fv.end(),
                            [&](const SortedVar& v) { return v.name == f->var; }),
             fv.end());
  }
  f->hash = h;
  return f;
}

}  // namespace

TermPtr mk_var(const std::string& name, SortId sort) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Var;
  t->var = name;
  t->sort = sort;
  t->hash = term_hash(*t);
  return t;
}

TermPtr mk_const(const Vocabulary& voc, uint32_t id) {
  if (id >= voc.num_constants()) throw SpecError::sort("bad constant index");
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Const;
  t->sym = id;
  t->sort = voc.constant(id).sort;
  t->hash = term_hash(*t);
  return t;
}

TermPtr mk_app(const Vocabulary& voc, uint32_t fun, std::vector<TermPtr> args) {
  if (fun >= voc.num_functions()) throw SpecError::sort("bad function index");
  const auto& decl = voc.function(fun);
  if (args.size() != decl.args.size()) {
    throw SpecError::sort("arity mismatch applying function " + decl.name);
  }
  for (size_t i = 0; i < args.size(); i++) {
    if (args[i]->sort != decl.args[i]) {
      throw SpecError::sort("sort mismatch in argument " + std::to_string(i + 1) +
                            " of function " + decl.name);
    }
  }
  auto t = std::make_shared<Term>();
  t->kind = TermKind::App;
  t->sym = fun;
  t->sort = decl.result;
  t->args = std::move(args);
  t->hash = term_hash(*t);
  return t;
}

TermPtr mk_elem(SortId sort, Elem e) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Elem;
  t->sort = sort;
  t->elem = e;
  t->hash = term_hash(*t);
  return t;
}

FormulaPtr mk_true() {
  static const FormulaPtr t = [] {
    auto f = std::make_shared<Formula>();
    f->kind = FKind::True;
    return finish(f);
  }();
  return t;
}

FormulaPtr mk_false() {
  static const FormulaPtr t = [] {
    auto f = std::make_shared<Formula>();
    f->kind = FKind::False;
    return finish(f);
  }();
  return t;
}

FormulaPtr mk_rel(const Vocabulary& voc, uint32_t rel, std::vector<TermPtr> args) {
  if (rel >= voc.num_relations()) throw SpecError::sort("bad relation index");
  const auto& decl = voc.relation(rel);
  if (args.size() != decl.args.size()) {
    throw SpecError::sort("arity mismatch applying relation " + decl.name);
  }
  for (size_t i = 0; i < args.size(); i++) {
    if (args[i]->sort != decl.args[i]) {
      throw SpecError::sort("sort mismatch in argument " + std::to_string(i + 1) +
                            " of relation " + decl.name);
    }
  }
  auto f = std::make_shared<Formula>();
  f->kind = FKind::RelApp;
  f->rel = rel;
  f->terms = std::move(args);
  return finish(f);
}

FormulaPtr mk_eq(TermPtr a, TermPtr b) {
  if (a->sort != b->sort) throw SpecError::sort("equality between different sorts");
  auto f = std::make_shared<Formula>();
  f->kind = FKind::Eq;
  f->terms = {std::move(a), std::move(b)};
  return finish(f);
}

FormulaPtr mk_not(FormulaPtr f) {
  auto g = std::make_shared<Formula>();
  g->kind = FKind::Not;
  g->kids = {std::move(f)};
  return finish(g);
}

FormulaPtr mk_binary(FKind kind, FormulaPtr a, FormulaPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind = kind;
  f->kids = {std::move(a), std::move(b)};
  return finish(f);
}

FormulaPtr mk_or(std::vector<FormulaPtr> fs) {
  if (fs.empty()) return mk_false();
  FormulaPtr acc = fs[0];
  for (size_t i = 1; i < fs.size(); i++) acc = mk_binary(FKind::Or, acc, fs[i]);
  return acc;
}

FormulaPtr mk_and(std::vector<FormulaPtr> fs) {
  if (fs.empty()) return mk_true();
  FormulaPtr acc = fs[0];
  for (size_t i = 1; i < fs.size(); i++) acc = mk_binary(FKind::And, acc, fs[i]);
  return acc;
}

FormulaPtr mk_implies(FormulaPtr a, FormulaPtr b) {
  return mk_binary(FKind::Implies, std::move(a), std::move(b));
}

FormulaPtr mk_iff(FormulaPtr a, FormulaPtr b) {
  return mk_binary(FKind::Iff, std::move(a), std::move(b));
}

FormulaPtr mk_quant(FKind kind, const std::string& var, SortId sort, FormulaPtr body) {
  if (kind != FKind::Exists && kind != FKind::Forall) {
    throw std::logic_error("mk_quant: not a quantifier kind");
  }
  auto f = std::make_shared<Formula>();
  f->kind = kind;
  f->var = var;
  f->var_sort = sort;
  f->kids = {std::move(body)};
  return finish(f);
}

FormulaPtr mk_globally(FormulaPtr f) {
  auto g = std::make_shared<Formula>();
  g->kind = FKind::Globally;
  g->kids = {std::move(f)};
  return finish(g);
}

FormulaPtr mk_eventually(FormulaPtr f) {
  auto g = std::make_shared<Formula>();
  g->kind = FKind::Eventually;
  g->kids = {std::move(f)};
  return finish(g);
}

bool term_equal(const Term& a, const Term& b) {
  if (a.kind != b.kind || a.sort != b.sort || a.hash != b.hash) return false;
  switch (a.kind) {
    case TermKind::Var: return a.var == b.var;
    case TermKind::Const: return a.sym == b.sym;
    case TermKind::Elem: return a.elem == b.elem;
    case TermKind::App: {
      if (a.sym != b.sym || a.args.size() != b.args.size()) return false;
      for (size_t i = 0; i < a.args.size(); i++) {
        if (!term_equal(*a.args[i], *b.args[i])) return false;
      }
      return true;
    }
  }
  return false;
}

bool formula_equal(const Formula& a, const Formula& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind || a.hash != b.hash || a.rel != b.rel || a.var != b.var ||
      a.var_sort != b.var_sort || a.terms.size() != b.terms.size() ||
      a.kids.size() != b.kids.size()) {
    return false;
  }
  for (size_t i = 0; i < a.terms.size(); i++) {
    if (!term_equal(*a.terms[i], *b.terms[i])) return false;
  }
  for (size_t i = 0; i < a.kids.size(); i++) {
    if (!formula_equal(*a.kids[i], *b.kids[i])) return false;
  }
  return true;
}

bool is_first_order(const Formula& f) {
  if (f.kind == FKind::Globally || f.kind == FKind::Eventually) return false;
  for (const auto& k : f.kids) {
    if (!is_first_order(*k)) return false;
  }
  return true;
}

int temporal_depth(const Formula& f) {
  int d = 0;
  for (const auto& k : f.kids) d = std::max(d, temporal_depth(*k));
  if (f.kind == FKind::Globally || f.kind == FKind::Eventually) d += 1;
  return d;
}

namespace {

// not with double-negation and boolean-constant cancellation
FormulaPtr nnot(const FormulaPtr& f) {
  if (f->kind == FKind::Not) return f->kids[0];
  if (f->kind == FKind::True) return mk_false();
  if (f->kind == FKind::False) return mk_true();
  return mk_not(f);
}

}  // namespace

FormulaPtr normalize(const FormulaPtr& f) {
  switch (f->kind) {
    case FKind::True:
    case FKind::False:
    case FKind::RelApp:
    case FKind::Eq:
      return f;
    case FKind::Not:
      return nnot(normalize(f->kids[0]));
    case FKind::Or: {
      auto a = normalize(f->kids[0]);
      auto b = normalize(f->kids[1]);
      if (a.get() == f->kids[0].get() && b.get() == f->kids[1].get()) return f;
      return mk_binary(FKind::Or, a, b);
    }
    case FKind::And: {
      auto a = normalize(f->kids[0]);
      auto b = normalize(f->kids[1]);
      return nnot(mk_binary(FKind::Or, nnot(a), nnot(b)));
    }
    case FKind::Implies: {
      auto a = normalize(f->kids[0]);
      auto b = normalize(f->kids[1]);
      return mk_binary(FKind::Or, nnot(a), b);
    }
    case FKind::Iff: {
      auto a = normalize(f->kids[0]);
      auto b = normalize(f->kids[1]);
      auto fwd = mk_binary(FKind::Or, nnot(a), b);
      auto bwd = mk_binary(FKind::Or, nnot(b), a);
      return nnot(mk_binary(FKind::Or, nnot(fwd), nnot(bwd)));
    }
    case FKind::Exists:
      return mk_quant(FKind::Exists, f->var, f->var_sort, normalize(f->kids[0]));
    case FKind::Forall:
      return nnot(mk_quant(FKind::Exists, f->var, f->var_sort, nnot(normalize(f->kids[0]))));
    case FKind::Globally:
      return mk_globally(normalize(f->kids[0]));
    case FKind::Eventually:
      return nnot(mk_globally(nnot(normalize(f->kids[0]))));
  }
  throw std::logic_error("normalize: bad kind");
}

namespace {

struct Renamer {
  // active variable renaming, innermost last
  std::vector<std::pair<std::string, std::string>> env;
  int depth = 0;

  const std::string* lookup(const std::string& name) const {
    for (auto it = env.rbegin(); it != env.rend(); ++it) {
      if (it->first == name) return &it->second;
    }
    return nullptr;
  }

  TermPtr term(const TermPtr& t) {
    switch (t->kind) {
      case TermKind::Var: {
        const std::string* to = lookup(t->var);
        return to ? mk_var(*to, t->sort) : t;
      }
      case TermKind::App: {
        std::vector<TermPtr> args;
        args.reserve(t->args.size());
        for (const auto& a : t->args) args.push_back(term(a));
        auto u = std::make_shared<Term>(*t);
        u->args = std::move(args);
        u->hash = 0;
        return mk_app_raw(u);
      }
      default:
        return t;
    }
  }

  static TermPtr mk_app_raw(std::shared_ptr<Term> t);

  FormulaPtr go(const FormulaPtr& f) {
    switch (f->kind) {
      case FKind::True:
      case FKind::False:
        return f;
      case FKind::RelApp:
      case FKind::Eq: {
        auto g = std::make_shared<Formula>(*f);
        for (auto& t : g->terms) t = term(t);
        return refinish(g);
      }
      case FKind::Exists:
      case FKind::Forall: {
        std::string fresh = "_x" + std::to_string(depth);
        depth++;
        env.emplace_back(f->var, fresh);
        auto body = go(f->kids[0]);
        env.pop_back();
        depth--;
        return mk_quant(f->kind, fresh, f->var_sort, body);
      }
      default: {
        auto g = std::make_shared<Formula>(*f);
        g->free.clear();
        for (auto& k : g->kids) k = go(k);
        return refinish(g);
      }
    }
  }

  static FormulaPtr refinish(std::shared_ptr<Formula> g);
};

TermPtr Renamer::mk_app_raw(std::shared_ptr<Term> t) {
  t->hash = term_hash(*t);
  return t;
}

FormulaPtr Renamer::refinish(std::shared_ptr<Formula> g) { return finish(g); }

}  // namespace

FormulaPtr canonicalize(const FormulaPtr& f, std::vector<SortedVar>* args_out) {
  Renamer r;
  for (size_t i = 0; i < f->free.size(); i++) {
    r.env.emplace_back(f->free[i].name, "v" + std::to_string(i + 1));
  }
  if (args_out) *args_out = f->free;
  return r.go(f);
}

namespace {

struct Substituter {
  const std::unordered_map<std::string, TermPtr>* term_map = nullptr;
  const std::unordered_map<std::string, std::string>* name_map = nullptr;
  std::vector<std::string> shadowed;

  bool is_shadowed(const std::string& name) const {
    for (const auto& s : shadowed) {
      if (s == name) return true;
    }
    return false;
  }

  TermPtr term(const TermPtr& t) {
    switch (t->kind) {
      case TermKind::Var: {
        if (is_shadowed(t->var)) return t;
        if (term_map) {
          auto it = term_map->find(t->var);
          if (it != term_map->end()) {
            if (it->second->sort != t->sort) {
              throw SpecError::sort("substitution changes sort of variable " + t->var);
            }
            return it->second;
          }
        }
        if (name_map) {
          auto it = name_map->find(t->var);
          if (it != name_map->end()) return mk_var(it->second, t->sort);
        }
        return t;
      }
      case TermKind::App: {
        auto u = std::make_shared<Term>(*t);
        for (auto& a : u->args) a = term(a);
        u->hash = term_hash(*u);
        return u;
      }
      default:
        return t;
    }
  }

  FormulaPtr go(const FormulaPtr& f) {
    switch (f->kind) {
      case FKind::True:
      case FKind::False:
        return f;
      case FKind::RelApp:
      case FKind::Eq: {
        auto g = std::make_shared<Formula>(*f);
        g->free.clear();
        for (auto& t : g->terms) t = term(t);
        return finish(g);
      }
      case FKind::Exists:
      case FKind::Forall: {
        shadowed.push_back(f->var);
        auto body = go(f->kids[0]);
        shadowed.pop_back();
        return mk_quant(f->kind, f->var, f->var_sort, body);
      }
      default: {
        auto g = std::make_shared<Formula>(*f);
        g->free.clear();
        for (auto& k : g->kids) k = go(k);
        return finish(g);
      }
    }
  }
};

}  // namespace

FormulaPtr substitute(const FormulaPtr& f,
                      const std::unordered_map<std::string, TermPtr>& map) {
  Substituter s;
  s.term_map = &map;
  return s.go(f);
}

FormulaPtr rename_free(const FormulaPtr& f,
                       const std::unordered_map<std::string, std::string>& map) {
  Substituter s;
  s.name_map = &map;
  return s.go(f);
}

namespace {

TermPtr map_term_symbols(const TermPtr& t,
                         const std::function<uint32_t(SymbolKind, uint32_t)>& m) {
  switch (t->kind) {
    case TermKind::Const: {
      auto u = std::make_shared<Term>(*t);
      u->sym = m(SymbolKind::Constant, t->sym);
      u->hash = term_hash(*u);
      return u;
    }
    case TermKind::App: {
      auto u = std::make_shared<Term>(*t);
      u->sym = m(SymbolKind::Function, t->sym);
      for (auto& a : u->args) a = map_term_symbols(a, m);
      u->hash = term_hash(*u);
      return u;
    }
    default:
      return t;
  }
}

TermPtr replace_constant_term(const TermPtr& t, uint32_t con, const TermPtr& to) {
  switch (t->kind) {
    case TermKind::Const:
      return t->sym == con ? to : t;
    case TermKind::App: {
      auto u = std::make_shared<Term>(*t);
      for (auto& a : u->args) a = replace_constant_term(a, con, to);
      u->hash = term_hash(*u);
      return u;
    }
    default:
      return t;
  }
}

}  // namespace

FormulaPtr map_symbols(const FormulaPtr& f,
                       const std::function<uint32_t(SymbolKind, uint32_t)>& m) {
  auto g = std::make_shared<Formula>(*f);
  if (g->kind == FKind::RelApp) g->rel = m(SymbolKind::Relation, f->rel);
  for (auto& t : g->terms) t = map_term_symbols(t, m);
  for (auto& k : g->kids) k = map_symbols(k, m);
  return finish(g);
}

FormulaPtr shift_symbols(const FormulaPtr& f, uint32_t rel_off, uint32_t fun_off,
                         uint32_t con_off) {
  return map_symbols(f, [=](SymbolKind k, uint32_t id) {
    switch (k) {
      case SymbolKind::Relation: return id + rel_off;
      case SymbolKind::Function: return id + fun_off;
      case SymbolKind::Constant: return id + con_off;
    }
    return id;
  });
}

FormulaPtr replace_constant(const FormulaPtr& f, uint32_t con, const TermPtr& to) {
  auto g = std::make_shared<Formula>(*f);
  g->free.clear();
  for (auto& t : g->terms) t = replace_constant_term(t, con, to);
  for (auto& k : g->kids) k = replace_constant(k, con, to);
  return finish(g);
}

std::string print_term(const Term& t, const Vocabulary& voc) {
  switch (t.kind) {
    case TermKind::Var: return t.var;
    case TermKind::Const: return voc.constant(t.sym).name;
    case TermKind::Elem:
      return "!" + voc.sort_name(t.sort) + ":" + std::to_string(t.elem);
    case TermKind::App: {
      std::string out = "(" + voc.function(t.sym).name;
      for (const auto& a : t.args) out += " " + print_term(*a, voc);
      return out + ")";
    }
  }
  return "?";
}

std::string print_formula(const Formula& f, const Vocabulary& voc) {
  switch (f.kind) {
    case FKind::True: return "true";
    case FKind::False: return "false";
    case FKind::RelApp: {
      if (f.terms.empty()) return voc.relation(f.rel).name;
      std::string out = "(" + voc.relation(f.rel).name;
      for (const auto& t : f.terms) out += " " + print_term(*t, voc);
      return out + ")";
    }
    case FKind::Eq:
      return "(= " + print_term(*f.terms[0], voc) + " " + print_term(*f.terms[1], voc) + ")";
    case FKind::Not: return "(not " + print_formula(*f.kids[0], voc) + ")";
    case FKind::Or:
      return "(or " + print_formula(*f.kids[0], voc) + " " + print_formula(*f.kids[1], voc) + ")";
    case FKind::And:
      return "(and " + print_formula(*f.kids[0], voc) + " " + print_formula(*f.kids[1], voc) + ")";
    case FKind::Implies:
      return "(-> " + print_formula(*f.kids[0], voc) + " " + print_formula(*f.kids[1], voc) + ")";
    case FKind::Iff:
      return "(<-> " + print_formula(*f.kids[0], voc) + " " + print_formula(*f.kids[1], voc) + ")";
    case FKind::Exists:
      return "(exists (" + f.var + " " + voc.sort_name(f.var_sort) + ") " +
             print_formula(*f.kids[0], voc) + ")";
    case FKind::Forall:
      return "(forall (" + f.var + " " + voc.sort_name(f.var_sort) + ") " +
             print_formula(*f.kids[0], voc) + ")";
    case FKind::Globally: return "(globally " + print_formula(*f.kids[0], voc) + ")";
    case FKind::Eventually: return "(eventually " + print_formula(*f.kids[0], voc) + ")";
  }
  return "?";
}

void collect_subformulas(const FormulaPtr& f, std::vector<FormulaPtr>& out) {
  out.push_back(f);
  for (const auto& k : f->kids) collect_subformulas(k, out);
}

}  // namespace tempo
