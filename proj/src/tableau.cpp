#include "tempo/tableau.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

namespace tempo {

int TableauArtifacts::find_box(const FormulaPtr& canonical_body) const {
  for (size_t i = 0; i < boxes.size(); i++) {
    if (boxes[i].body->hash == canonical_body->hash &&
        formula_equal(*boxes[i].body, *canonical_body)) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

TableauArtifacts make_tableau(const ClosureSet& A, const VocabPtr& sigma) {
  TableauArtifacts t;
  t.A = A;
  t.sigma = sigma;
  auto sigma_a = sigma->clone();
  for (const auto& item : A.items) {
    if (item->kind != FKind::Globally) continue;
    BoxInfo box;
    box.box = item;
    box.body = canonicalize(item->kids[0]);
    box.vars = box.body->free;
    std::vector<SortId> arg_sorts;
    for (const auto& v : box.vars) arg_sorts.push_back(v.sort);
    box.rel = sigma_a->add_relation("<" + print_formula(*box.body, *sigma) + ">",
                                    std::move(arg_sorts));
    t.boxes.push_back(std::move(box));
  }
  t.sigma_a = sigma_a;
  for (auto& box : t.boxes) {
    box.body_fo = fo_translate(box.body, t);
    std::vector<TermPtr> args;
    for (const auto& v : box.vars) args.push_back(mk_var(v.name, v.sort));
    // FO(◻ψ ∨ ¬ψ) = ⟨ψ⟩(v̄) ∨ ¬FO(ψ)
    box.constraint =
        mk_binary(FKind::Or, mk_rel(*t.sigma_a, box.rel, args), mk_not(box.body_fo));
  }
  return t;
}

namespace {

FormulaPtr translate_box_body(const FormulaPtr& body, const TableauArtifacts& t) {
  std::vector<SortedVar> args;
  FormulaPtr canon = canonicalize(normalize(body), &args);
  int idx = t.find_box(canon);
  if (idx < 0) {
    throw SpecError::unhoused("temporal subformula not housed in the closure set: " +
                              print_formula(*body, *t.sigma));
  }
  std::vector<TermPtr> terms;
  for (const auto& v : args) terms.push_back(mk_var(v.name, v.sort));
  return mk_rel(*t.sigma_a, t.boxes[idx].rel, terms);
}

}  // namespace

FormulaPtr fo_translate(const FormulaPtr& f, const TableauArtifacts& t) {
  switch (f->kind) {
    case FKind::True:
    case FKind::False:
    case FKind::RelApp:
    case FKind::Eq:
      return f;
    case FKind::Globally:
      return translate_box_body(f->kids[0], t);
    case FKind::Eventually:
      return mk_not(translate_box_body(mk_not(f->kids[0]), t));
    case FKind::Exists:
    case FKind::Forall:
      return mk_quant(f->kind, f->var, f->var_sort, fo_translate(f->kids[0], t));
    case FKind::Not:
      return mk_not(fo_translate(f->kids[0], t));
    default: {
      auto g = std::make_shared<Formula>(*f);
      for (auto& k : g->kids) k = fo_translate(k, t);
      // rebuild via mk_binary to refresh caches
      return mk_binary(f->kind, g->kids[0], g->kids[1]);
    }
  }
}

FormulaPtr tableau_constraint_formula(const TableauArtifacts& t, const Vocabulary& joint) {
  uint32_t rel_n = static_cast<uint32_t>(t.sigma_a->num_relations());
  std::vector<FormulaPtr> cs;
  for (const auto& box : t.boxes) {
    std::vector<TermPtr> args;
    for (const auto& v : box.vars) args.push_back(mk_var(v.name, v.sort));
    auto cur = mk_rel(joint, box.rel, args);
    auto nxt = mk_rel(joint, box.rel + rel_n, args);
    FormulaPtr bi = mk_iff(cur, mk_and({box.body_fo, nxt}));
    for (size_t i = box.vars.size(); i-- > 0;) {
      bi = mk_quant(FKind::Forall, box.vars[i].name, box.vars[i].sort, bi);
    }
    cs.push_back(bi);
  }
  return mk_and(cs);
}

TransitionSystem tableau_system(const TableauArtifacts& t) {
  TransitionSystem sys;
  sys.vocab = t.sigma_a;
  sys.joint = make_joint_vocab(sys.vocab);
  sys.init = mk_true();
  sys.tau = tableau_constraint_formula(t, *sys.joint);
  sys.tableau = std::make_shared<TableauArtifacts>(t);
  finalize_system(sys);
  return sys;
}

namespace {

// Remaps a two-vocabulary formula when the unprimed half grows: primed
// symbol indices shift from old_base counts to new_base counts.
FormulaPtr rebase_joint(const FormulaPtr& f, const Vocabulary& ob, const Vocabulary& nb) {
  uint32_t rn = static_cast<uint32_t>(ob.num_relations());
  uint32_t fn = static_cast<uint32_t>(ob.num_functions());
  uint32_t cn = static_cast<uint32_t>(ob.num_constants());
  uint32_t rn2 = static_cast<uint32_t>(nb.num_relations());
  uint32_t fn2 = static_cast<uint32_t>(nb.num_functions());
  uint32_t cn2 = static_cast<uint32_t>(nb.num_constants());
  return map_symbols(f, [=](SymbolKind k, uint32_t id) {
    switch (k) {
      case SymbolKind::Relation: return id < rn ? id : id - rn + rn2;
      case SymbolKind::Function: return id < fn ? id : id - fn + fn2;
      case SymbolKind::Constant: return id < cn ? id : id - cn + cn2;
    }
    return id;
  });
}

}  // namespace

ProductResult product_system(const TransitionSystem& S, const FormulaPtr& goal,
                             const ClosureSet& A) {
  FormulaPtr neg_goal = canonicalize(normalize(mk_not(goal)));
  if (!A.contains(neg_goal)) {
    throw SpecError::unhoused("closure set does not contain the negated goal");
  }
  auto t = std::make_shared<TableauArtifacts>(make_tableau(A, S.vocab));
  TransitionSystem sys;
  sys.vocab = t->sigma_a;
  sys.joint = make_joint_vocab(sys.vocab);
  sys.tableau = t;
  sys.actions = S.actions;
  sys.axioms = S.axioms;
  sys.init = mk_and({S.init, fo_translate(neg_goal, *t)});
  if (sys.actions.empty()) {
    FormulaPtr tau_s = rebase_joint(S.tau, *S.vocab, *sys.vocab);
    sys.tau = mk_and({tau_s, tableau_constraint_formula(*t, *sys.joint)});
  }
  finalize_system(sys);
  return ProductResult{std::move(sys), t};
}

std::vector<FairnessInstance> fairness_instances(const TableauArtifacts& t,
                                                 const DomainBound& bound) {
  std::vector<FairnessInstance> out;
  for (uint32_t b = 0; b < t.boxes.size(); b++) {
    const auto& box = t.boxes[b];
    uint64_t total = 1;
    for (const auto& v : box.vars) total *= bound.size[v.sort];
    for (uint64_t k = 0; k < total; k++) {
      FairnessInstance inst;
      inst.box = b;
      inst.args.resize(box.vars.size());
      uint64_t rest = k;
      for (size_t i = box.vars.size(); i-- > 0;) {
        uint32_t n = bound.size[box.vars[i].sort];
        inst.args[i] = static_cast<Elem>(rest % n);
        rest /= n;
      }
      out.push_back(std::move(inst));
    }
  }
  return out;
}

bool instance_holds(const Structure& s, const TableauArtifacts& t,
                    const FairnessInstance& inst) {
  const auto& box = t.boxes[inst.box];
  Assignment env;
  for (size_t i = 0; i < box.vars.size(); i++) env.bind(box.vars[i].name, inst.args[i]);
  StructView sv = StructView::single(s);
  return eval(sv, *box.constraint, env);
}

bool is_fair_trace(const LassoTrace& pi, const TableauArtifacts& t) {
  if (pi.loop.empty()) throw SpecError::sort("fairness of a trace with an empty loop");
  if (!pi.at(0).vocab()->extends(*t.sigma_a)) {
    throw SpecError::sort("trace vocabulary does not extend the tableau vocabulary");
  }
  DomainBound bound = pi.at(0).schema()->bound();
  bound.size.resize(t.sigma_a->num_sorts());
  for (const auto& inst : fairness_instances(t, bound)) {
    bool met = false;
    for (size_t q = pi.stem.size(); q < pi.positions() && !met; q++) {
      met = instance_holds(pi.at(q), t, inst);
    }
    if (!met) return false;
  }
  return true;
}

namespace {

struct Graph {
  std::vector<Structure> states;
  std::vector<std::vector<uint32_t>> succs;
  std::vector<int32_t> parent;
  std::unordered_map<uint64_t, std::vector<uint32_t>> index;

  int find(const Structure& s) const {
    auto it = index.find(s.hash());
    if (it == index.end()) return -1;
    for (uint32_t i : it->second) {
      if (states[i] == s) return static_cast<int>(i);
    }
    return -1;
  }
  uint32_t add(Structure&& s, int32_t par) {
    uint32_t id = static_cast<uint32_t>(states.size());
    index[s.hash()].push_back(id);
    states.push_back(std::move(s));
    succs.emplace_back();
    parent.push_back(par);
    return id;
  }
};

// iterative Tarjan
std::vector<int> scc_decompose(const Graph& g, int& scc_count) {
  size_t n = g.states.size();
  std::vector<int> comp(n, -1), low(n, 0), num(n, -1), stack_of(n, 0);
  std::vector<uint32_t> stk;
  int counter = 0;
  scc_count = 0;
  struct Frame {
    uint32_t v;
    size_t child;
  };
  for (uint32_t root = 0; root < n; root++) {
    if (num[root] != -1) continue;
    std::vector<Frame> frames{{root, 0}};
    num[root] = low[root] = counter++;
    stk.push_back(root);
    stack_of[root] = 1;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.child < g.succs[f.v].size()) {
        uint32_t w = g.succs[f.v][f.child++];
        if (num[w] == -1) {
          num[w] = low[w] = counter++;
          stk.push_back(w);
          stack_of[w] = 1;
          frames.push_back(Frame{w, 0});
        } else if (stack_of[w]) {
          low[f.v] = std::min(low[f.v], num[w]);
        }
      } else {
        if (low[f.v] == num[f.v]) {
          while (true) {
            uint32_t w = stk.back();
            stk.pop_back();
            stack_of[w] = 0;
            comp[w] = scc_count;
            if (w == f.v) break;
          }
          scc_count++;
        }
        uint32_t v = f.v;
        frames.pop_back();
        if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
      }
    }
  }
  return comp;
}

// shortest path inside one SCC from `from` to a state satisfying `accept`,
// with at least `min_steps` steps; returns the path excluding `from`
std::vector<uint32_t> scc_bfs(const Graph& g, const std::vector<int>& comp, int c,
                              uint32_t from, const std::function<bool(uint32_t)>& accept,
                              size_t min_steps) {
  std::unordered_map<uint32_t, int32_t> par;
  std::deque<uint32_t> q;
  if (min_steps == 0 && accept(from)) return {};
  for (uint32_t w : g.succs[from]) {
    if (comp[w] != c || par.count(w)) continue;
    par[w] = -1;
    q.push_back(w);
  }
  while (!q.empty()) {
    uint32_t v = q.front();
    q.pop_front();
    if (accept(v)) {
      std::vector<uint32_t> path{v};
      int32_t p = par[v];
      while (p != -1) {
        path.push_back(static_cast<uint32_t>(p));
        p = par[static_cast<uint32_t>(p)];
      }
      std::reverse(path.begin(), path.end());
      return path;
    }
    for (uint32_t w : g.succs[v]) {
      if (comp[w] != c || par.count(w)) continue;
      par[w] = static_cast<int32_t>(v);
      q.push_back(w);
    }
  }
  throw std::logic_error("scc_bfs: no path inside a strongly connected component");
}

}  // namespace

FairLassoOutcome find_fair_lasso(const TransitionSystem& P, const TableauArtifacts& t,
                                 const DomainBound& bound, size_t node_budget) {
  FairLassoOutcome out;
  Graph g;
  for (auto& s0 : initial_states(P, bound)) {
    Structure s = s0;
    if (g.find(s) < 0) g.add(std::move(s), -1);
  }
  // full reachability
  for (uint32_t i = 0; i < g.states.size(); i++) {
    if (node_budget && g.states.size() > node_budget) {
      out.kind = FairLassoOutcome::Kind::Budget;
      out.explored = g.states.size();
      return out;
    }
    Structure cur = g.states[i];
    successors(P, cur, [&](Structure&& nxt, int) {
      int at = g.find(nxt);
      uint32_t id = at >= 0 ? static_cast<uint32_t>(at)
                            : g.add(std::move(nxt), static_cast<int32_t>(i));
      g.succs[i].push_back(id);
      return true;
    });
  }
  out.explored = g.states.size();

  auto instances = fairness_instances(t, bound);
  int ncomp = 0;
  std::vector<int> comp = scc_decompose(g, ncomp);

  // examine SCCs in order of their smallest state index (deterministic)
  std::vector<uint32_t> scc_rep(ncomp, UINT32_MAX);
  for (uint32_t v = 0; v < g.states.size(); v++) {
    scc_rep[comp[v]] = std::min(scc_rep[comp[v]], v);
  }
  std::vector<int> order(ncomp);
  for (int c = 0; c < ncomp; c++) order[c] = c;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return scc_rep[a] < scc_rep[b]; });

  for (int c : order) {
    // cycle inside: some edge within the SCC
    bool has_edge = false;
    for (uint32_t v = 0; v < g.states.size() && !has_edge; v++) {
      if (comp[v] != c) continue;
      for (uint32_t w : g.succs[v]) {
        if (comp[w] == c) {
          has_edge = true;
          break;
        }
      }
    }
    if (!has_edge) continue;

    bool covered = true;
    for (const auto& inst : instances) {
      bool found = false;
      for (uint32_t v = 0; v < g.states.size() && !found; v++) {
        if (comp[v] == c && instance_holds(g.states[v], t, inst)) found = true;
      }
      if (!found) {
        covered = false;
        break;
      }
    }
    if (!covered) continue;

    // build the witness lasso
    uint32_t entry = scc_rep[c];
    std::vector<uint32_t> stem_idx;
    for (int32_t v = static_cast<int32_t>(entry); v != -1; v = g.parent[v]) {
      stem_idx.push_back(static_cast<uint32_t>(v));
    }
    std::reverse(stem_idx.begin(), stem_idx.end());

    std::vector<uint32_t> loop_idx{entry};
    uint32_t cur = entry;
    for (const auto& inst : instances) {
      bool already = false;
      for (uint32_t v : loop_idx) {
        if (instance_holds(g.states[v], t, inst)) {
          already = true;
          break;
        }
      }
      if (already) continue;
      auto path = scc_bfs(g, comp, c, cur,
                          [&](uint32_t v) { return instance_holds(g.states[v], t, inst); }, 0);
      for (uint32_t v : path) loop_idx.push_back(v);
      if (!path.empty()) cur = path.back();
    }
    auto back = scc_bfs(g, comp, c, cur, [&](uint32_t v) { return v == entry; }, 1);
    for (size_t i = 0; i + 1 < back.size(); i++) loop_idx.push_back(back[i]);

    LassoTrace trace;
    for (size_t i = 0; i + 1 < stem_idx.size(); i++) trace.stem.push_back(g.states[stem_idx[i]]);
    for (uint32_t v : loop_idx) trace.loop.push_back(g.states[v]);

    // self-check: adjacent states are tau-related and the lasso is fair
    for (size_t i = 0; i + 1 < trace.positions(); i++) {
      StructView jv = StructView::joint(trace.at(i), trace.at(i + 1));
      Assignment env;
      if (!eval(jv, *P.tau, env)) throw std::logic_error("fair lasso self-check: tau");
    }
    {
      StructView jv = StructView::joint(trace.at(trace.positions() - 1), trace.at(trace.stem.size()));
      Assignment env;
      if (!eval(jv, *P.tau, env)) throw std::logic_error("fair lasso self-check: wrap");
    }
    if (!is_fair_trace(trace, t)) throw std::logic_error("fair lasso self-check: fairness");

    out.kind = FairLassoOutcome::Kind::Found;
    out.trace = std::move(trace);
    return out;
  }
  out.kind = FairLassoOutcome::Kind::None;
  return out;
}

LassoTrace extend_to_fair(const LassoTrace& sigma_trace, const TableauArtifacts& t,
                          const DomainBound& bound) {
  DomainBound full = bound;
  full.size.resize(t.sigma_a->num_sorts(), 1);
  auto schema = std::make_shared<Schema>(t.sigma_a, full);
  const Vocabulary& sig = *t.sigma;

  auto lift = [&](const Structure& s, size_t pos) {
    StructureBuilder b(schema);
    for (uint32_t c = 0; c < sig.num_constants(); c++) b.set_const(c, s.get_const(c));
    for (uint32_t f = 0; f < sig.num_functions(); f++) {
      for (uint32_t e = 0; e < schema->fun_entries(f); e++) {
        b.set_fun_entry(f, e, s.get_fun_entry(f, e));
      }
    }
    for (uint32_t r = 0; r < sig.num_relations(); r++) {
      for (uint32_t e = 0; e < schema->rel_entries(r); e++) {
        b.set_rel_entry(r, e, s.get_rel_entry(r, e));
      }
    }
    for (const auto& box : t.boxes) {
      for (uint32_t e = 0; e < schema->rel_entries(box.rel); e++) {
        auto tup = schema->rel_tuple(box.rel, e);
        Assignment env;
        for (size_t i = 0; i < tup.size(); i++) env.bind(box.vars[i].name, tup[i]);
        b.set_rel_entry(box.rel, e, ltl_eval(sigma_trace, pos, *box.box, env));
      }
    }
    return b.freeze();
  };

  LassoTrace out;
  for (size_t i = 0; i < sigma_trace.stem.size(); i++) out.stem.push_back(lift(sigma_trace.stem[i], i));
  for (size_t i = 0; i < sigma_trace.loop.size(); i++) {
    out.loop.push_back(lift(sigma_trace.loop[i], sigma_trace.stem.size() + i));
  }
  return out;
}

}  // namespace tempo
