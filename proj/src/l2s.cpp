#include "tempo/l2s.hpp"

#include <algorithm>
#include <functional>

namespace tempo {

std::vector<std::vector<Elem>> footprint(const Structure& s, const FootprintHooks& hooks) {
  const Vocabulary& voc = *s.vocab();
  const Schema& sch = *s.schema();
  std::vector<std::vector<char>> mark(voc.num_sorts());
  for (size_t so = 0; so < voc.num_sorts(); so++) {
    mark[so].assign(sch.domain_size(static_cast<SortId>(so)), 0);
  }
  for (uint32_t c = 0; c < voc.num_constants(); c++) {
    SortId so = voc.constant(c).sort;
    Elem e = s.get_const(c);
    if (const auto* h = hooks.hook_for(so)) {
      for (Elem z = 0; z < sch.domain_size(so); z++) {
        if (s.get_rel(h->order_rel, {z, e})) mark[so][z] = 1;
      }
    } else {
      mark[so][e] = 1;
    }
  }
  std::vector<std::vector<Elem>> out(voc.num_sorts());
  for (size_t so = 0; so < voc.num_sorts(); so++) {
    for (Elem e = 0; e < mark[so].size(); e++) {
      if (mark[so][e]) out[so].push_back(e);
    }
  }
  return out;
}

std::vector<std::vector<Elem>> trace_footprint(const std::vector<Structure>& pi, size_t i,
                                               const FootprintHooks& hooks) {
  if (i >= pi.size()) throw SpecError::sort("trace footprint index out of range");
  std::vector<std::vector<Elem>> acc = footprint(pi[0], hooks);
  for (size_t k = 1; k <= i; k++) {
    auto fp = footprint(pi[k], hooks);
    for (size_t so = 0; so < acc.size(); so++) {
      std::vector<Elem> merged;
      std::set_union(acc[so].begin(), acc[so].end(), fp[so].begin(), fp[so].end(),
                     std::back_inserter(merged));
      acc[so] = std::move(merged);
    }
  }
  return acc;
}

namespace {

// enumerate assignments of the box variables into F
bool for_each_assignment(const BoxInfo& box, const std::vector<std::vector<Elem>>& F,
                         const std::function<bool(Assignment&)>& visit) {
  size_t n = box.vars.size();
  for (const auto& v : box.vars) {
    if (F[v.sort].empty()) return true;  // no assignments into F: vacuous
  }
  std::vector<size_t> idx(n, 0);
  while (true) {
    Assignment env;
    for (size_t i = 0; i < n; i++) env.bind(box.vars[i].name, F[box.vars[i].sort][idx[i]]);
    if (!visit(env)) return false;
    if (n == 0) return true;
    size_t k = n;
    bool done = false;
    while (k > 0) {
      k--;
      idx[k]++;
      if (idx[k] < F[box.vars[k].sort].size()) break;
      idx[k] = 0;
      if (k == 0) done = true;
    }
    if (done) return true;
  }
}

std::vector<SortedVar> fresh_args_for(const std::vector<SortId>& sorts) {
  std::vector<SortedVar> out;
  for (size_t i = 0; i < sorts.size(); i++) {
    out.push_back(SortedVar{"_u" + std::to_string(i), sorts[i]});
  }
  return out;
}

FormulaPtr conj_in_domain(const std::vector<uint32_t>& d_rels,
                          const std::vector<SortedVar>& vars, const Vocabulary& voc) {
  std::vector<FormulaPtr> cs;
  for (const auto& v : vars) {
    cs.push_back(mk_rel(voc, d_rels[v.sort], {mk_var(v.name, v.sort)}));
  }
  return mk_and(cs);
}

constexpr uint32_t kNone = UINT32_MAX;

}  // namespace

bool segment_fair(const std::vector<Structure>& pi, size_t i, size_t j,
                  const TableauArtifacts& t, const std::vector<std::vector<Elem>>& F) {
  if (i > j || j >= pi.size()) throw SpecError::sort("bad segment indices");
  for (const auto& box : t.boxes) {
    bool ok = for_each_assignment(box, F, [&](Assignment& env) {
      for (size_t k = i; k <= j; k++) {
        StructView sv = StructView::single(pi[k]);
        if (eval(sv, *box.constraint, env)) return true;
      }
      return false;
    });
    if (!ok) return false;
  }
  return true;
}

TransitionSystem augment_with_witnesses(const TransitionSystem& P,
                                        const std::shared_ptr<const TableauArtifacts>& t,
                                        const std::vector<WitnessDecl>& B,
                                        std::vector<uint32_t>* added) {
  TransitionSystem W;
  auto voc = P.vocab->clone();
  std::vector<FormulaPtr> init_parts = {P.init};
  std::vector<uint32_t> new_cons;
  for (const auto& decl : B) {
    std::vector<SortedVar> args;
    FormulaPtr canon = canonicalize(normalize(decl.body), &args);
    if (!t->A.contains(canon)) {
      throw SpecError::unhoused("witnessed formula is not a member of the closure set: " +
                                print_formula(*decl.body, *P.vocab));
    }
    if (decl.const_names.size() != args.size()) {
      throw SpecError::sort(
          "witness constant count does not match the formula's free variables");
    }
    FormulaPtr fo = fo_translate(canon, *t);
    std::unordered_map<std::string, TermPtr> sub;
    for (size_t i = 0; i < args.size(); i++) {
      uint32_t con = voc->add_constant(decl.const_names[i], args[i].sort, /*is_static=*/true);
      new_cons.push_back(con);
      sub["v" + std::to_string(i + 1)] = mk_const(*voc, con);
    }
    FormulaPtr ex = fo;
    const std::vector<SortedVar>& canon_vars = canon->free;
    for (size_t i = canon_vars.size(); i-- > 0;) {
      ex = mk_quant(FKind::Exists, canon_vars[i].name, canon_vars[i].sort, ex);
    }
    init_parts.push_back(mk_implies(ex, substitute(fo, sub)));
  }
  W.vocab = voc;
  W.joint = make_joint_vocab(W.vocab);
  W.tableau = t;
  W.actions = P.actions;
  W.axioms = P.axioms;
  W.init = mk_and(init_parts);
  if (W.actions.empty()) {
    // brute-force systems: rebase the primed half and frame the constants
    uint32_t rn = static_cast<uint32_t>(P.vocab->num_relations());
    uint32_t fn = static_cast<uint32_t>(P.vocab->num_functions());
    uint32_t cn = static_cast<uint32_t>(P.vocab->num_constants());
    uint32_t rn2 = static_cast<uint32_t>(voc->num_relations());
    uint32_t fn2 = static_cast<uint32_t>(voc->num_functions());
    uint32_t cn2 = static_cast<uint32_t>(voc->num_constants());
    FormulaPtr tau = map_symbols(P.tau, [=](SymbolKind k, uint32_t id) {
      switch (k) {
        case SymbolKind::Relation: return id < rn ? id : id - rn + rn2;
        case SymbolKind::Function: return id < fn ? id : id - fn + fn2;
        case SymbolKind::Constant: return id < cn ? id : id - cn + cn2;
      }
      return id;
    });
    std::vector<FormulaPtr> parts = {tau};
    for (uint32_t c : new_cons) {
      parts.push_back(mk_eq(mk_const(*W.joint, c + cn2), mk_const(*W.joint, c)));
    }
    W.tau = mk_and(parts);
  }
  finalize_system(W);
  if (added) *added = new_cons;
  return W;
}

MonitorSystem build_monitor(const TransitionSystem& W,
                            const std::shared_ptr<const TableauArtifacts>& t,
                            const FootprintHooks& hooks) {
  MonitorSystem m;
  m.artifacts = t;
  m.sigma_w = W.vocab;
  m.hooks = hooks;
  const Vocabulary& sw = *W.vocab;
  uint32_t rn_w = static_cast<uint32_t>(sw.num_relations());
  uint32_t fn_w = static_cast<uint32_t>(sw.num_functions());
  uint32_t cn_w = static_cast<uint32_t>(sw.num_constants());

  auto voc = W.vocab->clone();
  MonitorInfo& info = m.info;
  info.frozen_rel = voc->add_relation("l2s_frozen", {});
  info.saved_rel = voc->add_relation("l2s_saved", {});
  for (SortId so = 0; so < sw.num_sorts(); so++) {
    info.d_rels.push_back(voc->add_relation("l2s_d[" + sw.sort_name(so) + "]", {so}));
    info.a_rels.push_back(voc->add_relation("l2s_a[" + sw.sort_name(so) + "]", {so}));
  }
  for (const auto& box : t->boxes) {
    std::vector<SortId> arg_sorts;
    for (const auto& v : box.vars) arg_sorts.push_back(v.sort);
    std::string key = print_formula(*box.body, sw);
    info.w1_rels.push_back(voc->add_relation("l2s_w1[" + key + "]", arg_sorts));
    info.w2_rels.push_back(voc->add_relation("l2s_w2[" + key + "]", arg_sorts));
  }
  info.saved_rel_of.assign(rn_w, kNone);
  info.saved_fun_of.assign(fn_w, kNone);
  info.saved_con_of.assign(cn_w, kNone);
  for (uint32_t r = 0; r < rn_w; r++) {
    if (sw.relation(r).is_static) continue;
    info.saved_rel_of[r] =
        voc->add_relation("l2s_s[" + sw.relation(r).name + "]", sw.relation(r).args);
  }
  for (uint32_t f = 0; f < fn_w; f++) {
    if (sw.function(f).is_static) continue;
    info.saved_fun_of[f] = voc->add_function("l2s_s[" + sw.function(f).name + "]",
                                             sw.function(f).args, sw.function(f).result);
  }
  for (uint32_t c = 0; c < cn_w; c++) {
    if (sw.constant(c).is_static) continue;
    info.saved_con_of[c] =
        voc->add_constant("l2s_s[" + sw.constant(c).name + "]", sw.constant(c).sort);
  }

  TransitionSystem& sys = m.system;
  sys.vocab = voc;
  sys.joint = make_joint_vocab(voc);
  sys.tableau = t;
  sys.axioms = W.axioms;
  const Vocabulary& sm = *voc;
  const Vocabulary& joint = *sys.joint;
  uint32_t cn_m = static_cast<uint32_t>(sm.num_constants());

  auto prime = [&](const FormulaPtr& f) { return prime_formula(f, sm); };

  // the footprint contributed by one state's constants, as a predicate of z
  auto newfp = [&](SortId so, const std::string& z, bool primed) {
    std::vector<FormulaPtr> parts;
    for (uint32_t c = 0; c < cn_w; c++) {
      if (sw.constant(c).sort != so) continue;
      TermPtr ct = mk_const(joint, primed ? c + cn_m : c);
      if (const auto* h = hooks.hook_for(so)) {
        parts.push_back(mk_rel(joint, h->order_rel, {mk_var(z, so), ct}));
      } else {
        parts.push_back(mk_eq(mk_var(z, so), ct));
      }
    }
    return mk_or(parts);
  };

  auto box_args = [&](const BoxInfo& box) {
    std::vector<TermPtr> args;
    for (const auto& v : box.vars) args.push_back(mk_var(v.name, v.sort));
    return args;
  };

  auto add_d_updates = [&](Action& a) {
    for (SortId so = 0; so < sw.num_sorts(); so++) {
      Action::RelUpdate u;
      u.rel = info.d_rels[so];
      u.args = {SortedVar{"_z", so}};
      u.rhs =
          mk_or({mk_rel(joint, info.d_rels[so], {mk_var("_z", so)}), newfp(so, "_z", true)});
      u.post_stage = true;
      a.rel_updates.push_back(std::move(u));
    }
  };

  std::vector<Action> actions;
  for (const auto& base : W.actions) {
    Action a = base;
    add_d_updates(a);
    for (size_t b = 0; b < t->boxes.size(); b++) {
      const auto& box = t->boxes[b];
      auto args = box_args(box);
      {
        Action::RelUpdate u;
        u.rel = info.w1_rels[b];
        u.args = box.vars;
        u.rhs = mk_and(
            {mk_rel(joint, info.w1_rels[b], args),
             mk_or({mk_rel(joint, info.frozen_rel, {}), mk_not(prime(box.constraint))})});
        u.post_stage = true;
        a.rel_updates.push_back(std::move(u));
      }
      {
        Action::RelUpdate u;
        u.rel = info.w2_rels[b];
        u.args = box.vars;
        u.rhs = mk_and(
            {mk_rel(joint, info.w2_rels[b], args),
             mk_not(mk_and({mk_rel(joint, info.saved_rel, {}), prime(box.constraint)}))});
        u.post_stage = true;
        a.rel_updates.push_back(std::move(u));
      }
    }
    actions.push_back(std::move(a));
  }
  info.base_actions = actions.size();

  // freeze: a monitor stutter enabled once the pre-freeze waiting
  // relations have emptied; fixes the abstraction domain
  {
    Action a;
    a.name = "l2s_freeze";
    a.stutter = true;
    std::vector<FormulaPtr> g = {mk_not(mk_rel(sm, info.frozen_rel, {}))};
    for (size_t b = 0; b < t->boxes.size(); b++) {
      const auto& box = t->boxes[b];
      FormulaPtr empt = mk_not(mk_rel(sm, info.w1_rels[b], box_args(box)));
      for (size_t i = box.vars.size(); i-- > 0;) {
        empt = mk_quant(FKind::Forall, box.vars[i].name, box.vars[i].sort, empt);
      }
      g.push_back(empt);
    }
    a.guard = mk_and(g);
    {
      Action::RelUpdate u;
      u.rel = info.frozen_rel;
      u.rhs = mk_true();
      a.rel_updates.push_back(std::move(u));
    }
    for (SortId so = 0; so < sw.num_sorts(); so++) {
      Action::RelUpdate u;
      u.rel = info.a_rels[so];
      u.args = {SortedVar{"_z", so}};
      u.rhs = mk_rel(sm, info.d_rels[so], {mk_var("_z", so)});
      a.rel_updates.push_back(std::move(u));
    }
    info.freeze_action = static_cast<int>(actions.size());
    actions.push_back(std::move(a));
  }

  // save+step: snapshot the pre-state, take a system step, and arm the
  // loop-segment waiting relations over the footprint accumulated so far
  info.save_action_base = actions.size();
  for (const auto& base : W.actions) {
    Action a = base;
    a.name = "l2s_save+" + base.name;
    a.guard = mk_and({base.guard, mk_rel(sm, info.frozen_rel, {}),
                      mk_not(mk_rel(sm, info.saved_rel, {}))});
    {
      Action::RelUpdate u;
      u.rel = info.saved_rel;
      u.rhs = mk_true();
      a.rel_updates.push_back(std::move(u));
    }
    for (uint32_t r = 0; r < rn_w; r++) {
      if (info.saved_rel_of[r] == kNone) continue;
      Action::RelUpdate u;
      u.rel = info.saved_rel_of[r];
      u.args = fresh_args_for(sw.relation(r).args);
      std::vector<TermPtr> ts;
      for (const auto& v : u.args) ts.push_back(mk_var(v.name, v.sort));
      u.rhs = mk_rel(sm, r, ts);
      a.rel_updates.push_back(std::move(u));
    }
    for (uint32_t c = 0; c < cn_w; c++) {
      if (info.saved_con_of[c] == kNone) continue;
      Action::ConstUpdate u;
      u.con = info.saved_con_of[c];
      u.rhs = mk_const(sm, c);
      a.con_updates.push_back(std::move(u));
    }
    for (uint32_t f = 0; f < fn_w; f++) {
      if (info.saved_fun_of[f] == kNone) continue;
      Action::FunUpdate u;
      u.fun = info.saved_fun_of[f];
      u.args = fresh_args_for(sw.function(f).args);
      u.res = "_r";
      std::vector<TermPtr> ts;
      for (const auto& v : u.args) ts.push_back(mk_var(v.name, v.sort));
      u.rhs = mk_eq(mk_app(sm, f, ts), mk_var("_r", sw.function(f).result));
      a.fun_updates.push_back(std::move(u));
    }
    add_d_updates(a);
    for (size_t b = 0; b < t->boxes.size(); b++) {
      const auto& box = t->boxes[b];
      Action::RelUpdate u;
      u.rel = info.w2_rels[b];
      u.args = box.vars;
      u.rhs = mk_and({conj_in_domain(info.d_rels, box.vars, joint), mk_not(box.constraint),
                      mk_not(prime(box.constraint))});
      u.post_stage = true;
      a.rel_updates.push_back(std::move(u));
    }
    actions.push_back(std::move(a));
  }

  sys.actions = std::move(actions);

  // the monitor's initial state is a function of the initial Σ_W state
  sys.base_init = W.init;
  {
    auto rel_derived = [&](uint32_t rel, std::vector<SortedVar> args, FormulaPtr rhs) {
      TransitionSystem::DerivedInit d;
      d.kind = SymbolKind::Relation;
      d.index = rel;
      d.args = std::move(args);
      d.rhs = std::move(rhs);
      sys.derived_inits.push_back(std::move(d));
    };
    rel_derived(info.frozen_rel, {}, mk_false());
    rel_derived(info.saved_rel, {}, mk_false());
    for (SortId so = 0; so < sw.num_sorts(); so++) {
      rel_derived(info.d_rels[so], {SortedVar{"_z", so}}, newfp(so, "_z", false));
      rel_derived(info.a_rels[so], {SortedVar{"_z", so}}, mk_false());
    }
    for (size_t b = 0; b < t->boxes.size(); b++) {
      const auto& box = t->boxes[b];
      rel_derived(info.w1_rels[b], box.vars,
                  mk_and({conj_in_domain(info.d_rels, box.vars, sm), mk_not(box.constraint)}));
      rel_derived(info.w2_rels[b], box.vars, mk_false());
    }
    for (uint32_t r = 0; r < rn_w; r++) {
      if (info.saved_rel_of[r] == kNone) continue;
      auto args = fresh_args_for(sw.relation(r).args);
      std::vector<TermPtr> ts;
      for (const auto& v : args) ts.push_back(mk_var(v.name, v.sort));
      rel_derived(info.saved_rel_of[r], args, mk_rel(sm, r, ts));
    }
    for (uint32_t c = 0; c < cn_w; c++) {
      if (info.saved_con_of[c] == kNone) continue;
      TransitionSystem::DerivedInit d;
      d.kind = SymbolKind::Constant;
      d.index = info.saved_con_of[c];
      d.term = mk_const(sm, c);
      sys.derived_inits.push_back(std::move(d));
    }
    for (uint32_t f = 0; f < fn_w; f++) {
      if (info.saved_fun_of[f] == kNone) continue;
      TransitionSystem::DerivedInit d;
      d.kind = SymbolKind::Function;
      d.index = info.saved_fun_of[f];
      d.args = fresh_args_for(sw.function(f).args);
      d.res = "_r";
      std::vector<TermPtr> ts;
      for (const auto& v : d.args) ts.push_back(mk_var(v.name, v.sort));
      d.rhs = mk_eq(mk_app(sm, f, ts), mk_var("_r", sw.function(f).result));
      sys.derived_inits.push_back(std::move(d));
    }
  }

  finalize_system(sys);

  // error: saved, loop waiting emptied, and the current state is equal to
  // the saved state under projection to the frozen abstraction domain
  {
    std::vector<FormulaPtr> parts = {mk_rel(sm, info.saved_rel, {})};
    for (size_t b = 0; b < t->boxes.size(); b++) {
      const auto& box = t->boxes[b];
      FormulaPtr empt = mk_not(mk_rel(sm, info.w2_rels[b], box_args(box)));
      for (size_t i = box.vars.size(); i-- > 0;) {
        empt = mk_quant(FKind::Forall, box.vars[i].name, box.vars[i].sort, empt);
      }
      parts.push_back(empt);
    }
    auto in_a = [&](const TermPtr& term) {
      return mk_rel(sm, info.a_rels[term->sort], {term});
    };
    for (uint32_t c = 0; c < cn_w; c++) {
      if (info.saved_con_of[c] == kNone) continue;
      TermPtr cur = mk_const(sm, c);
      TermPtr sav = mk_const(sm, info.saved_con_of[c]);
      parts.push_back(mk_iff(in_a(cur), in_a(sav)));
      parts.push_back(mk_implies(in_a(cur), mk_eq(cur, sav)));
    }
    for (uint32_t r = 0; r < rn_w; r++) {
      if (info.saved_rel_of[r] == kNone) continue;
      auto vars = fresh_args_for(sw.relation(r).args);
      std::vector<TermPtr> ts;
      std::vector<FormulaPtr> dom;
      for (const auto& v : vars) {
        ts.push_back(mk_var(v.name, v.sort));
        dom.push_back(in_a(ts.back()));
      }
      FormulaPtr body = mk_implies(
          mk_and(dom), mk_iff(mk_rel(sm, r, ts), mk_rel(sm, info.saved_rel_of[r], ts)));
      for (size_t i = vars.size(); i-- > 0;) {
        body = mk_quant(FKind::Forall, vars[i].name, vars[i].sort, body);
      }
      parts.push_back(body);
    }
    for (uint32_t f = 0; f < fn_w; f++) {
      if (info.saved_fun_of[f] == kNone) continue;
      auto vars = fresh_args_for(sw.function(f).args);
      SortedVar resv{"_r", sw.function(f).result};
      std::vector<TermPtr> ts;
      std::vector<FormulaPtr> dom;
      for (const auto& v : vars) {
        ts.push_back(mk_var(v.name, v.sort));
        dom.push_back(in_a(ts.back()));
      }
      dom.push_back(in_a(mk_var(resv.name, resv.sort)));
      FormulaPtr cur_eq = mk_eq(mk_app(sm, f, ts), mk_var(resv.name, resv.sort));
      FormulaPtr sav_eq =
          mk_eq(mk_app(sm, info.saved_fun_of[f], ts), mk_var(resv.name, resv.sort));
      FormulaPtr body = mk_implies(mk_and(dom), mk_iff(cur_eq, sav_eq));
      auto all = vars;
      all.push_back(resv);
      for (size_t i = all.size(); i-- > 0;) {
        body = mk_quant(FKind::Forall, all[i].name, all[i].sort, body);
      }
      parts.push_back(body);
    }
    m.error_condition = mk_and(parts);
  }
  return m;
}

ProphecySpec mine_prophecy(const std::vector<WitnessDecl>& declared,
                           const std::vector<FormulaPtr>& conjectures) {
  ProphecySpec spec;
  std::vector<std::string> used;
  std::function<void(const FormulaPtr&)> walk = [&](const FormulaPtr& f) {
    if (f->kind == FKind::Globally || f->kind == FKind::Eventually) {
      spec.a_extra.push_back(f);
      return;  // nested temporal content joins through the closure
    }
    for (const auto& k : f->kids) walk(k);
  };
  for (const auto& c : conjectures) {
    walk(c);
    for (const auto& v : c->free) {
      if (std::find(used.begin(), used.end(), v.name) == used.end()) used.push_back(v.name);
    }
  }
  for (const auto& d : declared) {
    bool is_used = false;
    for (const auto& name : d.const_names) {
      if (std::find(used.begin(), used.end(), name) != used.end()) is_used = true;
    }
    if (is_used) spec.witnesses.push_back(d);
  }
  return spec;
}

size_t prophecy_formula_count(const ClosureSet& full, const FormulaPtr& goal) {
  ClosureSet base = subformula_closure({mk_not(goal)});
  std::vector<FormulaPtr> diff;
  for (const auto& item : full.items) {
    if (!base.contains(item)) diff.push_back(item);
  }
  size_t count = 0;
  for (size_t i = 0; i < diff.size(); i++) {
    bool maximal = true;
    for (size_t j = 0; j < diff.size() && maximal; j++) {
      if (i == j) continue;
      ClosureSet sub_j = subformula_closure({diff[j]});
      if (!formula_equal(*diff[i], *diff[j]) && sub_j.contains(diff[i])) maximal = false;
    }
    if (maximal) count++;
  }
  return count;
}

Pipeline build_pipeline(const TransitionSystem& S, const FormulaPtr& goal,
                        const ProphecySpec& spec, const FootprintHooks& hooks) {
  Pipeline p;
  std::vector<FormulaPtr> roots = {mk_not(goal)};
  for (const auto& f : spec.a_extra) roots.push_back(f);
  for (const auto& w : spec.witnesses) roots.push_back(w.body);
  p.A = subformula_closure(roots);
  ProductResult pr = product_system(S, goal, p.A);
  p.artifacts = pr.artifacts;
  p.product = std::move(pr.system);
  p.witness =
      augment_with_witnesses(p.product, p.artifacts, spec.witnesses, &p.witness_constants);
  p.monitor = build_monitor(p.witness, p.artifacts, hooks);
  return p;
}

}  // namespace tempo
