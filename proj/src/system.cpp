#include "tempo/system.hpp"

#include <algorithm>
#include <numeric>

#include "tempo/tableau.hpp"

namespace tempo {

bool Action::updates_rel(uint32_t r) const {
  for (const auto& u : rel_updates) {
    if (u.rel == r) return true;
  }
  return false;
}
bool Action::updates_con(uint32_t c) const {
  for (const auto& u : con_updates) {
    if (u.con == c) return true;
  }
  return false;
}
bool Action::updates_fun(uint32_t f) const {
  for (const auto& u : fun_updates) {
    if (u.fun == f) return true;
  }
  return false;
}

VocabPtr make_joint_vocab(const VocabPtr& v) {
  auto j = v->clone();
  for (uint32_t r = 0; r < v->num_relations(); r++) {
    const auto& d = v->relation(r);
    j->add_relation(d.name + "'", d.args, d.is_static, false);
  }
  for (uint32_t f = 0; f < v->num_functions(); f++) {
    const auto& d = v->function(f);
    j->add_function(d.name + "'", d.args, d.result, d.is_static);
  }
  for (uint32_t c = 0; c < v->num_constants(); c++) {
    const auto& d = v->constant(c);
    j->add_constant(d.name + "'", d.sort, d.is_static);
  }
  return j;
}

FormulaPtr prime_formula(const FormulaPtr& f, const Vocabulary& base) {
  return shift_symbols(f, static_cast<uint32_t>(base.num_relations()),
                       static_cast<uint32_t>(base.num_functions()),
                       static_cast<uint32_t>(base.num_constants()));
}

namespace {

bool is_box_rel(const TransitionSystem& sys, uint32_t r) {
  if (!sys.tableau) return false;
  for (const auto& b : sys.tableau->boxes) {
    if (b.rel == r) return true;
  }
  return false;
}

std::vector<SortedVar> fresh_vars(const std::vector<SortId>& sorts, const char* prefix) {
  std::vector<SortedVar> out;
  for (size_t i = 0; i < sorts.size(); i++) {
    out.push_back(SortedVar{prefix + std::to_string(i), sorts[i]});
  }
  return out;
}

FormulaPtr forall_wrap(const std::vector<SortedVar>& vars, FormulaPtr body) {
  for (size_t i = vars.size(); i-- > 0;) {
    body = mk_quant(FKind::Forall, vars[i].name, vars[i].sort, body);
  }
  return body;
}

FormulaPtr exists_wrap(const std::vector<SortedVar>& vars, FormulaPtr body) {
  for (size_t i = vars.size(); i-- > 0;) {
    body = mk_quant(FKind::Exists, vars[i].name, vars[i].sort, body);
  }
  return body;
}

}  // namespace

FormulaPtr action_formula(const TransitionSystem& sys, const Action& a) {
  const Vocabulary& voc = *sys.vocab;
  const Vocabulary& joint = *sys.joint;
  uint32_t rel_n = static_cast<uint32_t>(voc.num_relations());
  uint32_t fun_n = static_cast<uint32_t>(voc.num_functions());
  uint32_t con_n = static_cast<uint32_t>(voc.num_constants());

  std::vector<FormulaPtr> cs;
  cs.push_back(a.guard);

  for (uint32_t r = 0; r < rel_n; r++) {
    const Action::RelUpdate* upd = nullptr;
    for (const auto& u : a.rel_updates) {
      if (u.rel == r) upd = &u;
    }
    if (upd) {
      std::vector<TermPtr> args;
      for (const auto& v : upd->args) args.push_back(mk_var(v.name, v.sort));
      cs.push_back(forall_wrap(upd->args, mk_iff(mk_rel(joint, r + rel_n, args), upd->rhs)));
      continue;
    }
    if (is_box_rel(sys, r) && !a.stutter) continue;  // governed by tau_A
    auto vars = fresh_vars(voc.relation(r).args, "_f");
    std::vector<TermPtr> args;
    for (const auto& v : vars) args.push_back(mk_var(v.name, v.sort));
    cs.push_back(
        forall_wrap(vars, mk_iff(mk_rel(joint, r + rel_n, args), mk_rel(joint, r, args))));
  }
  for (uint32_t c = 0; c < con_n; c++) {
    const Action::ConstUpdate* upd = nullptr;
    for (const auto& u : a.con_updates) {
      if (u.con == c) upd = &u;
    }
    if (upd) {
      cs.push_back(mk_eq(mk_const(joint, c + con_n), upd->rhs));
    } else {
      cs.push_back(mk_eq(mk_const(joint, c + con_n), mk_const(joint, c)));
    }
  }
  for (uint32_t f = 0; f < fun_n; f++) {
    const Action::FunUpdate* upd = nullptr;
    for (const auto& u : a.fun_updates) {
      if (u.fun == f) upd = &u;
    }
    const auto& decl = voc.function(f);
    if (upd) {
      std::vector<TermPtr> args;
      for (const auto& v : upd->args) args.push_back(mk_var(v.name, v.sort));
      auto resv = SortedVar{upd->res, decl.result};
      auto lhs = mk_eq(mk_app(joint, f + fun_n, args), mk_var(resv.name, resv.sort));
      auto vars = upd->args;
      vars.push_back(resv);
      cs.push_back(forall_wrap(vars, mk_iff(lhs, upd->rhs)));
      continue;
    }
    auto vars = fresh_vars(decl.args, "_f");
    std::vector<TermPtr> args;
    for (const auto& v : vars) args.push_back(mk_var(v.name, v.sort));
    cs.push_back(
        forall_wrap(vars, mk_eq(mk_app(joint, f + fun_n, args), mk_app(joint, f, args))));
  }

  FormulaPtr body = exists_wrap(a.params, mk_and(cs));
  if (sys.tableau && !a.stutter && !sys.tableau->boxes.empty()) {
    body = mk_and({body, tableau_constraint_formula(*sys.tableau, joint)});
  }
  return body;
}

void finalize_system(TransitionSystem& sys) {
  if (!sys.joint) sys.joint = make_joint_vocab(sys.vocab);
  const Vocabulary& voc = *sys.vocab;
  for (const auto& a : sys.actions) {
    for (const auto& u : a.rel_updates) {
      if (voc.relation(u.rel).is_static) {
        throw SpecError::model("action " + a.name + " updates static relation " +
                               voc.relation(u.rel).name);
      }
      if (is_box_rel(sys, u.rel)) {
        throw SpecError::model("action " + a.name + " updates tableau relation " +
                               voc.relation(u.rel).name);
      }
    }
    for (const auto& u : a.con_updates) {
      if (voc.constant(u.con).is_static) {
        throw SpecError::model("action " + a.name + " updates static constant " +
                               voc.constant(u.con).name);
      }
    }
    for (const auto& u : a.fun_updates) {
      if (voc.function(u.fun).is_static) {
        throw SpecError::model("action " + a.name + " updates static function " +
                               voc.function(u.fun).name);
      }
    }
  }
  if (!sys.actions.empty()) {
    std::vector<FormulaPtr> ds;
    for (const auto& a : sys.actions) ds.push_back(action_formula(sys, a));
    sys.tau = mk_or(ds);
  }
  if (!sys.base_init) sys.base_init = sys.init;
  if (!sys.derived_inits.empty()) {
    std::vector<FormulaPtr> defs = {sys.base_init};
    for (const auto& d : sys.derived_inits) {
      switch (d.kind) {
        case SymbolKind::Relation: {
          std::vector<TermPtr> args;
          for (const auto& v : d.args) args.push_back(mk_var(v.name, v.sort));
          defs.push_back(forall_wrap(d.args, mk_iff(mk_rel(voc, d.index, args), d.rhs)));
          break;
        }
        case SymbolKind::Constant:
          defs.push_back(mk_eq(mk_const(voc, d.index), d.term));
          break;
        case SymbolKind::Function: {
          std::vector<TermPtr> args;
          for (const auto& v : d.args) args.push_back(mk_var(v.name, v.sort));
          auto vars = d.args;
          vars.push_back(SortedVar{d.res, voc.function(d.index).result});
          auto lhs = mk_eq(mk_app(voc, d.index, args),
                           mk_var(d.res, voc.function(d.index).result));
          defs.push_back(forall_wrap(vars, mk_iff(lhs, d.rhs)));
          break;
        }
      }
    }
    sys.init = mk_and(defs);
  } else if (!sys.init) {
    sys.init = sys.base_init;
  }
}

namespace {

struct ModelEnum {
  const Schema& sch;
  PartialState& st;
  const FormulaPtr& phi;
  PartialView view;
  const std::function<bool(PartialState&)>& emit;
  std::vector<uint16_t> slot_size;
  bool stopped = false;

  ModelEnum(const SchemaPtr& schema, PartialState& start, const FormulaPtr& p,
            const Structure* pre, const std::function<bool(PartialState&)>& e)
      : sch(*schema), st(start), phi(p), emit(e) {
    view.part = &st;
    if (pre) {
      view.cur = pre;
      const auto& bv = *pre->vocab();
      view.rel_split = static_cast<uint32_t>(bv.num_relations());
      view.fun_split = static_cast<uint32_t>(bv.num_functions());
      view.con_split = static_cast<uint32_t>(bv.num_constants());
    }
    const Vocabulary& voc = *sch.vocab();
    slot_size.resize(sch.num_scalars());
    for (uint32_t c = 0; c < voc.num_constants(); c++) {
      slot_size[sch.const_slot(c)] =
          static_cast<uint16_t>(sch.domain_size(voc.constant(c).sort));
    }
    for (uint32_t f = 0; f < voc.num_functions(); f++) {
      uint16_t n = static_cast<uint16_t>(sch.domain_size(voc.function(f).result));
      for (uint32_t e2 = 0; e2 < sch.fun_entries(f); e2++) {
        slot_size[sch.fun_slot_base(f) + e2] = n;
      }
    }
  }

  Tri check() {
    Assignment env;
    return eval3(view, *phi, env);
  }

  void run() {
    Tri t = check();
    if (t == Tri::False) return;
    go(0, 0, t == Tri::True);
  }

  void go(uint32_t slot, uint32_t bit, bool settled) {
    if (stopped) return;
    while (slot < sch.num_scalars() && st.scalar_known(slot)) slot++;
    if (slot < sch.num_scalars()) {
      for (uint16_t v = 0; v < slot_size[slot]; v++) {
        st.set_scalar(slot, v);
        if (settled) {
          go(slot + 1, bit, true);
        } else {
          Tri t = check();
          if (t != Tri::False) go(slot + 1, bit, t == Tri::True);
        }
        if (stopped) break;
      }
      st.clear_scalar(slot);
      return;
    }
    while (bit < sch.num_bits() && st.bit_known_at(bit)) bit++;
    if (bit < sch.num_bits()) {
      for (int v = 0; v <= 1; v++) {
        st.set_bit(bit, v != 0);
        if (settled) {
          go(slot, bit + 1, true);
        } else {
          Tri t = check();
          if (t != Tri::False) go(slot, bit + 1, t == Tri::True);
        }
        if (stopped) break;
      }
      st.clear_bit(bit);
      return;
    }
    if (!settled && check() != Tri::True) return;
    if (!emit(st)) stopped = true;
  }
};

Structure partial_to_structure(const SchemaPtr& schema, const PartialState& st) {
  StructureBuilder b(schema);
  for (uint32_t i = 0; i < schema->num_scalars(); i++) {
    b.set_scalar_raw(i, st.scalars[i]);
  }
  for (uint32_t bit = 0; bit < schema->num_bits(); bit++) {
    b.set_bit_raw(bit, st.bit_val_at(bit));
  }
  return b.freeze();
}

void pin_pinned_orders(const Schema& sch, PartialState& st) {
  const Vocabulary& voc = *sch.vocab();
  for (uint32_t r = 0; r < voc.num_relations(); r++) {
    if (!voc.relation(r).pinned_order) continue;
    for (uint32_t e = 0; e < sch.rel_entries(r); e++) {
      auto tup = sch.rel_tuple(r, e);
      st.set_bit(sch.rel_bit_base(r) + e, tup[0] <= tup[1]);
    }
  }
}

}  // namespace

void enumerate_models(const SchemaPtr& schema, PartialState& start, const FormulaPtr& phi,
                      const Structure* pre,
                      const std::function<bool(PartialState&)>& emit) {
  ModelEnum me(schema, start, phi, pre, emit);
  me.run();
}

std::vector<Structure> initial_states(const TransitionSystem& sys, const DomainBound& bound,
                                      bool iso_reduce) {
  auto schema = std::make_shared<Schema>(sys.vocab, bound);
  PartialState start(*schema);
  pin_pinned_orders(*schema, start);
  // derived symbols are computed, not enumerated: hold them at a dummy
  // value during enumeration of the base part
  for (const auto& d : sys.derived_inits) {
    switch (d.kind) {
      case SymbolKind::Relation:
        for (uint32_t e = 0; e < schema->rel_entries(d.index); e++) {
          start.set_bit(schema->rel_bit_base(d.index) + e, false);
        }
        break;
      case SymbolKind::Constant:
        start.set_scalar(schema->const_slot(d.index), 0);
        break;
      case SymbolKind::Function:
        for (uint32_t e = 0; e < schema->fun_entries(d.index); e++) {
          start.set_scalar(schema->fun_slot_base(d.index) + e, 0);
        }
        break;
    }
  }

  std::vector<Structure> out;
  FormulaPtr base = sys.base_init ? sys.base_init : sys.init;
  enumerate_models(schema, start, base, nullptr, [&](PartialState& st) {
    if (sys.derived_inits.empty()) {
      out.push_back(partial_to_structure(schema, st));
      return true;
    }
    // compute derived symbols in declaration order
    PartialState filled = st;
    PartialView pview;
    pview.part = &filled;
    for (const auto& d : sys.derived_inits) {
      Assignment env;
      switch (d.kind) {
        case SymbolKind::Relation: {
          for (uint32_t e = 0; e < schema->rel_entries(d.index); e++) {
            auto tup = schema->rel_tuple(d.index, e);
            for (size_t i = 0; i < tup.size(); i++) env.bind(d.args[i].name, tup[i]);
            Tri v = eval3(pview, *d.rhs, env);
            for (size_t i = 0; i < tup.size(); i++) env.pop();
            if (v == Tri::Unknown) throw SpecError::model("underdetermined derived init");
            filled.set_bit(schema->rel_bit_base(d.index) + e, v == Tri::True);
          }
          break;
        }
        case SymbolKind::Constant: {
          // terms in derived init are over known symbols only
          Structure tmp = partial_to_structure(schema, filled);
          Assignment env2;
          StructView sv = StructView::single(tmp);
          filled.set_scalar(schema->const_slot(d.index), eval_term(sv, *d.term, env2));
          break;
        }
        case SymbolKind::Function: {
          uint32_t res_n = schema->domain_size(sys.vocab->function(d.index).result);
          for (uint32_t e = 0; e < schema->fun_entries(d.index); e++) {
            auto tup = schema->fun_tuple(d.index, e);
            for (size_t i = 0; i < tup.size(); i++) env.bind(d.args[i].name, tup[i]);
            int found = -1;
            for (uint32_t rv = 0; rv < res_n; rv++) {
              env.bind(d.res, rv);
              Tri v = eval3(pview, *d.rhs, env);
              env.pop();
              if (v == Tri::True) {
                if (found >= 0) throw SpecError::model("derived function init not unique");
                found = static_cast<int>(rv);
              }
            }
            for (size_t i = 0; i < tup.size(); i++) env.pop();
            if (found < 0) throw SpecError::model("derived function init undefined");
            filled.set_scalar(schema->fun_slot_base(d.index) + e, static_cast<Elem>(found));
          }
          break;
        }
      }
    }
    Structure s = partial_to_structure(schema, filled);
    out.push_back(std::move(s));
    return true;
  });

  if (iso_reduce) {
    std::vector<Structure> keep;
    std::vector<uint64_t> seen;
    for (const auto& s : out) {
      Structure canon = canonical_form(s);
      bool dup = false;
      for (size_t i = 0; i < keep.size(); i++) {
        if (seen[i] == canon.hash() && canonical_form(keep[i]) == canon) {
          dup = true;
          break;
        }
      }
      if (!dup) {
        keep.push_back(s);
        seen.push_back(canon.hash());
      }
    }
    return keep;
  }
  return out;
}

namespace {

struct BoxForcing {
  bool dead = false;
  std::vector<std::pair<uint32_t, uint32_t>> forced_true;   // (rel, entry)
  std::vector<std::pair<uint32_t, uint32_t>> forced_false;  // (rel, entry)
  std::vector<std::pair<uint32_t, uint32_t>> free_bits;     // (rel, entry)
};

BoxForcing compute_box_forcing(const TransitionSystem& sys, const Structure& s) {
  BoxForcing out;
  const Schema& sch = *s.schema();
  StructView sv = StructView::single(s);
  for (const auto& box : sys.tableau->boxes) {
    for (uint32_t e = 0; e < sch.rel_entries(box.rel); e++) {
      auto tup = sch.rel_tuple(box.rel, e);
      Assignment env;
      for (size_t i = 0; i < tup.size(); i++) env.bind(box.vars[i].name, tup[i]);
      bool fo = eval(sv, *box.body_fo, env);
      bool pre = s.get_rel_entry(box.rel, e);
      if (pre && !fo) {
        out.dead = true;
        return out;
      }
      if (pre) {
        out.forced_true.emplace_back(box.rel, e);
      } else if (fo) {
        out.forced_false.emplace_back(box.rel, e);
      } else {
        out.free_bits.emplace_back(box.rel, e);
      }
    }
  }
  return out;
}

void apply_pre_updates(const TransitionSystem& sys, const Action& a, const Structure& s,
                       Assignment& env, StructureBuilder& b) {
  const Schema& sch = *s.schema();
  StructView sv = StructView::single(s);
  for (const auto& u : a.rel_updates) {
    if (u.post_stage) continue;
    for (uint32_t e = 0; e < sch.rel_entries(u.rel); e++) {
      auto tup = sch.rel_tuple(u.rel, e);
      for (size_t i = 0; i < tup.size(); i++) env.bind(u.args[i].name, tup[i]);
      bool v = eval(sv, *u.rhs, env);
      for (size_t i = 0; i < tup.size(); i++) env.pop();
      b.set_rel_entry(u.rel, e, v);
    }
  }
  for (const auto& u : a.con_updates) {
    b.set_const(u.con, eval_term(sv, *u.rhs, env));
  }
  for (const auto& u : a.fun_updates) {
    if (u.post_stage) continue;
    uint32_t res_n = sch.domain_size(sys.vocab->function(u.fun).result);
    for (uint32_t e = 0; e < sch.fun_entries(u.fun); e++) {
      auto tup = sch.fun_tuple(u.fun, e);
      for (size_t i = 0; i < tup.size(); i++) env.bind(u.args[i].name, tup[i]);
      int found = -1;
      for (uint32_t rv = 0; rv < res_n; rv++) {
        env.bind(u.res, rv);
        bool v = eval(sv, *u.rhs, env);
        env.pop();
        if (v) {
          if (found >= 0) {
            throw SpecError::model("nondeterministic function update in action " + a.name +
                                   " for " + sys.vocab->function(u.fun).name);
          }
          found = static_cast<int>(rv);
        }
      }
      for (size_t i = 0; i < tup.size(); i++) env.pop();
      if (found < 0) {
        throw SpecError::model("undefined function update in action " + a.name + " for " +
                               sys.vocab->function(u.fun).name);
      }
      b.set_fun_entry(u.fun, e, static_cast<Elem>(found));
    }
  }
}

bool apply_post_updates(const TransitionSystem& sys, const Action& a, const Structure& s,
                        const Structure& mid, Assignment& env, StructureBuilder& b) {
  const Schema& sch = *s.schema();
  StructView jv = StructView::joint(s, mid);
  for (const auto& u : a.rel_updates) {
    if (!u.post_stage) continue;
    for (uint32_t e = 0; e < sch.rel_entries(u.rel); e++) {
      auto tup = sch.rel_tuple(u.rel, e);
      for (size_t i = 0; i < tup.size(); i++) env.bind(u.args[i].name, tup[i]);
      bool v = eval(jv, *u.rhs, env);
      for (size_t i = 0; i < tup.size(); i++) env.pop();
      b.set_rel_entry(u.rel, e, v);
    }
  }
  for (const auto& u : a.fun_updates) {
    if (!u.post_stage) continue;
    uint32_t res_n = sch.domain_size(sys.vocab->function(u.fun).result);
    for (uint32_t e = 0; e < sch.fun_entries(u.fun); e++) {
      auto tup = sch.fun_tuple(u.fun, e);
      for (size_t i = 0; i < tup.size(); i++) env.bind(u.args[i].name, tup[i]);
      int found = -1;
      for (uint32_t rv = 0; rv < res_n; rv++) {
        env.bind(u.res, rv);
        bool v = eval(jv, *u.rhs, env);
        env.pop();
        if (v) {
          if (found >= 0) {
            throw SpecError::model("nondeterministic function update in action " + a.name);
          }
          found = static_cast<int>(rv);
        }
      }
      for (size_t i = 0; i < tup.size(); i++) env.pop();
      if (found < 0) throw SpecError::model("undefined function update in action " + a.name);
      b.set_fun_entry(u.fun, e, static_cast<Elem>(found));
    }
  }
  return true;
}

bool action_has_post(const Action& a) {
  for (const auto& u : a.rel_updates) {
    if (u.post_stage) return true;
  }
  for (const auto& u : a.fun_updates) {
    if (u.post_stage) return true;
  }
  return false;
}

}  // namespace

void successors(const TransitionSystem& sys, const Structure& s,
                const std::function<bool(Structure&&, int)>& emit) {
  BoxForcing bf;
  bool has_boxes = sys.tableau && !sys.tableau->boxes.empty();
  if (has_boxes) {
    bf = compute_box_forcing(sys, s);
    if (bf.dead) return;
  }
  const Schema& sch = *s.schema();

  if (sys.actions.empty()) {
    // brute force over tau
    auto schema = s.schema();
    PartialState post(sch);
    const Vocabulary& voc = *sys.vocab;
    for (uint32_t r = 0; r < voc.num_relations(); r++) {
      if (!voc.relation(r).is_static) continue;
      for (uint32_t e = 0; e < sch.rel_entries(r); e++) {
        post.set_bit(sch.rel_bit_base(r) + e, s.get_rel_entry(r, e));
      }
    }
    for (uint32_t f = 0; f < voc.num_functions(); f++) {
      if (!voc.function(f).is_static) continue;
      for (uint32_t e = 0; e < sch.fun_entries(f); e++) {
        post.set_scalar(sch.fun_slot_base(f) + e, s.get_fun_entry(f, e));
      }
    }
    for (uint32_t c = 0; c < voc.num_constants(); c++) {
      if (voc.constant(c).is_static) post.set_scalar(sch.const_slot(c), s.get_const(c));
    }
    if (has_boxes) {
      for (auto [r, e] : bf.forced_true) post.set_bit(sch.rel_bit_base(r) + e, true);
      for (auto [r, e] : bf.forced_false) post.set_bit(sch.rel_bit_base(r) + e, false);
    }
    bool keep = true;
    enumerate_models(schema, post, sys.tau, &s, [&](PartialState& st) {
      Structure nxt = partial_to_structure(schema, st);
      keep = emit(std::move(nxt), -1);
      return keep;
    });
    return;
  }

  size_t free_n = bf.free_bits.size();
  if (free_n > 24) throw SpecError::model("tableau branching too large");

  for (size_t ai = 0; ai < sys.actions.size(); ai++) {
    const Action& a = sys.actions[ai];
    uint64_t total = 1;
    for (const auto& p : a.params) total *= sch.domain_size(p.sort);
    for (uint64_t pv = 0; pv < total; pv++) {
      Assignment env;
      uint64_t rest = pv;
      for (size_t i = a.params.size(); i-- > 0;) {
        uint32_t n = sch.domain_size(a.params[i].sort);
        env.vars.emplace_back(a.params[i].name, 0);
        env.vars.back().second = static_cast<Elem>(rest % n);
        rest /= n;
      }
      std::reverse(env.vars.begin(), env.vars.end());
      {
        StructView sv = StructView::single(s);
        if (!eval(sv, *a.guard, env)) continue;
      }
      StructureBuilder base(s);
      apply_pre_updates(sys, a, s, env, base);

      uint64_t combos = 1;
      if (has_boxes && !a.stutter) {
        for (auto [r, e] : bf.forced_true) base.set_rel_entry(r, e, true);
        for (auto [r, e] : bf.forced_false) base.set_rel_entry(r, e, false);
        combos = 1ull << free_n;
      }
      bool has_post = action_has_post(a);
      for (uint64_t combo = 0; combo < combos; combo++) {
        StructureBuilder b2 = base;
        if (combos > 1) {
          for (size_t i = 0; i < free_n; i++) {
            auto [r, e] = bf.free_bits[i];
            b2.set_rel_entry(r, e, (combo >> i) & 1);
          }
        }
        Structure mid = b2.freeze();
        if (has_post) {
          StructureBuilder b3(mid);
          apply_post_updates(sys, a, s, mid, env, b3);
          if (!emit(b3.freeze(), static_cast<int>(ai))) return;
        } else {
          if (!emit(std::move(mid), static_cast<int>(ai))) return;
        }
      }
    }
  }
}

std::vector<Structure> successor_list(const TransitionSystem& sys, const Structure& s) {
  std::vector<Structure> out;
  successors(sys, s, [&](Structure&& nxt, int) {
    out.push_back(std::move(nxt));
    return true;
  });
  return out;
}

namespace {

void traces_rec(const TransitionSystem& sys, std::vector<Structure>& prefix, size_t maxlen,
                const std::function<bool(const std::vector<Structure>&)>& emit, bool& stop) {
  if (stop) return;
  if (!emit(prefix)) {
    stop = true;
    return;
  }
  if (prefix.size() >= maxlen) return;
  auto succs = successor_list(sys, prefix.back());
  for (auto& nxt : succs) {
    prefix.push_back(std::move(nxt));
    traces_rec(sys, prefix, maxlen, emit, stop);
    prefix.pop_back();
    if (stop) return;
  }
}

}  // namespace

void bounded_traces(const TransitionSystem& sys, const DomainBound& bound, size_t maxlen,
                    const std::function<bool(const std::vector<Structure>&)>& emit) {
  if (maxlen < 1) return;
  bool stop = false;
  for (auto& s0 : initial_states(sys, bound)) {
    std::vector<Structure> prefix{s0};
    traces_rec(sys, prefix, maxlen, emit, stop);
    if (stop) return;
  }
}

namespace {

Structure apply_permutation(const Structure& s, const std::vector<std::vector<Elem>>& perm) {
  const Schema& sch = *s.schema();
  const Vocabulary& voc = *s.vocab();
  StructureBuilder b(s.schema());
  for (uint32_t c = 0; c < voc.num_constants(); c++) {
    b.set_const(c, perm[voc.constant(c).sort][s.get_const(c)]);
  }
  for (uint32_t f = 0; f < voc.num_functions(); f++) {
    const auto& d = voc.function(f);
    for (uint32_t e = 0; e < sch.fun_entries(f); e++) {
      auto tup = sch.fun_tuple(f, e);
      std::vector<Elem> mapped(tup.size());
      for (size_t i = 0; i < tup.size(); i++) mapped[i] = perm[d.args[i]][tup[i]];
      b.set_fun(f, mapped, perm[d.result][s.get_fun_entry(f, e)]);
    }
  }
  for (uint32_t r = 0; r < voc.num_relations(); r++) {
    const auto& d = voc.relation(r);
    for (uint32_t e = 0; e < sch.rel_entries(r); e++) {
      auto tup = sch.rel_tuple(r, e);
      std::vector<Elem> mapped(tup.size());
      for (size_t i = 0; i < tup.size(); i++) mapped[i] = perm[d.args[i]][tup[i]];
      b.set_rel(r, mapped, s.get_rel_entry(r, e));
    }
  }
  return b.freeze();
}

bool structure_less(const Structure& a, const Structure& b) {
  return print_structure(a) < print_structure(b);
}

}  // namespace

Structure canonical_form(const Structure& s) {
  const Vocabulary& voc = *s.vocab();
  const Schema& sch = *s.schema();
  std::vector<bool> rigid(voc.num_sorts(), false);
  for (uint32_t r = 0; r < voc.num_relations(); r++) {
    if (voc.relation(r).pinned_order) rigid[voc.relation(r).args[0]] = true;
  }
  std::vector<std::vector<std::vector<Elem>>> sort_perms(voc.num_sorts());
  for (SortId so = 0; so < voc.num_sorts(); so++) {
    uint32_t n = sch.domain_size(so);
    std::vector<Elem> p(n);
    std::iota(p.begin(), p.end(), 0);
    if (rigid[so] || n > 6) {
      sort_perms[so].push_back(p);
      continue;
    }
    do {
      sort_perms[so].push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
  }
  // product of per-sort permutation choices
  Structure best = s;
  bool first = true;
  std::vector<size_t> idx(voc.num_sorts(), 0);
  while (true) {
    std::vector<std::vector<Elem>> perm(voc.num_sorts());
    for (SortId so = 0; so < voc.num_sorts(); so++) perm[so] = sort_perms[so][idx[so]];
    Structure cand = apply_permutation(s, perm);
    if (first || structure_less(cand, best)) {
      best = cand;
      first = false;
    }
    size_t k = 0;
    while (k < idx.size()) {
      idx[k]++;
      if (idx[k] < sort_perms[k].size()) break;
      idx[k] = 0;
      k++;
    }
    if (k == idx.size()) break;
    if (idx.empty()) break;
  }
  return best;
}

}  // namespace tempo
