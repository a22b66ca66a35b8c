#include "tempo/structure.hpp"

#include <algorithm>
#include <sstream>

namespace tempo {

Schema::Schema(VocabPtr vocab, DomainBound bound)
    : vocab_(std::move(vocab)), bound_(std::move(bound)) {
  if (bound_.size.size() != vocab_->num_sorts()) {
    throw SpecError::sort("domain bound does not cover all sorts");
  }
  for (uint32_t n : bound_.size) {
    if (n == 0) throw SpecError::sort("empty domains are not supported");
    if (n >= 0xFFFF) throw SpecError::sort("domain too large for packed layout");
  }
  uint32_t slot = 0;
  const_off_.resize(vocab_->num_constants());
  for (size_t c = 0; c < vocab_->num_constants(); c++) const_off_[c] = slot++;
  fun_off_.resize(vocab_->num_functions());
  fun_entries_.resize(vocab_->num_functions());
  for (size_t f = 0; f < vocab_->num_functions(); f++) {
    uint64_t entries = 1;
    for (SortId s : vocab_->function(static_cast<uint32_t>(f)).args) entries *= bound_.size[s];
    if (entries > (1u << 24)) throw SpecError::sort("function table too large");
    fun_off_[f] = slot;
    fun_entries_[f] = static_cast<uint32_t>(entries);
    slot += static_cast<uint32_t>(entries);
  }
  n_scalars_ = slot;
  uint32_t bit = 0;
  rel_bitoff_.resize(vocab_->num_relations());
  rel_entries_.resize(vocab_->num_relations());
  for (size_t r = 0; r < vocab_->num_relations(); r++) {
    uint64_t entries = 1;
    for (SortId s : vocab_->relation(static_cast<uint32_t>(r)).args) entries *= bound_.size[s];
    if (entries > (1u << 26)) throw SpecError::sort("relation table too large");
    rel_bitoff_[r] = bit;
    rel_entries_[r] = static_cast<uint32_t>(entries);
    bit += static_cast<uint32_t>(entries);
  }
  n_bits_ = bit;
  n_words_ = (bit + 63) / 64;
}

uint32_t Schema::fun_slot(uint32_t f, const std::vector<Elem>& args) const {
  const auto& decl = vocab_->function(f);
  uint32_t idx = 0;
  for (size_t i = 0; i < args.size(); i++) idx = idx * bound_.size[decl.args[i]] + args[i];
  return fun_off_[f] + idx;
}

uint32_t Schema::rel_bit(uint32_t r, const std::vector<Elem>& args) const {
  const auto& decl = vocab_->relation(r);
  uint32_t idx = 0;
  for (size_t i = 0; i < args.size(); i++) idx = idx * bound_.size[decl.args[i]] + args[i];
  return rel_bitoff_[r] + idx;
}

std::vector<Elem> Schema::rel_tuple(uint32_t r, uint32_t entry) const {
  const auto& decl = vocab_->relation(r);
  std::vector<Elem> out(decl.args.size());
  for (size_t i = decl.args.size(); i-- > 0;) {
    uint32_t n = bound_.size[decl.args[i]];
    out[i] = entry % n;
    entry /= n;
  }
  return out;
}

std::vector<Elem> Schema::fun_tuple(uint32_t f, uint32_t entry) const {
  const auto& decl = vocab_->function(f);
  std::vector<Elem> out(decl.args.size());
  for (size_t i = decl.args.size(); i-- > 0;) {
    uint32_t n = bound_.size[decl.args[i]];
    out[i] = entry % n;
    entry /= n;
  }
  return out;
}

StructureBuilder::StructureBuilder(SchemaPtr schema)
    : schema_(std::move(schema)),
      scalars_(schema_->num_scalars(), 0),
      bits_(schema_->num_words(), 0) {}

StructureBuilder::StructureBuilder(const Structure& from)
    : schema_(from.schema_), scalars_(from.scalars_), bits_(from.bits_) {}

Structure StructureBuilder::freeze() const {
  Structure s;
  s.schema_ = schema_;
  s.scalars_ = scalars_;
  s.bits_ = bits_;
  uint64_t h = 1469598103934665603ull;
  for (uint16_t v : s.scalars_) {
    h ^= v;
    h *= 1099511628211ull;
  }
  for (uint64_t w : s.bits_) {
    h ^= w;
    h *= 1099511628211ull;
  }
  s.hash_ = h;
  return s;
}

StructView StructView::joint(const Structure& pre, const Structure& post) {
  const auto& v = *pre.vocab();
  return StructView{&pre, &post, static_cast<uint32_t>(v.num_relations()),
                    static_cast<uint32_t>(v.num_functions()),
                    static_cast<uint32_t>(v.num_constants())};
}

namespace {

[[noreturn]] void unbound(const std::string& name) {
  throw SpecError::sort("unbound free variable: " + name);
}

}  // namespace

Elem eval_term(const StructView& view, const Term& t, Assignment& env) {
  switch (t.kind) {
    case TermKind::Var: {
      const Elem* e = env.lookup(t.var);
      if (!e) unbound(t.var);
      return *e;
    }
    case TermKind::Elem:
      return t.elem;
    case TermKind::Const: {
      if (view.nxt && t.sym >= view.con_split) return view.nxt->get_const(t.sym - view.con_split);
      return view.cur->get_const(t.sym);
    }
    case TermKind::App: {
      std::vector<Elem> args(t.args.size());
      for (size_t i = 0; i < t.args.size(); i++) args[i] = eval_term(view, *t.args[i], env);
      if (view.nxt && t.sym >= view.fun_split) return view.nxt->get_fun(t.sym - view.fun_split, args);
      return view.cur->get_fun(t.sym, args);
    }
  }
  throw std::logic_error("eval_term: bad kind");
}

bool eval(const StructView& view, const Formula& f, Assignment& env) {
  switch (f.kind) {
    case FKind::True: return true;
    case FKind::False: return false;
    case FKind::RelApp: {
      std::vector<Elem> args(f.terms.size());
      for (size_t i = 0; i < f.terms.size(); i++) args[i] = eval_term(view, *f.terms[i], env);
      if (view.nxt && f.rel >= view.rel_split) return view.nxt->get_rel(f.rel - view.rel_split, args);
      return view.cur->get_rel(f.rel, args);
    }
    case FKind::Eq:
      return eval_term(view, *f.terms[0], env) == eval_term(view, *f.terms[1], env);
    case FKind::Not: return !eval(view, *f.kids[0], env);
    case FKind::Or: return eval(view, *f.kids[0], env) || eval(view, *f.kids[1], env);
    case FKind::And: return eval(view, *f.kids[0], env) && eval(view, *f.kids[1], env);
    case FKind::Implies: return !eval(view, *f.kids[0], env) || eval(view, *f.kids[1], env);
    case FKind::Iff: return eval(view, *f.kids[0], env) == eval(view, *f.kids[1], env);
    case FKind::Exists:
    case FKind::Forall: {
      uint32_t n = view.cur->schema()->domain_size(f.var_sort);
      bool is_exists = f.kind == FKind::Exists;
      for (Elem d = 0; d < n; d++) {
        env.bind(f.var, d);
        bool v = eval(view, *f.kids[0], env);
        env.pop();
        if (is_exists && v) return true;
        if (!is_exists && !v) return false;
      }
      return !is_exists;
    }
    case FKind::Globally:
    case FKind::Eventually:
      throw SpecError::sort("temporal operator in first-order evaluation");
  }
  throw std::logic_error("eval: bad kind");
}

bool eval(const Structure& s, const Formula& f, Assignment& env) {
  StructView v = StructView::single(s);
  return eval(v, f, env);
}

bool eval_closed(const Structure& s, const Formula& f) {
  if (!f.free.empty()) {
    throw SpecError::sort("closed evaluation of a formula with free variables: " +
                          f.free[0].name);
  }
  Assignment env;
  return eval(s, f, env);
}

PartialState::PartialState(const Schema& sch)
    : schema(&sch),
      scalars(sch.num_scalars(), 0xFFFF),
      bit_vals(sch.num_words(), 0),
      bit_known(sch.num_words(), 0) {}

void PartialState::set_bit(uint32_t b, bool v) {
  uint64_t mask = 1ull << (b & 63);
  bit_known[b >> 6] |= mask;
  if (v) {
    bit_vals[b >> 6] |= mask;
  } else {
    bit_vals[b >> 6] &= ~mask;
  }
}

void PartialState::clear_bit(uint32_t b) {
  uint64_t mask = 1ull << (b & 63);
  bit_known[b >> 6] &= ~mask;
  bit_vals[b >> 6] &= ~mask;
}

namespace {

constexpr Elem kUnknownElem = 0xFFFFFFFFu;

Elem eval_term3(const PartialView& view, const Term& t, Assignment& env) {
  switch (t.kind) {
    case TermKind::Var: {
      const Elem* e = env.lookup(t.var);
      if (!e) unbound(t.var);
      return *e;
    }
    case TermKind::Elem:
      return t.elem;
    case TermKind::Const: {
      if (view.cur && t.sym < view.con_split) return view.cur->get_const(t.sym);
      uint32_t sym = view.cur ? t.sym - view.con_split : t.sym;
      uint32_t slot = view.part->schema->const_slot(sym);
      if (!view.part->scalar_known(slot)) return kUnknownElem;
      return view.part->scalars[slot];
    }
    case TermKind::App: {
      std::vector<Elem> args(t.args.size());
      for (size_t i = 0; i < t.args.size(); i++) {
        args[i] = eval_term3(view, *t.args[i], env);
        if (args[i] == kUnknownElem) return kUnknownElem;
      }
      if (view.cur && t.sym < view.fun_split) return view.cur->get_fun(t.sym, args);
      uint32_t sym = view.cur ? t.sym - view.fun_split : t.sym;
      uint32_t slot = view.part->schema->fun_slot(sym, args);
      if (!view.part->scalar_known(slot)) return kUnknownElem;
      return view.part->scalars[slot];
    }
  }
  throw std::logic_error("eval_term3: bad kind");
}

Tri tri_not(Tri t) {
  if (t == Tri::Unknown) return Tri::Unknown;
  return t == Tri::True ? Tri::False : Tri::True;
}

}  // namespace

Tri eval3(const PartialView& view, const Formula& f, Assignment& env) {
  switch (f.kind) {
    case FKind::True: return Tri::True;
    case FKind::False: return Tri::False;
    case FKind::RelApp: {
      std::vector<Elem> args(f.terms.size());
      for (size_t i = 0; i < f.terms.size(); i++) {
        args[i] = eval_term3(view, *f.terms[i], env);
        if (args[i] == kUnknownElem) return Tri::Unknown;
      }
      if (view.cur && f.rel < view.rel_split) {
        return view.cur->get_rel(f.rel, args) ? Tri::True : Tri::False;
      }
      uint32_t sym = view.cur ? f.rel - view.rel_split : f.rel;
      uint32_t b = view.part->schema->rel_bit(sym, args);
      if (!view.part->bit_known_at(b)) return Tri::Unknown;
      return view.part->bit_val_at(b) ? Tri::True : Tri::False;
    }
    case FKind::Eq: {
      Elem a = eval_term3(view, *f.terms[0], env);
      if (a == kUnknownElem) return Tri::Unknown;
      Elem b = eval_term3(view, *f.terms[1], env);
      if (b == kUnknownElem) return Tri::Unknown;
      return a == b ? Tri::True : Tri::False;
    }
    case FKind::Not: return tri_not(eval3(view, *f.kids[0], env));
    case FKind::Or: {
      Tri a = eval3(view, *f.kids[0], env);
      if (a == Tri::True) return Tri::True;
      Tri b = eval3(view, *f.kids[1], env);
      if (b == Tri::True) return Tri::True;
      if (a == Tri::False && b == Tri::False) return Tri::False;
      return Tri::Unknown;
    }
    case FKind::And: {
      Tri a = eval3(view, *f.kids[0], env);
      if (a == Tri::False) return Tri::False;
      Tri b = eval3(view, *f.kids[1], env);
      if (b == Tri::False) return Tri::False;
      if (a == Tri::True && b == Tri::True) return Tri::True;
      return Tri::Unknown;
    }
    case FKind::Implies: {
      Tri a = eval3(view, *f.kids[0], env);
      if (a == Tri::False) return Tri::True;
      Tri b = eval3(view, *f.kids[1], env);
      if (b == Tri::True) return Tri::True;
      if (a == Tri::True && b == Tri::False) return Tri::False;
      return Tri::Unknown;
    }
    case FKind::Iff: {
      Tri a = eval3(view, *f.kids[0], env);
      if (a == Tri::Unknown) return Tri::Unknown;
      Tri b = eval3(view, *f.kids[1], env);
      if (b == Tri::Unknown) return Tri::Unknown;
      return a == b ? Tri::True : Tri::False;
    }
    case FKind::Exists:
    case FKind::Forall: {
      uint32_t n = view.part->schema->domain_size(f.var_sort);
      bool is_exists = f.kind == FKind::Exists;
      bool any_unknown = false;
      for (Elem d = 0; d < n; d++) {
        env.bind(f.var, d);
        Tri v = eval3(view, *f.kids[0], env);
        env.pop();
        if (is_exists && v == Tri::True) return Tri::True;
        if (!is_exists && v == Tri::False) return Tri::False;
        if (v == Tri::Unknown) any_unknown = true;
      }
      if (any_unknown) return Tri::Unknown;
      return is_exists ? Tri::False : Tri::True;
    }
    case FKind::Globally:
    case FKind::Eventually:
      throw SpecError::sort("temporal operator in first-order evaluation");
  }
  throw std::logic_error("eval3: bad kind");
}

PartialStructure project(const Structure& s, const std::vector<std::vector<Elem>>& keep) {
  const auto& voc = *s.vocab();
  const auto& sch = *s.schema();
  if (keep.size() != voc.num_sorts()) {
    throw SpecError::sort("projection domain does not cover all sorts");
  }
  std::vector<std::vector<char>> in_keep(voc.num_sorts());
  PartialStructure out;
  out.vocab = s.vocab();
  out.retained.resize(voc.num_sorts());
  for (size_t so = 0; so < voc.num_sorts(); so++) {
    in_keep[so].assign(sch.domain_size(static_cast<SortId>(so)), 0);
    out.retained[so] = keep[so];
    std::sort(out.retained[so].begin(), out.retained[so].end());
    out.retained[so].erase(std::unique(out.retained[so].begin(), out.retained[so].end()),
                           out.retained[so].end());
    for (Elem e : out.retained[so]) {
      if (e >= in_keep[so].size()) throw SpecError::sort("projection element outside domain");
      in_keep[so][e] = 1;
    }
  }
  out.consts.resize(voc.num_constants());
  for (uint32_t c = 0; c < voc.num_constants(); c++) {
    Elem e = s.get_const(c);
    if (in_keep[voc.constant(c).sort][e]) out.consts[c] = e;
  }
  out.rels.resize(voc.num_relations());
  for (uint32_t r = 0; r < voc.num_relations(); r++) {
    const auto& decl = voc.relation(r);
    for (uint32_t entry = 0; entry < sch.rel_entries(r); entry++) {
      if (!s.get_rel_entry(r, entry)) continue;
      std::vector<Elem> tup = sch.rel_tuple(r, entry);
      bool keep_tup = true;
      for (size_t i = 0; i < tup.size(); i++) {
        if (!in_keep[decl.args[i]][tup[i]]) {
          keep_tup = false;
          break;
        }
      }
      if (keep_tup) out.rels[r].push_back(std::move(tup));
    }
  }
  out.fun_graphs.resize(voc.num_functions());
  for (uint32_t fn = 0; fn < voc.num_functions(); fn++) {
    const auto& decl = voc.function(fn);
    for (uint32_t entry = 0; entry < sch.fun_entries(fn); entry++) {
      std::vector<Elem> tup = sch.fun_tuple(fn, entry);
      bool keep_tup = true;
      for (size_t i = 0; i < tup.size(); i++) {
        if (!in_keep[decl.args[i]][tup[i]]) {
          keep_tup = false;
          break;
        }
      }
      if (!keep_tup) continue;
      Elem res = s.get_fun_entry(fn, entry);
      if (!in_keep[decl.result][res]) continue;
      tup.push_back(res);
      out.fun_graphs[fn].push_back(std::move(tup));
    }
  }
  return out;
}

Structure restrict_structure(const Structure& s, const VocabPtr& sub) {
  const auto& voc = *s.vocab();
  // sub-vocabulary check: shared sort prefix, symbols present by name with
  // identical signatures
  if (sub->num_sorts() > voc.num_sorts()) {
    throw SpecError::sort("restriction target is not a sub-vocabulary (sorts)");
  }
  for (SortId so = 0; so < sub->num_sorts(); so++) {
    if (sub->sort_name(so) != voc.sort_name(so)) {
      throw SpecError::sort("restriction target is not a sub-vocabulary (sort order)");
    }
  }
  DomainBound b;
  b.size.assign(s.schema()->bound().size.begin(),
                s.schema()->bound().size.begin() + sub->num_sorts());
  auto sch = std::make_shared<Schema>(sub, b);
  StructureBuilder out(sch);
  for (uint32_t c = 0; c < sub->num_constants(); c++) {
    auto ref = voc.find_symbol(sub->constant(c).name);
    if (!ref || ref->kind != SymbolKind::Constant ||
        voc.constant(ref->index).sort != sub->constant(c).sort) {
      throw SpecError::sort("restriction target is not a sub-vocabulary: " +
                            sub->constant(c).name);
    }
    out.set_const(c, s.get_const(ref->index));
  }
  for (uint32_t f = 0; f < sub->num_functions(); f++) {
    auto ref = voc.find_symbol(sub->function(f).name);
    if (!ref || ref->kind != SymbolKind::Function ||
        voc.function(ref->index).args != sub->function(f).args ||
        voc.function(ref->index).result != sub->function(f).result) {
      throw SpecError::sort("restriction target is not a sub-vocabulary: " +
                            sub->function(f).name);
    }
    for (uint32_t entry = 0; entry < sch->fun_entries(f); entry++) {
      out.set_fun_entry(f, entry, s.get_fun_entry(ref->index, entry));
    }
  }
  for (uint32_t r = 0; r < sub->num_relations(); r++) {
    auto ref = voc.find_symbol(sub->relation(r).name);
    if (!ref || ref->kind != SymbolKind::Relation ||
        voc.relation(ref->index).args != sub->relation(r).args) {
      throw SpecError::sort("restriction target is not a sub-vocabulary: " +
                            sub->relation(r).name);
    }
    for (uint32_t entry = 0; entry < sch->rel_entries(r); entry++) {
      out.set_rel_entry(r, entry, s.get_rel_entry(ref->index, entry));
    }
  }
  return out.freeze();
}

bool PartialStructure::operator==(const PartialStructure& o) const {
  return consts == o.consts && rels == o.rels && fun_graphs == o.fun_graphs;
}

bool partial_equal(const PartialStructure& p, const PartialStructure& q) {
  if (p.vocab.get() != q.vocab.get() && !(p.vocab->extends(*q.vocab) && q.vocab->extends(*p.vocab))) {
    throw SpecError::sort("partial_equal: vocabulary mismatch");
  }
  if (p.retained != q.retained) {
    throw SpecError::sort("partial_equal: retained sub-domains differ");
  }
  return p == q;
}

std::string print_structure(const Structure& s) {
  const auto& voc = *s.vocab();
  const auto& sch = *s.schema();
  std::ostringstream os;
  for (uint32_t c = 0; c < voc.num_constants(); c++) {
    os << voc.constant(c).name << "=" << s.get_const(c) << " ";
  }
  for (uint32_t f = 0; f < voc.num_functions(); f++) {
    os << voc.function(f).name << "={";
    for (uint32_t e = 0; e < sch.fun_entries(f); e++) {
      auto tup = sch.fun_tuple(f, e);
      if (e) os << ",";
      for (size_t i = 0; i < tup.size(); i++) os << (i ? "," : "") << tup[i];
      os << "->" << s.get_fun_entry(f, e);
    }
    os << "} ";
  }
  for (uint32_t r = 0; r < voc.num_relations(); r++) {
    if (voc.relation(r).pinned_order) continue;
    os << voc.relation(r).name << "={";
    bool first = true;
    for (uint32_t e = 0; e < sch.rel_entries(r); e++) {
      if (!s.get_rel_entry(r, e)) continue;
      if (!first) os << ",";
      first = false;
      auto tup = sch.rel_tuple(r, e);
      if (tup.empty()) {
        os << "()";
      } else {
        for (size_t i = 0; i < tup.size(); i++) os << (i ? "," : "") << tup[i];
      }
    }
    os << "} ";
  }
  return os.str();
}

}  // namespace tempo
