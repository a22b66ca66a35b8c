#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tempo/formula.hpp"
#include "tempo/vocabulary.hpp"

namespace tempo {

// Packed layout for finite structures over a vocabulary at a fixed
// per-sort domain bound. Domains are 0..size-1 for every sort; every
// structure sharing a schema stores constants and function tables as
// scalar slots and relations as a bitset, so states hash and compare as
// flat memory.
class Schema {
 public:
  Schema(VocabPtr vocab, DomainBound bound);

  const VocabPtr& vocab() const { return vocab_; }
  const DomainBound& bound() const { return bound_; }
  uint32_t domain_size(SortId s) const { return bound_.size[s]; }

  uint32_t num_scalars() const { return n_scalars_; }
  uint32_t num_words() const { return n_words_; }
  uint32_t num_bits() const { return n_bits_; }

  uint32_t const_slot(uint32_t c) const { return const_off_[c]; }
  uint32_t fun_slot(uint32_t f, const std::vector<Elem>& args) const;
  uint32_t fun_slot_base(uint32_t f) const { return fun_off_[f]; }
  uint32_t fun_entries(uint32_t f) const { return fun_entries_[f]; }
  uint32_t rel_bit(uint32_t r, const std::vector<Elem>& args) const;
  uint32_t rel_bit_base(uint32_t r) const { return rel_bitoff_[r]; }
  uint32_t rel_entries(uint32_t r) const { return rel_entries_[r]; }

  // Decodes the argument tuple of a relation entry / function entry.
  std::vector<Elem> rel_tuple(uint32_t r, uint32_t entry) const;
  std::vector<Elem> fun_tuple(uint32_t f, uint32_t entry) const;

 private:
  VocabPtr vocab_;
  DomainBound bound_;
  std::vector<uint32_t> const_off_;
  std::vector<uint32_t> fun_off_;
  std::vector<uint32_t> fun_entries_;
  std::vector<uint32_t> rel_bitoff_;
  std::vector<uint32_t> rel_entries_;
  uint32_t n_scalars_ = 0;
  uint32_t n_bits_ = 0;
  uint32_t n_words_ = 0;
};

using SchemaPtr = std::shared_ptr<const Schema>;

class StructureBuilder;

// An immutable finite first-order structure (a state). Interpretation is
// total: every constant and function entry holds an element of its sort's
// domain, every relation entry is a bit. Hash is precomputed.
class Structure {
 public:
  Structure() = default;

  const SchemaPtr& schema() const { return schema_; }
  const VocabPtr& vocab() const { return schema_->vocab(); }

  Elem get_const(uint32_t c) const { return scalars_[schema_->const_slot(c)]; }
  Elem get_fun(uint32_t f, const std::vector<Elem>& args) const {
    return scalars_[schema_->fun_slot(f, args)];
  }
  Elem get_fun_entry(uint32_t f, uint32_t entry) const {
    return scalars_[schema_->fun_slot_base(f) + entry];
  }
  bool get_rel(uint32_t r, const std::vector<Elem>& args) const {
    return get_bit(schema_->rel_bit(r, args));
  }
  bool get_rel_entry(uint32_t r, uint32_t entry) const {
    return get_bit(schema_->rel_bit_base(r) + entry);
  }

  uint64_t hash() const { return hash_; }
  bool operator==(const Structure& o) const {
    return hash_ == o.hash_ && scalars_ == o.scalars_ && bits_ == o.bits_;
  }
  bool operator!=(const Structure& o) const { return !(*this == o); }

 private:
  friend class StructureBuilder;
  bool get_bit(uint32_t b) const { return (bits_[b >> 6] >> (b & 63)) & 1; }

  SchemaPtr schema_;
  std::vector<uint16_t> scalars_;
  std::vector<uint64_t> bits_;
  uint64_t hash_ = 0;
};

class StructureBuilder {
 public:
  explicit StructureBuilder(SchemaPtr schema);
  explicit StructureBuilder(const Structure& from);

  void set_const(uint32_t c, Elem e) { scalars_[schema_->const_slot(c)] = static_cast<uint16_t>(e); }
  void set_fun(uint32_t f, const std::vector<Elem>& args, Elem e) {
    scalars_[schema_->fun_slot(f, args)] = static_cast<uint16_t>(e);
  }
  void set_fun_entry(uint32_t f, uint32_t entry, Elem e) {
    scalars_[schema_->fun_slot_base(f) + entry] = static_cast<uint16_t>(e);
  }
  void set_rel(uint32_t r, const std::vector<Elem>& args, bool v) {
    set_bit(schema_->rel_bit(r, args), v);
  }
  void set_rel_entry(uint32_t r, uint32_t entry, bool v) {
    set_bit(schema_->rel_bit_base(r) + entry, v);
  }
  Elem get_const(uint32_t c) const { return scalars_[schema_->const_slot(c)]; }
  Elem get_fun_entry(uint32_t f, uint32_t entry) const {
    return scalars_[schema_->fun_slot_base(f) + entry];
  }
  bool get_rel_entry(uint32_t r, uint32_t entry) const {
    uint32_t b = schema_->rel_bit_base(r) + entry;
    return (bits_[b >> 6] >> (b & 63)) & 1;
  }
  void set_scalar_raw(uint32_t slot, uint16_t v) { scalars_[slot] = v; }
  void set_bit_raw(uint32_t b, bool v) { set_bit(b, v); }

  Structure freeze() const;

 private:
  void set_bit(uint32_t b, bool v) {
    uint64_t mask = 1ull << (b & 63);
    if (v) {
      bits_[b >> 6] |= mask;
    } else {
      bits_[b >> 6] &= ~mask;
    }
  }

  SchemaPtr schema_;
  std::vector<uint16_t> scalars_;
  std::vector<uint64_t> bits_;
};

// Result of projecting a structure to a per-sort element subset:
// constants become partially defined, relations and function graphs keep
// only tuples inside the retained sub-domain.
struct PartialStructure {
  VocabPtr vocab;
  std::vector<std::vector<Elem>> retained;               // per sort, sorted
  std::vector<std::optional<Elem>> consts;               // per constant
  std::vector<std::vector<std::vector<Elem>>> rels;      // per relation, sorted tuples
  std::vector<std::vector<std::vector<Elem>>> fun_graphs;  // per function, tuples (args..., result)

  bool operator==(const PartialStructure& o) const;
};

// Variable assignments map variable names to domain elements.
struct Assignment {
  std::vector<std::pair<std::string, Elem>> vars;

  void bind(const std::string& name, Elem e) { vars.emplace_back(name, e); }
  void pop() { vars.pop_back(); }
  const Elem* lookup(const std::string& name) const {
    for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
      if (it->first == name) return &it->second;
    }
    return nullptr;
  }
};

// Evaluation view: either a single state, or a joint (current, next) pair
// for two-vocabulary formulas. In the joint case symbol indices at or
// beyond the split counts refer to the next state.
struct StructView {
  const Structure* cur = nullptr;
  const Structure* nxt = nullptr;
  uint32_t rel_split = 0;
  uint32_t fun_split = 0;
  uint32_t con_split = 0;

  static StructView single(const Structure& s) { return StructView{&s, nullptr, 0, 0, 0}; }
  static StructView joint(const Structure& pre, const Structure& post);
};

// Tarskian evaluation; quantifiers range over the bounded domains.
// Throws a specification error on unbound free variables.
bool eval(const StructView& view, const Formula& f, Assignment& env);
bool eval(const Structure& s, const Formula& f, Assignment& env);
bool eval_closed(const Structure& s, const Formula& f);
Elem eval_term(const StructView& view, const Term& t, Assignment& env);

// Three-valued evaluation against a partially-assigned structure; used by
// the enumeration back-ends for pruning. Scalar slots with value 0xFFFF
// and relation bits whose `known` mask bit is clear are unknown.
enum class Tri : int8_t { False = 0, True = 1, Unknown = 2 };

struct PartialState {
  const Schema* schema = nullptr;
  std::vector<uint16_t> scalars;
  std::vector<uint64_t> bit_vals;
  std::vector<uint64_t> bit_known;

  explicit PartialState(const Schema& sch);
  bool scalar_known(uint32_t slot) const { return scalars[slot] != 0xFFFF; }
  bool bit_known_at(uint32_t b) const { return (bit_known[b >> 6] >> (b & 63)) & 1; }
  bool bit_val_at(uint32_t b) const { return (bit_vals[b >> 6] >> (b & 63)) & 1; }
  void set_scalar(uint32_t slot, Elem e) { scalars[slot] = static_cast<uint16_t>(e); }
  void clear_scalar(uint32_t slot) { scalars[slot] = 0xFFFF; }
  void set_bit(uint32_t b, bool v);
  void clear_bit(uint32_t b);
};

struct PartialView {
  const Structure* cur = nullptr;  // nullable: single-state enumeration
  const PartialState* part = nullptr;
  uint32_t rel_split = 0;
  uint32_t fun_split = 0;
  uint32_t con_split = 0;
};

Tri eval3(const PartialView& view, const Formula& f, Assignment& env);

// Projection to a per-sort element subset (the dynamic abstraction).
PartialStructure project(const Structure& s, const std::vector<std::vector<Elem>>& keep);

// Restriction to a sub-vocabulary (same domains, fewer symbols).
Structure restrict_structure(const Structure& s, const VocabPtr& sub);

// Componentwise equality of projections; requires matching vocabulary and
// retained sub-domains.
bool partial_equal(const PartialStructure& p, const PartialStructure& q);

std::string print_structure(const Structure& s);

}  // namespace tempo
