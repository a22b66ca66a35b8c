#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tempo/error.hpp"

namespace tempo {

using SortId = uint32_t;
using Elem = uint32_t;

enum class SymbolKind : uint8_t { Relation, Function, Constant };

struct SymbolRef {
  SymbolKind kind;
  uint32_t index;
};

// A many-sorted first-order signature: relation, function, and constant
// symbols plus the subset of symbols declared static (preserved by every
// transition). Vocabularies are immutable once built; extension copies and
// appends, so symbol indices remain valid across the extension chain
// (base system -> tableau -> witnesses -> monitor).
class Vocabulary {
 public:
  struct Rel {
    std::string name;
    std::vector<SortId> args;
    bool is_static = false;
    // Interpreted as <= on element ids; always static. Used for orders
    // declared with the model-level (order ...) form.
    bool pinned_order = false;
  };
  struct Fun {
    std::string name;
    std::vector<SortId> args;
    SortId result = 0;
    bool is_static = false;
  };
  struct Con {
    std::string name;
    SortId sort = 0;
    bool is_static = false;
  };

  SortId add_sort(const std::string& name);
  uint32_t add_relation(const std::string& name, std::vector<SortId> args,
                        bool is_static = false, bool pinned_order = false);
  uint32_t add_function(const std::string& name, std::vector<SortId> args, SortId result,
                        bool is_static = false);
  uint32_t add_constant(const std::string& name, SortId sort, bool is_static = false);

  size_t num_sorts() const { return sorts_.size(); }
  size_t num_relations() const { return rels_.size(); }
  size_t num_functions() const { return funs_.size(); }
  size_t num_constants() const { return cons_.size(); }

  const std::string& sort_name(SortId s) const { return sorts_[s]; }
  const Rel& relation(uint32_t i) const { return rels_[i]; }
  const Fun& function(uint32_t i) const { return funs_[i]; }
  const Con& constant(uint32_t i) const { return cons_[i]; }

  std::optional<SortId> find_sort(const std::string& name) const;
  std::optional<SymbolRef> find_symbol(const std::string& name) const;

  const std::string& symbol_name(SymbolRef r) const;

  // True when every symbol of `sub` is declared here with the same
  // signature and the same index. Holds along the append-only extension
  // chain used throughout.
  bool extends(const Vocabulary& sub) const;

  std::shared_ptr<Vocabulary> clone() const { return std::make_shared<Vocabulary>(*this); }

 private:
  void check_fresh(const std::string& name) const;
  void check_sort(SortId s, const std::string& context) const;

  std::vector<std::string> sorts_;
  std::unordered_map<std::string, SortId> sort_by_name_;
  std::vector<Rel> rels_;
  std::vector<Fun> funs_;
  std::vector<Con> cons_;
  std::unordered_map<std::string, SymbolRef> by_name_;
};

using VocabPtr = std::shared_ptr<const Vocabulary>;

// Per-sort exact domain sizes used for bounded exploration.
struct DomainBound {
  std::vector<uint32_t> size;  // indexed by SortId

  uint32_t of(SortId s) const { return size[s]; }
};

}  // namespace tempo
