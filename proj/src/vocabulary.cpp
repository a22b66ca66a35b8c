#include "tempo/vocabulary.hpp"

namespace tempo {

void Vocabulary::check_fresh(const std::string& name) const {
  if (by_name_.count(name) || sort_by_name_.count(name)) {
    throw SpecError::sort("duplicate symbol name: " + name);
  }
}

void Vocabulary::check_sort(SortId s, const std::string& context) const {
  if (s >= sorts_.size()) {
    throw SpecError::sort("undeclared sort referenced by " + context);
  }
}

SortId Vocabulary::add_sort(const std::string& name) {
  if (sort_by_name_.count(name) || by_name_.count(name)) {
    throw SpecError::sort("duplicate sort name: " + name);
  }
  SortId id = static_cast<SortId>(sorts_.size());
  sorts_.push_back(name);
  sort_by_name_[name] = id;
  return id;
}

uint32_t Vocabulary::add_relation(const std::string& name, std::vector<SortId> args,
                                  bool is_static, bool pinned_order) {
  check_fresh(name);
  for (SortId s : args) check_sort(s, "relation " + name);
  if (pinned_order && (args.size() != 2 || args[0] != args[1])) {
    throw SpecError::sort("order relation " + name + " must be binary over one sort");
  }
  uint32_t id = static_cast<uint32_t>(rels_.size());
  rels_.push_back(Rel{name, std::move(args), is_static || pinned_order, pinned_order});
  by_name_[name] = SymbolRef{SymbolKind::Relation, id};
  return id;
}

uint32_t Vocabulary::add_function(const std::string& name, std::vector<SortId> args,
                                  SortId result, bool is_static) {
  check_fresh(name);
  for (SortId s : args) check_sort(s, "function " + name);
  check_sort(result, "function " + name);
  if (args.empty()) {
    throw SpecError::sort("nullary function " + name + " should be a constant");
  }
  uint32_t id = static_cast<uint32_t>(funs_.size());
  funs_.push_back(Fun{name, std::move(args), result, is_static});
  by_name_[name] = SymbolRef{SymbolKind::Function, id};
  return id;
}

uint32_t Vocabulary::add_constant(const std::string& name, SortId sort, bool is_static) {
  check_fresh(name);
  check_sort(sort, "constant " + name);
  uint32_t id = static_cast<uint32_t>(cons_.size());
  cons_.push_back(Con{name, sort, is_static});
  by_name_[name] = SymbolRef{SymbolKind::Constant, id};
  return id;
}

std::optional<SortId> Vocabulary::find_sort(const std::string& name) const {
  auto it = sort_by_name_.find(name);
  if (it == sort_by_name_.end()) return std::nullopt;
  return it->second;
}

std::optional<SymbolRef> Vocabulary::find_symbol(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocabulary::symbol_name(SymbolRef r) const {
  switch (r.kind) {
    case SymbolKind::Relation: return rels_[r.index].name;
    case SymbolKind::Function: return funs_[r.index].name;
    case SymbolKind::Constant: return cons_[r.index].name;
  }
  throw std::logic_error("bad symbol ref");
}

bool Vocabulary::extends(const Vocabulary& sub) const {
  if (sub.sorts_.size() > sorts_.size() || sub.rels_.size() > rels_.size() ||
      sub.funs_.size() > funs_.size() || sub.cons_.size() > cons_.size()) {
    return false;
  }
  for (size_t i = 0; i < sub.sorts_.size(); i++) {
    if (sub.sorts_[i] != sorts_[i]) return false;
  }
  for (size_t i = 0; i < sub.rels_.size(); i++) {
    if (sub.rels_[i].name != rels_[i].name || sub.rels_[i].args != rels_[i].args) return false;
  }
  for (size_t i = 0; i < sub.funs_.size(); i++) {
    if (sub.funs_[i].name != funs_[i].name || sub.funs_[i].args != funs_[i].args ||
        sub.funs_[i].result != funs_[i].result) {
      return false;
    }
  }
  for (size_t i = 0; i < sub.cons_.size(); i++) {
    if (sub.cons_[i].name != cons_[i].name || sub.cons_[i].sort != cons_[i].sort) return false;
  }
  return true;
}

}  // namespace tempo
