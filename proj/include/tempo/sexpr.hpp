#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tempo/error.hpp"

namespace tempo {

// Parenthesized symbolic expressions: the surface syntax for models,
// properties, prophecy specs, and invariants.
struct SExpr {
  bool is_atom = false;
  std::string atom;             // valid when is_atom
  std::vector<SExpr> items;     // valid when !is_atom
  int line = 0;
  int col = 0;

  bool is_list() const { return !is_atom; }
  size_t size() const { return items.size(); }
  const SExpr& operator[](size_t i) const { return items[i]; }

  // True when this is a list whose head atom equals `head`.
  bool headed(const std::string& head) const;
  std::string loc() const;
};

// Parses a single expression; trailing input is an error.
SExpr parse_sexpr(const std::string& text);

// Parses a file-level sequence of expressions. Comments run from ';' to
// end of line.
std::vector<SExpr> parse_sexpr_file(const std::string& text);

std::string print_sexpr(const SExpr& e);

}  // namespace tempo
