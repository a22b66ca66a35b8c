#include "tempo/sexpr.hpp"

#include <cctype>
#include <sstream>

namespace tempo {

bool SExpr::headed(const std::string& head) const {
  return is_list() && !items.empty() && items[0].is_atom && items[0].atom == head;
}

std::string SExpr::loc() const {
  std::ostringstream os;
  os << "line " << line << ", col " << col;
  return os.str();
}

namespace {

struct Reader {
  const std::string& text;
  size_t pos = 0;
  int line = 1;
  int col = 1;

  explicit Reader(const std::string& t) : text(t) {}

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }

  void advance() {
    if (text[pos] == '\n') {
      line++;
      col = 1;
    } else {
      col++;
    }
    pos++;
  }

  void skip_ws() {
    while (!eof()) {
      char c = peek();
      if (c == ';') {
        while (!eof() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream os;
    os << "line " << line << ", col " << col;
    throw SpecError::parse(os.str(), what);
  }

  SExpr read() {
    skip_ws();
    if (eof()) fail("unexpected end of input (expected expression)");
    SExpr e;
    e.line = line;
    e.col = col;
    char c = peek();
    if (c == '(') {
      advance();
      e.is_atom = false;
      while (true) {
        skip_ws();
        if (eof()) fail("unexpected end of input (expected ')')");
        if (peek() == ')') {
          advance();
          break;
        }
        e.items.push_back(read());
      }
      return e;
    }
    if (c == ')') fail("unexpected ')'");
    e.is_atom = true;
    while (!eof()) {
      c = peek();
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == ';') break;
      e.atom.push_back(c);
      advance();
    }
    return e;
  }
};

}  // namespace

SExpr parse_sexpr(const std::string& text) {
  Reader r(text);
  SExpr e = r.read();
  r.skip_ws();
  if (!r.eof()) r.fail("trailing input after expression");
  return e;
}

std::vector<SExpr> parse_sexpr_file(const std::string& text) {
  Reader r(text);
  std::vector<SExpr> out;
  while (true) {
    r.skip_ws();
    if (r.eof()) break;
    out.push_back(r.read());
  }
  return out;
}

static void print_rec(const SExpr& e, std::string& out) {
  if (e.is_atom) {
    out += e.atom;
    return;
  }
  out += '(';
  for (size_t i = 0; i < e.items.size(); i++) {
    if (i) out += ' ';
    print_rec(e.items[i], out);
  }
  out += ')';
}

std::string print_sexpr(const SExpr& e) {
  std::string out;
  print_rec(e, out);
  return out;
}

}  // namespace tempo
