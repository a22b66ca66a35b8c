#pragma once

#include <stdexcept>
#include <string>

namespace tempo {

// Specification-level failures. The CLI maps each kind to a distinct
// diagnostic and exit code.
class SpecError : public std::runtime_error {
 public:
  enum class Kind {
    Usage,      // bad flags / config
    Parse,      // syntax errors, with location
    Sort,       // ill-sorted formula or term
    Unhoused,   // temporal subformula not present in the closure set A
    Model,      // semantic model-file errors (nondeterministic function
                // update, static symbol written, ...)
  };

  SpecError(Kind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  Kind kind() const { return kind_; }

  static SpecError parse(const std::string& where, const std::string& what) {
    return SpecError(Kind::Parse, where.empty() ? what : where + ": " + what);
  }
  static SpecError sort(const std::string& what) {
    return SpecError(Kind::Sort, what);
  }
  static SpecError unhoused(const std::string& what) {
    return SpecError(Kind::Unhoused, what);
  }
  static SpecError model(const std::string& what) {
    return SpecError(Kind::Model, what);
  }
  static SpecError usage(const std::string& what) {
    return SpecError(Kind::Usage, what);
  }

 private:
  Kind kind_;
};

}  // namespace tempo
