#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace asymhash {

// Bad user input: malformed corpus, invalid parameters, incompatible
// strategies. The CLI maps these to exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A computed result broke one of its own invariants. The CLI maps these to
// exit code 2.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace asymhash
