#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chainrep {

// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad formula text, bad word, bad interpretation file, bad flag value.
class InputError : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public InputError {
 public:
  SyntaxError(std::size_t position, const std::string& message)
      : InputError("syntax error at " + std::to_string(position) + ": " + message),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

// A configurable budget (automaton states, monoid elements, sweep size) was exceeded.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

// A precondition of an operation does not hold for the given arguments.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A construction that must succeed by design did not (a bug, never bad input).
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace chainrep
