#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace relcorr {

/// Source position of a token, 1-based.
struct SourcePos {
  int line = 1;
  int col = 1;
};

/// Raised by the DSL parsers; carries the offending position.
class ParseError : public std::runtime_error {
 public:
  ParseError(SourcePos pos, const std::string& msg)
      : std::runtime_error("parse error at " + std::to_string(pos.line) + ":" +
                           std::to_string(pos.col) + ": " + msg),
        pos_(pos) {}

  SourcePos pos() const { return pos_; }

 private:
  SourcePos pos_;
};

/// Operands of a binary relation operation live on different spaces.
class SpaceMismatchError : public std::invalid_argument {
 public:
  explicit SpaceMismatchError(const std::string& what)
      : std::invalid_argument(what) {}
};

/// An operation would exceed the materialization or work cap.
class CapExceededError : public std::runtime_error {
 public:
  explicit CapExceededError(const std::string& what)
      : std::runtime_error(what) {}
};

/// A relative-correctness query that requires deterministic arguments
/// received a nondeterministic one.
class NondeterministicArgumentError : public std::invalid_argument {
 public:
  explicit NondeterministicArgumentError(const std::string& what)
      : std::invalid_argument(what) {}
};

}  // namespace relcorr
