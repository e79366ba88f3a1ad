#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace idts {

/// Word over positive integers addressing a subterm; empty is the root.
using Position = std::vector<int>;

std::string position_str(const Position& p);

enum class ErrorKind {
  SyntaxError,
  UndeclaredSymbol,
  ArityMismatch,
  TypeMismatch,
  AmbiguousType,
  PatternViolation,
  RuleViolation,
  AtHeadedUserRule,
  NotEtaLongBetaNormal,
  LengthMismatch,
  InvalidAlphabet,
};

const char* error_kind_name(ErrorKind kind);

/// Source location, 1-based; line 0 means "no location".
struct Location {
  std::size_t line = 0;
  std::size_t column = 0;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, Position position = {}, Location location = {});

  ErrorKind kind() const { return kind_; }
  const Position& position() const { return position_; }
  const Location& location() const { return location_; }
  const std::string& message() const { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
  Position position_;
  Location location_;
};

}  // namespace idts
