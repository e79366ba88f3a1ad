#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "idts/term.hpp"
#include "idts/type.hpp"

namespace idts {

/// Argument types and result type of a function symbol or metavariable.
struct Signature {
  std::vector<Type> args;
  Type result;

  std::size_t arity() const { return args.size(); }
  Type curried() const { return Type::curried(args, result); }
  std::string str() const;
  friend bool operator==(const Signature& a, const Signature& b) = default;
};

enum class Status { Lex, Mul };

const char* status_name(Status s);

/// IDTS alphabet: base types, function symbols, declared metavariables,
/// constructors per base type and statuses. The builtin @ is implicit.
struct Alphabet {
  std::set<std::string> base_types;
  std::map<std::string, Signature> functions;
  std::map<std::string, Signature> metavariables;
  std::map<std::string, std::set<std::string>> constructors;
  std::map<std::string, Status> statuses;

  const Signature* function(const std::string& name) const;
  bool is_constructor(const std::string& symbol) const;
  /// Base type whose constructor set contains `symbol`.
  std::optional<std::string> constructor_of(const std::string& symbol) const;
  /// Declared status, lex when absent.
  Status status(const std::string& symbol) const;

  /// Throws InvalidAlphabet on overlapping name spaces, undeclared base
  /// types or ill-typed constructor declarations.
  void validate() const;
};

/// Types of free variables.
using TypeEnv = std::map<std::string, Type>;

/// Checks u against the alphabet and returns its type. Metavariables must
/// be used consistently; declared ones must match their declaration.
/// Errors name the offending position.
Type typecheck(const Term& u, const Alphabet& alphabet, const TypeEnv& env = {});

}  // namespace idts
