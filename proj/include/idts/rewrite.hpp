#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "idts/alphabet.hpp"
#include "idts/term.hpp"

namespace idts {

/// Name given to the implicit β rules.
inline constexpr const char* kBetaRule = "beta";

struct Rule {
  std::string name;
  Term lhs;
  Term rhs;
};

struct RewriteSystem {
  Alphabet alphabet;
  std::vector<Rule> rules;
  bool beta_enabled = false;

  const Rule* rule(const std::string& name) const;
};

/// Throws PatternViolation, RuleViolation or a typing error when `rule` is
/// not an IDTS rule: pattern lhs headed by a function symbol, closed sides
/// of equal type, Var(r) ⊆ Var(l).
void validate_rule(const Rule& rule, const Alphabet& alphabet);
/// Validates every rule; with β enabled, rejects user rules headed by @
/// (AtHeadedUserRule).
void validate_system(const RewriteSystem& system);

/// β_{s,t} = @([x]Z(x), Z') -> Z(Z') with x : s, Z(x) : t.
Rule make_beta_rule(const Type& s, const Type& t);

enum class MatchFailure { NoMatch, ScopeViolation, InconsistentRepeatedMetavariable };
const char* match_failure_name(MatchFailure f);

struct MatchError {
  MatchFailure kind;
  /// Position in the pattern where matching failed.
  Position position;
};

using MatchResult = std::variant<Valuation, MatchError>;

/// CRS pattern matching: σ with pattern·σ α-equal to subject. Free
/// variables of the subject are treated as constants.
MatchResult match(const Term& pattern, const Term& subject);
inline bool matched(const MatchResult& r) { return std::holds_alternative<Valuation>(r); }

struct Reduct {
  Term term;
  std::string rule;
  Position position;
};

/// All one-step reducts of u, positions in pre-order, rules in declaration
/// order with β last.
std::vector<Reduct> rewrite_step(const RewriteSystem& system, const Term& u);
/// Reducts at the root only.
std::vector<Reduct> root_reducts(const RewriteSystem& system, const Term& u);

enum class Strategy { LeftmostOutermost, LeftmostInnermost, Full };
const char* strategy_name(Strategy s);

struct TraceStep {
  Term term;
  /// Rule producing this term; empty for the start term.
  std::string rule;
  Position position;
};

struct RewriteTrace {
  std::vector<TraceStep> steps;
  bool budget_exhausted = false;
  bool loop_detected = false;
  /// Index of the step the last term repeats when a loop is detected.
  std::size_t loop_start = 0;

  const Term& result() const { return steps.back().term; }
  std::size_t step_count() const { return steps.size() - 1; }
  std::size_t cycle_length() const { return loop_detected ? steps.size() - 1 - loop_start : 0; }
  bool normal_form() const { return !budget_exhausted && !loop_detected; }
};

/// Rewrites u until a normal form, a repeated term or the step budget.
/// Full explores the whole reduct graph depth-first: it reports a cycle if
/// one is reachable, otherwise the path to the first normal form found.
RewriteTrace normalize(const RewriteSystem& system, const Term& u, std::size_t budget,
                       Strategy strategy = Strategy::LeftmostOutermost);

}  // namespace idts
