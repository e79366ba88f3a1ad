#pragma once

#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "idts/rewrite.hpp"
#include "idts/term.hpp"

namespace idts {

// Pattern unification -------------------------------------------------------

enum class UnifyFailure { Clash, OccursCheck, ScopeViolation, NotAPattern };
const char* unify_failure_name(UnifyFailure f);

struct UnifyError {
  UnifyFailure kind;
  std::string detail;
};

using UnifyResult = std::variant<Valuation, UnifyError>;
inline bool unified(const UnifyResult& r) { return std::holds_alternative<Valuation>(r); }

/// Most general unifier of two patterns. Variables in `frozen` behave as
/// constants that may only occur as metavariable arguments, never in a
/// substitute body. Other free variables are global constants.
UnifyResult pattern_unify(const Term& u, const Term& v, const std::set<std::string>& frozen = {});

// Critical pairs ------------------------------------------------------------

enum class Joinability { Unchecked, Joined, NotJoined, BudgetExhausted };
const char* joinability_name(Joinability j);

struct CriticalPair {
  std::string rule1;  // outer rule
  std::string rule2;  // rule applied at `position` of rule1's left-hand side
  Position position;
  Valuation unifier;
  /// Bound variables of rule1's lhs above the overlap.
  std::vector<std::pair<std::string, Type>> frozen;
  Term peak;   // l1τ
  Term left;   // (l1[r2]_p)τ
  Term right;  // r1τ
  Joinability verdict = Joinability::Unchecked;
  std::optional<Term> common;
};

/// All critical pairs, rule pairs in declaration order (β last), positions in
/// pre-order. The root overlap of a rule with itself is skipped.
std::vector<CriticalPair> critical_pairs(const RewriteSystem& system);

/// Renames the metavariables of (peak, left, right) in order of first
/// occurrence, giving a key that is stable under renaming.
std::string critical_pair_key(const CriticalPair& cp);

struct JoinResult {
  Joinability verdict = Joinability::Unchecked;
  std::optional<Term> common;
};

/// Searches for a common reduct of u and v, exploring at most `budget`
/// terms on each side.
JoinResult join(const RewriteSystem& system, const Term& u, const Term& v, std::size_t budget);

struct ConfluenceReport {
  std::vector<CriticalPair> pairs;
  bool locally_confluent() const;
  /// True when some pair could be neither joined nor refuted.
  bool unknown() const;
};

ConfluenceReport check_local_confluence(const RewriteSystem& system, std::size_t join_budget = 10000);

std::string format_confluence(const ConfluenceReport& report);
/// One JSON record per line: one per critical pair, then the verdict.
std::string confluence_json(const ConfluenceReport& report);

}  // namespace idts
