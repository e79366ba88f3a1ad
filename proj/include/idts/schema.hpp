#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "idts/alphabet.hpp"
#include "idts/lambda.hpp"
#include "idts/rewrite.hpp"
#include "idts/term.hpp"

namespace idts {

// Precedences ---------------------------------------------------------------

/// Reflexive-transitive closure of a finite "depends on" relation, with its
/// equivalence classes. leq(a, b) means b depends on a, possibly indirectly.
class QuasiOrder {
 public:
  QuasiOrder() = default;
  /// `edges` holds pairs (a, b) meaning b depends on a.
  QuasiOrder(std::set<std::string> nodes, const std::set<std::pair<std::string, std::string>>& edges);

  bool leq(const std::string& a, const std::string& b) const;
  bool equiv(const std::string& a, const std::string& b) const { return leq(a, b) && leq(b, a); }
  bool less(const std::string& a, const std::string& b) const { return leq(a, b) && !leq(b, a); }
  const std::vector<std::set<std::string>>& classes() const { return classes_; }
  const std::set<std::string>& nodes() const { return nodes_; }

 private:
  std::set<std::string> nodes_;
  std::map<std::string, int> index_;
  std::vector<std::vector<bool>> reach_;
  std::vector<std::set<std::string>> classes_;
};

struct PrecedenceAnalysis {
  QuasiOrder types;    // ≤_B
  QuasiOrder symbols;  // ≤_F
};

PrecedenceAnalysis compute_precedences(const RewriteSystem& system);
QuasiOrder type_precedence(const Alphabet& alphabet);

// Positivity ----------------------------------------------------------------

struct ConstructorPositivity {
  std::string constructor;
  std::string base;
  bool positive = false;
  bool basic = false;
};

struct PositivityReport {
  std::vector<ConstructorPositivity> constructors;
  std::map<std::string, bool> positive_types;
  std::map<std::string, bool> basic_types;

  bool is_basic(const Type& t) const;
};

PositivityReport check_positivity(const Alphabet& alphabet);

// Assumptions (A) -----------------------------------------------------------

struct AssumptionViolation {
  int assumption;  // 1, 2 or 4
  std::string detail;
};

struct AssumptionsReport {
  std::vector<AssumptionViolation> violations;
  /// Informational notes, e.g. that (3) holds for a finite signature.
  std::vector<std::string> notes;
  bool holds() const { return violations.empty(); }
};

AssumptionsReport check_assumptions(const RewriteSystem& system, const PrecedenceAnalysis& analysis,
                                    const PositivityReport& positivity);
AssumptionsReport check_assumptions(const RewriteSystem& system);

// Accessibility -------------------------------------------------------------

struct AccStep {
  Position position;
  /// Clause of the accessibility definition that adds this position.
  int clause;
};

/// Acc(v) as positions of v, each with the clause that first reaches it.
std::vector<AccStep> accessible_positions(const Term& v, const Alphabet& alphabet, const PositivityReport& positivity);

/// Derivation of u ∈ Acc(v): the chain of steps from the root, or nullopt.
std::optional<std::vector<AccStep>> accessible(const Term& u, const Term& v, const Alphabet& alphabet);

/// Metavariables Z with Z(x̄) ∈ Acc(l_i) for some i, x̄ distinct bound variables.
std::set<std::string> accessible_metavars(std::span<const Term> ls, const Alphabet& alphabet,
                                          const PositivityReport& positivity);
std::set<std::string> accessible_metavars(std::span<const Term> ls, const Alphabet& alphabet);

// Orderings -----------------------------------------------------------------

enum class Comparison { StrictlyLess, Equal, Incomparable };
const char* comparison_name(Comparison c);

/// u ⊴̂ v: strictly-less when a witness with q ≠ ε exists.
Comparison covered_subterm_cmp(const Term& u, const Term& v);
/// Throws LengthMismatch for lex on sequences of different lengths.
Comparison status_compare(std::span<const Term> us, std::span<const Term> ls, Status status);

Comparison covered_subterm_cmp(const Lambda& u, const Lambda& v);
Comparison status_compare(std::span<const Lambda> us, std::span<const Lambda> ls, Status status);

// Computable closure --------------------------------------------------------

template <class T>
struct Derivation {
  Position position;
  T term;
  /// Clause that justifies the node; 0 marks the failing node.
  int clause = 0;
  std::string detail;
  std::vector<Derivation> premises;
};

template <class T>
struct ClosureResult {
  bool accepted = false;
  std::optional<Derivation<T>> derivation;
  /// Innermost subterm for which no clause applies, and why.
  Position failure_position;
  T failing_subterm;
  std::string reason;
  /// Subterms from the root of the right-hand side down to the failure.
  std::vector<std::pair<Position, T>> failure_chain;
};

struct ClosureContext {
  const Alphabet* alphabet = nullptr;
  const PrecedenceAnalysis* analysis = nullptr;
  const PositivityReport* positivity = nullptr;
  /// Overrides the accessible metavariables computed from l̄ when set.
  std::optional<std::set<std::string>> accessible;
};

ClosureResult<Term> computable_closure_check(const std::string& f, std::span<const Term> ls, const Term& r,
                                             const ClosureContext& ctx);

/// Re-checks each recorded node against its clause's preconditions.
bool verify_derivation(const Derivation<Term>& d, const std::string& f, std::span<const Term> ls,
                       const ClosureContext& ctx);

// Reports -------------------------------------------------------------------

struct RuleReport {
  std::string rule;
  std::string lhs;
  std::string rhs;
  bool accepted = false;
  bool non_duplicating = true;
  std::optional<Derivation<std::string>> derivation;
  std::string failing_subterm;
  Position failure_position;
  std::string reason;
  std::vector<std::pair<Position, std::string>> failure_chain;
};

struct CheckReport {
  bool hrs = false;
  AssumptionsReport assumptions;
  std::vector<ConstructorPositivity> constructors;
  std::vector<std::set<std::string>> symbol_classes;
  std::vector<RuleReport> rules;
  /// β-IDTS mode: the report for β at a representative type.
  std::optional<RuleReport> beta;
  bool terminating() const;
};

CheckReport check_general_schema(const RewriteSystem& system);

bool is_non_duplicating(const Rule& rule);

// HRS -----------------------------------------------------------------------

/// Constructors of an HRS: the declared ones, or the positive symbols with a
/// base target that head no left-hand side (iterated to a fixpoint).
std::map<std::string, std::set<std::string>> hrs_constructors(const HrsSystem& system);

/// Accessible subterms Acc′(v), as positions of v.
std::vector<AccStep> accessible_positions(const Lambda& v, const HrsSystem& system, const PositivityReport& positivity);

ClosureResult<Lambda> computable_closure_check_hrs(const HrsSystem& system, const HrsRule& rule);

CheckReport check_general_schema_hrs(const HrsSystem& system);

/// Alphabet view of an HRS (curried types as arity-0 signatures) with the
/// effective constructors, used for the positivity analysis.
Alphabet hrs_alphabet(const HrsSystem& system);

std::string format_report(const CheckReport& report);
std::string report_json(const CheckReport& report);

}  // namespace idts
