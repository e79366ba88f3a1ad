#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "idts/alphabet.hpp"
#include "idts/error.hpp"
#include "idts/type.hpp"

namespace idts {

enum class LambdaKind { Var, Const, App, Lam };

/// Simply-typed λ-term with binary application; the term language of HRSs.
/// Equality is alpha-equivalence.
class Lambda {
 public:
  Lambda() = default;

  static Lambda var(std::string name, Type type);
  static Lambda constant(std::string name, Type type);
  static Lambda app(Lambda fn, Lambda arg);
  static Lambda app(Lambda head, std::span<const Lambda> args);
  static Lambda lam(std::string binder, Type binder_type, Lambda body);

  bool valid() const { return node_ != nullptr; }
  LambdaKind kind() const { return node_->kind; }
  bool is_var() const { return kind() == LambdaKind::Var; }
  bool is_const() const { return kind() == LambdaKind::Const; }
  bool is_app() const { return kind() == LambdaKind::App; }
  bool is_lam() const { return kind() == LambdaKind::Lam; }

  const std::string& name() const { return node_->name; }
  const Type& type() const { return node_->type; }
  const Type& binder_type() const { return node_->binder_type; }
  const Lambda& fn() const { return node_->children[0]; }
  const Lambda& arg() const { return node_->children[1]; }
  const Lambda& body() const { return node_->children[0]; }
  std::span<const Lambda> children() const { return node_->children; }
  Lambda with_children(std::vector<Lambda> children) const;

  bool same_node(const Lambda& o) const { return node_ == o.node_; }
  friend bool operator==(const Lambda& a, const Lambda& b);

 private:
  struct Node {
    LambdaKind kind;
    std::string name;
    Type type;
    Type binder_type;
    std::vector<Lambda> children;
  };
  explicit Lambda(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

bool alpha_equal(const Lambda& a, const Lambda& b);
std::string alpha_key(const Lambda& u);

struct Spine {
  Lambda head;
  std::vector<Lambda> args;
};
/// (h a1 ... an) -> {h, [a1..an]}; h is not an application.
Spine spine(const Lambda& u);
/// λx1...λxn. body -> binders and body
std::pair<std::vector<std::pair<std::string, Type>>, Lambda> strip_lambdas(const Lambda& u);

std::set<std::string> free_vars(const Lambda& u);
std::map<std::string, Type> free_var_types(const Lambda& u);
std::set<std::string> constants(const Lambda& u);

using LambdaSubstitution = std::map<std::string, Lambda>;
Lambda apply_substitution(const Lambda& u, const LambdaSubstitution& theta);
/// θu in prefix notation: (uθ)↓β.
Lambda instantiate(const Lambda& u, const LambdaSubstitution& theta);

Lambda beta_normalize(const Lambda& u);
bool is_beta_normal(const Lambda& u);
/// η-long β-normal form.
Lambda long_normal_form(const Lambda& u);
bool is_long_normal(const Lambda& u);
/// Full η-normal form (all η-redexes λx.(u x), x ∉ FV(u), contracted).
Lambda eta_normalize(const Lambda& u);
/// x↑η for a variable or constant of the given type.
Lambda eta_expand_atom(const Lambda& atom);
/// If u is η-equivalent to a variable, return its name.
std::optional<std::string> eta_variable(const Lambda& u);

std::vector<Position> positions(const Lambda& u);
/// Positions that denote HRS subterms: every position except the function
/// part of an application node.
std::vector<Position> subterm_positions(const Lambda& u);
const Lambda& subterm_at(const Lambda& u, const Position& p);
Lambda replace_at(const Lambda& u, const Position& p, Lambda v);
std::vector<std::pair<std::string, Type>> binders_above(const Lambda& u, const Position& p);

Lambda rename_bound_apart(const Lambda& u, std::set<std::string> avoid = {});

/// Checks that u is well typed against the declared curried constant types
/// (the polymorphic @ is accepted at every instance).
Type typecheck(const Lambda& u, const std::map<std::string, Type>& constants, const TypeEnv& env = {});

// HRS systems ---------------------------------------------------------------

struct HrsRule {
  std::string name;
  Lambda lhs;
  Lambda rhs;
};

struct HrsSystem {
  std::set<std::string> base_types;
  /// Curried types of the function symbols.
  std::map<std::string, Type> functions;
  /// Explicit constructor declarations; when empty they are derived.
  std::map<std::string, std::set<std::string>> constructors;
  bool constructors_declared = false;
  std::map<std::string, Status> statuses;
  std::vector<HrsRule> rules;

  Status status(const std::string& symbol) const;
};

/// Z: free variables of the rule's left-hand side.
std::set<std::string> pattern_variables(const HrsRule& rule);

/// Throws NotEtaLongBetaNormal/RuleViolation/PatternViolation if the rule
/// is not an HRS rule (η-long β-normal sides, pattern lhs headed by a
/// function symbol, FV(r) ⊆ FV(l), equal types).
void validate_hrs_rule(const HrsRule& rule, const HrsSystem& system);

/// Higher-order pattern matching: θ with (lθ)↓β α-equal to the subject.
/// Free variables of `pattern` are the matchable ones; the subject's free
/// variables are constants.
std::optional<LambdaSubstitution> hrs_match(const Lambda& pattern, const Lambda& subject);

struct HrsReduct {
  Lambda term;
  std::string rule;
  Position position;
};

/// All one-step reducts u →_H v.
std::vector<HrsReduct> hrs_rewrite_step(const HrsSystem& system, const Lambda& u);

}  // namespace idts
