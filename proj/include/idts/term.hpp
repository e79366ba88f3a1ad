#pragma once

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "idts/error.hpp"
#include "idts/type.hpp"

namespace idts {

/// Name of the builtin application symbol @.
inline constexpr const char* kApply = "@";

enum class TermKind { Var, Abs, Fun, Meta };

/// IDTS metaterm: variable, abstraction [x]u, function application f(u1..un)
/// or metavariable application Z(u1..un). Every node records its type.
///
/// Equality is alpha-equivalence.
class Term {
 public:
  Term() = default;

  static Term var(std::string name, Type type);
  static Term abs(std::string binder, Type binder_type, Term body);
  static Term fun(std::string symbol, std::vector<Term> args, Type result);
  /// @(fn, arg); the result type is the codomain of fn's type.
  static Term app(Term fn, Term arg);
  static Term meta(std::string name, std::vector<Term> args, Type result);

  bool valid() const { return node_ != nullptr; }
  TermKind kind() const { return node_->kind; }
  bool is_var() const { return kind() == TermKind::Var; }
  bool is_abs() const { return kind() == TermKind::Abs; }
  bool is_fun() const { return kind() == TermKind::Fun; }
  bool is_meta() const { return kind() == TermKind::Meta; }
  bool is_app() const { return is_fun() && node_->name == kApply; }

  /// Variable name, binder name, symbol or metavariable.
  const std::string& name() const { return node_->name; }
  const Type& type() const { return node_->type; }
  /// Type of the bound variable of an abstraction.
  const Type& binder_type() const { return node_->binder_type; }
  const Term& body() const { return node_->children.front(); }
  std::span<const Term> args() const { return node_->children; }
  const Term& arg(std::size_t i) const { return node_->children[i]; }
  std::size_t arity() const { return node_->children.size(); }

  /// Direct children in position order (body of an abstraction is child 1).
  std::span<const Term> children() const { return node_->children; }
  Term with_children(std::vector<Term> children) const;

  bool same_node(const Term& other) const { return node_ == other.node_; }

  friend bool operator==(const Term& a, const Term& b);

 private:
  struct Node {
    TermKind kind;
    std::string name;
    Type type;
    Type binder_type;
    std::vector<Term> children;
  };
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

bool alpha_equal(const Term& a, const Term& b);
/// Canonical string invariant under alpha-renaming (bound variables become
/// de Bruijn indices). Two terms are alpha-equal iff their keys are equal.
std::string alpha_key(const Term& u);

std::set<std::string> free_vars(const Term& u);
std::map<std::string, Type> free_var_types(const Term& u);
std::set<std::string> bound_vars(const Term& u);
/// Var(u): metavariables occurring in u.
std::set<std::string> meta_vars(const Term& u);
bool has_meta(const Term& u);
bool occurs_symbol(const Term& u, const std::string& symbol);
std::size_t term_size(const Term& u);
std::size_t term_depth(const Term& u);

/// Every metavariable is applied to distinct variables bound above it.
bool is_pattern(const Term& u);

// Positions -----------------------------------------------------------------

/// Pos(u) in pre-order (parents before children, left to right).
std::vector<Position> positions(const Term& u);
const Term& subterm_at(const Term& u, const Position& p);
/// u[v]_p, without renaming: variables of v may be captured by binders above p.
Term replace_at(const Term& u, const Position& p, Term v);
/// Binders on the path from the root to p (outermost first).
std::vector<std::pair<std::string, Type>> binders_above(const Term& u, const Position& p);

// Substitutions and valuations ----------------------------------------------

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);

using Substitution = std::map<std::string, Term>;

/// Capture-avoiding simultaneous substitution. Throws TypeMismatch if a
/// binding does not preserve the variable's type.
Term apply_substitution(const Term& u, const Substitution& tau);

/// n-ary substitute written λ̲(x1..xn).body
struct Substitute {
  std::vector<std::pair<std::string, Type>> params;
  Term body;

  std::size_t arity() const { return params.size(); }
  /// s1 -> ... -> sn -> s
  Type type() const;
  /// Free variables of the body other than the parameters.
  std::set<std::string> free_vars() const;
  /// body[params := args], capture-avoiding.
  Term instantiate(std::span<const Term> args) const;
};

bool alpha_equal(const Substitute& a, const Substitute& b);
std::string substitute_str(const Substitute& s);

using Valuation = std::map<std::string, Substitute>;

/// FV(cod(σ)).
std::set<std::string> codomain_free_vars(const Valuation& sigma);

/// Postfix valuation application: x σ = x; ([x]u)σ = [x](uσ) renaming x away
/// from FV(cod σ); f(ū)σ = f(ūσ); Z(ū)σ = v{x̄ ↦ ūσ} when σ(Z) = λ̲(x̄).v.
/// Metavariables outside dom(σ) are kept. Throws ArityMismatch.
Term apply_valuation(const Term& u, const Valuation& sigma);

/// Renames bound variables so that binders are pairwise distinct and
/// disjoint from `avoid` and from the free variables of u.
Term rename_bound_apart(const Term& u, std::set<std::string> avoid = {});

// Beta and eta --------------------------------------------------------------

enum class BetaStrategy { LeftmostOutermost, RightmostInnermost };

bool is_beta_redex(const Term& u);
/// One β-step at the redex chosen by the strategy; returns false when u is
/// β-normal.
bool beta_step(const Term& u, BetaStrategy strategy, Term& out, Position* at = nullptr);
Term beta_normalize(const Term& u, BetaStrategy strategy = BetaStrategy::LeftmostOutermost);
bool is_beta_normal(const Term& u);

/// η-long form in IDTS syntax: every subterm of arrow type that is not an
/// abstraction and not in the function position of an @ is expanded to
/// [y]@(u, y↑).
Term eta_long(const Term& u);
/// Contracts [x]@(u, x) to u when x ∉ FV(u), everywhere.
Term eta_reduce(const Term& u);

}  // namespace idts

template <>
struct std::hash<idts::Term> {
  std::size_t operator()(const idts::Term& t) const { return std::hash<std::string>{}(idts::alpha_key(t)); }
};
