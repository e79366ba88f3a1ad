#pragma once

#include <map>
#include <set>
#include <string>

#include "idts/lambda.hpp"
#include "idts/rewrite.hpp"
#include "idts/term.hpp"

namespace idts {

/// Marks the system as a β-IDTS. Throws AtHeadedUserRule when a user rule
/// has an @-headed left-hand side. Idempotent.
RewriteSystem beta_extend(RewriteSystem system);

// HRS -> IDTS ---------------------------------------------------------------

/// ⌊u⌋. Variables in `metas` become metavariables applied to their
/// η-reduced arguments, renamed through `meta_names`; other applied variables
/// go through @. Throws NotEtaLongBetaNormal unless u is η-long β-normal.
Term hrs_term_to_idts(const Lambda& u, const std::set<std::string>& metas = {},
                      const std::map<std::string, std::string>& meta_names = {});

/// Alphabet of I(H): each symbol takes all the arguments of its curried type.
Alphabet hrs_to_idts_alphabet(const HrsSystem& hrs);

/// I(H): ⌊l⌋ -> ⌊r⌋ for every rule, plus β.
RewriteSystem hrs_to_idts(const HrsSystem& hrs);

// IDTS -> HRS ---------------------------------------------------------------

/// Curried constant types of the IDTS symbols (@ stays polymorphic).
std::map<std::string, Type> curried_constants(const Alphabet& alphabet);

/// How H treats the application symbol: as the constant @, or as HRS
/// application followed by β-normalization.
enum class ApplyMode { Constant, Application };

/// H(u), η-long β-normal. Metavariables become free variables of their
/// curried type.
Lambda natural_term(const Term& u, ApplyMode mode = ApplyMode::Constant);

/// Inverse of H on its image. `metas` gives the arity of each metavariable;
/// other free variables stay variables.
Term from_natural(const Lambda& u, const Alphabet& alphabet, const std::map<std::string, std::size_t>& metas = {});

/// H(I). Rules of arrow type keep their outer abstractions and are not HRS
/// rules in the strict sense; see idts_to_hrs_basetype.
HrsSystem idts_to_hrs_natural(const RewriteSystem& system, ApplyMode mode = ApplyMode::Constant);

/// H′(rule): both sides applied to fresh variables down to base type.
HrsRule basetype_rule(const Rule& rule, ApplyMode mode = ApplyMode::Constant);
HrsSystem idts_to_hrs_basetype(const RewriteSystem& system, ApplyMode mode = ApplyMode::Constant);

/// Names used by ⟨·⟩ for the abstraction and application symbols.
struct SingleSortedNames {
  std::string base = "o";
  std::string lambda = "Λ";
  std::string apply = "app";
};

SingleSortedNames single_sorted_names(const Alphabet& alphabet);

/// ⟨u⟩ over the single base type o.
Lambda single_sorted_term(const Term& u, const SingleSortedNames& names = {});

/// ⟨I⟩, including ⟨β⟩ for a β-IDTS.
HrsSystem idts_to_hrs_single_sorted(const RewriteSystem& system);

}  // namespace idts
