#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "idts/alphabet.hpp"
#include "idts/lambda.hpp"
#include "idts/rewrite.hpp"

namespace idts {

enum class Mode { Idts, Hrs };

/// Contents of a system file. In IDTS mode `idts` is populated, in HRS mode
/// `hrs`; `variables` holds the VARIABLES section (free variable types).
struct SystemFile {
  Mode mode = Mode::Idts;
  RewriteSystem idts;
  HrsSystem hrs;
  TypeEnv variables;
};

/// Throws Error (SyntaxError, typing errors, PatternViolation, ...) with a
/// source location.
/// `default_mode` applies when the file has no MODE section.
SystemFile parse_system(std::string_view text, Mode default_mode = Mode::Idts);
/// Files ending in .hrs default to HRS mode.
SystemFile load_system(const std::string& path);

Type parse_type(std::string_view text);

/// IDTS metaterm. Free variables are typed by `env`, metavariables by the
/// alphabet's declarations or by inference; `expected` fixes the type of the
/// whole term when given.
Term parse_term(std::string_view text, const Alphabet& alphabet, const TypeEnv& env = {},
                std::optional<Type> expected = std::nullopt);

/// HRS term (λ-syntax) over the curried constant types.
Lambda parse_lambda(std::string_view text, const std::map<std::string, Type>& constants, const TypeEnv& env = {},
                    std::optional<Type> expected = std::nullopt);

struct PrintOptions {
  /// Print binder types: [x:T] u, λx:T. u
  bool annotate = false;
};

std::string print_term(const Term& u, PrintOptions options = {});
std::string print_lambda(const Lambda& u, PrintOptions options = {});
std::string print_rule(const Rule& r, PrintOptions options = {});
std::string print_hrs_rule(const HrsRule& r, PrintOptions options = {});
std::string print_valuation(const Valuation& sigma);
std::string print_lambda_substitution(const LambdaSubstitution& theta);

/// Renders a system in the format read by parse_system.
std::string print_system(const RewriteSystem& system, const TypeEnv& variables = {});
std::string print_system(const HrsSystem& system, const TypeEnv& variables = {});

}  // namespace idts
