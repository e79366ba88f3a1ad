#include "idts/type.hpp"

#include <cassert>

#include "idts/error.hpp"

namespace idts {

Type Type::base(std::string name) {
  return Type(std::make_shared<const Node>(Node{std::move(name), {}, {}}));
}

Type Type::arrow(Type domain, Type codomain) {
  assert(domain.valid() && codomain.valid());
  return Type(std::make_shared<const Node>(Node{{}, std::move(domain), std::move(codomain)}));
}

Type Type::curried(std::span<const Type> args, Type result) {
  Type t = std::move(result);
  for (auto it = args.rbegin(); it != args.rend(); ++it) t = arrow(*it, t);
  return t;
}

bool Type::is_base() const { return valid() && !node_->domain.valid(); }

const std::string& Type::name() const { return node_->name; }
const Type& Type::domain() const { return node_->domain; }
const Type& Type::codomain() const { return node_->codomain; }

std::vector<Type> Type::argument_types() const {
  std::vector<Type> out;
  const Type* t = this;
  while (t->is_arrow()) {
    out.push_back(t->domain());
    t = &t->codomain();
  }
  return out;
}

const Type& Type::target() const {
  const Type* t = this;
  while (t->is_arrow()) t = &t->codomain();
  return *t;
}

std::size_t Type::arrow_count() const {
  std::size_t n = 0;
  for (const Type* t = this; t->is_arrow(); t = &t->codomain()) ++n;
  return n;
}

std::string Type::str() const {
  if (!valid()) return "<?>";
  if (is_base()) return name();
  std::string dom = domain().str();
  if (domain().is_arrow()) dom = "(" + dom + ")";
  return dom + " -> " + codomain().str();
}

bool operator==(const Type& a, const Type& b) {
  if (a.node_ == b.node_) return true;
  if (!a.valid() || !b.valid()) return false;
  if (a.is_base() != b.is_base()) return false;
  if (a.is_base()) return a.name() == b.name();
  return a.domain() == b.domain() && a.codomain() == b.codomain();
}

std::string position_str(const Position& p) {
  if (p.empty()) return "ε";
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(p[i]);
  }
  return s;
}

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UndeclaredSymbol: return "UndeclaredSymbol";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::AmbiguousType: return "AmbiguousType";
    case ErrorKind::PatternViolation: return "PatternViolation";
    case ErrorKind::RuleViolation: return "RuleViolation";
    case ErrorKind::AtHeadedUserRule: return "AtHeadedUserRule";
    case ErrorKind::NotEtaLongBetaNormal: return "NotEtaLongBetaNormal";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::InvalidAlphabet: return "InvalidAlphabet";
  }
  return "Error";
}

namespace {
std::string format_error(ErrorKind kind, const std::string& message, const Position& position,
                         const Location& location) {
  std::string s;
  if (location.line) s += std::to_string(location.line) + ":" + std::to_string(location.column) + ": ";
  s += error_kind_name(kind);
  s += ": " + message;
  if (!position.empty()) s += " (at position " + position_str(position) + ")";
  return s;
}
}  // namespace

Error::Error(ErrorKind kind, std::string message, Position position, Location location)
    : std::runtime_error(format_error(kind, message, position, location)),
      kind_(kind),
      message_(std::move(message)),
      position_(std::move(position)),
      location_(location) {}

}  // namespace idts
