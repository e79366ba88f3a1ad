#include "idts/alphabet.hpp"

#include <functional>

namespace idts {

std::string Signature::str() const {
  std::string s = "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) s += ", ";
    s += args[i].str();
  }
  return s + ") -> " + result.str();
}

const char* status_name(Status s) { return s == Status::Lex ? "lex" : "mul"; }

const Signature* Alphabet::function(const std::string& name) const {
  auto it = functions.find(name);
  return it == functions.end() ? nullptr : &it->second;
}

bool Alphabet::is_constructor(const std::string& symbol) const { return constructor_of(symbol).has_value(); }

std::optional<std::string> Alphabet::constructor_of(const std::string& symbol) const {
  if (symbol == kApply) return std::nullopt;
  for (auto& [base, cs] : constructors)
    if (cs.count(symbol)) return base;
  return std::nullopt;
}

Status Alphabet::status(const std::string& symbol) const {
  auto it = statuses.find(symbol);
  return it == statuses.end() ? Status::Lex : it->second;
}

namespace {
void check_type_declared(const Type& t, const std::set<std::string>& bases, const std::string& where) {
  if (t.is_base()) {
    if (!bases.count(t.name()))
      throw Error(ErrorKind::InvalidAlphabet, "undeclared base type " + t.name() + " in " + where);
    return;
  }
  check_type_declared(t.domain(), bases, where);
  check_type_declared(t.codomain(), bases, where);
}
}  // namespace

void Alphabet::validate() const {
  for (auto& [name, sig] : functions) {
    if (base_types.count(name)) throw Error(ErrorKind::InvalidAlphabet, name + " is both a base type and a symbol");
    if (metavariables.count(name))
      throw Error(ErrorKind::InvalidAlphabet, name + " is both a function symbol and a metavariable");
    if (name == kApply) throw Error(ErrorKind::InvalidAlphabet, "@ is builtin and cannot be declared");
    for (const Type& a : sig.args) check_type_declared(a, base_types, name);
    check_type_declared(sig.result, base_types, name);
  }
  for (auto& [name, sig] : metavariables) {
    if (base_types.count(name)) throw Error(ErrorKind::InvalidAlphabet, name + " is both a base type and a metavariable");
    for (const Type& a : sig.args) check_type_declared(a, base_types, name);
    check_type_declared(sig.result, base_types, name);
  }
  std::set<std::string> seen;
  for (auto& [base, cs] : constructors) {
    if (!base_types.count(base)) throw Error(ErrorKind::InvalidAlphabet, "constructors declared for unknown type " + base);
    for (const std::string& c : cs) {
      const Signature* sig = function(c);
      if (!sig) throw Error(ErrorKind::InvalidAlphabet, "constructor " + c + " is not a declared function symbol");
      if (!sig->result.is_base() || sig->result.name() != base)
        throw Error(ErrorKind::InvalidAlphabet, "constructor " + c + " of " + base + " has result type " + sig->result.str());
      if (!seen.insert(c).second) throw Error(ErrorKind::InvalidAlphabet, "constructor " + c + " declared twice");
    }
  }
  for (auto& [f, st] : statuses)
    if (!functions.count(f) && f != kApply)
      throw Error(ErrorKind::InvalidAlphabet, "status given for undeclared symbol " + f);
}

Type typecheck(const Term& u, const Alphabet& alphabet, const TypeEnv& env) {
  std::map<std::string, Signature> metas;
  std::vector<std::pair<std::string, Type>> bound;
  Position pos;

  std::function<Type(const Term&)> rec = [&](const Term& t) -> Type {
    auto child = [&](std::size_t i) {
      pos.push_back(static_cast<int>(i + 1));
      Type r = rec(t.children()[i]);
      pos.pop_back();
      return r;
    };
    switch (t.kind()) {
      case TermKind::Var: {
        const Type* declared = nullptr;
        for (auto it = bound.rbegin(); it != bound.rend(); ++it)
          if (it->first == t.name()) {
            declared = &it->second;
            break;
          }
        if (!declared) {
          auto e = env.find(t.name());
          if (e == env.end()) throw Error(ErrorKind::UndeclaredSymbol, "free variable " + t.name() + " has no type", pos);
          declared = &e->second;
        }
        if (!(*declared == t.type()))
          throw Error(ErrorKind::TypeMismatch, "variable " + t.name() + " used at type " + t.type().str() +
                                                   " but has type " + declared->str(),
                      pos);
        return t.type();
      }
      case TermKind::Abs: {
        bound.emplace_back(t.name(), t.binder_type());
        Type body = child(0);
        bound.pop_back();
        return Type::arrow(t.binder_type(), body);
      }
      case TermKind::Fun: {
        if (t.name() == kApply) {
          if (t.arity() != 2) throw Error(ErrorKind::ArityMismatch, "@ takes 2 arguments", pos);
          Type fn = child(0);
          Type arg = child(1);
          if (!fn.is_arrow()) {
            pos.push_back(1);
            throw Error(ErrorKind::TypeMismatch, "@ applied to a term of base type " + fn.str(), pos);
          }
          if (!(fn.domain() == arg)) {
            pos.push_back(2);
            throw Error(ErrorKind::TypeMismatch, "argument of type " + arg.str() + ", expected " + fn.domain().str(), pos);
          }
          if (!(t.type() == fn.codomain()))
            throw Error(ErrorKind::TypeMismatch, "@ node annotated with " + t.type().str(), pos);
          return fn.codomain();
        }
        const Signature* sig = alphabet.function(t.name());
        if (!sig) throw Error(ErrorKind::UndeclaredSymbol, "undeclared function symbol " + t.name(), pos);
        if (sig->arity() != t.arity())
          throw Error(ErrorKind::ArityMismatch, t.name() + " expects " + std::to_string(sig->arity()) + " arguments, got " +
                                                    std::to_string(t.arity()),
                      pos);
        for (std::size_t i = 0; i < t.arity(); ++i) {
          Type a = child(i);
          if (!(a == sig->args[i])) {
            pos.push_back(static_cast<int>(i + 1));
            throw Error(ErrorKind::TypeMismatch, "argument " + std::to_string(i + 1) + " of " + t.name() + " has type " +
                                                     a.str() + ", expected " + sig->args[i].str(),
                        pos);
          }
        }
        if (!(t.type() == sig->result))
          throw Error(ErrorKind::TypeMismatch, t.name() + " node annotated with " + t.type().str(), pos);
        return sig->result;
      }
      case TermKind::Meta: {
        Signature used;
        for (std::size_t i = 0; i < t.arity(); ++i) used.args.push_back(child(i));
        used.result = t.type();
        auto d = alphabet.metavariables.find(t.name());
        if (d != alphabet.metavariables.end() && !(d->second == used))
          throw Error(ErrorKind::TypeMismatch, "metavariable " + t.name() + " declared " + d->second.str() + ", used at " +
                                                   used.str(),
                      pos);
        auto [it, fresh] = metas.emplace(t.name(), used);
        if (!fresh && !(it->second == used))
          throw Error(ErrorKind::TypeMismatch, "metavariable " + t.name() + " used at both " + it->second.str() +
                                                   " and " + used.str(),
                      pos);
        return t.type();
      }
    }
    return t.type();
  };
  return rec(u);
}

}  // namespace idts
