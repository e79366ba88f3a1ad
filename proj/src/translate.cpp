#include "idts/translate.hpp"

#include <cctype>
#include <functional>

#include "idts/schema.hpp"

namespace idts {

RewriteSystem beta_extend(RewriteSystem system) {
  for (const Rule& r : system.rules)
    if (r.lhs.is_app())
      throw Error(ErrorKind::AtHeadedUserRule, "rule " + r.name + " has a left-hand side headed by @");
  system.beta_enabled = true;
  return system;
}

// HRS -> IDTS ---------------------------------------------------------------

namespace {

Term floor_rec(const Lambda& u, const std::set<std::string>& metas, const std::map<std::string, std::string>& names) {
  if (u.is_lam()) return Term::abs(u.name(), u.binder_type(), floor_rec(u.body(), metas, names));
  Spine sp = spine(u);
  std::vector<Term> args;
  if (sp.head.is_var() && metas.count(sp.head.name())) {
    for (const Lambda& a : sp.args) {
      if (auto x = eta_variable(a); x && !metas.count(*x)) args.push_back(Term::var(*x, a.type()));
      else args.push_back(floor_rec(a, metas, names));
    }
    auto it = names.find(sp.head.name());
    return Term::meta(it == names.end() ? sp.head.name() : it->second, std::move(args), u.type());
  }
  for (const Lambda& a : sp.args) args.push_back(floor_rec(a, metas, names));
  if (sp.head.is_var()) {
    Term t = Term::var(sp.head.name(), sp.head.type());
    for (Term& a : args) t = Term::app(std::move(t), std::move(a));
    return t;
  }
  if (sp.head.name() == kApply && args.size() >= 2) {
    Term t = Term::app(std::move(args[0]), std::move(args[1]));
    for (std::size_t i = 2; i < args.size(); ++i) t = Term::app(std::move(t), std::move(args[i]));
    return t;
  }
  return Term::fun(sp.head.name(), std::move(args), u.type());
}

std::string capitalized(const std::string& x) {
  std::string s = x;
  std::size_t i = 0;
  while (i < s.size() && s[i] == '_') ++i;
  if (i < s.size()) s[i] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[i])));
  return s;
}

}  // namespace

Term hrs_term_to_idts(const Lambda& u, const std::set<std::string>& metas,
                      const std::map<std::string, std::string>& meta_names) {
  if (!is_long_normal(u)) throw Error(ErrorKind::NotEtaLongBetaNormal, "term is not in η-long β-normal form");
  return floor_rec(u, metas, meta_names);
}

Alphabet hrs_to_idts_alphabet(const HrsSystem& hrs) { return hrs_alphabet(hrs); }

RewriteSystem hrs_to_idts(const HrsSystem& hrs) {
  RewriteSystem sys;
  sys.alphabet = hrs_to_idts_alphabet(hrs);
  sys.beta_enabled = true;
  for (const HrsRule& r : hrs.rules) {
    validate_hrs_rule(r, hrs);
    std::set<std::string> metas = free_vars(r.lhs);
    Lambda lhs = rename_bound_apart(r.lhs, metas);
    Lambda rhs = rename_bound_apart(r.rhs, metas);
    std::set<std::string> taken;
    for (auto& [f, t] : hrs.functions) taken.insert(f);
    std::map<std::string, std::string> names;
    for (const std::string& x : metas) {
      std::string n = capitalized(x);
      if (taken.count(n)) n = fresh_name(n, taken);
      taken.insert(n);
      names[x] = n;
    }
    Rule out{r.name, floor_rec(lhs, metas, names), floor_rec(rhs, metas, names)};
    validate_rule(out, sys.alphabet);
    sys.rules.push_back(std::move(out));
  }
  return sys;
}

// IDTS -> HRS ---------------------------------------------------------------

std::map<std::string, Type> curried_constants(const Alphabet& alphabet) {
  std::map<std::string, Type> out;
  for (auto& [f, sig] : alphabet.functions) out[f] = Type::curried(sig.args, sig.result);
  return out;
}

namespace {

Lambda natural_rec(const Term& u, ApplyMode mode) {
  switch (u.kind()) {
    case TermKind::Var: return eta_expand_atom(Lambda::var(u.name(), u.type()));
    case TermKind::Abs: return Lambda::lam(u.name(), u.binder_type(), natural_rec(u.body(), mode));
    case TermKind::Fun:
    case TermKind::Meta: {
      std::vector<Type> arg_types;
      std::vector<Lambda> args;
      for (const Term& a : u.args()) {
        arg_types.push_back(a.type());
        args.push_back(natural_rec(a, mode));
      }
      if (u.is_app() && mode == ApplyMode::Application) return long_normal_form(Lambda::app(args[0], args[1]));
      Type ht = Type::curried(arg_types, u.type());
      Lambda head = u.is_meta() ? Lambda::var(u.name(), ht) : Lambda::constant(u.name(), ht);
      return long_normal_form(Lambda::app(head, args));
    }
  }
  return {};
}

std::set<std::string> all_names(const Term& u) {
  std::set<std::string> out;
  std::function<void(const Term&)> rec = [&](const Term& t) {
    out.insert(t.name());
    for (const Term& c : t.children()) rec(c);
  };
  rec(u);
  return out;
}

}  // namespace

Lambda natural_term(const Term& u, ApplyMode mode) { return natural_rec(rename_bound_apart(u, meta_vars(u)), mode); }

Term from_natural(const Lambda& u, const Alphabet& alphabet, const std::map<std::string, std::size_t>& metas) {
  auto [binders, body] = strip_lambdas(u);
  Spine sp = spine(body);
  std::size_t n = 0;
  if (sp.head.is_const()) {
    if (sp.head.name() == kApply) n = 2;
    else if (const Signature* s = alphabet.function(sp.head.name())) n = s->args.size();
    else throw Error(ErrorKind::UndeclaredSymbol, "undeclared symbol " + sp.head.name());
  } else if (sp.head.is_var()) {
    auto it = metas.find(sp.head.name());
    n = it == metas.end() ? 0 : it->second;
  }
  if (sp.args.size() < n) throw Error(ErrorKind::ArityMismatch, "symbol " + sp.head.name() + " is not fully applied");
  // Trailing arguments that undo an η-expansion of the last binders.
  std::size_t k = sp.args.size() - n;
  if (k > binders.size()) throw Error(ErrorKind::TypeMismatch, "term is not in the image of the natural translation");
  for (std::size_t i = 0; i < k; ++i) {
    auto x = eta_variable(sp.args[n + i]);
    if (!x || *x != binders[binders.size() - k + i].first)
      throw Error(ErrorKind::TypeMismatch, "term is not in the image of the natural translation");
  }
  std::vector<Term> args;
  for (std::size_t i = 0; i < n; ++i) args.push_back(from_natural(sp.args[i], alphabet, metas));
  Type result = body.type();
  for (std::size_t i = k; i > 0; --i) result = Type::arrow(binders[binders.size() - k + i - 1].second, result);
  Term t;
  if (sp.head.is_var() && metas.count(sp.head.name())) t = Term::meta(sp.head.name(), std::move(args), result);
  else if (sp.head.is_var()) t = Term::var(sp.head.name(), sp.head.type());
  else if (sp.head.name() == kApply) t = Term::app(args[0], args[1]);
  else t = Term::fun(sp.head.name(), std::move(args), result);
  for (std::size_t i = binders.size() - k; i > 0; --i) t = Term::abs(binders[i - 1].first, binders[i - 1].second, t);
  return t;
}

namespace {

HrsSystem hrs_skeleton(const RewriteSystem& system) {
  HrsSystem h;
  h.base_types = system.alphabet.base_types;
  h.functions = curried_constants(system.alphabet);
  h.constructors = system.alphabet.constructors;
  h.constructors_declared = true;
  h.statuses = system.alphabet.statuses;
  return h;
}

}  // namespace

HrsSystem idts_to_hrs_natural(const RewriteSystem& system, ApplyMode mode) {
  HrsSystem h = hrs_skeleton(system);
  for (const Rule& r : system.rules) h.rules.push_back({r.name, natural_term(r.lhs, mode), natural_term(r.rhs, mode)});
  return h;
}

HrsRule basetype_rule(const Rule& rule, ApplyMode mode) {
  Lambda l = natural_term(rule.lhs, mode);
  Lambda r = natural_term(rule.rhs, mode);
  std::set<std::string> avoid = all_names(rule.lhs);
  for (const std::string& x : all_names(rule.rhs)) avoid.insert(x);
  std::vector<Lambda> extra;
  for (const Type& t : rule.rhs.type().argument_types()) {
    std::string z = fresh_name("z", avoid);
    avoid.insert(z);
    extra.push_back(eta_expand_atom(Lambda::var(z, t)));
  }
  return {rule.name, long_normal_form(Lambda::app(l, extra)), long_normal_form(Lambda::app(r, extra))};
}

HrsSystem idts_to_hrs_basetype(const RewriteSystem& system, ApplyMode mode) {
  HrsSystem h = hrs_skeleton(system);
  for (const Rule& r : system.rules) h.rules.push_back(basetype_rule(r, mode));
  return h;
}

SingleSortedNames single_sorted_names(const Alphabet& alphabet) {
  SingleSortedNames n;
  std::set<std::string> taken = alphabet.base_types;
  for (auto& [f, s] : alphabet.functions) taken.insert(f);
  if (taken.count(n.lambda)) n.lambda = fresh_name(n.lambda, taken);
  taken.insert(n.lambda);
  if (taken.count(n.apply)) n.apply = fresh_name(n.apply, taken);
  return n;
}

namespace {

Type o_n(const SingleSortedNames& names, std::size_t n) {
  std::vector<Type> args(n, Type::base(names.base));
  return Type::curried(args, Type::base(names.base));
}

}  // namespace

Lambda single_sorted_term(const Term& u, const SingleSortedNames& names) {
  Type o = Type::base(names.base);
  switch (u.kind()) {
    case TermKind::Var: return Lambda::var(u.name(), o);
    case TermKind::Abs:
      return Lambda::app(Lambda::constant(names.lambda, Type::arrow(Type::arrow(o, o), o)),
                         Lambda::lam(u.name(), o, single_sorted_term(u.body(), names)));
    case TermKind::Fun:
    case TermKind::Meta: {
      std::vector<Lambda> args;
      for (const Term& a : u.args()) args.push_back(single_sorted_term(a, names));
      Type t = o_n(names, args.size());
      std::string head = u.is_app() ? names.apply : u.name();
      return Lambda::app(u.is_meta() ? Lambda::var(head, t) : Lambda::constant(head, t), args);
    }
  }
  return {};
}

HrsSystem idts_to_hrs_single_sorted(const RewriteSystem& system) {
  SingleSortedNames names = single_sorted_names(system.alphabet);
  HrsSystem h;
  h.base_types = {names.base};
  for (auto& [f, sig] : system.alphabet.functions) h.functions[f] = o_n(names, sig.args.size());
  h.functions[names.lambda] = Type::arrow(Type::arrow(Type::base(names.base), Type::base(names.base)), Type::base(names.base));
  h.functions[names.apply] = o_n(names, 2);
  h.statuses = system.alphabet.statuses;
  auto add = [&](const Rule& r) {
    Term l = rename_bound_apart(r.lhs, meta_vars(r.lhs));
    Term rr = rename_bound_apart(r.rhs, meta_vars(r.lhs));
    h.rules.push_back({r.name, single_sorted_term(l, names), single_sorted_term(rr, names)});
  };
  for (const Rule& r : system.rules) add(r);
  if (system.beta_enabled) {
    Type o = Type::base(names.base);
    add(make_beta_rule(o, o));
  }
  return h;
}

}  // namespace idts
