#include "idts/term.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <functional>

namespace idts {

Term Term::var(std::string name, Type type) {
  return Term(std::make_shared<const Node>(Node{TermKind::Var, std::move(name), std::move(type), {}, {}}));
}

Term Term::abs(std::string binder, Type binder_type, Term body) {
  Type t = Type::arrow(binder_type, body.type());
  std::vector<Term> children{std::move(body)};
  return Term(std::make_shared<const Node>(
      Node{TermKind::Abs, std::move(binder), std::move(t), std::move(binder_type), std::move(children)}));
}

Term Term::fun(std::string symbol, std::vector<Term> args, Type result) {
  return Term(std::make_shared<const Node>(Node{TermKind::Fun, std::move(symbol), std::move(result), {}, std::move(args)}));
}

Term Term::app(Term fn, Term arg) {
  if (!fn.type().is_arrow()) throw Error(ErrorKind::TypeMismatch, "@ applied to a term of base type " + fn.type().str());
  if (!(fn.type().domain() == arg.type()))
    throw Error(ErrorKind::TypeMismatch, "@ argument has type " + arg.type().str() + ", expected " +
                                             fn.type().domain().str(),
                {2});
  Type result = fn.type().codomain();
  return fun(kApply, {std::move(fn), std::move(arg)}, std::move(result));
}

Term Term::meta(std::string name, std::vector<Term> args, Type result) {
  return Term(std::make_shared<const Node>(Node{TermKind::Meta, std::move(name), std::move(result), {}, std::move(args)}));
}

Term Term::with_children(std::vector<Term> children) const {
  switch (kind()) {
    case TermKind::Var: return *this;
    case TermKind::Abs: return abs(name(), binder_type(), std::move(children.front()));
    case TermKind::Fun: return fun(name(), std::move(children), type());
    case TermKind::Meta: return meta(name(), std::move(children), type());
  }
  return *this;
}

// Alpha-equivalence ---------------------------------------------------------

namespace {

// Index of `name` counted from the innermost binder, or -1 when free.
int bound_index(const std::vector<std::string>& stack, const std::string& name) {
  for (std::size_t i = stack.size(); i-- > 0;)
    if (stack[i] == name) return static_cast<int>(stack.size() - 1 - i);
  return -1;
}

bool alpha_rec(const Term& a, const Term& b, std::vector<std::string>& sa, std::vector<std::string>& sb) {
  if (a.same_node(b) && sa == sb) return true;
  if (a.kind() != b.kind()) return false;
  if (!(a.type() == b.type())) return false;
  switch (a.kind()) {
    case TermKind::Var: {
      int ia = bound_index(sa, a.name());
      int ib = bound_index(sb, b.name());
      if (ia != ib) return false;
      return ia >= 0 || a.name() == b.name();
    }
    case TermKind::Abs: {
      if (!(a.binder_type() == b.binder_type())) return false;
      sa.push_back(a.name());
      sb.push_back(b.name());
      bool ok = alpha_rec(a.body(), b.body(), sa, sb);
      sa.pop_back();
      sb.pop_back();
      return ok;
    }
    case TermKind::Fun:
    case TermKind::Meta:
      if (a.name() != b.name() || a.arity() != b.arity()) return false;
      for (std::size_t i = 0; i < a.arity(); ++i)
        if (!alpha_rec(a.arg(i), b.arg(i), sa, sb)) return false;
      return true;
  }
  return false;
}

void key_rec(const Term& u, std::vector<std::string>& stack, std::string& out) {
  switch (u.kind()) {
    case TermKind::Var: {
      int i = bound_index(stack, u.name());
      if (i >= 0)
        out += "#" + std::to_string(i);
      else
        out += "v:" + u.name() + ":" + u.type().str();
      return;
    }
    case TermKind::Abs:
      out += "[" + u.binder_type().str() + "]";
      stack.push_back(u.name());
      key_rec(u.body(), stack, out);
      stack.pop_back();
      return;
    case TermKind::Fun:
    case TermKind::Meta:
      out += (u.is_fun() ? "f:" : "m:") + u.name() + ":" + u.type().str() + "(";
      for (std::size_t i = 0; i < u.arity(); ++i) {
        if (i) out += ",";
        key_rec(u.arg(i), stack, out);
      }
      out += ")";
      return;
  }
}

}  // namespace

bool alpha_equal(const Term& a, const Term& b) {
  if (!a.valid() || !b.valid()) return a.valid() == b.valid();
  std::vector<std::string> sa, sb;
  return alpha_rec(a, b, sa, sb);
}

bool operator==(const Term& a, const Term& b) { return alpha_equal(a, b); }

std::string alpha_key(const Term& u) {
  std::vector<std::string> stack;
  std::string out;
  key_rec(u, stack, out);
  return out;
}

// Variable sets -------------------------------------------------------------

namespace {

void fv_rec(const Term& u, std::vector<std::string>& bound, std::map<std::string, Type>& out) {
  switch (u.kind()) {
    case TermKind::Var:
      if (bound_index(bound, u.name()) < 0) out.emplace(u.name(), u.type());
      return;
    case TermKind::Abs:
      bound.push_back(u.name());
      fv_rec(u.body(), bound, out);
      bound.pop_back();
      return;
    default:
      for (const Term& c : u.children()) fv_rec(c, bound, out);
  }
}

template <class F>
void visit(const Term& u, F&& f) {
  f(u);
  for (const Term& c : u.children()) visit(c, f);
}

}  // namespace

std::map<std::string, Type> free_var_types(const Term& u) {
  std::vector<std::string> bound;
  std::map<std::string, Type> out;
  fv_rec(u, bound, out);
  return out;
}

std::set<std::string> free_vars(const Term& u) {
  std::set<std::string> out;
  for (auto& [name, type] : free_var_types(u)) out.insert(name);
  return out;
}

std::set<std::string> bound_vars(const Term& u) {
  std::set<std::string> out;
  visit(u, [&](const Term& t) {
    if (t.is_abs()) out.insert(t.name());
  });
  return out;
}

std::set<std::string> meta_vars(const Term& u) {
  std::set<std::string> out;
  visit(u, [&](const Term& t) {
    if (t.is_meta()) out.insert(t.name());
  });
  return out;
}

bool has_meta(const Term& u) {
  if (u.is_meta()) return true;
  for (const Term& c : u.children())
    if (has_meta(c)) return true;
  return false;
}

bool occurs_symbol(const Term& u, const std::string& symbol) {
  if (u.is_fun() && u.name() == symbol) return true;
  for (const Term& c : u.children())
    if (occurs_symbol(c, symbol)) return true;
  return false;
}

std::size_t term_size(const Term& u) {
  std::size_t n = 1;
  for (const Term& c : u.children()) n += term_size(c);
  return n;
}

std::size_t term_depth(const Term& u) {
  std::size_t d = 0;
  for (const Term& c : u.children()) d = std::max(d, term_depth(c));
  return d + 1;
}

namespace {
bool pattern_rec(const Term& u, std::vector<std::string>& bound) {
  if (u.is_meta()) {
    std::set<std::string> seen;
    for (const Term& a : u.args()) {
      if (!a.is_var() || bound_index(bound, a.name()) < 0 || !seen.insert(a.name()).second) return false;
    }
    return true;
  }
  if (u.is_abs()) {
    bound.push_back(u.name());
    bool ok = pattern_rec(u.body(), bound);
    bound.pop_back();
    return ok;
  }
  for (const Term& c : u.children())
    if (!pattern_rec(c, bound)) return false;
  return true;
}
}  // namespace

bool is_pattern(const Term& u) {
  std::vector<std::string> bound;
  return pattern_rec(u, bound);
}

// Positions -----------------------------------------------------------------

namespace {
void positions_rec(const Term& u, Position& cur, std::vector<Position>& out) {
  out.push_back(cur);
  for (std::size_t i = 0; i < u.children().size(); ++i) {
    cur.push_back(static_cast<int>(i + 1));
    positions_rec(u.children()[i], cur, out);
    cur.pop_back();
  }
}
}  // namespace

std::vector<Position> positions(const Term& u) {
  std::vector<Position> out;
  Position cur;
  positions_rec(u, cur, out);
  return out;
}

const Term& subterm_at(const Term& u, const Position& p) {
  const Term* t = &u;
  for (int i : p) {
    if (i < 1 || static_cast<std::size_t>(i) > t->children().size())
      throw Error(ErrorKind::SyntaxError, "position " + position_str(p) + " is not in Pos(u)", p);
    t = &t->children()[i - 1];
  }
  return *t;
}

namespace {
Term replace_rec(const Term& u, const Position& p, std::size_t depth, Term v) {
  if (depth == p.size()) return v;
  int i = p[depth];
  if (i < 1 || static_cast<std::size_t>(i) > u.children().size())
    throw Error(ErrorKind::SyntaxError, "position " + position_str(p) + " is not in Pos(u)", p);
  std::vector<Term> children(u.children().begin(), u.children().end());
  children[i - 1] = replace_rec(children[i - 1], p, depth + 1, std::move(v));
  return u.with_children(std::move(children));
}
}  // namespace

Term replace_at(const Term& u, const Position& p, Term v) { return replace_rec(u, p, 0, std::move(v)); }

std::vector<std::pair<std::string, Type>> binders_above(const Term& u, const Position& p) {
  std::vector<std::pair<std::string, Type>> out;
  const Term* t = &u;
  for (int i : p) {
    if (t->is_abs()) out.emplace_back(t->name(), t->binder_type());
    t = &t->children()[i - 1];
  }
  return out;
}

// Substitution --------------------------------------------------------------

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return base;
  std::string stem = base;
  while (!stem.empty() && std::isdigit(static_cast<unsigned char>(stem.back()))) stem.pop_back();
  if (stem.empty()) stem = "x";
  for (int n = 1;; ++n) {
    std::string candidate = stem + std::to_string(n);
    if (!avoid.count(candidate)) return candidate;
  }
}

namespace {

Term subst_rec(const Term& u, const Substitution& tau) {
  switch (u.kind()) {
    case TermKind::Var: {
      auto it = tau.find(u.name());
      if (it == tau.end()) return u;
      if (!(it->second.type() == u.type()))
        throw Error(ErrorKind::TypeMismatch, "substitution maps " + u.name() + " : " + u.type().str() +
                                                 " to a term of type " + it->second.type().str());
      return it->second;
    }
    case TermKind::Abs: {
      const std::string& x = u.name();
      std::set<std::string> body_fv = free_vars(u.body());
      Substitution inner;
      std::set<std::string> cod_fv;
      for (auto& [y, t] : tau) {
        if (y == x || !body_fv.count(y)) continue;
        inner.emplace(y, t);
        auto fv = free_vars(t);
        cod_fv.insert(fv.begin(), fv.end());
      }
      if (inner.empty()) return u;
      if (cod_fv.count(x)) {
        std::set<std::string> avoid = cod_fv;
        avoid.insert(body_fv.begin(), body_fv.end());
        for (auto& [y, t] : inner) avoid.insert(y);
        std::string x2 = fresh_name(x, avoid);
        inner.emplace(x, Term::var(x2, u.binder_type()));
        return Term::abs(x2, u.binder_type(), subst_rec(u.body(), inner));
      }
      return Term::abs(x, u.binder_type(), subst_rec(u.body(), inner));
    }
    default: {
      if (u.children().empty()) return u;
      std::vector<Term> children;
      children.reserve(u.arity());
      for (const Term& c : u.children()) children.push_back(subst_rec(c, tau));
      return u.with_children(std::move(children));
    }
  }
}

}  // namespace

Term apply_substitution(const Term& u, const Substitution& tau) {
  if (tau.empty()) return u;
  return subst_rec(u, tau);
}

Type Substitute::type() const {
  std::vector<Type> args;
  for (auto& [n, t] : params) args.push_back(t);
  return Type::curried(args, body.type());
}

std::set<std::string> Substitute::free_vars() const {
  std::set<std::string> fv = idts::free_vars(body);
  for (auto& [n, t] : params) fv.erase(n);
  return fv;
}

Term Substitute::instantiate(std::span<const Term> args) const {
  if (args.size() != params.size())
    throw Error(ErrorKind::ArityMismatch, "substitute of arity " + std::to_string(params.size()) + " applied to " +
                                              std::to_string(args.size()) + " arguments");
  Substitution tau;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (!(args[i].type() == params[i].second))
      throw Error(ErrorKind::TypeMismatch, "substitute parameter " + params[i].first + " : " +
                                               params[i].second.str() + " given an argument of type " +
                                               args[i].type().str());
    tau.emplace(params[i].first, args[i]);
  }
  return apply_substitution(body, tau);
}

bool alpha_equal(const Substitute& a, const Substitute& b) {
  if (a.params.size() != b.params.size()) return false;
  Term ta = a.body, tb = b.body;
  for (std::size_t i = a.params.size(); i-- > 0;) {
    if (!(a.params[i].second == b.params[i].second)) return false;
    ta = Term::abs(a.params[i].first, a.params[i].second, ta);
    tb = Term::abs(b.params[i].first, b.params[i].second, tb);
  }
  return alpha_equal(ta, tb);
}

std::set<std::string> codomain_free_vars(const Valuation& sigma) {
  std::set<std::string> out;
  for (auto& [z, s] : sigma) {
    auto fv = s.free_vars();
    out.insert(fv.begin(), fv.end());
  }
  return out;
}

namespace {

Term valuation_rec(const Term& u, const Valuation& sigma, const std::set<std::string>& cod_fv) {
  switch (u.kind()) {
    case TermKind::Var: return u;
    case TermKind::Abs: {
      if (cod_fv.count(u.name())) {
        std::set<std::string> avoid = cod_fv;
        auto fv = free_vars(u.body());
        avoid.insert(fv.begin(), fv.end());
        std::string x2 = fresh_name(u.name(), avoid);
        Term body = apply_substitution(u.body(), {{u.name(), Term::var(x2, u.binder_type())}});
        return Term::abs(x2, u.binder_type(), valuation_rec(body, sigma, cod_fv));
      }
      return Term::abs(u.name(), u.binder_type(), valuation_rec(u.body(), sigma, cod_fv));
    }
    case TermKind::Fun:
    case TermKind::Meta: {
      std::vector<Term> args;
      args.reserve(u.arity());
      for (const Term& c : u.children()) args.push_back(valuation_rec(c, sigma, cod_fv));
      if (u.is_meta()) {
        auto it = sigma.find(u.name());
        if (it != sigma.end()) {
          const Substitute& s = it->second;
          if (s.arity() != u.arity())
            throw Error(ErrorKind::ArityMismatch, "metavariable " + u.name() + " of arity " +
                                                      std::to_string(u.arity()) + " valued by a substitute of arity " +
                                                      std::to_string(s.arity()));
          if (!(s.body.type() == u.type()))
            throw Error(ErrorKind::TypeMismatch, "metavariable " + u.name() + " : " + u.type().str() +
                                                     " valued by a substitute of result type " + s.body.type().str());
          return s.instantiate(args);
        }
      }
      return u.with_children(std::move(args));
    }
  }
  return u;
}

}  // namespace

Term apply_valuation(const Term& u, const Valuation& sigma) {
  if (sigma.empty()) return u;
  return valuation_rec(u, sigma, codomain_free_vars(sigma));
}

Term rename_bound_apart(const Term& u, std::set<std::string> avoid) {
  auto fv = free_vars(u);
  avoid.insert(fv.begin(), fv.end());
  std::vector<std::pair<std::string, std::string>> scope;
  std::function<Term(const Term&)> rec = [&](const Term& t) -> Term {
    switch (t.kind()) {
      case TermKind::Var:
        for (auto it = scope.rbegin(); it != scope.rend(); ++it)
          if (it->first == t.name()) return Term::var(it->second, t.type());
        return t;
      case TermKind::Abs: {
        std::string x2 = fresh_name(t.name(), avoid);
        avoid.insert(x2);
        scope.emplace_back(t.name(), x2);
        Term body = rec(t.body());
        scope.pop_back();
        return Term::abs(x2, t.binder_type(), body);
      }
      default: {
        std::vector<Term> children;
        for (const Term& c : t.children()) children.push_back(rec(c));
        return t.with_children(std::move(children));
      }
    }
  };
  return rec(u);
}

// Beta / eta ----------------------------------------------------------------

bool is_beta_redex(const Term& u) { return u.is_app() && u.arg(0).is_abs(); }

namespace {

Term contract(const Term& redex) {
  const Term& lam = redex.arg(0);
  return apply_substitution(lam.body(), {{lam.name(), redex.arg(1)}});
}

bool find_lo(const Term& u, Position& p) {
  if (is_beta_redex(u)) return true;
  for (std::size_t i = 0; i < u.children().size(); ++i) {
    p.push_back(static_cast<int>(i + 1));
    if (find_lo(u.children()[i], p)) return true;
    p.pop_back();
  }
  return false;
}

bool find_ri(const Term& u, Position& p) {
  for (std::size_t i = u.children().size(); i-- > 0;) {
    p.push_back(static_cast<int>(i + 1));
    if (find_ri(u.children()[i], p)) return true;
    p.pop_back();
  }
  return is_beta_redex(u);
}

}  // namespace

bool beta_step(const Term& u, BetaStrategy strategy, Term& out, Position* at) {
  Position p;
  bool found = strategy == BetaStrategy::LeftmostOutermost ? find_lo(u, p) : find_ri(u, p);
  if (!found) return false;
  out = replace_at(u, p, contract(subterm_at(u, p)));
  if (at) *at = p;
  return true;
}

Term beta_normalize(const Term& u, BetaStrategy strategy) {
  Term cur = u, next;
  while (beta_step(cur, strategy, next)) cur = next;
  return cur;
}

bool is_beta_normal(const Term& u) {
  Position p;
  return !find_lo(u, p);
}

namespace {

Term long_rec(const Term& u);

Term expand(Term t) {
  while (t.type().is_arrow()) {
    // Expand one argument at a time; the recursion in long_rec handles the argument itself.
    std::set<std::string> avoid = free_vars(t);
    std::string y = fresh_name("y", avoid);
    Type dom = t.type().domain();
    Term arg = long_rec(Term::var(y, dom));
    Term inner = expand(Term::app(t, arg));
    return Term::abs(y, dom, inner);
  }
  return t;
}

Term long_rec(const Term& u) {
  if (u.is_abs()) return Term::abs(u.name(), u.binder_type(), long_rec(u.body()));
  std::vector<Term> spine_args;
  Term head = u;
  while (head.is_app()) {
    spine_args.push_back(head.arg(1));
    head = head.arg(0);
  }
  std::reverse(spine_args.begin(), spine_args.end());
  Term h;
  switch (head.kind()) {
    case TermKind::Var: h = head; break;
    case TermKind::Abs: h = long_rec(head); break;
    default: {
      std::vector<Term> args;
      for (const Term& a : head.args()) args.push_back(long_rec(a));
      h = head.with_children(std::move(args));
    }
  }
  for (const Term& a : spine_args) h = Term::app(h, long_rec(a));
  return expand(h);
}

}  // namespace

Term eta_long(const Term& u) { return long_rec(u); }

Term eta_reduce(const Term& u) {
  if (u.children().empty()) return u;
  std::vector<Term> children;
  for (const Term& c : u.children()) children.push_back(eta_reduce(c));
  Term t = u.with_children(std::move(children));
  if (t.is_abs() && t.body().is_app()) {
    const Term& app = t.body();
    if (app.arg(1).is_var() && app.arg(1).name() == t.name() && !free_vars(app.arg(0)).count(t.name()))
      return app.arg(0);
  }
  return t;
}

}  // namespace idts
