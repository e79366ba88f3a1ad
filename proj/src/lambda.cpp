#include "idts/lambda.hpp"

#include <algorithm>
#include <functional>

#include "idts/term.hpp"

namespace idts {

Lambda Lambda::var(std::string name, Type type) {
  return Lambda(std::make_shared<const Node>(Node{LambdaKind::Var, std::move(name), std::move(type), {}, {}}));
}

Lambda Lambda::constant(std::string name, Type type) {
  return Lambda(std::make_shared<const Node>(Node{LambdaKind::Const, std::move(name), std::move(type), {}, {}}));
}

Lambda Lambda::app(Lambda fn, Lambda arg) {
  if (!fn.type().is_arrow()) throw Error(ErrorKind::TypeMismatch, "application of a term of base type " + fn.type().str());
  if (!(fn.type().domain() == arg.type()))
    throw Error(ErrorKind::TypeMismatch,
                "argument of type " + arg.type().str() + " where " + fn.type().domain().str() + " is expected");
  Type t = fn.type().codomain();
  std::vector<Lambda> children{std::move(fn), std::move(arg)};
  return Lambda(std::make_shared<const Node>(Node{LambdaKind::App, {}, std::move(t), {}, std::move(children)}));
}

Lambda Lambda::app(Lambda head, std::span<const Lambda> args) {
  for (const Lambda& a : args) head = app(head, a);
  return head;
}

Lambda Lambda::lam(std::string binder, Type binder_type, Lambda body) {
  Type t = Type::arrow(binder_type, body.type());
  std::vector<Lambda> children{std::move(body)};
  return Lambda(std::make_shared<const Node>(
      Node{LambdaKind::Lam, std::move(binder), std::move(t), std::move(binder_type), std::move(children)}));
}

Lambda Lambda::with_children(std::vector<Lambda> children) const {
  switch (kind()) {
    case LambdaKind::App: return app(children[0], children[1]);
    case LambdaKind::Lam: return lam(name(), binder_type(), children[0]);
    default: return *this;
  }
}

namespace {

int bound_index(const std::vector<std::string>& stack, const std::string& name) {
  for (std::size_t i = stack.size(); i-- > 0;)
    if (stack[i] == name) return static_cast<int>(stack.size() - 1 - i);
  return -1;
}

bool alpha_rec(const Lambda& a, const Lambda& b, std::vector<std::string>& sa, std::vector<std::string>& sb) {
  if (a.kind() != b.kind() || !(a.type() == b.type())) return false;
  switch (a.kind()) {
    case LambdaKind::Var: {
      int ia = bound_index(sa, a.name()), ib = bound_index(sb, b.name());
      return ia == ib && (ia >= 0 || a.name() == b.name());
    }
    case LambdaKind::Const: return a.name() == b.name();
    case LambdaKind::App: return alpha_rec(a.fn(), b.fn(), sa, sb) && alpha_rec(a.arg(), b.arg(), sa, sb);
    case LambdaKind::Lam: {
      if (!(a.binder_type() == b.binder_type())) return false;
      sa.push_back(a.name());
      sb.push_back(b.name());
      bool ok = alpha_rec(a.body(), b.body(), sa, sb);
      sa.pop_back();
      sb.pop_back();
      return ok;
    }
  }
  return false;
}

void key_rec(const Lambda& u, std::vector<std::string>& stack, std::string& out) {
  switch (u.kind()) {
    case LambdaKind::Var: {
      int i = bound_index(stack, u.name());
      out += i >= 0 ? "#" + std::to_string(i) : "v:" + u.name() + ":" + u.type().str();
      return;
    }
    case LambdaKind::Const: out += "c:" + u.name() + ":" + u.type().str(); return;
    case LambdaKind::App:
      out += "(";
      key_rec(u.fn(), stack, out);
      out += " ";
      key_rec(u.arg(), stack, out);
      out += ")";
      return;
    case LambdaKind::Lam:
      out += "\\" + u.binder_type().str() + ".";
      stack.push_back(u.name());
      key_rec(u.body(), stack, out);
      stack.pop_back();
      return;
  }
}

void fv_rec(const Lambda& u, std::vector<std::string>& bound, std::map<std::string, Type>& out) {
  switch (u.kind()) {
    case LambdaKind::Var:
      if (bound_index(bound, u.name()) < 0) out.emplace(u.name(), u.type());
      return;
    case LambdaKind::Const: return;
    case LambdaKind::App:
      fv_rec(u.fn(), bound, out);
      fv_rec(u.arg(), bound, out);
      return;
    case LambdaKind::Lam:
      bound.push_back(u.name());
      fv_rec(u.body(), bound, out);
      bound.pop_back();
      return;
  }
}

}  // namespace

bool alpha_equal(const Lambda& a, const Lambda& b) {
  if (!a.valid() || !b.valid()) return a.valid() == b.valid();
  std::vector<std::string> sa, sb;
  return alpha_rec(a, b, sa, sb);
}

bool operator==(const Lambda& a, const Lambda& b) { return alpha_equal(a, b); }

std::string alpha_key(const Lambda& u) {
  std::vector<std::string> stack;
  std::string out;
  key_rec(u, stack, out);
  return out;
}

Spine spine(const Lambda& u) {
  Spine s{u, {}};
  while (s.head.is_app()) {
    s.args.push_back(s.head.arg());
    s.head = s.head.fn();
  }
  std::reverse(s.args.begin(), s.args.end());
  return s;
}

std::pair<std::vector<std::pair<std::string, Type>>, Lambda> strip_lambdas(const Lambda& u) {
  std::vector<std::pair<std::string, Type>> binders;
  Lambda t = u;
  while (t.is_lam()) {
    binders.emplace_back(t.name(), t.binder_type());
    t = t.body();
  }
  return {binders, t};
}

std::map<std::string, Type> free_var_types(const Lambda& u) {
  std::vector<std::string> bound;
  std::map<std::string, Type> out;
  fv_rec(u, bound, out);
  return out;
}

std::set<std::string> free_vars(const Lambda& u) {
  std::set<std::string> out;
  for (auto& [n, t] : free_var_types(u)) out.insert(n);
  return out;
}

std::set<std::string> constants(const Lambda& u) {
  std::set<std::string> out;
  std::function<void(const Lambda&)> rec = [&](const Lambda& t) {
    if (t.is_const()) out.insert(t.name());
    for (const Lambda& c : t.children()) rec(c);
  };
  rec(u);
  return out;
}

// Substitution and normal forms ---------------------------------------------

namespace {

Lambda subst_rec(const Lambda& u, const LambdaSubstitution& theta) {
  switch (u.kind()) {
    case LambdaKind::Var: {
      auto it = theta.find(u.name());
      if (it == theta.end()) return u;
      if (!(it->second.type() == u.type()))
        throw Error(ErrorKind::TypeMismatch, "substitution for " + u.name() + " changes its type");
      return it->second;
    }
    case LambdaKind::Const: return u;
    case LambdaKind::App: return Lambda::app(subst_rec(u.fn(), theta), subst_rec(u.arg(), theta));
    case LambdaKind::Lam: {
      const std::string& x = u.name();
      std::set<std::string> body_fv = free_vars(u.body());
      LambdaSubstitution inner;
      std::set<std::string> cod_fv;
      for (auto& [y, t] : theta) {
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
        inner.emplace(x, Lambda::var(x2, u.binder_type()));
        return Lambda::lam(x2, u.binder_type(), subst_rec(u.body(), inner));
      }
      return Lambda::lam(x, u.binder_type(), subst_rec(u.body(), inner));
    }
  }
  return u;
}

}  // namespace

Lambda apply_substitution(const Lambda& u, const LambdaSubstitution& theta) {
  if (theta.empty()) return u;
  return subst_rec(u, theta);
}

Lambda instantiate(const Lambda& u, const LambdaSubstitution& theta) {
  return beta_normalize(apply_substitution(u, theta));
}

Lambda beta_normalize(const Lambda& u) {
  switch (u.kind()) {
    case LambdaKind::Var:
    case LambdaKind::Const: return u;
    case LambdaKind::Lam: return Lambda::lam(u.name(), u.binder_type(), beta_normalize(u.body()));
    case LambdaKind::App: {
      Lambda f = beta_normalize(u.fn());
      if (f.is_lam()) return beta_normalize(apply_substitution(f.body(), {{f.name(), u.arg()}}));
      return Lambda::app(f, beta_normalize(u.arg()));
    }
  }
  return u;
}

bool is_beta_normal(const Lambda& u) {
  if (u.is_app() && u.fn().is_lam()) return false;
  for (const Lambda& c : u.children())
    if (!is_beta_normal(c)) return false;
  return true;
}

namespace {

Lambda long_rec(const Lambda& u, std::set<std::string>& avoid) {
  auto [binders, body] = strip_lambdas(u);
  for (auto& [x, t] : binders) avoid.insert(x);
  Spine sp = spine(body);
  std::vector<Lambda> args;
  for (const Lambda& a : sp.args) args.push_back(long_rec(a, avoid));
  Lambda r = Lambda::app(sp.head, args);
  std::vector<std::pair<std::string, Type>> extra;
  while (r.type().is_arrow()) {
    Type dom = r.type().domain();
    std::string y = fresh_name("y", avoid);
    avoid.insert(y);
    extra.emplace_back(y, dom);
    r = Lambda::app(r, long_rec(Lambda::var(y, dom), avoid));
  }
  for (auto it = extra.rbegin(); it != extra.rend(); ++it) r = Lambda::lam(it->first, it->second, r);
  for (auto it = binders.rbegin(); it != binders.rend(); ++it) r = Lambda::lam(it->first, it->second, r);
  return r;
}

}  // namespace

Lambda long_normal_form(const Lambda& u) {
  Lambda b = beta_normalize(u);
  std::set<std::string> avoid = free_vars(b);
  std::function<void(const Lambda&)> collect = [&](const Lambda& t) {
    if (t.is_lam()) avoid.insert(t.name());
    for (const Lambda& c : t.children()) collect(c);
  };
  collect(b);
  return long_rec(b, avoid);
}

bool is_long_normal(const Lambda& u) {
  auto [binders, body] = strip_lambdas(u);
  if (!body.type().is_base()) return false;
  Spine sp = spine(body);
  if (sp.head.is_lam()) return false;
  for (const Lambda& a : sp.args)
    if (!is_long_normal(a)) return false;
  return true;
}

Lambda eta_normalize(const Lambda& u) {
  if (u.is_var() || u.is_const()) return u;
  if (u.is_app()) return Lambda::app(eta_normalize(u.fn()), eta_normalize(u.arg()));
  Lambda body = eta_normalize(u.body());
  if (body.is_app() && body.arg().is_var() && body.arg().name() == u.name() && !free_vars(body.fn()).count(u.name()))
    return body.fn();
  return Lambda::lam(u.name(), u.binder_type(), body);
}

Lambda eta_expand_atom(const Lambda& atom) { return long_normal_form(atom); }

std::optional<std::string> eta_variable(const Lambda& u) {
  Lambda n = eta_normalize(u);
  if (n.is_var()) return n.name();
  return std::nullopt;
}

// Positions -----------------------------------------------------------------

namespace {
void positions_rec(const Lambda& u, Position& cur, std::vector<Position>& out, bool only_subterms, bool is_fn_part) {
  if (!only_subterms || !is_fn_part) out.push_back(cur);
  for (std::size_t i = 0; i < u.children().size(); ++i) {
    cur.push_back(static_cast<int>(i + 1));
    positions_rec(u.children()[i], cur, out, only_subterms, u.is_app() && i == 0);
    cur.pop_back();
  }
}
}  // namespace

std::vector<Position> positions(const Lambda& u) {
  std::vector<Position> out;
  Position cur;
  positions_rec(u, cur, out, false, false);
  return out;
}

std::vector<Position> subterm_positions(const Lambda& u) {
  std::vector<Position> out;
  Position cur;
  positions_rec(u, cur, out, true, false);
  return out;
}

const Lambda& subterm_at(const Lambda& u, const Position& p) {
  const Lambda* t = &u;
  for (int i : p) {
    if (i < 1 || static_cast<std::size_t>(i) > t->children().size())
      throw Error(ErrorKind::SyntaxError, "position " + position_str(p) + " is not in Pos(u)", p);
    t = &t->children()[i - 1];
  }
  return *t;
}

namespace {
Lambda replace_rec(const Lambda& u, const Position& p, std::size_t d, Lambda v) {
  if (d == p.size()) return v;
  std::vector<Lambda> children(u.children().begin(), u.children().end());
  int i = p[d];
  if (i < 1 || static_cast<std::size_t>(i) > children.size())
    throw Error(ErrorKind::SyntaxError, "position " + position_str(p) + " is not in Pos(u)", p);
  children[i - 1] = replace_rec(children[i - 1], p, d + 1, std::move(v));
  return u.with_children(std::move(children));
}
}  // namespace

Lambda replace_at(const Lambda& u, const Position& p, Lambda v) { return replace_rec(u, p, 0, std::move(v)); }

std::vector<std::pair<std::string, Type>> binders_above(const Lambda& u, const Position& p) {
  std::vector<std::pair<std::string, Type>> out;
  const Lambda* t = &u;
  for (int i : p) {
    if (t->is_lam()) out.emplace_back(t->name(), t->binder_type());
    t = &t->children()[i - 1];
  }
  return out;
}

Lambda rename_bound_apart(const Lambda& u, std::set<std::string> avoid) {
  auto fv = free_vars(u);
  avoid.insert(fv.begin(), fv.end());
  std::vector<std::pair<std::string, std::string>> scope;
  std::function<Lambda(const Lambda&)> rec = [&](const Lambda& t) -> Lambda {
    switch (t.kind()) {
      case LambdaKind::Var:
        for (auto it = scope.rbegin(); it != scope.rend(); ++it)
          if (it->first == t.name()) return Lambda::var(it->second, t.type());
        return t;
      case LambdaKind::Const: return t;
      case LambdaKind::App: return Lambda::app(rec(t.fn()), rec(t.arg()));
      case LambdaKind::Lam: {
        std::string x2 = fresh_name(t.name(), avoid);
        avoid.insert(x2);
        scope.emplace_back(t.name(), x2);
        Lambda body = rec(t.body());
        scope.pop_back();
        return Lambda::lam(x2, t.binder_type(), body);
      }
    }
    return t;
  };
  return rec(u);
}

namespace {
bool is_apply_instance(const Type& t) {
  // (s -> t) -> s -> t
  return t.is_arrow() && t.domain().is_arrow() && t.codomain().is_arrow() &&
         t.domain().domain() == t.codomain().domain() && t.domain().codomain() == t.codomain().codomain();
}
}  // namespace

Type typecheck(const Lambda& u, const std::map<std::string, Type>& constants, const TypeEnv& env) {
  std::vector<std::pair<std::string, Type>> bound;
  Position pos;
  std::function<Type(const Lambda&)> rec = [&](const Lambda& t) -> Type {
    switch (t.kind()) {
      case LambdaKind::Var: {
        for (auto it = bound.rbegin(); it != bound.rend(); ++it)
          if (it->first == t.name()) {
            if (!(it->second == t.type()))
              throw Error(ErrorKind::TypeMismatch, "bound variable " + t.name() + " used at the wrong type", pos);
            return t.type();
          }
        auto e = env.find(t.name());
        if (e != env.end() && !(e->second == t.type()))
          throw Error(ErrorKind::TypeMismatch, "variable " + t.name() + " used at the wrong type", pos);
        return t.type();
      }
      case LambdaKind::Const: {
        if (t.name() == kApply) {
          if (!is_apply_instance(t.type())) throw Error(ErrorKind::TypeMismatch, "@ used at type " + t.type().str(), pos);
          return t.type();
        }
        auto c = constants.find(t.name());
        if (c == constants.end()) throw Error(ErrorKind::UndeclaredSymbol, "undeclared function symbol " + t.name(), pos);
        if (!(c->second == t.type()))
          throw Error(ErrorKind::TypeMismatch, t.name() + " used at type " + t.type().str(), pos);
        return t.type();
      }
      case LambdaKind::App: {
        pos.push_back(1);
        Type f = rec(t.fn());
        pos.back() = 2;
        Type a = rec(t.arg());
        pos.pop_back();
        if (!f.is_arrow() || !(f.domain() == a)) throw Error(ErrorKind::TypeMismatch, "ill-typed application", pos);
        return f.codomain();
      }
      case LambdaKind::Lam: {
        bound.emplace_back(t.name(), t.binder_type());
        pos.push_back(1);
        Type b = rec(t.body());
        pos.pop_back();
        bound.pop_back();
        return Type::arrow(t.binder_type(), b);
      }
    }
    return t.type();
  };
  return rec(u);
}

// HRS systems ---------------------------------------------------------------

Status HrsSystem::status(const std::string& symbol) const {
  auto it = statuses.find(symbol);
  return it == statuses.end() ? Status::Lex : it->second;
}

std::set<std::string> pattern_variables(const HrsRule& rule) { return free_vars(rule.lhs); }

namespace {

// Every free-variable-headed subterm is applied to arguments η-equivalent to
// distinct bound variables.
bool hrs_pattern_rec(const Lambda& u, const std::set<std::string>& free, std::vector<std::string>& bound) {
  auto [binders, body] = strip_lambdas(u);
  for (auto& [x, t] : binders) bound.push_back(x);
  Spine sp = spine(body);
  bool ok = true;
  if (sp.head.is_var() && bound_index(bound, sp.head.name()) < 0 && free.count(sp.head.name())) {
    std::set<std::string> seen;
    for (const Lambda& a : sp.args) {
      auto v = eta_variable(a);
      if (!v || bound_index(bound, *v) < 0 || !seen.insert(*v).second) {
        ok = false;
        break;
      }
    }
  } else {
    for (const Lambda& a : sp.args)
      if (!hrs_pattern_rec(a, free, bound)) {
        ok = false;
        break;
      }
  }
  for (std::size_t i = 0; i < binders.size(); ++i) bound.pop_back();
  return ok;
}

}  // namespace

void validate_hrs_rule(const HrsRule& rule, const HrsSystem& system) {
  if (!is_long_normal(rule.lhs))
    throw Error(ErrorKind::NotEtaLongBetaNormal, "left-hand side of rule " + rule.name + " is not η-long β-normal");
  if (!is_long_normal(rule.rhs))
    throw Error(ErrorKind::NotEtaLongBetaNormal, "right-hand side of rule " + rule.name + " is not η-long β-normal");
  if (!(rule.lhs.type() == rule.rhs.type()))
    throw Error(ErrorKind::RuleViolation, "sides of rule " + rule.name + " have different types");
  auto [binders, body] = strip_lambdas(rule.lhs);
  Spine sp = spine(body);
  if (!binders.empty() || !sp.head.is_const())
    throw Error(ErrorKind::RuleViolation, "left-hand side of rule " + rule.name + " is not headed by a function symbol");
  auto free = free_vars(rule.lhs);
  std::vector<std::string> bound;
  if (!hrs_pattern_rec(rule.lhs, free, bound))
    throw Error(ErrorKind::PatternViolation, "left-hand side of rule " + rule.name + " is not a pattern");
  for (const std::string& x : free_vars(rule.rhs))
    if (!free.count(x))
      throw Error(ErrorKind::RuleViolation, "variable " + x + " of the right-hand side of rule " + rule.name +
                                                " does not occur in the left-hand side");
  std::map<std::string, Type> consts = system.functions;
  typecheck(rule.lhs, consts);
  typecheck(rule.rhs, consts, free_var_types(rule.lhs));
}

namespace {

struct Matcher {
  std::set<std::string> matchable;
  std::vector<std::pair<std::string, std::string>> bmap;  // pattern binder -> subject binder
  std::vector<std::pair<std::string, Type>> subject_bound;
  LambdaSubstitution theta;

  const std::string* image(const std::string& x) const {
    for (auto it = bmap.rbegin(); it != bmap.rend(); ++it)
      if (it->first == x) return &it->second;
    return nullptr;
  }

  bool match(const Lambda& p, const Lambda& t) {
    if (!(p.type() == t.type())) return false;
    if (p.is_lam()) {
      if (!t.is_lam() || !(p.binder_type() == t.binder_type())) return false;
      bmap.emplace_back(p.name(), t.name());
      subject_bound.emplace_back(t.name(), t.binder_type());
      bool ok = match(p.body(), t.body());
      bmap.pop_back();
      subject_bound.pop_back();
      return ok;
    }
    Spine sp = spine(p);
    if (sp.head.is_var() && !image(sp.head.name()) && matchable.count(sp.head.name())) return flex(sp, t);
    Spine st = spine(t);
    if (sp.args.size() != st.args.size()) return false;
    const Lambda& hp = sp.head;
    const Lambda& ht = st.head;
    if (hp.is_const()) {
      if (!ht.is_const() || hp.name() != ht.name() || !(hp.type() == ht.type())) return false;
    } else if (hp.is_var()) {
      if (!ht.is_var()) return false;
      if (const std::string* img = image(hp.name())) {
        if (ht.name() != *img) return false;
      } else {
        if (ht.name() != hp.name()) return false;
        for (auto& [n, ty] : subject_bound)
          if (n == ht.name()) return false;
      }
    } else {
      return false;
    }
    for (std::size_t i = 0; i < sp.args.size(); ++i)
      if (!match(sp.args[i], st.args[i])) return false;
    return true;
  }

  bool flex(const Spine& sp, const Lambda& t) {
    std::vector<std::pair<std::string, Type>> params;
    std::set<std::string> seen;
    for (const Lambda& a : sp.args) {
      auto v = eta_variable(a);
      if (!v) return false;
      const std::string* img = image(*v);
      if (!img || !seen.insert(*img).second) return false;
      params.emplace_back(*img, a.type());
    }
    auto fv = free_vars(t);
    for (auto& [n, ty] : subject_bound)
      if (fv.count(n) && !seen.count(n)) return false;
    Lambda binding = t;
    for (auto it = params.rbegin(); it != params.rend(); ++it) binding = Lambda::lam(it->first, it->second, binding);
    binding = long_normal_form(binding);
    auto [it, fresh] = theta.emplace(sp.head.name(), binding);
    return fresh || alpha_equal(it->second, binding);
  }
};

}  // namespace

std::optional<LambdaSubstitution> hrs_match(const Lambda& pattern, const Lambda& subject) {
  Matcher m;
  m.matchable = free_vars(pattern);
  Lambda t = rename_bound_apart(subject, m.matchable);
  if (!m.match(pattern, t)) return std::nullopt;
  return m.theta;
}

std::vector<HrsReduct> hrs_rewrite_step(const HrsSystem& system, const Lambda& u) {
  std::vector<HrsReduct> out;
  Lambda t = rename_bound_apart(u);
  for (const Position& p : subterm_positions(t)) {
    const Lambda& s = subterm_at(t, p);
    for (const HrsRule& rule : system.rules) {
      if (!(rule.lhs.type() == s.type())) continue;
      auto theta = hrs_match(rule.lhs, s);
      if (!theta) continue;
      Lambda v = instantiate(rule.rhs, *theta);
      out.push_back({replace_at(t, p, v), rule.name, p});
    }
  }
  return out;
}

}  // namespace idts
