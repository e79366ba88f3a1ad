#include "idts/rewrite.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <unordered_map>
#include <unordered_set>

namespace idts {

const Rule* RewriteSystem::rule(const std::string& name) const {
  for (const Rule& r : rules)
    if (r.name == name) return &r;
  return nullptr;
}

namespace {

void collect_meta_signatures(const Term& u, std::map<std::string, Signature>& out, const std::string& rule) {
  if (u.is_meta()) {
    Signature s;
    for (const Term& a : u.args()) s.args.push_back(a.type());
    s.result = u.type();
    auto [it, fresh] = out.emplace(u.name(), s);
    if (!fresh && !(it->second == s))
      throw Error(ErrorKind::TypeMismatch,
                  "metavariable " + u.name() + " used at both " + it->second.str() + " and " + s.str() + " in rule " + rule);
  }
  for (const Term& c : u.children()) collect_meta_signatures(c, out, rule);
}

}  // namespace

void validate_rule(const Rule& rule, const Alphabet& alphabet) {
  typecheck(rule.lhs, alphabet);
  typecheck(rule.rhs, alphabet);
  if (!rule.lhs.is_fun())
    throw Error(ErrorKind::RuleViolation, "left-hand side of rule " + rule.name + " is not headed by a function symbol");
  if (!is_pattern(rule.lhs))
    throw Error(ErrorKind::PatternViolation, "left-hand side of rule " + rule.name +
                                                 " applies a metavariable to arguments that are not distinct bound variables");
  if (!(rule.lhs.type() == rule.rhs.type()))
    throw Error(ErrorKind::RuleViolation, "sides of rule " + rule.name + " have types " + rule.lhs.type().str() +
                                              " and " + rule.rhs.type().str());
  if (!free_vars(rule.lhs).empty() || !free_vars(rule.rhs).empty())
    throw Error(ErrorKind::RuleViolation, "rule " + rule.name + " has free variables");
  std::map<std::string, Signature> sigs;
  collect_meta_signatures(rule.lhs, sigs, rule.name);
  auto lhs_metas = meta_vars(rule.lhs);
  collect_meta_signatures(rule.rhs, sigs, rule.name);
  for (const std::string& z : meta_vars(rule.rhs))
    if (!lhs_metas.count(z))
      throw Error(ErrorKind::RuleViolation,
                  "metavariable " + z + " of the right-hand side of rule " + rule.name + " does not occur in the left-hand side");
}

void validate_system(const RewriteSystem& system) {
  system.alphabet.validate();
  for (const Rule& r : system.rules) {
    validate_rule(r, system.alphabet);
    if (system.beta_enabled && r.lhs.is_app())
      throw Error(ErrorKind::AtHeadedUserRule, "rule " + r.name + " has a left-hand side headed by @");
  }
}

Rule make_beta_rule(const Type& s, const Type& t) {
  Term x = Term::var("x", s);
  Term zx = Term::meta("Z", {x}, t);
  Term z2 = Term::meta("Z'", {}, s);
  Term lhs = Term::app(Term::abs("x", s, zx), z2);
  Term rhs = Term::meta("Z", {z2}, t);
  return {kBetaRule, lhs, rhs};
}

const char* match_failure_name(MatchFailure f) {
  switch (f) {
    case MatchFailure::NoMatch: return "NoMatch";
    case MatchFailure::ScopeViolation: return "ScopeViolation";
    case MatchFailure::InconsistentRepeatedMetavariable: return "InconsistentRepeatedMetavariable";
  }
  return "?";
}

// Matching ------------------------------------------------------------------

namespace {

struct Matcher {
  std::vector<std::pair<std::string, std::string>> bmap;  // pattern binder -> subject binder
  std::vector<std::string> subject_bound;
  Valuation sigma;
  Position pos;
  std::optional<MatchError> error;

  const std::string* image(const std::string& x) const {
    for (auto it = bmap.rbegin(); it != bmap.rend(); ++it)
      if (it->first == x) return &it->second;
    return nullptr;
  }

  bool fail(MatchFailure kind) {
    error = MatchError{kind, pos};
    return false;
  }

  bool match(const Term& p, const Term& t) {
    if (!(p.type() == t.type())) return fail(MatchFailure::NoMatch);
    switch (p.kind()) {
      case TermKind::Var: {
        if (!t.is_var()) return fail(MatchFailure::NoMatch);
        if (const std::string* img = image(p.name())) return t.name() == *img || fail(MatchFailure::NoMatch);
        if (t.name() != p.name()) return fail(MatchFailure::NoMatch);
        if (std::find(subject_bound.begin(), subject_bound.end(), t.name()) != subject_bound.end())
          return fail(MatchFailure::NoMatch);
        return true;
      }
      case TermKind::Abs: {
        if (!t.is_abs() || !(p.binder_type() == t.binder_type())) return fail(MatchFailure::NoMatch);
        bmap.emplace_back(p.name(), t.name());
        subject_bound.push_back(t.name());
        pos.push_back(1);
        bool ok = match(p.body(), t.body());
        pos.pop_back();
        subject_bound.pop_back();
        bmap.pop_back();
        return ok;
      }
      case TermKind::Fun: {
        if (!t.is_fun() || t.name() != p.name() || t.arity() != p.arity()) return fail(MatchFailure::NoMatch);
        for (std::size_t i = 0; i < p.arity(); ++i) {
          pos.push_back(static_cast<int>(i + 1));
          bool ok = match(p.arg(i), t.arg(i));
          pos.pop_back();
          if (!ok) return false;
        }
        return true;
      }
      case TermKind::Meta: return match_meta(p, t);
    }
    return false;
  }

  bool match_meta(const Term& p, const Term& t) {
    Substitute s;
    std::set<std::string> allowed;
    for (const Term& a : p.args()) {
      const std::string* img = a.is_var() ? image(a.name()) : nullptr;
      if (!img || allowed.count(*img))
        throw Error(ErrorKind::PatternViolation, "metavariable " + p.name() + " is not applied to distinct bound variables",
                    pos);
      allowed.insert(*img);
      s.params.emplace_back(*img, a.type());
    }
    auto fv = free_vars(t);
    for (const std::string& y : subject_bound)
      if (fv.count(y) && !allowed.count(y)) return fail(MatchFailure::ScopeViolation);
    s.body = t;
    auto [it, fresh] = sigma.emplace(p.name(), s);
    if (!fresh && !alpha_equal(it->second, s)) return fail(MatchFailure::InconsistentRepeatedMetavariable);
    return true;
  }
};

}  // namespace

MatchResult match(const Term& pattern, const Term& subject) {
  Matcher m;
  std::set<std::string> avoid = bound_vars(pattern);
  Term t = rename_bound_apart(subject, avoid);
  if (!m.match(pattern, t)) return *m.error;
  return m.sigma;
}

// Rewriting -----------------------------------------------------------------

namespace {

void reducts_at(const RewriteSystem& system, const Term& whole, const Position& p, const Term& s,
                std::vector<Reduct>& out) {
  auto apply = [&](const Rule& r) {
    MatchResult m = match(r.lhs, s);
    if (!matched(m)) return;
    Term v = apply_valuation(r.rhs, std::get<Valuation>(m));
    out.push_back({p.empty() ? v : replace_at(whole, p, v), r.name, p});
  };
  if (!s.is_fun()) return;
  for (const Rule& r : system.rules)
    if (r.lhs.name() == s.name() && r.lhs.type() == s.type()) apply(r);
  if (system.beta_enabled && is_beta_redex(s)) apply(make_beta_rule(s.arg(1).type(), s.type()));
}

}  // namespace

std::vector<Reduct> rewrite_step(const RewriteSystem& system, const Term& u) {
  std::vector<Reduct> out;
  Term t = rename_bound_apart(u);
  for (const Position& p : positions(t)) reducts_at(system, t, p, subterm_at(t, p), out);
  return out;
}

std::vector<Reduct> root_reducts(const RewriteSystem& system, const Term& u) {
  std::vector<Reduct> out;
  Term t = rename_bound_apart(u);
  reducts_at(system, t, {}, t, out);
  return out;
}

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::LeftmostOutermost: return "lo";
    case Strategy::LeftmostInnermost: return "li";
    case Strategy::Full: return "all";
  }
  return "?";
}

namespace {

bool is_prefix(const Position& a, const Position& b) {
  return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

const Reduct& pick(const std::vector<Reduct>& rs, Strategy strategy) {
  if (strategy == Strategy::LeftmostOutermost) return rs.front();
  // Leftmost among the innermost redex positions.
  const Reduct* best = nullptr;
  for (const Reduct& r : rs) {
    bool innermost = std::none_of(rs.begin(), rs.end(), [&](const Reduct& o) {
      return o.position.size() > r.position.size() && is_prefix(r.position, o.position);
    });
    if (innermost && (!best || r.position < best->position)) best = &r;
  }
  return *best;
}

RewriteTrace normalize_linear(const RewriteSystem& system, const Term& u, std::size_t budget, Strategy strategy) {
  RewriteTrace trace;
  trace.steps.push_back({u, "", {}});
  std::unordered_map<std::string, std::size_t> seen{{alpha_key(u), 0}};
  while (true) {
    auto rs = rewrite_step(system, trace.result());
    if (rs.empty()) return trace;
    if (trace.step_count() >= budget) {
      trace.budget_exhausted = true;
      return trace;
    }
    const Reduct& r = pick(rs, strategy);
    trace.steps.push_back({r.term, r.rule, r.position});
    auto [it, fresh] = seen.emplace(alpha_key(r.term), trace.steps.size() - 1);
    if (!fresh) {
      trace.loop_detected = true;
      trace.loop_start = it->second;
      return trace;
    }
  }
}

RewriteTrace normalize_full(const RewriteSystem& system, const Term& u, std::size_t budget) {
  struct Frame {
    std::vector<Reduct> reducts;
    std::size_t next = 0;
    bool expanded = false;
  };
  RewriteTrace trace;
  std::vector<TraceStep> path{{u, "", {}}};
  std::vector<Frame> frames(1);
  std::unordered_map<std::string, std::size_t> on_path{{alpha_key(u), 0}};
  std::unordered_set<std::string> done;
  std::optional<std::vector<TraceStep>> first_normal;
  std::size_t explored = 0;

  while (!frames.empty()) {
    Frame& f = frames.back();
    if (!f.expanded) {
      f.expanded = true;
      f.reducts = rewrite_step(system, path.back().term);
      if (f.reducts.empty() && !first_normal) first_normal = path;
      for (const Reduct& r : f.reducts) {
        auto it = on_path.find(alpha_key(r.term));
        if (it != on_path.end()) {
          trace.steps = path;
          trace.steps.push_back({r.term, r.rule, r.position});
          trace.loop_detected = true;
          trace.loop_start = it->second;
          return trace;
        }
      }
    }
    if (f.next < f.reducts.size()) {
      const Reduct& r = f.reducts[f.next++];
      std::string key = alpha_key(r.term);
      if (done.count(key)) continue;
      if (explored >= budget) {
        trace.steps = path;
        trace.budget_exhausted = true;
        return trace;
      }
      ++explored;
      on_path.emplace(key, path.size());
      path.push_back({r.term, r.rule, r.position});
      frames.emplace_back();
      continue;
    }
    std::string key = alpha_key(path.back().term);
    on_path.erase(key);
    done.insert(key);
    path.pop_back();
    frames.pop_back();
  }
  trace.steps = *first_normal;
  return trace;
}

}  // namespace

RewriteTrace normalize(const RewriteSystem& system, const Term& u, std::size_t budget, Strategy strategy) {
  if (strategy == Strategy::Full) return normalize_full(system, u, budget);
  return normalize_linear(system, u, budget, strategy);
}

}  // namespace idts
