#include "idts/confluence.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>
#include <unordered_map>

#include "idts/syntax.hpp"
#include "json.hpp"

namespace idts {

const char* unify_failure_name(UnifyFailure f) {
  switch (f) {
    case UnifyFailure::Clash: return "Clash";
    case UnifyFailure::OccursCheck: return "OccursCheck";
    case UnifyFailure::ScopeViolation: return "ScopeViolation";
    case UnifyFailure::NotAPattern: return "NotAPattern";
  }
  return "?";
}

const char* joinability_name(Joinability j) {
  switch (j) {
    case Joinability::Unchecked: return "unchecked";
    case Joinability::Joined: return "joined";
    case Joinability::NotJoined: return "not-joined";
    case Joinability::BudgetExhausted: return "budget-exhausted";
  }
  return "?";
}

// Pattern unification -------------------------------------------------------

namespace {

void collect_names(const Term& u, std::set<std::string>& vars, std::set<std::string>& metas) {
  if (u.is_meta()) metas.insert(u.name());
  else if (!u.is_fun()) vars.insert(u.name());
  for (const Term& c : u.children()) collect_names(c, vars, metas);
}

struct Unifier {
  std::set<std::string> local;
  std::set<std::string> used_vars;
  std::set<std::string> used_metas;
  Valuation sigma;
  std::deque<std::pair<Term, Term>> eqs;
  std::optional<UnifyError> error;

  bool fail(UnifyFailure kind, std::string detail) {
    error = UnifyError{kind, std::move(detail)};
    return false;
  }

  std::string fresh_meta() {
    std::string w = fresh_name("W", used_metas);
    used_metas.insert(w);
    return w;
  }

  void bind(const std::string& z, const Substitute& s) {
    Valuation one{{z, s}};
    for (auto& [a, b] : eqs) {
      a = apply_valuation(a, one);
      b = apply_valuation(b, one);
    }
    for (auto& [name, sub] : sigma) sub.body = apply_valuation(sub.body, one);
    sigma[z] = s;
  }

  // Arguments of a flexible term as distinct local variables.
  bool flex_args(const Term& t, std::vector<std::pair<std::string, Type>>& out) {
    std::set<std::string> seen;
    for (const Term& a : t.args()) {
      if (!a.is_var() || !local.count(a.name()) || !seen.insert(a.name()).second)
        return fail(UnifyFailure::NotAPattern, "metavariable " + t.name() + " is not applied to distinct bound variables");
      out.emplace_back(a.name(), a.type());
    }
    return true;
  }

  static Term meta_on(const std::string& w, const std::vector<std::pair<std::string, Type>>& vars, const Type& result) {
    std::vector<Term> args;
    for (auto& [x, t] : vars) args.push_back(Term::var(x, t));
    return Term::meta(w, std::move(args), result);
  }

  enum class Scan { Ok, Pruned, Failed };

  // Checks that t may become the body of λ̲(allowed).t for Z. Prunes one
  // metavariable argument that would escape the scope, if any.
  Scan scan(const Term& t, const std::string& z, const std::set<std::string>& allowed, std::set<std::string>& inner) {
    switch (t.kind()) {
      case TermKind::Var:
        if (local.count(t.name()) && !allowed.count(t.name()) && !inner.count(t.name())) {
          fail(UnifyFailure::ScopeViolation, "variable " + t.name() + " would escape the scope of " + z);
          return Scan::Failed;
        }
        return Scan::Ok;
      case TermKind::Abs: {
        bool added = inner.insert(t.name()).second;
        Scan s = scan(t.body(), z, allowed, inner);
        if (added) inner.erase(t.name());
        return s;
      }
      case TermKind::Fun:
        for (const Term& c : t.args()) {
          Scan s = scan(c, z, allowed, inner);
          if (s != Scan::Ok) return s;
        }
        return Scan::Ok;
      case TermKind::Meta: {
        if (t.name() == z) {
          fail(UnifyFailure::OccursCheck, "metavariable " + z + " occurs in the term it must equal");
          return Scan::Failed;
        }
        std::vector<std::pair<std::string, Type>> params, kept;
        std::set<std::string> seen;
        for (const Term& a : t.args()) {
          if (!a.is_var() || !seen.insert(a.name()).second) {
            fail(UnifyFailure::NotAPattern, "metavariable " + t.name() + " is not applied to distinct variables");
            return Scan::Failed;
          }
          params.emplace_back(a.name(), a.type());
          if (allowed.count(a.name()) || inner.count(a.name()) || !local.count(a.name())) kept.emplace_back(a.name(), a.type());
        }
        if (kept.size() == params.size()) return Scan::Ok;
        bind(t.name(), Substitute{params, meta_on(fresh_meta(), kept, t.type())});
        return Scan::Pruned;
      }
    }
    return Scan::Ok;
  }

  bool flex_rigid(Term flex, Term rigid) {
    std::vector<std::pair<std::string, Type>> params;
    if (!flex_args(flex, params)) return false;
    std::set<std::string> allowed;
    for (auto& [x, t] : params) allowed.insert(x);
    while (true) {
      std::set<std::string> inner;
      Scan s = scan(rigid, flex.name(), allowed, inner);
      if (s == Scan::Failed) return false;
      if (s == Scan::Ok) break;
      rigid = apply_valuation(rigid, sigma);
    }
    bind(flex.name(), Substitute{params, rigid});
    return true;
  }

  bool flex_flex(const Term& a, const Term& b) {
    std::vector<std::pair<std::string, Type>> pa, pb;
    if (!flex_args(a, pa) || !flex_args(b, pb)) return false;
    if (a.name() == b.name()) {
      if (pa == pb) return true;
      std::vector<std::pair<std::string, Type>> kept;
      for (std::size_t i = 0; i < pa.size(); ++i)
        if (pa[i].first == pb[i].first) kept.push_back(pa[i]);
      bind(a.name(), Substitute{pa, meta_on(fresh_meta(), kept, a.type())});
      return true;
    }
    std::vector<std::pair<std::string, Type>> kept;
    for (auto& x : pa)
      if (std::find(pb.begin(), pb.end(), x) != pb.end()) kept.push_back(x);
    Term w = meta_on(fresh_meta(), kept, a.type());
    bind(a.name(), Substitute{pa, w});
    bind(b.name(), Substitute{pb, w});
    return true;
  }

  bool step(const Term& s, const Term& t) {
    if (!(s.type() == t.type()))
      return fail(UnifyFailure::Clash, "types " + s.type().str() + " and " + t.type().str() + " differ");
    if (s.is_meta() && t.is_meta()) return flex_flex(s, t);
    if (s.is_meta()) return flex_rigid(s, t);
    if (t.is_meta()) return flex_rigid(t, s);
    if (s.kind() != t.kind()) return fail(UnifyFailure::Clash, print_term(s) + " and " + print_term(t) + " clash");
    switch (s.kind()) {
      case TermKind::Var:
        if (s.name() != t.name()) return fail(UnifyFailure::Clash, "variables " + s.name() + " and " + t.name() + " clash");
        return true;
      case TermKind::Abs: {
        if (!(s.binder_type() == t.binder_type())) return fail(UnifyFailure::Clash, "binder types differ");
        std::string z = fresh_name("x", used_vars);
        used_vars.insert(z);
        local.insert(z);
        Term vz = Term::var(z, s.binder_type());
        eqs.emplace_front(apply_substitution(s.body(), {{s.name(), vz}}), apply_substitution(t.body(), {{t.name(), vz}}));
        return true;
      }
      case TermKind::Fun:
        if (s.name() != t.name() || s.arity() != t.arity())
          return fail(UnifyFailure::Clash, "symbols " + s.name() + " and " + t.name() + " clash");
        for (std::size_t i = s.arity(); i > 0; --i) eqs.emplace_front(s.arg(i - 1), t.arg(i - 1));
        return true;
      case TermKind::Meta: break;
    }
    return true;
  }
};

}  // namespace

UnifyResult pattern_unify(const Term& u, const Term& v, const std::set<std::string>& frozen) {
  Unifier un;
  un.local = frozen;
  collect_names(u, un.used_vars, un.used_metas);
  collect_names(v, un.used_vars, un.used_metas);
  for (const std::string& x : frozen) un.used_vars.insert(x);
  std::set<std::string> original = meta_vars(u);
  for (const std::string& z : meta_vars(v)) original.insert(z);
  un.eqs.emplace_back(u, v);
  while (!un.eqs.empty()) {
    auto [s, t] = un.eqs.front();
    un.eqs.pop_front();
    if (!un.step(s, t)) return *un.error;
  }
  Valuation out;
  for (auto& [z, sub] : un.sigma)
    if (original.count(z)) out[z] = sub;
  return out;
}

// Critical pairs ------------------------------------------------------------

namespace {

Term rename_metas(const Term& u, const std::map<std::string, std::string>& names) {
  std::vector<Term> cs;
  for (const Term& c : u.children()) cs.push_back(rename_metas(c, names));
  if (u.is_meta()) {
    auto it = names.find(u.name());
    return Term::meta(it == names.end() ? u.name() : it->second, std::move(cs), u.type());
  }
  if (cs.empty()) return u;
  return u.with_children(std::move(cs));
}

// Z(ū) becomes Z(x̄, ū).
Term lift(const Term& u, const std::vector<std::pair<std::string, Type>>& xs) {
  std::vector<Term> cs;
  for (const Term& c : u.children()) cs.push_back(lift(c, xs));
  if (u.is_meta()) {
    std::vector<Term> args;
    for (auto& [x, t] : xs) args.push_back(Term::var(x, t));
    for (Term& c : cs) args.push_back(std::move(c));
    return Term::meta(u.name(), std::move(args), u.type());
  }
  if (cs.empty()) return u;
  return u.with_children(std::move(cs));
}

std::set<std::string> names_of(const Term& u) {
  std::set<std::string> vars, metas;
  collect_names(u, vars, metas);
  vars.insert(metas.begin(), metas.end());
  return vars;
}

Rule renamed_apart(const Rule& r2, const Rule& r1) {
  std::set<std::string> avoid = names_of(r1.lhs);
  for (const std::string& n : names_of(r1.rhs)) avoid.insert(n);
  std::map<std::string, std::string> names;
  for (const std::string& z : meta_vars(r2.lhs)) {
    if (!avoid.count(z)) {
      avoid.insert(z);
      continue;
    }
    std::string n = fresh_name(z, avoid);
    avoid.insert(n);
    names[z] = n;
  }
  Term l = rename_bound_apart(rename_metas(r2.lhs, names), avoid);
  Term r = rename_bound_apart(rename_metas(r2.rhs, names), avoid);
  return {r2.name, l, r};
}

Term strip_abs(const Term& u) { return u.is_abs() ? strip_abs(u.body()) : u; }

}  // namespace

std::vector<CriticalPair> critical_pairs(const RewriteSystem& system) {
  std::vector<CriticalPair> out;
  for (const Rule& r1 : system.rules) {
    for (const Position& p : positions(r1.lhs)) {
      const Term& s = subterm_at(r1.lhs, p);
      if (!s.is_fun() || strip_abs(s).is_meta()) continue;
      std::vector<Rule> partners;
      // A root overlap is reported once per unordered rule pair, with the
      // earlier rule inside.
      for (const Rule& r2 : system.rules) {
        if (p.empty() && &r2 >= &r1) break;
        if (r2.lhs.is_fun() && r2.lhs.name() == s.name()) partners.push_back(r2);
      }
      if (system.beta_enabled && s.is_app()) partners.push_back(make_beta_rule(s.arg(1).type(), s.type()));
      auto xs = binders_above(r1.lhs, p);
      std::set<std::string> frozen;
      for (auto& [x, t] : xs) frozen.insert(x);
      for (const Rule& partner : partners) {
        Rule r2 = renamed_apart(partner, r1);
        Term l2 = lift(r2.lhs, xs);
        Term rhs2 = lift(r2.rhs, xs);
        UnifyResult u = pattern_unify(s, l2, frozen);
        if (!unified(u)) continue;
        CriticalPair cp;
        cp.rule1 = r1.name;
        cp.rule2 = r2.name;
        cp.position = p;
        cp.unifier = std::get<Valuation>(u);
        cp.frozen = xs;
        cp.peak = apply_valuation(r1.lhs, cp.unifier);
        cp.left = apply_valuation(p.empty() ? rhs2 : replace_at(r1.lhs, p, rhs2), cp.unifier);
        cp.right = apply_valuation(r1.rhs, cp.unifier);
        out.push_back(std::move(cp));
      }
    }
  }
  return out;
}

std::string critical_pair_key(const CriticalPair& cp) {
  std::map<std::string, std::string> names;
  std::function<void(const Term&)> visit = [&](const Term& u) {
    if (u.is_meta() && !names.count(u.name())) names[u.name()] = "M" + std::to_string(names.size());
    for (const Term& c : u.children()) visit(c);
  };
  visit(cp.peak);
  visit(cp.left);
  visit(cp.right);
  return cp.rule1 + "|" + cp.rule2 + "|" + position_str(cp.position) + "|" + alpha_key(rename_metas(cp.peak, names)) +
         "|" + alpha_key(rename_metas(cp.left, names)) + "|" + alpha_key(rename_metas(cp.right, names));
}

// Joinability ---------------------------------------------------------------

JoinResult join(const RewriteSystem& system, const Term& u, const Term& v, std::size_t budget) {
  if (alpha_equal(u, v)) return {Joinability::Joined, u};
  RewriteTrace tu = normalize(system, u, budget);
  RewriteTrace tv = normalize(system, v, budget);
  if (tu.normal_form() && tv.normal_form() && alpha_equal(tu.result(), tv.result()))
    return {Joinability::Joined, tu.result()};

  struct Side {
    std::unordered_map<std::string, Term> seen;
    std::deque<Term> queue;
  };
  Side sides[2];
  sides[0].seen.emplace(alpha_key(u), u);
  sides[0].queue.push_back(u);
  sides[1].seen.emplace(alpha_key(v), v);
  sides[1].queue.push_back(v);
  bool exhausted = false;
  while (!sides[0].queue.empty() || !sides[1].queue.empty()) {
    for (int i = 0; i < 2; ++i) {
      Side& me = sides[i];
      Side& other = sides[1 - i];
      if (me.queue.empty()) continue;
      Term t = me.queue.front();
      me.queue.pop_front();
      for (const Reduct& r : rewrite_step(system, t)) {
        std::string key = alpha_key(r.term);
        if (auto it = other.seen.find(key); it != other.seen.end()) return {Joinability::Joined, it->second};
        if (me.seen.count(key)) continue;
        if (me.seen.size() >= budget) {
          exhausted = true;
          continue;
        }
        me.seen.emplace(key, r.term);
        me.queue.push_back(r.term);
      }
    }
  }
  return {exhausted ? Joinability::BudgetExhausted : Joinability::NotJoined, std::nullopt};
}

bool ConfluenceReport::locally_confluent() const {
  return std::all_of(pairs.begin(), pairs.end(), [](const CriticalPair& cp) { return cp.verdict == Joinability::Joined; });
}

bool ConfluenceReport::unknown() const {
  bool refuted = std::any_of(pairs.begin(), pairs.end(), [](const CriticalPair& cp) { return cp.verdict == Joinability::NotJoined; });
  bool open = std::any_of(pairs.begin(), pairs.end(), [](const CriticalPair& cp) { return cp.verdict == Joinability::BudgetExhausted; });
  return open && !refuted;
}

ConfluenceReport check_local_confluence(const RewriteSystem& system, std::size_t join_budget) {
  ConfluenceReport rep;
  rep.pairs = critical_pairs(system);
  for (CriticalPair& cp : rep.pairs) {
    JoinResult j = join(system, cp.left, cp.right, join_budget);
    cp.verdict = j.verdict;
    cp.common = j.common;
  }
  return rep;
}

namespace {

const char* verdict_text(const ConfluenceReport& r) {
  if (r.locally_confluent()) return "locally confluent";
  if (r.unknown()) return "unknown";
  return "not locally confluent";
}

}  // namespace

std::string format_confluence(const ConfluenceReport& report) {
  std::ostringstream out;
  int i = 0;
  for (const CriticalPair& cp : report.pairs) {
    out << "critical pair " << ++i << ": " << cp.rule1 << " / " << cp.rule2 << " at " << position_str(cp.position) << "\n";
    out << "  unifier: " << print_valuation(cp.unifier) << "\n";
    out << "  peak:  " << print_term(cp.peak) << "\n";
    out << "  left:  " << print_term(cp.left) << "\n";
    out << "  right: " << print_term(cp.right) << "\n";
    out << "  " << joinability_name(cp.verdict);
    if (cp.common) out << " at " << print_term(*cp.common);
    out << "\n";
  }
  out << "confluence: " << verdict_text(report) << " (" << report.pairs.size() << " critical pair"
      << (report.pairs.size() == 1 ? "" : "s") << ")\n";
  for (const CriticalPair& cp : report.pairs)
    if (cp.verdict != Joinability::Joined)
      out << "  witness: <" << print_term(cp.left) << ", " << print_term(cp.right) << "> (" << joinability_name(cp.verdict)
          << ")\n";
  return out.str();
}

std::string confluence_json(const ConfluenceReport& report) {
  std::string out;
  for (const CriticalPair& cp : report.pairs) {
    nlohmann::json u = nlohmann::json::object();
    for (auto& [z, s] : cp.unifier) u[z] = substitute_str(s);
    nlohmann::json j = {{"record", "critical_pair"},
                        {"rule1", cp.rule1},
                        {"rule2", cp.rule2},
                        {"position", position_str(cp.position)},
                        {"unifier", u},
                        {"peak", print_term(cp.peak)},
                        {"left", print_term(cp.left)},
                        {"right", print_term(cp.right)},
                        {"verdict", joinability_name(cp.verdict)}};
    if (cp.common) j["common"] = print_term(*cp.common);
    out += j.dump() + "\n";
  }
  std::string status = report.locally_confluent() ? "locally-confluent"
                       : report.unknown()         ? "unknown"
                                                  : "not-locally-confluent";
  out += nlohmann::json({{"record", "verdict"},
                         {"status", status},
                         {"locally_confluent", report.locally_confluent()},
                         {"pairs", report.pairs.size()}})
             .dump() +
         "\n";
  return out;
}

}  // namespace idts
