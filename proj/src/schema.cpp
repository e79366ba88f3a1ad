#include "idts/schema.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

#include "idts/syntax.hpp"
#include "json.hpp"

namespace idts {

// Quasi-orders --------------------------------------------------------------

QuasiOrder::QuasiOrder(std::set<std::string> nodes, const std::set<std::pair<std::string, std::string>>& edges)
    : nodes_(std::move(nodes)) {
  for (auto& [a, b] : edges) {
    nodes_.insert(a);
    nodes_.insert(b);
  }
  int n = 0;
  for (const std::string& x : nodes_) index_[x] = n++;
  reach_.assign(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) reach_[i][i] = true;
  for (auto& [a, b] : edges) reach_[index_[a]][index_[b]] = true;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      if (reach_[i][k])
        for (int j = 0; j < n; ++j)
          if (reach_[k][j]) reach_[i][j] = true;
  std::vector<bool> placed(n, false);
  std::vector<std::string> names(nodes_.begin(), nodes_.end());
  for (int i = 0; i < n; ++i) {
    if (placed[i]) continue;
    std::set<std::string> cls;
    for (int j = 0; j < n; ++j)
      if (reach_[i][j] && reach_[j][i]) {
        cls.insert(names[j]);
        placed[j] = true;
      }
    classes_.push_back(std::move(cls));
  }
}

bool QuasiOrder::leq(const std::string& a, const std::string& b) const {
  if (a == b) return true;
  auto ia = index_.find(a), ib = index_.find(b);
  if (ia == index_.end() || ib == index_.end()) return false;
  return reach_[ia->second][ib->second];
}

namespace {

void base_occurrences(const Type& t, std::set<std::string>& out) {
  if (t.is_base()) {
    out.insert(t.name());
    return;
  }
  base_occurrences(t.domain(), out);
  base_occurrences(t.codomain(), out);
}

void symbols_of(const Term& u, std::set<std::string>& out) {
  if (u.is_fun()) out.insert(u.name());
  for (const Term& c : u.children()) symbols_of(c, out);
}

}  // namespace

QuasiOrder type_precedence(const Alphabet& alphabet) {
  std::set<std::pair<std::string, std::string>> edges;
  for (auto& [t, cs] : alphabet.constructors)
    for (const std::string& c : cs) {
      const Signature* sig = alphabet.function(c);
      if (!sig) continue;
      std::set<std::string> occ;
      for (const Type& a : sig->args) base_occurrences(a, occ);
      for (const std::string& s : occ) edges.emplace(s, t);
    }
  return QuasiOrder(alphabet.base_types, edges);
}

PrecedenceAnalysis compute_precedences(const RewriteSystem& system) {
  PrecedenceAnalysis a;
  a.types = type_precedence(system.alphabet);
  std::set<std::string> nodes;
  for (auto& [f, sig] : system.alphabet.functions) nodes.insert(f);
  nodes.insert(kApply);
  std::set<std::pair<std::string, std::string>> edges;
  for (const Rule& r : system.rules) {
    std::set<std::string> used;
    symbols_of(r.rhs, used);
    for (const std::string& f : used) edges.emplace(f, r.lhs.name());
  }
  a.symbols = QuasiOrder(nodes, edges);
  return a;
}

// Positivity ----------------------------------------------------------------

namespace {

// True when some base type in `cls` occurs at a negative position of t.
bool negative_occurrence(const Type& t, const std::set<std::string>& cls, bool positive) {
  if (t.is_base()) return !positive && cls.count(t.name());
  return negative_occurrence(t.domain(), cls, !positive) || negative_occurrence(t.codomain(), cls, positive);
}

}  // namespace

bool PositivityReport::is_basic(const Type& t) const {
  if (!t.is_base()) return false;
  auto it = basic_types.find(t.name());
  return it == basic_types.end() || it->second;
}

PositivityReport check_positivity(const Alphabet& alphabet) {
  PositivityReport rep;
  QuasiOrder types = type_precedence(alphabet);
  for (const std::string& b : alphabet.base_types) {
    rep.positive_types[b] = true;
    rep.basic_types[b] = true;
  }
  for (auto& [s, cs] : alphabet.constructors) {
    std::set<std::string> cls;
    for (const std::string& t : alphabet.base_types)
      if (types.equiv(t, s)) cls.insert(t);
    cls.insert(s);
    for (const std::string& c : cs) {
      const Signature* sig = alphabet.function(c);
      ConstructorPositivity cp{c, s, true, true};
      if (sig) {
        for (const Type& a : sig->args) {
          if (negative_occurrence(a, cls, true)) cp.positive = false;
          if (!a.is_base()) cp.basic = false;
        }
      }
      cp.basic = cp.basic && cp.positive;
      if (!cp.positive) rep.positive_types[s] = false;
      if (!cp.basic) rep.basic_types[s] = false;
      rep.constructors.push_back(cp);
    }
  }
  return rep;
}

// Assumptions ---------------------------------------------------------------

AssumptionsReport check_assumptions(const RewriteSystem& system, const PrecedenceAnalysis& analysis,
                                    const PositivityReport& positivity) {
  AssumptionsReport rep;
  for (const ConstructorPositivity& c : positivity.constructors)
    if (!c.positive)
      rep.violations.push_back({1, "constructor " + c.constructor + " of " + c.base + " is not positive"});
  for (const Rule& r : system.rules)
    if (r.lhs.is_fun() && system.alphabet.is_constructor(r.lhs.name()))
      rep.violations.push_back({2, "left-hand side of rule " + r.name + " is headed by the constructor " + r.lhs.name()});
  rep.notes.push_back("(3) holds: the signature and the set of base types are finite");
  for (const auto& cls : analysis.symbols.classes()) {
    std::set<Status> seen;
    for (const std::string& f : cls) seen.insert(system.alphabet.status(f));
    if (seen.size() > 1) {
      std::string names;
      for (const std::string& f : cls) names += (names.empty() ? "" : ", ") + f;
      rep.violations.push_back({4, "equivalent symbols {" + names + "} have different statuses"});
    }
  }
  return rep;
}

AssumptionsReport check_assumptions(const RewriteSystem& system) {
  PrecedenceAnalysis a = compute_precedences(system);
  return check_assumptions(system, a, check_positivity(system.alphabet));
}

// Accessibility -------------------------------------------------------------

std::vector<AccStep> accessible_positions(const Term& v, const Alphabet& alphabet, const PositivityReport& positivity) {
  std::vector<AccStep> out;
  std::set<Position> seen;
  std::deque<Position> queue;
  auto add = [&](Position p, int clause) {
    if (seen.insert(p).second) {
      out.push_back({p, clause});
      queue.push_back(std::move(p));
    }
  };
  add({}, 1);
  auto fv_v = free_vars(v);
  auto child = [](const Position& p, int i) {
    Position q = p;
    q.push_back(i);
    return q;
  };
  while (!queue.empty()) {
    Position p = queue.front();
    queue.pop_front();
    const Term& t = subterm_at(v, p);
    if (t.is_abs()) {
      add(child(p, 1), 2);
      continue;
    }
    if (!t.is_fun()) continue;
    if (alphabet.is_constructor(t.name()))
      for (std::size_t i = 0; i < t.arity(); ++i) add(child(p, static_cast<int>(i + 1)), 3);
    for (std::size_t i = 0; i < t.arity(); ++i)
      if (positivity.is_basic(t.arg(i).type())) add(child(p, static_cast<int>(i + 1)), 4);
    if (t.is_app()) {
      const Term& u = t.arg(0);
      const Term& w = t.arg(1);
      if (w.is_var() && !free_vars(u).count(w.name()) && !fv_v.count(w.name())) add(child(p, 1), 5);
      if (u.is_var() && !free_vars(w).count(u.name()) && !fv_v.count(u.name())) add(child(p, 2), 6);
    }
  }
  return out;
}

std::optional<std::vector<AccStep>> accessible(const Term& u, const Term& v, const Alphabet& alphabet) {
  PositivityReport pos = check_positivity(alphabet);
  auto steps = accessible_positions(v, alphabet, pos);
  std::map<Position, int> clause;
  for (const AccStep& s : steps) clause[s.position] = s.clause;
  for (const AccStep& s : steps) {
    if (!alpha_equal(subterm_at(v, s.position), u)) continue;
    std::vector<AccStep> chain;
    Position q;
    chain.push_back({q, clause[q]});
    for (int i : s.position) {
      q.push_back(i);
      chain.push_back({q, clause[q]});
    }
    return chain;
  }
  return std::nullopt;
}

std::set<std::string> accessible_metavars(std::span<const Term> ls, const Alphabet& alphabet,
                                          const PositivityReport& positivity) {
  std::set<std::string> out;
  for (const Term& l : ls) {
    for (const AccStep& s : accessible_positions(l, alphabet, positivity)) {
      const Term& t = subterm_at(l, s.position);
      if (!t.is_meta()) continue;
      std::set<std::string> above;
      for (auto& [x, ty] : binders_above(l, s.position)) above.insert(x);
      std::set<std::string> seen;
      bool ok = true;
      for (const Term& a : t.args())
        if (!a.is_var() || !above.count(a.name()) || !seen.insert(a.name()).second) ok = false;
      if (ok) out.insert(t.name());
    }
  }
  return out;
}

std::set<std::string> accessible_metavars(std::span<const Term> ls, const Alphabet& alphabet) {
  return accessible_metavars(ls, alphabet, check_positivity(alphabet));
}

// Orderings -----------------------------------------------------------------

const char* comparison_name(Comparison c) {
  switch (c) {
    case Comparison::StrictlyLess: return "strictly-less";
    case Comparison::Equal: return "equal";
    case Comparison::Incomparable: return "incomparable";
  }
  return "?";
}

Comparison covered_subterm_cmp(const Term& u, const Term& v) {
  Position p;
  const Term* vp = &v;
  while (true) {
    std::function<bool(const Term&)> below = [&](const Term& w) {
      if (!w.is_fun()) return false;
      for (const Term& c : w.children()) {
        if (alpha_equal(u, replace_at(v, p, c))) return true;
        if (below(c)) return true;
      }
      return false;
    };
    if (below(*vp)) return Comparison::StrictlyLess;
    if (!vp->is_abs()) break;
    p.push_back(1);
    vp = &vp->body();
  }
  return alpha_equal(u, v) ? Comparison::Equal : Comparison::Incomparable;
}

Comparison covered_subterm_cmp(const Lambda& u, const Lambda& v) {
  Position p;
  const Lambda* vp = &v;
  while (true) {
    std::function<bool(const Lambda&)> below = [&](const Lambda& w) {
      if (w.is_lam()) return false;
      Spine sp = spine(w);
      if (!sp.head.is_const()) return false;
      for (const Lambda& c : sp.args) {
        if (alpha_equal(u, replace_at(v, p, c))) return true;
        if (below(c)) return true;
      }
      return false;
    };
    if (below(*vp)) return Comparison::StrictlyLess;
    if (!vp->is_lam()) break;
    p.push_back(1);
    vp = &vp->body();
  }
  return alpha_equal(u, v) ? Comparison::Equal : Comparison::Incomparable;
}

namespace {

template <class T>
Comparison status_compare_impl(std::span<const T> us, std::span<const T> ls, Status status) {
  if (status == Status::Lex) {
    if (us.size() != ls.size())
      throw Error(ErrorKind::LengthMismatch, "lexicographic comparison of sequences of lengths " +
                                                 std::to_string(us.size()) + " and " + std::to_string(ls.size()));
    for (std::size_t i = 0; i < us.size(); ++i) {
      if (alpha_equal(us[i], ls[i])) continue;
      return covered_subterm_cmp(us[i], ls[i]) == Comparison::StrictlyLess ? Comparison::StrictlyLess
                                                                          : Comparison::Incomparable;
    }
    return Comparison::Equal;
  }
  std::vector<T> m(us.begin(), us.end()), n(ls.begin(), ls.end());
  for (auto it = m.begin(); it != m.end();) {
    auto jt = std::find_if(n.begin(), n.end(), [&](const T& y) { return alpha_equal(*it, y); });
    if (jt != n.end()) {
      n.erase(jt);
      it = m.erase(it);
    } else {
      ++it;
    }
  }
  if (m.empty() && n.empty()) return Comparison::Equal;
  if (n.empty()) return Comparison::Incomparable;
  for (const T& x : m) {
    bool dominated = std::any_of(n.begin(), n.end(),
                                 [&](const T& y) { return covered_subterm_cmp(x, y) == Comparison::StrictlyLess; });
    if (!dominated) return Comparison::Incomparable;
  }
  return Comparison::StrictlyLess;
}

}  // namespace

Comparison status_compare(std::span<const Term> us, std::span<const Term> ls, Status status) {
  return status_compare_impl(us, ls, status);
}

Comparison status_compare(std::span<const Lambda> us, std::span<const Lambda> ls, Status status) {
  return status_compare_impl(us, ls, status);
}

// Computable closure --------------------------------------------------------

namespace {

Position child_position(const Position& p, int i) {
  Position q = p;
  q.push_back(i);
  return q;
}

std::string seq_str(std::span<const Term> ts) {
  std::string s = "(";
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i) s += ", ";
    s += print_term(ts[i]);
  }
  return s + ")";
}

std::string seq_str(std::span<const Lambda> ts) {
  std::string s = "(";
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i) s += ", ";
    s += print_lambda(ts[i]);
  }
  return s + ")";
}

template <class T>
struct FailureTracker {
  std::vector<std::pair<Position, T>> chain;
  bool recorded = false;
  ClosureResult<T>* result;

  void fail(const std::string& reason) {
    if (recorded) return;
    recorded = true;
    result->failure_position = chain.back().first;
    result->failing_subterm = chain.back().second;
    result->reason = reason;
    result->failure_chain = chain;
  }
};

struct IdtsClosure {
  const std::string& f;
  std::span<const Term> ls;
  const ClosureContext& ctx;
  std::set<std::string> acc;
  FailureTracker<Term> tracker;

  std::optional<Derivation<Term>> args(const Term& t, const Position& pos, int clause, std::string detail) {
    Derivation<Term> d{pos, t, clause, std::move(detail), {}};
    for (std::size_t i = 0; i < t.children().size(); ++i) {
      auto sub = check(t.children()[i], child_position(pos, static_cast<int>(i + 1)));
      if (!sub) return std::nullopt;
      d.premises.push_back(std::move(*sub));
    }
    return d;
  }

  std::optional<Derivation<Term>> check(const Term& t, const Position& pos) {
    tracker.chain.emplace_back(pos, t);
    auto d = check_node(t, pos);
    tracker.chain.pop_back();
    return d;
  }

  std::optional<Derivation<Term>> check_node(const Term& t, const Position& pos) {
    const QuasiOrder& prec = ctx.analysis->symbols;
    switch (t.kind()) {
      case TermKind::Meta:
        if (!acc.count(t.name())) {
          tracker.fail("metavariable " + t.name() + " is not accessible in the left-hand side");
          return std::nullopt;
        }
        return args(t, pos, 1, t.name() + " accessible");
      case TermKind::Var: return Derivation<Term>{pos, t, 2, "", {}};
      case TermKind::Abs: return args(t, pos, 5, "");
      case TermKind::Fun: {
        if (t.is_app()) return args(t, pos, 4, "");
        const std::string& h = t.name();
        if (auto base = ctx.alphabet->constructor_of(h)) return args(t, pos, 3, h + " constructor of " + *base);
        if (prec.less(h, f)) return args(t, pos, 6, h + " <F " + f);
        if (prec.equiv(h, f)) {
          if (t.arity() == 0) {
            tracker.fail(h + " =F " + f + " but has no arguments");
            return std::nullopt;
          }
          auto d = args(t, pos, 7, "");
          if (!d) return std::nullopt;
          Status st = ctx.alphabet->status(f);
          Comparison c;
          try {
            c = status_compare(t.args(), ls, st);
          } catch (const Error&) {
            c = Comparison::Incomparable;
          }
          if (c != Comparison::StrictlyLess) {
            tracker.fail("arguments " + seq_str(t.args()) + " are not strictly smaller than " + seq_str(ls) + " under " +
                         status_name(st));
            return std::nullopt;
          }
          d->detail = h + " =F " + f + ", " + seq_str(t.args()) + " <" + status_name(st) + " " + seq_str(ls);
          return d;
        }
        tracker.fail("symbol " + h + " is not below " + f + " in the precedence");
        return std::nullopt;
      }
    }
    return std::nullopt;
  }
};

}  // namespace

ClosureResult<Term> computable_closure_check(const std::string& f, std::span<const Term> ls, const Term& r,
                                             const ClosureContext& ctx) {
  ClosureResult<Term> res;
  IdtsClosure c{f, ls, ctx, {}, {}};
  c.tracker.result = &res;
  c.acc = ctx.accessible ? *ctx.accessible : accessible_metavars(ls, *ctx.alphabet, *ctx.positivity);
  res.derivation = c.check(r, {});
  res.accepted = res.derivation.has_value();
  return res;
}

bool verify_derivation(const Derivation<Term>& d, const std::string& f, std::span<const Term> ls,
                       const ClosureContext& ctx) {
  std::set<std::string> acc = ctx.accessible ? *ctx.accessible : accessible_metavars(ls, *ctx.alphabet, *ctx.positivity);
  const QuasiOrder& prec = ctx.analysis->symbols;
  std::function<bool(const Derivation<Term>&)> rec = [&](const Derivation<Term>& n) {
    const Term& t = n.term;
    if (n.premises.size() != t.children().size()) return false;
    for (std::size_t i = 0; i < t.children().size(); ++i) {
      if (!alpha_equal(n.premises[i].term, t.children()[i])) return false;
      if (n.premises[i].position != child_position(n.position, static_cast<int>(i + 1))) return false;
      if (!rec(n.premises[i])) return false;
    }
    switch (n.clause) {
      case 1: return t.is_meta() && acc.count(t.name()) > 0;
      case 2: return t.is_var();
      case 3: return t.is_fun() && !t.is_app() && ctx.alphabet->is_constructor(t.name());
      case 4: return t.is_app();
      case 5: return t.is_abs();
      case 6: return t.is_fun() && !t.is_app() && prec.less(t.name(), f);
      case 7: {
        if (!t.is_fun() || t.is_app() || !prec.equiv(t.name(), f) || t.arity() == 0) return false;
        try {
          return status_compare(t.args(), ls, ctx.alphabet->status(f)) == Comparison::StrictlyLess;
        } catch (const Error&) {
          return false;
        }
      }
      default: return false;
    }
  };
  return rec(d);
}

bool is_non_duplicating(const Rule& rule) {
  std::map<std::string, int> count;
  std::function<void(const Term&, int)> rec = [&](const Term& u, int w) {
    if (u.is_meta()) count[u.name()] += w;
    for (const Term& c : u.children()) rec(c, w);
  };
  rec(rule.lhs, -1);
  rec(rule.rhs, 1);
  return std::all_of(count.begin(), count.end(), [](const auto& kv) { return kv.second <= 0; });
}

// Reports -------------------------------------------------------------------

namespace {

template <class T, class P>
Derivation<std::string> stringify(const Derivation<T>& d, P print) {
  Derivation<std::string> out{d.position, print(d.term), d.clause, d.detail, {}};
  for (const auto& p : d.premises) out.premises.push_back(stringify(p, print));
  return out;
}

template <class T, class P>
void fill_rule_report(RuleReport& rep, const ClosureResult<T>& res, P print) {
  rep.accepted = res.accepted;
  if (res.derivation) rep.derivation = stringify(*res.derivation, print);
  if (!res.accepted) {
    rep.failing_subterm = print(res.failing_subterm);
    rep.failure_position = res.failure_position;
    rep.reason = res.reason;
    for (auto& [p, t] : res.failure_chain) rep.failure_chain.emplace_back(p, print(t));
  }
}

RuleReport check_idts_rule(const Rule& r, const ClosureContext& ctx) {
  RuleReport rep;
  rep.rule = r.name;
  rep.lhs = print_term(r.lhs);
  rep.rhs = print_term(r.rhs);
  rep.non_duplicating = is_non_duplicating(r);
  auto res = computable_closure_check(r.lhs.name(), r.lhs.args(), r.rhs, ctx);
  fill_rule_report(rep, res, [](const Term& t) { return print_term(t); });
  return rep;
}

}  // namespace

bool CheckReport::terminating() const {
  if (!assumptions.holds()) return false;
  if (beta && !beta->accepted) return false;
  return std::all_of(rules.begin(), rules.end(), [](const RuleReport& r) { return r.accepted; });
}

CheckReport check_general_schema(const RewriteSystem& system) {
  CheckReport rep;
  PrecedenceAnalysis analysis = compute_precedences(system);
  PositivityReport positivity = check_positivity(system.alphabet);
  rep.assumptions = check_assumptions(system, analysis, positivity);
  rep.constructors = positivity.constructors;
  rep.symbol_classes = analysis.symbols.classes();
  ClosureContext ctx{&system.alphabet, &analysis, &positivity, std::nullopt};
  for (const Rule& r : system.rules) rep.rules.push_back(check_idts_rule(r, ctx));
  if (system.beta_enabled) {
    Type b = Type::base(system.alphabet.base_types.empty() ? "o" : *system.alphabet.base_types.begin());
    rep.beta = check_idts_rule(make_beta_rule(b, b), ctx);
  }
  return rep;
}

// HRS -----------------------------------------------------------------------

namespace {

Alphabet alphabet_with(const HrsSystem& system, const std::map<std::string, std::set<std::string>>& constructors) {
  Alphabet a;
  a.base_types = system.base_types;
  for (auto& [f, t] : system.functions) a.functions[f] = Signature{t.argument_types(), t.target()};
  a.constructors = constructors;
  a.statuses = system.statuses;
  return a;
}

std::string lhs_head(const HrsRule& r) {
  Spine sp = spine(strip_lambdas(r.lhs).second);
  return sp.head.is_const() ? sp.head.name() : "";
}

}  // namespace

std::map<std::string, std::set<std::string>> hrs_constructors(const HrsSystem& system) {
  if (system.constructors_declared) return system.constructors;
  std::set<std::string> heads;
  for (const HrsRule& r : system.rules) heads.insert(lhs_head(r));
  std::map<std::string, std::set<std::string>> cs;
  for (auto& [f, t] : system.functions)
    if (!heads.count(f) && f != kApply) cs[t.target().name()].insert(f);
  while (true) {
    PositivityReport pos = check_positivity(alphabet_with(system, cs));
    bool changed = false;
    for (const ConstructorPositivity& c : pos.constructors)
      if (!c.positive) {
        cs[c.base].erase(c.constructor);
        changed = true;
      }
    if (!changed) break;
  }
  for (auto it = cs.begin(); it != cs.end();) it = it->second.empty() ? cs.erase(it) : std::next(it);
  return cs;
}

Alphabet hrs_alphabet(const HrsSystem& system) { return alphabet_with(system, hrs_constructors(system)); }

namespace {

// Position of argument i (0-based) of an n-argument spine at p.
Position spine_arg_position(const Position& p, std::size_t i, std::size_t n) {
  Position q = p;
  for (std::size_t k = 0; k + 1 < n - i; ++k) q.push_back(1);
  q.push_back(2);
  return q;
}

}  // namespace

std::vector<AccStep> accessible_positions(const Lambda& v, const HrsSystem& system, const PositivityReport& positivity) {
  Alphabet a = hrs_alphabet(system);
  std::vector<AccStep> out;
  std::set<Position> seen;
  std::deque<Position> queue;
  auto add = [&](Position p, int clause) {
    if (seen.insert(p).second) {
      out.push_back({p, clause});
      queue.push_back(std::move(p));
    }
  };
  add({}, 1);
  auto fv_v = free_vars(v);
  while (!queue.empty()) {
    Position p = queue.front();
    queue.pop_front();
    const Lambda& t = subterm_at(v, p);
    if (t.is_lam()) {
      add(child_position(p, 1), 2);
      continue;
    }
    if (!t.type().is_base()) continue;
    Spine sp = spine(t);
    std::size_t n = sp.args.size();
    if (n == 0) continue;
    if (sp.head.is_const()) {
      bool constructor = a.is_constructor(sp.head.name());
      for (std::size_t i = 0; i < n; ++i) {
        if (constructor) add(spine_arg_position(p, i, n), 3);
        if (positivity.is_basic(sp.args[i].type())) add(spine_arg_position(p, i, n), 4);
      }
    } else if (sp.head.is_var()) {
      const std::string& x = sp.head.name();
      bool fresh = !fv_v.count(x);
      for (const Lambda& u : sp.args)
        if (free_vars(u).count(x)) fresh = false;
      if (fresh)
        for (std::size_t i = 0; i < n; ++i) add(spine_arg_position(p, i, n), 5);
    }
  }
  return out;
}

namespace {

struct HrsClosure {
  std::string f;
  std::vector<Lambda> ls;
  const Alphabet& alphabet;
  const QuasiOrder& prec;
  Status status;
  std::set<std::string> metas;  // Z: free variables of the left-hand side
  std::set<std::string> acc;
  FailureTracker<Lambda> tracker;

  std::optional<Derivation<Lambda>> check(const Lambda& t, const Position& pos) {
    tracker.chain.emplace_back(pos, t);
    auto d = check_node(t, pos);
    tracker.chain.pop_back();
    return d;
  }

  std::optional<Derivation<Lambda>> spine_args(const Lambda& t, const Position& pos, int clause, std::string detail) {
    Derivation<Lambda> d{pos, t, clause, std::move(detail), {}};
    Spine sp = spine(t);
    for (std::size_t i = 0; i < sp.args.size(); ++i) {
      auto sub = check(sp.args[i], spine_arg_position(pos, i, sp.args.size()));
      if (!sub) return std::nullopt;
      d.premises.push_back(std::move(*sub));
    }
    return d;
  }

  std::optional<Derivation<Lambda>> check_node(const Lambda& t, const Position& pos) {
    if (t.is_lam()) {
      auto sub = check(t.body(), child_position(pos, 1));
      if (!sub) return std::nullopt;
      return Derivation<Lambda>{pos, t, 4, "", {std::move(*sub)}};
    }
    Spine sp = spine(t);
    if (sp.head.is_var()) {
      const std::string& x = sp.head.name();
      if (metas.count(x)) {
        if (!acc.count(x)) {
          tracker.fail("variable " + x + " is not accessible in the left-hand side");
          return std::nullopt;
        }
        return spine_args(t, pos, 1, x + " accessible");
      }
      return spine_args(t, pos, 2, "");
    }
    if (!sp.head.is_const()) {
      tracker.fail("term is not in β-normal form");
      return std::nullopt;
    }
    const std::string& h = sp.head.name();
    if (auto base = alphabet.constructor_of(h)) return spine_args(t, pos, 3, h + " constructor of " + *base);
    if (prec.less(h, f)) return spine_args(t, pos, 5, h + " <F " + f);
    if (prec.equiv(h, f)) {
      if (sp.args.empty()) {
        tracker.fail(h + " =F " + f + " but has no arguments");
        return std::nullopt;
      }
      auto d = spine_args(t, pos, 6, "");
      if (!d) return std::nullopt;
      Comparison c;
      try {
        c = status_compare(std::span<const Lambda>(sp.args), std::span<const Lambda>(ls), status);
      } catch (const Error&) {
        c = Comparison::Incomparable;
      }
      if (c != Comparison::StrictlyLess) {
        tracker.fail("arguments " + seq_str(sp.args) + " are not strictly smaller than " + seq_str(ls) + " under " +
                     status_name(status));
        return std::nullopt;
      }
      d->detail = h + " =F " + f + ", " + seq_str(sp.args) + " <" + status_name(status) + " " + seq_str(ls);
      return d;
    }
    tracker.fail("symbol " + h + " is not below " + f + " in the precedence");
    return std::nullopt;
  }
};

QuasiOrder hrs_symbol_precedence(const HrsSystem& system) {
  std::set<std::string> nodes;
  for (auto& [f, t] : system.functions) nodes.insert(f);
  std::set<std::pair<std::string, std::string>> edges;
  for (const HrsRule& r : system.rules)
    for (const std::string& c : constants(r.rhs)) edges.emplace(c, lhs_head(r));
  return QuasiOrder(nodes, edges);
}

ClosureResult<Lambda> closure_hrs(const HrsSystem& system, const HrsRule& rule, const Alphabet& alphabet,
                                  const QuasiOrder& prec, const PositivityReport& positivity) {
  ClosureResult<Lambda> res;
  Spine lsp = spine(strip_lambdas(rule.lhs).second);
  HrsClosure c{lhs_head(rule), lsp.args, alphabet, prec, system.status(lhs_head(rule)), free_vars(rule.lhs), {}, {}};
  c.tracker.result = &res;
  for (const Lambda& l : c.ls) {
    auto fv = free_vars(l);
    for (const AccStep& s : accessible_positions(l, system, positivity)) {
      const Lambda& t = subterm_at(l, s.position);
      if (t.is_lam()) continue;
      Spine sp = spine(t);
      if (!sp.head.is_var() || !fv.count(sp.head.name())) continue;
      std::set<std::string> above, seen;
      for (auto& [x, ty] : binders_above(l, s.position)) above.insert(x);
      bool ok = true;
      for (const Lambda& a : sp.args) {
        auto x = eta_variable(a);
        if (!x || !above.count(*x) || !seen.insert(*x).second) ok = false;
      }
      if (ok) c.acc.insert(sp.head.name());
    }
  }
  res.derivation = c.check(rule.rhs, {});
  res.accepted = res.derivation.has_value();
  return res;
}

}  // namespace

ClosureResult<Lambda> computable_closure_check_hrs(const HrsSystem& system, const HrsRule& rule) {
  validate_hrs_rule(rule, system);
  Alphabet a = hrs_alphabet(system);
  return closure_hrs(system, rule, a, hrs_symbol_precedence(system), check_positivity(a));
}

CheckReport check_general_schema_hrs(const HrsSystem& system) {
  for (const HrsRule& r : system.rules) validate_hrs_rule(r, system);
  CheckReport rep;
  rep.hrs = true;
  Alphabet a = hrs_alphabet(system);
  PositivityReport positivity = check_positivity(a);
  QuasiOrder prec = hrs_symbol_precedence(system);
  rep.constructors = positivity.constructors;
  rep.symbol_classes = prec.classes();
  for (const ConstructorPositivity& c : positivity.constructors)
    if (!c.positive)
      rep.assumptions.violations.push_back({1, "constructor " + c.constructor + " of " + c.base + " is not positive"});
  for (const HrsRule& r : system.rules)
    if (a.is_constructor(lhs_head(r)))
      rep.assumptions.violations.push_back(
          {2, "left-hand side of rule " + r.name + " is headed by the constructor " + lhs_head(r)});
  rep.assumptions.notes.push_back("(3) holds: the signature and the set of base types are finite");
  for (const auto& cls : prec.classes()) {
    std::set<Status> seen;
    for (const std::string& f : cls) seen.insert(system.status(f));
    if (seen.size() > 1) {
      std::string names;
      for (const std::string& f : cls) names += (names.empty() ? "" : ", ") + f;
      rep.assumptions.violations.push_back({4, "equivalent symbols {" + names + "} have different statuses"});
    }
  }
  for (const HrsRule& r : system.rules) {
    RuleReport rr;
    rr.rule = r.name;
    rr.lhs = print_lambda(r.lhs);
    rr.rhs = print_lambda(r.rhs);
    std::map<std::string, int> count;
    std::function<void(const Lambda&, int)> occ = [&](const Lambda& u, int w) {
      if (u.is_var()) count[u.name()] += w;
      for (const Lambda& c : u.children()) occ(c, w);
    };
    occ(r.lhs, -1);
    occ(r.rhs, 1);
    auto fv = free_vars(r.lhs);
    for (auto& [x, n] : count)
      if (fv.count(x) && n > 0) rr.non_duplicating = false;
    auto res = closure_hrs(system, r, a, prec, positivity);
    fill_rule_report(rr, res, [](const Lambda& t) { return print_lambda(t); });
    rep.rules.push_back(std::move(rr));
  }
  return rep;
}

// Formatting ----------------------------------------------------------------

namespace {

void format_derivation(const Derivation<std::string>& d, int depth, std::ostringstream& out) {
  out << std::string(2 * depth + 4, ' ') << "(" << d.clause << ") " << d.term;
  if (!d.detail.empty()) out << "    [" << d.detail << "]";
  out << "\n";
  for (const auto& p : d.premises) format_derivation(p, depth + 1, out);
}

void format_rule(const RuleReport& r, std::ostringstream& out) {
  out << "rule " << r.rule << ": " << (r.accepted ? "accepted" : "rejected") << "\n";
  out << "  " << r.lhs << " -> " << r.rhs << "\n";
  if (r.accepted && r.derivation) {
    out << "  derivation:\n";
    format_derivation(*r.derivation, 0, out);
  } else if (!r.accepted) {
    out << "  failing subterm " << r.failing_subterm << " at " << position_str(r.failure_position) << ": " << r.reason
        << "\n";
    if (r.failure_chain.size() > 1) {
      out << "  enclosing subterms:\n";
      for (std::size_t i = 0; i + 1 < r.failure_chain.size(); ++i)
        out << "    " << r.failure_chain[i].second << " at " << position_str(r.failure_chain[i].first) << "\n";
    }
  }
  if (!r.non_duplicating) out << "  note: duplicating (a metavariable occurs more often on the right)\n";
}

nlohmann::json derivation_json(const Derivation<std::string>& d) {
  nlohmann::json j = {{"position", position_str(d.position)}, {"term", d.term}, {"clause", d.clause}};
  if (!d.detail.empty()) j["detail"] = d.detail;
  j["premises"] = nlohmann::json::array();
  for (const auto& p : d.premises) j["premises"].push_back(derivation_json(p));
  return j;
}

nlohmann::json rule_json(const RuleReport& r, const char* kind) {
  nlohmann::json j = {{"record", kind},    {"rule", r.rule},         {"lhs", r.lhs},
                      {"rhs", r.rhs},      {"accepted", r.accepted}, {"non_duplicating", r.non_duplicating}};
  if (r.derivation) j["derivation"] = derivation_json(*r.derivation);
  if (!r.accepted) {
    j["failing_subterm"] = r.failing_subterm;
    j["failure_position"] = position_str(r.failure_position);
    j["reason"] = r.reason;
    nlohmann::json chain = nlohmann::json::array();
    for (auto& [p, t] : r.failure_chain) chain.push_back({{"position", position_str(p)}, {"term", t}});
    j["failure_chain"] = chain;
  }
  return j;
}

}  // namespace

std::string format_report(const CheckReport& report) {
  std::ostringstream out;
  out << "termination: " << (report.terminating() ? "accepted" : "rejected") << " ("
      << (report.hrs ? "General Schema for HRSs" : "General Schema") << ")\n";
  if (report.assumptions.holds()) out << "assumptions (A): hold\n";
  else
    for (const auto& v : report.assumptions.violations) out << "assumption (" << v.assumption << ") violated: " << v.detail << "\n";
  for (const std::string& n : report.assumptions.notes) out << "  " << n << "\n";
  for (const ConstructorPositivity& c : report.constructors)
    out << "constructor " << c.constructor << " of " << c.base << ": " << (c.positive ? "positive" : "not positive")
        << (c.basic ? ", basic" : "") << "\n";
  for (const RuleReport& r : report.rules) format_rule(r, out);
  if (report.beta) {
    out << "β ";
    format_rule(*report.beta, out);
  }
  return out.str();
}

std::string report_json(const CheckReport& report) {
  std::string out;
  nlohmann::json a = {{"record", "assumptions"}, {"holds", report.assumptions.holds()}};
  a["violations"] = nlohmann::json::array();
  for (const auto& v : report.assumptions.violations)
    a["violations"].push_back({{"assumption", v.assumption}, {"detail", v.detail}});
  a["notes"] = report.assumptions.notes;
  out += a.dump() + "\n";
  for (const ConstructorPositivity& c : report.constructors)
    out += nlohmann::json({{"record", "constructor"},
                           {"constructor", c.constructor},
                           {"base", c.base},
                           {"positive", c.positive},
                           {"basic", c.basic}})
               .dump() +
           "\n";
  for (const RuleReport& r : report.rules) out += rule_json(r, "rule").dump() + "\n";
  if (report.beta) out += rule_json(*report.beta, "beta").dump() + "\n";
  out += nlohmann::json({{"record", "verdict"},
                         {"check", report.hrs ? "GS'" : "GS"},
                         {"terminating", report.terminating()}})
             .dump() +
         "\n";
  return out;
}

}  // namespace idts
