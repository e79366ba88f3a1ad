#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>

#include "criteria.hpp"
#include "doctest.h"
#include "generators.hpp"
#include "idts/schema.hpp"
#include "idts/syntax.hpp"
#include "idts/translate.hpp"

using namespace idts;

namespace {

RewriteSystem sys(const std::string& text) { return parse_system(text).idts; }

const ConstructorPositivity* find(const PositivityReport& r, const std::string& c) {
  for (const auto& p : r.constructors)
    if (p.constructor == c) return &p;
  return nullptr;
}

bool has_violation(const AssumptionsReport& r, int which) {
  return std::any_of(r.violations.begin(), r.violations.end(),
                     [&](const AssumptionViolation& v) { return v.assumption == which; });
}

const char* kOrd = R"(TYPES nat ord
CONSTRUCTORS
  nat : 0 s
  ord : zero lim
FUNCTIONS
  0 : nat
  s : (nat) -> nat
  zero : ord
  lim : (nat -> ord) -> ord
)";

}  // namespace

TEST_CASE("precedences") {
  RewriteSystem d = load_system(crit::corpus("d-rule.idts")).idts;
  PrecedenceAnalysis an = compute_precedences(d);
  CHECK(an.symbols.equiv("D", "D"));
  CHECK(an.symbols.less("times", "D"));
  CHECK(an.symbols.less("cos", "D"));
  CHECK_FALSE(an.symbols.leq("D", "times"));

  RewriteSystem o = sys(kOrd);
  QuasiOrder types = type_precedence(o.alphabet);
  CHECK(types.equiv("nat", "nat"));
  CHECK(types.less("nat", "ord"));
  CHECK_FALSE(types.leq("ord", "nat"));
  for (const auto& cls : types.classes()) CHECK(cls.size() == 1);
}

TEST_CASE("positivity") {
  PositivityReport p = check_positivity(sys(kOrd).alphabet);
  REQUIRE(find(p, "s"));
  CHECK(find(p, "s")->positive);
  CHECK(find(p, "s")->basic);
  REQUIRE(find(p, "lim"));
  CHECK(find(p, "lim")->positive);
  CHECK_FALSE(find(p, "lim")->basic);
  CHECK(p.basic_types.at("nat"));
  CHECK_FALSE(p.basic_types.at("ord"));

  RewriteSystem np = load_system(crit::corpus("nonpositive.idts")).idts;
  PositivityReport q = check_positivity(np.alphabet);
  REQUIRE(find(q, "lam"));
  CHECK_FALSE(find(q, "lam")->positive);
  AssumptionsReport a = check_assumptions(np);
  CHECK(has_violation(a, 1));
}

TEST_CASE("assumptions") {
  RewriteSystem d = beta_extend(load_system(crit::corpus("d-rule.idts")).idts);
  AssumptionsReport a = check_assumptions(d);
  CHECK(a.holds());
  CHECK_FALSE(a.notes.empty());

  RewriteSystem c = sys("TYPES nat\nCONSTRUCTORS nat : 0 s\nFUNCTIONS\n  0 : nat\n  s : (nat) -> nat\nRULES\n  r : s(Z) -> Z\n");
  CHECK(has_violation(check_assumptions(c), 2));

  RewriteSystem st = sys(R"(TYPES o
FUNCTIONS
  f g : (o, o) -> o
  a : o
RULES
  fg : f(X, Y) -> g(X, Y)
  gf : g(X, Y) -> f(Y, X)
STATUS
  f : lex
  g : mul
)");
  CHECK(has_violation(check_assumptions(st), 4));
  CHECK_FALSE(check_general_schema(st).terminating());
}

TEST_CASE("accessibility") {
  RewriteSystem d = load_system(crit::corpus("d-rule.idts")).idts;
  const Alphabet& A = d.alphabet;
  Term v = parse_term("[x:real]sin(F(x))", A);
  Term fx = v.body().arg(0);
  auto chain = accessible(fx, v, A);
  REQUIRE(chain);
  REQUIRE(chain->size() == 3);
  CHECK((*chain)[1].clause == 2);
  CHECK((*chain)[2].clause == 3);
  std::vector<Term> ls = {v};
  CHECK(accessible_metavars(ls, A).count("F"));

  Alphabet B;
  B.base_types = {"o"};
  B.functions = {{"f", {{Type::base("o"), Type::base("o")}, Type::base("o")}}};
  Term beta = make_beta_rule(Type::base("o"), Type::base("o")).lhs;
  std::vector<Term> bl(beta.args().begin(), beta.args().end());
  CHECK(accessible_metavars(bl, B) == std::set<std::string>{"Z", "Z'"});

  RewriteSystem ok = load_system(crit::corpus("okada.idts")).idts;
  const Term& l = ok.rules[0].lhs;
  std::vector<Term> ol(l.args().begin(), l.args().end());
  CHECK(accessible_metavars(ol, ok.alphabet) == std::set<std::string>{"Z'"});
}

TEST_CASE("covered subterms and statuses") {
  RewriteSystem d = load_system(crit::corpus("d-rule.idts")).idts;
  const Alphabet& A = d.alphabet;
  Term big = parse_term("[x:real]sin(F(x))", A);
  Term small = parse_term("[y:real]F(y)", A, {}, Type::arrow(Type::base("real"), Type::base("real")));
  CHECK(covered_subterm_cmp(small, big) == Comparison::StrictlyLess);
  CHECK(covered_subterm_cmp(big, big) == Comparison::Equal);
  CHECK(covered_subterm_cmp(big, small) == Comparison::Incomparable);
  Term cz = parse_term("sin(Z)", A), fcz = parse_term("cos(sin(Z))", A);
  CHECK(covered_subterm_cmp(cz, fcz) == Comparison::StrictlyLess);
  // A function symbol may not sit above the abstraction part of p.
  Term under = parse_term("sin(D([x:real]x, a))", parse_system("TYPES real\nFUNCTIONS\n  sin : (real) -> real\n  a : real\n  D : (real -> real, real) -> real\n").idts.alphabet);
  CHECK(covered_subterm_cmp(under.arg(0).arg(0).body(), under) == Comparison::Incomparable);

  std::vector<Term> us = {small}, ls = {big};
  CHECK(status_compare(us, ls, Status::Lex) == Comparison::StrictlyLess);
  std::vector<Term> ab = {parse_term("sin(Z)", A), parse_term("cos(Z)", A)};
  CHECK(status_compare(ab, ab, Status::Lex) == Comparison::Equal);
  std::vector<Term> m1 = {cz}, m2 = {fcz};
  CHECK(status_compare(m1, m2, Status::Mul) == Comparison::StrictlyLess);
  CHECK(status_compare(m2, m1, Status::Mul) == Comparison::Incomparable);
  try {
    status_compare(m1, ab, Status::Lex);
    FAIL("expected LengthMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::LengthMismatch);
  }
}

TEST_CASE("general schema fixtures") {
  crit::Outcome o = crit::gs_fixtures();
  INFO(o.summary());
  CHECK(o.ok());
  RewriteSystem empty = sys("TYPES o\nFUNCTIONS a : o\n");
  CHECK(check_general_schema(empty).terminating());
  CheckReport rep = check_general_schema(beta_extend(load_system(crit::corpus("okada.idts")).idts));
  CHECK(format_report(rep).find("failing subterm Z at 1.1") != std::string::npos);
}

TEST_CASE("non-duplication") {
  Alphabet A;
  Type o = Type::base("o");
  A.base_types = {"o"};
  A.functions = {{"f", {{o, o}, o}}, {"g", {{o}, o}}, {"h", {{o}, o}}, {"k", {{o, o}, o}}};
  CHECK(is_non_duplicating({"r", parse_term("f(Z, Z')", A), parse_term("g(Z)", A)}));
  CHECK_FALSE(is_non_duplicating({"r", parse_term("h(Z)", A), parse_term("k(Z, Z)", A)}));
  RewriteSystem ok = load_system(crit::corpus("okada.idts")).idts;
  CHECK_FALSE(is_non_duplicating(ok.rules[0]));
}

TEST_CASE("general schema for HRSs") {
  HrsSystem d = load_system(crit::corpus("d-rule.hrs")).hrs;
  CheckReport rep = check_general_schema_hrs(d);
  CHECK(rep.hrs);
  CHECK(rep.terminating());
  REQUIRE(rep.rules.size() == 1);
  CHECK(rep.rules[0].accepted);
  auto cons = hrs_constructors(d);
  CHECK(cons["real"] == std::set<std::string>{"cos", "sin", "times"});
  crit::Outcome o = crit::gs_prime_lemma();
  INFO(o.summary());
  CHECK(o.ok());

  HrsSystem m = load_system(crit::corpus("map.hrs")).hrs;
  CHECK(check_general_schema_hrs(m).terminating());
}

TEST_CASE("derivations replay") {
  for (const char* file : {"d-rule.idts", "recursor.idts", "ho-overlap.idts", "cp-joinable.idts"}) {
    CAPTURE(file);
    RewriteSystem s = load_system(crit::corpus(file)).idts;
    PrecedenceAnalysis an = compute_precedences(s);
    PositivityReport pos = check_positivity(s.alphabet);
    ClosureContext ctx{&s.alphabet, &an, &pos, std::nullopt};
    for (const Rule& r : s.rules) {
      auto res = computable_closure_check(r.lhs.name(), r.lhs.args(), r.rhs, ctx);
      if (res.accepted) CHECK(verify_derivation(*res.derivation, r.lhs.name(), r.lhs.args(), ctx));
    }
  }
}

TEST_CASE("the closure is monotone in the accessible metavariables") {
  gen::Rng rng(31);
  Alphabet alpha = gen::sample_alphabet();
  int accepted = 0;
  for (int i = 0; i < 500; ++i) {
    RewriteSystem s;
    s.alphabet = alpha;
    s.rules.push_back(gen::random_rule(alpha, rng, 3, "r"));
    try {
      validate_system(s);
    } catch (const Error&) {
      continue;
    }
    const Rule& r = s.rules[0];
    PrecedenceAnalysis an = compute_precedences(s);
    PositivityReport pos = check_positivity(alpha);
    ClosureContext ctx{&alpha, &an, &pos, std::nullopt};
    auto base = computable_closure_check(r.lhs.name(), r.lhs.args(), r.rhs, ctx);
    if (!base.accepted) continue;
    ++accepted;
    ClosureContext wide = ctx;
    wide.accessible = meta_vars(r.lhs);
    CHECK(computable_closure_check(r.lhs.name(), r.lhs.args(), r.rhs, wide).accepted);
  }
  CHECK(accepted > 20);
}

TEST_CASE("covered subterms commute with rewriting") {
  // u ◁̂ v and u -> u' give v -> v' with u' ◁̂ v'.
  gen::Rng rng(32);
  Alphabet alpha = gen::sample_alphabet();
  int cases = 0;
  for (int i = 0; i < 3000 && cases < 300; ++i) {
    RewriteSystem s;
    s.alphabet = alpha;
    s.beta_enabled = true;
    s.rules.push_back(gen::random_rule(alpha, rng, 2, "r"));
    try {
      validate_system(s);
    } catch (const Error&) {
      continue;
    }
    gen::TermGen tg{alpha, rng};
    Term v = tg.term(gen::o(), 4);
    if (!v.is_fun() || v.arity() == 0) continue;
    Term u = v.arg(rng.below(static_cast<int>(v.arity())));
    if (!(u.type() == v.type())) continue;
    for (const Reduct& ru : rewrite_step(s, u)) {
      ++cases;
      auto vs = rewrite_step(s, v);
      bool found = std::any_of(vs.begin(), vs.end(), [&](const Reduct& rv) {
        return covered_subterm_cmp(ru.term, rv.term) == Comparison::StrictlyLess;
      });
      CHECK_MESSAGE(found, std::string(print_term(u) + " in " + print_term(v)));
    }
  }
  CHECK(cases > 50);
}

TEST_CASE("machine report") {
  CheckReport rep = check_general_schema(load_system(crit::corpus("d-rule.idts")).idts);
  std::string j = report_json(rep);
  CHECK(j.find("\"record\":\"verdict\"") != std::string::npos);
  CHECK(j.find("\"terminating\":true") != std::string::npos);
}
