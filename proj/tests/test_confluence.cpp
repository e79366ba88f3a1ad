#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "criteria.hpp"
#include "doctest.h"
#include "idts/confluence.hpp"
#include "idts/syntax.hpp"
#include "idts/translate.hpp"

using namespace idts;

namespace {

Type o() { return Type::base("o"); }

Alphabet alphabet() {
  Alphabet a;
  a.base_types = {"o"};
  a.functions = {{"c", {{o(), o()}, o()}}, {"e", {{o()}, o()}}, {"d", {{}, o()}}, {"k", {{Type::arrow(o(), Type::arrow(o(), o()))}, o()}}};
  return a;
}

Term t(const std::string& s, const TypeEnv& env = {}) { return parse_term(s, alphabet(), env, o()); }

UnifyFailure failure(const UnifyResult& r) {
  REQUIRE_FALSE(unified(r));
  return std::get<UnifyError>(r).kind;
}

RewriteSystem corpus(const std::string& f) { return load_system(crit::corpus(f)).idts; }

}  // namespace

TEST_CASE("pattern unification examples") {
  TypeEnv x = {{"x", o()}};
  UnifyResult r = pattern_unify(t("c(Z, x)", x), t("c(d, x)", x), {"x"});
  REQUIRE(unified(r));
  const Valuation& tau = std::get<Valuation>(r);
  CHECK(tau.size() == 1);
  CHECK(print_term(tau.at("Z").body) == "d");

  Term z = Term::meta("Z", {}, o());
  CHECK(failure(pattern_unify(z, Term::fun("e", {z}, o()))) == UnifyFailure::OccursCheck);
  CHECK(failure(pattern_unify(t("e(d)"), t("c(d, d)"))) == UnifyFailure::Clash);
  CHECK(failure(pattern_unify(z, Term::var("x", o()), {"x"})) == UnifyFailure::ScopeViolation);
  CHECK(failure(pattern_unify(Term::meta("Z", {t("d")}, o()), t("d"))) == UnifyFailure::NotAPattern);

  // Free variables that are not frozen are global constants.
  UnifyResult g = pattern_unify(z, Term::var("y", o()));
  REQUIRE(unified(g));
  CHECK(print_term(std::get<Valuation>(g).at("Z").body) == "y");
}

TEST_CASE("flex-flex with different heads") {
  Term u = t("k([x][y]Z(x, y))");
  Term v = t("k([x][y]Z'(y))");
  UnifyResult r = pattern_unify(u, v);
  REQUIRE(unified(r));
  const Valuation& tau = std::get<Valuation>(r);
  CHECK(alpha_equal(apply_valuation(u, tau), apply_valuation(v, tau)));
  const Substitute& sz = tau.at("Z");
  const Substitute& sz2 = tau.at("Z'");
  REQUIRE(sz.arity() == 2);
  REQUIRE(sz2.arity() == 1);
  REQUIRE(sz.body.is_meta());
  CHECK(sz.body.name() == sz2.body.name());
  REQUIRE(sz.body.arity() == 1);
  CHECK(sz.body.arg(0).name() == sz.params[1].first);
  CHECK(sz2.body.arg(0).name() == sz2.params[0].first);

  UnifyResult same = pattern_unify(t("k([x][y]Z(x, y))"), t("k([x][y]Z(y, x))"));
  REQUIRE(unified(same));
  CHECK(std::get<Valuation>(same).at("Z").body.arity() == 0);
}

TEST_CASE("critical pairs of the fixtures") {
  auto nj = critical_pairs(corpus("cp-nonjoinable.idts"));
  REQUIRE(nj.size() == 1);
  CHECK(nj[0].position.empty());
  CHECK(print_term(nj[0].left) == "b");
  CHECK(print_term(nj[0].right) == "c");

  auto ov = critical_pairs(corpus("cp-overlap.idts"));
  REQUIRE(ov.size() == 1);
  CHECK(ov[0].rule1 == "fg");
  CHECK(ov[0].rule2 == "ga");
  CHECK(ov[0].position == Position{1});
  CHECK(print_term(ov[0].unifier.at("Z").body) == "a");
  CHECK(print_term(ov[0].peak) == "f(g(a))");
  CHECK(print_term(ov[0].left) == "f(a)");
  CHECK(print_term(ov[0].right) == "h(a)");

  RewriteSystem d = beta_extend(corpus("d-rule.idts"));
  CHECK(critical_pairs(d).empty());
  CHECK(check_local_confluence(d).locally_confluent());

  CHECK(critical_pairs(beta_extend(corpus("klop.idts"))).empty());

  auto ho = critical_pairs(corpus("ho-overlap.idts"));
  REQUIRE(ho.size() == 1);
  CHECK(ho[0].position == Position{1, 1});
  REQUIRE(ho[0].frozen.size() == 1);
  CHECK(ho[0].frozen[0].first == "x");
  CHECK(codomain_free_vars(ho[0].unifier).count("x") == 0);

  auto ok = critical_pairs(beta_extend(corpus("okada.idts")));
  REQUIRE(ok.size() == 1);
  CHECK(ok[0].rule2 == kBetaRule);
  CHECK(ok[0].position == Position{1});
}

TEST_CASE("local confluence verdicts") {
  ConfluenceReport nj = check_local_confluence(corpus("cp-nonjoinable.idts"));
  CHECK_FALSE(nj.locally_confluent());
  CHECK_FALSE(nj.unknown());
  CHECK(nj.pairs.at(0).verdict == Joinability::NotJoined);
  CHECK(format_confluence(nj).find("witness: <b, c>") != std::string::npos);

  ConfluenceReport j = check_local_confluence(corpus("cp-joinable.idts"));
  CHECK(j.locally_confluent());
  REQUIRE(j.pairs.size() == 1);
  CHECK(j.pairs[0].verdict == Joinability::Joined);
  CHECK(print_term(*j.pairs[0].common) == "h(a)");

  ConfluenceReport ov = check_local_confluence(corpus("cp-overlap.idts"));
  CHECK_FALSE(ov.locally_confluent());

  HrsSystem h = load_system(crit::corpus("map.hrs")).hrs;
  CHECK(check_local_confluence(hrs_to_idts(h)).locally_confluent());

  std::string js = confluence_json(j);
  CHECK(js.find("\"record\":\"critical_pair\"") != std::string::npos);
  CHECK(js.find("\"locally_confluent\":true") != std::string::npos);
}

TEST_CASE("joining under a budget") {
  RewriteSystem ok = beta_extend(corpus("okada.idts"));
  TypeEnv y = {{"y", o()}};
  Term u = parse_term("f(@([x]x, y), y)", ok.alphabet, y);
  Term v = parse_term("f(@([x]x, y), @([x]x, y))", ok.alphabet, y);
  JoinResult r = join(ok, u, v, 50);
  CHECK(r.verdict == Joinability::Joined);
  RewriteSystem nj = corpus("cp-nonjoinable.idts");
  CHECK(join(nj, parse_term("b", nj.alphabet), parse_term("c", nj.alphabet), 50).verdict == Joinability::NotJoined);
}

TEST_CASE("critical pairs correspond across translations") {
  for (const char* f : {"cp-joinable.idts", "cp-overlap.idts", "cp-nonjoinable.idts", "ho-overlap.idts", "klop.idts"}) {
    CAPTURE(f);
    RewriteSystem s = corpus(f);
    s.beta_enabled = false;
    std::size_t n = critical_pairs(s).size();
    RewriteSystem via_single = hrs_to_idts(idts_to_hrs_single_sorted(s));
    RewriteSystem via_base = hrs_to_idts(idts_to_hrs_basetype(s));
    CHECK(critical_pairs(via_single).size() == n);
    CHECK(critical_pairs(via_base).size() == n);
  }
}

TEST_CASE("properties on a small sample") {
  for (auto o : {crit::cp_oracle(101, 50), crit::local_confluence(102, 20), crit::unifier_oracle(103, 100),
                 crit::unifier_soundness(104, 100), crit::critical_pair_conditions(105, 50)}) {
    INFO(o.summary());
    CHECK(o.ok());
  }
}
