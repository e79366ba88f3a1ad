#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "criteria.hpp"
#include "doctest.h"
#include "idts/syntax.hpp"
#include "idts/translate.hpp"

using namespace idts;

namespace {

RewriteSystem d_system() { return load_system(crit::corpus("d-rule.idts")).idts; }

Alphabet small_alphabet() {
  Type o = Type::base("o");
  Alphabet a;
  a.base_types = {"o"};
  a.functions = {{"f", {{o, o}, o}}, {"g", {{Type::arrow(o, Type::arrow(o, o))}, o}}, {"c", {{o}, o}},
                 {"a", {{}, o}},     {"b", {{}, o}}};
  return a;
}

}  // namespace

TEST_CASE("CRS matching") {
  RewriteSystem d = d_system();
  const Alphabet& A = d.alphabet;
  MatchResult m = match(d.rules[0].lhs, parse_term("D([x]sin(x))", A));
  REQUIRE(matched(m));
  const Valuation& s = std::get<Valuation>(m);
  CHECK(alpha_equal(s.at("F"), Substitute{{{"x", Type::base("real")}}, Term::var("x", Type::base("real"))}));

  Alphabet B = small_alphabet();
  Term beta = make_beta_rule(Type::base("o"), Type::base("o")).lhs;
  MatchResult mb = match(beta, parse_term("@([x:o]c(x), a)", B));
  REQUIRE(matched(mb));
  const Valuation& sb = std::get<Valuation>(mb);
  CHECK(print_term(sb.at("Z").body) == "c(" + sb.at("Z").params[0].first + ")");
  CHECK(print_term(sb.at("Z'").body) == "a");

  MatchResult rep = match(parse_term("f(Z, Z)", B), parse_term("f(a, b)", B));
  REQUIRE_FALSE(matched(rep));
  CHECK(std::get<MatchError>(rep).kind == MatchFailure::InconsistentRepeatedMetavariable);

  MatchResult scope = match(parse_term("g([x][y]Z(x))", B), parse_term("g([x][y]f(x, y))", B));
  REQUIRE_FALSE(matched(scope));
  CHECK(std::get<MatchError>(scope).kind == MatchFailure::ScopeViolation);

  MatchResult clash = match(parse_term("f(a, Z)", B), parse_term("f(b, a)", B));
  REQUIRE_FALSE(matched(clash));
  CHECK(std::get<MatchError>(clash).kind == MatchFailure::NoMatch);
  CHECK(std::get<MatchError>(clash).position == Position{1});

  // Free variables of the subject are constants.
  TypeEnv env = {{"y", Type::base("o")}};
  MatchResult fv = match(parse_term("f(Z, Z)", B), parse_term("f(y, y)", B, env));
  REQUIRE(matched(fv));
  CHECK(print_term(std::get<Valuation>(fv).at("Z").body) == "y");
}

TEST_CASE("rewrite_step") {
  RewriteSystem d = beta_extend(d_system());
  auto rs = rewrite_step(d, parse_term("D([x]sin(x))", d.alphabet));
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].rule == "D");
  CHECK(rs[0].position.empty());
  CHECK(rs[0].term == parse_term("[x] times(@(D([y]y), x), cos(x))", d.alphabet));

  RewriteSystem b;
  b.alphabet = small_alphabet();
  b.beta_enabled = true;
  auto br = rewrite_step(b, parse_term("@([x:o]c(x), a)", b.alphabet));
  REQUIRE(br.size() == 1);
  CHECK(br[0].rule == kBetaRule);
  CHECK(br[0].term == parse_term("c(a)", b.alphabet));
  CHECK(rewrite_step(b, parse_term("c(a)", b.alphabet)).empty());
}

TEST_CASE("reducts come in pre-order with beta last") {
  RewriteSystem s;
  s.alphabet = small_alphabet();
  s.beta_enabled = true;
  Term l = parse_term("c(Z)", s.alphabet);
  s.rules.push_back({"strip", l, parse_term("Z", s.alphabet, {}, Type::base("o"))});
  auto rs = rewrite_step(s, parse_term("c(@([x:o]c(x), a))", s.alphabet));
  REQUIRE(rs.size() == 3);
  CHECK(rs[0].position.empty());
  CHECK(rs[1].position == Position{1});
  CHECK(rs[1].rule == kBetaRule);
  CHECK(rs[2].position == Position{1, 1, 1});
}

TEST_CASE("rule validation") {
  Alphabet B = small_alphabet();
  Type o = Type::base("o");
  CHECK_NOTHROW(validate_rule({"ok", parse_term("f(Z, a)", B), parse_term("Z", B, {}, o)}, B));
  CHECK_THROWS_AS(validate_rule({"fv", parse_term("f(y, a)", B, {{"y", o}}), parse_term("a", B)}, B), Error);
  CHECK_THROWS_AS(validate_rule({"meta", parse_term("Z", B, {}, o), parse_term("a", B)}, B), Error);
  RewriteSystem s;
  s.alphabet = B;
  s.beta_enabled = true;
  s.rules.push_back({"at", parse_term("@([x:o]Z(x), Y)", B, {}, o), parse_term("a", B)});
  try {
    validate_system(s);
    FAIL("expected AtHeadedUserRule");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AtHeadedUserRule);
  }
}

TEST_CASE("normalize") {
  RewriteSystem ok = beta_extend(load_system(crit::corpus("okada.idts")).idts);
  Term u = parse_term("f(@([x]x, y), y)", ok.alphabet, {{"y", Type::base("o")}});
  RewriteTrace t = normalize(ok, u, 10000, Strategy::Full);
  CHECK(t.loop_detected);
  CHECK(t.cycle_length() == 2);
  CHECK(t.steps[1].term == parse_term("f(@([x]x, y), @([x]x, y))", ok.alphabet, {{"y", Type::base("o")}}));

  RewriteSystem b;
  b.alphabet = small_alphabet();
  b.beta_enabled = true;
  RewriteTrace tb = normalize(b, parse_term("@([x:o]x, a)", b.alphabet), 10000);
  CHECK(tb.normal_form());
  CHECK(tb.step_count() == 1);
  CHECK(tb.result() == parse_term("a", b.alphabet));

  RewriteSystem d = beta_extend(d_system());
  RewriteTrace td = normalize(d, parse_term("D([x]sin(x))", d.alphabet), 10000);
  CHECK(td.normal_form());
  CHECK(td.result() == parse_term("[x] times(@(D([y]y), x), cos(x))", d.alphabet));

  RewriteTrace short_budget = normalize(ok, u, 0, Strategy::LeftmostOutermost);
  CHECK(short_budget.budget_exhausted);
  CHECK(short_budget.step_count() == 0);
}

TEST_CASE("normalize is deterministic") {
  RewriteSystem rec = load_system(crit::corpus("recursor.idts")).idts;
  Term u = parse_term("rec(s(s(0)), 0, [x][y]s(y))", rec.alphabet);
  for (Strategy s : {Strategy::LeftmostOutermost, Strategy::LeftmostInnermost, Strategy::Full}) {
    RewriteTrace a = normalize(rec, u, 100, s), b = normalize(rec, u, 100, s);
    REQUIRE(a.steps.size() == b.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
      CHECK(alpha_equal(a.steps[i].term, b.steps[i].term));
      CHECK(a.steps[i].rule == b.steps[i].rule);
    }
    CHECK(a.result() == parse_term("s(s(0))", rec.alphabet));
  }
}

TEST_CASE("non left-linear rules use alpha-equality") {
  RewriteSystem k = load_system(crit::corpus("klop.idts")).idts;
  Term u = parse_term("f(a, a)", k.alphabet);
  CHECK(rewrite_step(k, u).size() == 1);
  k.beta_enabled = true;
  Term v = parse_term("f(@([x]x, a), a)", k.alphabet);
  auto rs = rewrite_step(k, v);
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].rule == kBetaRule);
}
