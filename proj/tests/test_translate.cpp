#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "criteria.hpp"
#include "doctest.h"
#include "generators.hpp"
#include "idts/syntax.hpp"
#include "idts/translate.hpp"

using namespace idts;

namespace {

Type real() { return Type::base("real"); }
Type rr() { return Type::arrow(real(), real()); }

RewriteSystem d_system() { return load_system(crit::corpus("d-rule.idts")).idts; }

}  // namespace

TEST_CASE("beta extension") {
  RewriteSystem d = d_system();
  d.beta_enabled = false;
  RewriteSystem b = beta_extend(d);
  CHECK(b.beta_enabled);
  CHECK(b.rules.size() == d.rules.size());
  RewriteSystem bb = beta_extend(b);
  CHECK(bb.beta_enabled);
  CHECK(bb.rules.size() == b.rules.size());

  Type o = Type::base("o");
  RewriteSystem at;
  at.alphabet.base_types = {"o"};
  at.alphabet.functions = {{"a", {{}, o}}};
  at.rules.push_back({"r", Term::app(Term::meta("Z", {}, Type::arrow(o, o)), Term::meta("Z'", {}, o)),
                      Term::fun("a", {}, o)});
  try {
    beta_extend(at);
    FAIL("expected AtHeadedUserRule");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AtHeadedUserRule);
  }
}

TEST_CASE("HRS to IDTS") {
  HrsSystem h = load_system(crit::corpus("d-rule.hrs")).hrs;
  RewriteSystem i = hrs_to_idts(h);
  CHECK(i.beta_enabled);
  REQUIRE(i.rules.size() == 1);
  CHECK(print_term(i.rules[0].lhs) == "D([x] sin(F(x)), Z)");
  CHECK(print_term(i.rules[0].rhs) == "times(D([y] F(y), Z), cos(F(Z)))");
  CHECK(i.alphabet.functions.at("D").arity() == 2);
  CHECK(i.alphabet.functions.at("times").arity() == 2);
  CHECK_NOTHROW(validate_system(i));

  Lambda fu = parse_lambda("sin (cos z)", h.functions, {{"z", real()}});
  CHECK(print_term(hrs_term_to_idts(fu)) == "sin(cos(z))");
  Lambda xu = parse_lambda("λx. x (sin z)", h.functions, {{"z", real()}}, Type::arrow(rr(), real()));
  CHECK(print_term(hrs_term_to_idts(xu)) == "[x] @(x, sin(z))");
  Lambda mu = parse_lambda("λy. F y", h.functions, {{"F", rr()}});
  CHECK(print_term(hrs_term_to_idts(mu, {"F"})) == "[y] F(y)");

  Lambda not_long = parse_lambda("D (λx. x)", h.functions);
  CHECK_THROWS_AS(hrs_term_to_idts(not_long), Error);
}

TEST_CASE("natural translation") {
  RewriteSystem d = d_system();
  CHECK(print_lambda(natural_term(parse_term("[x:real]sin(F(x))", d.alphabet))) == "λx. sin (F x)");
  Term x = Term::var("x", Type::base("nat"));
  CHECK(alpha_equal(natural_term(x), Lambda::var("x", Type::base("nat"))));
  Term zu = Term::meta("Z", {parse_term("sin(y)", d.alphabet, {{"y", real()}})}, real());
  CHECK(print_lambda(natural_term(zu)) == "Z (sin y)");
  Term f = Term::var("f", rr());
  CHECK(print_lambda(natural_term(f)) == "λy. f y");
  CHECK(is_long_normal(natural_term(d.rules[0].rhs)));
  CHECK(alpha_equal(from_natural(natural_term(d.rules[0].rhs), d.alphabet, {{"F", 1}}), d.rules[0].rhs));
}

TEST_CASE("base-type translation") {
  RewriteSystem d = d_system();
  HrsRule app = basetype_rule(d.rules[0], ApplyMode::Application);
  REQUIRE(app.lhs.type() == real());
  Spine s = spine(app.lhs);
  REQUIRE(s.args.size() == 2);
  REQUIRE(s.args[1].is_var());
  std::string fresh = s.args[1].name();
  HrsSystem ctx;
  ctx.base_types = {"real"};
  ctx.functions = curried_constants(d.alphabet);
  TypeEnv env = {{"F", rr()}, {fresh, real()}};
  CHECK(alpha_equal(app.lhs, parse_lambda("D (λx. sin (F x)) " + fresh, ctx.functions, env)));
  CHECK(alpha_equal(app.rhs, parse_lambda("times (D (λy. F y) " + fresh + ") (cos (F " + fresh + "))", ctx.functions, env)));
  CHECK(pattern_variables(app).count("F"));
  CHECK_NOTHROW(validate_hrs_rule(app, ctx));

  HrsRule con = basetype_rule(d.rules[0]);
  CHECK(print_hrs_rule(con).find("@") != std::string::npos);

  RewriteSystem j = load_system(crit::corpus("cp-joinable.idts")).idts;
  HrsRule fg = basetype_rule(j.rules[0]);
  CHECK(print_hrs_rule(fg) == "fg : f (g Z) -> h Z");

  RewriteSystem two = parse_system(
                          "TYPES o\nFUNCTIONS\n  k : (o) -> o -> o -> o\n  g : (o, o) -> o\nRULES\n  r : k(Z) -> "
                          "[x][y] g(x, Z)\n")
                          .idts;
  HrsRule r2 = basetype_rule(two.rules[0]);
  CHECK(spine(r2.lhs).args.size() == 3);
  CHECK(r2.lhs.type() == Type::base("o"));
}

TEST_CASE("single-sorted translation") {
  Type o = Type::base("o");
  Alphabet A;
  A.base_types = {"o"};
  A.functions = {{"f", {{o}, o}}, {"a", {{}, o}}};
  SingleSortedNames n = single_sorted_names(A);
  CHECK(print_lambda(single_sorted_term(Term::abs("x", o, Term::var("x", o)), n)) == "Λ (λx. x)");
  CHECK(print_lambda(single_sorted_term(Term::fun("f", {Term::fun("a", {}, o)}, o), n)) == "f a");
  CHECK(print_lambda(single_sorted_term(Term::meta("Z", {Term::var("x", o)}, o), n)) == "Z x");

  Alphabet clash = A;
  clash.functions["app"] = {{}, o};
  CHECK(single_sorted_names(clash).apply != "app");

  HrsSystem d = idts_to_hrs_single_sorted(beta_extend(d_system()));
  CHECK(d.base_types == std::set<std::string>{"o"});
  CHECK(d.rules.size() == 2);
  for (const HrsRule& r : d.rules) CHECK_NOTHROW(validate_hrs_rule(r, d));
}

TEST_CASE("single-sorted translation commutes with valuations") {
  gen::Rng rng(41);
  Alphabet alpha = gen::sample_alphabet();
  SingleSortedNames names = single_sorted_names(alpha);
  Type o = Type::base(names.base);
  for (int i = 0; i < 500; ++i) {
    gen::PatternGen pg{alpha, rng};
    Term l = pg.lhs(1 + rng.below(4));
    Valuation sigma = gen::random_valuation(alpha, rng, pg.metas, 2);
    LambdaSubstitution theta;
    for (auto& [z, s] : sigma) {
      Lambda body = single_sorted_term(s.body, names);
      for (auto it = s.params.rbegin(); it != s.params.rend(); ++it) body = Lambda::lam(it->first, o, body);
      theta[z] = body;
    }
    Lambda lhs = single_sorted_term(apply_valuation(l, sigma), names);
    Lambda rhs = instantiate(single_sorted_term(l, names), theta);
    CHECK_MESSAGE(alpha_equal(lhs, rhs), std::string(print_term(l)));
  }
}

TEST_CASE("translated terms are well typed") {
  gen::Rng rng(42);
  Alphabet alpha = gen::sample_alphabet();
  RewriteSystem s;
  s.alphabet = alpha;
  HrsSystem single = idts_to_hrs_single_sorted(s);
  auto natural = curried_constants(alpha);
  std::map<std::string, Signature> metas = {{"M0", {{gen::o()}, gen::o()}}, {"M1", {{}, gen::n()}}};
  for (int i = 0; i < 500; ++i) {
    gen::TermGen tg{alpha, rng, metas, {{"y0", gen::o()}}};
    Type ty = gen::random_type(rng, 1);
    Term u = tg.term(ty, 1 + rng.below(4));
    Lambda h = natural_term(u);
    CHECK(is_long_normal(h));
    CHECK(typecheck(h, natural, free_var_types(h)) == ty);
    Lambda ss = single_sorted_term(u, single_sorted_names(alpha));
    CHECK(typecheck(ss, single.functions, free_var_types(ss)) == Type::base("o"));
    Lambda ha = natural_term(u, ApplyMode::Application);
    CHECK(is_long_normal(ha));
    CHECK(typecheck(ha, natural, free_var_types(ha)) == ty);
  }
}

TEST_CASE("translation lemmas") {
  crit::Outcome sim = crit::simulation(1, 200);
  INFO(sim.summary());
  CHECK(sim.ok());
  crit::Outcome inj = crit::injectivity(2, 1000);
  INFO(inj.summary());
  CHECK(inj.ok());
  crit::Outcome gs = crit::gs_prime_lemma();
  INFO(gs.summary());
  CHECK(gs.ok());
}
