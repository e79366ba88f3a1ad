#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "criteria.hpp"
#include "doctest.h"
#include "generators.hpp"
#include "idts/syntax.hpp"

using namespace idts;

namespace {

const char* kDSystem = R"(TYPES real
CONSTRUCTORS real : sin cos
FUNCTIONS
  sin cos : (real) -> real
  times : (real, real) -> real
  D : (real -> real) -> real -> real
RULES
  D : D([x] sin(F(x))) -> [x] times(@(D([y] F(y)), x), cos(F(x)))
)";

ErrorKind error_of(const std::string& text) {
  try {
    parse_system(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error");
  return ErrorKind::SyntaxError;
}

}  // namespace

TEST_CASE("the D rule parses") {
  SystemFile f = parse_system(kDSystem);
  REQUIRE(f.idts.rules.size() == 1);
  const Rule& r = f.idts.rules[0];
  CHECK(r.name == "D");
  CHECK(r.lhs.name() == "D");
  CHECK(print_term(r.lhs) == "D([x] sin(F(x)))");
  CHECK(print_term(r.rhs) == "[x] times(@(D([y] F(y)), x), cos(F(x)))");
  CHECK(f.idts.alphabet.is_constructor("sin"));
  CHECK(f.idts.beta_enabled);
  CHECK_FALSE(parse_system(std::string("BETA off\n") + kDSystem).idts.beta_enabled);
}

TEST_CASE("the beta rule source") {
  Alphabet a;
  a.base_types = {"o"};
  Term l = parse_term("@([x]Z(x), Z')", a, {}, Type::base("o"));
  CHECK(l.is_app());
  CHECK(print_term(l) == "@([x] Z(x), Z')");
  CHECK(parse_term(print_term(l), a, {}, Type::base("o")) == l);
}

TEST_CASE("term grammar") {
  SystemFile f = parse_system(kDSystem);
  Term u = parse_term("[x]sin(F(x))", f.idts.alphabet);
  REQUIRE(u.is_abs());
  CHECK(u.name() == "x");
  REQUIRE(u.body().is_fun());
  CHECK(u.body().name() == "sin");
  REQUIRE(u.body().arg(0).is_meta());
  CHECK(u.body().arg(0).name() == "F");
  CHECK(u.body().arg(0).arg(0).is_var());
}

TEST_CASE("diagnostics carry locations") {
  try {
    parse_system("TYPES o\nFUNCTIONS f : (o) -> o\n  r : o\nRULES\n  bad : f(Z -> r\n");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SyntaxError);
    CHECK(e.location().line == 5);
    CHECK(e.location().column > 0);
  }
  CHECK(error_of("TYPES o\nFUNCTIONS g : (o -> o -> o) -> o\n  a : o\nRULES\n  r : g([x][y] Z(x, x)) -> a\n") ==
        ErrorKind::PatternViolation);
  CHECK(error_of("TYPES o\nFUNCTIONS f : (o) -> o\nRULES\n  r : f(g) -> g\n") == ErrorKind::UndeclaredSymbol);
  CHECK(error_of("TYPES o\nFUNCTIONS f : (o) -> o\n  a : o\nRULES\n  r : f(a, a) -> a\n") == ErrorKind::ArityMismatch);
  CHECK(error_of("TYPES o\nFUNCTIONS f : (o) -> o\n  a : o\nRULES\n  r : f(Z) -> Y\n") == ErrorKind::RuleViolation);
  CHECK(error_of("TYPES o\nBETA on\nFUNCTIONS a : o\nRULES\n  r : @([x] Z(x), Y) -> a\n") ==
        ErrorKind::AtHeadedUserRule);
  CHECK(error_of("MODE hrs\nTYPES o\nFUNCTIONS f : (o -> o) -> o\n  a : o\nRULES\n  r : f (λx. F x) -> (λy. y) a\n") ==
        ErrorKind::NotEtaLongBetaNormal);
}

TEST_CASE("corpus systems round-trip through the printer") {
  for (const char* file : {"d-rule.idts", "okada.idts", "klop.idts", "cp-joinable.idts", "cp-overlap.idts",
                           "cp-nonjoinable.idts", "ho-overlap.idts", "nonpositive.idts", "recursor.idts", "d-rule.hrs",
                           "map.hrs"}) {
    CAPTURE(file);
    SystemFile f = load_system(crit::corpus(file));
    std::string once = f.mode == Mode::Hrs ? print_system(f.hrs, f.variables) : print_system(f.idts, f.variables);
    SystemFile g = parse_system(once);
    CHECK(g.mode == f.mode);
    std::string twice = g.mode == Mode::Hrs ? print_system(g.hrs, g.variables) : print_system(g.idts, g.variables);
    CHECK(once == twice);
    if (f.mode == Mode::Idts) {
      REQUIRE(g.idts.rules.size() == f.idts.rules.size());
      for (std::size_t i = 0; i < f.idts.rules.size(); ++i) {
        CHECK(alpha_equal(g.idts.rules[i].lhs, f.idts.rules[i].lhs));
        CHECK(alpha_equal(g.idts.rules[i].rhs, f.idts.rules[i].rhs));
      }
    } else {
      REQUIRE(g.hrs.rules.size() == f.hrs.rules.size());
      for (std::size_t i = 0; i < f.hrs.rules.size(); ++i) {
        CHECK(alpha_equal(g.hrs.rules[i].lhs, f.hrs.rules[i].lhs));
        CHECK(alpha_equal(g.hrs.rules[i].rhs, f.hrs.rules[i].rhs));
      }
    }
  }
}

TEST_CASE("HRS terms") {
  SystemFile f = load_system(crit::corpus("d-rule.hrs"));
  REQUIRE(f.mode == Mode::Hrs);
  const HrsRule& r = f.hrs.rules.at(0);
  CHECK(print_lambda(r.lhs) == "D (λx. sin (F x)) z");
  CHECK(is_long_normal(r.lhs));
  CHECK(is_long_normal(r.rhs));
  Lambda u = parse_lambda("λy. sin y", f.hrs.functions);
  CHECK(print_lambda(u) == "λy. sin y");
}

TEST_CASE("generated metaterms round-trip") {
  gen::Rng rng(21);
  Alphabet alpha = gen::sample_alphabet();
  std::map<std::string, Signature> metas = {{"M0", {{gen::o()}, gen::o()}}, {"M1", {{}, gen::n()}}};
  std::vector<std::pair<std::string, Type>> free = {{"y0", gen::o()}, {"y1", gen::arr(gen::o(), gen::n())}};
  TypeEnv env(free.begin(), free.end());
  int plain = 0;
  for (int i = 0; i < 1000; ++i) {
    gen::TermGen tg{alpha, rng, metas, free};
    Type ty = gen::random_type(rng, 1);
    Term u = tg.term(ty, 1 + rng.below(5));
    std::string s = print_term(u);
    CAPTURE(s);
    // Without annotations a binder type may be unrecoverable; the parser must then refuse, never guess.
    try {
      Term v = parse_term(s, alpha, env, ty);
      CHECK(alpha_equal(u, v));
      ++plain;
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::AmbiguousType);
    }
    Term w = parse_term(print_term(u, {true}), alpha, env, ty);
    CHECK(alpha_equal(u, w));
  }
  CHECK(plain > 500);
}
