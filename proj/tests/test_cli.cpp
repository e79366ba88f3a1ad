#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "criteria.hpp"
#include "doctest.h"
#include "json.hpp"

using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args, bool merge_stderr = false) {
  std::string cmd = std::string(IDTS_CLI) + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string file(const std::string& f) { return "'" + crit::corpus(f) + "'"; }

std::vector<json> records(const std::string& out) {
  std::vector<json> rs;
  std::istringstream in(out);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) rs.push_back(json::parse(line));
  return rs;
}

bool contains(const std::string& s, const std::string& what) { return s.find(what) != std::string::npos; }

}  // namespace

TEST_CASE("check --termination") {
  Run d = run("check --termination " + file("d-rule.idts"));
  CHECK(d.code == 0);
  CHECK(contains(d.out, "termination: accepted"));
  CHECK(contains(d.out, "(7) D([y] F(y))"));
  CHECK(contains(d.out, "(2) x"));

  Run ok = run("check --termination " + file("okada.idts"));
  CHECK(ok.code == 1);
  CHECK(contains(ok.out, "rule okada: rejected"));
  CHECK(contains(ok.out, "@(Z, Z') at 1"));

  Run h = run("check --termination " + file("d-rule.hrs"));
  CHECK(h.code == 0);
  CHECK(contains(h.out, "General Schema for HRSs"));
}

TEST_CASE("check --confluence") {
  Run nj = run("check --confluence " + file("cp-nonjoinable.idts"));
  CHECK(nj.code == 1);
  CHECK(contains(nj.out, "witness: <b, c>"));
  Run j = run("check --confluence " + file("cp-joinable.idts") + " --join-budget 100");
  CHECK(j.code == 0);
  CHECK(contains(j.out, "locally confluent"));
  CHECK(run("check --confluence " + file("map.hrs")).code == 0);
}

TEST_CASE("rewrite and normalize") {
  Run n = run("normalize " + file("okada.idts") + " --term 'f(@([x]x, y), y)'");
  CHECK(n.code == 1);
  CHECK(contains(n.out, "loop detected: cycle of length 2"));
  Run d = run("normalize " + file("d-rule.idts") + " --term 'D([x]sin(x))'");
  CHECK(d.code == 0);
  CHECK(d.out == "[x] times(@(D([y] y), x), cos(x))\n");
  Run r = run("rewrite " + file("recursor.idts") + " --term 'rec(s(0), 0, [x][y]s(y))' --strategy li");
  CHECK(r.code == 0);
  CHECK(contains(r.out, "[recs at ε]"));
  CHECK(contains(r.out, "normal form after"));
  Run b = run("normalize " + file("okada.idts") + " --term 'f(@([x]x, y), y)' --budget 1 --strategy lo");
  CHECK(b.code == 1);
  Run h = run("normalize " + file("map.hrs") + " --term 'map (λx. s x) (cons 0 nil)'");
  CHECK(h.code == 0);
  CHECK(h.out == "cons (s 0) nil\n");
}

TEST_CASE("translate") {
  Run i = run("translate " + file("d-rule.hrs") + " --to idts");
  CHECK(i.code == 0);
  CHECK(contains(i.out, "D([x] sin(F(x)), Z) -> times(D([y] F(y), Z), cos(F(Z)))"));
  Run b = run("translate " + file("d-rule.idts") + " --to hrs-base --apply application");
  CHECK(contains(b.out, "D (λx. sin (F x)) z -> times (D (λy. F y) z) (cos (F z))"));
  Run s = run("translate " + file("d-rule.idts") + " --to hrs-single");
  CHECK(contains(s.out, "Λ"));
  CHECK(run("translate " + file("d-rule.idts") + " --to hrs").code == 0);
  CHECK(run("translate " + file("d-rule.hrs") + " --to hrs-base").code == 2);
}

TEST_CASE("machine format") {
  auto rs = records(run("check --termination --format machine " + file("okada.idts")).out);
  REQUIRE_FALSE(rs.empty());
  CHECK(rs.back()["record"] == "verdict");
  CHECK(rs.back()["terminating"] == false);
  bool rule = false;
  for (const json& r : rs)
    if (r["record"] == "rule" && r["rule"] == "okada") {
      rule = true;
      CHECK(r["accepted"] == false);
      CHECK(r["failing_subterm"] == "Z");
    }
  CHECK(rule);

  auto cs = records(run("check --confluence --format machine " + file("cp-nonjoinable.idts")).out);
  REQUIRE(cs.size() == 2);
  CHECK(cs[0]["record"] == "critical_pair");
  CHECK(cs[0]["left"] == "b");
  CHECK(cs[0]["right"] == "c");
  CHECK(cs[1]["locally_confluent"] == false);

  auto ns = records(run("normalize --format machine " + file("okada.idts") + " --term 'f(@([x]x, y), y)'").out);
  REQUIRE(ns.size() == 1);
  CHECK(ns[0]["loop_detected"] == true);
  CHECK(ns[0]["cycle_length"] == 2);

  auto ts = records(run("translate --format machine " + file("map.hrs") + " --to idts").out);
  REQUIRE(ts.size() == 1);
  CHECK(contains(ts[0]["text"].get<std::string>(), "map_cons"));
}

TEST_CASE("errors exit with 2") {
  Run missing = run("check --termination /nonexistent/file.idts", true);
  CHECK(missing.code == 2);
  CHECK(contains(missing.out, "error:"));
  std::string bad = "/tmp/idts_cli_test_bad.idts";
  FILE* f = std::fopen(bad.c_str(), "w");
  REQUIRE(f);
  std::fputs("TYPES o\nFUNCTIONS f : (o) -> o\n  a : o\nRULES\n  r : f(Z -> a\n", f);
  std::fclose(f);
  Run syn = run("check --termination " + bad, true);
  CHECK(syn.code == 2);
  CHECK(contains(syn.out, bad + ":5:"));
  CHECK(contains(syn.out, "SyntaxError"));
  Run js = run("check --termination --format machine " + bad, true);
  CHECK(js.code == 2);
  json e = json::parse(js.out);
  CHECK(e["record"] == "error");
  CHECK(e["line"] == 5);
  CHECK(run("check " + file("d-rule.idts")).code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("normalize " + file("d-rule.idts") + " --term 'tan(x)'").code == 2);
}
