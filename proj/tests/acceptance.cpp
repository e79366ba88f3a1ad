// One line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "criteria.hpp"

namespace {

struct Criterion {
  int id;
  std::string title;
  std::function<std::vector<std::pair<std::string, crit::Outcome>>()> run;
};

}  // namespace

int main() {
  const unsigned seed = 20240;
  std::vector<Criterion> criteria = {
      {1, "GS fixtures (beta, D accepted with walkthrough derivation; Okada rejected)",
       [] { return std::vector<std::pair<std::string, crit::Outcome>>{{"fixtures", crit::gs_fixtures()}}; }},
      {2, "Okada divergence (2-cycle within 5 steps)",
       [] { return std::vector<std::pair<std::string, crit::Outcome>>{{"okada", crit::okada_divergence()}}; }},
      {3, "property suite (1000 cases each, depth <= 5)",
       [&] {
         return std::vector<std::pair<std::string, crit::Outcome>>{
             {"acc-stability", crit::acc_stability(seed, 1000)},
             {"covered-stability", crit::covered_stability(seed, 1000)},
             {"match-soundness", crit::match_soundness(seed, 1000)},
             {"subject-reduction", crit::subject_reduction(seed, 1000)},
             {"beta-strategy", crit::beta_strategy_independence(seed, 1000)}};
       }},
      {4, "critical pairs = overlap oracle (200 first-order systems)",
       [&] { return std::vector<std::pair<std::string, crit::Outcome>>{{"cp-oracle", crit::cp_oracle(seed, 200)}}; }},
      {5, "local confluence (joinable fixture + 100 start terms; witness <b, c>)",
       [&] {
         return std::vector<std::pair<std::string, crit::Outcome>>{{"peaks", crit::local_confluence(seed, 100)}};
       }},
      {6, "translation lemmas (simulation, injectivity, GS' => GS)",
       [&] {
         return std::vector<std::pair<std::string, crit::Outcome>>{{"simulation", crit::simulation(seed, 100)},
                                                                   {"injectivity", crit::injectivity(seed, 1000)},
                                                                   {"gs-prime", crit::gs_prime_lemma()}};
       }},
      {7, "pattern unification (oracle on 500 problems, soundness, frozen variables)",
       [&] {
         return std::vector<std::pair<std::string, crit::Outcome>>{
             {"fo-oracle", crit::unifier_oracle(seed, 500)},
             {"soundness", crit::unifier_soundness(seed, 1000)},
             {"frozen", crit::critical_pair_conditions(seed, 200)}};
       }},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    std::vector<std::pair<std::string, crit::Outcome>> parts;
    std::string error;
    try {
      parts = c.run();
    } catch (const std::exception& e) {
      error = e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool ok = error.empty();
    std::string detail;
    for (auto& [name, o] : parts) {
      ok = ok && o.ok();
      detail += (detail.empty() ? "" : ", ") + name + " " + std::to_string(o.cases) + (o.ok() ? "" : " FAILED");
    }
    if (!error.empty()) detail += "exception: " + error;
    char time[32];
    std::snprintf(time, sizeof time, "%.2fs", secs);
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.title << " [" << detail << "; " << time
              << "]\n";
    if (!ok) {
      ++failed;
      for (auto& [name, o] : parts)
        if (!o.ok()) std::cout << "  " << name << ": " << o.summary() << "\n";
    }
  }
  return failed ? 1 : 0;
}
