#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "idts/confluence.hpp"
#include "idts/schema.hpp"
#include "idts/syntax.hpp"
#include "idts/translate.hpp"
#include "json.hpp"

using namespace idts;
using nlohmann::json;

namespace {

struct Options {
  std::string file;
  std::string format = "text";
  bool termination = false;
  bool confluence = false;
  std::size_t join_budget = 10000;
  std::string term;
  std::size_t steps = 10000;
  std::string strategy;
  std::string target;
  std::string apply = "constant";
};

bool machine(const Options& o) { return o.format == "machine"; }

Strategy strategy_of(const std::string& s) {
  if (s == "lo") return Strategy::LeftmostOutermost;
  if (s == "li") return Strategy::LeftmostInnermost;
  return Strategy::Full;
}

int run_check(const Options& o, const SystemFile& f) {
  if (o.termination) {
    CheckReport rep = f.mode == Mode::Hrs ? check_general_schema_hrs(f.hrs) : check_general_schema(f.idts);
    std::cout << (machine(o) ? report_json(rep) : format_report(rep));
    return rep.terminating() ? 0 : 1;
  }
  RewriteSystem sys = f.mode == Mode::Hrs ? hrs_to_idts(f.hrs) : f.idts;
  ConfluenceReport rep = check_local_confluence(sys, o.join_budget);
  std::cout << (machine(o) ? confluence_json(rep) : format_confluence(rep));
  return rep.locally_confluent() ? 0 : 1;
}

void print_idts_trace(const Options& o, const RewriteTrace& t, bool full_trace) {
  if (machine(o)) {
    if (full_trace)
      for (std::size_t i = 0; i < t.steps.size(); ++i)
        std::cout << json({{"record", "step"},
                           {"index", i},
                           {"term", print_term(t.steps[i].term)},
                           {"rule", t.steps[i].rule},
                           {"position", position_str(t.steps[i].position)}})
                         .dump()
                  << "\n";
    json r = {{"record", "result"},
              {"term", print_term(t.result())},
              {"steps", t.step_count()},
              {"normal_form", t.normal_form()},
              {"loop_detected", t.loop_detected},
              {"budget_exhausted", t.budget_exhausted}};
    if (t.loop_detected) {
      r["loop_start"] = t.loop_start;
      r["cycle_length"] = t.cycle_length();
    }
    std::cout << r.dump() << "\n";
    return;
  }
  if (full_trace)
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
      const TraceStep& s = t.steps[i];
      if (i == 0) std::cout << "   " << print_term(s.term) << "\n";
      else std::cout << "-> " << print_term(s.term) << "    [" << s.rule << " at " << position_str(s.position) << "]\n";
    }
  if (t.loop_detected) {
    std::cout << "loop detected: cycle of length " << t.cycle_length() << " from step " << t.loop_start << "\n";
    for (std::size_t i = t.loop_start; i < t.steps.size(); ++i) std::cout << "  " << print_term(t.steps[i].term) << "\n";
  } else if (t.budget_exhausted) {
    std::cout << "budget exhausted after " << t.step_count() << " steps\n";
  } else if (!full_trace) {
    std::cout << print_term(t.result()) << "\n";
  } else {
    std::cout << "normal form after " << t.step_count() << " steps\n";
  }
}

// HRS terms rewrite with the leftmost-outermost reduct.
int run_hrs_reduce(const Options& o, const SystemFile& f, bool full_trace) {
  Lambda u = long_normal_form(parse_lambda(o.term, f.hrs.functions, f.variables));
  std::vector<HrsReduct> trace{{u, "", {}}};
  std::set<std::string> seen{alpha_key(u)};
  bool loop = false, exhausted = false;
  while (true) {
    auto rs = hrs_rewrite_step(f.hrs, trace.back().term);
    if (rs.empty()) break;
    if (trace.size() - 1 >= o.steps) {
      exhausted = true;
      break;
    }
    trace.push_back(rs.front());
    if (!seen.insert(alpha_key(rs.front().term)).second) {
      loop = true;
      break;
    }
  }
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (!full_trace && i + 1 < trace.size()) continue;
    if (machine(o))
      std::cout << json({{"record", i + 1 == trace.size() ? "result" : "step"},
                         {"index", i},
                         {"term", print_lambda(trace[i].term)},
                         {"rule", trace[i].rule},
                         {"position", position_str(trace[i].position)},
                         {"loop_detected", loop},
                         {"budget_exhausted", exhausted}})
                       .dump()
                << "\n";
    else if (i == 0 && full_trace) std::cout << "   " << print_lambda(trace[i].term) << "\n";
    else if (full_trace) std::cout << "-> " << print_lambda(trace[i].term) << "    [" << trace[i].rule << " at " << position_str(trace[i].position) << "]\n";
    else std::cout << print_lambda(trace[i].term) << "\n";
  }
  if (!machine(o) && loop) std::cout << "loop detected\n";
  if (!machine(o) && exhausted) std::cout << "budget exhausted\n";
  return loop || exhausted ? 1 : 0;
}

int run_reduce(const Options& o, const SystemFile& f, bool full_trace, Strategy default_strategy) {
  if (f.mode == Mode::Hrs) return run_hrs_reduce(o, f, full_trace);
  Term u = parse_term(o.term, f.idts.alphabet, f.variables);
  Strategy s = o.strategy.empty() ? default_strategy : strategy_of(o.strategy);
  RewriteTrace t = normalize(f.idts, u, o.steps, s);
  print_idts_trace(o, t, full_trace);
  return t.normal_form() ? 0 : 1;
}

int run_translate(const Options& o, const SystemFile& f) {
  ApplyMode mode = o.apply == "application" ? ApplyMode::Application : ApplyMode::Constant;
  std::string text;
  if (o.target == "idts") {
    text = f.mode == Mode::Hrs ? print_system(hrs_to_idts(f.hrs)) : print_system(f.idts, f.variables);
  } else {
    if (f.mode == Mode::Hrs) {
      if (o.target != "hrs") throw Error(ErrorKind::InvalidAlphabet, "--to " + o.target + " expects an IDTS input");
      text = print_system(f.hrs, f.variables);
    } else if (o.target == "hrs") {
      text = print_system(idts_to_hrs_natural(f.idts, mode));
    } else if (o.target == "hrs-base") {
      text = print_system(idts_to_hrs_basetype(f.idts, mode));
    } else {
      text = print_system(idts_to_hrs_single_sorted(f.idts));
    }
  }
  if (machine(o)) std::cout << json({{"record", "system"}, {"target", o.target}, {"text", text}}).dump() << "\n";
  else std::cout << text;
  return 0;
}

void report_error(const Options& o, const std::string& kind, const std::string& message, Location loc = {}) {
  if (machine(o)) {
    json j = {{"record", "error"}, {"kind", kind.empty() ? "Error" : kind}, {"message", message}, {"file", o.file}};
    if (loc.line) {
      j["line"] = loc.line;
      j["column"] = loc.column;
    }
    std::cerr << j.dump() << "\n";
    return;
  }
  std::cerr << o.file;
  if (loc.line) std::cerr << ":" << loc.line << ":" << loc.column;
  std::cerr << ": error: ";
  if (!kind.empty()) std::cerr << kind << ": ";
  std::cerr << message << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rewriting, termination and confluence for typed higher-order rewrite systems"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("file", o.file, "System file (.idts or .hrs)")->required();
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "machine"}));
  };

  CLI::App* check = app.add_subcommand("check", "Check termination or local confluence");
  add_common(check);
  auto* term_flag = check->add_flag("--termination", o.termination, "General Schema check");
  auto* conf_flag = check->add_flag("--confluence", o.confluence, "Critical pairs and local confluence");
  term_flag->excludes(conf_flag);
  check->add_option("--join-budget", o.join_budget, "Terms explored per side when joining a critical pair");

  CLI::App* rewrite = app.add_subcommand("rewrite", "Rewrite a term and print the trace");
  add_common(rewrite);
  rewrite->add_option("--term", o.term, "Term to rewrite")->required();
  rewrite->add_option("--steps", o.steps, "Maximum number of steps");
  rewrite->add_option("--strategy", o.strategy, "Redex selection")->check(CLI::IsMember({"lo", "li", "all"}));

  CLI::App* norm = app.add_subcommand("normalize", "Compute a normal form");
  add_common(norm);
  norm->add_option("--term", o.term, "Term to normalize")->required();
  norm->add_option("--budget", o.steps, "Maximum number of steps");
  norm->add_option("--strategy", o.strategy, "Redex selection")->check(CLI::IsMember({"lo", "li", "all"}));

  CLI::App* tr = app.add_subcommand("translate", "Translate between IDTS and HRS presentations");
  add_common(tr);
  tr->add_option("--to", o.target, "Target presentation")
      ->required()
      ->check(CLI::IsMember({"hrs", "hrs-base", "hrs-single", "idts"}));
  tr->add_option("--apply", o.apply, "Translation of @ into an HRS")->check(CLI::IsMember({"constant", "application"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    SystemFile f = load_system(o.file);
    if (check->parsed()) {
      if (!o.termination && !o.confluence) {
        report_error(o, "usage", "check needs --termination or --confluence");
        return 2;
      }
      return run_check(o, f);
    }
    if (rewrite->parsed()) return run_reduce(o, f, true, Strategy::LeftmostOutermost);
    if (norm->parsed()) return run_reduce(o, f, false, Strategy::Full);
    if (tr->parsed()) return run_translate(o, f);
  } catch (const Error& e) {
    report_error(o, error_kind_name(e.kind()), e.message(), e.location());
    return 2;
  } catch (const std::exception& e) {
    report_error(o, "", e.what());
    return 2;
  }
  return 2;
}
