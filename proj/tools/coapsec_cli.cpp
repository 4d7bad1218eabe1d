#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "coapsec/dialect.hpp"
#include "coapsec/experiments.hpp"
#include "coapsec/props.hpp"
#include "coapsec/scenarios.hpp"
#include "coapsec/search.hpp"

using namespace coapsec;
using nlohmann::json;

namespace {

enum Exit : int {
  kOk = 0,
  kFailure = 1,
  kGoalParse = 2,
  kUnknownScenario = 3,
  kStateCap = 4,
  kUsage = 5,
};

struct Common {
  std::string scenario;
  std::string scenarioFile;
  bool dialected = false;
  std::string format = "text";
};

System loadSystem(const Common& c) {
  if (!c.scenarioFile.empty()) return loadScenarioFile(c.scenarioFile);
  if (c.scenario.empty()) throw ScenarioError("one of --scenario or --scenario-file is required");
  return buildScenario(c.scenario);
}

std::string scenarioLabel(const Common& c) {
  std::string s = c.scenarioFile.empty() ? c.scenario : c.scenarioFile;
  return c.dialected ? "D(" + s + ")" : s;
}

json logJson(const std::vector<LogItem>& log) {
  json a = json::array();
  for (const auto& li : log) a.push_back({li.epid, li.path, li.value});
  return a;
}

std::string logText(const std::vector<LogItem>& log) {
  if (log.empty()) return "log(nilLI)";
  std::string s = "log(";
  for (std::size_t i = 0; i < log.size(); ++i) s += (i ? " ; " : "") + show(log[i]);
  return s + ")";
}

int cmdList(const std::string& format) {
  if (format == "records") {
    for (const auto& s : scenarioRegistry())
      std::cout << json{{"name", s.name}, {"params", s.params}, {"summary", s.summary}}.dump() << "\n";
    for (const auto& n : suiteNames())
      std::cout << json{{"suite", n}, {"experiments", experiments(n).size()}}.dump() << "\n";
    return kOk;
  }
  std::cout << "scenarios:\n";
  for (const auto& s : scenarioRegistry())
    std::cout << "  " << std::left << std::setw(24) << (s.name + s.params) << s.summary << "\n";
  std::cout << "suites:\n";
  for (const auto& n : suiteNames()) std::cout << "  " << n << " (" << experiments(n).size() << " searches)\n";
  std::cout << "  all\n";
  return kOk;
}

int cmdRewrite(const Common& c, std::optional<std::size_t> steps) {
  System s = loadSystem(c);
  if (c.dialected) s = D(s);
  RewriteResult r = rewrite(s, steps);
  if (c.format == "records") {
    json j{{"scenario", scenarioLabel(c)}, {"steps", r.steps}, {"terminal", r.terminal}, {"labels", r.labels}};
    if (r.state.log) j["log"] = logJson(*r.state.log);
    j["state"] = show(r.state);
    std::cout << j.dump() << "\n";
    return kOk;
  }
  std::cout << "rewrite {" << scenarioLabel(c) << "} in " << r.steps << " steps"
            << (r.terminal ? " (terminal)" : "") << "\n"
            << show(r.state);
  return kOk;
}

struct SearchOpts {
  std::string mode = "final";
  std::optional<std::size_t> bound;
  std::string goal = "true";
  bool capsExhausted = false;
  std::string trace;
  std::size_t maxStates = 2000000;
  bool debug = false;
  unsigned workers = 1;
};

int cmdSearch(const Common& c, const SearchOpts& o) {
  SearchQuery q;
  q.goal = parseGoal(o.goal);
  q.initial = loadSystem(c);
  q.mode = o.mode == "plus" ? SearchMode::Plus : SearchMode::Final;
  q.bound = o.bound;
  q.requireCapsExhausted = o.capsExhausted;
  q.dialected = c.dialected;
  q.maxStates = o.maxStates;
  q.debugInvariants = o.debug;
  q.workers = o.workers;
  const std::string arrow = q.mode == SearchMode::Plus ? "=>+" : "=>!";

  SearchResult r;
  try {
    r = search(q);
  } catch (const StateLimitExceeded& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    if (c.format == "records")
      std::cout << json{{"type", "limit"}, {"visited", ex.visited}, {"solutions", ex.solutions}}.dump() << "\n";
    else
      std::cout << "state limit reached: " << ex.solutions << " solutions among " << ex.visited
                << " states visited\n";
    return kStateCap;
  }

  if (!o.trace.empty()) {
    std::ofstream out(o.trace);
    if (!out) throw std::runtime_error("cannot write trace file '" + o.trace + "'");
    for (std::size_t i = 0; i < r.solutions.size(); ++i) {
      auto w = witnessTrace(r, i);
      out << "solution " << i + 1 << "\n";
      for (const auto& l : w.labels) out << "  " << l << "\n";
      out << "  " << logText(w.log) << "\n";
    }
  }

  if (c.format == "records") {
    std::cout << json{{"type", "summary"},
                      {"scenario", scenarioLabel(c)},
                      {"mode", o.mode},
                      {"goal", toString(q.goal)},
                      {"capsExhausted", o.capsExhausted},
                      {"solutions", r.solutions.size()},
                      {"visited", r.visited}}
                     .dump()
              << "\n";
    for (std::size_t i = 0; i < r.solutions.size(); ++i) {
      json j{{"type", "solution"}, {"index", i + 1}};
      if (r.solutions[i].state.log) j["log"] = logJson(*r.solutions[i].state.log);
      std::cout << j.dump() << "\n";
    }
    return kOk;
  }

  std::cout << "search {" << scenarioLabel(c) << "} " << arrow << " such that " << toString(q.goal)
            << (o.capsExhausted ? " [caps exhausted]" : "") << "\n";
  if (r.solutions.empty())
    std::cout << "no solution among " << r.visited << " states visited\n";
  else
    std::cout << r.solutions.size() << (r.solutions.size() == 1 ? " solution" : " solutions") << " among "
              << r.visited << " states visited\n";
  for (std::size_t i = 0; i < r.solutions.size(); ++i)
    if (const auto& log = r.solutions[i].state.log)
      std::cout << "  solution " << i + 1 << ": " << logText(*log) << "\n";
  return kOk;
}

int cmdSuite(const std::string& set, const std::string& format, unsigned workers, std::size_t maxStates,
             bool debug, bool timing) {
  auto exps = experiments(set);
  bool allOk = true;
  if (format == "text")
    std::cout << std::left << std::setw(34) << "experiment" << std::setw(28) << "scenario" << std::setw(14)
              << "solutions" << std::setw(18) << "visited" << "result\n";
  for (const auto& e : exps) {
    auto o = runExperiment(e, workers, maxStates, debug);
    const bool ok = o.solutionsOk();
    allOk = allOk && ok;
    std::string expect = e.reportOnly     ? "?"
                         : e.expected     ? std::to_string(*e.expected)
                         : e.expectAttack ? ">0"
                                          : "-";
    std::string visitedCol = std::to_string(o.visited) + (o.limitHit ? "+" : "");
    if (e.refVisited) visitedCol += " (" + std::to_string(*e.refVisited) + ")";
    std::string attacked;
    for (const auto& a : o.attacked) attacked += (attacked.empty() ? "" : ",") + a;
    if (format == "records") {
      json j{{"suite", e.suite},          {"id", e.id},
             {"scenario", e.scenario},    {"dialected", e.dialected},
             {"mode", e.mode == SearchMode::Plus ? "plus" : "final"},
             {"goal", e.goal},            {"solutions", o.solutions},
             {"visited", o.visited},      {"limit", o.limitHit},
             {"pass", ok},                {"attacked", attacked}};
      if (e.expected) j["expected"] = *e.expected;
      if (e.refVisited) j["refVisited"] = *e.refVisited;
      if (timing) j["seconds"] = o.seconds;
      std::cout << j.dump() << std::endl;
    } else {
      std::cout << std::left << std::setw(34) << e.id << std::setw(28)
                << (e.dialected ? "D(" + e.scenario + ")" : e.scenario) << std::setw(14)
                << (std::to_string(o.solutions) + " (" + expect + ")") << std::setw(18) << visitedCol
                << (ok ? "ok" : "MISMATCH");
      if (!attacked.empty()) std::cout << " via " << attacked;
      if (timing) std::cout << " " << std::fixed << std::setprecision(2) << o.seconds << "s";
      std::cout << std::endl;
    }
  }
  return allOk ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CoAP attack and dialect model: scenarios, rewriting and reachability search"};
  app.require_subcommand(1);

  std::string listFormat = "text";
  auto* list = app.add_subcommand("list", "List registered scenarios and experiment suites");
  list->add_option("--format", listFormat)->check(CLI::IsMember({"text", "records"}));

  Common rc;
  std::optional<std::size_t> steps;
  auto* rw = app.add_subcommand("rewrite", "Follow one deterministic execution");
  rw->add_option("--scenario", rc.scenario, "Scenario, e.g. iSys0 or caFig3(15,5,0)");
  rw->add_option("--scenario-file", rc.scenarioFile, "JSON scenario description");
  rw->add_flag("--dialected", rc.dialected, "Apply the dialect transform first");
  rw->add_option("--steps", steps, "Maximum number of steps");
  rw->add_option("--format", rc.format)->check(CLI::IsMember({"text", "records"}));

  Common sc;
  SearchOpts so;
  auto* se = app.add_subcommand("search", "Breadth-first search for states satisfying a goal");
  se->add_option("--scenario", sc.scenario, "Scenario, e.g. raR1(5,0,10,false) or brInit+log+mcX(20)");
  se->add_option("--scenario-file", sc.scenarioFile, "JSON scenario description");
  se->add_flag("--dialected", sc.dialected, "Search the dialected system, goals see the unwrapped state");
  se->add_option("--mode", so.mode, "final (=>!) or plus (=>+)")->check(CLI::IsMember({"final", "plus"}));
  se->add_option("--bound", so.bound, "Stop after this many solutions");
  se->add_option("--goal", so.goal, "Goal expression");
  se->add_flag("--caps-exhausted", so.capsExhausted, "Only accept states where the attacker used every capability");
  se->add_option("--trace", so.trace, "Write witness traces to this file");
  se->add_option("--max-states", so.maxStates, "State cap");
  se->add_flag("--debug-invariants", so.debug, "Check the mte trichotomy on every expanded state");
  se->add_option("--workers", so.workers, "Expansion threads")->check(CLI::PositiveNumber);
  se->add_option("--format", sc.format)->check(CLI::IsMember({"text", "records"}));

  std::string set = "all", suiteFormat = "text";
  unsigned suiteWorkers = 1;
  std::size_t suiteMax = 2000000;
  bool suiteDebug = false, timing = false;
  auto* su = app.add_subcommand("suite", "Run a set of reference experiments");
  su->add_option("--set", set, "core, timing, dialect, catalog, apps or all");
  su->add_option("--format", suiteFormat)->check(CLI::IsMember({"text", "records"}));
  su->add_option("--workers", suiteWorkers)->check(CLI::PositiveNumber);
  su->add_option("--max-states", suiteMax);
  su->add_flag("--debug-invariants", suiteDebug);
  su->add_flag("--timing", timing, "Include wall-clock times");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc2 = app.exit(e);
    return rc2 == 0 ? kOk : kUsage;
  }

  try {
    if (*list) return cmdList(listFormat);
    if (*rw) return cmdRewrite(rc, steps);
    if (*se) return cmdSearch(sc, so);
    if (*su) return cmdSuite(set, suiteFormat, suiteWorkers, suiteMax, suiteDebug, timing);
  } catch (const GoalParseError& e) {
    std::cerr << "goal error: " << e.what() << "\n";
    return kGoalParse;
  } catch (const ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return kUnknownScenario;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kOk;
}
