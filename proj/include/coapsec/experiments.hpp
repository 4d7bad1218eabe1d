#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "coapsec/search.hpp"

namespace coapsec {

struct Experiment {
  std::string suite;  // core, timing, dialect, catalog, apps
  std::string id;
  std::string scenario;  // registry spec
  bool dialected = false;
  SearchMode mode = SearchMode::Final;
  std::string goal;
  bool capsExhausted = false;
  std::optional<std::size_t> bound;
  // exact solution count; when absent, expectAttack decides
  std::optional<std::size_t> expected;
  bool expectAttack = false;
  std::optional<std::size_t> refVisited;
  std::vector<std::string> attackedMsgs;  // message ids an attack is expected to hit
  bool reportOnly = false;                // no definite expected result
};

const std::vector<std::string>& suiteNames();
// "all" selects every suite. Throws std::invalid_argument for an unknown suite.
std::vector<Experiment> experiments(const std::string& suite);

struct ExperimentOutcome {
  Experiment exp;
  std::size_t solutions = 0;
  std::size_t visited = 0;
  bool limitHit = false;
  double seconds = 0;
  std::set<std::string> attacked;  // message ids hit by the first attack step of some solution
  std::vector<LogItem> lastLog;

  bool solutionsOk() const;
  // true when there is no reference figure to compare against
  bool visitedWithin(double tolerance) const;
};

ExperimentOutcome runExperiment(const Experiment& e, unsigned workers, std::size_t maxStates,
                                bool debugInvariants = false);

SearchQuery queryFor(const Experiment& e);

}  // namespace coapsec
