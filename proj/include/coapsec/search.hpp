#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coapsec/coap.hpp"
#include "coapsec/model.hpp"
#include "coapsec/props.hpp"

namespace coapsec {

// All enabled rule instances with canonical successors, duplicates removed.
std::vector<Transition> transitions(const System& s);

// Follows the first enabled transition for up to n steps (stepCap when n is absent).
struct RewriteResult {
  System state;
  std::size_t steps = 0;
  bool terminal = false;
  std::vector<std::string> labels;
};
RewriteResult rewrite(const System& s, std::optional<std::size_t> n, std::size_t stepCap = 100000);

enum class SearchMode { Final, Plus };

struct SearchQuery {
  System initial;
  SearchMode mode = SearchMode::Final;
  std::optional<std::size_t> bound;
  Prop goal;
  bool requireCapsExhausted = false;
  bool dialected = false;
  std::size_t maxStates = 2000000;
  bool debugInvariants = false;
  unsigned workers = 1;
};

struct Solution {
  std::size_t stateIndex = 0;
  std::size_t seen = 0;  // distinct states known when this solution was recognized
  System state;          // as explored (dialected when the query is)
};

struct SearchResult {
  std::vector<Solution> solutions;
  // distinct states known when the last solution was found, or all of them without solutions
  std::size_t visited = 0;
  std::size_t explored = 0;
  std::size_t invariantChecks = 0;
  // parent links for witness traces
  std::vector<std::size_t> parent;
  std::vector<std::string> label;
};

class StateLimitExceeded : public std::runtime_error {
 public:
  StateLimitExceeded(std::size_t visited, std::size_t solutions);
  std::size_t visited;
  std::size_t solutions;
};

class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Returns an empty string when the mte trichotomy holds for s and its transitions.
std::string checkMteTrichotomy(const System& s, const std::vector<Transition>& ts);

SearchResult search(const SearchQuery& q);

// The state a goal is evaluated on.
System goalView(const System& s);

struct WitnessTrace {
  std::vector<std::string> labels;
  std::vector<LogItem> log;
};
WitnessTrace witnessTrace(const SearchResult& r, std::size_t solutionIx);

}  // namespace coapsec
