#include "coapsec/search.hpp"

#include <algorithm>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "coapsec/attack.hpp"
#include "coapsec/dialect.hpp"

namespace coapsec {

std::vector<Transition> transitions(const System& s) {
  std::vector<Transition> raw;
  coapTransitions(s, raw);
  attackTransitions(s, raw);
  mcxTransitions(s, raw);
  dialectTransitions(s, raw);
  std::vector<Transition> out;
  std::unordered_set<std::string> seen;
  for (auto& t : raw) {
    canonicalize(t.next);
    if (seen.insert(encode(t.next)).second) out.push_back(std::move(t));
  }
  return out;
}

RewriteResult rewrite(const System& s, std::optional<std::size_t> n, std::size_t stepCap) {
  RewriteResult r;
  r.state = canonical(s);
  const std::size_t limit = n.value_or(stepCap);
  while (r.steps < limit) {
    auto ts = transitions(r.state);
    if (ts.empty()) {
      r.terminal = true;
      return r;
    }
    r.labels.push_back(ts.front().rule + " " + ts.front().detail);
    r.state = std::move(ts.front().next);
    ++r.steps;
  }
  r.terminal = transitions(r.state).empty();
  return r;
}

StateLimitExceeded::StateLimitExceeded(std::size_t v, std::size_t sol)
    : std::runtime_error("state limit exceeded after " + std::to_string(v) + " states (" +
                         std::to_string(sol) + " solutions so far)"),
      visited(v),
      solutions(sol) {}

namespace {

bool anyEndpoint(const System& s, bool (*pred)(const EndpointState&)) {
  for (const auto& a : s.agents) {
    if (auto* e = std::get_if<EndpointState>(&a.body); e && pred(*e)) return true;
    if (auto* w = std::get_if<WrapperState>(&a.body); w && pred(w->inner)) return true;
  }
  return false;
}

bool localNetsEmpty(const System& s) {
  return std::all_of(s.agents.begin(), s.agents.end(), [](const Agent& a) {
    auto* w = std::get_if<WrapperState>(&a.body);
    return !w || w->local.empty();
  });
}

bool onlySettledAnytime(const std::vector<DelayedMessage>& v) {
  return std::all_of(v.begin(), v.end(), [](const DelayedMessage& d) { return d.anytime && d.delay == 0; });
}

bool noZeroDelay(const std::vector<DelayedMessage>& v) {
  return std::all_of(v.begin(), v.end(), [](const DelayedMessage& d) { return d.anytime || d.delay > 0; });
}

}  // namespace

std::string checkMteTrichotomy(const System& s, const std::vector<Transition>& ts) {
  const Nat m = mte(s);
  auto has = [&](const char* rule) {
    return std::any_of(ts.begin(), ts.end(), [&](const Transition& t) { return t.rule == rule; });
  };
  if (m == 0) {
    if (has("tick")) return "mte is 0 but tick is enabled";
    if (ts.empty()) return "mte is 0 but no rule is enabled";
    return "";
  }
  if (m == kInfinity) {
    if (has("tick")) return "mte is infinite but tick is enabled";
    if (!onlySettledAnytime(s.net.input) || !onlySettledAnytime(s.net.output))
      return "mte is infinite with timed messages in the network";
    if (!localNetsEmpty(s)) return "mte is infinite with a nonempty local net";
    if (anyEndpoint(s, [](const EndpointState& e) { return !e.w4Ack.empty() || !e.sendReqs.empty(); }))
      return "mte is infinite with pending w4Ack or sendReqs";
    return "";
  }
  if (!has("tick")) return "mte is positive but tick is not enabled";
  if (has("devsend") || has("ackTimeout") || has("ddevsend"))
    return "mte is positive but an instantaneous endpoint rule is enabled";
  if (!noZeroDelay(s.net.input) || !noZeroDelay(s.net.output))
    return "mte is positive with a deliverable timed message";
  if (!localNetsEmpty(s)) return "mte is positive with a nonempty local net";
  if (anyEndpoint(s, [](const EndpointState& e) {
        return std::any_of(e.w4Ack.begin(), e.w4Ack.end(), [](const DelayedMessage& d) { return d.delay == 0; });
      }))
    return "mte is positive with an expired w4Ack entry";
  return "";
}

System goalView(const System& s) { return isDialected(s) ? UD(s) : s; }

namespace {

struct Expanded {
  std::vector<Transition> ts;
  std::vector<std::string> keys;
  std::string violation;
};

Expanded expand(const System& s, bool debug) {
  Expanded e;
  e.ts = transitions(s);
  e.keys.reserve(e.ts.size());
  for (const auto& t : e.ts) e.keys.push_back(encode(t.next));
  if (debug) e.violation = checkMteTrichotomy(s, e.ts);
  return e;
}

bool capsUsedUp(const System& s) {
  const AttackerState* a = attackerOf(s);
  return a && a->caps.empty();
}

}  // namespace

SearchResult search(const SearchQuery& q) {
  SearchResult r;
  System init = canonical(q.dialected && !isDialected(q.initial) ? D(q.initial) : q.initial);

  std::vector<System> states;
  std::unordered_map<std::string, std::size_t> index;
  index.emplace(encode(init), 0);
  states.push_back(std::move(init));
  r.parent.push_back(0);
  r.label.emplace_back();

  auto accepts = [&](std::size_t ix, bool terminal) {
    if (q.mode == SearchMode::Final && !terminal) return false;
    if (q.mode == SearchMode::Plus && ix == 0) return false;
    const System& s = states[ix];
    if (q.requireCapsExhausted && !capsUsedUp(s)) return false;
    return eval(q.goal, goalView(s));
  };
  auto done = [&] { return q.bound && r.solutions.size() >= *q.bound; };

  const unsigned workers = std::max(1u, q.workers);
  std::size_t levelBegin = 0;
  while (levelBegin < states.size() && !done()) {
    const std::size_t levelEnd = states.size();
    std::vector<Expanded> ex(levelEnd - levelBegin);
    if (workers == 1 || ex.size() < 2 * workers) {
      for (std::size_t i = 0; i < ex.size(); ++i) ex[i] = expand(states[levelBegin + i], q.debugInvariants);
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          for (std::size_t i = w; i < ex.size(); i += workers)
            ex[i] = expand(states[levelBegin + i], q.debugInvariants);
        });
      }
      for (auto& th : pool) th.join();
    }
    for (std::size_t i = 0; i < ex.size() && !done(); ++i) {
      const std::size_t ix = levelBegin + i;
      Expanded& e = ex[i];
      if (q.debugInvariants) {
        ++r.invariantChecks;
        if (!e.violation.empty())
          throw InvariantViolation(e.violation + " in state\n" + show(states[ix]));
      }
      if (accepts(ix, e.ts.empty())) r.solutions.push_back({ix, states.size(), states[ix]});
      for (std::size_t k = 0; k < e.ts.size(); ++k) {
        auto [it, fresh] = index.emplace(std::move(e.keys[k]), states.size());
        if (!fresh) continue;
        if (states.size() >= q.maxStates) {
          r.visited = r.explored = states.size();
          throw StateLimitExceeded(r.visited, r.solutions.size());
        }
        r.parent.push_back(ix);
        r.label.push_back(e.ts[k].rule + " " + e.ts[k].detail);
        states.push_back(std::move(e.ts[k].next));
      }
    }
    levelBegin = levelEnd;
  }
  r.explored = states.size();
  r.visited = r.solutions.empty() ? r.explored : r.solutions.back().seen;
  return r;
}

WitnessTrace witnessTrace(const SearchResult& r, std::size_t solutionIx) {
  if (solutionIx >= r.solutions.size()) throw std::out_of_range("solution index out of range");
  WitnessTrace w;
  std::size_t ix = r.solutions[solutionIx].stateIndex;
  while (ix != 0) {
    w.labels.push_back(r.label[ix]);
    ix = r.parent[ix];
  }
  std::reverse(w.labels.begin(), w.labels.end());
  if (const auto& log = r.solutions[solutionIx].state.log) w.log = *log;
  return w;
}

}  // namespace coapsec
