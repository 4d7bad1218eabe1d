#include <doctest.h>

#include <algorithm>
#include <set>

#include "coapsec/attack.hpp"
#include "coapsec/dialect.hpp"
#include "coapsec/scenarios.hpp"
#include "coapsec/search.hpp"

using namespace coapsec;

namespace {

SearchQuery query(System s, const std::string& goal, SearchMode mode = SearchMode::Final) {
  SearchQuery q;
  q.initial = std::move(s);
  q.goal = parseGoal(goal);
  q.mode = mode;
  return q;
}

// resources of every endpoint in each terminal state, as seen through the wrapper
std::set<std::string> terminalResources(System s, bool dialected) {
  SearchQuery q = query(std::move(s), "true");
  q.dialected = dialected;
  q.debugInvariants = true;
  std::set<std::string> out;
  for (const auto& sol : search(q).solutions) {
    const System v = goalView(sol.state);
    std::string key;
    for (const auto& id : endpointIds(v))
      for (const auto& [p, val] : endpointOf(v, id)->rsrcs) key += id + "." + p + "=" + val + " ";
    out.insert(key);
  }
  return out;
}

System twoStep(std::vector<Capability> caps) {
  return tCS({mkPutC("putC", "dev1", "door", "lock"), Pause{3}, mkPutN("putN", "dev1", "door", "open")},
             {{"door", "unlock"}}, std::move(caps));
}

}  // namespace

TEST_CASE("search counts on small scenarios") {
  CHECK(search(query(iSys0(), "checkRsrc dev1 door unlock")).solutions.size() == 0);
  CHECK(search(query(iSys0(), "checkRsrc dev1 door lock")).solutions.size() == 1);
  CHECK(search(query(iSys3a(), "and (hasGetRsp dev0 dev1 getN unlock) (checkRsrc dev1 door lock)"))
            .solutions.size() == 0);
}

TEST_CASE("visited counts states known at the last solution") {
  auto q = query(iSys0(), "true");
  auto r = search(q);
  REQUIRE(r.solutions.size() == 1);
  CHECK(r.visited == r.solutions.back().seen);
  CHECK(r.visited <= r.explored);

  auto none = search(query(iSys0(), "false"));
  CHECK(none.solutions.empty());
  CHECK(none.visited == none.explored);
  CHECK(none.explored == r.explored);
}

TEST_CASE("plus mode skips the initial state") {
  auto plus = search(query(iSys0(), "true", SearchMode::Plus));
  CHECK(plus.solutions.size() + 1 == plus.explored);
  auto bounded = query(iSys0(), "true", SearchMode::Plus);
  bounded.bound = 3;
  CHECK(search(bounded).solutions.size() == 3);
}

TEST_CASE("every explored state passes the time invariants") {
  for (const char* spec : {"iSys0", "iSys1", "iSys2", "iSys3r", "caFig3(10,5,0)", "brInit"}) {
    CAPTURE(spec);
    auto q = query(buildScenario(spec), "true", SearchMode::Plus);
    q.debugInvariants = true;
    SearchResult r;
    CHECK_NOTHROW(r = search(q));
    CHECK(r.invariantChecks == r.explored);
  }
  auto q = query(buildScenario("iSys0"), "true", SearchMode::Plus);
  q.debugInvariants = true;
  q.dialected = true;
  CHECK_NOTHROW(search(q));
}

TEST_CASE("search is deterministic across runs and worker counts") {
  auto q = query(buildScenario("caFig3(10,5,0)"), "checkRsrc dev1 door lock");
  auto a = search(q);
  auto b = search(q);
  q.workers = 4;
  auto c = search(q);
  for (const auto* r : {&b, &c}) {
    CHECK(r->solutions.size() == a.solutions.size());
    CHECK(r->visited == a.visited);
    CHECK(r->explored == a.explored);
    for (std::size_t i = 0; i < a.solutions.size() && i < r->solutions.size(); ++i)
      CHECK(encode(r->solutions[i].state) == encode(a.solutions[i].state));
  }
}

TEST_CASE("caps exhaustion filter") {
  auto q = query(iSys1(), "true");
  auto all = search(q);
  q.requireCapsExhausted = true;
  auto used = search(q);
  CHECK(used.solutions.size() < all.solutions.size());
  for (const auto& s : used.solutions) CHECK(attackerOf(s.state)->caps.empty());
}

TEST_CASE("a confirmable request takes effect at most once") {
  System s = tCS({mkPutC("putC", "dev1", "door", "lock")}, {{"door", "unlock"}}, {drop()});
  s.log.emplace();
  // with the first acknowledgement lost the request is retransmitted, and the
  // server answers the copy from its record instead of acting again
  auto twice = search(query(s, "subLIL [rcvP dev1 door lock ; rcvP dev1 door lock]"));
  CHECK(twice.solutions.empty());
  auto q = query(s, "and (checkRsrc dev1 door lock) (hasRspTRcd dev0 dev1 putC)");
  q.requireCapsExhausted = true;
  CHECK_FALSE(search(q).solutions.empty());
}

TEST_CASE("witness traces lead from the initial state") {
  auto r = search(query(iSys0(), "checkRsrc dev1 door lock"));
  REQUIRE(r.solutions.size() == 1);
  auto w = witnessTrace(r, 0);
  REQUIRE_FALSE(w.labels.empty());
  CHECK(w.labels.front().rfind("devsend", 0) == 0);
  CHECK_FALSE(w.log.empty());
  CHECK(w.log.back().value == "lock");
  CHECK_THROWS_AS(witnessTrace(r, 1), std::out_of_range);

  // following the labels from the start reaches the solution state
  System s = canonical(iSys0());
  for (const auto& label : w.labels) {
    auto ts = transitions(s);
    auto it = std::find_if(ts.begin(), ts.end(),
                           [&](const Transition& t) { return t.rule + " " + t.detail == label; });
    REQUIRE(it != ts.end());
    s = it->next;
  }
  CHECK(encode(s) == encode(r.solutions[0].state));
}

TEST_CASE("state limit") {
  auto q = query(iSys3r(), "true");
  q.maxStates = 10;
  CHECK_THROWS_AS(search(q), StateLimitExceeded);
  try {
    search(q);
  } catch (const StateLimitExceeded& e) {
    CHECK(e.visited == 10);
  }
}

TEST_CASE("rewrite runs to a terminal state") {
  auto r = rewrite(iSys0(), std::nullopt);
  CHECK(r.terminal);
  CHECK(r.steps == r.labels.size());
  CHECK(endpointOf(r.state, "dev1")->rsrcs.at("door") == "lock");
  auto two = rewrite(iSys0(), 2);
  CHECK(two.steps == 2);
  CHECK_FALSE(two.terminal);
}

TEST_CASE("wrapping preserves outcomes under drop and delay") {
  for (const auto& caps : std::vector<std::vector<Capability>>{{}, {drop()}, {delay(4)}, {drop(), delay(2)}}) {
    System s = twoStep(caps);
    CAPTURE(show(s));
    CHECK(terminalResources(s, true) == terminalResources(s, false));
  }
}

TEST_CASE("wrapping removes the effect of replays and redirects") {
  const auto baseline = terminalResources(twoStep({}), false);
  for (const auto& caps : std::vector<std::vector<Capability>>{
           {replay(2)}, {replay(6)}, {mc("dev1", "dev0", false, {act("", "", 5)})}}) {
    System s = twoStep(caps);
    CAPTURE(show(s));
    CHECK(terminalResources(s, true) == baseline);
  }
  System r = tCSS({mkPutN("putN", "dev1", "door", "lock")}, {{"door", "unlock"}}, {{"door", "unlock"}},
                  {divert("dev1", "dev2")});
  System plain = tCSS({mkPutN("putN", "dev1", "door", "lock")}, {{"door", "unlock"}}, {{"door", "unlock"}}, {});
  CHECK(terminalResources(r, false) != terminalResources(plain, false));
  auto wrapped = terminalResources(r, true);
  // a diverted sealed request is dropped at dev2, so dev2 never changes
  for (const auto& k : wrapped) CHECK(k.find("dev2.door=unlock") != std::string::npos);
}

TEST_CASE("transitions are duplicate free") {
  System s = canonical(iSys3r());
  for (int i = 0; i < 6; ++i) {
    auto ts = transitions(s);
    std::set<std::string> keys;
    for (const auto& t : ts) CHECK(keys.insert(encode(t.next)).second);
    if (ts.empty()) break;
    s = ts.back().next;
  }
}
