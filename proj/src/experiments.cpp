#include "coapsec/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "coapsec/scenarios.hpp"

namespace coapsec {

namespace {

using M = SearchMode;

Experiment ex(std::string suite, std::string id, std::string scenario, M mode, std::string goal,
              std::optional<std::size_t> expected, std::optional<std::size_t> visited = std::nullopt) {
  Experiment e;
  e.suite = std::move(suite);
  e.id = std::move(id);
  e.scenario = std::move(scenario);
  e.mode = mode;
  e.goal = std::move(goal);
  e.expected = expected;
  e.refVisited = visited;
  return e;
}

Experiment dial(Experiment e, std::optional<std::size_t> expected, std::optional<std::size_t> visited) {
  e.id += "-D";
  e.dialected = true;
  e.expected = expected;
  e.refVisited = visited;
  e.expectAttack = false;
  e.attackedMsgs.clear();
  return e;
}

Experiment exhausted(Experiment e) {
  e.capsExhausted = true;
  return e;
}

void coreSuite(std::vector<Experiment>& v) {
  const std::string unlocked = "checkRsrc dev1 door unlock";
  auto a = ex("core", "iSys0-unlock", "iSys0", M::Final, unlocked, 0);
  a.bound = 1;
  v.push_back(a);
  auto b = ex("core", "iSys1-unlock", "iSys1", M::Final, unlocked, 0);
  b.bound = 1;
  v.push_back(b);
  v.push_back(ex("core", "iSys2-lock-then-unlock", "iSys2", M::Final,
                 "subLIL [rcvP dev1 door lock ; rcvP dev1 door unlock]", 2));
  const std::string spoof = "and (checkRsrc dev1 door unlock) (hasGetRsp dev0 dev1 getN lock)";
  v.push_back(ex("core", "iSys3a-spoof", "iSys3a", M::Final, spoof, 4, 33));
  v.push_back(ex("core", "iSys3r-spoof", "iSys3r", M::Final, spoof, 4, 109));
}

void timingSuite(std::vector<Experiment>& v) {
  v.push_back(ex("timing", "raR1-lock", "raR1(5,0,10,false)", M::Final, "checkRsrc dev1 door lock", 2, 101));
  v.push_back(ex("timing", "raR1-lock-before-signal", "raR1(5,0,10,true)", M::Final,
                 "and (checkRsrc dev1 door lock) "
                 "(subLIL [rcvP dev1 door unlock ; rcvP dev1 door lock ; rcvP dev1 signal \"\"])",
                 2, 231));
  v.push_back(ex("timing", "raR1-delay5", "raR1(5,0,5,false)", M::Final, "checkRsrc dev1 door lock", 0));
  v.push_back(ex("timing", "raR1-delay15", "raR1(5,0,15,false)", M::Final, "checkRsrc dev1 door lock", 0));
  v.push_back(ex("timing", "iSysX-caps1-gt1", "iSysX(3,0,caps-1)", M::Plus, "epswrbGT sig on 1", 132, 767));
  v.push_back(ex("timing", "iSysX-caps2-gt2", "iSysX(3,0,caps-2)", M::Plus, "epswrbGT sig on 2", 182, 721));
  v.push_back(ex("timing", "iSysX-caps2-overlap", "iSysX(3,0,caps-2)+log", M::Plus,
                 "subLIL [rcvP dev1 sig on ; rcvP dev2 sig on ; rcvP dev1 sig off]", 342, 3598));
  v.push_back(ex("timing", "iSysX-caps2-double-overlap", "iSysX(3,0,caps-2)+log", M::Plus,
                 "and (subLIL [rcvP dev1 sig on ; rcvP dev2 sig on ; rcvP dev1 sig off]) "
                 "(subLIL [rcvP dev2 sig on ; rcvP dev3 sig on ; rcvP dev2 sig off])",
                 62, 3594));
  v.push_back(ex("timing", "iSysY-2-concurrent", "iSysY(2,caps2-2(0))", M::Final,
                 "and (subLIL [rcvP dev3 sig \"\" ; rcvP dev4 sig \"\"]) "
                 "(subLIL [rcvP dev3 sig \"\" ; rcvP dev2 sig \"\"])",
                 16, 534));
  v.push_back(ex("timing", "iSysY-2-after", "iSysY(2,caps2-2(15))", M::Final,
                 "and (subLIL [rcvP dev3 sig \"\" ; rcvP dev4 sig \"\"]) "
                 "(subLIL [rcvP dev2 sig \"\" ; rcvP dev3 sig \"\"])",
                 4, 179));
  v.push_back(ex("timing", "iSysY-3-interleaved", "iSysY(3,caps3-3(0))", M::Final,
                 "and (subLIL [rcvP dev4 sig \"\" ; rcvP dev5 sig \"\" ; rcvP dev6 sig \"\"]) "
                 "(subLIL [rcvP dev1 sig \"\" ; rcvP dev4 sig \"\" ; rcvP dev2 sig \"\"]) "
                 "(subLIL [rcvP dev2 sig \"\" ; rcvP dev5 sig \"\" ; rcvP dev3 sig \"\" ; rcvP dev6 sig \"\"])",
                 8, 2845));
  v.push_back(ex("timing", "iSysY-3-after", "iSysY(3,caps3-3(15))", M::Final,
                 "and (subLIL [rcvP dev4 sig \"\" ; rcvP dev5 sig \"\" ; rcvP dev6 sig \"\"]) "
                 "(subLIL [rcvP dev3 sig \"\" ; rcvP dev4 sig \"\"])",
                 8, 683));
  v.push_back(ex("timing", "iSySZ-spoof", "iSySZ(5,0)", M::Final,
                 "and (hasGetRsp dev0 dev1 getN0 lock) (checkRsrc dev1 door unlock)", 4, 109));
}

void dialectSuite(std::vector<Experiment>& v) {
  auto a = ex("dialect", "raR1-lock-D", "raR1(5,0,10,false)", M::Final, "checkRsrc dev1 door lock", 0, 121);
  a.dialected = true;
  v.push_back(a);
  auto b = ex("dialect", "iSysX-caps1-gt1-D", "iSysX(3,0,caps-1)", M::Plus, "epswrbGT sig on 1", 0, 553);
  b.dialected = true;
  v.push_back(b);
}

void catalogSuite(std::vector<Experiment>& v) {
  auto add = [&](Experiment e) { v.push_back(exhausted(std::move(e))); };
  auto both = [&](Experiment e, std::optional<std::size_t> dexp, std::optional<std::size_t> dvis) {
    e = exhausted(std::move(e));
    v.push_back(e);
    v.push_back(dial(e, dexp, dvis));
  };
  const std::string f12 = "caFig1.2(5,0)";
  both(ex("catalog", "caFig1-request-drop", f12, M::Final,
          "and (not (hasRspTSnt dev1 dev0 putN)) (rspPend dev0 dev1 putN)", 2, 7),
       2, 9);
  both(ex("catalog", "caFig1-resource", f12, M::Final, "checkRsrc dev1 door unlocked", 2, 7), 2, 9);
  add(ex("catalog", "caFig2-response-drop", f12, M::Final,
         "and (hasRspTSnt dev1 dev0 putN) (checkRsrc dev1 door lock) (rspPend dev0 dev1 putN)", 2, 13));
  add(ex("catalog", "caFig12-no-drop", f12, M::Final,
         "and (hasRspTSnt dev1 dev0 putN) (hasRspTRcd dev0 dev1 putN)", 0));
  const std::string f3 = "caFig3(15,5,0)";
  both(ex("catalog", "caFig3-attack", f3, M::Final,
          "and (checkRsrc dev1 door unlock) (rspTSntBefore dev1 dev0 putNS putND) (rspPend dev0 dev1 putND)",
          4, 330),
       4, 496);
  add(ex("catalog", "caFig3-fail", f3, M::Final,
         "and (checkRsrc dev1 door unlock) (rspTSntBefore dev1 dev0 putND putNS) (hasRspTRcd dev0 dev1 putND)",
         4));
  const std::string f4 = "caFig4x(10,5,0)";
  both(ex("catalog", "caFig4-attack", f4, M::Final,
          "and (checkRsrc dev1 door unlock) (hasRspTSnt dev1 dev0 putC) (hasRspTSnt dev1 dev0 putN) "
          "(rspTSntBefore dev1 dev0 putC putN) (rspTSntBefore dev1 dev0 putN putC) "
          "(hasRspTRcd dev0 dev1 putN) (hasRspTRcd dev0 dev1 putC)",
          8, 2600),
       16, 10167);
  add(ex("catalog", "caFig4-fail", f4, M::Final,
         "and (checkRsrc dev1 door lock) (hasRspTSnt dev1 dev0 putC) (hasRspTSnt dev1 dev0 putN) "
         "(rspTSntBefore dev1 dev0 putC putN) (hasRspTRcd dev0 dev1 putN) (hasRspTRcd dev0 dev1 putC)",
         45, 2586));
  const std::string f5 = "caFig5x(10,5,0)";
  both(ex("catalog", "caFig5-intended", f5, M::Final,
          "and (hasRspTSnt dev1 dev0 putNU) (not (hasRspTSnt dev1 dev0 putNL)) (checkRsrc dev1 door unlock) "
          "(hasRspTRcd dev0 dev1 putNL)",
          0),
       0, std::nullopt);
  both(ex("catalog", "caFig5-alternative", f5, M::Final,
          "and (hasRspTSnt dev1 dev0 putNU) (hasRspTSnt dev1 dev0 putNL) (rspTSntBefore dev1 dev0 putNL putNU) "
          "(checkRsrc dev1 door unlock) (hasRspTRcd dev0 dev1 putNL)",
          4, 330),
       4, 499);
  const std::string f6 = "caFig6x(10,5,0)";
  const std::string f6server =
      "(hasRspTSnt dev1 dev0 getN0) (hasRspTSnt dev1 dev0 putNU) (rspTSntBefore dev1 dev0 getN0 putNU) "
      "(checkRsrc dev1 door unlock) (not (hasRspTSnt dev1 dev0 getN1)) ";
  both(ex("catalog", "caFig6-intended", f6, M::Final, "and " + f6server + "(hasGetRsp dev0 dev1 getN1 lock)", 0),
       0, std::nullopt);
  both(ex("catalog", "caFig6-alternative", f6, M::Final,
          "and " + f6server + "(hasGetRsp dev0 dev1 getN0 lock) (rspPend dev0 dev1 getN1) (rspPend dev0 dev1 putNU)",
          18, 2742),
       18, 4675);
  both(ex("catalog", "caFig7-mismatch", "caFig7x(10,5,0)", M::Final,
          "and (hasRspTSnt dev1 dev0 getN0) (not (hasRspTSnt dev1 dev0 getN1)) (hasGetRsp dev0 dev1 getN1 lock)", 0),
       0, std::nullopt);
  both(ex("catalog", "caFig7mod-redirect", "caFig7mod(5,0)", M::Final,
          "and (not (hasRspTSnt dev1 dev0 getN0)) (hasRspTSnt dev2 dev0 getN0) (checkRsrc dev1 door unlock) "
          "(hasGetRsp dev0 dev1 getN0 lock)",
          4, 33),
       0, 21);
}

struct Cell {
  int rounds;
  Nat delay;
  std::vector<std::string> msgs;  // empty: no attack
  bool inconclusive = false;
};

void appsSuite(std::vector<Experiment>& v) {
  struct Inv {
    std::string name, goal;
    std::vector<Cell> cells;
  };
  const std::vector<Inv> bridge = {
      {"bclIdleInv", "bclIdleInv bctl br ga", {{1, 20, {"GateCL", "BridgeOp"}}, {2, 40, {"GateCL", "BridgeOp"}}}},
      {"brNClInv", "brNClInv bctl br ga", {{1, 20, {"BridgeOp"}}, {2, 20, {"BridgeOp"}}}},
      {"gateNClInv", "gateNClInv bctl br ga", {{1, 20, {"BridgeOp"}}, {2, 20, {"BridgeOp"}}}},
      {"boatPassInv", "boatPassInv bctl bs br ga", {{1, 20, {}}, {1, 40, {}}, {2, 20, {"BridgeCl", "GateOp"}}}},
  };
  const std::vector<Inv> pnp = {
      {"pnpIdleInv", "pnpIdleInv pctl gr arm goL", {{1, 20, {"ArmGoNI", "GripCl"}}, {2, 20, {"ArmGoNI", "GripCl"}}}},
      {"armGoingIInv", "armGoingIInv pctl gr arm goL", {{1, 20, {}}, {1, 40, {}}, {2, 20, {"GripOp"}}}},
      {"armGoingNIInv", "armGoingNIInv pctl gr arm goR",
       {{1, 0, {}}, {1, 20, {}}, {1, 40, {}}, {2, 20, {"GripCl"}}}},
      {"gripClosingInv", "gripClosingInv pctl gr arm goR", {{1, 20, {}}, {1, 40, {}}, {2, 20, {"ArmGoI"}}}},
      {"gripOpeningInv", "gripOpeningInv pctl gr arm goL", {{1, 20, {}}, {1, 40, {}}, {2, 20, {}, true}}},
  };
  auto family = [&](const std::vector<Inv>& invs, const std::string& one, const std::string& two,
                    const std::string& base1, const std::string& base2) {
    for (const auto& inv : invs) {
      v.push_back(ex("apps", inv.name + "-1-noatt", base1, M::Plus, inv.goal, 0));
      v.push_back(ex("apps", inv.name + "-2-noatt", base2, M::Plus, inv.goal, 0));
      for (const auto& c : inv.cells) {
        const std::string sc =
            (c.rounds == 1 ? one : two) + "+log+mcX(" + std::to_string(c.delay) + ")";
        auto e = ex("apps", inv.name + "-" + std::to_string(c.rounds) + "-mcX" + std::to_string(c.delay), sc,
                    M::Plus, inv.goal, std::nullopt);
        if (c.inconclusive) {
          e.reportOnly = true;
        } else if (c.msgs.empty()) {
          e.expected = 0;
        } else {
          e.expectAttack = true;
          e.attackedMsgs = c.msgs;
        }
        v.push_back(e);
        if (!c.inconclusive) v.push_back(dial(e, 0, std::nullopt));
      }
    }
  };
  family(bridge, "brInit", "brInit2(40)", "brInit", "brInit2(40)");
  family(pnp, "initRL(pctl,gr,arm)", "initRL2(pctl,gr,arm,40)", "initRL(pctl,gr,arm)+log",
         "initRL2(pctl,gr,arm,40)+log");
}

const std::vector<std::string> kAttackIds = {"GateCL",  "BridgeOp", "BSPass", "BridgeCl", "GateOp", "BoatHere",
                                             "ArmGoNI", "GripCl",   "ArmGoI", "GripOp",   "PnPDone", "PUTS"};

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

const std::vector<std::string>& suiteNames() {
  static const std::vector<std::string> names = {"core", "timing", "dialect", "catalog", "apps"};
  return names;
}

std::vector<Experiment> experiments(const std::string& suite) {
  std::vector<Experiment> v;
  if (suite == "all" || suite == "core") coreSuite(v);
  if (suite == "all" || suite == "timing") timingSuite(v);
  if (suite == "all" || suite == "dialect") dialectSuite(v);
  if (suite == "all" || suite == "catalog") catalogSuite(v);
  if (suite == "all" || suite == "apps") appsSuite(v);
  if (v.empty()) throw std::invalid_argument("unknown suite '" + suite + "'");
  return v;
}

bool ExperimentOutcome::solutionsOk() const {
  if (limitHit) return exp.reportOnly;
  if (exp.reportOnly) return true;
  if (exp.expected) return solutions == *exp.expected;
  if (exp.expectAttack) {
    if (solutions == 0) return false;
    return std::any_of(exp.attackedMsgs.begin(), exp.attackedMsgs.end(), [&](const std::string& m) {
      return std::any_of(attacked.begin(), attacked.end(), [&](const std::string& a) { return lower(a) == lower(m); });
    });
  }
  return true;
}

bool ExperimentOutcome::visitedWithin(double tolerance) const {
  if (!exp.refVisited) return true;
  const double p = static_cast<double>(*exp.refVisited);
  return std::abs(static_cast<double>(visited) - p) <= tolerance * p;
}

SearchQuery queryFor(const Experiment& e) {
  SearchQuery q;
  q.initial = buildScenario(e.scenario);
  q.mode = e.mode;
  q.bound = e.bound;
  q.goal = parseGoal(e.goal);
  q.requireCapsExhausted = e.capsExhausted;
  q.dialected = e.dialected;
  return q;
}

ExperimentOutcome runExperiment(const Experiment& e, unsigned workers, std::size_t maxStates,
                                bool debugInvariants) {
  ExperimentOutcome o;
  o.exp = e;
  SearchQuery q = queryFor(e);
  q.workers = workers;
  q.maxStates = maxStates;
  q.debugInvariants = debugInvariants;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    SearchResult r = search(q);
    o.solutions = r.solutions.size();
    o.visited = r.visited;
    for (std::size_t i = 0; i < r.solutions.size(); ++i) {
      auto w = witnessTrace(r, i);
      for (const auto& l : w.labels) {
        if (l.rfind("mcx ", 0) != 0 && l.rfind("attack ", 0) != 0) continue;
        for (const auto& id : kAttackIds)
          if (l.find("-" + id + "-") != std::string::npos) o.attacked.insert(id);
        break;
      }
      if (i + 1 == r.solutions.size()) o.lastLog = w.log;
    }
  } catch (const StateLimitExceeded& ex) {
    o.limitHit = true;
    o.visited = ex.visited;
    o.solutions = ex.solutions;
  }
  o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return o;
}

}  // namespace coapsec
