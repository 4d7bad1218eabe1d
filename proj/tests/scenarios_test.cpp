#include <doctest.h>

#include "coapsec/attack.hpp"
#include "coapsec/scenarios.hpp"

using namespace coapsec;

namespace {

std::string dataFile(const char* name) { return std::string(COAPSEC_TEST_DATA) + "/" + name; }

const std::vector<std::string> kSpecs = {
    "iSys0", "iSys1", "iSys2", "iSys3a", "iSys3r", "raR1(5,0,10,false)", "iSysX(3,0,caps-1)",
    "iSysY(2,caps2-2(0))", "iSySZ(5,0)", "caFig1.2(5,0)", "caFig3(10,5,0)", "caFig4x(2,5,0)",
    "caFig5x(10,5,0)", "caFig6x(10,5,0)", "caFig7x(10,5,0)", "caFig7mod(5,0)", "brInit",
    "brInit2(40)", "initRL(pctl,gr,arm)", "initRL2(pctl,gr,arm,40)"};

}  // namespace

TEST_CASE("every named scenario starts in an initial state") {
  for (const auto& spec : kSpecs) {
    CAPTURE(spec);
    System s = buildScenario(spec);
    CHECK(isInitial(s));
    CHECK(s == canonical(s));
  }
}

TEST_CASE("registry entries are unique and documented") {
  std::set<std::string> names;
  for (const auto& info : scenarioRegistry()) {
    CHECK(names.insert(info.name).second);
    CHECK_FALSE(info.summary.empty());
  }
  CHECK(names.size() == kSpecs.size());
}

TEST_CASE("log presence follows the scenario and the suffix") {
  CHECK(buildScenario("iSys0").log);
  CHECK(buildScenario("raR1(5,0,10,false)").log);
  CHECK_FALSE(buildScenario("iSysX(3,0,caps-1)").log);
  CHECK(buildScenario("iSysX(3,0,caps-1)+log").log);
  CHECK_FALSE(buildScenario("brInit").log);
}

TEST_CASE("capability suffixes extend or create the attacker") {
  System s = buildScenario("brInit+caps(mcX(20))");
  REQUIRE(attackerOf(s));
  CHECK(attackerOf(s)->caps == std::vector<Capability>{mcX(20)});
  s = buildScenario("iSys1+drop");
  REQUIRE(attackerOf(s));
  CHECK(attackerOf(s)->caps.size() == 2);
}

TEST_CASE("capability text") {
  CHECK(parseCaps("") == std::vector<Capability>{});
  CHECK(parseCaps("drop delay(3)") == std::vector<Capability>{drop(), delay(3)});
  CHECK(parseCaps("replay(2) mcX(5)") == std::vector<Capability>{replay(2), mcX(5)});
  CHECK(parseCaps("divert(dev1,dev2)") == std::vector<Capability>{divert("dev1", "dev2")});
  CHECK(parseCaps("mc(dev1,dev0,false,act(dev2,\"\",0) act(dev3,\"\",4))") ==
        std::vector<Capability>{mc("dev1", "dev0", false, {act("dev2", "", 0), act("dev3", "", 4)})});
  CHECK(parseCaps("caps-2") == capsLevel(2));
  CHECK(parseCaps("caps3-3(15)") == capsDup(3, 15));
  CHECK_THROWS_AS(parseCaps("caps-4"), ScenarioError);
  CHECK_THROWS_AS(parseCaps("teleport"), ScenarioError);
  CHECK_THROWS_AS(parseCaps("delay(x)"), ScenarioError);
  CHECK_THROWS_AS(parseCaps("delay(3"), ScenarioError);
}

TEST_CASE("bad scenario specs") {
  CHECK_THROWS_AS(buildScenario("nothing"), ScenarioError);
  CHECK_THROWS_AS(buildScenario("caFig3(1,2)"), ScenarioError);
  CHECK_THROWS_AS(buildScenario("caFig3(a,5,0)"), ScenarioError);
  CHECK_THROWS_AS(buildScenario("iSys0 junk"), ScenarioError);
  CHECK_THROWS_AS(buildScenario("iSys0+wat"), ScenarioError);
}

TEST_CASE("duplicate agent ids are refused") {
  CHECK_THROWS_AS(mkSystem({mkDevC(0, 0, {}, {}, 5, 0), mkDevC(0, 1, {}, {}, 5, 0)}, false), ScenarioError);
  CHECK_THROWS_AS(loadScenarioFile(dataFile("duplicate.json")), ScenarioError);
}

TEST_CASE("JSON scenario files") {
  System s = loadScenarioFile(dataFile("door.json"));
  CHECK(isInitial(s));
  CHECK(s.log);
  REQUIRE(attackerOf(s));
  CHECK(attackerOf(s)->caps == std::vector<Capability>{drop(), delay(3)});
  const EndpointState* d0 = endpointOf(s, "dev0");
  REQUIRE(d0);
  REQUIRE(d0->sendReqs.size() == 3);
  const auto& put = std::get<AMsg>(d0->sendReqs[0]);
  CHECK(std::string(toString(put.type)) == "CON");
  CHECK(put.body == "lock");
  CHECK(std::get<Pause>(d0->sendReqs[1]).duration == 4);
  CHECK(std::get<AMsg>(d0->sendReqs[2]).method == "GET");
  CHECK(endpointOf(s, "dev1")->rsrcs.at("door") == "unlock");
  CHECK(endpointOf(s, "dev1")->sndCtr == 1);

  // a file that spells out a named scenario builds the same state
  CHECK(loadScenarioFile(dataFile("bridge.json")) == brInit());

  CHECK_THROWS_AS(loadScenarioFile(dataFile("bad_rules.json")), ScenarioError);
  CHECK_THROWS_AS(loadScenarioFile(dataFile("missing.json")), ScenarioError);
  CHECK_THROWS_AS(scenarioFromJson("{"), ScenarioError);
  CHECK_THROWS_AS(scenarioFromJson("{\"devices\": [{\"id\": \"a\", \"sendReqs\": [{\"tgt\": \"b\"}]}]}"),
                  ScenarioError);
}
