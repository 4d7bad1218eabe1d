#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coapsec/model.hpp"

namespace coapsec {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- application messages

AMsg mkGetC(std::string id, std::string tgt, std::string path);
AMsg mkGetN(std::string id, std::string tgt, std::string path);
AMsg mkPutC(std::string id, std::string tgt, std::string path, std::string val);
AMsg mkPutN(std::string id, std::string tgt, std::string path, std::string val);
AMsg mkDelN(std::string id, std::string tgt, std::string path);
AMsg startAMsg(std::string pid, std::string id);
AMsg boatHereAMsg();

// on/off pairs for dev1..devn, a pause of d between the on and the off
std::vector<AMsgItem> mkSigAMs(Nat n, Nat d);
// one sig=go PUT for each of dev1..devn
std::vector<AMsgItem> mkGoAMs(Nat n);

// ---- agents and configurations

CBnds mkCoapConf(Nat mqd, Nat w4ab, Nat msgSD = 2);
EndpointState mkInitDevAttrs(Nat mqd, Nat w4ab, Nat msgSD = 2);
std::string devId(Nat n);
Agent mkDevC(Nat n, Nat j, std::vector<AMsgItem> amsgl, RMap rbnds, Nat mqd, Nat w4ab);
Agent mkDevA(std::string epid, Nat j, std::vector<AMsgItem> amsgl, RMap rbnds, Nat msgSD,
             std::map<std::string, std::string> akb, const std::string& rules);
Agent mkAtt(std::vector<Capability> caps);

struct DevSpec {
  Nat n = 0;
  Nat j = 0;
  std::vector<AMsgItem> amsgl;
  RMap rbnds;
  Nat mqd = 5;
  Nat w4ab = 0;
};

// Throws ScenarioError on duplicate ids.
System mkSystem(std::vector<Agent> agents, bool withLog);

System tCS2C(const DevSpec& c, const DevSpec& s, std::vector<Capability> caps);
System tCS3C(const DevSpec& c, const DevSpec& s1, const DevSpec& s2, std::vector<Capability> caps);
System tCS(std::vector<AMsgItem> amsgl, RMap rb, std::vector<Capability> caps);
System tCSS(std::vector<AMsgItem> amsgl, RMap rb1, RMap rb2, std::vector<Capability> caps);
// dev0 is the client, dev1..devn are servers with sndCtr equal to their index
std::vector<Agent> CnS(Nat n, std::vector<AMsgItem> amsgl, RMap rbnds, Nat mqd, Nat w4ab);

// ---- named scenarios

System iSys0();
System iSys1();
System iSys2();
System iSys3a();
System iSys3r();
System raR1(Nat mqd, Nat w4b, Nat d, bool nso);
std::vector<Capability> capsLevel(Nat level);            // caps-1 .. caps-3
std::vector<Capability> capsDup(Nat n, Nat d);           // caps2-2(d), caps3-3(d)
System iSysX(Nat n, Nat d, std::vector<Capability> caps);
System iSysY(Nat n, std::vector<Capability> caps);
System iSySZ(Nat mqd, Nat w4b);
System caFig1_2(Nat mqd, Nat w4b);
System caFig3(Nat d, Nat mqd, Nat w4b);
System caFig4x(Nat n, Nat mqd, Nat w4b);
System caFig5x(Nat d, Nat mqd, Nat w4b);
System caFig6x(Nat d, Nat mqd, Nat w4b);
System caFig7x(Nat d, Nat mqd, Nat w4b);
System caFig7mod(Nat mqd, Nat w4b);
System brInit();
System brInit2(Nat n);
System initRL(const std::string& pid, const std::string& gid, const std::string& aid,
              std::vector<AMsgItem> amsgl);

// ---- textual forms

// drop, delay(n), replay(n), divert(a,b), undivert(a,b), redirect(a,b), unredirect(a,b),
// mcX(n), mc(t,s,bool,act(t,s,n) act(...)), caps-1..3, caps2-2(d), caps3-3(d);
// separated by whitespace at the top level.
std::vector<Capability> parseCaps(const std::string& text);

struct ScenarioInfo {
  std::string name;
  std::string params;  // signature shown by `list`
  std::string summary;
};

std::vector<ScenarioInfo> scenarioRegistry();

// "name", "name(args)", optionally followed by "+log" and/or "+caps(...)" suffixes that add
// a log element or attacker capabilities. Throws ScenarioError.
System buildScenario(const std::string& spec);

// JSON scenario description. Throws ScenarioError.
System loadScenarioFile(const std::string& path);
System scenarioFromJson(const std::string& text);

// Empty nets and fresh endpoint ledgers.
bool isInitial(const System& s);

}  // namespace coapsec
