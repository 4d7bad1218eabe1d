#include "coapsec/scenarios.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "coapsec/applayer.hpp"
#include "coapsec/attack.hpp"

namespace coapsec {

// ---- application messages

namespace {

AMsg amsg(std::string id, std::string tgt, MsgType type, std::string meth, std::string path,
          Body body) {
  return AMsg{std::move(id), std::move(tgt), type, std::move(meth), std::move(path), "",
              std::move(body)};
}

}  // namespace

AMsg mkGetC(std::string id, std::string tgt, std::string path) {
  return amsg(std::move(id), std::move(tgt), MsgType::CON, "GET", std::move(path), std::nullopt);
}
AMsg mkGetN(std::string id, std::string tgt, std::string path) {
  return amsg(std::move(id), std::move(tgt), MsgType::NON, "GET", std::move(path), std::nullopt);
}
AMsg mkPutC(std::string id, std::string tgt, std::string path, std::string val) {
  return amsg(std::move(id), std::move(tgt), MsgType::CON, "PUT", std::move(path), std::move(val));
}
AMsg mkPutN(std::string id, std::string tgt, std::string path, std::string val) {
  return amsg(std::move(id), std::move(tgt), MsgType::NON, "PUT", std::move(path), std::move(val));
}
AMsg mkDelN(std::string id, std::string tgt, std::string path) {
  return amsg(std::move(id), std::move(tgt), MsgType::NON, "DELETE", std::move(path), std::nullopt);
}
AMsg startAMsg(std::string pid, std::string id) {
  return mkPutN(std::move(id), std::move(pid), "start", "start");
}
AMsg boatHereAMsg() { return mkPutN("BoatHere", "bctl", "boat", "here"); }

std::vector<AMsgItem> mkSigAMs(Nat n, Nat d) {
  std::vector<AMsgItem> out;
  for (Nat j = 1; j <= n; ++j) {
    out.push_back(mkPutN("putN", devId(j), "sig", "on"));
    if (d > 0) out.push_back(Pause{d});
    out.push_back(mkPutN("putN", devId(j), "sig", "off"));
  }
  return out;
}

std::vector<AMsgItem> mkGoAMs(Nat n) {
  std::vector<AMsgItem> out;
  for (Nat j = 1; j <= n; ++j) out.push_back(mkPutN("putNGo", devId(j), "sig", "go"));
  return out;
}

// ---- agents

CBnds mkCoapConf(Nat mqd, Nat w4ab, Nat msgSD) {
  return {{"ACK_TIMEOUT", 5}, {"ACK_RANDOM_FACTOR", 2}, {"MAX_RETRANSMIT", 1}, {"msgSD", msgSD},
          {"msgQD", mqd},     {"w4AckBd", w4ab},       {"ttl", 10}};
}

EndpointState mkInitDevAttrs(Nat mqd, Nat w4ab, Nat msgSD) {
  EndpointState e;
  e.config = mkCoapConf(mqd, w4ab, msgSD);
  return e;
}

std::string devId(Nat n) { return "dev" + std::to_string(n); }

Agent mkDevC(Nat n, Nat j, std::vector<AMsgItem> amsgl, RMap rbnds, Nat mqd, Nat w4ab) {
  EndpointState e = mkInitDevAttrs(mqd, w4ab);
  e.sendReqs = std::move(amsgl);
  e.rsrcs = std::move(rbnds);
  e.sndCtr = j;
  return Agent{devId(n), std::move(e)};
}

Agent mkDevA(std::string epid, Nat j, std::vector<AMsgItem> amsgl, RMap rbnds, Nat msgSD,
             std::map<std::string, std::string> akb, const std::string& rules) {
  EndpointState e = mkInitDevAttrs(0, 0, msgSD);
  e.sendReqs = std::move(amsgl);
  e.rsrcs = std::move(rbnds);
  e.sndCtr = j;
  if (!rules.empty() || !akb.empty()) {
    auto rs = ruleSetByName(rules);
    if (!rules.empty() && !rs) throw ScenarioError("unknown rule set '" + rules + "'");
    e.aconf = AppConf{std::move(akb), rs};
  }
  return Agent{std::move(epid), std::move(e)};
}

Agent mkAtt(std::vector<Capability> caps) {
  return Agent{"eve", AttackerState{{}, std::move(caps)}};
}

System mkSystem(std::vector<Agent> agents, bool withLog) {
  std::set<std::string> ids;
  for (const auto& a : agents)
    if (!ids.insert(a.id).second) throw ScenarioError("duplicate agent id '" + a.id + "'");
  System s;
  s.agents = std::move(agents);
  if (withLog) s.log.emplace();
  canonicalize(s);
  return s;
}

namespace {

Agent devOf(const DevSpec& d) { return mkDevC(d.n, d.j, d.amsgl, d.rbnds, d.mqd, d.w4ab); }

void addAttacker(std::vector<Agent>& agents, std::vector<Capability> caps) {
  if (!caps.empty()) agents.push_back(mkAtt(std::move(caps)));
}

}  // namespace

System tCS2C(const DevSpec& c, const DevSpec& s, std::vector<Capability> caps) {
  std::vector<Agent> agents{devOf(c), devOf(s)};
  addAttacker(agents, std::move(caps));
  return mkSystem(std::move(agents), false);
}

System tCS3C(const DevSpec& c, const DevSpec& s1, const DevSpec& s2, std::vector<Capability> caps) {
  std::vector<Agent> agents{devOf(c), devOf(s1), devOf(s2)};
  addAttacker(agents, std::move(caps));
  return mkSystem(std::move(agents), false);
}

System tCS(std::vector<AMsgItem> amsgl, RMap rb, std::vector<Capability> caps) {
  return tCS2C({0, 0, std::move(amsgl), {}, 5, 0}, {1, 1, {}, std::move(rb), 5, 0}, std::move(caps));
}

System tCSS(std::vector<AMsgItem> amsgl, RMap rb1, RMap rb2, std::vector<Capability> caps) {
  return tCS3C({0, 0, std::move(amsgl), {}, 5, 0}, {1, 1, {}, std::move(rb1), 5, 0},
               {2, 1, {}, std::move(rb2), 5, 0}, std::move(caps));
}

std::vector<Agent> CnS(Nat n, std::vector<AMsgItem> amsgl, RMap rbnds, Nat mqd, Nat w4ab) {
  std::vector<Agent> out;
  out.push_back(mkDevC(0, 0, std::move(amsgl), {}, mqd, w4ab));
  for (Nat j = 1; j <= n; ++j) out.push_back(mkDevC(j, j, {}, rbnds, mqd, w4ab));
  return out;
}

// ---- named scenarios

namespace {

RMap rb(std::string k, std::string v) { return RMap{{std::move(k), std::move(v)}}; }

std::vector<AMsgItem> doorSeq(const std::string& u, const std::string& g, const std::string& l) {
  return {mkPutC(u, "dev1", "door", "unlock"), mkPutN(g, "dev1", "sig", "go"),
          mkPutC(l, "dev1", "door", "lock")};
}

std::vector<Capability> redirectPair(bool active) {
  return {mc("dev1", "dev0", active, {act("dev2", "dev0", 0)}),
          mc("dev0", "dev2", active, {act("dev0", "dev1", 0)})};
}

System logged(System s) {
  s.log.emplace();
  return s;
}

}  // namespace

System iSys0() { return logged(tCS(doorSeq("putCDU", "putNSG", "putCDL"), rb("door", "lock"), {})); }
System iSys1() {
  return logged(tCS(doorSeq("putNDU", "putNSG", "putNDL"), rb("door", "lock"), {drop()}));
}
System iSys2() {
  return logged(tCS(doorSeq("putNDU", "putNSG", "putNDL"), rb("door", "lock"), {replay(10)}));
}
System iSys3a() {
  return logged(tCSS({mkGetN("getN", "dev1", "door")}, rb("door", "unlock"), rb("door", "lock"),
                     redirectPair(true)));
}
System iSys3r() {
  return logged(tCSS({mkGetN("getN", "dev1", "door")}, rb("door", "unlock"), rb("door", "lock"),
                     redirectPair(false)));
}

System raR1(Nat mqd, Nat w4b, Nat d, bool nso) {
  std::vector<AMsgItem> amsgl{mkPutN("putNDL", "dev1", "door", "lock"),
                              mkPutN("putNDU", "dev1", "door", "unlock")};
  if (nso) amsgl.push_back(mkPutN("putNS", "dev1", "signal", "on"));
  RMap srv{{"door", "unlock"}, {"sig", "off"}};
  return logged(tCS2C({0, 0, std::move(amsgl), {}, mqd, w4b}, {1, 1, {}, std::move(srv), 2, 0},
                      {mc("dev1", "dev0", false, {act("", "", d)})}));
}

std::vector<Capability> capsLevel(Nat level) {
  if (level < 1 || level > 3) throw ScenarioError("caps-" + std::to_string(level) + " is not defined");
  std::vector<Act> acts;
  for (Nat j = 0; j < level; ++j) acts.push_back(act(devId(j + 2), "", 0));
  return {mc("dev1", "dev0", false, std::move(acts))};
}

std::vector<Capability> capsDup(Nat n, Nat d) {
  std::vector<Capability> out;
  for (Nat j = 1; j <= n; ++j) out.push_back(mc(devId(j), "dev0", false, {act(devId(j + n), "dev0", d)}));
  return out;
}

System iSysX(Nat n, Nat d, std::vector<Capability> caps) {
  auto agents = CnS(n, mkSigAMs(n, d), rb("sig", "off"), 5, 0);
  agents.push_back(mkAtt(std::move(caps)));
  return mkSystem(std::move(agents), false);
}

System iSysY(Nat n, std::vector<Capability> caps) {
  auto agents = CnS(2 * n, mkGoAMs(n), rb("sig", "off"), 5, 0);
  agents.push_back(mkAtt(std::move(caps)));
  return mkSystem(std::move(agents), true);
}

System iSySZ(Nat mqd, Nat w4b) {
  return logged(tCS3C({0, 0, {mkGetN("getN0", "dev1", "door")}, {}, mqd, w4b},
                      {1, 1, {}, rb("door", "unlock"), 5, 0}, {2, 2, {}, rb("door", "lock"), 5, 0},
                      {mc("dev1", "dev0", false, {act("dev2", "", 0)}),
                       mc("dev0", "dev2", false, {act("", "dev1", 0)})}));
}

System caFig1_2(Nat mqd, Nat w4b) {
  return tCS2C({0, 0, {mkPutN("putN", "dev1", "door", "lock")}, {}, mqd, w4b},
               {1, 1, {}, rb("door", "unlocked"), 2, 0}, {drop()});
}

System caFig3(Nat d, Nat mqd, Nat w4b) {
  return tCS2C({0, 0,
                {mkPutN("putND", "dev1", "door", "unlock"), mkPutN("putNS", "dev1", "signal", "on")},
                {}, mqd, w4b},
               {1, 1, {}, rb("door", "lock"), 2, 0}, {drop(), delay(d)});
}

System caFig4x(Nat n, Nat mqd, Nat w4b) {
  return tCS2C({0, 0,
                {mkPutC("putC", "dev1", "door", "unlock"), mkPutN("putN", "dev1", "door", "lock")},
                {}, mqd, w4b},
               {1, 1, {}, rb("door", "lock"), 2, 0}, {drop(), delay(n)});
}

System caFig5x(Nat d, Nat mqd, Nat w4b) {
  return tCS2C({0, 0,
                {mkPutN("putNU", "dev1", "door", "unlock"), mkPutN("putNL", "dev1", "door", "lock")},
                {}, mqd, w4b},
               {1, 1, {}, rb("door", "lock"), 2, 0}, {drop(), delay(d)});
}

System caFig6x(Nat d, Nat mqd, Nat w4b) {
  return tCS2C({0, 0,
                {mkGetN("getN0", "dev1", "door"), mkPutN("putNU", "dev1", "door", "unlock"),
                 mkGetN("getN1", "dev1", "door")},
                {}, mqd, w4b},
               {1, 1, {}, rb("door", "lock"), 2, 0}, {drop(), drop(), delay(d)});
}

System caFig7x(Nat d, Nat mqd, Nat w4b) {
  return tCS2C({0, 0, {mkGetN("getN0", "dev1", "door1"), mkGetN("getN1", "dev1", "door2")}, {}, mqd, w4b},
               {1, 1, {}, RMap{{"door1", "lock"}, {"door2", "unlock"}}, 2, 0}, {drop(), delay(d)});
}

System caFig7mod(Nat mqd, Nat w4b) {
  return tCS3C({0, 0, {mkGetN("getN0", "dev1", "door")}, {}, mqd, w4b},
               {1, 1, {}, rb("door", "unlock"), 5, 0}, {2, 2, {}, rb("door", "lock"), 5, 0},
               {redirect("dev1", "dev2"), unredirect("dev1", "dev2")});
}

namespace {

std::vector<Agent> bridgeAgents(std::vector<AMsgItem> bsMsgs) {
  return {mkDevA("bctl", 1, {}, rb("boat", "none"), 2, {{"status", "idle"}}, "bridge-rules"),
          mkDevA("bs", 1, std::move(bsMsgs), {}, 6, {}, ""),
          mkDevA("ga", 1, {}, rb("gate", "open"), 4, {}, ""),
          mkDevA("br", 1, {}, rb("bridge", "close"), 6, {}, "")};
}

}  // namespace

System brInit() { return mkSystem(bridgeAgents({boatHereAMsg()}), false); }

System brInit2(Nat n) {
  return mkSystem(bridgeAgents({boatHereAMsg(), Pause{n}, boatHereAMsg()}), false);
}

System initRL(const std::string& pid, const std::string& gid, const std::string& aid,
              std::vector<AMsgItem> amsgl) {
  std::vector<Agent> agents{
      mkDevA(pid, 1, {}, {}, 2,
             {{"status", "idle"}, {"myarm", aid}, {"mygrip", gid}, {"goNI", "goR"}, {"goI", "goL"}},
             "pnp-rules"),
      mkDevA(aid, 1, {}, rb("arm", "goL"), 4, {}, ""),
      mkDevA(gid, 1, {}, rb("grip", "open"), 4, {}, ""),
      mkDevA("ps", 1, std::move(amsgl), {}, 6, {}, "")};
  return mkSystem(std::move(agents), false);
}

// ---- term syntax shared by caps and scenario specs

namespace {

struct Term {
  std::string name;
  bool quoted = false;
  bool call = false;
  std::vector<std::vector<Term>> args;  // each argument is a whitespace-separated sequence
};

class TermParser {
 public:
  explicit TermParser(std::string text) : s_(std::move(text)) {}

  std::vector<Term> sequence(const std::string& stops) {
    std::vector<Term> out;
    while (true) {
      skipWs();
      if (pos_ >= s_.size() || stops.find(s_[pos_]) != std::string::npos) return out;
      out.push_back(term());
    }
  }

  bool atEnd() {
    skipWs();
    return pos_ >= s_.size();
  }
  char peek() {
    skipWs();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  void advance() { ++pos_; }

 private:
  std::string s_;
  std::size_t pos_ = 0;

  void skipWs() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  static bool wordChar(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
  }

  Term term() {
    Term t;
    if (s_[pos_] == '"') {
      auto j = s_.find('"', pos_ + 1);
      if (j == std::string::npos) throw ScenarioError("unterminated string in '" + s_ + "'");
      t.name = s_.substr(pos_ + 1, j - pos_ - 1);
      t.quoted = true;
      pos_ = j + 1;
      return t;
    }
    std::size_t j = pos_;
    while (j < s_.size() && wordChar(s_[j])) ++j;
    if (j == pos_) throw ScenarioError(std::string("unexpected '") + s_[pos_] + "' in '" + s_ + "'");
    t.name = s_.substr(pos_, j - pos_);
    pos_ = j;
    if (pos_ < s_.size() && s_[pos_] == '(') {
      t.call = true;
      ++pos_;
      skipWs();
      if (pos_ < s_.size() && s_[pos_] == ')') {
        ++pos_;
        return t;
      }
      while (true) {
        t.args.push_back(sequence(",)"));
        skipWs();
        if (pos_ >= s_.size()) throw ScenarioError("missing ')' in '" + s_ + "'");
        char c = s_[pos_++];
        if (c == ')') break;
      }
    }
    return t;
  }
};

std::string argString(const std::vector<Term>& a, const std::string& ctx) {
  if (a.empty()) return "";
  if (a.size() != 1 || a[0].call) throw ScenarioError(ctx + ": expected a plain argument");
  return a[0].name;
}

Nat argNat(const std::vector<Term>& a, const std::string& ctx) {
  std::string s = argString(a, ctx);
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    throw ScenarioError(ctx + ": expected a natural number, got '" + s + "'");
  return std::stoull(s);
}

bool argBool(const std::vector<Term>& a, const std::string& ctx) {
  std::string s = argString(a, ctx);
  if (s == "true") return true;
  if (s == "false") return false;
  throw ScenarioError(ctx + ": expected true or false, got '" + s + "'");
}

void arity(const Term& t, std::size_t n) {
  if (t.args.size() != n)
    throw ScenarioError(t.name + " takes " + std::to_string(n) + " argument(s), got " +
                        std::to_string(t.args.size()));
}

std::vector<Capability> capsOfTerm(const Term& t) {
  const std::string& n = t.name;
  if (n == "mtC" || n == "none") {
    arity(t, 0);
    return {};
  }
  if (n == "drop") {
    arity(t, 0);
    return {drop()};
  }
  if (n == "delay" || n == "replay" || n == "mcX") {
    arity(t, 1);
    Nat d = argNat(t.args[0], n);
    return {n == "delay" ? delay(d) : n == "replay" ? replay(d) : mcX(d)};
  }
  if (n == "divert" || n == "undivert" || n == "redirect" || n == "unredirect") {
    arity(t, 2);
    std::string a = argString(t.args[0], n), b = argString(t.args[1], n);
    if (n == "divert") return {divert(a, b)};
    if (n == "undivert") return {undivert(a, b)};
    if (n == "redirect") return {redirect(a, b)};
    return {unredirect(a, b)};
  }
  if (n == "mc") {
    if (t.args.size() != 3 && t.args.size() != 4) throw ScenarioError("mc takes 3 or 4 arguments");
    std::string tp = argString(t.args[0], n), sp = argString(t.args[1], n);
    // the three-argument form is reactive
    bool active = t.args.size() == 4 ? argBool(t.args[2], n) : false;
    std::vector<Act> acts;
    for (const auto& a : t.args.back()) {
      if (a.name == "mtC" && !a.call) continue;
      if (a.name != "act" || a.args.size() != 3) throw ScenarioError("mc actions have the form act(t,s,n)");
      acts.push_back(act(argString(a.args[0], "act"), argString(a.args[1], "act"), argNat(a.args[2], "act")));
    }
    return {mc(tp, sp, active, std::move(acts))};
  }
  if (n.rfind("caps-", 0) == 0 && !t.call) {
    std::string lv = n.substr(5);
    if (lv.size() != 1 || !std::isdigit(static_cast<unsigned char>(lv[0])))
      throw ScenarioError("unknown capability set '" + n + "'");
    return capsLevel(static_cast<Nat>(lv[0] - '0'));
  }
  if (n == "caps2-2" || n == "caps3-3") {
    arity(t, 1);
    return capsDup(n == "caps2-2" ? 2 : 3, argNat(t.args[0], n));
  }
  throw ScenarioError("unknown capability '" + n + "'");
}

std::vector<Capability> capsOfSeq(const std::vector<Term>& seq) {
  std::vector<Capability> out;
  for (const auto& t : seq) {
    auto cs = capsOfTerm(t);
    out.insert(out.end(), cs.begin(), cs.end());
  }
  return out;
}

struct Entry {
  ScenarioInfo info;
  std::size_t nargs;
  std::function<System(const Term&)> build;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> e;
    auto add0 = [&](std::string name, std::string summary, System (*f)()) {
      e.push_back({{name, "", std::move(summary)}, 0, [f](const Term&) { return f(); }});
    };
    auto add2 = [&](std::string name, std::string summary, System (*f)(Nat, Nat)) {
      e.push_back({{name, "(mqd,w4b)", std::move(summary)}, 2, [f, name](const Term& t) {
                     return f(argNat(t.args[0], name), argNat(t.args[1], name));
                   }});
    };
    auto add3 = [&](std::string name, std::string summary, System (*f)(Nat, Nat, Nat)) {
      e.push_back({{name, "(d,mqd,w4b)", std::move(summary)}, 3, [f, name](const Term& t) {
                     return f(argNat(t.args[0], name), argNat(t.args[1], name), argNat(t.args[2], name));
                   }});
    };
    add0("iSys0", "door unlock/go/lock sequence, no attacker", iSys0);
    add0("iSys1", "iSys0 with a drop capability", iSys1);
    add0("iSys2", "iSys0 with replay(10)", iSys2);
    add0("iSys3a", "GET redirected to a second server, active edits", iSys3a);
    add0("iSys3r", "GET redirected to a second server, reactive copies", iSys3r);
    e.push_back({{"raR1", "(mqd,w4b,d,nso)", "reactive replay of the lock request"}, 4, [](const Term& t) {
                   return raR1(argNat(t.args[0], "raR1"), argNat(t.args[1], "raR1"),
                               argNat(t.args[2], "raR1"), argBool(t.args[3], "raR1"));
                 }});
    e.push_back({{"iSysX", "(n,d,caps)", "sequential on/off tasks, copies to other servers"}, 3,
                 [](const Term& t) {
                   return iSysX(argNat(t.args[0], "iSysX"), argNat(t.args[1], "iSysX"), capsOfSeq(t.args[2]));
                 }});
    e.push_back({{"iSysY", "(n,caps)", "process duplication onto a second server set"}, 2, [](const Term& t) {
                   return iSysY(argNat(t.args[0], "iSysY"), capsOfSeq(t.args[1]));
                 }});
    add2("iSySZ", "reactive GET spoofing", iSySZ);
    add2("caFig1.2", "request or response drop", caFig1_2);
    add3("caFig3", "request delay", caFig3);
    add3("caFig4x", "delay with reordering", caFig4x);
    add3("caFig5x", "response delay and mismatch", caFig5x);
    add3("caFig6x", "GET response delay and mismatch", caFig6x);
    add3("caFig7x", "mismatch across resources", caFig7x);
    add2("caFig7mod", "mismatch across servers", caFig7mod);
    add0("brInit", "movable bridge, one round", brInit);
    e.push_back({{"brInit2", "(n)", "movable bridge, two rounds n apart"}, 1, [](const Term& t) {
                   return brInit2(argNat(t.args[0], "brInit2"));
                 }});
    e.push_back({{"initRL", "(pid,gid,aid)", "pick-n-place, one start message"}, 3, [](const Term& t) {
                   std::string pid = argString(t.args[0], "initRL");
                   return initRL(pid, argString(t.args[1], "initRL"), argString(t.args[2], "initRL"),
                                 {startAMsg(pid, "PUTS")});
                 }});
    e.push_back({{"initRL2", "(pid,gid,aid,n)", "pick-n-place, two start messages n apart"}, 4,
                 [](const Term& t) {
                   std::string pid = argString(t.args[0], "initRL2");
                   return initRL(pid, argString(t.args[1], "initRL2"), argString(t.args[2], "initRL2"),
                                 {startAMsg(pid, "PUTS"), Pause{argNat(t.args[3], "initRL2")},
                                  startAMsg(pid, "PUTS")});
                 }});
    return e;
  }();
  return table;
}

void addCaps(System& s, std::vector<Capability> caps) {
  for (auto& a : s.agents) {
    if (auto* at = std::get_if<AttackerState>(&a.body)) {
      at->caps.insert(at->caps.end(), caps.begin(), caps.end());
      canonicalize(s);
      return;
    }
  }
  s.agents.push_back(mkAtt(std::move(caps)));
  canonicalize(s);
}

}  // namespace

std::vector<Capability> parseCaps(const std::string& text) {
  TermParser p(text);
  auto seq = p.sequence("");
  if (!p.atEnd()) throw ScenarioError("trailing input in capability list '" + text + "'");
  return capsOfSeq(seq);
}

std::vector<ScenarioInfo> scenarioRegistry() {
  std::vector<ScenarioInfo> out;
  for (const auto& e : entries()) out.push_back(e.info);
  return out;
}

System buildScenario(const std::string& spec) {
  TermParser p(spec);
  auto head = p.sequence("+");
  if (head.size() != 1) throw ScenarioError("expected a scenario name in '" + spec + "'");
  const Term& t = head[0];
  if (t.quoted) throw ScenarioError("expected a scenario name in '" + spec + "'");
  auto it = std::find_if(entries().begin(), entries().end(),
                         [&](const Entry& e) { return e.info.name == t.name; });
  if (it == entries().end()) throw ScenarioError("unknown scenario '" + t.name + "'");
  if (t.args.size() != it->nargs)
    throw ScenarioError(t.name + " takes " + std::to_string(it->nargs) + " argument(s)");
  System s = it->build(t);
  while (p.peek() == '+') {
    p.advance();
    auto ext = p.sequence("+");
    if (ext.size() != 1) throw ScenarioError("bad suffix in '" + spec + "'");
    if (ext[0].name == "log" && !ext[0].call) {
      if (!s.log) s.log.emplace();
    } else if (ext[0].name == "caps" && ext[0].call) {
      std::vector<Capability> caps;
      for (const auto& a : ext[0].args) {
        auto cs = capsOfSeq(a);
        caps.insert(caps.end(), cs.begin(), cs.end());
      }
      addCaps(s, std::move(caps));
    } else {
      addCaps(s, capsOfTerm(ext[0]));
    }
  }
  if (!p.atEnd()) throw ScenarioError("trailing input in '" + spec + "'");
  return s;
}

// ---- JSON scenarios

namespace {

std::vector<AMsgItem> amsgsOfJson(const nlohmann::json& j) {
  std::vector<AMsgItem> out;
  for (const auto& m : j) {
    if (m.contains("pause")) {
      out.push_back(Pause{m.at("pause").get<Nat>()});
      continue;
    }
    AMsg a;
    a.appId = m.at("id").get<std::string>();
    a.tgt = m.at("tgt").get<std::string>();
    auto ty = parseMsgType(m.value("type", std::string("NON")));
    if (!ty) throw ScenarioError("bad message type in scenario file");
    a.type = *ty;
    a.method = m.value("method", std::string("GET"));
    if (!methodCode(a.method)) throw ScenarioError("bad method '" + a.method + "' in scenario file");
    a.path = m.value("path", std::string());
    a.qparams = m.value("query", std::string());
    if (m.contains("body") && !m.at("body").is_null()) a.body = m.at("body").get<std::string>();
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace

System scenarioFromJson(const std::string& text) {
  try {
    auto j = nlohmann::json::parse(text);
    std::vector<Agent> agents;
    for (const auto& d : j.at("devices")) {
      EndpointState e = mkInitDevAttrs(d.value("mqd", Nat{5}), d.value("w4ab", Nat{0}), d.value("msgSD", Nat{2}));
      e.sndCtr = d.value("sndCtr", Nat{0});
      if (d.contains("sendReqs")) e.sendReqs = amsgsOfJson(d.at("sendReqs"));
      if (d.contains("rsrcs")) e.rsrcs = d.at("rsrcs").get<RMap>();
      std::string rules = d.value("rules", std::string());
      std::map<std::string, std::string> akb;
      if (d.contains("akb")) akb = d.at("akb").get<std::map<std::string, std::string>>();
      if (!rules.empty() || !akb.empty()) {
        auto rs = ruleSetByName(rules);
        if (!rules.empty() && !rs) throw ScenarioError("unknown rule set '" + rules + "'");
        e.aconf = AppConf{std::move(akb), rs};
      }
      agents.push_back(Agent{d.at("id").get<std::string>(), std::move(e)});
    }
    auto caps = parseCaps(j.value("caps", std::string()));
    if (!caps.empty()) agents.push_back(mkAtt(std::move(caps)));
    return mkSystem(std::move(agents), j.value("log", false));
  } catch (const nlohmann::json::exception& ex) {
    throw ScenarioError(std::string("scenario file: ") + ex.what());
  }
}

System loadScenarioFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot read scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return scenarioFromJson(ss.str());
}

bool isInitial(const System& s) {
  if (!s.net.empty()) return false;
  for (const auto& a : s.agents) {
    const EndpointState* e = std::get_if<EndpointState>(&a.body);
    if (auto* w = std::get_if<WrapperState>(&a.body)) {
      if (!w->local.empty()) return false;
      e = &w->inner;
    }
    if (!e) continue;
    if (!e->w4Ack.empty() || !e->w4Rsp.empty() || !e->rspSntD.empty() || !e->rspRcd.empty() || e->ctr != 0)
      return false;
  }
  return true;
}

}  // namespace coapsec
