#include <doctest.h>

#include <algorithm>

#include "coapsec/model.hpp"
#include "coapsec/scenarios.hpp"

using namespace coapsec;

TEST_CASE("method codes and classification") {
  CHECK(methodCode("GET") == "0.01");
  CHECK(methodCode("PUT") == "0.03");
  CHECK(methodCode("DELETE") == "0.04");
  CHECK_FALSE(methodCode("PATCH"));

  Content c;
  c.head.code = "0.03";
  auto k = classify(c);
  CHECK(k.kind == Classification::Kind::Request);
  CHECK(k.method == "PUT");

  c.head.code = "2.04";
  k = classify(c);
  CHECK(k.kind == Classification::Kind::Response);
  CHECK(k.success);

  c.head.code = "4.04";
  k = classify(c);
  CHECK(k.kind == Classification::Kind::Response);
  CHECK_FALSE(k.success);

  c.head.code = "";
  CHECK(classify(c).kind == Classification::Kind::Empty);
  c.head.code = "7.77";
  CHECK(classify(c).kind == Classification::Kind::Unknown);
}

TEST_CASE("mid and token generation") {
  CHECK(genMid("dev0-putN", 0) == "dev0-putN-m0");
  CHECK(genTok("dev0-putN", 1) == "dev0-putN-t1");
  CHECK(genMid("dev1", 12) == "dev1-m12");
}

TEST_CASE("selectors") {
  Message m = mkMessage("dev1", "dev0", MsgType::CON, "0.03", "dev0-a-m0", "dev0-a-t1",
                        {Option{"Uri-Path", "door"}}, std::string("lock"));
  CHECK(getTgt(m) == "dev1");
  CHECK(getSrc(m) == "dev0");
  CHECK(std::string(toString(getType(m))) == "CON");
  CHECK(getCode(m) == "0.03");
  CHECK(getMid(m) == "dev0-a-m0");
  CHECK(getTok(m) == "dev0-a-t1");
  CHECK(getPath(m) == "door");
  CHECK(getBody(m) == "lock");
  CHECK_FALSE(getRcnt(m.content()));
  auto c = withOption(m.content(), Option{"rcnt", Nat{2}});
  CHECK(getRcnt(c) == 2u);
  CHECK_FALSE(getRcnt(withoutOption(c, "rcnt")));
}

TEST_CASE("message printing") {
  Message m = mkMessage("dev1", "dev0", MsgType::NON, "0.03", "dev0-putN-m0", "dev0-putN-t1",
                        {Option{"Uri-Path", "door"}}, std::string("lock"));
  CHECK(show(m) ==
        "m(\"dev1\",\"dev0\",c(h(\"NON\",\"0.03\",\"dev0-putN-m0\"),\"dev0-putN-t1\","
        "o(\"Uri-Path\",\"door\"),b(\"lock\")))");
  Message e = mkMessage("dev0", "dev1", MsgType::ACK, "", "dev0-putN-m0", "", {}, std::nullopt);
  CHECK(show(e).find("mtBody") != std::string::npos);
  CHECK(show(DelayedMessage{m, 3, false}).ends_with(" @ 3"));
}

TEST_CASE("canonical form ignores agent and message order") {
  System a = iSys3r();
  System b = a;
  std::reverse(b.agents.begin(), b.agents.end());
  Message m1 = mkMessage("dev1", "dev0", MsgType::NON, "0.01", "x-m0", "x-t1", {}, std::nullopt);
  Message m2 = mkMessage("dev2", "dev0", MsgType::NON, "0.01", "x-m2", "x-t3", {}, std::nullopt);
  a.net.input = {{m1, 2, false}, {m2, 1, false}};
  b.net.input = {{m2, 1, false}, {m1, 2, false}};
  CHECK(encode(canonical(a)) == encode(canonical(b)));

  System c = canonical(a);
  c.net.input[0].delay += 1;
  CHECK(encode(canonical(c)) != encode(canonical(a)));
}

TEST_CASE("canonical form keeps the log order") {
  System a = iSys0();
  a.log = std::vector<LogItem>{{"dev1", "door", "lock"}, {"dev1", "door", "unlock"}};
  System b = a;
  b.log = std::vector<LogItem>{{"dev1", "door", "unlock"}, {"dev1", "door", "lock"}};
  CHECK(encode(canonical(a)) != encode(canonical(b)));
}

TEST_CASE("agent lookup") {
  System s = iSys3a();
  CHECK(findAgent(s, "dev2"));
  CHECK_FALSE(findAgent(s, "dev9"));
  CHECK(endpointOf(s, "dev1")->rsrcs.at("door") == "unlock");
  CHECK(attackerOf(s));
  CHECK(endpointIds(s) == std::vector<std::string>{"dev0", "dev1", "dev2"});
}
