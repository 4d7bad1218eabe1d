#include <doctest.h>

#include <random>
#include <set>

#include "coapsec/dialect.hpp"
#include "coapsec/scenarios.hpp"

using namespace coapsec;

namespace {

const std::vector<std::string> kIds = {"dev0", "dev1", "dev2", "dev3"};

Message randomMessage(std::mt19937& rng, const std::string& tgt, const std::string& src) {
  static const char* codes[] = {"0.01", "0.03", "0.04", "2.04", "2.05", "4.04", ""};
  static const char* paths[] = {"door", "gate", "status", "grip"};
  std::uniform_int_distribution<int> pick(0, 1000);
  Body body;
  if (pick(rng) % 2) body = "v" + std::to_string(pick(rng));
  std::vector<Option> opts;
  if (pick(rng) % 3) opts.push_back(Option{"Uri-Path", std::string(paths[pick(rng) % 4])});
  const auto type = static_cast<MsgType>(pick(rng) % 4);
  return mkMessage(tgt, src, type, codes[pick(rng) % 7], "m" + std::to_string(pick(rng)),
                   "t" + std::to_string(pick(rng)), opts, body);
}

}  // namespace

TEST_CASE("lingo generator is deterministic") {
  CHECK(g("xxxxdev1dev0", 128, 3) == "g(xxxxdev1dev0,128,3)");
  CHECK(g("a", 128, 3) != g("a", 128, 4));
}

TEST_CASE("shared seeds are mirrored between peers") {
  auto d0 = sharedDialectAttrs("dev0", kIds);
  auto d1 = sharedDialectAttrs("dev1", kIds);
  CHECK_FALSE(d0.seedTo.count("dev0"));
  CHECK(d0.seedTo.at("dev1") == "xxxxdev1dev0");
  CHECK(d0.seedTo.at("dev1") == d1.seedFr.at("dev0"));
  CHECK(d1.seedTo.at("dev0") == d0.seedFr.at("dev1"));
  CHECK(d0.ixCtr.at("dev2") == 0);
}

TEST_CASE("lingo round trip on random messages") {
  std::mt19937 rng(20240611);
  std::uniform_int_distribution<std::size_t> who(0, kIds.size() - 1);
  std::map<std::string, DialectAttrs> ds;
  for (const auto& id : kIds) ds[id] = sharedDialectAttrs(id, kIds);
  std::size_t checked = 0;
  for (int i = 0; i < 20000; ++i) {
    const auto& src = kIds[who(rng)];
    const auto& tgt = kIds[who(rng)];
    if (src == tgt) continue;
    Message m = randomMessage(rng, tgt, src);
    auto enc = applyDialect(ds[src], DelayedMessage{m, 1, false});
    REQUIRE(enc);
    ds[src] = enc->first;
    CHECK_FALSE(enc->second.msg.plain());
    CHECK(enc->second.delay == 1);
    auto [d2, dec] = decodeDialect(ds[tgt], enc->second.msg);
    ds[tgt] = d2;
    REQUIRE(dec);
    CHECK(*dec == m);
    ++checked;
  }
  CHECK(checked >= 10000);
}

TEST_CASE("tampered lingo is rejected") {
  auto d0 = sharedDialectAttrs("dev0", kIds);
  auto d1 = sharedDialectAttrs("dev1", kIds);
  auto d2 = sharedDialectAttrs("dev2", kIds);
  Message m = mkMessage("dev1", "dev0", MsgType::CON, "0.03", "dev0-a-m0", "dev0-a-t1",
                        {Option{"Uri-Path", "door"}}, std::string("lock"));
  auto enc = applyDialect(d0, DelayedMessage{m, 0, false});
  REQUIRE(enc);
  const Message sealed = enc->second.msg;

  SUBCASE("wrong index") {
    Message t = sealed;
    std::get<DContent>(t.payload).ix += 1;
    CHECK_FALSE(decodeDialect(d1, t).second);
  }
  SUBCASE("wrong source") {
    Message t = sealed;
    t.src = "dev2";
    CHECK_FALSE(decodeDialect(d1, t).second);
  }
  SUBCASE("redirected target") {
    Message t = sealed;
    t.tgt = "dev2";
    CHECK_FALSE(decodeDialect(d2, t).second);
  }
  SUBCASE("plain input") { CHECK_FALSE(decodeDialect(d1, m).second); }
  SUBCASE("unknown source") {
    Message t = sealed;
    t.src = "dev9";
    CHECK_FALSE(decodeDialect(d1, t).second);
  }
}

TEST_CASE("each lingo index is accepted once") {
  auto d0 = sharedDialectAttrs("dev0", kIds);
  auto d1 = sharedDialectAttrs("dev1", kIds);
  Message m = mkMessage("dev1", "dev0", MsgType::NON, "0.03", "dev0-a-m0", "dev0-a-t1", {}, std::string("x"));
  auto enc = applyDialect(d0, DelayedMessage{m, 0, false});
  REQUIRE(enc);
  auto [after, first] = decodeDialect(d1, enc->second.msg);
  CHECK(first);
  auto [again, replayed] = decodeDialect(after, enc->second.msg);
  CHECK_FALSE(replayed);
  CHECK(again == after);
}

TEST_CASE("no lingo for an unknown target") {
  auto d0 = sharedDialectAttrs("dev0", kIds);
  Message m = mkMessage("dev7", "dev0", MsgType::NON, "0.01", "a", "b", {}, std::nullopt);
  CHECK_FALSE(applyDialect(d0, DelayedMessage{m, 0, false}));
}

TEST_CASE("wrapping then unwrapping is the identity") {
  const std::vector<std::string> specs = {
      "iSys0", "iSys1", "iSys2", "iSys3a", "iSys3r", "raR1(5,0,10,false)", "iSysX(3,0,caps-1)",
      "iSysY(2,caps2-2(0))", "iSySZ(5,0)", "caFig1.2(5,0)", "caFig3(10,5,0)", "caFig4x(2,5,0)",
      "caFig5x(10,5,0)", "caFig6x(10,5,0)", "caFig7x(10,5,0)", "caFig7mod(5,0)", "brInit",
      "brInit2(40)", "initRL(pctl,gr,arm)", "initRL2(pctl,gr,arm,40)"};
  std::set<std::string> covered;
  for (const auto& spec : specs) {
    CAPTURE(spec);
    System s = buildScenario(spec);
    System d = D(s);
    CHECK(isDialected(d));
    CHECK_FALSE(isDialected(s));
    CHECK(UD(d) == s);
    covered.insert(spec.substr(0, spec.find('(')));
  }
  for (const auto& info : scenarioRegistry()) CHECK_MESSAGE(covered.count(info.name), info.name);
}

TEST_CASE("wrapping requires an empty network") {
  System s = iSys0();
  s.net.input.push_back({mkMessage("dev1", "dev0", MsgType::NON, "0.01", "a", "b", {}, std::nullopt), 0, false});
  CHECK_THROWS_AS(D(s), std::invalid_argument);
}

TEST_CASE("wrapped endpoints emit sealed messages") {
  System s = canonical(D(iSys0()));
  bool sawSealed = false;
  for (int step = 0; step < 8 && !sawSealed; ++step) {
    auto ts = std::vector<Transition>{};
    coapTransitions(s, ts);
    dialectTransitions(s, ts);
    REQUIRE_FALSE(ts.empty());
    s = ts.front().next;
    for (const auto& dm : s.net.input) sawSealed |= !dm.msg.plain();
  }
  CHECK(sawSealed);
}
