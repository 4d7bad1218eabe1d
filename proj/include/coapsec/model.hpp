#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace coapsec {

using Nat = std::uint64_t;
inline constexpr Nat kInfinity = std::numeric_limits<Nat>::max();

enum class MsgType : std::uint8_t { CON, NON, ACK, RST };

std::string_view toString(MsgType t);
std::optional<MsgType> parseMsgType(std::string_view s);

struct Option {
  std::string name;
  std::variant<std::string, Nat> value;

  auto operator<=>(const Option&) const = default;
  bool operator==(const Option&) const = default;
};

// nullopt is mtBody
using Body = std::optional<std::string>;

struct Head {
  MsgType type = MsgType::NON;
  std::string code;
  std::string mid;

  auto operator<=>(const Head&) const = default;
  bool operator==(const Head&) const = default;
};

struct Content {
  Head head;
  std::string token;
  std::vector<Option> options;  // kept sorted
  Body body;

  auto operator<=>(const Content&) const = default;
  bool operator==(const Content&) const = default;
};

struct DContent;

// Sealed lingo encoding. Only f1 builds it and only f2 opens it.
class DCBits {
 public:
  auto operator<=>(const DCBits&) const = default;
  bool operator==(const DCBits&) const = default;

  void encode(std::string& out) const;

 private:
  DCBits(std::string grand, Content content, Nat ix)
      : grand_(std::move(grand)), content_(std::move(content)), ix_(ix) {}

  std::string grand_;
  Content content_;
  Nat ix_ = 0;

  friend DCBits f1(const std::string& grand, const Content& content, Nat ix);
  friend std::optional<Content> f2(const std::string& grand, const DContent& dc);
  friend std::optional<Content> pruneView(const DContent& dc);
};

struct DContent {
  DCBits bits;
  Nat ix = 0;

  auto operator<=>(const DContent&) const = default;
  bool operator==(const DContent&) const = default;
};

DCBits f1(const std::string& grand, const Content& content, Nat ix);
std::optional<Content> f2(const std::string& grand, const DContent& dc);

struct Message {
  std::string tgt;
  std::string src;
  std::variant<Content, DContent> payload;

  bool plain() const { return std::holds_alternative<Content>(payload); }
  const Content& content() const { return std::get<Content>(payload); }

  auto operator<=>(const Message&) const = default;
  bool operator==(const Message&) const = default;
};

struct DelayedMessage {
  Message msg;
  Nat delay = 0;
  bool anytime = false;  // "@@": deliverable at delay 0 or any time after

  bool deliverable() const { return delay == 0; }

  auto operator<=>(const DelayedMessage&) const = default;
  bool operator==(const DelayedMessage&) const = default;
};

struct AMsg {
  std::string appId;
  std::string tgt;
  MsgType type = MsgType::NON;
  std::string method;
  std::string path;
  std::string qparams;
  Body body;

  auto operator<=>(const AMsg&) const = default;
  bool operator==(const AMsg&) const = default;
};

struct Pause {
  Nat duration = 0;

  auto operator<=>(const Pause&) const = default;
  bool operator==(const Pause&) const = default;
};

using AMsgItem = std::variant<AMsg, Pause>;

// ---- attacker capabilities

struct Act {
  std::string tpat;
  std::string spat;
  Nat extra = 0;

  auto operator<=>(const Act&) const = default;
  bool operator==(const Act&) const = default;
};

struct MC {
  std::string tpat;
  std::string spat;
  bool active = true;
  std::vector<Act> acts;

  auto operator<=>(const MC&) const = default;
  bool operator==(const MC&) const = default;
};

struct MCX {
  Nat extra = 0;

  auto operator<=>(const MCX&) const = default;
  bool operator==(const MCX&) const = default;
};

using Capability = std::variant<MC, MCX>;

// ---- application rule language

struct PVar {
  std::string name;
  auto operator<=>(const PVar&) const = default;
  bool operator==(const PVar&) const = default;
};
struct PConst {
  std::string value;
  auto operator<=>(const PConst&) const = default;
  bool operator==(const PConst&) const = default;
};
using Pat = std::variant<PVar, PConst>;

inline Pat v(std::string name) { return PVar{std::move(name)}; }
inline Pat k(std::string value) { return PConst{std::move(value)}; }

struct ReqPat {
  Pat src, meth, path, val;
};
struct RspPat {
  Pat src;
  Pat amid;
  bool success = true;
  Pat val;
};
using MPat = std::variant<ReqPat, RspPat>;

struct Cond {
  enum class Kind { Eq, Neq, Conj, Disj } kind = Kind::Conj;
  Pat lhs = k("");
  Pat rhs = k("");
  std::vector<Cond> subs;
};

struct SendAct {
  std::string amid;
  Pat tgt;
  MsgType type = MsgType::NON;
  std::string method;
  Pat path;
  Pat val;
};
struct SetAct {
  std::string var;
  Pat val;
};
struct PutAct {
  std::string path;
  Pat val;
};
using AppAct = std::variant<SendAct, SetAct, PutAct>;

struct CAct {
  Cond cond;
  std::vector<AppAct> acts;
};

struct ARule {
  std::string name;
  MPat pat;
  std::vector<CAct> cacts;
};

struct RuleSet {
  std::string name;
  std::vector<ARule> rules;
};

struct AppConf {
  std::map<std::string, std::string> akb;
  std::shared_ptr<const RuleSet> rules;

  const std::string& rulesName() const;
  std::strong_ordering operator<=>(const AppConf& o) const;
  bool operator==(const AppConf& o) const;
};

// ---- agents

struct StoredResponse {
  Message rsp;
  Nat ttl = 0;
  std::string reqMid;

  auto operator<=>(const StoredResponse&) const = default;
  bool operator==(const StoredResponse&) const = default;
};

// One entry per freshly generated response, never removed.
struct SentRecord {
  std::string client;
  std::string token;
  std::string rmid;
  Nat seq = 0;

  auto operator<=>(const SentRecord&) const = default;
  bool operator==(const SentRecord&) const = default;
};

using RMap = std::map<std::string, std::string>;
using CBnds = std::map<std::string, Nat>;

struct EndpointState {
  std::vector<DelayedMessage> w4Ack;
  std::vector<Message> w4Rsp;
  std::vector<StoredResponse> rspSntD;
  std::vector<Message> rspRcd;
  RMap rsrcs;
  Nat ctr = 0;
  std::vector<AMsgItem> sendReqs;
  CBnds config;
  Nat sndCtr = 0;
  std::optional<AppConf> aconf;
  std::vector<SentRecord> sent;

  Nat cfg(const std::string& name) const;

  auto operator<=>(const EndpointState&) const = default;
  bool operator==(const EndpointState&) const = default;
};

struct AttackerState {
  std::vector<DelayedMessage> kb;
  std::vector<Capability> caps;

  auto operator<=>(const AttackerState&) const = default;
  bool operator==(const AttackerState&) const = default;
};

struct Network {
  std::vector<DelayedMessage> input;
  std::vector<DelayedMessage> output;

  bool empty() const { return input.empty() && output.empty(); }

  auto operator<=>(const Network&) const = default;
  bool operator==(const Network&) const = default;
};

struct DialectAttrs {
  std::map<std::string, std::string> seedTo;
  std::map<std::string, std::string> seedFr;
  std::map<std::string, Nat> ixCtr;
  std::map<std::string, std::set<Nat>> used;
  Nat randSize = 128;

  auto operator<=>(const DialectAttrs&) const = default;
  bool operator==(const DialectAttrs&) const = default;
};

struct WrapperState {
  EndpointState inner;
  Network local;
  DialectAttrs dialect;

  auto operator<=>(const WrapperState&) const = default;
  bool operator==(const WrapperState&) const = default;
};

struct Agent {
  std::string id;
  std::variant<EndpointState, AttackerState, WrapperState> body;

  bool isEndpoint() const { return std::holds_alternative<EndpointState>(body); }
  bool isAttacker() const { return std::holds_alternative<AttackerState>(body); }
  bool isWrapper() const { return std::holds_alternative<WrapperState>(body); }

  auto operator<=>(const Agent&) const = default;
  bool operator==(const Agent&) const = default;
};

struct LogItem {
  std::string epid;
  std::string path;
  std::string value;

  auto operator<=>(const LogItem&) const = default;
  bool operator==(const LogItem&) const = default;
};

struct System {
  std::vector<Agent> agents;  // sorted by id once canonical
  Network net;
  std::optional<std::vector<LogItem>> log;

  auto operator<=>(const System&) const = default;
  bool operator==(const System&) const = default;
};

// ---- codes, ids, selectors

std::optional<std::string> methodCode(std::string_view method);

struct Classification {
  enum class Kind { Request, Response, Empty, Unknown } kind = Kind::Unknown;
  std::string method;    // Request only
  bool success = false;  // Response only
};

Classification classify(const Content& c);
Classification classify(const Message& m);

std::string genMid(const std::string& prefix, Nat n);
std::string genTok(const std::string& prefix, Nat n);

MsgType getType(const Message& m);
const std::string& getCode(const Message& m);
const std::string& getMid(const Message& m);
const std::string& getTok(const Message& m);
std::optional<std::string> getPath(const Content& c);
std::optional<std::string> getPath(const Message& m);
const std::string& getTgt(const Message& m);
const std::string& getSrc(const Message& m);
const Body& getBody(const Message& m);

std::optional<Nat> getRcnt(const Content& c);
Content withoutOption(Content c, std::string_view name);
Content withOption(Content c, Option o);

Message mkMessage(std::string tgt, std::string src, MsgType type, std::string code,
                  std::string mid, std::string token, std::vector<Option> options,
                  Body body);

// ---- agent lookup

const Agent* findAgent(const System& s, std::string_view id);
Agent* findAgent(System& s, std::string_view id);
// Endpoint attributes of a plain or wrapped agent.
const EndpointState* endpointOf(const System& s, std::string_view id);
const AttackerState* attackerOf(const System& s);
std::vector<std::string> endpointIds(const System& s);

// ---- canonical form

void canonicalize(Content& c);
void canonicalize(EndpointState& e);
void canonicalize(System& s);
System canonical(System s);
std::string encode(const System& s);

// ---- printing

std::string show(const Content& c);
std::string show(const Message& m);
std::string show(const DelayedMessage& d);
std::string show(const Capability& c);
std::string show(const LogItem& li);
std::string show(const System& s);

}  // namespace coapsec
