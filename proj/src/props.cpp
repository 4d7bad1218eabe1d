#include "coapsec/props.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>

namespace coapsec {

bool tokenMatches(const std::string& token, const std::string& aid) {
  return aid.empty() || token.find(aid) != std::string::npos;
}

bool checkRsrc(const System& s, const std::string& epid, const std::string& path,
               const std::string& val) {
  const EndpointState* e = endpointOf(s, epid);
  if (!e) return false;
  auto it = e->rsrcs.find(path);
  return it != e->rsrcs.end() && it->second == val;
}

bool hasV(const System& s, const std::string& epid, const std::string& path, const std::string& val) {
  return checkRsrc(s, epid, path, val);
}

bool hasAV(const System& s, const std::string& epid, const std::string& key, const std::string& val) {
  const EndpointState* e = endpointOf(s, epid);
  if (!e || !e->aconf) return false;
  auto it = e->aconf->akb.find(key);
  return it != e->aconf->akb.end() && it->second == val;
}

bool hasRspTSnt(const System& s, const std::string& sv, const std::string& cl, const std::string& aid) {
  const EndpointState* e = endpointOf(s, sv);
  if (!e) return false;
  return std::any_of(e->sent.begin(), e->sent.end(), [&](const SentRecord& r) {
    return r.client == cl && tokenMatches(r.token, aid);
  });
}

bool rspTSntBefore(const System& s, const std::string& sv, const std::string& cl,
                   const std::string& aid0, const std::string& aid1) {
  const EndpointState* e = endpointOf(s, sv);
  if (!e) return false;
  for (const auto& r0 : e->sent) {
    if (r0.client != cl || !tokenMatches(r0.token, aid0)) continue;
    for (const auto& r1 : e->sent)
      if (r1.client == cl && tokenMatches(r1.token, aid1) && r0.seq < r1.seq) return true;
  }
  return false;
}

bool hasRspTRcd(const System& s, const std::string& cl, const std::string& sv, const std::string& aid) {
  return hasGetRsp(s, cl, sv, aid, "");
}

bool hasGetRsp(const System& s, const std::string& cl, const std::string& sv, const std::string& aid,
               const std::string& val) {
  const EndpointState* e = endpointOf(s, cl);
  if (!e) return false;
  return std::any_of(e->rspRcd.begin(), e->rspRcd.end(), [&](const Message& m) {
    if (m.src != sv || !tokenMatches(getTok(m), aid)) return false;
    return val.empty() || getBody(m) == Body(val);
  });
}

bool rspPend(const System& s, const std::string& cl, const std::string& sv, const std::string& aid) {
  const EndpointState* e = endpointOf(s, cl);
  if (!e) return false;
  auto pend = [&](const Message& m) { return m.tgt == sv && tokenMatches(getTok(m), aid); };
  return std::any_of(e->w4Ack.begin(), e->w4Ack.end(),
                     [&](const DelayedMessage& d) { return pend(d.msg); }) ||
         std::any_of(e->w4Rsp.begin(), e->w4Rsp.end(), pend);
}

bool isV(const System& s, const std::string& ctl, const std::string& epid, const std::string& aid,
         const std::string& path, const std::string& val) {
  return hasV(s, epid, path, val) && !rspPend(s, ctl, epid, aid);
}

bool becomeV(const System& s, const std::string& ctl, const std::string& epid, const std::string& aid,
             const std::string& path, const std::string& val) {
  return hasV(s, epid, path, val) && rspPend(s, ctl, epid, aid);
}

bool aKbNotTok(const System& s, const std::string& eve, const std::string& tok) {
  const Agent* a = findAgent(s, eve);
  if (!a || !a->isAttacker()) return true;
  const auto& kb = std::get<AttackerState>(a->body).kb;
  return std::none_of(kb.begin(), kb.end(), [&](const DelayedMessage& d) {
    return d.msg.plain() && getTok(d.msg).find(tok) != std::string::npos;
  });
}

Nat epswrbCount(const System& s, const std::string& path, const std::string& val) {
  Nat n = 0;
  for (const auto& a : s.agents)
    if (!a.isAttacker() && checkRsrc(s, a.id, path, val)) ++n;
  return n;
}

std::optional<std::pair<LogItem, std::size_t>> findRcvLI(const std::vector<LogItem>& log,
                                                         std::size_t start, const LogPat& p) {
  auto ok = [](const std::string& x, const std::string& pat) { return pat.empty() || x == pat; };
  for (std::size_t i = start; i < log.size(); ++i)
    if (ok(log[i].epid, p.epid) && ok(log[i].path, p.path) && ok(log[i].value, p.value))
      return std::make_pair(log[i], i);
  return std::nullopt;
}

bool subLIL(const std::vector<LogItem>& log, const std::vector<LogPat>& pats) {
  std::size_t next = 0;
  for (const auto& p : pats) {
    auto hit = findRcvLI(log, next, p);
    if (!hit) return false;
    next = hit->second + 1;
  }
  return true;
}

bool subLIL(const System& s, const std::vector<LogPat>& pats) {
  if (!s.log) return pats.empty();
  return subLIL(*s.log, pats);
}

bool eval(const Prop& p, const System& s) {
  using K = Prop::Kind;
  const auto& a = p.args;
  switch (p.kind) {
    case K::True: return true;
    case K::False: return false;
    case K::And:
      return std::all_of(p.kids.begin(), p.kids.end(), [&](const Prop& q) { return eval(q, s); });
    case K::Or:
      return std::any_of(p.kids.begin(), p.kids.end(), [&](const Prop& q) { return eval(q, s); });
    case K::Not: return !eval(p.kids.at(0), s);
    case K::CheckRsrc: return checkRsrc(s, a[0], a[1], a[2]);
    case K::HasAV: return hasAV(s, a[0], a[1], a[2]);
    case K::HasRspTSnt: return hasRspTSnt(s, a[0], a[1], a[2]);
    case K::RspTSntBefore: return rspTSntBefore(s, a[0], a[1], a[2], a[3]);
    case K::HasRspTRcd: return hasRspTRcd(s, a[0], a[1], a[2]);
    case K::HasGetRsp: return hasGetRsp(s, a[0], a[1], a[2], a[3]);
    case K::RspPend: return rspPend(s, a[0], a[1], a[2]);
    case K::SubLIL: return subLIL(s, p.pats);
    case K::IsV: return isV(s, a[0], a[1], a[2], a[3], a[4]);
    case K::BecomeV: return becomeV(s, a[0], a[1], a[2], a[3], a[4]);
    case K::AKbNotTok: return aKbNotTok(s, a[0], a[1]);
    case K::EpsWithRbCountGT: return epswrbCount(s, a[0], a[1]) > p.bound;
  }
  return false;
}

// ---- builders

Prop pTrue() { return Prop{}; }

Prop pAnd(std::vector<Prop> ps) {
  Prop p;
  p.kind = Prop::Kind::And;
  p.kids = std::move(ps);
  return p;
}

Prop pOr(std::vector<Prop> ps) {
  Prop p;
  p.kind = Prop::Kind::Or;
  p.kids = std::move(ps);
  return p;
}

Prop pNot(Prop q) {
  Prop p;
  p.kind = Prop::Kind::Not;
  p.kids.push_back(std::move(q));
  return p;
}

Prop pAtom(Prop::Kind kind, std::vector<std::string> args) {
  Prop p;
  p.kind = kind;
  p.args = std::move(args);
  return p;
}

Prop pSubLIL(std::vector<LogPat> pats) {
  Prop p;
  p.kind = Prop::Kind::SubLIL;
  p.pats = std::move(pats);
  return p;
}

Prop pCountGT(std::string path, std::string val, Nat k) {
  Prop p = pAtom(Prop::Kind::EpsWithRbCountGT, {std::move(path), std::move(val)});
  p.bound = k;
  return p;
}

namespace {

using K = Prop::Kind;

Prop isVP(const std::string& ctl, const std::string& ep, const std::string& aid,
          const std::string& path, const std::string& val) {
  return pAtom(K::IsV, {ctl, ep, aid, path, val});
}

Prop becomeVP(const std::string& ctl, const std::string& ep, const std::string& aid,
              const std::string& path, const std::string& val) {
  return pAtom(K::BecomeV, {ctl, ep, aid, path, val});
}

}  // namespace

Prop bclIdleInv(const std::string& bcid, const std::string& brid, const std::string& gid) {
  return pAnd({pAtom(K::HasAV, {bcid, "status", "idle"}),
               pOr({pNot(isVP(bcid, brid, "BridgeCl", "bridge", "close")),
                    pNot(isVP(bcid, gid, "GateOp", "gate", "open"))})});
}

Prop gateNClInv(const std::string& bcid, const std::string& brid, const std::string& gid) {
  Prop gateNotClosed = pOr({becomeVP(bcid, gid, "GateOp", "gate", "open"),
                            isVP(bcid, gid, "GateOp", "gate", "open"),
                            becomeVP(bcid, gid, "GateCL", "gate", "close")});
  return pAnd({gateNotClosed, pNot(isVP(bcid, brid, "BridgeCl", "bridge", "close"))});
}

Prop brNClInv(const std::string& bcid, const std::string& brid, const std::string& gid) {
  Prop bridgeNotClosed = pOr({becomeVP(bcid, brid, "BridgeOp", "bridge", "open"),
                              isVP(bcid, brid, "BridgeOp", "bridge", "open"),
                              becomeVP(bcid, brid, "BridgeCl", "bridge", "close")});
  return pAnd({bridgeNotClosed, pNot(isVP(bcid, gid, "GateCL", "gate", "close"))});
}

Prop boatPassInv(const std::string& bcid, const std::string& bsid, const std::string& brid,
                 const std::string& gid) {
  return pAnd({becomeVP(bcid, bsid, "BSPass", "pass", "go"),
               pOr({pNot(isVP(bcid, brid, "BridgeOp", "bridge", "open")),
                    pNot(isVP(bcid, gid, "GateCL", "gate", "close"))})});
}

Prop pnpIdleInv(const std::string& pid, const std::string& gid, const std::string& aid,
                const std::string& goI) {
  return pAnd({pAtom(K::HasAV, {pid, "status", "idle"}),
               pOr({pNot(isVP(pid, aid, "ArmGoI", "arm", goI)),
                    pNot(isVP(pid, gid, "GripOp", "grip", "open"))})});
}

Prop armGoingIInv(const std::string& pid, const std::string& gid, const std::string& aid,
                  const std::string& goI) {
  return pAnd({becomeVP(pid, aid, "ArmGoI", "arm", goI),
               pNot(isVP(pid, gid, "GripCl", "grip", "close"))});
}

Prop armGoingNIInv(const std::string& pid, const std::string& gid, const std::string& aid,
                   const std::string& goNI) {
  return pAnd({becomeVP(pid, aid, "ArmGoNI", "arm", goNI),
               pNot(isVP(pid, gid, "GripOp", "grip", "open"))});
}

Prop gripClosingInv(const std::string& pid, const std::string& gid, const std::string& aid,
                    const std::string& goNI) {
  return pAnd({becomeVP(pid, gid, "GripCl", "grip", "close"),
               pNot(isVP(pid, aid, "ArmGoNI", "arm", goNI))});
}

Prop gripOpeningInv(const std::string& pid, const std::string& gid, const std::string& aid,
                    const std::string& goI) {
  return pAnd({becomeVP(pid, gid, "GripOp", "grip", "open"),
               pNot(isVP(pid, aid, "ArmGoI", "arm", goI))});
}

// ---- goal text
//
// goal  := form | '(' form ')'
// form  := ('and' | 'or') term term+ | 'not' term | 'true' | 'false' | atom arg*
// term  := '(' form ')'
// arg   := word | "quoted" | '[' item (';' item)* ']'
// item  := 'rcvP' arg arg arg

namespace {

struct Tok {
  enum class T { LPar, RPar, LBr, RBr, Semi, Word, End } t;
  std::string text;
};

std::vector<Tok> lex(const std::string& s) {
  std::vector<Tok> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
      ++i;
    } else if (c == '(') {
      out.push_back({Tok::T::LPar, "("});
      ++i;
    } else if (c == ')') {
      out.push_back({Tok::T::RPar, ")"});
      ++i;
    } else if (c == '[') {
      out.push_back({Tok::T::LBr, "["});
      ++i;
    } else if (c == ']') {
      out.push_back({Tok::T::RBr, "]"});
      ++i;
    } else if (c == ';') {
      out.push_back({Tok::T::Semi, ";"});
      ++i;
    } else if (c == '"') {
      auto j = s.find('"', i + 1);
      if (j == std::string::npos) throw GoalParseError("unterminated string");
      out.push_back({Tok::T::Word, s.substr(i + 1, j - i - 1)});
      i = j + 1;
    } else {
      std::size_t j = i;
      while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) &&
             std::string("()[];,\"").find(s[j]) == std::string::npos)
        ++j;
      out.push_back({Tok::T::Word, s.substr(i, j - i)});
      i = j;
    }
  }
  out.push_back({Tok::T::End, ""});
  return out;
}

struct AtomSig {
  std::size_t arity;
  std::function<Prop(const std::vector<std::string>&)> build;
};

const std::map<std::string, AtomSig>& atomTable() {
  static const std::map<std::string, AtomSig> table = [] {
    std::map<std::string, AtomSig> t;
    auto simple = [&](const std::string& name, K kind, std::size_t n) {
      t[name] = {n, [kind](const std::vector<std::string>& a) { return pAtom(kind, a); }};
    };
    simple("checkRsrc", K::CheckRsrc, 3);
    simple("hasV", K::CheckRsrc, 3);
    simple("hasAV", K::HasAV, 3);
    simple("hasRspTSnt", K::HasRspTSnt, 3);
    simple("rspTSntBefore", K::RspTSntBefore, 4);
    simple("hasRspTRcd", K::HasRspTRcd, 3);
    simple("hasGetRsp", K::HasGetRsp, 4);
    simple("rspPend", K::RspPend, 3);
    simple("isV", K::IsV, 5);
    simple("becomeV", K::BecomeV, 5);
    simple("aKbNotTok", K::AKbNotTok, 2);
    t["noRsp"] = {3, [](const std::vector<std::string>& a) { return pNot(pAtom(K::HasRspTRcd, a)); }};
    t["epswrbGT"] = {3, [](const std::vector<std::string>& a) {
                       try {
                         return pCountGT(a[0], a[1], std::stoull(a[2]));
                       } catch (const std::exception&) {
                         throw GoalParseError("epswrbGT: bad count '" + a[2] + "'");
                       }
                     }};
    t["bclIdleInv"] = {3, [](const std::vector<std::string>& a) { return bclIdleInv(a[0], a[1], a[2]); }};
    t["gateNClInv"] = {3, [](const std::vector<std::string>& a) { return gateNClInv(a[0], a[1], a[2]); }};
    t["brNClInv"] = {3, [](const std::vector<std::string>& a) { return brNClInv(a[0], a[1], a[2]); }};
    t["boatPassInv"] = {4, [](const std::vector<std::string>& a) {
                          return boatPassInv(a[0], a[1], a[2], a[3]);
                        }};
    t["pnpIdleInv"] = {4, [](const std::vector<std::string>& a) { return pnpIdleInv(a[0], a[1], a[2], a[3]); }};
    t["armGoingIInv"] = {4, [](const std::vector<std::string>& a) {
                           return armGoingIInv(a[0], a[1], a[2], a[3]);
                         }};
    t["armGoingNIInv"] = {4, [](const std::vector<std::string>& a) {
                            return armGoingNIInv(a[0], a[1], a[2], a[3]);
                          }};
    t["gripClosingInv"] = {4, [](const std::vector<std::string>& a) {
                             return gripClosingInv(a[0], a[1], a[2], a[3]);
                           }};
    t["gripOpeningInv"] = {4, [](const std::vector<std::string>& a) {
                             return gripOpeningInv(a[0], a[1], a[2], a[3]);
                           }};
    return t;
  }();
  return table;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(lex(text)) {}

  Prop goal() {
    Prop p;
    if (peek().t == Tok::T::LPar && wrapsAll()) {
      p = term();
    } else {
      p = form();
    }
    if (peek().t != Tok::T::End) throw GoalParseError("trailing input near '" + peek().text + "'");
    return p;
  }

 private:
  std::vector<Tok> toks_;
  std::size_t pos_ = 0;

  const Tok& peek() const { return toks_[pos_]; }
  Tok next() { return toks_[pos_++]; }

  void expect(Tok::T t, const char* what) {
    if (peek().t != t) throw GoalParseError(std::string("expected ") + what + " near '" + peek().text + "'");
    ++pos_;
  }

  bool wrapsAll() const {
    int depth = 0;
    for (std::size_t i = pos_; i < toks_.size(); ++i) {
      if (toks_[i].t == Tok::T::LPar) ++depth;
      if (toks_[i].t == Tok::T::RPar && --depth == 0) return toks_[i + 1].t == Tok::T::End;
    }
    return false;
  }

  Prop term() {
    expect(Tok::T::LPar, "'('");
    Prop p = form();
    expect(Tok::T::RPar, "')'");
    return p;
  }

  std::string word() {
    if (peek().t != Tok::T::Word) throw GoalParseError("expected an argument near '" + peek().text + "'");
    return next().text;
  }

  Prop form() {
    if (peek().t != Tok::T::Word) throw GoalParseError("expected a property name near '" + peek().text + "'");
    std::string head = next().text;
    if (head == "and" || head == "or") {
      std::vector<Prop> kids;
      while (peek().t == Tok::T::LPar) kids.push_back(term());
      if (kids.size() < 2) throw GoalParseError(head + " needs at least two parenthesized operands");
      return head == "and" ? pAnd(std::move(kids)) : pOr(std::move(kids));
    }
    if (head == "not") return pNot(term());
    if (head == "true") return pTrue();
    if (head == "false") return Prop{K::False, {}, {}, {}, 0};
    if (head == "subLIL") {
      expect(Tok::T::LBr, "'['");
      std::vector<LogPat> pats;
      if (peek().t != Tok::T::RBr) {
        while (true) {
          if (word() != "rcvP") throw GoalParseError("subLIL items have the form rcvP epid path value");
          LogPat lp;
          lp.epid = word();
          lp.path = word();
          lp.value = word();
          pats.push_back(std::move(lp));
          if (peek().t == Tok::T::Semi) {
            next();
            continue;
          }
          break;
        }
      }
      expect(Tok::T::RBr, "']'");
      return pSubLIL(std::move(pats));
    }
    auto it = atomTable().find(head);
    if (it == atomTable().end()) throw GoalParseError("unknown property '" + head + "'");
    std::vector<std::string> args;
    for (std::size_t i = 0; i < it->second.arity; ++i) args.push_back(word());
    return it->second.build(args);
  }
};

std::string quoteArg(const std::string& s) {
  bool bare = !s.empty() && std::none_of(s.begin(), s.end(), [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) || std::string("()[];,\"").find(c) != std::string::npos;
  });
  return bare ? s : "\"" + s + "\"";
}

const char* kindName(K k) {
  switch (k) {
    case K::CheckRsrc: return "checkRsrc";
    case K::HasAV: return "hasAV";
    case K::HasRspTSnt: return "hasRspTSnt";
    case K::RspTSntBefore: return "rspTSntBefore";
    case K::HasRspTRcd: return "hasRspTRcd";
    case K::HasGetRsp: return "hasGetRsp";
    case K::RspPend: return "rspPend";
    case K::IsV: return "isV";
    case K::BecomeV: return "becomeV";
    case K::AKbNotTok: return "aKbNotTok";
    default: return "?";
  }
}

}  // namespace

Prop parseGoal(const std::string& text) { return Parser(text).goal(); }

std::string toString(const Prop& p) {
  switch (p.kind) {
    case K::True: return "true";
    case K::False: return "false";
    case K::And:
    case K::Or: {
      std::string s = p.kind == K::And ? "and" : "or";
      for (const auto& q : p.kids) s += " (" + toString(q) + ")";
      return s;
    }
    case K::Not: return "not (" + toString(p.kids.at(0)) + ")";
    case K::SubLIL: {
      std::string s = "subLIL [";
      for (std::size_t i = 0; i < p.pats.size(); ++i) {
        if (i) s += " ; ";
        s += "rcvP " + quoteArg(p.pats[i].epid) + " " + quoteArg(p.pats[i].path) + " " +
             quoteArg(p.pats[i].value);
      }
      return s + "]";
    }
    case K::EpsWithRbCountGT:
      return "epswrbGT " + quoteArg(p.args[0]) + " " + quoteArg(p.args[1]) + " " + std::to_string(p.bound);
    default: {
      std::string s = kindName(p.kind);
      for (const auto& a : p.args) s += " " + quoteArg(a);
      return s;
    }
  }
}

}  // namespace coapsec
