#include "coapsec/coap.hpp"

#include <algorithm>

#include "coapsec/applayer.hpp"

namespace coapsec {

namespace {

DelayedMessage at(Message m, Nat d) { return DelayedMessage{std::move(m), d, false}; }

Message emptyMsg(const std::string& tgt, const std::string& src, MsgType type,
                 const std::string& mid) {
  return mkMessage(tgt, src, type, "", mid, "", {}, std::nullopt);
}

bool findRspRcd(const EndpointState& e, const std::string& dst, const std::string& tok) {
  return std::any_of(e.rspRcd.begin(), e.rspRcd.end(), [&](const Message& m) {
    return m.src == dst && getTok(m) == tok;
  });
}

template <class T, class F>
bool removeAll(std::vector<T>& v, F pred) {
  auto n = std::erase_if(v, pred);
  return n > 0;
}

}  // namespace

Nat backOff(Nat ackTimeout, Nat n) {
  Nat d = ackTimeout;
  for (Nat i = 0; i < n; ++i) d *= 2;
  return d;
}

// ---- receive processing

RcvResult rcvRequest(const std::string& epid, EndpointState attrs, const Message& msg) {
  RcvResult r;
  const Content& c = msg.content();
  const Nat sd = attrs.cfg("msgSD");

  for (const auto& stored : attrs.rspSntD) {
    if (stored.rsp.tgt == msg.src && getTok(stored.rsp) == c.token && stored.reqMid == c.head.mid) {
      if (c.head.type == MsgType::CON) r.toSend.push_back(at(stored.rsp, sd));
      r.attrs = std::move(attrs);
      return r;
    }
  }

  const auto cls = classify(c);
  const std::string path = getPath(c).value_or("");
  const MsgType rtype = c.head.type == MsgType::CON ? MsgType::ACK : MsgType::NON;
  const Nat seq = attrs.ctr;
  const std::string rmid = genMid(epid, seq);
  attrs.ctr += 1;

  std::string code;
  Body body;
  if (cls.method == "GET") {
    auto it = attrs.rsrcs.find(path);
    if (it != attrs.rsrcs.end()) {
      code = "2.05";
      body = it->second;
    } else {
      code = "4.04";
    }
  } else if (cls.method == "PUT" || cls.method == "POST") {
    const std::string val = c.body.value_or("");
    const bool existed = attrs.rsrcs.count(path) > 0;
    attrs.rsrcs[path] = val;
    code = existed ? "2.04" : "2.01";
    if (cls.method == "PUT") r.toLog.push_back(LogItem{epid, path, val});
  } else {
    attrs.rsrcs.erase(path);
    code = "2.02";
  }

  Message rsp = mkMessage(msg.src, epid, rtype, code, rmid, c.token, {}, body);
  r.toSend.push_back(at(rsp, sd));
  attrs.rspSntD.push_back(StoredResponse{rsp, attrs.cfg("ttl"), c.head.mid});
  attrs.sent.push_back(SentRecord{msg.src, c.token, rmid, seq});
  r.accepted = true;
  r.attrs = std::move(attrs);
  return r;
}

RcvResult rcvResponse(const std::string& epid, EndpointState attrs, const Message& msg) {
  RcvResult r;
  const Content& c = msg.content();
  const std::string& tok = c.token;
  // responses are matched to pending requests by token alone
  auto matching = [&](const Message& m) { return getTok(m) == tok; };
  const bool seen = findRspRcd(attrs, msg.src, tok);
  const bool record = !seen;

  if (c.head.type == MsgType::ACK) {
    removeAll(attrs.w4Ack, [&](const DelayedMessage& d) { return matching(d.msg); });
    if (record) attrs.rspRcd.push_back(msg);
  } else {
    if (seen) {
      if (c.head.type == MsgType::CON)
        r.toSend.push_back(at(emptyMsg(msg.src, epid, MsgType::ACK, c.head.mid), attrs.cfg("msgSD")));
      r.attrs = std::move(attrs);
      return r;
    }
    if (record) {
      attrs.rspRcd.push_back(msg);
      removeAll(attrs.w4Ack, [&](const DelayedMessage& d) { return matching(d.msg); });
      removeAll(attrs.w4Rsp, matching);
      if (c.head.type == MsgType::CON)
        r.toSend.push_back(at(emptyMsg(msg.src, epid, MsgType::ACK, c.head.mid), attrs.cfg("msgSD")));
    }
  }
  r.accepted = record;
  r.attrs = std::move(attrs);
  return r;
}

RcvResult rcvEmpty(const std::string& epid, EndpointState attrs, const Message& msg) {
  RcvResult r;
  const Content& c = msg.content();
  if (c.head.type == MsgType::ACK) {
    auto it = std::find_if(attrs.w4Ack.begin(), attrs.w4Ack.end(), [&](const DelayedMessage& d) {
      return d.msg.tgt == msg.src && getMid(d.msg) == c.head.mid;
    });
    if (it != attrs.w4Ack.end()) {
      Message req = it->msg;
      req.payload = withoutOption(req.content(), "rcnt");
      attrs.w4Ack.erase(it);
      attrs.w4Rsp.push_back(std::move(req));
    }
  } else if (c.head.type == MsgType::CON) {
    r.toSend.push_back(at(emptyMsg(msg.src, epid, MsgType::ACK, c.head.mid), attrs.cfg("msgSD")));
  }
  r.attrs = std::move(attrs);
  return r;
}

RcvResult rcvMsg(const std::string& epid, EndpointState attrs, const Message& msg) {
  using K = Classification::Kind;
  if (!msg.plain()) {
    RcvResult r;
    r.attrs = std::move(attrs);
    return r;
  }
  switch (classify(msg).kind) {
    case K::Request: return rcvRequest(epid, std::move(attrs), msg);
    case K::Response: return rcvResponse(epid, std::move(attrs), msg);
    case K::Empty: return rcvEmpty(epid, std::move(attrs), msg);
    case K::Unknown: break;
  }
  RcvResult r;
  if (getType(msg) == MsgType::CON)
    r.toSend.push_back(at(emptyMsg(msg.src, epid, MsgType::RST, getMid(msg)), attrs.cfg("msgSD")));
  r.attrs = std::move(attrs);
  return r;
}

RcvResult receive(const std::string& epid, EndpointState attrs, const Message& msg) {
  RcvResult r = rcvMsg(epid, std::move(attrs), msg);
  if (r.accepted) r.attrs = doApp(msg, std::move(r.attrs));
  return r;
}

// ---- sending

bool canDevsend(const EndpointState& e) {
  return !e.sendReqs.empty() && std::holds_alternative<AMsg>(e.sendReqs.front()) &&
         e.w4Ack.size() <= e.cfg("w4AckBd") && e.sndCtr == 0;
}

DelayedMessage sndAMsg(const std::string& epid, EndpointState& attrs) {
  AMsg a = std::get<AMsg>(attrs.sendReqs.front());
  attrs.sendReqs.erase(attrs.sendReqs.begin());
  const std::string prefix = epid + "-" + a.appId;
  const Nat n = attrs.ctr;
  std::vector<Option> opts{Option{"Uri-Path", a.path}};
  if (!a.qparams.empty()) opts.push_back(Option{"Uri-Query", a.qparams});
  Message m = mkMessage(a.tgt, epid, a.type, methodCode(a.method).value_or(""), genMid(prefix, n),
                        genTok(prefix, n + 1), std::move(opts), a.body);
  if (a.type == MsgType::CON) {
    Message w = m;
    w.payload = withOption(m.content(), Option{"rcnt", Nat{0}});
    attrs.w4Ack.push_back(at(std::move(w), attrs.cfg("ACK_TIMEOUT")));
  } else {
    attrs.w4Rsp.push_back(m);
  }
  attrs.ctr += 2;
  attrs.sndCtr = attrs.cfg("msgQD");
  return at(std::move(m), attrs.cfg("msgSD"));
}

DelayedMessage ackTimeoutStep(EndpointState& attrs, std::size_t ix) {
  DelayedMessage entry = attrs.w4Ack[ix];
  attrs.w4Ack.erase(attrs.w4Ack.begin() + static_cast<std::ptrdiff_t>(ix));
  const Nat n = getRcnt(entry.msg.content()).value_or(0);
  Message copy = entry.msg;
  copy.payload = withoutOption(entry.msg.content(), "rcnt");
  if (n < attrs.cfg("MAX_RETRANSMIT")) {
    Message again = entry.msg;
    again.payload = withOption(entry.msg.content(), Option{"rcnt", n + 1});
    attrs.w4Ack.push_back(at(std::move(again), backOff(attrs.cfg("ACK_TIMEOUT"), n + 1)));
  }
  return at(std::move(copy), attrs.cfg("msgSD"));
}

// ---- time

Nat mte(const EndpointState& e) {
  Nat t = kInfinity;
  for (const auto& d : e.w4Ack) t = std::min(t, d.delay);
  if (!e.sendReqs.empty()) {
    if (auto* p = std::get_if<Pause>(&e.sendReqs.front()))
      t = std::min(t, p->duration);
    else if (e.w4Ack.size() <= e.cfg("w4AckBd"))
      t = std::min(t, e.sndCtr);
  }
  for (const auto& r : e.rspSntD) t = std::min(t, r.ttl);
  return t;
}

namespace {

Nat mteNet(const std::vector<DelayedMessage>& v) {
  Nat t = kInfinity;
  for (const auto& d : v)
    if (!(d.anytime && d.delay == 0)) t = std::min(t, d.delay);
  return t;
}

void passNet(std::vector<DelayedMessage>& v, Nat nz) {
  for (auto& d : v) d.delay = d.delay > nz ? d.delay - nz : 0;
}

}  // namespace

Nat mte(const System& s) {
  Nat t = std::min(mteNet(s.net.input), mteNet(s.net.output));
  for (const auto& a : s.agents) {
    if (auto* e = std::get_if<EndpointState>(&a.body)) {
      t = std::min(t, mte(*e));
    } else if (auto* w = std::get_if<WrapperState>(&a.body)) {
      if (!w->local.empty()) return 0;
      t = std::min(t, mte(w->inner));
    }
  }
  return t;
}

void passTime(EndpointState& e, Nat nz) {
  for (auto& d : e.w4Ack) d.delay = d.delay > nz ? d.delay - nz : 0;
  e.sndCtr = e.sndCtr > nz ? e.sndCtr - nz : 0;
  if (!e.sendReqs.empty()) {
    if (auto* p = std::get_if<Pause>(&e.sendReqs.front())) {
      p->duration = p->duration > nz ? p->duration - nz : 0;
      if (p->duration == 0) e.sendReqs.erase(e.sendReqs.begin());
    }
  }
  for (auto& r : e.rspSntD) r.ttl = r.ttl > nz ? r.ttl - nz : 0;
  std::erase_if(e.rspSntD, [](const StoredResponse& r) { return r.ttl == 0; });
}

System passTime(System s, Nat nz) {
  passNet(s.net.input, nz);
  passNet(s.net.output, nz);
  for (auto& a : s.agents) {
    if (auto* e = std::get_if<EndpointState>(&a.body)) {
      passTime(*e, nz);
    } else if (auto* w = std::get_if<WrapperState>(&a.body)) {
      passTime(w->inner, nz);
      passNet(w->local.input, nz);
      passNet(w->local.output, nz);
    }
  }
  return s;
}

// ---- rules

namespace {

void eraseOne(std::vector<DelayedMessage>& v, const DelayedMessage& d) {
  auto it = std::find(v.begin(), v.end(), d);
  if (it != v.end()) v.erase(it);
}

template <class F>
void forDistinct(const std::vector<DelayedMessage>& v, F f) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    bool dup = false;
    for (std::size_t j = 0; j < i && !dup; ++j) dup = v[j] == v[i];
    if (!dup) f(v[i]);
  }
}

}  // namespace

std::vector<Transition> devsend(const System& s, const std::string& epid) {
  std::vector<Transition> out;
  const Agent* a = findAgent(s, epid);
  if (!a) return out;
  System next = s;
  Agent* na = findAgent(next, epid);
  if (auto* e = std::get_if<EndpointState>(&na->body)) {
    if (!canDevsend(*e)) return out;
    DelayedMessage dm = sndAMsg(epid, *e);
    std::string detail = epid + " sends " + show(dm);
    next.net.input.push_back(std::move(dm));
    out.push_back(Transition{"devsend", std::move(detail), std::move(next)});
  } else if (auto* w = std::get_if<WrapperState>(&na->body)) {
    if (!canDevsend(w->inner)) return out;
    DelayedMessage dm = sndAMsg(epid, w->inner);
    std::string detail = epid + " sends (local) " + show(dm);
    w->local.input.push_back(std::move(dm));
    out.push_back(Transition{"devsend", std::move(detail), std::move(next)});
  }
  return out;
}

std::vector<Transition> rcv(const System& s, const std::string& epid, const DelayedMessage& dm) {
  std::vector<Transition> out;
  if (!dm.deliverable() || dm.msg.tgt != epid || !dm.msg.plain()) return out;
  const Agent* a = findAgent(s, epid);
  if (!a || !a->isEndpoint()) return out;
  System next = s;
  eraseOne(next.net.output, dm);
  auto& e = std::get<EndpointState>(findAgent(next, epid)->body);
  RcvResult r = receive(epid, std::move(e), dm.msg);
  e = std::move(r.attrs);
  for (auto& d : r.toSend) next.net.input.push_back(std::move(d));
  if (next.log)
    for (auto& li : r.toLog) next.log->push_back(std::move(li));
  out.push_back(Transition{"rcv", epid + " receives " + show(dm), std::move(next)});
  return out;
}

std::vector<Transition> ackTimeout(const System& s, const std::string& epid,
                                   const DelayedMessage& dm) {
  std::vector<Transition> out;
  if (dm.delay != 0) return out;
  System next = s;
  Agent* a = findAgent(next, epid);
  if (!a) return out;
  EndpointState* e = std::get_if<EndpointState>(&a->body);
  std::vector<DelayedMessage>* sink = &next.net.input;
  if (!e) {
    auto* w = std::get_if<WrapperState>(&a->body);
    if (!w) return out;
    e = &w->inner;
    sink = &w->local.input;
  }
  auto it = std::find(e->w4Ack.begin(), e->w4Ack.end(), dm);
  if (it == e->w4Ack.end()) return out;
  DelayedMessage copy = ackTimeoutStep(*e, static_cast<std::size_t>(it - e->w4Ack.begin()));
  std::string detail = epid + " resends " + show(copy);
  sink->push_back(std::move(copy));
  out.push_back(Transition{"ackTimeout", std::move(detail), std::move(next)});
  return out;
}

std::vector<Transition> netMove(const System& s, const DelayedMessage& dm) {
  std::vector<Transition> out;
  auto it = std::find(s.net.input.begin(), s.net.input.end(), dm);
  if (it == s.net.input.end()) return out;
  System next = s;
  eraseOne(next.net.input, dm);
  next.net.output.push_back(dm);
  out.push_back(Transition{"net", show(dm), std::move(next)});
  return out;
}

std::vector<Transition> tick(const System& s) {
  std::vector<Transition> out;
  const Nat t = mte(s);
  if (t == 0 || t == kInfinity) return out;
  out.push_back(Transition{"tick", std::to_string(t), passTime(s, t)});
  return out;
}

void coapTransitions(const System& s, std::vector<Transition>& out) {
  auto append = [&](std::vector<Transition>&& v) {
    for (auto& t : v) out.push_back(std::move(t));
  };
  for (const auto& a : s.agents) {
    if (a.isAttacker()) continue;
    append(devsend(s, a.id));
    const EndpointState* e = endpointOf(s, a.id);
    forDistinct(e->w4Ack, [&](const DelayedMessage& d) {
      if (d.delay == 0) append(ackTimeout(s, a.id, d));
    });
    if (a.isEndpoint()) {
      forDistinct(s.net.output, [&](const DelayedMessage& d) {
        if (d.msg.tgt == a.id) append(rcv(s, a.id, d));
      });
    }
  }
  forDistinct(s.net.input, [&](const DelayedMessage& d) { append(netMove(s, d)); });
  append(tick(s));
}

}  // namespace coapsec
