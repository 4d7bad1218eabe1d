#include "coapsec/model.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace coapsec {

std::string_view toString(MsgType t) {
  switch (t) {
    case MsgType::CON: return "CON";
    case MsgType::NON: return "NON";
    case MsgType::ACK: return "ACK";
    case MsgType::RST: return "RST";
  }
  return "?";
}

std::optional<MsgType> parseMsgType(std::string_view s) {
  if (s == "CON") return MsgType::CON;
  if (s == "NON") return MsgType::NON;
  if (s == "ACK") return MsgType::ACK;
  if (s == "RST") return MsgType::RST;
  return std::nullopt;
}

const std::string& AppConf::rulesName() const {
  static const std::string none;
  return rules ? rules->name : none;
}

std::strong_ordering AppConf::operator<=>(const AppConf& o) const {
  if (auto c = akb <=> o.akb; c != 0) return c;
  return rulesName() <=> o.rulesName();
}

bool AppConf::operator==(const AppConf& o) const {
  return akb == o.akb && rulesName() == o.rulesName();
}

Nat EndpointState::cfg(const std::string& name) const {
  auto it = config.find(name);
  return it == config.end() ? 0 : it->second;
}

// ---- codes and ids

std::optional<std::string> methodCode(std::string_view method) {
  if (method == "GET") return "0.01";
  if (method == "POST") return "0.02";
  if (method == "PUT") return "0.03";
  if (method == "DELETE") return "0.04";
  return std::nullopt;
}

Classification classify(const Content& c) {
  using K = Classification::Kind;
  const std::string& code = c.head.code;
  if (code.empty()) return {K::Empty, "", false};
  if (code == "0.01") return {K::Request, "GET", false};
  if (code == "0.02") return {K::Request, "POST", false};
  if (code == "0.03") return {K::Request, "PUT", false};
  if (code == "0.04") return {K::Request, "DELETE", false};
  if (code.size() == 4 && code[1] == '.' && code[0] >= '2' && code[0] <= '5' &&
      std::isdigit(static_cast<unsigned char>(code[2])) &&
      std::isdigit(static_cast<unsigned char>(code[3])))
    return {K::Response, "", code[0] == '2'};
  return {K::Unknown, "", false};
}

Classification classify(const Message& m) {
  if (!m.plain()) return {};
  return classify(m.content());
}

std::string genMid(const std::string& prefix, Nat n) { return prefix + "-m" + std::to_string(n); }
std::string genTok(const std::string& prefix, Nat n) { return prefix + "-t" + std::to_string(n); }

MsgType getType(const Message& m) { return m.content().head.type; }
const std::string& getCode(const Message& m) { return m.content().head.code; }
const std::string& getMid(const Message& m) { return m.content().head.mid; }
const std::string& getTok(const Message& m) { return m.content().token; }
const std::string& getTgt(const Message& m) { return m.tgt; }
const std::string& getSrc(const Message& m) { return m.src; }
const Body& getBody(const Message& m) { return m.content().body; }

std::optional<std::string> getPath(const Content& c) {
  for (const auto& o : c.options)
    if (o.name == "Uri-Path")
      if (auto* s = std::get_if<std::string>(&o.value)) return *s;
  return std::nullopt;
}

std::optional<std::string> getPath(const Message& m) {
  if (!m.plain()) return std::nullopt;
  return getPath(m.content());
}

std::optional<Nat> getRcnt(const Content& c) {
  for (const auto& o : c.options)
    if (o.name == "rcnt")
      if (auto* n = std::get_if<Nat>(&o.value)) return *n;
  return std::nullopt;
}

Content withoutOption(Content c, std::string_view name) {
  std::erase_if(c.options, [&](const Option& o) { return o.name == name; });
  return c;
}

Content withOption(Content c, Option o) {
  c = withoutOption(std::move(c), o.name);
  c.options.push_back(std::move(o));
  std::sort(c.options.begin(), c.options.end());
  return c;
}

Message mkMessage(std::string tgt, std::string src, MsgType type, std::string code,
                  std::string mid, std::string token, std::vector<Option> options,
                  Body body) {
  Content c{Head{type, std::move(code), std::move(mid)}, std::move(token), std::move(options),
            std::move(body)};
  std::sort(c.options.begin(), c.options.end());
  return Message{std::move(tgt), std::move(src), std::move(c)};
}

// ---- lookup

const Agent* findAgent(const System& s, std::string_view id) {
  for (const auto& a : s.agents)
    if (a.id == id) return &a;
  return nullptr;
}

Agent* findAgent(System& s, std::string_view id) {
  for (auto& a : s.agents)
    if (a.id == id) return &a;
  return nullptr;
}

const EndpointState* endpointOf(const System& s, std::string_view id) {
  const Agent* a = findAgent(s, id);
  if (!a) return nullptr;
  if (auto* e = std::get_if<EndpointState>(&a->body)) return e;
  if (auto* w = std::get_if<WrapperState>(&a->body)) return &w->inner;
  return nullptr;
}

const AttackerState* attackerOf(const System& s) {
  for (const auto& a : s.agents)
    if (auto* at = std::get_if<AttackerState>(&a.body)) return at;
  return nullptr;
}

std::vector<std::string> endpointIds(const System& s) {
  std::vector<std::string> ids;
  for (const auto& a : s.agents)
    if (!a.isAttacker()) ids.push_back(a.id);
  return ids;
}

// ---- canonical form

void canonicalize(Content& c) { std::sort(c.options.begin(), c.options.end()); }

namespace {

void canon(Message& m) {
  if (auto* c = std::get_if<Content>(&m.payload)) canonicalize(*c);
}

template <class T>
void sortAll(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
}

void canon(std::vector<DelayedMessage>& v) {
  for (auto& d : v) canon(d.msg);
  sortAll(v);
}

void canon(std::vector<Message>& v) {
  for (auto& m : v) canon(m);
  sortAll(v);
}

void canon(Network& n) {
  canon(n.input);
  canon(n.output);
}

}  // namespace

void canonicalize(EndpointState& e) {
  canon(e.w4Ack);
  canon(e.w4Rsp);
  for (auto& r : e.rspSntD) canon(r.rsp);
  sortAll(e.rspSntD);
  canon(e.rspRcd);
}

void canonicalize(System& s) {
  for (auto& a : s.agents) {
    std::visit(
        [](auto& b) {
          using B = std::decay_t<decltype(b)>;
          if constexpr (std::is_same_v<B, EndpointState>) {
            canonicalize(b);
          } else if constexpr (std::is_same_v<B, AttackerState>) {
            canon(b.kb);
            for (auto& c : b.caps)
              if (auto* mc = std::get_if<MC>(&c)) sortAll(mc->acts);
            sortAll(b.caps);
          } else {
            canonicalize(b.inner);
            canon(b.local);
          }
        },
        a.body);
  }
  std::sort(s.agents.begin(), s.agents.end(),
            [](const Agent& x, const Agent& y) { return x.id < y.id; });
  canon(s.net);
}

System canonical(System s) {
  canonicalize(s);
  return s;
}

// ---- encoding

namespace {

constexpr char kSep = '\x1f';

struct Enc {
  std::string& out;

  void str(const std::string& s) {
    out += s;
    out += kSep;
  }
  void nat(Nat n) {
    out += std::to_string(n);
    out += kSep;
  }
  void tag(char c) { out += c; }

  void content(const Content& c) {
    tag('c');
    tag(static_cast<char>('0' + static_cast<int>(c.head.type)));
    str(c.head.code);
    str(c.head.mid);
    str(c.token);
    nat(c.options.size());
    for (const auto& o : c.options) {
      str(o.name);
      if (auto* s = std::get_if<std::string>(&o.value)) {
        tag('s');
        str(*s);
      } else {
        tag('n');
        nat(std::get<Nat>(o.value));
      }
    }
    if (c.body) {
      tag('b');
      str(*c.body);
    } else {
      tag('e');
    }
  }

  void msg(const Message& m) {
    str(m.tgt);
    str(m.src);
    if (m.plain()) {
      content(m.content());
    } else {
      const auto& d = std::get<DContent>(m.payload);
      tag('d');
      d.bits.encode(out);
      nat(d.ix);
    }
  }

  void dmsg(const DelayedMessage& d) {
    msg(d.msg);
    tag(d.anytime ? '@' : '_');
    nat(d.delay);
  }

  void dmsgs(const std::vector<DelayedMessage>& v) {
    nat(v.size());
    for (const auto& d : v) dmsg(d);
  }

  void msgs(const std::vector<Message>& v) {
    nat(v.size());
    for (const auto& m : v) msg(m);
  }

  void rmap(const std::map<std::string, std::string>& m) {
    nat(m.size());
    for (const auto& [key, val] : m) {
      str(key);
      str(val);
    }
  }

  void endpoint(const EndpointState& e) {
    tag('E');
    dmsgs(e.w4Ack);
    msgs(e.w4Rsp);
    nat(e.rspSntD.size());
    for (const auto& r : e.rspSntD) {
      msg(r.rsp);
      nat(r.ttl);
      str(r.reqMid);
    }
    msgs(e.rspRcd);
    rmap(e.rsrcs);
    nat(e.ctr);
    nat(e.sendReqs.size());
    for (const auto& item : e.sendReqs) {
      if (auto* p = std::get_if<Pause>(&item)) {
        tag('p');
        nat(p->duration);
      } else {
        const auto& a = std::get<AMsg>(item);
        tag('a');
        str(a.appId);
        str(a.tgt);
        tag(static_cast<char>('0' + static_cast<int>(a.type)));
        str(a.method);
        str(a.path);
        str(a.qparams);
        if (a.body) {
          tag('b');
          str(*a.body);
        } else {
          tag('e');
        }
      }
    }
    nat(e.config.size());
    for (const auto& [key, val] : e.config) {
      str(key);
      nat(val);
    }
    nat(e.sndCtr);
    if (e.aconf) {
      tag('A');
      rmap(e.aconf->akb);
      str(e.aconf->rulesName());
    } else {
      tag('-');
    }
    nat(e.sent.size());
    for (const auto& r : e.sent) {
      str(r.client);
      str(r.token);
      str(r.rmid);
      nat(r.seq);
    }
  }

  void cap(const Capability& c) {
    if (auto* x = std::get_if<MCX>(&c)) {
      tag('X');
      nat(x->extra);
      return;
    }
    const auto& mc = std::get<MC>(c);
    tag('M');
    str(mc.tpat);
    str(mc.spat);
    tag(mc.active ? '1' : '0');
    nat(mc.acts.size());
    for (const auto& a : mc.acts) {
      str(a.tpat);
      str(a.spat);
      nat(a.extra);
    }
  }
};

}  // namespace

void DCBits::encode(std::string& out) const {
  Enc e{out};
  e.str(grand_);
  e.content(content_);
  e.nat(ix_);
}

std::string encode(const System& s) {
  std::string out;
  out.reserve(1024);
  Enc e{out};
  e.nat(s.agents.size());
  for (const auto& a : s.agents) {
    e.str(a.id);
    if (auto* ep = std::get_if<EndpointState>(&a.body)) {
      e.endpoint(*ep);
    } else if (auto* at = std::get_if<AttackerState>(&a.body)) {
      e.tag('K');
      e.dmsgs(at->kb);
      e.nat(at->caps.size());
      for (const auto& c : at->caps) e.cap(c);
    } else {
      const auto& w = std::get<WrapperState>(a.body);
      e.tag('W');
      e.endpoint(w.inner);
      e.dmsgs(w.local.input);
      e.dmsgs(w.local.output);
      e.rmap(w.dialect.seedTo);
      e.rmap(w.dialect.seedFr);
      e.nat(w.dialect.ixCtr.size());
      for (const auto& [key, val] : w.dialect.ixCtr) {
        e.str(key);
        e.nat(val);
      }
      e.nat(w.dialect.used.size());
      for (const auto& [key, ixs] : w.dialect.used) {
        e.str(key);
        e.nat(ixs.size());
        for (Nat ix : ixs) e.nat(ix);
      }
      e.nat(w.dialect.randSize);
    }
  }
  e.dmsgs(s.net.input);
  e.dmsgs(s.net.output);
  if (s.log) {
    e.tag('L');
    e.nat(s.log->size());
    for (const auto& li : *s.log) {
      e.str(li.epid);
      e.str(li.path);
      e.str(li.value);
    }
  } else {
    e.tag('-');
  }
  return out;
}

// ---- printing

namespace {

std::string q(const std::string& s) { return "\"" + s + "\""; }

std::string showBody(const Body& b) { return b ? "b(" + q(*b) + ")" : "mtBody"; }

}  // namespace

std::string show(const Content& c) {
  std::ostringstream os;
  os << "c(h(" << q(std::string(toString(c.head.type))) << "," << q(c.head.code) << ","
     << q(c.head.mid) << ")," << q(c.token) << ",";
  if (c.options.empty()) {
    os << "mtO";
  } else {
    bool first = true;
    for (const auto& o : c.options) {
      if (!first) os << " ";
      first = false;
      os << "o(" << q(o.name) << ",";
      if (auto* s = std::get_if<std::string>(&o.value))
        os << q(*s);
      else
        os << std::get<Nat>(o.value);
      os << ")";
    }
  }
  os << "," << showBody(c.body) << ")";
  return os.str();
}

std::string show(const Message& m) {
  std::string inner;
  if (m.plain())
    inner = show(m.content());
  else
    inner = "dc(<sealed>," + std::to_string(std::get<DContent>(m.payload).ix) + ")";
  return "m(" + q(m.tgt) + "," + q(m.src) + "," + inner + ")";
}

std::string show(const DelayedMessage& d) {
  return show(d.msg) + (d.anytime ? " @@ " : " @ ") + std::to_string(d.delay);
}

std::string show(const Capability& c) {
  if (auto* x = std::get_if<MCX>(&c)) return "mcX(" + std::to_string(x->extra) + ")";
  const auto& mc = std::get<MC>(c);
  std::string s = "mc(" + q(mc.tpat) + "," + q(mc.spat) + "," + (mc.active ? "true" : "false") + ",";
  if (mc.acts.empty()) {
    s += "mtC";
  } else {
    bool first = true;
    for (const auto& a : mc.acts) {
      if (!first) s += " ";
      first = false;
      s += "act(" + q(a.tpat) + "," + q(a.spat) + "," + std::to_string(a.extra) + ")";
    }
  }
  return s + ")";
}

std::string show(const LogItem& li) {
  return "rcvP(" + q(li.epid) + "," + q(li.path) + "," + q(li.value) + ")";
}

namespace {

void showDmsgs(std::ostringstream& os, const std::vector<DelayedMessage>& v,
               const std::string& indent) {
  if (v.empty()) {
    os << indent << "mtDM\n";
    return;
  }
  for (const auto& d : v) os << indent << show(d) << "\n";
}

void showEndpoint(std::ostringstream& os, const EndpointState& e, const std::string& in) {
  os << in << "w4Ack:\n";
  showDmsgs(os, e.w4Ack, in + "  ");
  os << in << "w4Rsp:\n";
  if (e.w4Rsp.empty()) os << in << "  mtMsgs\n";
  for (const auto& m : e.w4Rsp) os << in << "  " << show(m) << "\n";
  os << in << "rspSntD:\n";
  if (e.rspSntD.empty()) os << in << "  mtDM\n";
  for (const auto& r : e.rspSntD) os << in << "  " << show(r.rsp) << " @ " << r.ttl << "\n";
  os << in << "rspRcd:\n";
  if (e.rspRcd.empty()) os << in << "  mtMsgs\n";
  for (const auto& m : e.rspRcd) os << in << "  " << show(m) << "\n";
  os << in << "rsrcs:";
  if (e.rsrcs.empty()) os << " mtR";
  for (const auto& [p, val] : e.rsrcs) os << " rb(" << q(p) << "," << q(val) << ")";
  os << "\n" << in << "ctr: " << e.ctr << "  sndCtr: " << e.sndCtr << "\n";
  os << in << "sendReqs:";
  if (e.sendReqs.empty()) os << " nilAM";
  for (const auto& item : e.sendReqs) {
    if (auto* p = std::get_if<Pause>(&item)) {
      os << " amsgd(" << p->duration << ")";
    } else {
      const auto& a = std::get<AMsg>(item);
      os << " amsg(" << q(a.appId) << "," << q(a.tgt) << "," << q(std::string(toString(a.type)))
         << "," << q(a.method) << "," << q(a.path) << "," << q(a.qparams) << ","
         << showBody(a.body) << ")";
    }
  }
  os << "\n";
  if (e.aconf) {
    os << in << "aconf(" << e.aconf->rulesName() << "):";
    for (const auto& [key, val] : e.aconf->akb) os << " rb(" << q(key) << "," << q(val) << ")";
    os << "\n";
  }
}

}  // namespace

std::string show(const System& s) {
  std::ostringstream os;
  os << "{\n";
  for (const auto& a : s.agents) {
    os << "  [" << q(a.id) << " |\n";
    if (auto* ep = std::get_if<EndpointState>(&a.body)) {
      showEndpoint(os, *ep, "    ");
    } else if (auto* at = std::get_if<AttackerState>(&a.body)) {
      os << "    kb:\n";
      showDmsgs(os, at->kb, "      ");
      os << "    caps:";
      if (at->caps.empty()) os << " mtC";
      for (const auto& c : at->caps) os << " " << show(c);
      os << "\n";
    } else {
      const auto& w = std::get<WrapperState>(a.body);
      os << "    conf:\n";
      showEndpoint(os, w.inner, "      ");
      os << "      local net input:\n";
      showDmsgs(os, w.local.input, "        ");
      os << "      local net output:\n";
      showDmsgs(os, w.local.output, "        ");
      os << "    ixCtr:";
      for (const auto& [key, val] : w.dialect.ixCtr) os << " " << key << "=" << val;
      os << "\n    used:";
      for (const auto& [key, ixs] : w.dialect.used) {
        os << " " << key << "={";
        bool first = true;
        for (Nat ix : ixs) {
          os << (first ? "" : ",") << ix;
          first = false;
        }
        os << "}";
      }
      os << "\n";
    }
    os << "  ]\n";
  }
  os << "  net input:\n";
  showDmsgs(os, s.net.input, "    ");
  os << "  net output:\n";
  showDmsgs(os, s.net.output, "    ");
  if (s.log) {
    os << "  log:";
    if (s.log->empty()) os << " nilLI";
    for (const auto& li : *s.log) os << " " << show(li);
    os << "\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace coapsec
