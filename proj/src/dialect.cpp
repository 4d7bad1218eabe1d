#include "coapsec/dialect.hpp"

#include <algorithm>
#include <stdexcept>

namespace coapsec {

std::string g(const std::string& seed, Nat k, Nat ix) {
  return "g(" + seed + "," + std::to_string(k) + "," + std::to_string(ix) + ")";
}

DCBits f1(const std::string& grand, const Content& content, Nat ix) {
  return DCBits(grand, content, ix);
}

std::optional<Content> f2(const std::string& grand, const DContent& dc) {
  if (dc.bits.grand_ != grand || dc.bits.ix_ != dc.ix) return std::nullopt;
  return dc.bits.content_;
}

std::optional<Content> pruneView(const DContent& dc) { return dc.bits.content_; }

std::optional<std::pair<DialectAttrs, DelayedMessage>> applyDialect(DialectAttrs d,
                                                                    const DelayedMessage& dm) {
  if (!dm.msg.plain()) return std::nullopt;
  auto seed = d.seedTo.find(dm.msg.tgt);
  if (seed == d.seedTo.end()) return std::nullopt;
  const Nat ix = d.ixCtr[dm.msg.tgt];
  const std::string grand = g(seed->second, d.randSize, ix);
  DelayedMessage out = dm;
  out.msg.payload = DContent{f1(grand, dm.msg.content(), ix), ix};
  d.ixCtr[dm.msg.tgt] = ix + 1;
  return std::make_pair(std::move(d), std::move(out));
}

std::pair<DialectAttrs, std::optional<Message>> decodeDialect(DialectAttrs d, const Message& msg) {
  const auto* dc = std::get_if<DContent>(&msg.payload);
  if (!dc) return {std::move(d), std::nullopt};
  auto u = d.used.find(msg.src);
  if (u != d.used.end() && u->second.count(dc->ix)) return {std::move(d), std::nullopt};
  auto seed = d.seedFr.find(msg.src);
  if (seed == d.seedFr.end()) return {std::move(d), std::nullopt};
  auto content = f2(g(seed->second, d.randSize, dc->ix), *dc);
  if (!content) return {std::move(d), std::nullopt};
  d.used[msg.src].insert(dc->ix);
  return {std::move(d), Message{msg.tgt, msg.src, std::move(*content)}};
}

DialectAttrs sharedDialectAttrs(const std::string& eid, const std::vector<std::string>& peers) {
  DialectAttrs d;
  d.randSize = kRandSize;
  for (const auto& p : peers) {
    if (p == eid) continue;
    d.seedTo[p] = "xxxx" + p + eid;
    d.seedFr[p] = "xxxx" + eid + p;
    d.ixCtr[p] = 0;
  }
  return d;
}

System D(const System& s) {
  if (!s.net.empty()) throw std::invalid_argument("D: network is not empty");
  System out = s;
  const auto ids = endpointIds(s);
  for (auto& a : out.agents) {
    auto* e = std::get_if<EndpointState>(&a.body);
    if (!e) continue;
    WrapperState w{std::move(*e), Network{}, sharedDialectAttrs(a.id, ids)};
    a.body = std::move(w);
  }
  return out;
}

System UD(const System& s) {
  System out = s;
  for (auto& a : out.agents) {
    if (auto* w = std::get_if<WrapperState>(&a.body)) {
      EndpointState e = std::move(w->inner);
      a.body = std::move(e);
    }
  }
  return out;
}

bool isDialected(const System& s) {
  return std::any_of(s.agents.begin(), s.agents.end(), [](const Agent& a) { return a.isWrapper(); });
}

void dialectTransitions(const System& s, std::vector<Transition>& out) {
  for (const auto& a : s.agents) {
    const auto* w = std::get_if<WrapperState>(&a.body);
    if (!w) continue;

    // ddevsend: either local component
    for (int side = 0; side < 2; ++side) {
      const auto& from = side == 0 ? w->local.input : w->local.output;
      for (std::size_t i = 0; i < from.size(); ++i) {
        const DelayedMessage& dm = from[i];
        if (dm.msg.src != a.id) continue;
        if (std::find(from.begin(), from.begin() + static_cast<std::ptrdiff_t>(i), dm) !=
            from.begin() + static_cast<std::ptrdiff_t>(i))
          continue;
        System next = s;
        auto& nw = std::get<WrapperState>(findAgent(next, a.id)->body);
        auto& src = side == 0 ? nw.local.input : nw.local.output;
        src.erase(std::find(src.begin(), src.end(), dm));
        for (auto& rest : nw.local.input) nw.local.output.push_back(std::move(rest));
        nw.local.input.clear();
        auto enc = applyDialect(nw.dialect, dm);
        std::string detail = a.id + " emits " + show(dm);
        if (enc) {
          nw.dialect = std::move(enc->first);
          next.net.input.push_back(std::move(enc->second));
        } else {
          detail += " (no lingo for target, dropped)";
        }
        out.push_back(Transition{"ddevsend", std::move(detail), std::move(next)});
      }
    }

    // ddevrcv
    for (std::size_t i = 0; i < s.net.output.size(); ++i) {
      const DelayedMessage& dm = s.net.output[i];
      if (!dm.deliverable() || dm.msg.tgt != a.id || dm.msg.plain()) continue;
      if (std::find(s.net.output.begin(), s.net.output.begin() + static_cast<std::ptrdiff_t>(i),
                    dm) != s.net.output.begin() + static_cast<std::ptrdiff_t>(i))
        continue;
      System next = s;
      next.net.output.erase(std::find(next.net.output.begin(), next.net.output.end(), dm));
      auto& nw = std::get<WrapperState>(findAgent(next, a.id)->body);
      auto [d1, plain] = decodeDialect(std::move(nw.dialect), dm.msg);
      nw.dialect = std::move(d1);
      std::string detail = a.id + " receives " + show(dm);
      if (plain) {
        RcvResult r = receive(a.id, std::move(nw.inner), *plain);
        nw.inner = std::move(r.attrs);
        for (auto& d : r.toSend) nw.local.input.push_back(std::move(d));
        if (next.log)
          for (auto& li : r.toLog) next.log->push_back(std::move(li));
        detail += " decoded " + show(*plain);
      } else {
        detail += " (dropped)";
      }
      out.push_back(Transition{"ddevrcv", std::move(detail), std::move(next)});
    }
  }
}

}  // namespace coapsec
