#include "coapsec/attack.hpp"

#include <algorithm>

#include "coapsec/dialect.hpp"

namespace coapsec {

Capability mc(std::string tpat, std::string spat, bool active, std::vector<Act> acts) {
  std::sort(acts.begin(), acts.end());
  return MC{std::move(tpat), std::move(spat), active, std::move(acts)};
}

Act act(std::string tpat, std::string spat, Nat extra) {
  return Act{std::move(tpat), std::move(spat), extra};
}

Capability mcX(Nat extra) { return MCX{extra}; }

Capability drop() { return mc("", "", true); }
Capability delay(Nat n) { return mc("", "", true, {act("", "", n)}); }
Capability divert(std::string d0, std::string d1) {
  return mc(std::move(d0), "", true, {act(std::move(d1), "", 0)});
}
Capability undivert(std::string s0, std::string s1) {
  return mc("", std::move(s0), true, {act("", std::move(s1), 0)});
}
Capability replay(Nat n) { return mc("", "", false, {act("", "", n)}); }
Capability redirect(std::string d0, std::string d1) {
  return mc(std::move(d0), "", true, {act(std::move(d1), "", 0)});
}
// Responses coming back from d1 are made to look as if they came from d0.
Capability unredirect(std::string d0, std::string d1) {
  return mc("", std::move(d1), true, {act("", std::move(d0), 0)});
}

bool pmatch(const std::string& id, const std::string& pat) { return pat.empty() || id == pat; }

Message setTgtSrc(Message m, const std::string& tpat, const std::string& spat) {
  if (!tpat.empty()) m.tgt = tpat;
  if (!spat.empty()) m.src = spat;
  return m;
}

std::vector<DelayedMessage> applyCaps(const DelayedMessage& dm, const std::vector<Act>& acts) {
  std::vector<DelayedMessage> out;
  for (const auto& a : acts) {
    DelayedMessage c = dm;
    c.msg = setTgtSrc(dm.msg, a.tpat, a.spat);
    c.delay += a.extra;
    out.push_back(std::move(c));
  }
  return out;
}

std::optional<AttackResult> doAttack(AttackerState attrs, const DelayedMessage& dm,
                                     const Capability& cap) {
  const MC* m = std::get_if<MC>(&cap);
  if (!m) return std::nullopt;
  if (!pmatch(dm.msg.tgt, m->tpat) || !pmatch(dm.msg.src, m->spat)) return std::nullopt;
  auto it = std::find(attrs.caps.begin(), attrs.caps.end(), cap);
  if (it == attrs.caps.end()) return std::nullopt;
  attrs.caps.erase(it);
  AttackResult r;
  r.replacements = applyCaps(dm, m->acts);
  if (!m->active) r.replacements.push_back(dm);
  attrs.kb.push_back(dm);
  r.attrs = std::move(attrs);
  return r;
}

namespace {

Agent* attackerAgent(System& s) {
  for (auto& a : s.agents)
    if (a.isAttacker()) return &a;
  return nullptr;
}

template <class T>
std::vector<T> distinct(const std::vector<T>& v) {
  std::vector<T> out;
  for (const auto& x : v)
    if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
  return out;
}

}  // namespace

void attackTransitions(const System& s, std::vector<Transition>& out) {
  const AttackerState* att = attackerOf(s);
  if (!att || att->caps.empty()) return;
  const auto caps = distinct(att->caps);
  for (const auto& dm : distinct(s.net.input)) {
    for (const auto& cap : caps) {
      auto r = doAttack(*att, dm, cap);
      if (!r) continue;
      System next = s;
      auto pos = std::find(next.net.input.begin(), next.net.input.end(), dm);
      next.net.input.erase(pos);
      for (auto& d : r->replacements) next.net.output.push_back(std::move(d));
      std::get<AttackerState>(attackerAgent(next)->body) = std::move(r->attrs);
      out.push_back(Transition{"attack", show(cap) + " on " + show(dm), std::move(next)});
    }
  }
}

void mcxTransitions(const System& s, std::vector<Transition>& out) {
  const AttackerState* att = attackerOf(s);
  if (!att) return;
  std::vector<MCX> xs;
  for (const auto& c : att->caps)
    if (auto* x = std::get_if<MCX>(&c))
      if (std::find(xs.begin(), xs.end(), *x) == xs.end()) xs.push_back(*x);
  if (xs.empty()) return;

  for (const auto& dm : distinct(s.net.input)) {
    // The resource-holder lookup is search pruning done by the model, so it
    // may look through a lingo encoding. The copy itself keeps the bits.
    std::optional<Content> view =
        dm.msg.plain() ? std::optional<Content>(dm.msg.content())
                       : pruneView(std::get<DContent>(dm.msg.payload));
    if (!view) continue;
    const auto cls = classify(*view);
    if (cls.kind != Classification::Kind::Request || (cls.method != "GET" && cls.method != "PUT"))
      continue;
    const auto path = getPath(*view);
    if (!path) continue;
    for (const auto& a : s.agents) {
      if (a.isAttacker() || a.id == dm.msg.src) continue;
      const EndpointState* e = endpointOf(s, a.id);
      if (!e->rsrcs.count(*path)) continue;
      for (const auto& x : xs) {
        System next = s;
        auto& na = std::get<AttackerState>(attackerAgent(next)->body);
        na.caps.erase(std::find(na.caps.begin(), na.caps.end(), Capability{x}));
        na.kb.push_back(dm);
        DelayedMessage copy = dm;
        copy.msg.tgt = a.id;
        copy.delay = dm.delay + x.extra;
        copy.anytime = true;
        if (cls.method == "GET")
          na.caps.push_back(mc(dm.msg.src, a.id, false, {act(dm.msg.src, dm.msg.tgt, 0)}));
        std::string detail = show(Capability{x}) + " on " + show(dm) + " to " + a.id;
        next.net.output.push_back(std::move(copy));
        out.push_back(Transition{"mcx", std::move(detail), std::move(next)});
      }
    }
  }
}

}  // namespace coapsec
