#include "coapsec/applayer.hpp"

#include <iostream>

namespace coapsec {

namespace {

bool bind(const Pat& p, const std::string& value, Bindings& b) {
  if (auto* c = std::get_if<PConst>(&p)) return c->value == value;
  const auto& name = std::get<PVar>(p).name;
  auto it = b.find(name);
  if (it != b.end()) return it->second == value;
  b[name] = value;
  return true;
}

}  // namespace

std::optional<Bindings> matchPattern(const MPat& mpat, const Message& msg) {
  if (!msg.plain()) return std::nullopt;
  const auto cls = classify(msg);
  const Content& c = msg.content();
  Bindings b;
  if (auto* r = std::get_if<ReqPat>(&mpat)) {
    if (cls.kind != Classification::Kind::Request) return std::nullopt;
    if (!bind(r->src, msg.src, b) || !bind(r->meth, cls.method, b)) return std::nullopt;
    if (!bind(r->path, getPath(c).value_or(""), b)) return std::nullopt;
    if (c.body && !bind(r->val, *c.body, b)) return std::nullopt;
    return b;
  }
  const auto& r = std::get<RspPat>(mpat);
  if (cls.kind != Classification::Kind::Response || cls.success != r.success) return std::nullopt;
  if (!bind(r.src, msg.src, b)) return std::nullopt;
  if (auto* amid = std::get_if<PConst>(&r.amid)) {
    if (c.token.find(amid->value) == std::string::npos) return std::nullopt;
  } else if (!bind(r.amid, c.token, b)) {
    return std::nullopt;
  }
  if (c.body && !bind(r.val, *c.body, b)) return std::nullopt;
  return b;
}

std::optional<std::string> resolve(const Pat& p, const AppCtx& ctx) {
  if (auto* c = std::get_if<PConst>(&p)) return c->value;
  const auto& name = std::get<PVar>(p).name;
  if (auto it = ctx.bindings.find(name); it != ctx.bindings.end()) return it->second;
  if (auto it = ctx.akb.find(name); it != ctx.akb.end()) return it->second;
  if (auto it = ctx.rsrcs.find(name); it != ctx.rsrcs.end()) return it->second;
  return std::nullopt;
}

bool evalCond(const Cond& c, const AppCtx& ctx) {
  switch (c.kind) {
    case Cond::Kind::Eq:
    case Cond::Kind::Neq: {
      auto a = resolve(c.lhs, ctx);
      auto b = resolve(c.rhs, ctx);
      if (!a || !b) return false;
      return (c.kind == Cond::Kind::Eq) == (*a == *b);
    }
    case Cond::Kind::Conj:
      for (const auto& s : c.subs)
        if (!evalCond(s, ctx)) return false;
      return true;
    case Cond::Kind::Disj:
      for (const auto& s : c.subs)
        if (evalCond(s, ctx)) return true;
      return false;
  }
  return false;
}

bool execAction(const AppAct& a, const Bindings& bindings, EndpointState& attrs) {
  static const std::map<std::string, std::string> noAkb;
  const auto& akb = attrs.aconf ? attrs.aconf->akb : noAkb;
  AppCtx ctx{bindings, akb, attrs.rsrcs};
  if (auto* s = std::get_if<SendAct>(&a)) {
    auto tgt = resolve(s->tgt, ctx);
    auto path = resolve(s->path, ctx);
    auto val = resolve(s->val, ctx);
    if (!tgt || !path || !val) {
      std::cerr << "warning: unresolved variable in send " << s->amid << "\n";
      return false;
    }
    attrs.sendReqs.push_back(AMsg{s->amid, *tgt, s->type, s->method, *path, "", *val});
    return true;
  }
  if (auto* s = std::get_if<SetAct>(&a)) {
    auto val = resolve(s->val, ctx);
    if (!val || !attrs.aconf) return false;
    attrs.aconf->akb[s->var] = *val;
    return true;
  }
  const auto& p = std::get<PutAct>(a);
  auto val = resolve(p.val, ctx);
  if (!val) return false;
  attrs.rsrcs[p.path] = *val;
  return true;
}

EndpointState doApp(const Message& msg, EndpointState attrs) {
  if (!attrs.aconf || !attrs.aconf->rules) return attrs;
  const auto rules = attrs.aconf->rules;
  for (const auto& rule : rules->rules) {
    auto b = matchPattern(rule.pat, msg);
    if (!b) continue;
    for (const auto& ca : rule.cacts) {
      AppCtx ctx{*b, attrs.aconf->akb, attrs.rsrcs};
      if (!evalCond(ca.cond, ctx)) continue;
      for (const auto& a : ca.acts) execAction(a, *b, attrs);
    }
  }
  return attrs;
}

Cond eq(Pat a, Pat b) { return Cond{Cond::Kind::Eq, std::move(a), std::move(b), {}}; }
Cond neq(Pat a, Pat b) { return Cond{Cond::Kind::Neq, std::move(a), std::move(b), {}}; }
Cond conj(std::vector<Cond> cs) { return Cond{Cond::Kind::Conj, k(""), k(""), std::move(cs)}; }
Cond disj(std::vector<Cond> cs) { return Cond{Cond::Kind::Disj, k(""), k(""), std::move(cs)}; }
MPat req(Pat src, Pat meth, Pat path, Pat val) {
  return ReqPat{std::move(src), std::move(meth), std::move(path), std::move(val)};
}
MPat rsp(Pat src, Pat amid, bool success, Pat val) {
  return RspPat{std::move(src), std::move(amid), success, std::move(val)};
}
AppAct send(std::string amid, Pat tgt, MsgType type, std::string meth, Pat path, Pat val) {
  return SendAct{std::move(amid), std::move(tgt), type, std::move(meth), std::move(path),
                 std::move(val)};
}
AppAct set(std::string var, Pat val) { return SetAct{std::move(var), std::move(val)}; }
AppAct put(std::string path, Pat val) { return PutAct{std::move(path), std::move(val)}; }

std::shared_ptr<const RuleSet> bridgeRules() {
  static const auto rules = [] {
    const auto N = MsgType::NON;
    auto rs = std::make_shared<RuleSet>();
    rs->name = "bridge-rules";
    rs->rules = {
        {"rcvBoatArr", req(k("bs"), k("PUT"), k("boat"), k("here")),
         {{eq(v("status"), k("idle")),
           {send("GateCL", k("ga"), N, "PUT", k("gate"), k("close")), set("status", k("working"))}}}},
        {"rcvGateClose", rsp(k("ga"), k("GateCL"), true, k("")),
         {{conj(), {send("BridgeOp", k("br"), N, "PUT", k("bridge"), k("open"))}}}},
        {"rcvBridgeOpen", rsp(k("br"), k("BridgeOp"), true, k("")),
         {{conj(), {send("BSPass", k("bs"), N, "PUT", k("pass"), k("go"))}}}},
        {"rcvBoatPass", rsp(k("bs"), k("BSPass"), true, k("")),
         {{conj(), {send("BridgeCl", k("br"), N, "PUT", k("bridge"), k("close"))}}}},
        {"rcvBridgeClose", rsp(k("br"), k("BridgeCl"), true, k("")),
         {{conj(), {send("GateOp", k("ga"), N, "PUT", k("gate"), k("open"))}}}},
        {"rcvGateOpen", rsp(k("ga"), k("GateOp"), true, k("")),
         {{conj(), {set("status", k("idle"))}}}},
    };
    return std::shared_ptr<const RuleSet>(rs);
  }();
  return rules;
}

std::shared_ptr<const RuleSet> pnpRules() {
  static const auto rules = [] {
    const auto N = MsgType::NON;
    auto rs = std::make_shared<RuleSet>();
    rs->name = "pnp-rules";
    rs->rules = {
        {"rcvStart", req(v("src"), k("PUT"), k("start"), v("x")),
         {{eq(v("status"), k("idle")),
           {send("ArmGoNI", v("myarm"), N, "PUT", k("arm"), v("goNI")),
            set("status", k("working")), set("source", v("src"))}}}},
        {"rcvAtNI", rsp(v("s"), k("ArmGoNI"), true, k("")),
         {{eq(v("s"), v("myarm")), {send("GripCl", v("mygrip"), N, "PUT", k("grip"), k("close"))}}}},
        {"rcvGrCl", rsp(v("s"), k("GripCl"), true, k("")),
         {{eq(v("s"), v("mygrip")), {send("ArmGoI", v("myarm"), N, "PUT", k("arm"), v("goI"))}}}},
        {"rcvAtI", rsp(v("s"), k("ArmGoI"), true, k("")),
         {{eq(v("s"), v("myarm")), {send("GripOp", v("mygrip"), N, "PUT", k("grip"), k("open"))}}}},
        {"rcvGrOp", rsp(v("s"), k("GripOp"), true, k("")),
         {{eq(v("s"), v("mygrip")), {send("PnPDone", v("source"), N, "PUT", k("done"), k("ok"))}}}},
        {"rcvPnPDone", rsp(v("s"), k("PnPDone"), true, k("")),
         {{eq(v("s"), v("source")), {set("status", k("idle"))}}}},
    };
    return std::shared_ptr<const RuleSet>(rs);
  }();
  return rules;
}

std::shared_ptr<const RuleSet> ruleSetByName(const std::string& name) {
  if (name == "bridge-rules") return bridgeRules();
  if (name == "pnp-rules") return pnpRules();
  return nullptr;
}

}  // namespace coapsec
