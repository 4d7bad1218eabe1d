#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>

#include "coapsec/model.hpp"

namespace coapsec {

using Bindings = std::map<std::string, std::string>;

std::optional<Bindings> matchPattern(const MPat& mpat, const Message& msg);

struct AppCtx {
  const Bindings& bindings;
  const std::map<std::string, std::string>& akb;
  const RMap& rsrcs;
};

std::optional<std::string> resolve(const Pat& p, const AppCtx& ctx);
bool evalCond(const Cond& c, const AppCtx& ctx);
// Returns false when a variable could not be resolved and the action was skipped.
bool execAction(const AppAct& a, const Bindings& bindings, EndpointState& attrs);

EndpointState doApp(const Message& msg, EndpointState attrs);

Cond eq(Pat a, Pat b);
Cond neq(Pat a, Pat b);
Cond conj(std::vector<Cond> cs = {});
Cond disj(std::vector<Cond> cs = {});
MPat req(Pat src, Pat meth, Pat path, Pat val);
MPat rsp(Pat src, Pat amid, bool success, Pat val);
AppAct send(std::string amid, Pat tgt, MsgType type, std::string meth, Pat path, Pat val);
AppAct set(std::string var, Pat val);
AppAct put(std::string path, Pat val);

std::shared_ptr<const RuleSet> bridgeRules();
std::shared_ptr<const RuleSet> pnpRules();
std::shared_ptr<const RuleSet> ruleSetByName(const std::string& name);

}  // namespace coapsec
