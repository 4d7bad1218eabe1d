#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coapsec/coap.hpp"
#include "coapsec/model.hpp"

namespace coapsec {

Capability mc(std::string tpat, std::string spat, bool active, std::vector<Act> acts = {});
Act act(std::string tpat, std::string spat, Nat extra);
Capability mcX(Nat extra);

Capability drop();
Capability delay(Nat n);
Capability divert(std::string d0, std::string d1);
Capability undivert(std::string s0, std::string s1);
Capability replay(Nat n);
Capability redirect(std::string d0, std::string d1);
Capability unredirect(std::string d0, std::string d1);

bool pmatch(const std::string& id, const std::string& pat);
Message setTgtSrc(Message m, const std::string& tpat, const std::string& spat);

std::vector<DelayedMessage> applyCaps(const DelayedMessage& dm, const std::vector<Act>& acts);

struct AttackResult {
  AttackerState attrs;
  std::vector<DelayedMessage> replacements;
};

// The MC form only. MCX goes through mcxTransitions.
std::optional<AttackResult> doAttack(AttackerState attrs, const DelayedMessage& dm,
                                     const Capability& cap);

void attackTransitions(const System& s, std::vector<Transition>& out);
void mcxTransitions(const System& s, std::vector<Transition>& out);

}  // namespace coapsec
