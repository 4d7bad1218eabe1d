#pragma once

#include <string>
#include <vector>

#include "coapsec/model.hpp"

namespace coapsec {

struct Transition {
  std::string rule;    // devsend, rcv, ackTimeout, net, tick, attack, mcx, ddevsend, ddevrcv
  std::string detail;  // human-readable instance description
  System next;
};

struct RcvResult {
  EndpointState attrs;
  std::vector<DelayedMessage> toSend;
  std::vector<LogItem> toLog;
  bool accepted = false;  // fresh request or first copy of a response
};

// Receive processing. These never look at the network.
RcvResult rcvRequest(const std::string& epid, EndpointState attrs, const Message& msg);
RcvResult rcvResponse(const std::string& epid, EndpointState attrs, const Message& msg);
RcvResult rcvEmpty(const std::string& epid, EndpointState attrs, const Message& msg);
RcvResult rcvMsg(const std::string& epid, EndpointState attrs, const Message& msg);
// rcvMsg followed by the application layer.
RcvResult receive(const std::string& epid, EndpointState attrs, const Message& msg);

bool canDevsend(const EndpointState& e);
// Builds the wire message for the head of sendReqs and updates attrs.
DelayedMessage sndAMsg(const std::string& epid, EndpointState& attrs);
// Resend step for a w4Ack entry with delay 0. Returns the copy for the network.
DelayedMessage ackTimeoutStep(EndpointState& attrs, std::size_t w4AckIndex);

Nat backOff(Nat ackTimeout, Nat n);

Nat mte(const EndpointState& e);
Nat mte(const System& s);
void passTime(EndpointState& e, Nat nz);
System passTime(System s, Nat nz);

// devsend, rcv, ackTimeout, net and tick instances (successors not yet canonical).
void coapTransitions(const System& s, std::vector<Transition>& out);

// Individual generators, exposed for tests.
std::vector<Transition> devsend(const System& s, const std::string& epid);
std::vector<Transition> rcv(const System& s, const std::string& epid, const DelayedMessage& dm);
std::vector<Transition> ackTimeout(const System& s, const std::string& epid, const DelayedMessage& dm);
std::vector<Transition> netMove(const System& s, const DelayedMessage& dm);
std::vector<Transition> tick(const System& s);

}  // namespace coapsec
