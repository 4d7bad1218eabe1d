#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coapsec/coap.hpp"
#include "coapsec/model.hpp"

namespace coapsec {

inline constexpr Nat kRandSize = 128;

std::string g(const std::string& seed, Nat k, Nat ix);

// Read-only look at sealed content for the mcX resource-holder pruning.
std::optional<Content> pruneView(const DContent& dc);

std::optional<std::pair<DialectAttrs, DelayedMessage>> applyDialect(DialectAttrs d,
                                                                    const DelayedMessage& dm);
// nullopt message means the input was dropped.
std::pair<DialectAttrs, std::optional<Message>> decodeDialect(DialectAttrs d, const Message& msg);

DialectAttrs sharedDialectAttrs(const std::string& eid, const std::vector<std::string>& peers);

// Throws std::invalid_argument if the system has messages in flight.
System D(const System& s);
System UD(const System& s);
bool isDialected(const System& s);

void dialectTransitions(const System& s, std::vector<Transition>& out);

}  // namespace coapsec
