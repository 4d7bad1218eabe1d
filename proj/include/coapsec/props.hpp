#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coapsec/model.hpp"

namespace coapsec {

struct LogPat {
  std::string epid, path, value;  // "" matches anything
};

struct Prop {
  enum class Kind {
    True, False, And, Or, Not,
    CheckRsrc, HasAV, HasRspTSnt, RspTSntBefore, HasRspTRcd, HasGetRsp, RspPend,
    SubLIL, IsV, BecomeV, AKbNotTok, EpsWithRbCountGT
  };
  Kind kind = Kind::True;
  std::vector<std::string> args;
  std::vector<Prop> kids;
  std::vector<LogPat> pats;
  Nat bound = 0;
};

class GoalParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool tokenMatches(const std::string& token, const std::string& aid);

bool checkRsrc(const System& s, const std::string& epid, const std::string& path, const std::string& val);
bool hasV(const System& s, const std::string& epid, const std::string& path, const std::string& val);
bool hasAV(const System& s, const std::string& epid, const std::string& key, const std::string& val);
bool hasRspTSnt(const System& s, const std::string& sv, const std::string& cl, const std::string& aid);
bool rspTSntBefore(const System& s, const std::string& sv, const std::string& cl,
                   const std::string& aid0, const std::string& aid1);
bool hasRspTRcd(const System& s, const std::string& cl, const std::string& sv, const std::string& aid);
bool hasGetRsp(const System& s, const std::string& cl, const std::string& sv, const std::string& aid,
               const std::string& val);
bool rspPend(const System& s, const std::string& cl, const std::string& sv, const std::string& aid);
bool isV(const System& s, const std::string& ctl, const std::string& epid, const std::string& aid,
         const std::string& path, const std::string& val);
bool becomeV(const System& s, const std::string& ctl, const std::string& epid, const std::string& aid,
             const std::string& path, const std::string& val);
bool aKbNotTok(const System& s, const std::string& eve, const std::string& tok);
Nat epswrbCount(const System& s, const std::string& path, const std::string& val);

std::optional<std::pair<LogItem, std::size_t>> findRcvLI(const std::vector<LogItem>& log,
                                                         std::size_t start, const LogPat& p);
bool subLIL(const std::vector<LogItem>& log, const std::vector<LogPat>& pats);
bool subLIL(const System& s, const std::vector<LogPat>& pats);

bool eval(const Prop& p, const System& s);

// builders
Prop pTrue();
Prop pAnd(std::vector<Prop> ps);
Prop pOr(std::vector<Prop> ps);
Prop pNot(Prop p);
Prop pAtom(Prop::Kind kind, std::vector<std::string> args);
Prop pSubLIL(std::vector<LogPat> pats);
Prop pCountGT(std::string path, std::string val, Nat k);

Prop bclIdleInv(const std::string& bcid, const std::string& brid, const std::string& gid);
Prop gateNClInv(const std::string& bcid, const std::string& brid, const std::string& gid);
Prop brNClInv(const std::string& bcid, const std::string& brid, const std::string& gid);
Prop boatPassInv(const std::string& bcid, const std::string& bsid, const std::string& brid,
                 const std::string& gid);
Prop pnpIdleInv(const std::string& pid, const std::string& gid, const std::string& aid,
                const std::string& goI);
Prop armGoingIInv(const std::string& pid, const std::string& gid, const std::string& aid,
                  const std::string& goI);
Prop armGoingNIInv(const std::string& pid, const std::string& gid, const std::string& aid,
                   const std::string& goNI);
Prop gripClosingInv(const std::string& pid, const std::string& gid, const std::string& aid,
                    const std::string& goNI);
Prop gripOpeningInv(const std::string& pid, const std::string& gid, const std::string& aid,
                    const std::string& goI);

Prop parseGoal(const std::string& text);
std::string toString(const Prop& p);

}  // namespace coapsec
