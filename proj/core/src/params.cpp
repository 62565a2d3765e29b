#include "tnrisk/params.hpp"

#include "tnrisk/error.hpp"

#include <fmt/format.h>

namespace tnrisk {

void SupportWeights::validate() const {
  const bool ok = rarely > 0.0 && rarely <= sometimes && sometimes <= often && often <= 1.0;
  if (!ok) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("support weights ({}, {}, {}) must satisfy 0 < r <= s <= o <= 1",
                            rarely, sometimes, often));
  }
}

double ModelParams::barrier(const CountryCode& origin, const CountryCode& dest) const {
  const auto it = barriers.find({origin, dest});
  return it == barriers.end() ? kBlocked : it->second;
}

void ModelParams::set_barrier(const CountryCode& origin, const CountryCode& dest, double cost) {
  barriers[{origin, dest}] = is_blocked(cost) ? kBlocked : cost;
}

std::vector<CountryCode> ModelParams::sources() const {
  std::vector<CountryCode> out;
  for (const auto& [code, s] : supply) {
    if (s > 0.0) out.push_back(code);
  }
  return out;
}

std::vector<CountryCode> ModelParams::targets() const {
  std::vector<CountryCode> out;
  for (const auto& [code, cost] : interception) {
    if (yield.contains(code)) out.push_back(code);
  }
  return out;
}

std::set<CountryCode> ModelParams::codes() const {
  std::set<CountryCode> out;
  for (const auto& [code, _] : supply) out.insert(code);
  for (const auto& [code, _] : interception) out.insert(code);
  for (const auto& [code, _] : yield) out.insert(code);
  for (const auto& [pair, _] : barriers) {
    out.insert(pair.first);
    out.insert(pair.second);
  }
  return out;
}

void ModelParams::force_domestic_zero() {
  for (const auto& code : codes()) barriers[{code, code}] = 0.0;
}

double ModelParams::total_supply() const {
  double total = 0.0;
  for (const auto& [_, s] : supply) total += s;
  return total;
}

}  // namespace tnrisk
