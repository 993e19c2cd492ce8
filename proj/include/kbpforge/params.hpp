/*
 * Copyright (c) 2026, The kbpforge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
*/

#ifndef KBPFORGE_PARAMS_HPP_
#define KBPFORGE_PARAMS_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kbpforge {

using AgentId = int;
using Value = int;

// Bitmask sets; bit i set iff agent (resp. value) i is a member.
using AgentSet = std::uint32_t;
using ValueSet = std::uint32_t;

inline constexpr int kMaxAgents = 16;
inline constexpr int kMaxValues = 16;
// Largest representable layer index.
inline constexpr int kMaxHorizon = 64;

inline bool contains(std::uint32_t set, int member) {
  return (set >> member) & 1U;
}
inline std::uint32_t singleton(int member) { return 1U << member; }
inline int set_size(std::uint32_t set) { return __builtin_popcount(set); }

enum class ExchangeKind { floodset, count, diff, dworkmoses, emin, ebasic };
enum class FailureModel { crash, somissions };

std::string_view to_string(ExchangeKind e);
std::string_view to_string(FailureModel f);
std::optional<ExchangeKind> parse_exchange(std::string_view s);
std::optional<FailureModel> parse_failure_model(std::string_view s);

// True for exchanges whose messages or updates depend on the action taken
// in the round. Systems over those exchanges need a decision protocol to be
// built at all.
bool transmits_decisions(ExchangeKind e);

// True for exchanges with an observable decided flag in the local state.
bool tracks_decided(ExchangeKind e);

class ParamError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Errors raised while building or querying a model (as opposed to bad
// user-supplied parameters).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InstanceParams {
  int n = 0;        // agents
  int t = 0;        // max faulty
  int k = 2;        // decision values {0..k-1}
  int horizon = 0;  // rounds; layers are 0..horizon
  ExchangeKind exchange = ExchangeKind::floodset;
  FailureModel failures = FailureModel::crash;

  // Fills horizon with t+2 when zero and validates.
  static InstanceParams make(ExchangeKind exchange, FailureModel failures,
                             int n, int t, int k = 2, int horizon = 0);

  // Throws ParamError naming the violated constraint.
  void validate() const;

  AgentSet all_agents() const { return (AgentSet{1} << n) - 1; }
  std::string describe() const;

  friend bool operator==(const InstanceParams&,
                         const InstanceParams&) = default;
};

}  // namespace kbpforge

#endif  // KBPFORGE_PARAMS_HPP_
