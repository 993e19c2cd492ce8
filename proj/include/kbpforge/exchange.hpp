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

// Information-exchange protocols: local state layout, round messages and
// state updates. Every local variable is observable.

#ifndef KBPFORGE_EXCHANGE_HPP_
#define KBPFORGE_EXCHANGE_HPP_

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "kbpforge/params.hpp"

namespace kbpforge {

class Action {
 public:
  static Action noop() { return Action(); }
  static Action decide(Value v) { return Action(v); }

  bool is_decide() const { return value_ >= 0; }
  Value value() const { return value_; }
  std::string str() const;

  friend auto operator<=>(const Action&, const Action&) = default;
  friend bool operator==(const Action&, const Action&) = default;

 private:
  Action() = default;
  explicit Action(Value v) : value_(v) {}
  Value value_ = -1;
};

// Sentinel for "no value" (the bottom element of jd).
inline constexpr Value kNoValue = -1;

struct FloodSetLocal {
  ValueSet seen = 0;
  friend auto operator<=>(const FloodSetLocal&, const FloodSetLocal&) = default;
};

struct CountLocal {
  ValueSet seen = 0;
  int count = 0;  // messages received last round, own message included
  friend auto operator<=>(const CountLocal&, const CountLocal&) = default;
};

struct DiffLocal {
  ValueSet seen = 0;
  int count = 0;
  int prev_count = 0;
  friend auto operator<=>(const DiffLocal&, const DiffLocal&) = default;
};

struct DworkMosesLocal {
  AgentSet known_faulty = 0;     // F
  AgentSet newly_faulty = 0;     // NF, broadcast next round
  AgentSet reported_faulty = 0;  // RF, union of NF sets heard last round
  bool exists0 = false;
  int current_waste = 0;
  friend auto operator<=>(const DworkMosesLocal&,
                          const DworkMosesLocal&) = default;
};

struct EminLocal {
  Value init = 0;
  bool decided = false;
  Value decision = kNoValue;
  Value jd = kNoValue;
  friend auto operator<=>(const EminLocal&, const EminLocal&) = default;
};

struct EbasicLocal {
  Value init = 0;
  bool decided = false;
  Value decision = kNoValue;
  Value jd = kNoValue;
  int num1 = 0;
  friend auto operator<=>(const EbasicLocal&, const EbasicLocal&) = default;
};

using LocalState = std::variant<FloodSetLocal, CountLocal, DiffLocal,
                                DworkMosesLocal, EminLocal, EbasicLocal>;

struct ValuesMessage {
  ValueSet seen = 0;
};
struct DworkMosesMessage {
  AgentSet newly_faulty = 0;
  bool exists0 = false;
};
struct DecideMessage {
  Value value = 0;
};
struct InitOneMessage {};

using Message = std::variant<ValuesMessage, DworkMosesMessage, DecideMessage,
                             InitOneMessage>;

struct Received {
  AgentId sender;
  Message message;
};

LocalState init_local(const InstanceParams& params, AgentId agent, Value vote);

std::optional<Message> round_message(const LocalState& local, Action action);

// `received` holds every message delivered to `self` in the round that
// starts at `time`, its own included when it sent one. Returns the local
// state at time+1.
LocalState update_local(const InstanceParams& params, AgentId self, int time,
                        const LocalState& local, Action action,
                        std::span<const Received> received);

// Named observable variables of a local state, in a fixed order. Used by
// formula atoms, condition reports and serialization.
struct LocalVariable {
  std::string name;
  int value;
};
std::vector<LocalVariable> local_variables(const InstanceParams& params,
                                           const LocalState& local);

// Looks up one variable by name (for example "count" or
// "values_received[1]"); nullopt when the exchange has no such variable.
std::optional<int> local_variable(const InstanceParams& params,
                                  const LocalState& local,
                                  std::string_view name);

// Compact, parseable text form: "name=value,name=value".
std::string encode_local(const InstanceParams& params, const LocalState& local);
LocalState decode_local(const InstanceParams& params, std::string_view text);

std::size_t hash_local(const LocalState& local);

std::optional<ValueSet> seen_values(const LocalState& local);
bool local_decided(const LocalState& local);

}  // namespace kbpforge

#endif  // KBPFORGE_EXCHANGE_HPP_
