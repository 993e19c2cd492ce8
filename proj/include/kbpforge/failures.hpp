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

#ifndef KBPFORGE_FAILURES_HPP_
#define KBPFORGE_FAILURES_HPP_

#include <compare>
#include <cstddef>
#include <vector>

#include "kbpforge/params.hpp"

namespace kbpforge {

// CRASHING only exists inside a round: an agent chosen to crash in round m
// sends to an arbitrary subset and is CRASHED in the state at time m.
enum class CrashStatus : std::uint8_t { active, crashing, crashed };

// Environment bookkeeping for the failure model. Faultiness in the crash
// model is manifested (the crashed set), in the omissions model it is
// designated at time 0 and never changes.
struct FailureEnv {
  FailureModel model = FailureModel::crash;
  int n = 0;
  int t = 0;
  AgentSet crashed = 0;  // crash model
  AgentSet faulty = 0;   // omissions model
  int budget_used = 0;

  CrashStatus status(AgentId a) const {
    return contains(crashed, a) ? CrashStatus::crashed : CrashStatus::active;
  }

  friend auto operator<=>(const FailureEnv&, const FailureEnv&) = default;
  friend bool operator==(const FailureEnv&, const FailureEnv&) = default;
};

// rows[s] is the set of receivers that get sender s's message this round.
struct DeliveryMatrix {
  std::vector<AgentSet> rows;

  bool delivers(AgentId from, AgentId to) const {
    return contains(rows[from], to);
  }
  friend auto operator<=>(const DeliveryMatrix&,
                          const DeliveryMatrix&) = default;
  friend bool operator==(const DeliveryMatrix&,
                         const DeliveryMatrix&) = default;
};

struct RoundOutcome {
  DeliveryMatrix delivery;
  FailureEnv next;

  friend auto operator<=>(const RoundOutcome&, const RoundOutcome&) = default;
  friend bool operator==(const RoundOutcome&, const RoundOutcome&) = default;
};

// Factored view of one round: senders in `full` reach everybody, senders in
// `partial` reach themselves plus an arbitrary, independently chosen subset
// of the others, everybody else reaches nobody. The delivery matrices of a
// choice are exactly the per-receiver products of those subsets.
struct RoundChoice {
  AgentSet full = 0;
  AgentSet partial = 0;
  FailureEnv next;
};

std::vector<FailureEnv> initial_failure_envs(const InstanceParams& params);

std::vector<RoundChoice> round_choices(const FailureEnv& env);

// All (delivery, next env) pairs for one round, deduplicated and sorted.
// A sender's message to itself is always delivered when it sends at all.
std::vector<RoundOutcome> round_outcomes(const FailureEnv& env);

bool is_failed_sender(const FailureEnv& env, AgentId agent);

// The indexical set N: active agents (crash) or undesignated agents
// (omissions).
AgentSet nonfaulty_agents(const FailureEnv& env);

}  // namespace kbpforge

#endif  // KBPFORGE_FAILURES_HPP_
