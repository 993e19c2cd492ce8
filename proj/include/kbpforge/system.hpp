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

// Layered interpreted systems. A point (run, m) is represented by the global
// state the run reaches at time m; layer m holds every distinct such state.

#ifndef KBPFORGE_SYSTEM_HPP_
#define KBPFORGE_SYSTEM_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kbpforge/deadline.hpp"
#include "kbpforge/decision_table.hpp"
#include "kbpforge/exchange.hpp"
#include "kbpforge/failures.hpp"
#include "kbpforge/params.hpp"

namespace kbpforge {

using StateIndex = std::uint32_t;

// Decision bookkeeping kept by the environment: the first decide action an
// agent performed and the time of the state it was taken in. Not observable.
struct DecisionRecord {
  Value value = kNoValue;
  int time = -1;

  bool decided() const { return time >= 0; }
  friend auto operator<=>(const DecisionRecord&, const DecisionRecord&) = default;
};

struct GlobalState {
  int time = 0;
  std::vector<Value> votes;
  FailureEnv failure;
  std::vector<LocalState> locals;
  std::vector<DecisionRecord> decisions;

  Observation observation(AgentId a) const { return {time, locals[a]}; }
  bool has_vote(Value v) const;

  friend bool operator==(const GlobalState&, const GlobalState&) = default;
};

struct GlobalStateHash {
  std::size_t operator()(const GlobalState& s) const;
};

// The decision protocol consulted while building: the raw action prescribed
// at (agent, time, local). It must be a function of those three only.
using DecisionFn = std::function<Action(AgentId, int, const LocalState&)>;

// Agents whose status is CRASHED take no actions; for exchanges without an
// observable decided flag, an agent that already decided idles (the
// "do noop until" loop). Otherwise the protocol decides.
Action executed_action(const InstanceParams& params, const GlobalState& state,
                       AgentId agent, const DecisionFn& protocol);

std::vector<GlobalState> initial_states(const InstanceParams& params);

AgentSet nonfaulty_set(const GlobalState& state);

class LayeredSystem {
 public:
  const InstanceParams& params() const { return params_; }
  // Number of layers built so far (horizon + 1 once complete).
  int num_layers() const { return static_cast<int>(layers_.size()); }
  bool complete() const { return num_layers() == params_.horizon + 1; }

  const std::vector<GlobalState>& layer(int m) const { return layers_.at(m); }
  const GlobalState& state(int m, StateIndex s) const { return layers_.at(m).at(s); }
  // Successors in layer m+1 of each state of layer m.
  const std::vector<std::vector<StateIndex>>& successors(int m) const {
    return edges_.at(m);
  }
  // Some predecessor in layer m-1 (the first one discovered).
  StateIndex parent(int m, StateIndex s) const { return parents_.at(m).at(s); }
  // States from layer 0 to (m, s), following recorded parents.
  std::vector<StateIndex> path_to(int m, StateIndex s) const;

  // The protocol this system was generated with; null when the system is
  // decision-independent and was built without one.
  const DecisionTable* table() const { return table_ ? &*table_ : nullptr; }
  void attach_table(DecisionTable table) { table_ = std::move(table); }

  // Action performed at (m, s) by agent a under the attached table.
  Action action_at(int m, StateIndex s, AgentId a) const;

  std::size_t total_states() const;
  std::size_t total_edges() const;
  std::size_t peak_layer_size() const;

 private:
  friend class SystemBuilder;
  InstanceParams params_;
  std::vector<std::vector<GlobalState>> layers_;
  std::vector<std::vector<std::vector<StateIndex>>> edges_;
  std::vector<std::vector<StateIndex>> parents_;
  std::optional<DecisionTable> table_;
};

// Forward layer-by-layer construction. The protocol is consulted lazily, so
// a caller may fill in decisions for layer m before calling expand().
class SystemBuilder {
 public:
  SystemBuilder(const InstanceParams& params, DecisionFn protocol);

  const LayeredSystem& system() const { return system_; }
  bool done() const { return system_.complete(); }
  // Polled during expand(); must outlive the builder.
  void set_deadline(const Deadline* deadline) { deadline_ = deadline; }
  // Builds layer num_layers() from the last layer.
  void expand();
  LayeredSystem take() { return std::move(system_); }

 private:
  LayeredSystem system_;
  DecisionFn protocol_;
  const Deadline* deadline_ = nullptr;
};

// Errors if the exchange transmits decisions and no table is given. The
// table, when present, must cover every reachable observation below the
// horizon and is attached to the result.
LayeredSystem build_system(const InstanceParams& params,
                           const DecisionTable* table = nullptr,
                           const Deadline* deadline = nullptr);

// Builds with a closed-form protocol and materializes it as a table over
// the reachable observations of layers below the horizon.
LayeredSystem build_system_with_rule(const InstanceParams& params,
                                     const DecisionFn& rule,
                                     const std::string& provenance);

// Records `protocol` at every reachable (agent, time, observation) with
// time below the horizon.
DecisionTable materialize_table(const LayeredSystem& system,
                                const DecisionFn& protocol,
                                const std::string& provenance);

// Text rendering of one state and of a counterexample path.
std::string describe_state(const InstanceParams& params, const GlobalState& s);
std::string describe_path(const LayeredSystem& system, int m, StateIndex s);

}  // namespace kbpforge

#endif  // KBPFORGE_SYSTEM_HPP_
