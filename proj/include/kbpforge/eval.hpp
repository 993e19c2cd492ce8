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

// Formula evaluation under the clock semantics. Indistinguishability only
// relates states of the same layer, so every operator is evaluated layer by
// layer.

#ifndef KBPFORGE_EVAL_HPP_
#define KBPFORGE_EVAL_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kbpforge/formula.hpp"
#include "kbpforge/system.hpp"

namespace kbpforge {

// Extension of a formula on one layer, indexed by state.
using LayerSet = std::vector<bool>;

struct Partition {
  std::vector<std::uint32_t> class_of;           // per state
  std::vector<std::vector<StateIndex>> members;  // per class
};

// States of layer m grouped by agent's observation.
Partition indistinguishability_classes(const LayeredSystem& system, AgentId agent,
                                       int layer);

class Evaluator {
 public:
  // `snapshot` resolves deciding atoms; defaults to the system's own table.
  explicit Evaluator(const LayeredSystem& system);
  Evaluator(const LayeredSystem& system, const DecisionTable* snapshot);

  void set_snapshot(const DecisionTable* snapshot) { snapshot_ = snapshot; }
  const LayeredSystem& system() const { return system_; }

  // Throws ModelError on free variables.
  LayerSet eval(const Formula& f, int layer);

  const Partition& classes(AgentId agent, int layer);
  // Nonfaulty set of each state of the layer.
  const std::vector<AgentSet>& nonfaulty(int layer);

  LayerSet knows(AgentId agent, const LayerSet& phi, int layer);
  LayerSet believes(AgentId agent, const LayerSet& phi, int layer);
  LayerSet everyone_believes(const LayerSet& phi, int layer);
  LayerSet common_belief(const LayerSet& phi, int layer);

  // Iterations used by the most recent fixpoint computation (including the
  // final one that confirms stability).
  int last_fixpoint_iterations() const { return last_iterations_; }

 private:
  using Env = std::map<std::string, LayerSet>;
  LayerSet eval_in(const Formula& f, int layer, Env& env);
  void ensure_layer(int layer);

  const LayeredSystem& system_;
  const DecisionTable* snapshot_;
  std::vector<std::vector<std::optional<Partition>>> classes_;  // [layer][agent]
  std::vector<std::optional<std::vector<AgentSet>>> nonfaulty_;
  int last_iterations_ = 0;
};

// Independent route to C^N: the states from which every state reachable in
// one or more steps satisfies phi, where s -> s' iff some agent i lies in
// N(s) and N(s') and cannot tell s from s'.
LayerSet common_belief_oracle(const LayeredSystem& system, const LayerSet& phi,
                              int layer);

struct Counterexample {
  int layer = 0;
  StateIndex state = 0;
  std::string trace;  // path from layer 0
};

struct HoldsResult {
  bool holds = true;
  std::optional<Counterexample> counterexample;
};

// AG when `only_layer` is empty, otherwise AX^k with k = *only_layer.
HoldsResult holds_everywhere(const LayeredSystem& system, const Formula& f,
                             std::optional<int> only_layer = std::nullopt,
                             const DecisionTable* snapshot = nullptr);

std::size_t count(const LayerSet& s);

}  // namespace kbpforge

#endif  // KBPFORGE_EVAL_HPP_
