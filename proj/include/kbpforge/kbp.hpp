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

// Knowledge-based programs, their synthesized implementations, and the
// concrete baseline protocols.
//
//   sba:  decide(v) for the least v with B_i C_N exists(v)
//   eba0: decide(0) if init_i = 0 or K_i(some j just decided 0)
//         decide(1) if K_i(no j is deciding 0)
//
// An entry at (agent, m, local) is the action taken in round m+1, so the
// table covers layers 0..horizon-1.

#ifndef KBPFORGE_KBP_HPP_
#define KBPFORGE_KBP_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kbpforge/deadline.hpp"
#include "kbpforge/eval.hpp"
#include "kbpforge/system.hpp"

namespace kbpforge {

enum class KbpKind { sba, eba0 };

std::string_view to_string(KbpKind k);
std::optional<KbpKind> parse_kbp(std::string_view s);

// Throws ParamError unless the exchange suits the program: sba runs over
// floodset/count/diff/dworkmoses, eba0 over emin/ebasic.
void check_pairing(const InstanceParams& params, KbpKind kind);

// The program's guards as formulas for one agent.
FormulaPtr sba_guard(AgentId i, Value v);
FormulaPtr eba_decide0_guard(const InstanceParams& params, AgentId i);
FormulaPtr eba_decide1_guard(const InstanceParams& params, AgentId i);

// Evaluates the program's guards on layer m and records entries for every
// observation of that layer not yet in `out`. Deciding atoms are resolved
// against the evaluator's snapshot; for eba0 the decide-0 entries of layer
// m are written to `out` before the decide-1 guard is evaluated, so the
// snapshot may be `out` itself.
void fill_layer(Evaluator& ev, KbpKind kind, int m, DecisionTable& out);

struct Synthesis {
  DecisionTable table;
  LayeredSystem system;
};

Synthesis synthesize(const InstanceParams& params, KbpKind kind,
                     const Deadline* deadline = nullptr);

// Re-evaluates the program's guards on a complete system, resolving
// Deciding atoms against the system's own table. For an implementation
// this reproduces the table it was built with.
DecisionTable derive_table(const LayeredSystem& system, KbpKind kind);

enum class Baseline { floodset_textbook, dm_concrete, emin_impl, ebasic_impl };

std::string_view to_string(Baseline b);
std::optional<Baseline> parse_baseline(std::string_view s);

// Closed-form rule of a baseline. Throws ParamError when the exchange lacks
// a variable the rule reads.
DecisionFn baseline_rule(Baseline b, const InstanceParams& params);

LayeredSystem build_baseline(Baseline b, const InstanceParams& params,
                             const Deadline* deadline = nullptr);
DecisionTable as_table(Baseline b, const InstanceParams& params);

struct ConditionLine {
  int time = 0;
  AgentId agent = -1;  // -1: identical for every agent
  Action action = Action::noop();
  std::string condition;  // DNF over local variables
};

// For each time and agent, the observations at which each decide(v) fires,
// summarized as a disjunction of conjunctions of variable constraints that
// separates them from the observations where it does not fire.
std::vector<ConditionLine> condition_report(const DecisionTable& table);
std::string render_report(const std::vector<ConditionLine>& lines);

}  // namespace kbpforge

#endif  // KBPFORGE_KBP_HPP_
