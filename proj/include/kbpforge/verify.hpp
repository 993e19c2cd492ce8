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

#ifndef KBPFORGE_VERIFY_HPP_
#define KBPFORGE_VERIFY_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kbpforge/deadline.hpp"
#include "kbpforge/eval.hpp"
#include "kbpforge/kbp.hpp"
#include "kbpforge/system.hpp"

namespace kbpforge {

enum class Property {
  unique_decision,
  simultaneous_agreement,
  agreement,
  uniform_agreement,
  validity,
  termination,
};

std::string_view to_string(Property p);
std::optional<Property> parse_property(std::string_view s);

struct SpecSuite {
  std::vector<Property> properties;

  static SpecSuite sba();
  static SpecSuite eba();
  // "sba", "eba", or a comma-separated list of property names.
  static SpecSuite parse(std::string_view text);
};

struct PropertyResult {
  Property property;
  bool passed = true;
  std::size_t violations = 0;  // violating (state, agent) pairs
  std::optional<Counterexample> counterexample;
  std::string detail;  // what went wrong at the counterexample
};

struct VerificationReport {
  InstanceParams params;
  std::string provenance;
  std::vector<PropertyResult> results;
  std::size_t states = 0;
  std::size_t edges = 0;

  bool passed() const;
  std::string text() const;
};

// Checks the properties on a system against the table attached to it.
// Agreement, validity and simultaneity are judged among the agents in N of
// each state; termination at the final layer.
VerificationReport check_suite(const LayeredSystem& system, const SpecSuite& suite);

// Builds the system generated by `table` and checks it.
VerificationReport check_table(const DecisionTable& table, const SpecSuite& suite,
                               const Deadline* deadline = nullptr);

enum class Order { le, strict_lt_somewhere, strict_gt_somewhere, incomparable };
std::string_view to_string(Order o);

struct OrderWitness {
  AgentId agent = 0;
  int time_a = -1;  // -1: never decides
  int time_b = -1;
  std::string trace;
};

// Left-to-right reading: A <= B iff on every pair of corresponding runs,
// whenever agent i decides at time T under A it does not decide before T
// under B.
struct OrderResult {
  Order relation = Order::le;
  bool a_le_b = true;
  bool b_le_a = true;
  bool identical = true;  // equal decision times (or both never) everywhere
  std::optional<OrderWitness> a_earlier;
  std::optional<OrderWitness> b_earlier;
  std::size_t pair_states = 0;
};

// Runs correspond when they start from the same initial global state and
// the adversary makes the same choice in every round: the same crashes and
// the same receiver set for every partially delivered sender, whether or
// not the sender has a message under each protocol. The tables may belong
// to different exchanges over the same failure model, n, t, k and horizon.
OrderResult compare(const DecisionTable& a, const DecisionTable& b,
                    const Deadline* deadline = nullptr);

struct AuditFinding {
  enum Kind { late, early, wrong_value } kind;
  int layer = 0;
  StateIndex state = 0;
  AgentId agent = 0;
  Action expected = Action::noop();
  Action actual = Action::noop();
  std::string trace;
};

struct AuditReport {
  std::size_t late = 0;
  std::size_t early = 0;
  std::size_t wrong_value = 0;
  std::vector<AuditFinding> examples;  // first few of each kind

  bool clean() const { return late + early + wrong_value == 0; }
  std::string text() const;
};

// Compares what the system's table does with what the program's guards
// prescribe, at every state where the agent is alive and undecided.
AuditReport earliest_knowledge_audit(const LayeredSystem& system, KbpKind kind);

}  // namespace kbpforge

#endif  // KBPFORGE_VERIFY_HPP_
