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

#ifndef KBPFORGE_DECISION_TABLE_HPP_
#define KBPFORGE_DECISION_TABLE_HPP_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "kbpforge/exchange.hpp"
#include "kbpforge/params.hpp"

namespace kbpforge {

// An observation under the clock semantics: the time plus the local state.
struct Observation {
  int time = 0;
  LocalState local;
  friend auto operator<=>(const Observation&, const Observation&) = default;
};

struct TableKey {
  AgentId agent = 0;
  int time = 0;
  LocalState local;
  friend auto operator<=>(const TableKey&, const TableKey&) = default;
};

// `guards` records which per-value conditions held at the observation (for
// the SBA program: the values v with B_i C_N exists(v); for the EBA program:
// bit 0 = decide-0 guard, bit 1 = decide-1 guard). The action is what the
// protocol does there after tie-breaking.
struct TableEntry {
  Action action = Action::noop();
  ValueSet guards = 0;
  friend bool operator==(const TableEntry&, const TableEntry&) = default;
};

// A decision protocol materialized over reachable observations. Lookups of
// observations outside the table are errors, not defaults.
class DecisionTable {
 public:
  DecisionTable() = default;
  DecisionTable(InstanceParams params, std::string provenance)
      : params_(params), provenance_(std::move(provenance)) {}

  const InstanceParams& params() const { return params_; }
  const std::string& provenance() const { return provenance_; }
  void set_provenance(std::string p) { provenance_ = std::move(p); }

  void set(AgentId agent, int time, const LocalState& local, TableEntry entry);
  const TableEntry* find(AgentId agent, int time, const LocalState& local) const;
  // Throws ModelError for an unknown observation.
  Action action(AgentId agent, int time, const LocalState& local) const;

  const std::map<TableKey, TableEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Deterministic line-record text; identical tables serialize identically.
  std::string serialize() const;
  static DecisionTable parse(std::string_view text);

  // Extensional equality: same keys and same actions (guards ignored).
  bool same_actions(const DecisionTable& other) const;
  // Keys whose actions differ or that exist on one side only.
  std::vector<TableKey> action_diff(const DecisionTable& other) const;

 private:
  InstanceParams params_;
  std::string provenance_;
  std::map<TableKey, TableEntry> entries_;
};

}  // namespace kbpforge

#endif  // KBPFORGE_DECISION_TABLE_HPP_
