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

#ifndef KBPFORGE_FORMULA_HPP_
#define KBPFORGE_FORMULA_HPP_

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "kbpforge/system.hpp"

namespace kbpforge {

// What an atom may inspect: the state, where it sits, and the decision
// table used to resolve "deciding" atoms.
struct AtomContext {
  const LayeredSystem& system;
  int layer;
  StateIndex index;
  const GlobalState& state;
  const DecisionTable* snapshot;
};

using AtomTest = std::function<bool(const AtomContext&)>;

enum class FormulaKind {
  constant,
  atom,
  negation,
  conjunction,
  disjunction,
  implication,
  equivalence,
  knows,      // K_i
  believes,   // B^N_i, i.e. K_i(i in N => phi)
  everyone,   // E^N
  common,     // C^N = gfp X. E^N(X and phi)
  variable,
  gfp,
};

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

class Formula {
 public:
  FormulaKind kind() const { return kind_; }
  bool constant_value() const { return constant_; }
  const std::string& name() const { return name_; }  // atom or variable
  const AtomTest& test() const { return test_; }
  AgentId agent() const { return agent_; }
  const std::vector<FormulaPtr>& children() const { return children_; }

  std::string str() const;

  // Constructors; each returns an immutable shared node.
  static FormulaPtr constant(bool value);
  static FormulaPtr atom(std::string name, AtomTest test);
  static FormulaPtr negation(FormulaPtr f);
  static FormulaPtr conjunction(std::vector<FormulaPtr> fs);
  static FormulaPtr disjunction(std::vector<FormulaPtr> fs);
  static FormulaPtr implication(FormulaPtr a, FormulaPtr b);
  static FormulaPtr equivalence(FormulaPtr a, FormulaPtr b);
  static FormulaPtr knows(AgentId i, FormulaPtr f);
  static FormulaPtr believes(AgentId i, FormulaPtr f);
  static FormulaPtr everyone(FormulaPtr f);
  static FormulaPtr common(FormulaPtr f);
  static FormulaPtr variable(std::string name);
  // Throws ModelError if `name` occurs negatively in `body`.
  static FormulaPtr gfp(std::string name, FormulaPtr body);

 private:
  FormulaKind kind_ = FormulaKind::constant;
  bool constant_ = true;
  std::string name_;
  AtomTest test_;
  AgentId agent_ = -1;
  std::vector<FormulaPtr> children_;
};

// True iff every free occurrence of `var` in f sits under an even number of
// negations (implication antecedents count as negated, equivalences as
// both).
bool occurs_only_positively(const Formula& f, const std::string& var);

// Built-in atoms.
namespace atoms {
FormulaPtr exists_vote(Value v);           // some agent's init is v
FormulaPtr in_nonfaulty(AgentId i);        // i in N
FormulaPtr decided(AgentId i);             // i decided in an earlier round
FormulaPtr decision_is(AgentId i, Value v);
FormulaPtr just_decided(AgentId j, Value v);  // j performed decide(v) last round
FormulaPtr deciding(AgentId j, Value v);      // j performs decide(v) this round
FormulaPtr deciding_any(AgentId j);
FormulaPtr vote_is(AgentId i, Value v);
// Compares a local variable of agent i (see local_variables) with a
// constant; op is one of == != < <= > >=.
FormulaPtr local_compare(AgentId i, std::string var, std::string op, int rhs);
FormulaPtr time_compare(std::string op, int rhs);
// Membership in an explicit per-layer extension (used by tests and the
// oracle cross-check).
FormulaPtr from_sets(std::string name, std::vector<std::vector<bool>> per_layer);
}  // namespace atoms

bool compare_ints(int lhs, const std::string& op, int rhs);

}  // namespace kbpforge

#endif  // KBPFORGE_FORMULA_HPP_
