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

#include "kbpforge/formula.hpp"

namespace kbpforge {

namespace {

std::string join(const std::vector<FormulaPtr>& fs, const char* op) {
  std::string s = "(";
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (i) s += op;
    s += fs[i]->str();
  }
  return s + ")";
}

bool polarity_ok(const Formula& f, const std::string& var, bool positive) {
  switch (f.kind()) {
    case FormulaKind::variable:
      return f.name() != var || positive;
    case FormulaKind::gfp:
      if (f.name() == var) return true;  // shadowed
      return polarity_ok(*f.children()[0], var, positive);
    case FormulaKind::negation:
      return polarity_ok(*f.children()[0], var, !positive);
    case FormulaKind::implication:
      return polarity_ok(*f.children()[0], var, !positive) &&
             polarity_ok(*f.children()[1], var, positive);
    case FormulaKind::equivalence:
      for (const auto& c : f.children())
        if (!polarity_ok(*c, var, positive) || !polarity_ok(*c, var, !positive)) return false;
      return true;
    default:
      for (const auto& c : f.children())
        if (!polarity_ok(*c, var, positive)) return false;
      return true;
  }
}

}  // namespace

bool compare_ints(int lhs, const std::string& op, int rhs) {
  if (op == "==") return lhs == rhs;
  if (op == "!=") return lhs != rhs;
  if (op == "<") return lhs < rhs;
  if (op == "<=") return lhs <= rhs;
  if (op == ">") return lhs > rhs;
  if (op == ">=") return lhs >= rhs;
  throw ModelError("unknown comparison operator '" + op + "'");
}

std::string Formula::str() const {
  switch (kind_) {
    case FormulaKind::constant: return constant_ ? "true" : "false";
    case FormulaKind::atom: return name_;
    case FormulaKind::negation: return "!" + children_[0]->str();
    case FormulaKind::conjunction: return join(children_, " & ");
    case FormulaKind::disjunction: return join(children_, " | ");
    case FormulaKind::implication: return join(children_, " -> ");
    case FormulaKind::equivalence: return join(children_, " <-> ");
    case FormulaKind::knows: return "K[" + std::to_string(agent_) + "] " + children_[0]->str();
    case FormulaKind::believes: return "B[" + std::to_string(agent_) + "] " + children_[0]->str();
    case FormulaKind::everyone: return "EN " + children_[0]->str();
    case FormulaKind::common: return "CN " + children_[0]->str();
    case FormulaKind::variable: return name_;
    case FormulaKind::gfp: return "(gfp " + name_ + ". " + children_[0]->str() + ")";
  }
  return "?";
}

FormulaPtr Formula::constant(bool value) {
  auto f = std::make_shared<Formula>();
  f->kind_ = FormulaKind::constant;
  f->constant_ = value;
  return f;
}

FormulaPtr Formula::atom(std::string name, AtomTest test) {
  auto f = std::make_shared<Formula>();
  f->kind_ = FormulaKind::atom;
  f->name_ = std::move(name);
  f->test_ = std::move(test);
  return f;
}

FormulaPtr Formula::negation(FormulaPtr a) {
  auto f = std::make_shared<Formula>();
  f->kind_ = FormulaKind::negation;
  f->children_ = {std::move(a)};
  return f;
}

FormulaPtr Formula::conjunction(std::vector<FormulaPtr> fs) {
  if (fs.empty()) return constant(true);
  if (fs.size() == 1) return fs.front();
  auto f = std::make_shared<Formula>();
  f->kind_ = FormulaKind::conjunction;
  f->children_ = std::move(fs);
  return f;
}

FormulaPtr Formula::disjunction(std::vector<FormulaPtr> fs) {
  if (fs.empty()) return constant(false);
  if (fs.size() == 1) return fs.front();
  auto f = std::make_shared<Formula>();
  f->kind_ = FormulaKind::disjunction;
  f->children_ = std::move(fs);
  return f;
}

FormulaPtr Formula::implication(FormulaPtr a, FormulaPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind_ = FormulaKind::implication;
  f->children_ = {std::move(a), std::move(b)};
  return f;
}

FormulaPtr Formula::equivalence(FormulaPtr a, FormulaPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind_ = FormulaKind::equivalence;
  f->children_ = {std::move(a), std::move(b)};
  return f;
}

FormulaPtr Formula::knows(AgentId i, FormulaPtr a) {
  auto f = std::make_shared<Formula>();
  f->kind_ = FormulaKind::knows;
  f->agent_ = i;
  f->children_ = {std::move(a)};
  return f;
}

FormulaPtr Formula::believes(AgentId i, FormulaPtr a) {
  auto f = std::make_shared<Formula>();
  f->kind_ = FormulaKind::believes;
  f->agent_ = i;
  f->children_ = {std::move(a)};
  return f;
}

FormulaPtr Formula::everyone(FormulaPtr a) {
  auto f = std::make_shared<Formula>();
  f->kind_ = FormulaKind::everyone;
  f->children_ = {std::move(a)};
  return f;
}

FormulaPtr Formula::common(FormulaPtr a) {
  auto f = std::make_shared<Formula>();
  f->kind_ = FormulaKind::common;
  f->children_ = {std::move(a)};
  return f;
}

FormulaPtr Formula::variable(std::string name) {
  auto f = std::make_shared<Formula>();
  f->kind_ = FormulaKind::variable;
  f->name_ = std::move(name);
  return f;
}

FormulaPtr Formula::gfp(std::string name, FormulaPtr body) {
  if (!occurs_only_positively(*body, name))
    throw ModelError("fixpoint variable " + name + " occurs in a negative position");
  auto f = std::make_shared<Formula>();
  f->kind_ = FormulaKind::gfp;
  f->name_ = std::move(name);
  f->children_ = {std::move(body)};
  return f;
}

bool occurs_only_positively(const Formula& f, const std::string& var) {
  return polarity_ok(f, var, true);
}

namespace atoms {

FormulaPtr exists_vote(Value v) {
  return Formula::atom("exists_vote(" + std::to_string(v) + ")",
                       [v](const AtomContext& c) { return c.state.has_vote(v); });
}

FormulaPtr in_nonfaulty(AgentId i) {
  return Formula::atom("in_n(" + std::to_string(i) + ")", [i](const AtomContext& c) {
    return contains(nonfaulty_set(c.state), i);
  });
}

FormulaPtr decided(AgentId i) {
  return Formula::atom("decided(" + std::to_string(i) + ")", [i](const AtomContext& c) {
    return c.state.decisions.at(i).decided();
  });
}

FormulaPtr decision_is(AgentId i, Value v) {
  return Formula::atom("decision(" + std::to_string(i) + "," + std::to_string(v) + ")",
                       [i, v](const AtomContext& c) {
                         const DecisionRecord& d = c.state.decisions.at(i);
                         return d.decided() && d.value == v;
                       });
}

FormulaPtr just_decided(AgentId j, Value v) {
  return Formula::atom("jdecided(" + std::to_string(j) + "," + std::to_string(v) + ")",
                       [j, v](const AtomContext& c) {
                         const DecisionRecord& d = c.state.decisions.at(j);
                         return d.decided() && d.value == v && d.time == c.layer - 1;
                       });
}

namespace {
Action snapshot_action(const AtomContext& c, AgentId j) {
  const InstanceParams& p = c.system.params();
  if (c.layer >= p.horizon || !c.snapshot) return Action::noop();
  const DecisionTable* t = c.snapshot;
  return executed_action(p, c.state, j, [t](AgentId a, int time, const LocalState& l) {
    return t->action(a, time, l);
  });
}
}  // namespace

FormulaPtr deciding(AgentId j, Value v) {
  return Formula::atom("deciding(" + std::to_string(j) + "," + std::to_string(v) + ")",
                       [j, v](const AtomContext& c) {
                         const Action a = snapshot_action(c, j);
                         return a.is_decide() && a.value() == v;
                       });
}

FormulaPtr deciding_any(AgentId j) {
  return Formula::atom("deciding(" + std::to_string(j) + ")", [j](const AtomContext& c) {
    return snapshot_action(c, j).is_decide();
  });
}

FormulaPtr vote_is(AgentId i, Value v) {
  return Formula::atom("vote(" + std::to_string(i) + ")==" + std::to_string(v),
                       [i, v](const AtomContext& c) { return c.state.votes.at(i) == v; });
}

FormulaPtr local_compare(AgentId i, std::string var, std::string op, int rhs) {
  std::string name = var + "(" + std::to_string(i) + ")" + op + std::to_string(rhs);
  compare_ints(0, op, 0);  // validates op
  return Formula::atom(std::move(name), [i, var, op, rhs](const AtomContext& c) {
    const auto value = local_variable(c.system.params(), c.state.locals.at(i), var);
    if (!value)
      throw ModelError("exchange " + std::string(to_string(c.system.params().exchange)) +
                       " has no local variable '" + var + "'");
    return compare_ints(*value, op, rhs);
  });
}

FormulaPtr time_compare(std::string op, int rhs) {
  compare_ints(0, op, 0);
  return Formula::atom("time" + op + std::to_string(rhs), [op, rhs](const AtomContext& c) {
    return compare_ints(c.layer, op, rhs);
  });
}

FormulaPtr from_sets(std::string name, std::vector<std::vector<bool>> per_layer) {
  auto sets = std::make_shared<std::vector<std::vector<bool>>>(std::move(per_layer));
  return Formula::atom(std::move(name), [sets](const AtomContext& c) {
    return (*sets).at(c.layer).at(c.index);
  });
}

}  // namespace atoms

}  // namespace kbpforge
