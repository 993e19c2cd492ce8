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

#include "kbpforge/eval.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

namespace kbpforge {

namespace {

struct LocalHash {
  std::size_t operator()(const LocalState& l) const { return hash_local(l); }
};

}  // namespace

std::size_t count(const LayerSet& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), true));
}

Partition indistinguishability_classes(const LayeredSystem& system, AgentId agent,
                                       int layer) {
  const auto& states = system.layer(layer);
  Partition p;
  p.class_of.resize(states.size());
  std::unordered_map<LocalState, std::uint32_t, LocalHash> ids;
  for (StateIndex s = 0; s < states.size(); ++s) {
    auto [it, inserted] =
        ids.try_emplace(states[s].locals[agent], static_cast<std::uint32_t>(p.members.size()));
    if (inserted) p.members.emplace_back();
    p.class_of[s] = it->second;
    p.members[it->second].push_back(s);
  }
  return p;
}

Evaluator::Evaluator(const LayeredSystem& system)
    : Evaluator(system, system.table()) {}

Evaluator::Evaluator(const LayeredSystem& system, const DecisionTable* snapshot)
    : system_(system), snapshot_(snapshot) {}

void Evaluator::ensure_layer(int layer) {
  if (layer < 0 || layer >= system_.num_layers())
    throw ModelError("layer " + std::to_string(layer) + " is not built");
  if (static_cast<int>(classes_.size()) <= layer) {
    classes_.resize(layer + 1);
    nonfaulty_.resize(layer + 1);
  }
  if (classes_[layer].empty()) classes_[layer].resize(system_.params().n);
}

const Partition& Evaluator::classes(AgentId agent, int layer) {
  ensure_layer(layer);
  auto& slot = classes_[layer][agent];
  if (!slot) slot = indistinguishability_classes(system_, agent, layer);
  return *slot;
}

const std::vector<AgentSet>& Evaluator::nonfaulty(int layer) {
  ensure_layer(layer);
  auto& slot = nonfaulty_[layer];
  if (!slot) {
    std::vector<AgentSet> v;
    v.reserve(system_.layer(layer).size());
    for (const GlobalState& s : system_.layer(layer)) v.push_back(nonfaulty_set(s));
    slot = std::move(v);
  }
  return *slot;
}

LayerSet Evaluator::knows(AgentId agent, const LayerSet& phi, int layer) {
  const Partition& p = classes(agent, layer);
  LayerSet out(phi.size(), false);
  for (const auto& cls : p.members) {
    const bool all = std::all_of(cls.begin(), cls.end(), [&](StateIndex s) { return phi[s]; });
    if (all)
      for (StateIndex s : cls) out[s] = true;
  }
  return out;
}

LayerSet Evaluator::believes(AgentId agent, const LayerSet& phi, int layer) {
  const auto& nf = nonfaulty(layer);
  LayerSet guarded(phi.size());
  for (std::size_t s = 0; s < phi.size(); ++s) guarded[s] = !contains(nf[s], agent) || phi[s];
  return knows(agent, guarded, layer);
}

LayerSet Evaluator::everyone_believes(const LayerSet& phi, int layer) {
  const auto& nf = nonfaulty(layer);
  LayerSet out(phi.size(), true);
  for (AgentId i = 0; i < system_.params().n; ++i) {
    const LayerSet b = believes(i, phi, layer);
    for (std::size_t s = 0; s < phi.size(); ++s)
      if (contains(nf[s], i) && !b[s]) out[s] = false;
  }
  return out;
}

LayerSet Evaluator::common_belief(const LayerSet& phi, int layer) {
  LayerSet x(phi.size(), true);
  int iterations = 0;
  while (true) {
    ++iterations;
    LayerSet body(phi.size());
    for (std::size_t s = 0; s < phi.size(); ++s) body[s] = x[s] && phi[s];
    LayerSet next = everyone_believes(body, layer);
    if (next == x) break;
    x = std::move(next);
  }
  last_iterations_ = iterations;
  return x;
}

LayerSet Evaluator::eval(const Formula& f, int layer) {
  ensure_layer(layer);
  Env env;
  return eval_in(f, layer, env);
}

LayerSet Evaluator::eval_in(const Formula& f, int layer, Env& env) {
  const auto& states = system_.layer(layer);
  const std::size_t size = states.size();
  switch (f.kind()) {
    case FormulaKind::constant:
      return LayerSet(size, f.constant_value());
    case FormulaKind::atom: {
      LayerSet out(size);
      for (StateIndex s = 0; s < size; ++s)
        out[s] = f.test()(AtomContext{system_, layer, s, states[s], snapshot_});
      return out;
    }
    case FormulaKind::negation: {
      LayerSet out = eval_in(*f.children()[0], layer, env);
      out.flip();
      return out;
    }
    case FormulaKind::conjunction: {
      LayerSet out(size, true);
      for (const auto& c : f.children()) {
        const LayerSet v = eval_in(*c, layer, env);
        for (std::size_t s = 0; s < size; ++s) out[s] = out[s] && v[s];
      }
      return out;
    }
    case FormulaKind::disjunction: {
      LayerSet out(size, false);
      for (const auto& c : f.children()) {
        const LayerSet v = eval_in(*c, layer, env);
        for (std::size_t s = 0; s < size; ++s) out[s] = out[s] || v[s];
      }
      return out;
    }
    case FormulaKind::implication: {
      const LayerSet a = eval_in(*f.children()[0], layer, env);
      LayerSet b = eval_in(*f.children()[1], layer, env);
      for (std::size_t s = 0; s < size; ++s) b[s] = !a[s] || b[s];
      return b;
    }
    case FormulaKind::equivalence: {
      const LayerSet a = eval_in(*f.children()[0], layer, env);
      LayerSet b = eval_in(*f.children()[1], layer, env);
      for (std::size_t s = 0; s < size; ++s) b[s] = a[s] == b[s];
      return b;
    }
    case FormulaKind::knows:
      return knows(f.agent(), eval_in(*f.children()[0], layer, env), layer);
    case FormulaKind::believes:
      return believes(f.agent(), eval_in(*f.children()[0], layer, env), layer);
    case FormulaKind::everyone:
      return everyone_believes(eval_in(*f.children()[0], layer, env), layer);
    case FormulaKind::common:
      return common_belief(eval_in(*f.children()[0], layer, env), layer);
    case FormulaKind::variable: {
      auto it = env.find(f.name());
      if (it == env.end()) throw ModelError("free fixpoint variable " + f.name());
      return it->second;
    }
    case FormulaKind::gfp: {
      // Downward iteration from the full layer; the saved binding is
      // restored so nested fixpoints may reuse names.
      std::optional<LayerSet> saved;
      if (auto it = env.find(f.name()); it != env.end()) saved = it->second;
      LayerSet x(size, true);
      int iterations = 0;
      while (true) {
        ++iterations;
        env[f.name()] = x;
        LayerSet next = eval_in(*f.children()[0], layer, env);
        for (std::size_t s = 0; s < size; ++s)
          if (next[s] && !x[s]) throw ModelError("non-monotone fixpoint body for " + f.name());
        if (next == x) break;
        x = std::move(next);
      }
      if (saved) env[f.name()] = *saved;
      else env.erase(f.name());
      last_iterations_ = iterations;
      return x;
    }
  }
  throw ModelError("unknown formula kind");
}

LayerSet common_belief_oracle(const LayeredSystem& system, const LayerSet& phi, int layer) {
  const auto& states = system.layer(layer);
  const int n = system.params().n;
  std::vector<AgentSet> nf;
  nf.reserve(states.size());
  for (const GlobalState& s : states) nf.push_back(nonfaulty_set(s));
  std::vector<Partition> parts;
  for (AgentId i = 0; i < n; ++i) parts.push_back(indistinguishability_classes(system, i, layer));

  // Backward search from the states violating phi: s reaches a violation in
  // one or more steps iff s has an edge into a violating state or into a
  // state that itself reaches one.
  LayerSet reaches_bad(states.size(), false);
  std::vector<std::vector<bool>> class_done(n);
  for (AgentId i = 0; i < n; ++i) class_done[i].assign(parts[i].members.size(), false);
  std::deque<StateIndex> queue;
  for (StateIndex s = 0; s < states.size(); ++s)
    if (!phi[s]) queue.push_back(s);
  while (!queue.empty()) {
    const StateIndex target = queue.front();
    queue.pop_front();
    for (AgentId i = 0; i < n; ++i) {
      if (!contains(nf[target], i)) continue;
      const std::uint32_t c = parts[i].class_of[target];
      if (class_done[i][c]) continue;
      class_done[i][c] = true;
      for (StateIndex s : parts[i].members[c]) {
        if (contains(nf[s], i) && !reaches_bad[s]) {
          reaches_bad[s] = true;
          queue.push_back(s);
        }
      }
    }
  }
  reaches_bad.flip();
  return reaches_bad;
}

HoldsResult holds_everywhere(const LayeredSystem& system, const Formula& f,
                             std::optional<int> only_layer, const DecisionTable* snapshot) {
  Evaluator ev(system, snapshot ? snapshot : system.table());
  const int first = only_layer.value_or(0);
  const int last = only_layer.value_or(system.num_layers() - 1);
  for (int m = first; m <= last; ++m) {
    const LayerSet ext = ev.eval(f, m);
    for (StateIndex s = 0; s < ext.size(); ++s) {
      if (!ext[s]) return {false, Counterexample{m, s, describe_path(system, m, s)}};
    }
  }
  return {true, std::nullopt};
}

}  // namespace kbpforge
