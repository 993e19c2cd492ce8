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

#include "kbpforge/system.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

namespace kbpforge {

namespace {

void hash_combine(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

std::string agent_set_str(AgentSet s, int n) {
  std::string out = "{";
  bool first = true;
  for (AgentId a = 0; a < n; ++a) {
    if (!contains(s, a)) continue;
    if (!first) out += ",";
    out += std::to_string(a);
    first = false;
  }
  return out + "}";
}

}  // namespace

bool GlobalState::has_vote(Value v) const {
  return std::find(votes.begin(), votes.end(), v) != votes.end();
}

std::size_t GlobalStateHash::operator()(const GlobalState& s) const {
  std::size_t h = static_cast<std::size_t>(s.time);
  for (Value v : s.votes) hash_combine(h, static_cast<std::size_t>(v));
  hash_combine(h, s.failure.crashed);
  hash_combine(h, s.failure.faulty);
  for (const LocalState& l : s.locals) hash_combine(h, hash_local(l));
  for (const DecisionRecord& d : s.decisions) {
    hash_combine(h, static_cast<std::size_t>(d.value + 1));
    hash_combine(h, static_cast<std::size_t>(d.time + 1));
  }
  return h;
}

Action executed_action(const InstanceParams& params, const GlobalState& state,
                       AgentId agent, const DecisionFn& protocol) {
  if (state.failure.status(agent) == CrashStatus::crashed) return Action::noop();
  if (!tracks_decided(params.exchange) && state.decisions[agent].decided())
    return Action::noop();
  if (!protocol) return Action::noop();
  return protocol(agent, state.time, state.locals[agent]);
}

std::vector<GlobalState> initial_states(const InstanceParams& params) {
  params.validate();
  const std::vector<FailureEnv> envs = initial_failure_envs(params);
  std::vector<GlobalState> states;
  std::vector<Value> votes(params.n, 0);
  while (true) {
    for (const FailureEnv& env : envs) {
      GlobalState s;
      s.time = 0;
      s.votes = votes;
      s.failure = env;
      s.decisions.assign(params.n, DecisionRecord{});
      for (AgentId a = 0; a < params.n; ++a)
        s.locals.push_back(init_local(params, a, votes[a]));
      states.push_back(std::move(s));
    }
    int i = 0;
    for (; i < params.n; ++i) {
      if (++votes[i] < params.k) break;
      votes[i] = 0;
    }
    if (i == params.n) break;
  }
  return states;
}

AgentSet nonfaulty_set(const GlobalState& state) {
  return nonfaulty_agents(state.failure);
}

std::vector<StateIndex> LayeredSystem::path_to(int m, StateIndex s) const {
  std::vector<StateIndex> path(m + 1);
  for (int l = m; l >= 0; --l) {
    path[l] = s;
    if (l > 0) s = parents_[l][s];
  }
  return path;
}

Action LayeredSystem::action_at(int m, StateIndex s, AgentId a) const {
  if (m >= params_.horizon) return Action::noop();
  const DecisionTable* t = table();
  if (!t) return Action::noop();
  return executed_action(params_, state(m, s), a,
                         [t](AgentId agent, int time, const LocalState& local) {
                           return t->action(agent, time, local);
                         });
}

std::size_t LayeredSystem::total_states() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.size();
  return n;
}

std::size_t LayeredSystem::total_edges() const {
  std::size_t n = 0;
  for (const auto& layer : edges_)
    for (const auto& succ : layer) n += succ.size();
  return n;
}

std::size_t LayeredSystem::peak_layer_size() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n = std::max(n, l.size());
  return n;
}

SystemBuilder::SystemBuilder(const InstanceParams& params, DecisionFn protocol)
    : protocol_(std::move(protocol)) {
  params.validate();
  system_.params_ = params;
  system_.layers_.push_back(initial_states(params));
  system_.parents_.emplace_back(system_.layers_[0].size(), 0);
}

void SystemBuilder::expand() {
  const InstanceParams& params = system_.params_;
  const int m = system_.num_layers() - 1;
  if (m >= params.horizon) throw ModelError("system is already complete");
  const int n = params.n;
  const std::vector<GlobalState>& current = system_.layers_[m];

  std::vector<GlobalState> next;
  std::vector<StateIndex> parents;
  std::unordered_map<GlobalState, StateIndex, GlobalStateHash> index;
  std::vector<std::vector<StateIndex>> edges(current.size());

  std::vector<Action> actions(n, Action::noop());
  std::vector<std::optional<Message>> messages(n);
  std::vector<std::vector<LocalState>> options(n);
  std::vector<Received> received;
  received.reserve(n);

  for (StateIndex si = 0; si < current.size(); ++si) {
    if (deadline_ && (si & 1023) == 0) deadline_->check();
    const GlobalState& s = current[si];
    AgentSet senders = 0;
    std::vector<DecisionRecord> decisions = s.decisions;
    for (AgentId a = 0; a < n; ++a) {
      actions[a] = executed_action(params, s, a, protocol_);
      messages[a] = round_message(s.locals[a], actions[a]);
      if (messages[a]) senders |= singleton(a);
      if (actions[a].is_decide() && !decisions[a].decided())
        decisions[a] = DecisionRecord{actions[a].value(), m};
    }

    for (const RoundChoice& choice : round_choices(s.failure)) {
      const AgentSet full = choice.full & senders;
      const AgentSet partial = choice.partial & senders;
      // Each receiver's successor local state depends only on which partial
      // senders reach it, so successors are a product of per-receiver sets.
      for (AgentId j = 0; j < n; ++j) {
        options[j].clear();
        const AgentSet fixed = full | (partial & singleton(j));
        const AgentSet optional = partial & ~singleton(j);
        for (AgentSet q = 0;; q = (q - optional) & optional) {
          const AgentSet from = fixed | q;
          received.clear();
          for (AgentId a = 0; a < n; ++a)
            if (contains(from, a)) received.push_back({a, *messages[a]});
          LocalState l = update_local(params, j, m, s.locals[j], actions[j], received);
          if (std::find(options[j].begin(), options[j].end(), l) == options[j].end())
            options[j].push_back(std::move(l));
          if (q == optional) break;
        }
      }
      std::vector<std::size_t> pick(n, 0);
      while (true) {
        GlobalState g;
        g.time = m + 1;
        g.votes = s.votes;
        g.failure = choice.next;
        g.decisions = decisions;
        g.locals.reserve(n);
        for (AgentId j = 0; j < n; ++j) g.locals.push_back(options[j][pick[j]]);
        auto [it, inserted] = index.try_emplace(std::move(g), static_cast<StateIndex>(next.size()));
        if (inserted) {
          next.push_back(it->first);
          parents.push_back(si);
        }
        edges[si].push_back(it->second);
        AgentId j = 0;
        for (; j < n; ++j) {
          if (++pick[j] < options[j].size()) break;
          pick[j] = 0;
        }
        if (j == n) break;
      }
    }
    std::sort(edges[si].begin(), edges[si].end());
    edges[si].erase(std::unique(edges[si].begin(), edges[si].end()), edges[si].end());
  }

  system_.layers_.push_back(std::move(next));
  system_.parents_.push_back(std::move(parents));
  system_.edges_.push_back(std::move(edges));
}

DecisionTable materialize_table(const LayeredSystem& system,
                                const DecisionFn& protocol,
                                const std::string& provenance) {
  const InstanceParams& params = system.params();
  DecisionTable table(params, provenance);
  const int last = std::min(system.num_layers(), params.horizon);
  for (int m = 0; m < last; ++m) {
    for (const GlobalState& s : system.layer(m)) {
      for (AgentId a = 0; a < params.n; ++a) {
        if (table.find(a, m, s.locals[a])) continue;
        const Action act = protocol(a, m, s.locals[a]);
        TableEntry e{act, act.is_decide() ? singleton(act.value()) : 0U};
        table.set(a, m, s.locals[a], e);
      }
    }
  }
  return table;
}

LayeredSystem build_system(const InstanceParams& params, const DecisionTable* table,
                           const Deadline* deadline) {
  params.validate();
  if (!table && transmits_decisions(params.exchange))
    throw ModelError(std::string(to_string(params.exchange)) +
                     " transmits decisions; a decision table is required");
  if (table && !(table->params() == params))
    throw ModelError("decision table was generated for " + table->params().describe() +
                     ", not " + params.describe());
  DecisionFn fn;
  if (table)
    fn = [table](AgentId a, int time, const LocalState& l) { return table->action(a, time, l); };
  SystemBuilder builder(params, fn);
  builder.set_deadline(deadline);
  while (!builder.done()) builder.expand();
  LayeredSystem sys = builder.take();
  if (table) sys.attach_table(*table);
  return sys;
}

LayeredSystem build_system_with_rule(const InstanceParams& params, const DecisionFn& rule,
                                     const std::string& provenance) {
  SystemBuilder builder(params, rule);
  while (!builder.done()) builder.expand();
  LayeredSystem sys = builder.take();
  sys.attach_table(materialize_table(sys, rule, provenance));
  return sys;
}

std::string describe_state(const InstanceParams& params, const GlobalState& s) {
  std::ostringstream os;
  os << "time=" << s.time << " votes=[";
  for (std::size_t i = 0; i < s.votes.size(); ++i) os << (i ? "," : "") << s.votes[i];
  os << "]";
  if (params.failures == FailureModel::crash)
    os << " crashed=" << agent_set_str(s.failure.crashed, params.n);
  else
    os << " faulty=" << agent_set_str(s.failure.faulty, params.n);
  os << " locals=[";
  for (AgentId a = 0; a < params.n; ++a)
    os << (a ? " | " : "") << encode_local(params, s.locals[a]);
  os << "] decided=[";
  for (AgentId a = 0; a < params.n; ++a) {
    const DecisionRecord& d = s.decisions[a];
    os << (a ? "," : "");
    if (d.decided()) os << d.value << "@" << d.time;
    else os << "-";
  }
  os << "]";
  return os.str();
}

std::string describe_path(const LayeredSystem& system, int m, StateIndex s) {
  std::ostringstream os;
  const auto path = system.path_to(m, s);
  for (int l = 0; l <= m; ++l)
    os << "  " << describe_state(system.params(), system.state(l, path[l])) << "\n";
  return os.str();
}

}  // namespace kbpforge
