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

// Independent reference computations shared by the unit tests and the
// acceptance runner. None of these go through SystemBuilder.

#ifndef KBPFORGE_TESTS_ORACLES_HPP_
#define KBPFORGE_TESTS_ORACLES_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kbpforge/eval.hpp"
#include "kbpforge/exchange.hpp"
#include "kbpforge/failures.hpp"
#include "kbpforge/kbp.hpp"
#include "kbpforge/system.hpp"

namespace kbpforge::oracle {

// Canonical text of a whole global state, comparable across constructions.
inline std::string state_key(const InstanceParams& p, const GlobalState& s) {
  std::ostringstream os;
  os << s.time << "|";
  for (Value v : s.votes) os << v;
  os << "|" << s.failure.crashed << "," << s.failure.faulty << "," << s.failure.budget_used << "|";
  for (const LocalState& l : s.locals) os << encode_local(p, l) << ";";
  os << "|";
  for (const DecisionRecord& d : s.decisions) os << d.value << "@" << d.time << ";";
  return os.str();
}

struct HistorySummary {
  std::uint64_t histories = 0;                            // leaves reached
  std::vector<std::set<std::pair<AgentId, std::string>>> observations;  // per time
  std::vector<std::set<std::string>> states;              // per time
};

// Walks every run prefix up to the horizon without merging anything. Each
// round applies every (delivery matrix, next env) outcome of the failure
// model; the decision protocol is consulted per agent.
inline HistorySummary enumerate_histories(const InstanceParams& p, const DecisionFn& protocol) {
  HistorySummary out;
  out.observations.resize(p.horizon + 1);
  out.states.resize(p.horizon + 1);

  std::vector<std::vector<Value>> votes(1);
  for (AgentId a = 0; a < p.n; ++a) {
    std::vector<std::vector<Value>> next;
    for (const auto& prefix : votes)
      for (Value v = 0; v < p.k; ++v) {
        next.push_back(prefix);
        next.back().push_back(v);
      }
    votes = std::move(next);
  }

  std::function<void(const GlobalState&)> walk = [&](const GlobalState& s) {
    const int m = s.time;
    for (AgentId a = 0; a < p.n; ++a) out.observations[m].insert({a, encode_local(p, s.locals[a])});
    out.states[m].insert(state_key(p, s));
    if (m == p.horizon) {
      ++out.histories;
      return;
    }
    std::vector<Action> act(p.n, Action::noop());
    std::vector<std::optional<Message>> msg(p.n);
    std::vector<DecisionRecord> decisions = s.decisions;
    for (AgentId a = 0; a < p.n; ++a) {
      const bool crashed = contains(s.failure.crashed, a);
      const bool idle = !tracks_decided(p.exchange) && s.decisions[a].decided();
      if (!crashed && !idle) act[a] = protocol(a, m, s.locals[a]);
      msg[a] = round_message(s.locals[a], act[a]);
      if (act[a].is_decide() && !decisions[a].decided()) decisions[a] = {act[a].value(), m};
    }
    for (const RoundOutcome& o : round_outcomes(s.failure)) {
      GlobalState nx;
      nx.time = m + 1;
      nx.votes = s.votes;
      nx.failure = o.next;
      nx.decisions = decisions;
      for (AgentId j = 0; j < p.n; ++j) {
        std::vector<Received> got;
        for (AgentId a = 0; a < p.n; ++a)
          if (msg[a] && o.delivery.delivers(a, j)) got.push_back({a, *msg[a]});
        nx.locals.push_back(update_local(p, j, m, s.locals[j], act[j], got));
      }
      walk(nx);
    }
  };

  for (const FailureEnv& env : initial_failure_envs(p)) {
    for (const auto& v : votes) {
      GlobalState s;
      s.votes = v;
      s.failure = env;
      for (AgentId a = 0; a < p.n; ++a) s.locals.push_back(init_local(p, a, v[a]));
      s.decisions.assign(p.n, DecisionRecord{});
      walk(s);
    }
  }
  return out;
}

inline std::vector<std::set<std::pair<AgentId, std::string>>> system_observations(
    const LayeredSystem& sys) {
  std::vector<std::set<std::pair<AgentId, std::string>>> out(sys.num_layers());
  for (int m = 0; m < sys.num_layers(); ++m)
    for (const GlobalState& s : sys.layer(m))
      for (AgentId a = 0; a < sys.params().n; ++a)
        out[m].insert({a, encode_local(sys.params(), s.locals[a])});
  return out;
}

inline std::vector<std::set<std::string>> system_states(const LayeredSystem& sys) {
  std::vector<std::set<std::string>> out(sys.num_layers());
  for (int m = 0; m < sys.num_layers(); ++m)
    for (const GlobalState& s : sys.layer(m)) out[m].insert(state_key(sys.params(), s));
  return out;
}

// First decision time of the closed-form FloodSet condition.
inline int floodset_closed_form_time(int n, int t) { return t >= n - 1 ? n - 1 : t + 1; }

// Decide the least value seen at the closed-form FloodSet time.
inline DecisionFn floodset_closed_form(const InstanceParams& p) {
  const int when = floodset_closed_form_time(p.n, p.t);
  return [when](AgentId, int time, const LocalState& l) {
    const ValueSet seen = *seen_values(l);
    return time == when ? Action::decide(__builtin_ctz(seen)) : Action::noop();
  };
}

// Decide the least value seen the first time the Count condition holds.
// count only carries information after a round has been played, so the
// count disjunct is read from time 1 on.
inline DecisionFn count_closed_form(const InstanceParams& p) {
  const int n = p.n;
  const int t = p.t;
  return [n, t](AgentId, int time, const LocalState& l) {
    const auto& c = std::get<CountLocal>(l);
    const bool fire = (time >= 1 && c.count <= 1) || (t >= n - 1 && time == t) ||
                      (t < n - 1 && time == t + 1);
    return fire ? Action::decide(__builtin_ctz(c.seen)) : Action::noop();
  };
}

// Common belief by brute force over the explicit relation: s -> s' iff some
// agent in N(s) and N(s') has the same local state in both. Quadratic in
// the layer size, so only for small layers.
inline LayerSet naive_common_belief(const LayeredSystem& sys, const LayerSet& phi, int m) {
  const auto& states = sys.layer(m);
  const std::size_t size = states.size();
  std::vector<std::vector<std::size_t>> adj(size);
  for (std::size_t a = 0; a < size; ++a) {
    const AgentSet na = nonfaulty_set(states[a]);
    for (std::size_t b = 0; b < size; ++b) {
      const AgentSet both = na & nonfaulty_set(states[b]);
      for (AgentId i = 0; i < sys.params().n; ++i)
        if (contains(both, i) && states[a].locals[i] == states[b].locals[i]) {
          adj[a].push_back(b);
          break;
        }
    }
  }
  LayerSet out(size);
  for (std::size_t s = 0; s < size; ++s) {
    std::vector<bool> seen(size, false);
    std::vector<std::size_t> stack(adj[s].begin(), adj[s].end());
    bool ok = true;
    while (!stack.empty() && ok) {
      const std::size_t x = stack.back();
      stack.pop_back();
      if (seen[x]) continue;
      seen[x] = true;
      if (!phi[x]) ok = false;
      for (std::size_t y : adj[x]) stack.push_back(y);
    }
    out[s] = ok;
  }
  return out;
}

}  // namespace kbpforge::oracle

#endif  // KBPFORGE_TESTS_ORACLES_HPP_
