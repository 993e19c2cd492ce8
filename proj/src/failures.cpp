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

#include "kbpforge/failures.hpp"

#include <algorithm>

namespace kbpforge {

std::vector<FailureEnv> initial_failure_envs(const InstanceParams& params) {
  std::vector<FailureEnv> envs;
  FailureEnv base;
  base.model = params.failures;
  base.n = params.n;
  base.t = params.t;
  if (params.failures == FailureModel::crash) {
    envs.push_back(base);
    return envs;
  }
  const AgentSet all = params.all_agents();
  for (AgentSet f = 0;; f = (f - all) & all) {  // every subset of all
    if (set_size(f) <= params.t) {
      FailureEnv e = base;
      e.faulty = f;
      e.budget_used = set_size(f);
      envs.push_back(e);
    }
    if (f == all) break;
  }
  std::sort(envs.begin(), envs.end());
  return envs;
}

std::vector<RoundChoice> round_choices(const FailureEnv& env) {
  const AgentSet all = (AgentSet{1} << env.n) - 1;
  std::vector<RoundChoice> choices;
  if (env.model == FailureModel::somissions) {
    choices.push_back({all & ~env.faulty, env.faulty, env});
    return choices;
  }
  const AgentSet active = all & ~env.crashed;
  const int budget = env.t - env.budget_used;
  // Iterate over subsets of the active agents that newly crash.
  for (AgentSet s = 0;; s = (s - active) & active) {
    if (set_size(s) <= budget) {
      RoundChoice c;
      c.full = active & ~s;
      c.partial = s;
      c.next = env;
      c.next.crashed |= s;
      c.next.budget_used += set_size(s);
      choices.push_back(c);
    }
    if (s == active) break;
  }
  return choices;
}

std::vector<RoundOutcome> round_outcomes(const FailureEnv& env) {
  std::vector<RoundOutcome> out;
  const AgentSet all = (AgentSet{1} << env.n) - 1;
  for (const RoundChoice& c : round_choices(env)) {
    std::vector<AgentId> partial;
    for (AgentId a = 0; a < env.n; ++a)
      if (contains(c.partial, a)) partial.push_back(a);
    DeliveryMatrix m;
    m.rows.assign(env.n, 0);
    for (AgentId a = 0; a < env.n; ++a)
      if (contains(c.full, a)) m.rows[a] = all;
    // Odometer over the rows of the partial senders.
    std::vector<AgentSet> row(partial.size(), 0);
    while (true) {
      for (std::size_t i = 0; i < partial.size(); ++i)
        m.rows[partial[i]] = row[i] | singleton(partial[i]);
      out.push_back({m, c.next});
      std::size_t i = 0;
      for (; i < partial.size(); ++i) {
        const AgentSet others = all & ~singleton(partial[i]);
        row[i] = (row[i] - others) & others;
        if (row[i] != 0) break;
      }
      if (i == partial.size()) break;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool is_failed_sender(const FailureEnv& env, AgentId agent) {
  if (env.model == FailureModel::crash) return contains(env.crashed, agent);
  return contains(env.faulty, agent);
}

AgentSet nonfaulty_agents(const FailureEnv& env) {
  const AgentSet all = (AgentSet{1} << env.n) - 1;
  return env.model == FailureModel::crash ? all & ~env.crashed
                                          : all & ~env.faulty;
}

}  // namespace kbpforge
