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

#include "kbpforge/verify.hpp"

#include <algorithm>
#include <climits>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace kbpforge {

std::string_view to_string(Property p) {
  switch (p) {
    case Property::unique_decision: return "unique_decision";
    case Property::simultaneous_agreement: return "simultaneous_agreement";
    case Property::agreement: return "agreement";
    case Property::uniform_agreement: return "uniform_agreement";
    case Property::validity: return "validity";
    case Property::termination: return "termination";
  }
  return "?";
}

std::optional<Property> parse_property(std::string_view s) {
  for (Property p : {Property::unique_decision, Property::simultaneous_agreement,
                     Property::agreement, Property::uniform_agreement, Property::validity,
                     Property::termination})
    if (s == to_string(p)) return p;
  return std::nullopt;
}

SpecSuite SpecSuite::sba() {
  return {{Property::unique_decision, Property::simultaneous_agreement, Property::validity,
           Property::termination}};
}

SpecSuite SpecSuite::eba() {
  return {{Property::unique_decision, Property::agreement, Property::validity,
           Property::termination}};
}

SpecSuite SpecSuite::parse(std::string_view text) {
  if (text == "sba") return sba();
  if (text == "eba" || text == "eba0") return eba();
  SpecSuite suite;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    const auto p = parse_property(item);
    if (!p) throw ParamError("unknown property '" + std::string(item) + "'");
    suite.properties.push_back(*p);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (suite.properties.empty()) throw ParamError("empty property suite");
  return suite;
}

bool VerificationReport::passed() const {
  return std::all_of(results.begin(), results.end(),
                     [](const PropertyResult& r) { return r.passed; });
}

std::string VerificationReport::text() const {
  std::ostringstream os;
  os << "table " << provenance << "\n";
  os << "params " << params.describe() << "\n";
  os << "system states=" << states << " edges=" << edges << "\n";
  for (const PropertyResult& r : results) {
    os << (r.passed ? "PASS " : "FAIL ") << to_string(r.property);
    if (!r.passed) os << " violations=" << r.violations;
    os << "\n";
    if (r.counterexample) {
      os << "  " << r.detail << "\n";
      os << "  at layer " << r.counterexample->layer << ", run prefix:\n";
      std::istringstream lines(r.counterexample->trace);
      for (std::string line; std::getline(lines, line);) os << "  " << line << "\n";
    }
  }
  os << (passed() ? "result pass" : "result fail") << "\n";
  return os.str();
}

namespace {

// Calls check(m, s) over layers [first, last]; it returns an empty string
// or a description of the violation.
PropertyResult scan(const LayeredSystem& sys, Property prop, int first, int last,
                    const std::function<std::size_t(int, StateIndex, std::string&)>& check) {
  PropertyResult r;
  r.property = prop;
  for (int m = first; m <= last; ++m) {
    for (StateIndex s = 0; s < sys.layer(m).size(); ++s) {
      std::string detail;
      const std::size_t bad = check(m, s, detail);
      if (!bad) continue;
      r.violations += bad;
      if (!r.counterexample) {
        r.counterexample = Counterexample{m, s, describe_path(sys, m, s)};
        r.detail = detail;
      }
    }
  }
  r.passed = r.violations == 0;
  return r;
}

}  // namespace

VerificationReport check_suite(const LayeredSystem& sys, const SpecSuite& suite) {
  const InstanceParams& p = sys.params();
  if (!sys.table() && transmits_decisions(p.exchange))
    throw ModelError("system has no decision table");
  VerificationReport report;
  report.params = p;
  report.provenance = sys.table() ? sys.table()->provenance() : "none";
  report.states = sys.total_states();
  report.edges = sys.total_edges();
  const int acting_last = std::min(sys.num_layers(), p.horizon) - 1;
  const int final_layer = sys.num_layers() - 1;

  for (Property prop : suite.properties) {
    switch (prop) {
      case Property::unique_decision:
        report.results.push_back(scan(sys, prop, 0, acting_last, [&](int m, StateIndex s, std::string& d) {
          const GlobalState& g = sys.state(m, s);
          std::size_t bad = 0;
          for (AgentId a = 0; a < p.n; ++a) {
            const Action act = sys.action_at(m, s, a);
            if (act.is_decide() && g.decisions[a].decided()) {
              if (!bad)
                d = "agent " + std::to_string(a) + " performs " + act.str() +
                    " after deciding " + std::to_string(g.decisions[a].value) + " at time " +
                    std::to_string(g.decisions[a].time);
              ++bad;
            }
          }
          return bad;
        }));
        break;
      case Property::simultaneous_agreement:
        report.results.push_back(scan(sys, prop, 0, acting_last, [&](int m, StateIndex s, std::string& d) {
          const AgentSet nf = nonfaulty_set(sys.state(m, s));
          std::optional<std::pair<AgentId, Action>> decider;
          for (AgentId a = 0; a < p.n; ++a) {
            if (!contains(nf, a)) continue;
            const Action act = sys.action_at(m, s, a);
            if (act.is_decide()) {
              decider = {a, act};
              break;
            }
          }
          if (!decider) return std::size_t{0};
          std::size_t bad = 0;
          for (AgentId b = 0; b < p.n; ++b) {
            if (!contains(nf, b)) continue;
            const Action act = sys.action_at(m, s, b);
            if (act != decider->second) {
              if (!bad)
                d = "nonfaulty agent " + std::to_string(decider->first) + " performs " +
                    decider->second.str() + " while nonfaulty agent " + std::to_string(b) +
                    " performs " + act.str();
              ++bad;
            }
          }
          return bad;
        }));
        break;
      case Property::agreement:
      case Property::uniform_agreement: {
        const bool uniform = prop == Property::uniform_agreement;
        report.results.push_back(scan(sys, prop, 0, final_layer, [&](int m, StateIndex s, std::string& d) {
          const GlobalState& g = sys.state(m, s);
          const AgentSet scope = uniform ? p.all_agents() : nonfaulty_set(g);
          std::optional<AgentId> first;
          for (AgentId a = 0; a < p.n; ++a) {
            if (!contains(scope, a) || !g.decisions[a].decided()) continue;
            if (!first) {
              first = a;
            } else if (g.decisions[a].value != g.decisions[*first].value) {
              d = std::string(uniform ? "" : "nonfaulty ") + "agents " + std::to_string(*first) +
                  " and " + std::to_string(a) + " decided " +
                  std::to_string(g.decisions[*first].value) + " and " +
                  std::to_string(g.decisions[a].value);
              return std::size_t{1};
            }
          }
          return std::size_t{0};
        }));
        break;
      }
      case Property::validity:
        report.results.push_back(scan(sys, prop, 0, acting_last, [&](int m, StateIndex s, std::string& d) {
          const GlobalState& g = sys.state(m, s);
          const AgentSet nf = nonfaulty_set(g);
          std::size_t bad = 0;
          for (AgentId a = 0; a < p.n; ++a) {
            if (!contains(nf, a)) continue;
            const Action act = sys.action_at(m, s, a);
            if (act.is_decide() && !g.has_vote(act.value())) {
              if (!bad)
                d = "nonfaulty agent " + std::to_string(a) + " performs " + act.str() +
                    " but no agent voted " + std::to_string(act.value());
              ++bad;
            }
          }
          return bad;
        }));
        break;
      case Property::termination:
        report.results.push_back(scan(sys, prop, final_layer, final_layer, [&](int, StateIndex s, std::string& d) {
          const GlobalState& g = sys.state(final_layer, s);
          const AgentSet nf = nonfaulty_set(g);
          std::size_t bad = 0;
          for (AgentId a = 0; a < p.n; ++a) {
            if (contains(nf, a) && !g.decisions[a].decided()) {
              if (!bad)
                d = "nonfaulty agent " + std::to_string(a) + " has not decided by time " +
                    std::to_string(final_layer);
              ++bad;
            }
          }
          return bad;
        }));
        break;
    }
  }
  return report;
}

VerificationReport check_table(const DecisionTable& table, const SpecSuite& suite,
                               const Deadline* deadline) {
  return check_suite(build_system(table.params(), &table, deadline), suite);
}

std::string_view to_string(Order o) {
  switch (o) {
    case Order::le: return "le";
    case Order::strict_lt_somewhere: return "strict_lt_somewhere";
    case Order::strict_gt_somewhere: return "strict_gt_somewhere";
    case Order::incomparable: return "incomparable";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Product construction for compare.

namespace {

struct PairState {
  GlobalState a;
  GlobalState b;
  friend bool operator==(const PairState&, const PairState&) = default;
};

struct PairHash {
  std::size_t operator()(const PairState& p) const {
    GlobalStateHash h;
    return h(p.a) * 0x9e3779b97f4a7c15ULL ^ h(p.b);
  }
};

struct Side {
  const DecisionTable* table;
  DecisionFn fn;
};

struct LocalPair {
  LocalState a;
  LocalState b;
  friend bool operator==(const LocalPair&, const LocalPair&) = default;
};

std::string describe_pair_path(const InstanceParams& pa, const InstanceParams& pb,
                               const std::vector<std::vector<PairState>>& layers,
                               const std::vector<std::vector<StateIndex>>& parents, int m,
                               StateIndex s) {
  std::vector<StateIndex> path(m + 1);
  for (int l = m; l >= 0; --l) {
    path[l] = s;
    if (l > 0) s = parents[l][s];
  }
  std::ostringstream os;
  for (int l = 0; l <= m; ++l) {
    const PairState& ps = layers[l][path[l]];
    os << "A " << describe_state(pa, ps.a) << "\n";
    os << "B " << describe_state(pb, ps.b) << "\n";
  }
  return os.str();
}

}  // namespace

OrderResult compare(const DecisionTable& ta, const DecisionTable& tb, const Deadline* deadline) {
  const InstanceParams& pa = ta.params();
  const InstanceParams& pb = tb.params();
  if (pa.failures != pb.failures || pa.n != pb.n || pa.t != pb.t || pa.k != pb.k ||
      pa.horizon != pb.horizon)
    throw ModelError("cannot pair runs of " + pa.describe() + " with runs of " + pb.describe());
  pa.validate();
  pb.validate();
  const InstanceParams* params[2] = {&pa, &pb};
  const int n = pa.n;
  Side sides[2] = {
      {&ta, [&ta](AgentId a, int time, const LocalState& l) { return ta.action(a, time, l); }},
      {&tb, [&tb](AgentId a, int time, const LocalState& l) { return tb.action(a, time, l); }},
  };

  // Both enumerations list votes x environments in the same order.
  std::vector<std::vector<PairState>> layers(1);
  std::vector<std::vector<StateIndex>> parents(1);
  std::vector<GlobalState> init_a = initial_states(pa);
  std::vector<GlobalState> init_b = initial_states(pb);
  for (std::size_t i = 0; i < init_a.size(); ++i) {
    if (init_a[i].votes != init_b[i].votes || init_a[i].failure != init_b[i].failure)
      throw ModelError("initial states do not correspond");
    layers[0].push_back({std::move(init_a[i]), std::move(init_b[i])});
    parents[0].push_back(0);
  }

  std::vector<Action> act[2];
  std::vector<std::optional<Message>> msg[2];
  for (int x = 0; x < 2; ++x) {
    act[x].assign(n, Action::noop());
    msg[x].resize(n);
  }
  std::vector<std::vector<LocalPair>> options(n);
  std::vector<Received> received;

  for (int m = 0; m < pa.horizon; ++m) {
    const std::vector<PairState>& current = layers[m];
    std::vector<PairState> next;
    std::vector<StateIndex> next_parents;
    std::unordered_map<PairState, StateIndex, PairHash> index;
    for (StateIndex si = 0; si < current.size(); ++si) {
      if (deadline && (si & 1023) == 0) deadline->check();
      const PairState& ps = current[si];
      const GlobalState* g[2] = {&ps.a, &ps.b};
      AgentSet senders[2] = {0, 0};
      std::vector<DecisionRecord> decisions[2] = {ps.a.decisions, ps.b.decisions};
      for (int x = 0; x < 2; ++x) {
        for (AgentId a = 0; a < n; ++a) {
          act[x][a] = executed_action(*params[x], *g[x], a, sides[x].fn);
          msg[x][a] = round_message(g[x]->locals[a], act[x][a]);
          if (msg[x][a]) senders[x] |= singleton(a);
          if (act[x][a].is_decide() && !decisions[x][a].decided())
            decisions[x][a] = DecisionRecord{act[x][a].value(), m};
        }
      }
      for (const RoundChoice& choice : round_choices(ps.a.failure)) {
        for (AgentId j = 0; j < n; ++j) {
          options[j].clear();
          const AgentSet fixed = choice.full | (choice.partial & singleton(j));
          const AgentSet optional = choice.partial & ~singleton(j);
          for (AgentSet q = 0;; q = (q - optional) & optional) {
            LocalState out[2];
            for (int x = 0; x < 2; ++x) {
              const AgentSet from = (fixed | q) & senders[x];
              received.clear();
              for (AgentId a = 0; a < n; ++a)
                if (contains(from, a)) received.push_back({a, *msg[x][a]});
              out[x] = update_local(*params[x], j, m, g[x]->locals[j], act[x][j], received);
            }
            LocalPair lp{std::move(out[0]), std::move(out[1])};
            if (std::find(options[j].begin(), options[j].end(), lp) == options[j].end())
              options[j].push_back(std::move(lp));
            if (q == optional) break;
          }
        }
        std::vector<std::size_t> pick(n, 0);
        while (true) {
          PairState np;
          np.a.time = np.b.time = m + 1;
          np.a.votes = np.b.votes = ps.a.votes;
          np.a.failure = np.b.failure = choice.next;
          np.a.decisions = decisions[0];
          np.b.decisions = decisions[1];
          for (AgentId j = 0; j < n; ++j) {
            np.a.locals.push_back(options[j][pick[j]].a);
            np.b.locals.push_back(options[j][pick[j]].b);
          }
          auto [it, inserted] = index.try_emplace(std::move(np), static_cast<StateIndex>(next.size()));
          if (inserted) {
            next.push_back(it->first);
            next_parents.push_back(si);
          }
          AgentId j = 0;
          for (; j < n; ++j) {
            if (++pick[j] < options[j].size()) break;
            pick[j] = 0;
          }
          if (j == n) break;
        }
      }
    }
    layers.push_back(std::move(next));
    parents.push_back(std::move(next_parents));
  }

  OrderResult r;
  for (const auto& l : layers) r.pair_states += l.size();
  const int last = pa.horizon;
  for (StateIndex s = 0; s < layers[last].size(); ++s) {
    const PairState& ps = layers[last][s];
    for (AgentId i = 0; i < n; ++i) {
      const int a = ps.a.decisions[i].time;  // -1 = never
      const int b = ps.b.decisions[i].time;
      const long ia = a < 0 ? LONG_MAX : a;
      const long ib = b < 0 ? LONG_MAX : b;
      if (ia != ib) r.identical = false;
      if (a >= 0 && ib < ia) r.a_le_b = false;
      if (b >= 0 && ia < ib) r.b_le_a = false;
      if (ia < ib && !r.a_earlier)
        r.a_earlier = OrderWitness{i, a, b, describe_pair_path(pa, pb, layers, parents, last, s)};
      if (ib < ia && !r.b_earlier)
        r.b_earlier = OrderWitness{i, a, b, describe_pair_path(pa, pb, layers, parents, last, s)};
    }
  }
  if (r.a_le_b) r.relation = r.a_earlier ? Order::strict_lt_somewhere : Order::le;
  else r.relation = r.b_le_a ? Order::strict_gt_somewhere : Order::incomparable;
  return r;
}

// ---------------------------------------------------------------------------

std::string AuditReport::text() const {
  std::ostringstream os;
  os << "late=" << late << " early=" << early << " wrong_value=" << wrong_value << "\n";
  for (const AuditFinding& f : examples) {
    const char* kind = f.kind == AuditFinding::late ? "late" : f.kind == AuditFinding::early ? "early" : "wrong_value";
    os << kind << ": agent " << f.agent << " at time " << f.layer << " performs " << f.actual.str()
       << ", program prescribes " << f.expected.str() << "\n";
    std::istringstream lines(f.trace);
    for (std::string line; std::getline(lines, line);) os << "  " << line << "\n";
  }
  return os.str();
}

AuditReport earliest_knowledge_audit(const LayeredSystem& sys, KbpKind kind) {
  const InstanceParams& p = sys.params();
  const DecisionTable derived = derive_table(sys, kind);
  AuditReport report;
  std::size_t shown[3] = {0, 0, 0};
  const int last = std::min(sys.num_layers(), p.horizon);
  for (int m = 0; m < last; ++m) {
    for (StateIndex s = 0; s < sys.layer(m).size(); ++s) {
      const GlobalState& g = sys.state(m, s);
      for (AgentId a = 0; a < p.n; ++a) {
        if (g.failure.status(a) == CrashStatus::crashed || g.decisions[a].decided()) continue;
        const Action expected = derived.action(a, m, g.locals[a]);
        const Action actual = sys.action_at(m, s, a);
        if (expected == actual) continue;
        AuditFinding::Kind k;
        if (expected.is_decide() && !actual.is_decide()) {
          k = AuditFinding::late;
          ++report.late;
        } else if (!expected.is_decide()) {
          k = AuditFinding::early;
          ++report.early;
        } else {
          k = AuditFinding::wrong_value;
          ++report.wrong_value;
        }
        if (shown[k] < 2) {
          ++shown[k];
          report.examples.push_back({k, m, s, a, expected, actual, describe_path(sys, m, s)});
        }
      }
    }
  }
  return report;
}

}  // namespace kbpforge
