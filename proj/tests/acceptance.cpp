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

// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Reference values come from oracles.hpp, not from the
// synthesizer.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kbpforge/bench.hpp"
#include "kbpforge/kbp.hpp"
#include "kbpforge/verify.hpp"
#include "oracles.hpp"

using namespace kbpforge;

namespace {

constexpr auto crash = FailureModel::crash;
constexpr auto som = FailureModel::somissions;

struct Outcome {
  bool pass = true;
  std::string summary;
  std::vector<std::string> notes;  // failing cells or measurements

  void fail(std::string note) {
    pass = false;
    notes.push_back(std::move(note));
  }
};

std::string cell(const InstanceParams& p) {
  std::ostringstream os;
  os << to_string(p.exchange) << "/" << to_string(p.failures) << " n=" << p.n << " t=" << p.t;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string secs(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1fs", s);
  return buf;
}

// Synthesized SBA tables by cell, filled by the sweep.
std::map<std::string, DecisionTable> sba_tables;

const DecisionTable& sba_table(const InstanceParams& p) {
  auto it = sba_tables.find(cell(p));
  if (it == sba_tables.end())
    it = sba_tables.emplace(cell(p), synthesize(p, KbpKind::sba).table).first;
  return it->second;
}

// Common belief by gfp against the reachability oracle on every layer, for
// exists_vote(v) and a few seeded random extensions.
bool oracle_agrees(const LayeredSystem& sys, std::mt19937& rng, std::size_t& checked) {
  Evaluator ev(sys);
  for (int m = 0; m < sys.num_layers(); ++m) {
    const auto& layer = sys.layer(m);
    std::vector<LayerSet> phis;
    for (Value v = 0; v < sys.params().k; ++v) {
      LayerSet phi(layer.size());
      for (std::size_t s = 0; s < layer.size(); ++s) phi[s] = layer[s].has_vote(v);
      phis.push_back(std::move(phi));
    }
    for (double density : {0.5, 0.95, 0.995}) {
      std::bernoulli_distribution coin(density);
      LayerSet phi(layer.size());
      for (std::size_t s = 0; s < layer.size(); ++s) phi[s] = coin(rng);
      phis.push_back(std::move(phi));
    }
    for (const LayerSet& phi : phis) {
      ++checked;
      if (ev.common_belief(phi, m) != common_belief_oracle(sys, phi, m)) return false;
    }
  }
  return true;
}

struct Sweep {
  Outcome suite;   // criterion 5
  Outcome oracle;  // criterion 8
  std::size_t oracle_checks = 0;
  double oracle_secs = 0;
  std::mt19937 rng{20260415};

  void system(const LayeredSystem& sys, bool run_suite) {
    const InstanceParams& p = sys.params();
    if (run_suite) {
      const VerificationReport r = check_suite(sys, SpecSuite::sba());
      if (!r.passed()) {
        std::string failed;
        for (const PropertyResult& x : r.results)
          if (!x.passed) failed += " " + std::string(to_string(x.property));
        suite.fail(cell(p) + ":" + failed);
      }
    }
    const auto t0 = std::chrono::steady_clock::now();
    if (!oracle_agrees(sys, rng, oracle_checks)) oracle.fail(cell(p));
    oracle_secs += seconds_since(t0);
  }
};

Outcome criterion1() {
  Outcome o;
  o.summary = "floodset n=3 t=1 decides exactly at time 2 on values_received, least value first";
  const Synthesis s = synthesize(InstanceParams::make(ExchangeKind::floodset, crash, 3, 1), KbpKind::sba);
  std::size_t at2 = 0;
  for (const auto& [key, entry] : s.table.entries()) {
    const ValueSet w = std::get<FloodSetLocal>(key.local).seen;
    const Action want = key.time == 2 ? Action::decide(__builtin_ctz(w)) : Action::noop();
    if (entry.action != want) o.fail("time " + std::to_string(key.time) + " agent " + std::to_string(key.agent));
    at2 += key.time == 2;
  }
  if (at2 == 0) o.fail("no observations at time 2");
  const std::string report = render_report(condition_report(s.table));
  const std::string golden =
      "time=2 agent=*: decide(0) if values_received[0]\n"
      "time=2 agent=*: decide(1) if !values_received[0]\n";
  if (report != golden) o.fail("condition report differs:\n" + report);
  return o;
}

// Decision times of the synthesized table against a closed-form rule.
Outcome closed_form(ExchangeKind e, const std::function<DecisionFn(const InstanceParams&)>& rule) {
  Outcome o;
  int cells = 0;
  for (int n = 2; n <= 4; ++n) {
    for (int t = 1; t <= n; ++t) {
      const auto p = InstanceParams::make(e, crash, n, t);
      const LayeredSystem ref = build_system_with_rule(p, rule(p), "closed form");
      const OrderResult r = compare(sba_table(p), *ref.table());
      ++cells;
      if (r.identical) continue;
      const OrderWitness& w = r.a_earlier ? *r.a_earlier : *r.b_earlier;
      o.fail(cell(p) + ": agent " + std::to_string(w.agent) + " decides at " +
             std::to_string(w.time_a) + ", closed form at " + std::to_string(w.time_b));
    }
  }
  o.summary += std::to_string(cells) + " cells, 2<=n<=4, 1<=t<=n";
  return o;
}

Outcome criterion4() {
  Outcome o;
  o.summary = "diff and count decide at identical times, n<=3";
  for (int n = 1; n <= 3; ++n) {
    for (int t = 1; t <= n; ++t) {
      const auto pd = InstanceParams::make(ExchangeKind::diff, crash, n, t);
      const auto pc = InstanceParams::make(ExchangeKind::count, crash, n, t);
      const OrderResult r = compare(sba_table(pd), sba_table(pc));
      if (!(r.a_le_b && r.b_le_a && r.identical))
        o.fail("n=" + std::to_string(n) + " t=" + std::to_string(t) + ": " + std::string(to_string(r.relation)));
    }
  }
  return o;
}

Outcome criterion6(std::vector<LayeredSystem>& eba_systems) {
  Outcome o;
  o.summary = "eba0 over emin and ebasic equals the stated implementations and passes the EBA suite, n<=3";
  int cells = 0;
  for (ExchangeKind e : {ExchangeKind::emin, ExchangeKind::ebasic}) {
    const Baseline impl = e == ExchangeKind::emin ? Baseline::emin_impl : Baseline::ebasic_impl;
    for (FailureModel f : {crash, som}) {
      for (int n = 2; n <= 3; ++n) {
        for (int t = 1; t <= n; ++t) {
          ++cells;
          const auto p = InstanceParams::make(e, f, n, t);
          Synthesis s = synthesize(p, KbpKind::eba0);
          std::string problems;
          const VerificationReport r = check_suite(s.system, SpecSuite::eba());
          if (!r.passed()) problems += " suite fails;";
          const DecisionTable ref = as_table(impl, p);
          const auto diff = s.table.action_diff(ref);
          if (!diff.empty()) {
            const TableKey& k = diff.front();
            const TableEntry* mine = s.table.find(k.agent, k.time, k.local);
            const TableEntry* theirs = ref.find(k.agent, k.time, k.local);
            problems += " " + std::to_string(diff.size()) + " observations differ from " +
                        std::string(to_string(impl)) + ", e.g. time " + std::to_string(k.time) + " " +
                        encode_local(p, k.local) + ": " + (mine ? mine->action.str() : "absent") +
                        " vs " + (theirs ? theirs->action.str() : "absent") + ";";
          }
          if (!problems.empty()) o.fail(cell(p) + ":" + problems);
          eba_systems.push_back(std::move(s.system));
        }
      }
    }
  }
  o.summary += " (" + std::to_string(cells) + " cells)";
  return o;
}

Outcome criterion7() {
  Outcome o;
  o.summary = "synthesized floodset beats the textbook rule at n=3 t=2 (time 2 vs 3)";
  const auto p = InstanceParams::make(ExchangeKind::floodset, crash, 3, 2);
  const OrderResult r = compare(sba_table(p), as_table(Baseline::floodset_textbook, p));
  if (r.relation != Order::strict_lt_somewhere) o.fail("relation " + std::string(to_string(r.relation)));
  if (!r.a_earlier || r.a_earlier->time_a != 2 || r.a_earlier->time_b != 3)
    o.fail("no witness deciding at 2 against 3");
  return o;
}

Outcome criterion9() {
  Outcome o;
  o.summary = "layered observations equal history enumeration";
  std::vector<InstanceParams> cells;
  for (int n = 1; n <= 3; ++n)
    for (int t = 0; t <= n; ++t) {
      for (ExchangeKind e : {ExchangeKind::floodset, ExchangeKind::count, ExchangeKind::diff,
                             ExchangeKind::dworkmoses, ExchangeKind::emin, ExchangeKind::ebasic})
        cells.push_back(InstanceParams::make(e, crash, n, t));
      if (n <= 2 || t <= 2)
        for (ExchangeKind e : {ExchangeKind::floodset, ExchangeKind::count, ExchangeKind::diff,
                               ExchangeKind::dworkmoses, ExchangeKind::emin, ExchangeKind::ebasic})
          cells.push_back(InstanceParams::make(e, som, n, t));
    }
  std::uint64_t histories = 0;
  for (const InstanceParams& p : cells) {
    DecisionFn protocol = [](AgentId, int, const LocalState&) { return Action::noop(); };
    LayeredSystem sys = transmits_decisions(p.exchange) ? synthesize(p, KbpKind::eba0).system
                                                        : build_system(p);
    if (const DecisionTable* table = sys.table())
      protocol = [table](AgentId a, int m, const LocalState& l) { return table->action(a, m, l); };
    const oracle::HistorySummary h = oracle::enumerate_histories(p, protocol);
    histories += h.histories;
    if (oracle::system_observations(sys) != h.observations) o.fail(cell(p) + ": observations differ");
    if (oracle::system_states(sys) != h.states) o.fail(cell(p) + ": states differ");
  }
  o.summary += " (" + std::to_string(cells.size()) + " instances, " + std::to_string(histories) +
               " run prefixes; somissions n=3 t=3 not enumerated)";
  return o;
}

Outcome criterion10() {
  Outcome o;
  o.summary = "bench reports its own timings with TO cells under a 600 s default budget";
  if (kDefaultCellBudget != 600.0) o.fail("default budget is not 600 s");
  const BenchGrid t1 = table1_grid(2, 6);
  if (t1.columns != std::vector<std::string>{"floodset:check", "floodset:synth", "count:check", "count:synth"})
    o.fail("table1 columns");
  if (t1.rows.size() != 20) o.fail("table1 rows");
  for (const TimingRecord& r : run_grid(t1, 0.0, 4))
    if (r.status != CellStatus::timeout) o.fail("budget 0 did not time out " + r.column);
  const BenchGrid t2 = table2_grid(2, 3);
  if (t2.key_columns != std::vector<std::string>{"n", "t", "rounds"}) o.fail("table2 keys");
  const BenchGrid t3 = table3_grid(2, 3);
  if (t3.columns.size() != 4) o.fail("table3 columns");
  const auto small = run_grid(synth_grid(ExchangeKind::floodset, crash, KbpKind::sba, 2, 3), kDefaultCellBudget, 2);
  for (const TimingRecord& r : small)
    if (r.status != CellStatus::ok) o.fail("floodset synth " + r.params.describe() + " did not finish");
  const std::string text = render_text(t1, run_grid(t1, 0.0, 4));
  if (text.find("TO") == std::string::npos) o.fail("text rendering lacks TO");
  return o;
}

int report(int id, const Outcome& o, double elapsed) {
  std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << o.summary << " ["
            << secs(elapsed) << "]\n";
  for (const std::string& n : o.notes) std::cout << "    " << n << "\n";
  std::cout.flush();
  return o.pass ? 0 : 1;
}

}  // namespace

int main() {
  int failures = 0;
  auto t0 = std::chrono::steady_clock::now();
  {
    const Outcome o = criterion1();
    failures += report(1, o, seconds_since(t0));
  }

  // One pass over the SBA grid feeds criteria 2-5 and part of 8. Systems
  // are dropped after use; only tables are kept.
  t0 = std::chrono::steady_clock::now();
  Sweep sweep;
  for (ExchangeKind e : {ExchangeKind::floodset, ExchangeKind::count, ExchangeKind::diff, ExchangeKind::dworkmoses}) {
    for (int n = 1; n <= 4; ++n) {
      for (int t = 1; t <= n; ++t) {
        const auto p = InstanceParams::make(e, crash, n, t);
        Synthesis s = synthesize(p, KbpKind::sba);
        sweep.system(s.system, e != ExchangeKind::dworkmoses);
        sba_tables.emplace(cell(p), std::move(s.table));
      }
    }
  }
  // Omission systems only feed the oracle check.
  for (int n = 1; n <= 3; ++n)
    for (int t = 1; t <= n; ++t) {
      Synthesis s = synthesize(InstanceParams::make(ExchangeKind::floodset, som, n, t), KbpKind::sba);
      sweep.system(s.system, false);
    }
  const double sweep_secs = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  Outcome c2 = closed_form(ExchangeKind::floodset, oracle::floodset_closed_form);
  c2.summary = "floodset decision times follow the closed form, " + c2.summary;
  failures += report(2, c2, seconds_since(t0));

  t0 = std::chrono::steady_clock::now();
  Outcome c3 = closed_form(ExchangeKind::count, oracle::count_closed_form);
  c3.summary = "count decision times follow the closed form, " + c3.summary;
  failures += report(3, c3, seconds_since(t0));

  t0 = std::chrono::steady_clock::now();
  {
    const Outcome o = criterion4();
    failures += report(4, o, seconds_since(t0));
  }

  sweep.suite.summary = "SBA suite holds for floodset, count and diff, 1<=n<=4, 1<=t<=n";
  failures += report(5, sweep.suite, sweep_secs);

  t0 = std::chrono::steady_clock::now();
  std::vector<LayeredSystem> eba_systems;
  {
    const Outcome o = criterion6(eba_systems);
    failures += report(6, o, seconds_since(t0));
  }

  t0 = std::chrono::steady_clock::now();
  {
    const Outcome o = criterion7();
    failures += report(7, o, seconds_since(t0));
  }

  t0 = std::chrono::steady_clock::now();
  for (const LayeredSystem& sys : eba_systems) sweep.system(sys, false);
  sweep.oracle.summary = "gfp common belief equals the reachability oracle on every layer (" +
                         std::to_string(sweep.oracle_checks) + " layer/formula pairs)";
  failures += report(8, sweep.oracle, sweep.oracle_secs);

  t0 = std::chrono::steady_clock::now();
  {
    const Outcome o = criterion9();
    failures += report(9, o, seconds_since(t0));
  }

  t0 = std::chrono::steady_clock::now();
  {
    const Outcome o = criterion10();
    failures += report(10, o, seconds_since(t0));
  }

  std::cout << (failures ? std::to_string(failures) + " criteria failed" : std::string("all criteria passed"))
            << "\n";
  return failures ? 1 : 0;
}
