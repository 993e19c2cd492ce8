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

#include "kbpforge/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "kbpforge/verify.hpp"

namespace kbpforge {

namespace {

SystemStats synth_cell(const InstanceParams& p, KbpKind kind, const Deadline& d) {
  return SystemStats::of(synthesize(p, kind, &d).system);
}

// Builds the system of a concrete rule and evaluates the program's guards
// on every layer, the work of checking the rule against the program.
SystemStats check_cell(const InstanceParams& p, Baseline rule, int rounds, const Deadline& d) {
  SystemBuilder builder(p, baseline_rule(rule, p));
  builder.set_deadline(&d);
  for (int r = 0; r < rounds; ++r) builder.expand();
  const LayeredSystem& sys = builder.system();
  DecisionTable scratch(p, "check");
  Evaluator ev(sys, nullptr);
  const int last = std::min(sys.num_layers(), p.horizon);
  for (int m = 0; m < last; ++m) {
    d.check();
    fill_layer(ev, KbpKind::sba, m, scratch);
  }
  return SystemStats::of(sys);
}

std::string column_name(ExchangeKind e, const char* what) {
  return std::string(to_string(e)) + ":" + what;
}

}  // namespace

BenchGrid table1_grid(int n_min, int n_max) {
  BenchGrid g{"table1", {"n", "t"}, {}, {}};
  const ExchangeKind exchanges[] = {ExchangeKind::floodset, ExchangeKind::count};
  for (ExchangeKind e : exchanges) {
    g.columns.push_back(column_name(e, "check"));
    g.columns.push_back(column_name(e, "synth"));
  }
  for (int n = n_min; n <= n_max; ++n) {
    for (int t = 1; t <= n; ++t) {
      BenchRow row{{std::to_string(n), std::to_string(t)}, {}};
      for (ExchangeKind e : exchanges) {
        const auto p = InstanceParams::make(e, FailureModel::crash, n, t);
        row.cells.push_back({"check", column_name(e, "check"), p, p.horizon,
                             [p](const Deadline& d) {
                               return check_cell(p, Baseline::floodset_textbook, p.horizon, d);
                             }});
        row.cells.push_back({"synth", column_name(e, "synth"), p, p.horizon,
                             [p](const Deadline& d) { return synth_cell(p, KbpKind::sba, d); }});
      }
      g.rows.push_back(std::move(row));
    }
  }
  return g;
}

BenchGrid table2_grid(int n_min, int n_max) {
  BenchGrid g{"table2", {"n", "t", "rounds"}, {"diff:check", "dworkmoses:check"}, {}};
  for (int n = n_min; n <= n_max; ++n) {
    for (int t = 1; t <= n; ++t) {
      for (int r = 1; r <= t + 1; ++r) {
        BenchRow row{{std::to_string(n), std::to_string(t), std::to_string(r)}, {}};
        const auto pd = InstanceParams::make(ExchangeKind::diff, FailureModel::crash, n, t);
        const auto pm = InstanceParams::make(ExchangeKind::dworkmoses, FailureModel::crash, n, t);
        row.cells.push_back({"check", "diff:check", pd, r, [pd, r](const Deadline& d) {
                               return check_cell(pd, Baseline::floodset_textbook, r, d);
                             }});
        row.cells.push_back({"check", "dworkmoses:check", pm, r, [pm, r](const Deadline& d) {
                               return check_cell(pm, Baseline::dm_concrete, r, d);
                             }});
        g.rows.push_back(std::move(row));
      }
    }
  }
  return g;
}

BenchGrid table3_grid(int n_min, int n_max) {
  BenchGrid g{"table3", {"n", "t"}, {}, {}};
  const ExchangeKind exchanges[] = {ExchangeKind::emin, ExchangeKind::ebasic};
  const FailureModel models[] = {FailureModel::crash, FailureModel::somissions};
  for (ExchangeKind e : exchanges)
    for (FailureModel f : models) g.columns.push_back(std::string(to_string(e)) + ":" + std::string(to_string(f)));
  for (int n = n_min; n <= n_max; ++n) {
    for (int t = 1; t <= n; ++t) {
      BenchRow row{{std::to_string(n), std::to_string(t)}, {}};
      for (ExchangeKind e : exchanges) {
        for (FailureModel f : models) {
          const auto p = InstanceParams::make(e, f, n, t);
          row.cells.push_back({"synth", std::string(to_string(e)) + ":" + std::string(to_string(f)), p,
                               p.horizon,
                               [p](const Deadline& d) { return synth_cell(p, KbpKind::eba0, d); }});
        }
      }
      g.rows.push_back(std::move(row));
    }
  }
  return g;
}

BenchGrid synth_grid(ExchangeKind exchange, FailureModel failures, KbpKind kind, int n_min,
                     int n_max) {
  const std::string col = std::string(to_string(exchange)) + ":synth";
  BenchGrid g{"synth", {"n", "t"}, {col}, {}};
  for (int n = n_min; n <= n_max; ++n) {
    for (int t = 1; t <= n; ++t) {
      const auto p = InstanceParams::make(exchange, failures, n, t);
      check_pairing(p, kind);
      g.rows.push_back({{std::to_string(n), std::to_string(t)},
                        {{"synth", col, p, p.horizon,
                          [p, kind](const Deadline& d) { return synth_cell(p, kind, d); }}}});
    }
  }
  return g;
}

std::vector<TimingRecord> run_grid(const BenchGrid& grid, double budget_seconds, int workers) {
  std::vector<const BenchCell*> cells;
  for (const BenchRow& row : grid.rows)
    for (const BenchCell& c : row.cells) cells.push_back(&c);
  std::vector<TimingRecord> out(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < cells.size();) {
      const BenchCell& c = *cells[i];
      TimingRecord& r = out[i];
      r.command = c.command;
      r.column = c.column;
      r.params = c.params;
      r.rounds = c.rounds;
      const Deadline d = Deadline::after(budget_seconds);
      const auto t0 = std::chrono::steady_clock::now();
      try {
        d.check();
        r.stats = c.run(d);
      } catch (const TimeoutError&) {
        r.status = CellStatus::timeout;
      } catch (const std::exception& e) {
        r.status = CellStatus::error;
        r.error = e.what();
      }
      r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  workers = std::clamp(workers, 1, 64);
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  return out;
}

std::string format_duration(double seconds) {
  const int minutes = static_cast<int>(seconds / 60);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%dm%.3f", minutes, seconds - 60.0 * minutes);
  return buf;
}

std::string status_name(CellStatus s) {
  switch (s) {
    case CellStatus::ok: return "ok";
    case CellStatus::timeout: return "TO";
    case CellStatus::error: return "error";
  }
  return "?";
}

std::string render_text(const BenchGrid& grid, const std::vector<TimingRecord>& records) {
  std::vector<std::vector<std::string>> table;
  std::vector<std::string> header = grid.key_columns;
  header.insert(header.end(), grid.columns.begin(), grid.columns.end());
  table.push_back(header);
  std::size_t i = 0;
  for (const BenchRow& row : grid.rows) {
    std::vector<std::string> line = row.key;
    for (std::size_t c = 0; c < row.cells.size(); ++c, ++i) {
      const TimingRecord& r = records[i];
      line.push_back(r.status == CellStatus::ok ? format_duration(r.seconds)
                     : r.status == CellStatus::timeout ? "TO"
                                                        : "ERR");
    }
    table.push_back(std::move(line));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : table)
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  std::ostringstream os;
  for (const auto& line : table) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c) os << "  ";
      os << std::string(width[c] - line[c].size(), ' ') << line[c];
    }
    os << "\n";
  }
  for (const TimingRecord& r : records)
    if (r.status == CellStatus::error) os << "error in " << r.column << " " << r.params.describe() << ": " << r.error << "\n";
  return os.str();
}

std::string render_csv(const BenchGrid& grid, const std::vector<TimingRecord>& records) {
  std::ostringstream os;
  os << "grid,command,column,exchange,failures,n,t,k,horizon,rounds,status,seconds,peak_layer,states,edges\n";
  for (const TimingRecord& r : records) {
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.6f", r.seconds);
    os << grid.name << "," << r.command << "," << r.column << "," << to_string(r.params.exchange)
       << "," << to_string(r.params.failures) << "," << r.params.n << "," << r.params.t << ","
       << r.params.k << "," << r.params.horizon << "," << r.rounds << "," << status_name(r.status)
       << "," << secs << "," << r.stats.peak_layer << "," << r.stats.states << ","
       << r.stats.edges << "\n";
  }
  return os.str();
}

}  // namespace kbpforge
