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

// Timing grids. Each cell builds its own system under a cooperative time
// budget; cells that exceed it are reported as TO.

#ifndef KBPFORGE_BENCH_HPP_
#define KBPFORGE_BENCH_HPP_

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "kbpforge/deadline.hpp"
#include "kbpforge/kbp.hpp"

namespace kbpforge {

// Per-cell budget when none is given: ten minutes.
inline constexpr double kDefaultCellBudget = 600.0;

struct SystemStats {
  std::size_t peak_layer = 0;
  std::size_t states = 0;
  std::size_t edges = 0;

  static SystemStats of(const LayeredSystem& s) {
    return {s.peak_layer_size(), s.total_states(), s.total_edges()};
  }
};

enum class CellStatus { ok, timeout, error };

struct TimingRecord {
  std::string command;  // "synth" or "check"
  std::string column;
  InstanceParams params;
  int rounds = 0;  // layers built, when a row varies it
  double seconds = 0;
  CellStatus status = CellStatus::ok;
  std::string error;
  SystemStats stats;
};

struct BenchCell {
  std::string command;
  std::string column;
  InstanceParams params;
  int rounds = 0;
  std::function<SystemStats(const Deadline&)> run;
};

struct BenchRow {
  std::vector<std::string> key;  // values of the key columns
  std::vector<BenchCell> cells;  // one per grid column
};

struct BenchGrid {
  std::string name;
  std::vector<std::string> key_columns;
  std::vector<std::string> columns;
  std::vector<BenchRow> rows;
};

// FloodSet and Count: checking the textbook rule against the program, and
// synthesis. Rows n in [n_min, n_max], 1 <= t <= n.
BenchGrid table1_grid(int n_min, int n_max);
// Diff and Dwork-Moses, checking with a truncated number of rounds
// 1..t+1.
BenchGrid table2_grid(int n_min, int n_max);
// EBA synthesis over Emin and Ebasic, crash and sending omissions.
BenchGrid table3_grid(int n_min, int n_max);
// One synthesis column for the given exchange and failure model.
BenchGrid synth_grid(ExchangeKind exchange, FailureModel failures, KbpKind kind,
                     int n_min, int n_max);

// Runs every cell with `budget_seconds` each, on up to `workers` threads.
// Records come back in row-major grid order.
std::vector<TimingRecord> run_grid(const BenchGrid& grid, double budget_seconds, int workers);

// "0m0.069"; "TO" for timeouts.
std::string format_duration(double seconds);
std::string render_text(const BenchGrid& grid, const std::vector<TimingRecord>& records);
std::string render_csv(const BenchGrid& grid, const std::vector<TimingRecord>& records);
std::string status_name(CellStatus s);

}  // namespace kbpforge

#endif  // KBPFORGE_BENCH_HPP_
