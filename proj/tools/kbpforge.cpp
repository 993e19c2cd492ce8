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

// kbpforge synth|check|compare|bench
//
// Exit status: 0 all checks pass, 1 a property failed, 2 usage or
// configuration error.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "kbpforge/bench.hpp"
#include "kbpforge/formula_parser.hpp"
#include "kbpforge/kbp.hpp"
#include "kbpforge/verify.hpp"

namespace {

using namespace kbpforge;
using json = nlohmann::ordered_json;

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct Instance {
  std::string exchange = "floodset";
  std::string failures = "crash";
  std::string kbp;
  int n = 3;
  int t = 1;
  int k = 2;
  int horizon = 0;
  CLI::Option* exchange_opt = nullptr;
  CLI::Option* failures_opt = nullptr;
  CLI::Option* n_opt = nullptr;
  CLI::Option* t_opt = nullptr;
  CLI::Option* k_opt = nullptr;
  CLI::Option* horizon_opt = nullptr;

  void add_to(CLI::App* app) {
    exchange_opt = app->add_option("--exchange", exchange,
                                   "floodset|count|diff|dworkmoses|emin|ebasic");
    failures_opt = app->add_option("--failures", failures, "crash|somissions");
    n_opt = app->add_option("--n", n, "number of agents");
    t_opt = app->add_option("--t", t, "maximum number of faulty agents");
    k_opt = app->add_option("--k", k, "number of values");
    horizon_opt = app->add_option("--horizon", horizon, "rounds (default t+2)");
    app->add_option("--kbp", kbp, "sba|eba0 (default by exchange)");
  }

  bool any_given() const {
    for (auto* o : {exchange_opt, failures_opt, n_opt, t_opt, k_opt, horizon_opt})
      if (o && o->count()) return true;
    return false;
  }

  InstanceParams params() const {
    const auto e = parse_exchange(exchange);
    if (!e) throw ParamError("unknown exchange '" + exchange + "'");
    const auto f = parse_failure_model(failures);
    if (!f) throw ParamError("unknown failure model '" + failures + "'");
    return InstanceParams::make(*e, *f, n, t, k, horizon);
  }

  KbpKind kind(const InstanceParams& p) const {
    if (kbp.empty()) return transmits_decisions(p.exchange) ? KbpKind::eba0 : KbpKind::sba;
    const auto k = parse_kbp(kbp);
    if (!k) throw ParamError("unknown kbp '" + kbp + "'");
    check_pairing(p, *k);
    return *k;
  }
};

struct Output {
  std::string path;
  std::string format = "text";

  void add_to(CLI::App* app, const char* formats) {
    app->add_option("--out", path, "output path");
    app->add_option("--format", format, formats);
  }

  void emit(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream f(path);
    if (!f) throw ParamError("cannot write " + path);
    f << text;
  }
};

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParamError("cannot read " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw ParamError("cannot write " + path.string());
  f << text;
}

json params_json(const InstanceParams& p) {
  return {{"exchange", std::string(to_string(p.exchange))},
          {"failures", std::string(to_string(p.failures))},
          {"n", p.n},
          {"t", p.t},
          {"k", p.k},
          {"horizon", p.horizon}};
}

json timing_json(const TimingRecord& r) {
  return {{"command", r.command},
          {"column", r.column},
          {"params", params_json(r.params)},
          {"rounds", r.rounds},
          {"status", status_name(r.status)},
          {"seconds", r.seconds},
          {"peak_layer", r.stats.peak_layer},
          {"states", r.stats.states},
          {"edges", r.stats.edges}};
}

// "synth", a baseline name, or a table file.
DecisionTable load_table(const std::string& spec, const Instance& inst) {
  if (spec == "synth") {
    const InstanceParams p = inst.params();
    return synthesize(p, inst.kind(p)).table;
  }
  if (const auto b = parse_baseline(spec)) return as_table(*b, inst.params());
  DecisionTable table = DecisionTable::parse(read_file(spec));
  if (inst.any_given() && !(inst.params() == table.params()))
    throw ParamError("table " + spec + " was generated for " + table.params().describe() +
                     ", not " + inst.params().describe());
  return table;
}

Deadline deadline_for(double seconds) {
  return seconds > 0 ? Deadline::after(seconds) : Deadline();
}

int cmd_synth(const Instance& inst, const Output& out, const std::string& baseline,
              double timeout) {
  const InstanceParams p = inst.params();
  const Deadline deadline = deadline_for(timeout);
  const auto t0 = std::chrono::steady_clock::now();
  TimingRecord rec;
  rec.command = "synth";
  rec.params = p;
  rec.rounds = p.horizon;
  std::optional<LayeredSystem> sys;
  if (baseline.empty()) {
    const KbpKind kind = inst.kind(p);
    rec.column = std::string(to_string(p.exchange)) + ":" + std::string(to_string(kind));
    sys = synthesize(p, kind, &deadline).system;
  } else {
    const auto b = parse_baseline(baseline);
    if (!b) throw ParamError("unknown baseline '" + baseline + "'");
    rec.column = baseline;
    sys = build_baseline(*b, p, &deadline);
  }
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rec.stats = SystemStats::of(*sys);
  const DecisionTable& table = *sys->table();
  const auto lines = condition_report(table);

  std::string report;
  std::string timing;
  if (out.format == "records") {
    for (const ConditionLine& l : lines)
      report += json{{"time", l.time},
                     {"agent", l.agent < 0 ? json("*") : json(l.agent)},
                     {"action", l.action.str()},
                     {"condition", l.condition}}
                    .dump() +
                "\n";
    timing = timing_json(rec).dump() + "\n";
  } else if (out.format == "text") {
    report = render_report(lines);
    std::ostringstream os;
    os << "synth " << rec.column << " " << p.describe() << " seconds=" << format_duration(rec.seconds)
       << " peak_layer=" << rec.stats.peak_layer << " states=" << rec.stats.states
       << " edges=" << rec.stats.edges << "\n";
    timing = os.str();
  } else {
    throw ParamError("synth supports --format text or records");
  }

  if (!out.path.empty()) {
    const std::filesystem::path dir(out.path);
    std::filesystem::create_directories(dir);
    write_file(dir / "table.txt", table.serialize());
    write_file(dir / (out.format == "records" ? "report.jsonl" : "report.txt"), report);
    write_file(dir / (out.format == "records" ? "timing.jsonl" : "timing.txt"), timing);
  }
  std::cout << report;
  std::cerr << timing;
  return kPass;
}

int cmd_check(const Instance& inst, const Output& out, const std::string& table_spec,
              const std::string& suite_text, const std::string& formula_text,
              std::optional<int> at, bool audit) {
  const DecisionTable table = load_table(table_spec, inst);
  const InstanceParams& p = table.params();
  const LayeredSystem sys = build_system(p, &table);
  bool ok = true;
  std::string text;
  json records = json::array();

  if (!formula_text.empty()) {
    const FormulaPtr f = parse_formula(formula_text, p);
    if (at && (*at < 0 || *at >= sys.num_layers()))
      throw ParamError("--at must lie in 0.." + std::to_string(sys.num_layers() - 1));
    const HoldsResult r = holds_everywhere(sys, *f, at);
    ok = ok && r.holds;
    const std::string scope = at ? "AX^" + std::to_string(*at) : "AG";
    text += std::string(r.holds ? "PASS " : "FAIL ") + scope + " " + f->str() + "\n";
    json rec{{"check", "formula"}, {"scope", scope}, {"formula", f->str()}, {"passed", r.holds}};
    if (r.counterexample) {
      text += "  counterexample at layer " + std::to_string(r.counterexample->layer) + ", run prefix:\n";
      std::istringstream lines(r.counterexample->trace);
      for (std::string line; std::getline(lines, line);) text += "  " + line + "\n";
      rec["counterexample"] = {{"layer", r.counterexample->layer}, {"trace", r.counterexample->trace}};
    }
    records.push_back(rec);
  }

  if (!suite_text.empty() || (formula_text.empty() && !audit)) {
    const SpecSuite suite = suite_text.empty()
                                ? (transmits_decisions(p.exchange) ? SpecSuite::eba() : SpecSuite::sba())
                                : SpecSuite::parse(suite_text);
    const VerificationReport report = check_suite(sys, suite);
    ok = ok && report.passed();
    text += report.text();
    for (const PropertyResult& r : report.results) {
      json rec{{"check", "property"},
               {"property", std::string(to_string(r.property))},
               {"passed", r.passed},
               {"violations", r.violations},
               {"params", params_json(p)},
               {"table", report.provenance}};
      if (r.counterexample)
        rec["counterexample"] = {{"layer", r.counterexample->layer},
                                 {"detail", r.detail},
                                 {"trace", r.counterexample->trace}};
      records.push_back(rec);
    }
  }

  if (audit) {
    const KbpKind kind = inst.kbp.empty() ? (transmits_decisions(p.exchange) ? KbpKind::eba0 : KbpKind::sba)
                                          : inst.kind(p);
    const AuditReport r = earliest_knowledge_audit(sys, kind);
    ok = ok && r.clean();
    text += std::string(r.clean() ? "PASS" : "FAIL") + " audit " + std::string(to_string(kind)) + " " + r.text();
    records.push_back({{"check", "audit"},
                       {"kbp", std::string(to_string(kind))},
                       {"passed", r.clean()},
                       {"late", r.late},
                       {"early", r.early},
                       {"wrong_value", r.wrong_value}});
  }

  if (out.format == "records") {
    std::string s;
    for (const auto& r : records) s += r.dump() + "\n";
    out.emit(s);
  } else if (out.format == "text") {
    out.emit(text);
  } else {
    throw ParamError("check supports --format text or records");
  }
  return ok ? kPass : kFail;
}

json witness_json(const std::optional<OrderWitness>& w) {
  if (!w) return nullptr;
  return {{"agent", w->agent}, {"time_a", w->time_a}, {"time_b", w->time_b}, {"trace", w->trace}};
}

int cmd_compare(const Instance& inst, const Output& out, const std::string& a_spec,
                const std::string& b_spec, const std::string& expect) {
  const DecisionTable a = load_table(a_spec, inst);
  const DecisionTable b = load_table(b_spec, inst);
  const OrderResult r = compare(a, b);
  if (out.format == "records") {
    out.emit(json{{"a", a.provenance()},
                  {"b", b.provenance()},
                  {"params", params_json(a.params())},
                  {"relation", std::string(to_string(r.relation))},
                  {"a_le_b", r.a_le_b},
                  {"b_le_a", r.b_le_a},
                  {"identical", r.identical},
                  {"pair_states", r.pair_states},
                  {"a_earlier", witness_json(r.a_earlier)},
                  {"b_earlier", witness_json(r.b_earlier)}}
                 .dump() +
             "\n");
  } else if (out.format == "text") {
    std::ostringstream os;
    os << "a " << a.provenance() << "\nb " << b.provenance() << "\nparams " << a.params().describe()
       << "\nrelation " << to_string(r.relation) << "\na_le_b " << (r.a_le_b ? "true" : "false")
       << "\nb_le_a " << (r.b_le_a ? "true" : "false") << "\nidentical "
       << (r.identical ? "true" : "false") << "\npair_states " << r.pair_states << "\n";
    auto show = [&](const char* name, const std::optional<OrderWitness>& w) {
      if (!w) return;
      auto t = [](int x) { return x < 0 ? std::string("never") : std::to_string(x); };
      os << "witness " << name << ": agent " << w->agent << " decides at " << t(w->time_a)
         << " under a, " << t(w->time_b) << " under b\n";
      std::istringstream lines(w->trace);
      for (std::string line; std::getline(lines, line);) os << "  " << line << "\n";
    };
    show("a_earlier", r.a_earlier);
    show("b_earlier", r.b_earlier);
    out.emit(os.str());
  } else {
    throw ParamError("compare supports --format text or records");
  }
  if (!expect.empty()) return expect == to_string(r.relation) ? kPass : kFail;
  return kPass;
}

int cmd_bench(const Instance& inst, const Output& out, const std::string& suite, int n_min,
              int n_max, double timeout) {
  if (n_min < 1 || n_max < n_min) throw ParamError("need 1 <= --n-min <= --n-max");
  if (timeout < 0) throw ParamError("--timeout must be nonnegative");
  BenchGrid grid;
  if (suite == "table1") grid = table1_grid(n_min, n_max);
  else if (suite == "table2") grid = table2_grid(n_min, n_max);
  else if (suite == "table3") grid = table3_grid(n_min, n_max);
  else if (suite == "synth") {
    const auto e = parse_exchange(inst.exchange);
    const auto f = parse_failure_model(inst.failures);
    if (!e || !f) throw ParamError("unknown exchange or failure model");
    InstanceParams probe = InstanceParams::make(*e, *f, std::max(n_min, 1), 1);
    grid = synth_grid(*e, *f, inst.kind(probe), n_min, n_max);
  } else {
    throw ParamError("unknown bench suite '" + suite + "'");
  }
  int workers = 1;
  if (const char* w = std::getenv("KBPFORGE_WORKERS")) workers = std::max(1, std::atoi(w));
  const auto records = run_grid(grid, timeout, workers);
  if (out.format == "text") {
    out.emit(render_text(grid, records));
  } else if (out.format == "csv") {
    out.emit(render_csv(grid, records));
  } else if (out.format == "records") {
    std::string s;
    for (const auto& r : records) {
      json j = timing_json(r);
      j["grid"] = grid.name;
      if (r.status == CellStatus::error) j["error"] = r.error;
      s += j.dump() + "\n";
    }
    out.emit(s);
  } else {
    throw ParamError("bench supports --format text, csv or records");
  }
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthesis and checking of knowledge-based agreement protocols"};
  app.require_subcommand(1);

  Instance inst;
  Output out;

  auto* synth = app.add_subcommand("synth", "synthesize the program's implementation");
  std::string baseline;
  double synth_timeout = 0;
  inst.add_to(synth);
  out.add_to(synth, "text|records");
  synth->add_option("--baseline", baseline,
                    "materialize a baseline instead: floodset_textbook|dm_concrete|emin_impl|ebasic_impl");
  synth->add_option("--timeout", synth_timeout, "seconds (0: none)");

  auto* check = app.add_subcommand("check", "check a table against properties or a formula");
  std::string table_spec = "synth";
  std::string suite_text;
  std::string formula_text;
  int at = -1;
  bool audit = false;
  inst.add_to(check);
  out.add_to(check, "text|records");
  check->add_option("--table", table_spec, "table file, baseline name, or synth");
  check->add_option("--suite", suite_text, "sba|eba|comma-separated properties");
  check->add_option("--formula", formula_text, "formula that must hold everywhere");
  auto* at_opt = check->add_option("--at", at, "check the formula only at this layer");
  check->add_flag("--audit", audit, "compare table firings with the program's guards");

  auto* cmp = app.add_subcommand("compare", "order two decision protocols by decision times");
  std::string a_spec, b_spec, expect;
  inst.add_to(cmp);
  out.add_to(cmp, "text|records");
  cmp->add_option("a", a_spec, "table file, baseline name, or synth")->required();
  cmp->add_option("b", b_spec, "table file, baseline name, or synth")->required();
  cmp->add_option("--expect", expect, "exit 1 unless the relation is this");

  auto* bench = app.add_subcommand("bench", "timing grid");
  std::string bench_suite = "synth";
  int n_min = 2, n_max = 3;
  double bench_timeout = kDefaultCellBudget;
  inst.add_to(bench);
  out.add_to(bench, "text|csv|records");
  bench->add_option("--suite", bench_suite, "table1|table2|table3|synth");
  bench->add_option("--n-min", n_min, "smallest n");
  bench->add_option("--n-max", n_max, "largest n");
  bench->add_option("--timeout", bench_timeout, "seconds per cell (default 600)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*synth) return cmd_synth(inst, out, baseline, synth_timeout);
    if (*check)
      return cmd_check(inst, out, table_spec, suite_text, formula_text,
                       at_opt->count() ? std::optional<int>(at) : std::nullopt, audit);
    if (*cmp) return cmd_compare(inst, out, a_spec, b_spec, expect);
    if (*bench) return cmd_bench(inst, out, bench_suite, n_min, n_max, bench_timeout);
  } catch (const TimeoutError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
