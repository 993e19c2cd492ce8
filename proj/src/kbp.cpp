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

#include "kbpforge/kbp.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <sstream>

namespace kbpforge {

std::string_view to_string(KbpKind k) {
  switch (k) {
    case KbpKind::sba: return "sba";
    case KbpKind::eba0: return "eba0";
  }
  return "?";
}

std::optional<KbpKind> parse_kbp(std::string_view s) {
  if (s == "sba") return KbpKind::sba;
  if (s == "eba0" || s == "eba") return KbpKind::eba0;
  return std::nullopt;
}

void check_pairing(const InstanceParams& params, KbpKind kind) {
  const bool eba_exchange = transmits_decisions(params.exchange);
  if (kind == KbpKind::sba && eba_exchange)
    throw ParamError("kbp sba needs exchange floodset, count, diff or dworkmoses, not " +
                     std::string(to_string(params.exchange)));
  if (kind == KbpKind::eba0 && !eba_exchange)
    throw ParamError("kbp eba0 needs exchange emin or ebasic, not " +
                     std::string(to_string(params.exchange)));
}

FormulaPtr sba_guard(AgentId i, Value v) {
  return Formula::believes(i, Formula::common(atoms::exists_vote(v)));
}

FormulaPtr eba_decide0_guard(const InstanceParams& params, AgentId i) {
  std::vector<FormulaPtr> jd;
  for (AgentId j = 0; j < params.n; ++j) jd.push_back(atoms::just_decided(j, 0));
  return Formula::disjunction({atoms::local_compare(i, "init", "==", 0),
                               Formula::knows(i, Formula::disjunction(std::move(jd)))});
}

FormulaPtr eba_decide1_guard(const InstanceParams& params, AgentId i) {
  std::vector<FormulaPtr> none;
  for (AgentId j = 0; j < params.n; ++j)
    none.push_back(Formula::negation(atoms::deciding(j, 0)));
  return Formula::knows(i, Formula::conjunction(std::move(none)));
}

namespace {

void fill_sba(Evaluator& ev, int m, DecisionTable& out) {
  const LayeredSystem& sys = ev.system();
  const InstanceParams& p = sys.params();
  const auto& states = sys.layer(m);
  // guards[i][s]: values v with B_i C_N exists(v)
  std::vector<std::vector<ValueSet>> guards(p.n, std::vector<ValueSet>(states.size(), 0));
  for (Value v = 0; v < p.k; ++v) {
    LayerSet phi(states.size());
    for (StateIndex s = 0; s < states.size(); ++s) phi[s] = states[s].has_vote(v);
    const LayerSet c = ev.common_belief(phi, m);
    for (AgentId i = 0; i < p.n; ++i) {
      const LayerSet b = ev.believes(i, c, m);
      for (StateIndex s = 0; s < states.size(); ++s)
        if (b[s]) guards[i][s] |= singleton(v);
    }
  }
  for (StateIndex s = 0; s < states.size(); ++s) {
    for (AgentId i = 0; i < p.n; ++i) {
      const LocalState& l = states[s].locals[i];
      if (out.find(i, m, l)) continue;
      const ValueSet g = guards[i][s];
      const Action a = g ? Action::decide(__builtin_ctz(g)) : Action::noop();
      out.set(i, m, l, TableEntry{a, g});
    }
  }
}

void fill_eba(Evaluator& ev, int m, DecisionTable& out) {
  const LayeredSystem& sys = ev.system();
  const InstanceParams& p = sys.params();
  const auto& states = sys.layer(m);
  std::vector<LayerSet> g0(p.n);
  for (AgentId i = 0; i < p.n; ++i) g0[i] = ev.eval(*eba_decide0_guard(p, i), m);

  std::vector<std::pair<AgentId, StateIndex>> fresh;
  for (StateIndex s = 0; s < states.size(); ++s) {
    for (AgentId i = 0; i < p.n; ++i) {
      const LocalState& l = states[s].locals[i];
      if (out.find(i, m, l)) continue;
      TableEntry e;
      if (!local_decided(l) && g0[i][s]) e = TableEntry{Action::decide(0), singleton(0)};
      out.set(i, m, l, e);
      fresh.emplace_back(i, s);
    }
  }

  std::vector<LayerSet> g1(p.n);
  for (AgentId i = 0; i < p.n; ++i) g1[i] = ev.eval(*eba_decide1_guard(p, i), m);
  for (auto [i, s] : fresh) {
    const LocalState& l = states[s].locals[i];
    if (local_decided(l) || !g1[i][s]) continue;
    TableEntry e = *out.find(i, m, l);
    e.guards |= singleton(1);
    if (!e.action.is_decide()) e.action = Action::decide(1);
    out.set(i, m, l, e);
  }
}

}  // namespace

void fill_layer(Evaluator& ev, KbpKind kind, int m, DecisionTable& out) {
  if (kind == KbpKind::sba) fill_sba(ev, m, out);
  else fill_eba(ev, m, out);
}

Synthesis synthesize(const InstanceParams& params, KbpKind kind, const Deadline* deadline) {
  params.validate();
  check_pairing(params, kind);
  auto table = std::make_unique<DecisionTable>(params, "synth:" + std::string(to_string(kind)));
  const DecisionTable* t = table.get();
  SystemBuilder builder(params, [t](AgentId a, int time, const LocalState& l) {
    return t->action(a, time, l);
  });
  builder.set_deadline(deadline);
  for (int m = 0; m < params.horizon; ++m) {
    if (deadline) deadline->check();
    Evaluator ev(builder.system(), table.get());
    fill_layer(ev, kind, m, *table);
    builder.expand();
  }
  LayeredSystem sys = builder.take();
  sys.attach_table(*table);
  return Synthesis{std::move(*table), std::move(sys)};
}

DecisionTable derive_table(const LayeredSystem& system, KbpKind kind) {
  check_pairing(system.params(), kind);
  DecisionTable out(system.params(), "derived:" + std::string(to_string(kind)));
  Evaluator ev(system, system.table());
  const int last = std::min(system.num_layers(), system.params().horizon);
  for (int m = 0; m < last; ++m) fill_layer(ev, kind, m, out);
  return out;
}

std::string_view to_string(Baseline b) {
  switch (b) {
    case Baseline::floodset_textbook: return "floodset_textbook";
    case Baseline::dm_concrete: return "dm_concrete";
    case Baseline::emin_impl: return "emin_impl";
    case Baseline::ebasic_impl: return "ebasic_impl";
  }
  return "?";
}

std::optional<Baseline> parse_baseline(std::string_view s) {
  for (Baseline b : {Baseline::floodset_textbook, Baseline::dm_concrete, Baseline::emin_impl,
                     Baseline::ebasic_impl})
    if (s == to_string(b)) return b;
  return std::nullopt;
}

DecisionFn baseline_rule(Baseline b, const InstanceParams& params) {
  const int n = params.n;
  const int t = params.t;
  auto need = [&](bool ok, const char* what) {
    if (!ok)
      throw ParamError(std::string(to_string(b)) + " reads " + what + ", which exchange " +
                       std::string(to_string(params.exchange)) + " does not have");
  };
  switch (b) {
    case Baseline::floodset_textbook:
      need(params.exchange == ExchangeKind::floodset || params.exchange == ExchangeKind::count ||
               params.exchange == ExchangeKind::diff,
           "values_received");
      return [t](AgentId, int time, const LocalState& l) {
        const ValueSet seen = *seen_values(l);
        if (time != t + 1 || !seen) return Action::noop();
        return Action::decide(__builtin_ctz(seen));
      };
    case Baseline::dm_concrete:
      need(params.exchange == ExchangeKind::dworkmoses, "current_waste");
      return [t](AgentId, int time, const LocalState& l) {
        const auto& d = std::get<DworkMosesLocal>(l);
        if (time + d.current_waste < t + 1) return Action::noop();
        return Action::decide(d.exists0 ? 0 : 1);
      };
    case Baseline::emin_impl:
      need(params.exchange == ExchangeKind::emin, "jd");
      return [t](AgentId, int time, const LocalState& l) {
        const auto& e = std::get<EminLocal>(l);
        if (e.decided) return Action::noop();
        if ((e.init == 0 || e.jd == 0) && time <= t + 1) return Action::decide(0);
        if (time >= t + 1) return Action::decide(1);
        return Action::noop();
      };
    case Baseline::ebasic_impl:
      need(params.exchange == ExchangeKind::ebasic, "num1");
      return [n](AgentId, int time, const LocalState& l) {
        const auto& e = std::get<EbasicLocal>(l);
        if (e.decided) return Action::noop();
        if (e.init == 0 || e.jd == 0) return Action::decide(0);
        if (e.num1 > n - time || e.jd == 1) return Action::decide(1);
        return Action::noop();
      };
  }
  throw ParamError("unknown baseline");
}

LayeredSystem build_baseline(Baseline b, const InstanceParams& params,
                             const Deadline* deadline) {
  params.validate();
  const DecisionFn rule = baseline_rule(b, params);
  SystemBuilder builder(params, rule);
  builder.set_deadline(deadline);
  while (!builder.done()) builder.expand();
  LayeredSystem sys = builder.take();
  sys.attach_table(materialize_table(sys, rule, std::string(to_string(b))));
  return sys;
}

DecisionTable as_table(Baseline b, const InstanceParams& params) {
  return *build_baseline(b, params).table();
}

// ---------------------------------------------------------------------------
// Condition report

namespace {

struct Literal {
  enum Op { eq, le, ge } op;
  int var;
  int c;

  bool test(const std::vector<int>& row) const {
    switch (op) {
      case eq: return row[var] == c;
      case le: return row[var] <= c;
      case ge: return row[var] >= c;
    }
    return false;
  }
};

struct Separator {
  std::vector<std::string> names;
  std::vector<bool> boolean;  // variable only takes values 0 and 1
  std::vector<std::vector<int>> domain;

  std::string render(const Literal& lit) const {
    const std::string& name = names[lit.var];
    if (boolean[lit.var] && lit.op == Literal::eq) return lit.c ? name : "!" + name;
    const char* op = lit.op == Literal::eq ? "==" : lit.op == Literal::le ? "<=" : ">=";
    return name + op + (lit.c == kNoValue ? std::string("bot") : std::to_string(lit.c));
  }

  // Greedy cover of `pos` by conjunctions that exclude every row of `neg`.
  std::string dnf(std::vector<std::vector<int>> pos, const std::vector<std::vector<int>>& neg) const {
    if (pos.empty()) return "false";
    std::vector<std::string> terms;
    while (!pos.empty()) {
      const std::vector<int>& seed = pos.front();
      std::vector<Literal> cands;
      for (std::size_t v = 0; v < names.size(); ++v) {
        // Thresholds first, so ties go to the more general literal.
        const int x = seed[v];
        if (!boolean[v]) {
          for (int c : domain[v]) {
            if (c >= x) cands.push_back({Literal::le, static_cast<int>(v), c});
            if (c <= x) cands.push_back({Literal::ge, static_cast<int>(v), c});
          }
        }
        cands.push_back({Literal::eq, static_cast<int>(v), x});
      }
      std::vector<Literal> term;
      std::vector<const std::vector<int>*> live_neg;
      for (const auto& r : neg) live_neg.push_back(&r);
      std::vector<const std::vector<int>*> live_pos;
      for (const auto& r : pos) live_pos.push_back(&r);
      while (!live_neg.empty()) {
        const Literal* best = nullptr;
        std::size_t best_cut = 0, best_keep = 0;
        for (const Literal& lit : cands) {
          std::size_t cut = 0, keep = 0;
          for (auto* r : live_neg) cut += !lit.test(*r);
          for (auto* r : live_pos) keep += lit.test(*r);
          if (cut > best_cut || (cut == best_cut && cut > 0 && keep > best_keep)) {
            best = &lit;
            best_cut = cut;
            best_keep = keep;
          }
        }
        if (!best) throw ModelError("condition report: observations are not separable");
        const Literal lit = *best;
        term.push_back(lit);
        std::erase_if(live_neg, [&](auto* r) { return !lit.test(*r); });
        std::erase_if(live_pos, [&](auto* r) { return !lit.test(*r); });
      }
      // Drop literals the rest of the term makes redundant.
      for (std::size_t i = term.size(); i-- > 0;) {
        std::vector<Literal> rest = term;
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
        const bool still = std::none_of(neg.begin(), neg.end(), [&](const auto& r) {
          return std::all_of(rest.begin(), rest.end(), [&](const Literal& l) { return l.test(r); });
        });
        if (still) term = std::move(rest);
      }
      std::sort(term.begin(), term.end(), [](const Literal& a, const Literal& b) {
        return std::tie(a.var, a.op, a.c) < std::tie(b.var, b.op, b.c);
      });
      std::string s;
      for (std::size_t i = 0; i < term.size(); ++i) s += (i ? " & " : "") + render(term[i]);
      terms.push_back(term.empty() ? "true" : s);
      std::erase_if(pos, [&](const auto& r) {
        return std::all_of(term.begin(), term.end(), [&](const Literal& l) { return l.test(r); });
      });
    }
    std::string out;
    for (std::size_t i = 0; i < terms.size(); ++i)
      out += (i ? " | " : "") + (terms.size() > 1 && terms[i].find(" & ") != std::string::npos
                                     ? "(" + terms[i] + ")"
                                     : terms[i]);
    return out;
  }
};

}  // namespace

std::vector<ConditionLine> condition_report(const DecisionTable& table) {
  const InstanceParams& p = table.params();
  // (time, agent) -> rows with their actions
  std::map<std::pair<int, AgentId>, std::vector<std::pair<std::vector<int>, Action>>> groups;
  Separator sep;
  for (const auto& [key, entry] : table.entries()) {
    const auto vars = local_variables(p, key.local);
    if (sep.names.empty())
      for (const auto& v : vars) sep.names.push_back(v.name);
    std::vector<int> row;
    for (const auto& v : vars) row.push_back(v.value);
    groups[{key.time, key.agent}].emplace_back(std::move(row), entry.action);
  }
  if (sep.names.empty()) return {};
  sep.boolean.assign(sep.names.size(), true);
  std::vector<std::set<int>> dom(sep.names.size());
  for (const auto& [_, rows] : groups)
    for (const auto& [row, a] : rows)
      for (std::size_t v = 0; v < row.size(); ++v) {
        dom[v].insert(row[v]);
        if (row[v] != 0 && row[v] != 1) sep.boolean[v] = false;
      }
  for (const auto& d : dom) sep.domain.emplace_back(d.begin(), d.end());

  // per (time, agent): decide(v) -> condition
  std::map<int, std::map<AgentId, std::vector<std::pair<Action, std::string>>>> per_time;
  for (const auto& [ta, rows] : groups) {
    std::set<Action> acts;
    for (const auto& [row, a] : rows)
      if (a.is_decide()) acts.insert(a);
    auto& slot = per_time[ta.first][ta.second];
    for (const Action& act : acts) {
      std::vector<std::vector<int>> pos, neg;
      for (const auto& [row, a] : rows) (a == act ? pos : neg).push_back(row);
      slot.emplace_back(act, sep.dnf(std::move(pos), neg));
    }
  }

  std::vector<ConditionLine> lines;
  for (const auto& [time, agents] : per_time) {
    bool uniform = static_cast<int>(agents.size()) == p.n;
    for (const auto& [a, conds] : agents)
      if (conds != agents.begin()->second) uniform = false;
    for (const auto& [a, conds] : agents) {
      for (const auto& [act, cond] : conds) lines.push_back({time, uniform ? -1 : a, act, cond});
      if (uniform) break;
    }
  }
  return lines;
}

std::string render_report(const std::vector<ConditionLine>& lines) {
  std::ostringstream os;
  for (const ConditionLine& l : lines) {
    os << "time=" << l.time << " agent=" << (l.agent < 0 ? std::string("*") : std::to_string(l.agent))
       << ": " << l.action.str() << " if " << l.condition << "\n";
  }
  return os.str();
}

}  // namespace kbpforge
