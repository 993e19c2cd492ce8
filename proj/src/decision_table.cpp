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

#include "kbpforge/decision_table.hpp"

#include <sstream>

namespace kbpforge {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (!s.empty()) {
    const auto p = s.find(sep);
    if (p != 0) out.push_back(s.substr(0, p));
    if (p == std::string_view::npos) break;
    s.remove_prefix(p + 1);
  }
  return out;
}

std::pair<std::string_view, std::string_view> key_value(std::string_view tok,
                                                        int line) {
  const auto eq = tok.find('=');
  if (eq == std::string_view::npos)
    throw ModelError("table line " + std::to_string(line) + ": expected key=value, got '" +
                     std::string(tok) + "'");
  return {tok.substr(0, eq), tok.substr(eq + 1)};
}

int to_int(std::string_view s, int line) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(std::string(s), &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ModelError("table line " + std::to_string(line) + ": bad integer '" +
                     std::string(s) + "'");
  }
}

Action parse_action(std::string_view s, int line) {
  if (s == "noop") return Action::noop();
  if (s.starts_with("decide(") && s.ends_with(")"))
    return Action::decide(to_int(s.substr(7, s.size() - 8), line));
  throw ModelError("table line " + std::to_string(line) + ": bad action '" +
                   std::string(s) + "'");
}

}  // namespace

void DecisionTable::set(AgentId agent, int time, const LocalState& local,
                        TableEntry entry) {
  entries_[TableKey{agent, time, local}] = entry;
}

const TableEntry* DecisionTable::find(AgentId agent, int time,
                                      const LocalState& local) const {
  auto it = entries_.find(TableKey{agent, time, local});
  return it == entries_.end() ? nullptr : &it->second;
}

Action DecisionTable::action(AgentId agent, int time,
                             const LocalState& local) const {
  if (const TableEntry* e = find(agent, time, local)) return e->action;
  throw ModelError("decision table has no entry for agent " + std::to_string(agent) +
                   " at time " + std::to_string(time) + " observing " +
                   encode_local(params_, local));
}

std::string DecisionTable::serialize() const {
  std::ostringstream os;
  os << "# kbpforge decision table\n";
  os << "provenance " << (provenance_.empty() ? "-" : provenance_) << "\n";
  os << "params " << params_.describe() << "\n";
  for (const auto& [key, entry] : entries_) {
    std::string guards(params_.k, '0');
    for (Value v = 0; v < params_.k; ++v)
      if (contains(entry.guards, v)) guards[v] = '1';
    os << "entry agent=" << key.agent << " time=" << key.time
       << " obs=" << encode_local(params_, key.local)
       << " action=" << entry.action.str() << " guards=" << guards << "\n";
  }
  return os.str();
}

DecisionTable DecisionTable::parse(std::string_view text) {
  DecisionTable table;
  bool have_params = false;
  int line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    auto toks = split(line, ' ');
    if (toks.front() == "provenance") {
      if (toks.size() != 2) throw ModelError("table line " + std::to_string(line_no) + ": bad provenance");
      table.provenance_ = toks[1] == "-" ? "" : std::string(toks[1]);
    } else if (toks.front() == "params") {
      InstanceParams p;
      for (std::size_t i = 1; i < toks.size(); ++i) {
        auto [k, v] = key_value(toks[i], line_no);
        if (k == "exchange") {
          auto e = parse_exchange(v);
          if (!e) throw ModelError("table: unknown exchange '" + std::string(v) + "'");
          p.exchange = *e;
        } else if (k == "failures") {
          auto f = parse_failure_model(v);
          if (!f) throw ModelError("table: unknown failure model '" + std::string(v) + "'");
          p.failures = *f;
        } else if (k == "n") {
          p.n = to_int(v, line_no);
        } else if (k == "t") {
          p.t = to_int(v, line_no);
        } else if (k == "k") {
          p.k = to_int(v, line_no);
        } else if (k == "horizon") {
          p.horizon = to_int(v, line_no);
        }
      }
      p.validate();
      table.params_ = p;
      have_params = true;
    } else if (toks.front() == "entry") {
      if (!have_params)
        throw ModelError("table line " + std::to_string(line_no) + ": entry before params");
      TableKey key;
      TableEntry entry;
      for (std::size_t i = 1; i < toks.size(); ++i) {
        auto [k, v] = key_value(toks[i], line_no);
        if (k == "agent") key.agent = to_int(v, line_no);
        else if (k == "time") key.time = to_int(v, line_no);
        else if (k == "obs") key.local = decode_local(table.params_, v);
        else if (k == "action") entry.action = parse_action(v, line_no);
        else if (k == "guards") {
          for (std::size_t b = 0; b < v.size(); ++b)
            if (v[b] == '1') entry.guards |= singleton(static_cast<int>(b));
        }
      }
      table.entries_[key] = entry;
    } else {
      throw ModelError("table line " + std::to_string(line_no) + ": unknown record '" +
                       std::string(toks.front()) + "'");
    }
  }
  if (!have_params) throw ModelError("table has no params record");
  return table;
}

bool DecisionTable::same_actions(const DecisionTable& other) const {
  return action_diff(other).empty();
}

std::vector<TableKey> DecisionTable::action_diff(const DecisionTable& other) const {
  std::vector<TableKey> diff;
  auto a = entries_.begin();
  auto b = other.entries_.begin();
  while (a != entries_.end() || b != other.entries_.end()) {
    if (b == other.entries_.end() || (a != entries_.end() && a->first < b->first)) {
      diff.push_back(a->first);
      ++a;
    } else if (a == entries_.end() || b->first < a->first) {
      diff.push_back(b->first);
      ++b;
    } else {
      if (a->second.action != b->second.action) diff.push_back(a->first);
      ++a;
      ++b;
    }
  }
  return diff;
}

}  // namespace kbpforge
