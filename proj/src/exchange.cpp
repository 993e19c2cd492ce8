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

#include "kbpforge/exchange.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <map>

namespace kbpforge {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

ValueSet merge_seen(ValueSet own, std::span<const Received> received) {
  for (const Received& r : received)
    if (auto* m = std::get_if<ValuesMessage>(&r.message)) own |= m->seen;
  return own;
}

// 0 has priority over 1; otherwise bottom.
Value just_decided(std::span<const Received> received) {
  Value jd = kNoValue;
  for (const Received& r : received) {
    if (auto* m = std::get_if<DecideMessage>(&r.message)) {
      if (jd == kNoValue || m->value < jd) jd = m->value;
    }
  }
  return jd;
}

std::string bits(std::uint32_t set, int width) {
  std::string s(width, '0');
  for (int i = 0; i < width; ++i)
    if (contains(set, i)) s[i] = '1';
  return s;
}

std::uint32_t parse_bits(std::string_view s) {
  std::uint32_t set = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '1') set |= singleton(static_cast<int>(i));
    else if (s[i] != '0') throw ModelError("bad bit string '" + std::string(s) + "'");
  }
  return set;
}

std::string value_str(Value v) { return v == kNoValue ? "-" : std::to_string(v); }

Value parse_value(std::string_view s) {
  if (s == "-") return kNoValue;
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ModelError("bad integer '" + std::string(s) + "'");
  return v;
}

void hash_combine(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

}  // namespace

std::string Action::str() const {
  return is_decide() ? "decide(" + std::to_string(value_) + ")" : "noop";
}

LocalState init_local(const InstanceParams& params, AgentId /*agent*/,
                      Value vote) {
  if (vote < 0 || vote >= params.k) throw ParamError("vote out of range");
  const ValueSet own = singleton(vote);
  switch (params.exchange) {
    case ExchangeKind::floodset: return FloodSetLocal{own};
    case ExchangeKind::count: return CountLocal{own, 0};
    case ExchangeKind::diff: return DiffLocal{own, 0, 0};
    case ExchangeKind::dworkmoses: {
      DworkMosesLocal l;
      l.exists0 = vote == 0;
      return l;
    }
    case ExchangeKind::emin: {
      EminLocal l;
      l.init = vote;
      return l;
    }
    case ExchangeKind::ebasic: {
      EbasicLocal l;
      l.init = vote;
      return l;
    }
  }
  throw ParamError("unknown exchange");
}

std::optional<Message> round_message(const LocalState& local, Action action) {
  return std::visit(
      Overloaded{
          [](const FloodSetLocal& l) -> std::optional<Message> {
            return ValuesMessage{l.seen};
          },
          [](const CountLocal& l) -> std::optional<Message> {
            return ValuesMessage{l.seen};
          },
          [](const DiffLocal& l) -> std::optional<Message> {
            return ValuesMessage{l.seen};
          },
          [](const DworkMosesLocal& l) -> std::optional<Message> {
            return DworkMosesMessage{l.newly_faulty, l.exists0};
          },
          [action](const EminLocal&) -> std::optional<Message> {
            if (action.is_decide()) return DecideMessage{action.value()};
            return std::nullopt;
          },
          [action](const EbasicLocal& l) -> std::optional<Message> {
            if (action.is_decide()) return DecideMessage{action.value()};
            if (l.init == 1) return InitOneMessage{};
            return std::nullopt;
          },
      },
      local);
}

LocalState update_local(const InstanceParams& params, AgentId self, int time,
                        const LocalState& local, Action action,
                        std::span<const Received> received) {
  const int count = static_cast<int>(received.size());
  return std::visit(
      Overloaded{
          [&](const FloodSetLocal& l) -> LocalState {
            return FloodSetLocal{merge_seen(l.seen, received)};
          },
          [&](const CountLocal& l) -> LocalState {
            return CountLocal{merge_seen(l.seen, received), count};
          },
          [&](const DiffLocal& l) -> LocalState {
            return DiffLocal{merge_seen(l.seen, received), count, l.count};
          },
          [&](const DworkMosesLocal& l) -> LocalState {
            AgentSet heard = 0;
            AgentSet reported = 0;
            bool exists0 = l.exists0;
            for (const Received& r : received) {
              heard |= singleton(r.sender);
              if (auto* m = std::get_if<DworkMosesMessage>(&r.message)) {
                reported |= m->newly_faulty;
                exists0 = exists0 || m->exists0;
              }
            }
            const AgentSet missing =
                params.all_agents() & ~heard & ~singleton(self);
            DworkMosesLocal next;
            next.newly_faulty = (missing | reported) & ~l.known_faulty;
            next.known_faulty = l.known_faulty | next.newly_faulty;
            next.reported_faulty = reported;
            next.exists0 = exists0;
            // waste(m) = max over rounds m' <= m of |F(m')| - m', floored at 0
            next.current_waste =
                std::max(l.current_waste, set_size(next.known_faulty) - (time + 1));
            return next;
          },
          [&](const EminLocal& l) -> LocalState {
            EminLocal next = l;
            next.jd = just_decided(received);
            if (action.is_decide() && !l.decided) {
              next.decided = true;
              next.decision = action.value();
            }
            return next;
          },
          [&](const EbasicLocal& l) -> LocalState {
            EbasicLocal next = l;
            next.jd = just_decided(received);
            next.num1 = static_cast<int>(
                std::count_if(received.begin(), received.end(), [](const Received& r) {
                  return std::holds_alternative<InitOneMessage>(r.message);
                }));
            if (action.is_decide() && !l.decided) {
              next.decided = true;
              next.decision = action.value();
            }
            return next;
          },
      },
      local);
}

std::vector<LocalVariable> local_variables(const InstanceParams& params,
                                           const LocalState& local) {
  std::vector<LocalVariable> vars;
  auto seen = [&](ValueSet s) {
    for (Value v = 0; v < params.k; ++v)
      vars.push_back({"values_received[" + std::to_string(v) + "]",
                      contains(s, v) ? 1 : 0});
  };
  auto agents = [&](const char* name, AgentSet s) {
    for (AgentId a = 0; a < params.n; ++a)
      vars.push_back({std::string(name) + "[" + std::to_string(a) + "]",
                      contains(s, a) ? 1 : 0});
  };
  std::visit(Overloaded{
                 [&](const FloodSetLocal& l) { seen(l.seen); },
                 [&](const CountLocal& l) {
                   seen(l.seen);
                   vars.push_back({"count", l.count});
                 },
                 [&](const DiffLocal& l) {
                   seen(l.seen);
                   vars.push_back({"count", l.count});
                   vars.push_back({"prev_count", l.prev_count});
                 },
                 [&](const DworkMosesLocal& l) {
                   agents("F", l.known_faulty);
                   agents("NF", l.newly_faulty);
                   agents("RF", l.reported_faulty);
                   vars.push_back({"exists0", l.exists0 ? 1 : 0});
                   vars.push_back({"current_waste", l.current_waste});
                 },
                 [&](const EminLocal& l) {
                   vars.push_back({"init", l.init});
                   vars.push_back({"decided", l.decided ? 1 : 0});
                   vars.push_back({"decision", l.decision});
                   vars.push_back({"jd", l.jd});
                 },
                 [&](const EbasicLocal& l) {
                   vars.push_back({"init", l.init});
                   vars.push_back({"decided", l.decided ? 1 : 0});
                   vars.push_back({"decision", l.decision});
                   vars.push_back({"jd", l.jd});
                   vars.push_back({"num1", l.num1});
                 },
             },
             local);
  return vars;
}

std::optional<int> local_variable(const InstanceParams& params,
                                  const LocalState& local,
                                  std::string_view name) {
  // Short alias used in hand-written formulas.
  std::string key(name);
  if (key.rfind("w[", 0) == 0) key = "values_received" + key.substr(1);
  for (const LocalVariable& v : local_variables(params, local))
    if (v.name == key) return v.value;
  return std::nullopt;
}

std::string encode_local(const InstanceParams& params, const LocalState& local) {
  return std::visit(
      Overloaded{
          [&](const FloodSetLocal& l) { return "w=" + bits(l.seen, params.k); },
          [&](const CountLocal& l) {
            return "w=" + bits(l.seen, params.k) + ",count=" + std::to_string(l.count);
          },
          [&](const DiffLocal& l) {
            return "w=" + bits(l.seen, params.k) + ",count=" + std::to_string(l.count) +
                   ",prev=" + std::to_string(l.prev_count);
          },
          [&](const DworkMosesLocal& l) {
            return "F=" + bits(l.known_faulty, params.n) + ",NF=" +
                   bits(l.newly_faulty, params.n) + ",RF=" +
                   bits(l.reported_faulty, params.n) +
                   ",e0=" + (l.exists0 ? "1" : "0") +
                   ",waste=" + std::to_string(l.current_waste);
          },
          [&](const EminLocal& l) {
            return "init=" + std::to_string(l.init) + ",decided=" +
                   (l.decided ? "1" : "0") + ",decision=" + value_str(l.decision) +
                   ",jd=" + value_str(l.jd);
          },
          [&](const EbasicLocal& l) {
            return "init=" + std::to_string(l.init) + ",decided=" +
                   (l.decided ? "1" : "0") + ",decision=" + value_str(l.decision) +
                   ",jd=" + value_str(l.jd) + ",num1=" + std::to_string(l.num1);
          },
      },
      local);
}

LocalState decode_local(const InstanceParams& params, std::string_view text) {
  std::map<std::string, std::string, std::less<>> kv;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos)
      throw ModelError("bad observation field '" + std::string(item) + "'");
    kv.emplace(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
  }
  auto get = [&](std::string_view key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end())
      throw ModelError("observation lacks field '" + std::string(key) + "'");
    return it->second;
  };
  switch (params.exchange) {
    case ExchangeKind::floodset: return FloodSetLocal{parse_bits(get("w"))};
    case ExchangeKind::count:
      return CountLocal{parse_bits(get("w")), parse_value(get("count"))};
    case ExchangeKind::diff:
      return DiffLocal{parse_bits(get("w")), parse_value(get("count")),
                       parse_value(get("prev"))};
    case ExchangeKind::dworkmoses: {
      DworkMosesLocal l;
      l.known_faulty = parse_bits(get("F"));
      l.newly_faulty = parse_bits(get("NF"));
      l.reported_faulty = parse_bits(get("RF"));
      l.exists0 = parse_value(get("e0")) != 0;
      l.current_waste = parse_value(get("waste"));
      return l;
    }
    case ExchangeKind::emin: {
      EminLocal l;
      l.init = parse_value(get("init"));
      l.decided = parse_value(get("decided")) != 0;
      l.decision = parse_value(get("decision"));
      l.jd = parse_value(get("jd"));
      return l;
    }
    case ExchangeKind::ebasic: {
      EbasicLocal l;
      l.init = parse_value(get("init"));
      l.decided = parse_value(get("decided")) != 0;
      l.decision = parse_value(get("decision"));
      l.jd = parse_value(get("jd"));
      l.num1 = parse_value(get("num1"));
      return l;
    }
  }
  throw ModelError("unknown exchange");
}

std::size_t hash_local(const LocalState& local) {
  std::size_t h = local.index();
  std::visit(Overloaded{
                 [&](const FloodSetLocal& l) { hash_combine(h, l.seen); },
                 [&](const CountLocal& l) {
                   hash_combine(h, l.seen);
                   hash_combine(h, l.count);
                 },
                 [&](const DiffLocal& l) {
                   hash_combine(h, l.seen);
                   hash_combine(h, l.count);
                   hash_combine(h, l.prev_count);
                 },
                 [&](const DworkMosesLocal& l) {
                   hash_combine(h, l.known_faulty);
                   hash_combine(h, l.newly_faulty);
                   hash_combine(h, l.reported_faulty);
                   hash_combine(h, l.exists0);
                   hash_combine(h, l.current_waste);
                 },
                 [&](const EminLocal& l) {
                   hash_combine(h, l.init);
                   hash_combine(h, l.decided);
                   hash_combine(h, l.decision + 1);
                   hash_combine(h, l.jd + 1);
                 },
                 [&](const EbasicLocal& l) {
                   hash_combine(h, l.init);
                   hash_combine(h, l.decided);
                   hash_combine(h, l.decision + 1);
                   hash_combine(h, l.jd + 1);
                   hash_combine(h, l.num1);
                 },
             },
             local);
  return h;
}

std::optional<ValueSet> seen_values(const LocalState& local) {
  if (auto* l = std::get_if<FloodSetLocal>(&local)) return l->seen;
  if (auto* l = std::get_if<CountLocal>(&local)) return l->seen;
  if (auto* l = std::get_if<DiffLocal>(&local)) return l->seen;
  return std::nullopt;
}

bool local_decided(const LocalState& local) {
  if (auto* l = std::get_if<EminLocal>(&local)) return l->decided;
  if (auto* l = std::get_if<EbasicLocal>(&local)) return l->decided;
  return false;
}

}  // namespace kbpforge
