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

#include "kbpforge/params.hpp"

#include <sstream>

namespace kbpforge {

std::string_view to_string(ExchangeKind e) {
  switch (e) {
    case ExchangeKind::floodset: return "floodset";
    case ExchangeKind::count: return "count";
    case ExchangeKind::diff: return "diff";
    case ExchangeKind::dworkmoses: return "dworkmoses";
    case ExchangeKind::emin: return "emin";
    case ExchangeKind::ebasic: return "ebasic";
  }
  return "?";
}

std::string_view to_string(FailureModel f) {
  return f == FailureModel::crash ? "crash" : "somissions";
}

std::optional<ExchangeKind> parse_exchange(std::string_view s) {
  for (auto e : {ExchangeKind::floodset, ExchangeKind::count, ExchangeKind::diff,
                 ExchangeKind::dworkmoses, ExchangeKind::emin,
                 ExchangeKind::ebasic}) {
    if (to_string(e) == s) return e;
  }
  return std::nullopt;
}

std::optional<FailureModel> parse_failure_model(std::string_view s) {
  if (s == "crash") return FailureModel::crash;
  if (s == "somissions" || s == "omissions") return FailureModel::somissions;
  return std::nullopt;
}

bool transmits_decisions(ExchangeKind e) {
  return e == ExchangeKind::emin || e == ExchangeKind::ebasic;
}

bool tracks_decided(ExchangeKind e) { return transmits_decisions(e); }

InstanceParams InstanceParams::make(ExchangeKind exchange,
                                    FailureModel failures, int n, int t, int k,
                                    int horizon) {
  InstanceParams p;
  p.n = n;
  p.t = t;
  p.k = k;
  p.horizon = horizon == 0 ? t + 2 : horizon;
  p.exchange = exchange;
  p.failures = failures;
  p.validate();
  return p;
}

void InstanceParams::validate() const {
  if (n < 1) throw ParamError("n must be at least 1");
  if (n > kMaxAgents)
    throw ParamError("n exceeds the supported maximum of " +
                     std::to_string(kMaxAgents));
  if (t < 0 || t > n) throw ParamError("t must satisfy 0 <= t <= n");
  if (k < 2) throw ParamError("k must be at least 2");
  if (k > kMaxValues)
    throw ParamError("k exceeds the supported maximum of " +
                     std::to_string(kMaxValues));
  if (horizon > kMaxHorizon)
    throw ParamError("horizon overflows the time counter (max " +
                     std::to_string(kMaxHorizon) + ")");
  if (horizon < t + 2) throw ParamError("horizon must be at least t+2");
  if ((exchange == ExchangeKind::dworkmoses || transmits_decisions(exchange)) &&
      k != 2)
    throw ParamError(std::string(to_string(exchange)) +
                     " is defined for binary values only (k = 2)");
}

std::string InstanceParams::describe() const {
  std::ostringstream os;
  os << "exchange=" << to_string(exchange) << " failures=" << to_string(failures)
     << " n=" << n << " t=" << t << " k=" << k << " horizon=" << horizon;
  return os.str();
}

}  // namespace kbpforge
