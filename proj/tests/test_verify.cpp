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

#include <doctest.h>

#include "kbpforge/verify.hpp"

using namespace kbpforge;

namespace {

constexpr auto crash = FailureModel::crash;
constexpr auto som = FailureModel::somissions;

InstanceParams P(ExchangeKind e, FailureModel f, int n, int t) {
  return InstanceParams::make(e, f, n, t);
}

const PropertyResult& result(const VerificationReport& r, Property p) {
  for (const PropertyResult& x : r.results)
    if (x.property == p) return x;
  throw std::runtime_error("property missing from report");
}

}  // namespace

TEST_CASE("synthesized tables pass their suites") {
  const Synthesis s = synthesize(P(ExchangeKind::floodset, crash, 3, 1), KbpKind::sba);
  const VerificationReport r = check_suite(s.system, SpecSuite::sba());
  CHECK(r.passed());
  CHECK(r.results.size() == 4);
  CHECK(r.text().find("result pass") != std::string::npos);

  const Synthesis c = synthesize(P(ExchangeKind::count, crash, 3, 2), KbpKind::sba);
  CHECK(check_table(c.table, SpecSuite::sba()).passed());

  const Synthesis e = synthesize(P(ExchangeKind::ebasic, som, 3, 2), KbpKind::eba0);
  CHECK(check_suite(e.system, SpecSuite::eba()).passed());
}

TEST_CASE("all-noop protocol only fails termination") {
  const auto p = P(ExchangeKind::floodset, crash, 3, 1);
  const LayeredSystem sys =
      build_system_with_rule(p, [](AgentId, int, const LocalState&) { return Action::noop(); }, "noop");
  const VerificationReport r = check_suite(sys, SpecSuite::sba());
  CHECK_FALSE(r.passed());
  CHECK(result(r, Property::unique_decision).passed);
  CHECK(result(r, Property::simultaneous_agreement).passed);
  CHECK(result(r, Property::validity).passed);
  const PropertyResult& term = result(r, Property::termination);
  CHECK_FALSE(term.passed);
  REQUIRE(term.counterexample);
  CHECK(term.counterexample->layer == p.horizon);
  CHECK(r.text().find("result fail") != std::string::npos);
}

TEST_CASE("a flipped decision is caught") {
  const auto p = P(ExchangeKind::floodset, crash, 3, 1);
  const Synthesis s = synthesize(p, KbpKind::sba);
  int mutants = 0;
  for (const auto& [key, entry] : s.table.entries()) {
    if (!entry.action.is_decide()) continue;
    DecisionTable m = s.table;
    m.set(key.agent, key.time, key.local, TableEntry{Action::decide(1 - entry.action.value()), 0});
    const VerificationReport r = check_table(m, SpecSuite::sba());
    CHECK_FALSE(r.passed());
    const bool caught = !result(r, Property::simultaneous_agreement).passed ||
                        !result(r, Property::validity).passed;
    CHECK(caught);
    for (const PropertyResult& x : r.results)
      if (!x.passed) CHECK(x.counterexample.has_value());
    if (++mutants == 6) break;
  }
  CHECK(mutants == 6);
}

TEST_CASE("suites parse") {
  CHECK(SpecSuite::parse("sba").properties.size() == 4);
  CHECK(SpecSuite::parse("eba").properties == SpecSuite::eba().properties);
  CHECK(SpecSuite::parse("validity,termination").properties ==
        std::vector<Property>{Property::validity, Property::termination});
  CHECK_THROWS(SpecSuite::parse("liveness"));
}

TEST_CASE("comparison is reflexive") {
  for (auto p : {P(ExchangeKind::floodset, crash, 3, 2), P(ExchangeKind::count, som, 2, 2)}) {
    const Synthesis s = synthesize(p, KbpKind::sba);
    const OrderResult r = compare(s.table, s.table);
    CHECK(r.identical);
    CHECK(r.a_le_b);
    CHECK(r.b_le_a);
    CHECK(r.relation == Order::le);
  }
  const auto e = P(ExchangeKind::emin, crash, 3, 2);
  const DecisionTable impl = as_table(Baseline::emin_impl, e);
  CHECK(compare(impl, impl).identical);
}

TEST_CASE("comparison is transitive") {
  const auto p = P(ExchangeKind::floodset, crash, 3, 2);
  const DecisionTable synth = synthesize(p, KbpKind::sba).table;
  const DecisionTable textbook = as_table(Baseline::floodset_textbook, p);
  const LayeredSystem never_sys =
      build_system_with_rule(p, [](AgentId, int time, const LocalState& l) {
        return time == 4 ? Action::decide(__builtin_ctz(*seen_values(l))) : Action::noop();
      }, "never");
  const DecisionTable& late = *never_sys.table();
  const OrderResult ab = compare(synth, textbook);
  const OrderResult bc = compare(textbook, late);
  const OrderResult ac = compare(synth, late);
  CHECK(ab.a_le_b);
  CHECK(bc.a_le_b);
  CHECK(ac.a_le_b);
  CHECK(ab.relation == Order::strict_lt_somewhere);
  CHECK(compare(textbook, synth).relation == Order::strict_gt_somewhere);
  REQUIRE(ab.a_earlier);
  CHECK(ab.a_earlier->time_a == 2);
  CHECK(ab.a_earlier->time_b == 3);
  CHECK_FALSE(ab.a_earlier->trace.empty());
}

TEST_CASE("comparison needs matching runs") {
  const DecisionTable a = synthesize(P(ExchangeKind::floodset, crash, 3, 1), KbpKind::sba).table;
  const DecisionTable b = synthesize(P(ExchangeKind::floodset, crash, 3, 2), KbpKind::sba).table;
  CHECK_THROWS_AS(compare(a, b), ModelError);
  const DecisionTable c = synthesize(P(ExchangeKind::floodset, som, 3, 1), KbpKind::sba).table;
  CHECK_THROWS_AS(compare(a, c), ModelError);
}

TEST_CASE("count and diff decide together") {
  for (int t = 1; t <= 3; ++t) {
    const DecisionTable c = synthesize(P(ExchangeKind::count, crash, 3, t), KbpKind::sba).table;
    const DecisionTable d = synthesize(P(ExchangeKind::diff, crash, 3, t), KbpKind::sba).table;
    const OrderResult r = compare(d, c);
    CHECK(r.a_le_b);
    CHECK(r.b_le_a);
  }
}

TEST_CASE("earliest knowledge audit") {
  for (auto [p, kind] : {std::pair{P(ExchangeKind::count, crash, 3, 2), KbpKind::sba},
                         std::pair{P(ExchangeKind::emin, som, 3, 1), KbpKind::eba0}}) {
    const Synthesis s = synthesize(p, kind);
    CHECK(earliest_knowledge_audit(s.system, kind).clean());
  }
  const auto p = P(ExchangeKind::floodset, crash, 3, 2);
  const AuditReport r = earliest_knowledge_audit(build_baseline(Baseline::floodset_textbook, p), KbpKind::sba);
  CHECK(r.late > 0);
  CHECK(r.early == 0);
  CHECK(r.wrong_value == 0);
  bool late_at_2 = false;
  for (const AuditFinding& f : r.examples)
    if (f.kind == AuditFinding::late) late_at_2 |= f.layer == 2;
  CHECK(late_at_2);
  CHECK(r.text().find("late=") == 0);
}

TEST_CASE("dwork-moses rule audit runs") {
  for (int t = 1; t <= 3; ++t) {
    const auto p = P(ExchangeKind::dworkmoses, crash, 3, t);
    const AuditReport r = earliest_knowledge_audit(build_baseline(Baseline::dm_concrete, p), KbpKind::sba);
    CAPTURE(r.text());
    CHECK(r.wrong_value == 0);
  }
}
