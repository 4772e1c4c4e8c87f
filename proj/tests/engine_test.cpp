#include <gtest/gtest.h>

#include "acac/dsl.hpp"
#include "acac/engine.hpp"
#include "fixtures.hpp"

using namespace acac;
using namespace acac::literals;
using acac::testing::load_policy;

namespace {

PolicySet parse(const std::string& text) {
  auto r = parse_policy(text);
  EXPECT_TRUE(r.ok()) << (r.errors.empty() ? "" : r.errors[0].to_string());
  EXPECT_TRUE(r.ok() && validate(*r.value).empty());
  return r.ok() ? *r.value : PolicySet{};
}

Outcome request(const EcosystemState& s, const PolicySet& p, const char* subject,
                const char* op, const char* object, const char* activity, Timestamp t) {
  return decide_and_commit(s, p,
                           {EntityId(subject), EntityId(op), EntityId(object),
                            EntityId(activity), t});
}

}  // namespace

TEST(Engine, Example1InactiveSetByManager) {
  const PolicySet p = load_policy("examples/ex01.acac");
  EcosystemState s = initial_state(p);
  s = request(s, p, "farm-manager", "TURN-ON", "WaterSprinkler", "Spraying", 0).state;
  s = request(s, p, "farm-manager", "TURN-OFF", "WaterSprinkler", "inactive", 1).state;
  Outcome o = request(s, p, "moisture-sensor", "TURN-ON", "WaterSprinkler", "Spraying", 2);
  EXPECT_TRUE(o.decision.permit);
  EXPECT_EQ(o.decision.matched_rule, 0u);
  EXPECT_NE(o.state.find_live("WaterSprinkler"_id, "Spraying"_id), nullptr);
}

TEST(Engine, Example1InactiveSetByWorker) {
  const PolicySet p = load_policy("examples/ex01.acac");
  EcosystemState s = initial_state(p);
  s = request(s, p, "worker", "TURN-ON", "WaterSprinkler", "Spraying", 0).state;
  s = request(s, p, "worker", "TURN-OFF", "WaterSprinkler", "inactive", 1).state;
  Outcome o = request(s, p, "moisture-sensor", "TURN-ON", "WaterSprinkler", "Spraying", 2);
  EXPECT_FALSE(o.decision.permit);
  EXPECT_EQ(o.decision.reason, DenyReason::CurFailed);
}

TEST(Engine, Example2NitrogenLevel) {
  const PolicySet p = load_policy("examples/ex02.acac");
  EcosystemState s = initial_state(p);
  s = request(s, p, "farm-manager", "TURN-ON", "NitrogenSensor", "Sensing", 0).state;
  s.environment["nitrogen-level"] = 40.0;
  EXPECT_TRUE(request(s, p, "weed-detector", "SPRAY-ON", "AerialDrone", "Spraying", 1)
                  .decision.permit);
  s.environment["nitrogen-level"] = 60.0;
  Outcome o = request(s, p, "weed-detector", "SPRAY-ON", "AerialDrone", "Spraying", 1);
  EXPECT_EQ(o.decision.reason, DenyReason::ContextFailed);
}

TEST(Engine, Example3StopObligationAttributedToRequester) {
  const PolicySet p = load_policy("examples/ex03.acac");
  EcosystemState s = initial_state(p);
  s = request(s, p, "weed-detector", "SPRAY-ON", "AerialDrone", "Spraying", 0).state;
  Outcome o = request(s, p, "autonomous-tractor", "IMAGING-ON", "AerialDrone",
                      "ThermalImaging", 5);
  ASSERT_TRUE(o.decision.permit);
  ASSERT_EQ(o.decision.executed_obligations.size(), 1u);
  EXPECT_EQ(o.decision.executed_obligations[0].kind, ObligationKind::Stop);
  EXPECT_EQ(o.decision.executed_obligations[0].activity, "Spraying"_id);
  ASSERT_EQ(o.state.history.size(), 1u);
  EXPECT_EQ(o.state.history[0].status, ActivityStatus::Aborted);
  EXPECT_EQ(o.state.history[0].attributed_source(), "autonomous-tractor"_id);
  EXPECT_EQ(format_decision_line({"autonomous-tractor"_id, "IMAGING-ON"_id,
                                  "AerialDrone"_id, "ThermalImaging"_id, 5},
                                 o.decision),
            "5 autonomous-tractor IMAGING-ON AerialDrone ThermalImaging -> PERMIT "
            "obligations=[stop:Spraying(AerialDrone)]");
}

TEST(Engine, EmptyPolicyDeniesByDefault) {
  const PolicySet p;
  Outcome o = request(initial_state(p), p, "anyone", "ON", "Thing", "Run", 3);
  EXPECT_FALSE(o.decision.permit);
  EXPECT_EQ(o.decision.reason, DenyReason::NoMatchingRule);
  EXPECT_EQ(o.state.clock, 3);
  EXPECT_EQ(format_decision_line({"anyone"_id, "ON"_id, "Thing"_id, "Run"_id, 3},
                                 o.decision),
            "3 anyone ON Thing Run -> DENY(no-matching-rule)");
}

TEST(Engine, IncompatibleWindowBoundary) {
  const PolicySet p = load_policy("relations/incompatible.acac");
  EcosystemState s = initial_state(p);
  s = request(s, p, "worker", "TURN-ON", "Sprinkler", "WaterSpraying", 0).state;
  s = apply_event(s, p, 1000, DeviceEvent{"Sprinkler"_id, "WaterSpraying"_id, false}).state;
  Outcome early = request(s, p, "farm-manager", "SPRAY", "Drone", "PestSpraying", 8199);
  EXPECT_EQ(early.decision.reason, DenyReason::RelationIncompatible);
  EXPECT_TRUE(request(s, p, "farm-manager", "SPRAY", "Drone", "PestSpraying", 8201)
                  .decision.permit);
}

TEST(Engine, IncompatibleIgnoresOtherLocation) {
  const PolicySet p = load_policy("relations/incompatible.acac");
  EcosystemState s = initial_state(p);
  s = request(s, p, "worker", "TURN-ON", "Sprinkler-2", "WaterSpraying", 0).state;
  EXPECT_TRUE(request(s, p, "farm-manager", "SPRAY", "Drone", "PestSpraying", 1)
                  .decision.permit);
}

TEST(Engine, DailyLimit) {
  const PolicySet p = load_policy("relations/limits.acac");
  EcosystemState s = initial_state(p);
  auto spray = [&](const char* dev, Timestamp t) {
    return request(s, p, "worker", "SPRAY", dev, "PestSpraying", t);
  };
  Outcome a = spray("Sprayer-1", 0);
  ASSERT_TRUE(a.decision.permit);
  s = a.state;
  Outcome b = spray("Sprayer-2", 100);
  ASSERT_TRUE(b.decision.permit);
  s = b.state;
  EXPECT_EQ(spray("Sprayer-3", 200).decision.reason, DenyReason::LimitExceeded);
  EXPECT_TRUE(spray("Sprayer-3", 86500).decision.permit);
}

TEST(Engine, EvaluationOrderPicksFirstFailingStage) {
  // pre, cur and when all fail; pre is reported.
  const PolicySet p = parse(
      "device D type=T\nsubject u kind=user\nenv flag = false\n"
      "rule on D:\n  allow ON by ANY as A\n  pre B(D, ANY)\n  cur C(D, ANY)\n"
      "  when value(flag) = true\n");
  EXPECT_EQ(request(initial_state(p), p, "u", "ON", "D", "A", 0).decision.reason,
            DenyReason::PreFailed);
}

TEST(Engine, FirstMatchIgnoresLaterRules) {
  const PolicySet p = parse(
      "device D type=T\nsubject u kind=user\nenv flag = false\n"
      "rule on D:\n  allow ON by ANY as A\n  when value(flag) = true\n"
      "rule on D:\n  allow ON by ANY as A\n");
  EXPECT_EQ(request(initial_state(p), p, "u", "ON", "D", "A", 0).decision.reason,
            DenyReason::ContextFailed);
}

TEST(Engine, FailedObligationRollsBack) {
  const PolicySet p = parse(
      "device D type=T\ndevice E type=T\nsubject u kind=user\n"
      "rule on D:\n  allow ON by ANY as A\n  then start B(E); stop C(E)\n");
  const EcosystemState s = initial_state(p);
  Outcome o = request(s, p, "u", "ON", "D", "A", 7);
  EXPECT_EQ(o.decision.reason, DenyReason::ObligationFailed);
  EcosystemState want = s;
  want.clock = 7;
  EXPECT_EQ(o.state, want);
}

TEST(Engine, ClockRegressionIsAnError) {
  const PolicySet p;
  EcosystemState s = advance_clock(initial_state(p), 10);
  EXPECT_THROW(request(s, p, "u", "ON", "D", "A", 9), EngineError);
}

TEST(Engine, ContinuityRevokesOnEvent) {
  const PolicySet p = load_policy("examples/ex08.acac");
  EcosystemState s = initial_state(p);
  s = request(s, p, "operator", "TURN-ON", "RoboticArm", "Packaging", 0).state;
  EventOutcome o =
      apply_event(s, p, 10, DeviceEvent{"ProductionBelt"_id, "Vibrating"_id, true});
  ASSERT_TRUE(o.decision.has_value());
  EXPECT_TRUE(o.decision->permit);
  ASSERT_EQ(o.decision->revoked.size(), 1u);
  EXPECT_EQ(o.decision->revoked[0], LiveKey("RoboticArm"_id, "Packaging"_id));
  EXPECT_EQ(o.state.find_live("RoboticArm"_id, "Packaging"_id), nullptr);
  EXPECT_EQ(o.state.find_live("ProductionBelt"_id, "Vibrating"_id)->initiator,
            event_subject());
}

TEST(Engine, EnvUpdateWithoutContinuityOnlyChangesEnvironment) {
  const PolicySet p = load_policy("examples/ex02.acac");
  EcosystemState s = initial_state(p);
  s = request(s, p, "farm-manager", "TURN-ON", "NitrogenSensor", "Sensing", 0).state;
  EventOutcome o = apply_event(s, p, 5, EnvEvent{"nitrogen-level", 99.0});
  EcosystemState want = s;
  want.clock = 5;
  want.environment["nitrogen-level"] = 99.0;
  EXPECT_EQ(o.state, want);
  EXPECT_TRUE(o.revoked.empty());
}

TEST(Engine, PrecedenceHaltsAndResumes) {
  const PolicySet p = load_policy("relations/precedence.acac");
  EcosystemState s = initial_state(p);
  for (const char* a : {"Actuator-1", "Actuator-2", "Actuator-3"}) {
    s = request(s, p, "farm-manager", "TURN-ON", a, "NutrientSpraying", 0).state;
  }
  Outcome mix = request(s, p, "farm-manager", "TURN-ON", "MixingUnit", "NutrientMixing", 100);
  ASSERT_TRUE(mix.decision.permit);
  EXPECT_EQ(mix.decision.preempted.size(), 2u);
  EXPECT_EQ(mix.state.find_live("Actuator-3"_id, "NutrientSpraying"_id)->status,
            ActivityStatus::Active);
  // A halted loser cannot be restarted while the winner runs.
  Outcome blocked =
      request(mix.state, p, "farm-manager", "TURN-ON", "Actuator-1", "NutrientSpraying", 150);
  EXPECT_FALSE(blocked.decision.permit);
  EventOutcome done =
      apply_event(mix.state, p, 500, DeviceEvent{"MixingUnit"_id, "NutrientMixing"_id, false});
  EXPECT_EQ(done.resumed.size(), 2u);
  for (const auto& [k, i] : done.state.live) EXPECT_EQ(i.status, ActivityStatus::Active);
}

TEST(Engine, ConcurrentMustStartsPartnerAndRevokesOrphan) {
  const PolicySet p = load_policy("relations/concurrent.acac");
  Outcome o = request(initial_state(p), p, "farm-manager", "TURN-ON", "NutrientSprayer",
                      "NutrientSpraying", 0);
  ASSERT_TRUE(o.decision.permit);
  ASSERT_EQ(o.decision.started.size(), 1u);
  EXPECT_EQ(o.decision.started[0], LiveKey("NitrogenSensor"_id, "Sensing"_id));
  EXPECT_EQ(o.state.find_live("NitrogenSensor"_id, "Sensing"_id)->initiator,
            "farm-manager"_id);
  EventOutcome stop =
      apply_event(o.state, p, 10, DeviceEvent{"NitrogenSensor"_id, "Sensing"_id, false});
  EXPECT_EQ(stop.revoked, std::vector<LiveKey>{LiveKey("NutrientSprayer"_id,
                                                       "NutrientSpraying"_id)});
  EXPECT_TRUE(stop.state.live.empty());
}

TEST(Engine, ConcurrentMustPartnerCannotStartAlone) {
  const PolicySet p = load_policy("relations/concurrent.acac");
  Outcome o = request(initial_state(p), p, "farm-manager", "TURN-ON", "NitrogenSensor",
                      "Sensing", 0);
  EXPECT_EQ(o.decision.reason, DenyReason::RelationDependence);
}
