#include <cmath>

#include "doctest.h"
#include "psr/baselines.hpp"
#include "psr/io.hpp"
#include "psr/sim.hpp"
#include "support/fixtures.hpp"

using namespace psr;

namespace {

DetectionFrame frame(std::int64_t f, AssemblyState s, double conf, double fps = 10.0) {
  return {f, static_cast<double>(f) / fps, {{std::move(s), conf, std::nullopt}}};
}

std::vector<DetectionFrame> hold(std::int64_t from, std::int64_t count, const AssemblyState& s, double conf) {
  std::vector<DetectionFrame> out;
  for (std::int64_t f = from; f < from + count; ++f) out.push_back(frame(f, s, conf));
  return out;
}

}  // namespace

TEST_CASE("select_top_detection: highest confidence, first on ties") {
  DetectionFrame f{0, 0.0, {{AssemblyState{0}, 0.4, {}}, {AssemblyState{1}, 0.9, {}}, {AssemblyState{-1}, 0.9, {}}}};
  REQUIRE(select_top_detection(f) != nullptr);
  CHECK(select_top_detection(f)->state == AssemblyState{1});
  CHECK(select_top_detection(DetectionFrame{}) == nullptr);
}

TEST_CASE("variant names") {
  CHECK(variant_from_string("b2") == Variant::B2);
  CHECK(variant_from_string("B3") == Variant::B3);
  CHECK_FALSE(variant_from_string("b4"));
  CHECK(to_string(Variant::B1) == "b1");
}

TEST_CASE("B1 emits every confident change of the top detection") {
  const auto spec = psr::testing::flat_spec(3);
  Recognizer r(BaselineConfig::defaults(Variant::B1), spec);
  CHECK(r.step(frame(0, {0, 0, 0}, 0.9)).empty());  // initializes
  CHECK(r.step(frame(1, {1, 1, 0}, 0.4)).empty());  // below threshold
  const auto ev = r.step(frame(2, {1, 1, 0}, 0.5));
  REQUIRE(ev.size() == 2);
  CHECK(ev[0].action_id == "a0");
  CHECK(ev[1].action_id == "a1");
  CHECK(ev[0].frame == 2);
  CHECK(ev[0].confidence == 0.5);
  CHECK(ev[0].source == EventSource::Recognized);
  CHECK(r.current() == AssemblyState{1, 1, 0});
}

TEST_CASE("B1 initializes from the first non-empty frame") {
  const auto spec = psr::testing::flat_spec(2);
  const std::vector<DetectionFrame> stream{{0, 0.0, {}}, frame(1, {1, 0}, 0.2), frame(2, {1, 1}, 0.9)};
  const auto seq = run_baseline(BaselineConfig::defaults(Variant::B1), spec, stream, 10.0, "r");
  REQUIRE(seq.initial_state.has_value());
  CHECK(*seq.initial_state == AssemblyState{1, 0});
  REQUIRE(seq.events.size() == 1);
  CHECK(seq.events[0].action_id == "a1");
}

TEST_CASE("B2 accumulation: constant 0.9 emits on the ninth conflicting frame") {
  const auto spec = psr::testing::flat_spec(1);
  Recognizer r(BaselineConfig::defaults(Variant::B2), spec);
  r.step(frame(0, {0}, 0.9));
  for (int k = 1; k <= 8; ++k) {
    CAPTURE(k);
    CHECK(r.step(frame(k, {1}, 0.9)).empty());
    CHECK(r.accumulated()[0] == doctest::Approx(0.9 * k).epsilon(1e-12));
  }
  const auto ev = r.step(frame(9, {1}, 0.9));
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].frame == 9);
  CHECK(ev[0].confidence == doctest::Approx(8.1));
  CHECK(r.accumulated()[0] == 0.0);
  CHECK(r.current() == AssemblyState{1});
}

TEST_CASE("B2 decay after a single conflict") {
  const auto spec = psr::testing::flat_spec(1);
  Recognizer r(BaselineConfig::defaults(Variant::B2), spec);
  r.step(frame(0, {0}, 0.9));
  r.step(frame(1, {1}, 0.9));
  for (int k = 1; k <= 20; ++k) {
    r.step(frame(1 + k, {0}, 0.9));
    CHECK(std::abs(r.accumulated()[0] - 0.9 * std::pow(0.75, k)) < 1e-12);
  }
}

TEST_CASE("B2 with confidence 1 emits seven frames after the change") {
  const auto spec = psr::testing::flat_spec(1);
  std::vector<DetectionFrame> stream = hold(0, 10, {0}, 1.0);
  for (auto& f : hold(10, 20, {1}, 1.0)) stream.push_back(f);
  const auto seq = run_baseline(BaselineConfig::defaults(Variant::B2), spec, stream, 10.0, "r");
  REQUIRE(seq.events.size() == 1);
  CHECK(seq.events[0].frame == 17);  // the eighth conflicting frame reaches 8.0
}

TEST_CASE("B2 pending value follows the latest conflicting detection") {
  const auto spec = psr::testing::flat_spec(1);
  Recognizer r(BaselineConfig::defaults(Variant::B2), spec);
  r.step(frame(0, {0}, 1.0));
  for (int k = 1; k <= 7; ++k) r.step(frame(k, {1}, 1.0));
  CHECK(r.pending()[0] == ComponentStatus::Installed);
  const auto ev = r.step(frame(8, {-1}, 1.0));
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].transition == Transition::Incorrect);
  CHECK(ev[0].action_id == "a0:incorrect");
}

TEST_CASE("B3 only emits into expected states") {
  auto spec = psr::testing::flat_spec(2);
  spec.actions[1].prerequisites = {"a0"};
  // a1 before a0 leads to an unexpected state and is never reported
  const auto stream = hold(0, 40, {0, 1}, 1.0);
  const auto seq = run_baseline(BaselineConfig::defaults(Variant::B3), spec, stream, 10.0, "r");
  CHECK(seq.events.empty());
  REQUIRE(seq.initial_state.has_value());
  CHECK(*seq.initial_state == spec.initial_state);

  // component 0 comes second here: its conflict keeps accumulating while guarded
  spec.actions[1].prerequisites.clear();
  spec.actions[0].prerequisites = {"a1"};
  Recognizer r(BaselineConfig::defaults(Variant::B3), spec);
  for (const auto& f : hold(0, 8, {1, 1}, 1.0)) {
    const auto ev = r.step(f);
    if (f.frame < 7) {
      CHECK(ev.empty());
    } else {
      REQUIRE(ev.size() == 1);
      CHECK(ev[0].action_id == "a1");
    }
  }
  CHECK(r.accumulated()[0] == doctest::Approx(8.0));
  const auto ev = r.step(frame(8, {1, 1}, 1.0));
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].action_id == "a0");
  CHECK(ev[0].confidence == doctest::Approx(9.0));
}

TEST_CASE("a step is reported only once") {
  const auto spec = psr::testing::flat_spec(1);
  const std::vector<DetectionFrame> stream{frame(0, {0}, 1), frame(1, {1}, 1), frame(2, {0}, 1), frame(3, {1}, 1)};
  const auto seq = run_baseline(BaselineConfig::defaults(Variant::B1), spec, stream, 10.0, "r");
  REQUIRE(seq.events.size() == 2);
  CHECK(seq.events[0].action_id == "a0");
  CHECK(seq.events[1].action_id == "c0:remove");
}

TEST_CASE("recognizer input checks") {
  const auto spec = psr::testing::flat_spec(2);
  Recognizer r(BaselineConfig::defaults(Variant::B2), spec);
  r.step(frame(3, {0, 0}, 1));
  CHECK_THROWS_AS(r.step(frame(3, {0, 0}, 1)), Error);
  CHECK_THROWS_AS(r.step(frame(4, {0, 0, 0}, 1)), Error);
  CHECK(r.step(DetectionFrame{5, 0.5, {}}).empty());

  BaselineConfig bad = BaselineConfig::defaults(Variant::B2);
  bad.decay = 0.0;
  CHECK_THROWS_AS(Recognizer(bad, spec), Error);
}

TEST_CASE("init_recognizer") {
  const auto spec = psr::testing::flat_spec(2);
  const auto first = frame(0, {1, 0}, 0.7);
  const auto r = init_recognizer(BaselineConfig::defaults(Variant::B2), spec, &first);
  CHECK(r.initialized());
  CHECK(r.current() == AssemblyState{1, 0});
  const auto b3 = init_recognizer(BaselineConfig::defaults(Variant::B3), spec, &first);
  CHECK(b3.current() == spec.initial_state);
}

TEST_CASE("B2 and B3 agree on conflict-free streams") {
  const auto spec = bundled_procedure("industreal_car_assembly");
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SimConfig cfg;
    cfg.seed = seed;
    const auto sc = simulate(spec, {}, cfg);
    const auto b2 = run_baseline(BaselineConfig::defaults(Variant::B2), spec, sc.stream, cfg.fps, "r");
    const auto b3 = run_baseline(BaselineConfig::defaults(Variant::B3), spec, sc.stream, cfg.fps, "r");
    CHECK(b2 == b3);
    CHECK(b2.events.size() == spec.actions.size());
  }
}
