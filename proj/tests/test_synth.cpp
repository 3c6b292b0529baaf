#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "v2s/error.hpp"
#include "v2s/harness.hpp"
#include "v2s/synth.hpp"

using namespace v2s;

namespace {

DeviceProfile sine(double hz, double amplitude, double threshold = 1.0) {
  DeviceProfile p;
  p.label = "tone";
  p.fundamental_hz = hz;
  p.amplitude_v = amplitude;
  p.forward_threshold_v = threshold;
  return p;
}

std::pair<std::size_t, std::size_t> on_off(const EventStream& s, Pixel px) {
  std::size_t on = 0, off = 0;
  for (const auto& e : s.events()) {
    if (e.pixel() == px) (e.polarity == Polarity::on ? on : off)++;
  }
  return {on, off};
}

}  // namespace

TEST_CASE("60 Hz tone at twice threshold gives one edge pair per period") {
  const Pixel hot{10, 10};
  const auto s = synth_device_stream(sine(60.0, 2.0), 1'000'000, hot, 1);
  // sin(x) > 1/2 on (pi/6, 5pi/6) of every period: one rising and one falling crossing
  CHECK(on_off(s, hot) == std::pair<std::size_t, std::size_t>{60, 60});
  CHECK(s.events().front().t_us == 1389);  // ceil(1e6 / (12 * 60))
  CHECK(s.events().front().polarity == Polarity::on);
}

TEST_CASE("edge count equals 2f per second at integer periods") {
  for (double hz : {5.0, 30.0, 55.0, 140.0}) {
    const auto s = synth_device_stream(sine(hz, 3.0), 2'000'000, {0, 0}, 3);
    const auto [on, off] = on_off(s, {0, 0});
    CHECK(on == static_cast<std::size_t>(2 * hz));
    CHECK(off == static_cast<std::size_t>(2 * hz));
  }
}

TEST_CASE("sub-threshold tone never conducts") {
  CHECK(synth_device_stream(sine(60.0, 0.9), 1'000'000, {5, 5}, 1).empty());
}

TEST_CASE("synthesis is deterministic and seed-sensitive") {
  auto p = default_benchmark_profiles().classes[2];
  const auto a = synth_device_stream(p, 500'000, {40, 40}, 99);
  const auto b = synth_device_stream(p, 500'000, {40, 40}, 99);
  CHECK(write_event_stream(a) == write_event_stream(b));
  CHECK(write_event_stream(a) != write_event_stream(synth_device_stream(p, 500'000, {40, 40}, 100)));
}

TEST_CASE("ON and OFF alternate at the hot pixel when noise is off") {
  auto p = default_benchmark_profiles().classes[3];
  p.noise_event_rate_hz = 0.0;
  const Pixel hot{100, 50};
  const auto s = synth_device_stream(p, 3'000'000, hot, 5);
  std::optional<Polarity> last;
  std::size_t on = 0, off = 0;
  for (const auto& e : s.events()) {
    if (e.pixel() != hot) continue;
    if (last) CHECK(e.polarity != *last);
    last = e.polarity;
    (e.polarity == Polarity::on ? on : off)++;
  }
  CHECK(on > 0);
  CHECK((on > off ? on - off : off - on) <= 1);
}

TEST_CASE("patch pixels only copy hot-pixel events") {
  auto p = sine(50.0, 2.0);
  p.patch = {{1, 0, 1.0}, {0, 1, 0.0}};
  const auto s = synth_device_stream(p, 1'000'000, {3, 3}, 8, {8, 8});
  CHECK(on_off(s, {4, 3}) == on_off(s, {3, 3}));
  CHECK(on_off(s, {3, 4}) == std::pair<std::size_t, std::size_t>{0, 0});
}

TEST_CASE("patch offsets off the sensor are dropped") {
  auto p = sine(50.0, 2.0);
  p.patch = {{-1, 0, 1.0}};
  const auto s = synth_device_stream(p, 200'000, {0, 0}, 8, {4, 4});
  for (const auto& e : s.events()) CHECK(e.pixel() == Pixel{0, 0});
}

TEST_CASE("invalid profiles are rejected") {
  auto expect_invalid = [](DeviceProfile p) {
    try {
      synth_device_stream(p, 1000, {0, 0}, 1);
      FAIL("accepted invalid profile");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidProfile);
    }
  };
  expect_invalid(sine(0.0, 1.0));
  expect_invalid(sine(10.0, 1.0, 0.0));
  expect_invalid(sine(10.0, -1.0));
  auto bad_patch = sine(10.0, 1.0);
  bad_patch.patch = {{1, 0, 1.5}};
  expect_invalid(bad_patch);
  try {
    synth_device_stream(sine(10.0, 2.0), 0, {0, 0}, 1);
    FAIL("accepted zero duration");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidProfile);
  }
}

TEST_CASE("synth_dataset sizes and labels") {
  const auto profiles = default_benchmark_profiles();
  const auto set = synth_dataset(profiles.classes, 5, 200'000, 4, profiles.sensor);
  CHECK(set.items.size() == 25);
  CHECK(set.class_names.size() == 5);
  for (const auto& item : set.items) CHECK(item.label == set.class_names[item.class_index]);

  const auto one = synth_dataset(std::span(profiles.classes).first(1), 1, 200'000, 4, profiles.sensor);
  CHECK(one.items.size() == 1);
}

TEST_CASE("different master seeds change streams but not labels") {
  const auto profiles = default_benchmark_profiles();
  const auto a = synth_dataset(profiles.classes, 2, 300'000, 1, profiles.sensor);
  const auto b = synth_dataset(profiles.classes, 2, 300'000, 2, profiles.sensor);
  REQUIRE(a.items.size() == b.items.size());
  bool any_different = false;
  for (std::size_t i = 0; i < a.items.size(); ++i) {
    CHECK(a.items[i].label == b.items[i].label);
    any_different |= !(a.items[i].stream == b.items[i].stream);
  }
  CHECK(any_different);
  const auto again = synth_dataset(profiles.classes, 2, 300'000, 1, profiles.sensor);
  for (std::size_t i = 0; i < a.items.size(); ++i) CHECK(a.items[i].stream == again.items[i].stream);
}

TEST_CASE("benchmark classes are separable by a stump on window ON counts") {
  // Per-class range of ON counts per 2.5 s window at the calibrated pixel.
  const auto profiles = default_benchmark_profiles();
  const auto set = synth_dataset(profiles.classes, 2, 20'000'000, 21, profiles.sensor);
  PipelineConfig pipeline;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> range(set.class_names.size(), {UINT32_MAX, 0});
  for (const auto& trial : set.items) {
    for (const auto& fv : featurize_trial(trial, pipeline)) {
      std::uint32_t on = 0;
      for (auto c : fv.on_counts) on += c;
      auto& r = range[trial.class_index];
      r = {std::min(r.first, on), std::max(r.second, on)};
    }
  }
  auto order = range;
  std::sort(order.begin(), order.end());
  for (std::size_t i = 1; i < order.size(); ++i) CHECK(order[i - 1].second < order[i].first);
}

TEST_CASE("profile set JSON round trip and strictness") {
  const auto set = default_benchmark_profiles();
  const auto parsed = parse_profile_set(profile_set_to_json(set));
  CHECK(parsed.classes == set.classes);
  CHECK(parsed.sensor == set.sensor);

  const auto minimal = parse_profile_set(R"({"classes":[{"label":"a","fundamental_hz":10,"amplitude_v":2}]})");
  CHECK(minimal.classes.size() == 1);
  CHECK(minimal.classes[0].harmonics.empty());

  CHECK_THROWS_AS(parse_profile_set(R"({"classes":[{"label":"a","fundamental_hz":10,"amplitude_v":2,"colour":1}]})"),
                  Error);
  CHECK_THROWS_AS(parse_profile_set(R"({"classes":[]})"), Error);
  CHECK_THROWS_AS(parse_profile_set("not json"), Error);
}
