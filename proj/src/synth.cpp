#include "v2s/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "json.hpp"

#include "v2s/error.hpp"
#include "v2s/rng.hpp"

namespace v2s {
namespace {

using nlohmann::json;

// Coarse scan resolution per period of the fastest signal component.
constexpr double kSamplesPerPeriod = 64.0;

bool led_on(const DeviceProfile& p, TimeUs t_us) {
  return profile_voltage(p, static_cast<double>(t_us) * 1e-6) > p.forward_threshold_v;
}

struct Edge {
  TimeUs t_us;
  Polarity polarity;
};

// Integer-microsecond LED transitions in [0, duration). The LED state at t=0
// is the initial condition and does not emit an event.
std::vector<Edge> led_edges(const DeviceProfile& p, TimeUs duration_us) {
  double fastest = 1.0;
  for (const auto& h : p.harmonics) fastest = std::max(fastest, h.multiplier);
  const auto step = std::max<TimeUs>(1, static_cast<TimeUs>(1e6 / (p.fundamental_hz * fastest * kSamplesPerPeriod)));

  std::vector<Edge> edges;
  bool state = led_on(p, 0);
  TimeUs prev = 0;
  for (TimeUs t = step;; t += step) {
    const TimeUs u = std::min(t, duration_us - 1);
    if (u <= prev) break;
    const bool s = led_on(p, u);
    if (s != state) {
      // smallest microsecond in (prev, u] that already shows the new state
      TimeUs lo = prev;
      TimeUs hi = u;
      while (hi - lo > 1) {
        const TimeUs mid = lo + (hi - lo) / 2;
        if (led_on(p, mid) == s) hi = mid; else lo = mid;
      }
      edges.push_back({hi, s ? Polarity::on : Polarity::off});
      state = s;
    }
    prev = u;
  }
  return edges;
}

void require(bool ok, const std::string& label, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidProfile, "profile '" + label + "': " + what);
}

template <typename T>
T take(const json& obj, const char* key, T fallback) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : it->get<T>();
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known, const char* where) {
  if (!obj.is_object()) throw Error(ErrorCode::InvalidProfile, std::string(where) + " must be an object");
  for (const auto& item : obj.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      throw Error(ErrorCode::InvalidProfile, std::string(where) + ": unknown field '" + item.key() + "'");
    }
  }
}

}  // namespace

void validate_profile(const DeviceProfile& p) {
  require(!p.label.empty(), p.label, "label must be non-empty");
  require(std::isfinite(p.fundamental_hz) && p.fundamental_hz > 0, p.label, "fundamental_hz must be > 0");
  require(std::isfinite(p.amplitude_v) && p.amplitude_v >= 0, p.label, "amplitude_v must be >= 0");
  require(std::isfinite(p.forward_threshold_v) && p.forward_threshold_v > 0, p.label,
          "forward_threshold_v must be > 0");
  require(std::isfinite(p.duty_jitter) && p.duty_jitter >= 0, p.label, "duty_jitter must be >= 0");
  require(std::isfinite(p.noise_event_rate_hz) && p.noise_event_rate_hz >= 0, p.label,
          "noise_event_rate_hz must be >= 0");
  for (const auto& h : p.harmonics) {
    require(std::isfinite(h.multiplier) && h.multiplier > 0, p.label, "harmonic multiplier must be > 0");
    require(std::isfinite(h.relative_amplitude), p.label, "harmonic amplitude must be finite");
  }
  for (const auto& px : p.patch) {
    require(px.probability >= 0 && px.probability <= 1, p.label, "patch probability must be in [0,1]");
    require(px.dx != 0 || px.dy != 0, p.label, "patch offset (0,0) is the hot pixel itself");
  }
}

double profile_voltage(const DeviceProfile& p, double t_s) {
  const double w = 2.0 * std::numbers::pi * p.fundamental_hz * t_s;
  double v = std::sin(w);
  for (const auto& h : p.harmonics) v += h.relative_amplitude * std::sin(h.multiplier * w);
  return p.amplitude_v * v;
}

EventStream synth_device_stream(const DeviceProfile& profile, TimeUs duration_us, Pixel hot_pixel,
                                std::uint64_t seed, SensorGeometry sensor) {
  validate_profile(profile);
  if (duration_us <= 0) throw Error(ErrorCode::InvalidProfile, "duration_us must be > 0");
  if (!sensor.contains(hot_pixel)) throw Error(ErrorCode::OutOfBoundsPixel, "hot pixel outside sensor");

  Rng rng(seed);
  std::vector<Edge> edges = led_edges(profile, duration_us);

  if (profile.duty_jitter > 0 && !edges.empty()) {
    std::normal_distribution<double> jitter(0.0, profile.duty_jitter * 1e6 / profile.fundamental_hz);
    TimeUs floor_t = 0;
    for (auto& e : edges) {
      auto t = e.t_us + static_cast<TimeUs>(std::llround(jitter(rng)));
      t = std::clamp<TimeUs>(t, floor_t, duration_us - 1);
      e.t_us = t;
      floor_t = t;  // keeps ON/OFF alternation intact
    }
  }

  struct Tagged {
    Event event;
    std::size_t seq;
  };
  std::vector<Tagged> all;
  all.reserve(edges.size() * (1 + profile.patch.size()));
  auto emit = [&](TimeUs t, Pixel px, Polarity pol) { all.push_back({{t, px.x, px.y, pol}, all.size()}); };

  std::vector<Pixel> active{hot_pixel};
  for (const auto& e : edges) emit(e.t_us, hot_pixel, e.polarity);

  for (const auto& patch : profile.patch) {
    const auto x = static_cast<std::int64_t>(hot_pixel.x) + patch.dx;
    const auto y = static_cast<std::int64_t>(hot_pixel.y) + patch.dy;
    if (x < 0 || y < 0 || x >= sensor.width || y >= sensor.height) continue;
    const Pixel px{static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y)};
    active.push_back(px);
    std::bernoulli_distribution fires(patch.probability);
    for (const auto& e : edges) {
      if (fires(rng)) emit(e.t_us, px, e.polarity);
    }
  }

  if (profile.noise_event_rate_hz > 0) {
    std::exponential_distribution<double> gap_s(profile.noise_event_rate_hz);
    std::bernoulli_distribution on(0.5);
    for (const Pixel px : active) {
      double t_s = 0.0;
      for (;;) {
        t_s += gap_s(rng);
        const auto t = static_cast<TimeUs>(t_s * 1e6);
        if (t >= duration_us) break;
        emit(t, px, on(rng) ? Polarity::on : Polarity::off);
      }
    }
  }

  std::sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) {
    if (a.event.t_us != b.event.t_us) return a.event.t_us < b.event.t_us;
    if (a.event.y != b.event.y) return a.event.y < b.event.y;
    if (a.event.x != b.event.x) return a.event.x < b.event.x;
    return a.seq < b.seq;
  });
  std::vector<Event> events;
  events.reserve(all.size());
  for (const auto& t : all) events.push_back(t.event);
  return EventStream(sensor, std::move(events));
}

LabeledEventSet synth_dataset(std::span<const DeviceProfile> profiles, std::size_t trials_per_class,
                              TimeUs trial_duration_us, std::uint64_t seed, SensorGeometry sensor) {
  if (profiles.empty()) throw Error(ErrorCode::InvalidProfile, "no profiles");
  if (trials_per_class == 0) throw Error(ErrorCode::InvalidProfile, "trials_per_class must be >= 1");
  for (const auto& p : profiles) validate_profile(p);

  int margin = 1;
  for (const auto& p : profiles) {
    for (const auto& px : p.patch) margin = std::max({margin, std::abs(px.dx) + 1, std::abs(px.dy) + 1});
  }
  if (sensor.width <= 2u * margin || sensor.height <= 2u * margin) {
    throw Error(ErrorCode::InvalidProfile, "sensor too small for patch layout");
  }

  LabeledEventSet set;
  for (const auto& p : profiles) set.class_names.push_back(p.label);
  for (std::size_t c = 0; c < profiles.size(); ++c) {
    for (std::size_t trial = 0; trial < trials_per_class; ++trial) {
      Rng placement(derive_seed(seed, {c, trial, 1}));
      const Pixel hot{static_cast<std::uint32_t>(margin + uniform_index(placement, sensor.width - 2 * margin)),
                      static_cast<std::uint32_t>(margin + uniform_index(placement, sensor.height - 2 * margin))};
      LabeledTrial item;
      item.stream = synth_device_stream(profiles[c], trial_duration_us, hot, derive_seed(seed, {c, trial, 0}), sensor);
      item.label = profiles[c].label;
      item.class_index = c;
      item.trial = trial;
      item.duration_us = trial_duration_us;
      item.hot_pixel = hot;
      set.items.push_back(std::move(item));
    }
  }
  return set;
}

ProfileSet parse_profile_set(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidProfile, std::string("profile JSON: ") + e.what());
  }
  ProfileSet set;
  try {
    reject_unknown(doc, {"classes", "sensor_width", "sensor_height"}, "profile set");
    set.sensor.width = take<std::uint32_t>(doc, "sensor_width", set.sensor.width);
    set.sensor.height = take<std::uint32_t>(doc, "sensor_height", set.sensor.height);
    if (!doc.contains("classes") || !doc["classes"].is_array()) {
      throw Error(ErrorCode::InvalidProfile, "profile set needs a 'classes' array");
    }
    for (const auto& c : doc["classes"]) {
      reject_unknown(c,
                     {"label", "fundamental_hz", "amplitude_v", "harmonics", "forward_threshold_v", "duty_jitter",
                      "noise_event_rate_hz", "patch"},
                     "class");
      DeviceProfile p;
      p.label = c.at("label").get<std::string>();
      p.fundamental_hz = c.at("fundamental_hz").get<double>();
      p.amplitude_v = c.at("amplitude_v").get<double>();
      p.forward_threshold_v = take<double>(c, "forward_threshold_v", p.forward_threshold_v);
      p.duty_jitter = take<double>(c, "duty_jitter", 0.0);
      p.noise_event_rate_hz = take<double>(c, "noise_event_rate_hz", 0.0);
      for (const auto& h : take<json>(c, "harmonics", json::array())) {
        reject_unknown(h, {"multiplier", "relative_amplitude"}, "harmonic");
        p.harmonics.push_back({h.at("multiplier").get<double>(), h.at("relative_amplitude").get<double>()});
      }
      for (const auto& px : take<json>(c, "patch", json::array())) {
        reject_unknown(px, {"dx", "dy", "probability"}, "patch");
        p.patch.push_back({px.at("dx").get<int>(), px.at("dy").get<int>(), px.at("probability").get<double>()});
      }
      validate_profile(p);
      set.classes.push_back(std::move(p));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidProfile, std::string("profile JSON: ") + e.what());
  }
  if (set.classes.empty()) throw Error(ErrorCode::InvalidProfile, "profile set has no classes");
  return set;
}

std::string profile_set_to_json(const ProfileSet& set) {
  json classes = json::array();
  for (const auto& p : set.classes) {
    json harmonics = json::array();
    for (const auto& h : p.harmonics) harmonics.push_back({{"multiplier", h.multiplier}, {"relative_amplitude", h.relative_amplitude}});
    json patch = json::array();
    for (const auto& px : p.patch) patch.push_back({{"dx", px.dx}, {"dy", px.dy}, {"probability", px.probability}});
    classes.push_back({{"label", p.label},
                       {"fundamental_hz", p.fundamental_hz},
                       {"amplitude_v", p.amplitude_v},
                       {"harmonics", harmonics},
                       {"forward_threshold_v", p.forward_threshold_v},
                       {"duty_jitter", p.duty_jitter},
                       {"noise_event_rate_hz", p.noise_event_rate_hz},
                       {"patch", patch}});
  }
  json doc{{"sensor_width", set.sensor.width}, {"sensor_height", set.sensor.height}, {"classes", classes}};
  return doc.dump(2) + "\n";
}

ProfileSet default_benchmark_profiles() {
  const std::vector<PatchPixel> patch{{1, 0, 0.6}, {-1, 0, 0.6}, {0, 1, 0.5}, {0, -1, 0.5}, {1, 1, 0.2}};
  auto device = [&](std::string label, double hz, double amplitude, std::vector<Harmonic> harmonics, double noise) {
    DeviceProfile p;
    p.label = std::move(label);
    p.fundamental_hz = hz;
    p.amplitude_v = amplitude;
    p.harmonics = std::move(harmonics);
    p.forward_threshold_v = 1.8;
    p.duty_jitter = 0.03;
    p.noise_event_rate_hz = noise;
    p.patch = patch;
    return p;
  };
  ProfileSet set;
  // A second, slightly detuned mode from the nested spring makes the LED
  // burst at the beat frequency; short windows see only part of a burst.
  set.classes = {
      device("idle", 12.0, 1.9, {{1.09, 0.5}}, 4.0),
      device("inflator_blower", 30.0, 2.4, {{1.05, 0.6}}, 4.0),
      device("cordless_drill", 55.0, 2.6, {{1.04, 0.6}, {2.0, 0.2}}, 4.0),
      device("handheld_vacuum", 90.0, 2.5, {{1.03, 0.6}}, 4.0),
      device("palm_sander", 140.0, 2.8, {{1.02, 0.5}, {3.0, 0.15}}, 4.0),
  };
  return set;
}

}  // namespace v2s
