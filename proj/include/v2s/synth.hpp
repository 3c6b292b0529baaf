#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "v2s/events.hpp"

namespace v2s {

struct Harmonic {
  double multiplier = 1.0;
  double relative_amplitude = 0.0;

  friend bool operator==(const Harmonic&, const Harmonic&) = default;
};

/// A neighbour of the hot pixel that repeats its events with some probability.
struct PatchPixel {
  int dx = 0;
  int dy = 0;
  double probability = 0.0;

  friend bool operator==(const PatchPixel&, const PatchPixel&) = default;
};

/// Parametric model of one tagged device: a piezo voltage signal driving an
/// LED that conducts above a forward threshold.
struct DeviceProfile {
  std::string label;
  double fundamental_hz = 0.0;
  double amplitude_v = 0.0;
  std::vector<Harmonic> harmonics;
  double forward_threshold_v = 1.0;
  double duty_jitter = 0.0;          // std-dev of edge timing as a fraction of one period
  double noise_event_rate_hz = 0.0;  // per active pixel
  std::vector<PatchPixel> patch;

  friend bool operator==(const DeviceProfile&, const DeviceProfile&) = default;
};

struct ProfileSet {
  std::vector<DeviceProfile> classes;
  SensorGeometry sensor{};
};

struct LabeledTrial {
  EventStream stream;
  std::string label;
  std::size_t class_index = 0;
  std::size_t trial = 0;
  TimeUs duration_us = 0;
  Pixel hot_pixel{};
};

struct LabeledEventSet {
  std::vector<LabeledTrial> items;
  std::vector<std::string> class_names;
};

void validate_profile(const DeviceProfile& profile);

/// Piezo voltage at time `t_s` seconds.
double profile_voltage(const DeviceProfile& profile, double t_s);

/// Renders `duration_us` of events for a tag whose LED sits at `hot_pixel`.
/// Deterministic in all arguments.
EventStream synth_device_stream(const DeviceProfile& profile, TimeUs duration_us, Pixel hot_pixel,
                                std::uint64_t seed, SensorGeometry sensor = {});

/// `trials_per_class` streams per profile, class-major order. Each trial's seed
/// and hot pixel are derived from `seed` and the (class, trial) position.
LabeledEventSet synth_dataset(std::span<const DeviceProfile> profiles, std::size_t trials_per_class,
                              TimeUs trial_duration_us, std::uint64_t seed, SensorGeometry sensor = {});

ProfileSet parse_profile_set(std::string_view json_text);
std::string profile_set_to_json(const ProfileSet& set);

/// Five-class desk benchmark: one near-idle class and four devices with
/// well-separated fundamentals.
ProfileSet default_benchmark_profiles();

}  // namespace v2s
