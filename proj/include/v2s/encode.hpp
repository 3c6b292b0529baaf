#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "v2s/preprocess.hpp"

namespace v2s {

struct EncoderConfig {
  std::size_t neurons_per_value = 4;
  std::size_t timesteps_per_pair = 3;

  std::size_t input_slots() const noexcept { return 2 * neurons_per_value; }
  friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

/// Charge injected into one input slot at one simulation timestep.
struct InputSpike {
  std::size_t input_index = 0;
  std::size_t time = 0;
  double value = 0.0;

  friend bool operator==(const InputSpike&, const InputSpike&) = default;
};

/// Input spikes sorted by time; every spike time is below `span`.
struct SpikeTrain {
  std::vector<InputSpike> spikes;
  std::size_t span = 0;

  friend bool operator==(const SpikeTrain&, const SpikeTrain&) = default;
};

struct SlotCharge {
  std::size_t offset = 0;
  double value = 0.0;
};

void validate_encoder(const EncoderConfig& cfg);

/// Splits v in [0,1] across two adjacent neurons of `neurons_per_value`
/// (neurons_per_value - 1 equal regions). The two charges sum to one.
std::array<SlotCharge, 2> argyle_encode_value(double v, const EncoderConfig& cfg = {});

/// Pair i = (on_counts[i], off_counts[i]) lands at timestep i * timesteps_per_pair.
/// ON charges use slots [0, npv), OFF charges [npv, 2*npv).
SpikeTrain encode_sample(const FeatureVector& fv, const Normalizer& nz, const EncoderConfig& cfg = {});

/// Encodes already-normalized values laid out as on[0..N) then off[0..N).
SpikeTrain encode_values(const std::vector<double>& normalized, const EncoderConfig& cfg = {});

/// Debug dump, header `input,time,value`.
std::string write_spike_train_csv(const SpikeTrain& train);

}  // namespace v2s
