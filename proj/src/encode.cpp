#include "v2s/encode.hpp"

#include <cmath>
#include <sstream>

#include "v2s/error.hpp"

namespace v2s {

void validate_encoder(const EncoderConfig& cfg) {
  if (cfg.neurons_per_value < 2) throw Error(ErrorCode::OutOfRange, "neurons_per_value must be >= 2");
  if (cfg.timesteps_per_pair < 1) throw Error(ErrorCode::OutOfRange, "timesteps_per_pair must be >= 1");
}

std::array<SlotCharge, 2> argyle_encode_value(double v, const EncoderConfig& cfg) {
  validate_encoder(cfg);
  if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::OutOfRange, "value " + std::to_string(v) + " outside [0,1]");
  const auto regions = static_cast<double>(cfg.neurons_per_value - 1);
  const double scaled = v * regions;
  const double k = std::min(std::floor(scaled), regions - 1.0);
  const double frac = scaled - k;
  const auto slot = static_cast<std::size_t>(k);
  return {SlotCharge{slot, 1.0 - frac}, SlotCharge{slot + 1, frac}};
}

SpikeTrain encode_values(const std::vector<double>& normalized, const EncoderConfig& cfg) {
  validate_encoder(cfg);
  if (normalized.size() % 2 != 0) throw Error(ErrorCode::LengthMismatch, "expected ON and OFF halves");
  const std::size_t n = normalized.size() / 2;
  SpikeTrain train;
  train.span = n * cfg.timesteps_per_pair;
  train.spikes.reserve(4 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t t = i * cfg.timesteps_per_pair;
    for (std::size_t channel = 0; channel < 2; ++channel) {
      const auto base = channel * cfg.neurons_per_value;
      for (const auto& c : argyle_encode_value(normalized[channel * n + i], cfg)) {
        train.spikes.push_back({base + c.offset, t, c.value});
      }
    }
  }
  return train;
}

SpikeTrain encode_sample(const FeatureVector& fv, const Normalizer& nz, const EncoderConfig& cfg) {
  if (fv.on_counts.size() != fv.off_counts.size()) throw Error(ErrorCode::LengthMismatch, "ON/OFF bin counts differ");
  return encode_values(apply_normalizer(nz, fv), cfg);
}

std::string write_spike_train_csv(const SpikeTrain& train) {
  std::ostringstream out;
  out.precision(17);
  out << "input,time,value\n";
  for (const auto& s : train.spikes) out << s.input_index << ',' << s.time << ',' << s.value << '\n';
  return out.str();
}

}  // namespace v2s
