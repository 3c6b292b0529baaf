#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "v2s/events.hpp"

namespace v2s {

inline constexpr TimeUs kDefaultCalibrationWindowUs = 60'000'000;
inline constexpr TimeUs kDefaultBinWidthUs = 50'000;

/// ON/OFF event counts over N consecutive bins of one pixel.
struct FeatureVector {
  std::vector<std::uint32_t> on_counts;
  std::vector<std::uint32_t> off_counts;
  TimeUs bin_width_us = 0;
  std::optional<std::string> label;

  std::size_t n_bins() const noexcept { return on_counts.size(); }
  TimeUs latency_us() const noexcept { return static_cast<TimeUs>(n_bins()) * bin_width_us; }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Min/max count shared by every bin position and both channels.
struct Normalizer {
  std::uint32_t min_count = 0;
  std::uint32_t max_count = 0;

  /// (c - min) / (max - min), clamped to [0,1]; 0 when max == min.
  double scale(std::uint32_t count) const noexcept;

  friend bool operator==(const Normalizer&, const Normalizer&) = default;
};

/// Pixel with the most events in [0, window_us); ties go to the smallest (y, x).
Pixel calibrate_hot_pixel(const EventStream& stream, TimeUs window_us = kDefaultCalibrationWindowUs);

/// Bin k counts events with t in [start + k*width, start + (k+1)*width).
FeatureVector bin_events(const PixelStream& ps, TimeUs bin_width_us, std::size_t n_bins, TimeUs start_us);

/// Windows starting at 0, stride, 2*stride, ... that end no later than
/// `span_us` (the recording length).
std::vector<FeatureVector> segment_samples(const PixelStream& ps, TimeUs bin_width_us, std::size_t n_bins,
                                           TimeUs stride_us, TimeUs span_us);

/// Same, with the span taken as one microsecond past the last event.
std::vector<FeatureVector> segment_samples(const PixelStream& ps, TimeUs bin_width_us, std::size_t n_bins,
                                           TimeUs stride_us);

Normalizer fit_normalizer(std::span<const FeatureVector> train);

/// Scaled values in feature order: on_counts[0..N) followed by off_counts[0..N).
std::vector<double> apply_normalizer(const Normalizer& nz, const FeatureVector& fv);

/// CSV with header `label,bin_width_us,n_bins,on_0..,off_0..`. All vectors
/// must share bin width and bin count.
std::string write_feature_csv(std::span<const FeatureVector> samples);
std::vector<FeatureVector> parse_feature_csv(std::string_view text);

}  // namespace v2s
