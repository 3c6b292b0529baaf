#include "v2s/preprocess.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include "v2s/error.hpp"

namespace v2s {

double Normalizer::scale(std::uint32_t count) const noexcept {
  if (max_count <= min_count) return 0.0;
  if (count <= min_count) return 0.0;
  if (count >= max_count) return 1.0;
  return static_cast<double>(count - min_count) / static_cast<double>(max_count - min_count);
}

Pixel calibrate_hot_pixel(const EventStream& stream, TimeUs window_us) {
  // keyed by (y, x) so the first maximum in key order wins ties
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> counts;
  for (const Event& e : stream.events()) {
    if (e.t_us >= window_us) break;
    ++counts[{e.y, e.x}];
  }
  if (counts.empty()) throw Error(ErrorCode::EmptyWindow, "no events in calibration window");
  auto best = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return {best->first.second, best->first.first};
}

FeatureVector bin_events(const PixelStream& ps, TimeUs bin_width_us, std::size_t n_bins, TimeUs start_us) {
  if (bin_width_us <= 0) throw Error(ErrorCode::OutOfRange, "bin_width_us must be > 0");
  if (n_bins == 0) throw Error(ErrorCode::OutOfRange, "n_bins must be >= 1");
  FeatureVector fv;
  fv.on_counts.assign(n_bins, 0);
  fv.off_counts.assign(n_bins, 0);
  fv.bin_width_us = bin_width_us;
  const TimeUs end_us = start_us + bin_width_us * static_cast<TimeUs>(n_bins);

  auto first = std::lower_bound(ps.events.begin(), ps.events.end(), start_us,
                                [](const PixelEvent& e, TimeUs t) { return e.t_us < t; });
  for (auto it = first; it != ps.events.end() && it->t_us < end_us; ++it) {
    const auto k = static_cast<std::size_t>((it->t_us - start_us) / bin_width_us);
    ++(it->polarity == Polarity::on ? fv.on_counts : fv.off_counts)[k];
  }
  return fv;
}

std::vector<FeatureVector> segment_samples(const PixelStream& ps, TimeUs bin_width_us, std::size_t n_bins,
                                           TimeUs stride_us, TimeUs span_us) {
  if (stride_us <= 0) throw Error(ErrorCode::OutOfRange, "stride_us must be > 0");
  if (bin_width_us <= 0 || n_bins == 0) throw Error(ErrorCode::OutOfRange, "bad bin geometry");
  const TimeUs window = bin_width_us * static_cast<TimeUs>(n_bins);
  std::vector<FeatureVector> out;
  for (TimeUs start = 0; start + window <= span_us; start += stride_us) {
    out.push_back(bin_events(ps, bin_width_us, n_bins, start));
  }
  return out;
}

std::vector<FeatureVector> segment_samples(const PixelStream& ps, TimeUs bin_width_us, std::size_t n_bins,
                                           TimeUs stride_us) {
  const TimeUs span = ps.events.empty() ? 0 : ps.events.back().t_us + 1;
  return segment_samples(ps, bin_width_us, n_bins, stride_us, span);
}

Normalizer fit_normalizer(std::span<const FeatureVector> train) {
  bool any = false;
  Normalizer nz{};
  for (const auto& fv : train) {
    for (const auto* channel : {&fv.on_counts, &fv.off_counts}) {
      for (auto c : *channel) {
        if (!any) {
          nz = {c, c};
          any = true;
        }
        nz.min_count = std::min(nz.min_count, c);
        nz.max_count = std::max(nz.max_count, c);
      }
    }
  }
  if (!any) throw Error(ErrorCode::EmptyTrainingSet, "no counts to fit normalizer");
  return nz;
}

std::vector<double> apply_normalizer(const Normalizer& nz, const FeatureVector& fv) {
  std::vector<double> out;
  out.reserve(fv.on_counts.size() + fv.off_counts.size());
  for (auto c : fv.on_counts) out.push_back(nz.scale(c));
  for (auto c : fv.off_counts) out.push_back(nz.scale(c));
  return out;
}

std::string write_feature_csv(std::span<const FeatureVector> samples) {
  const std::size_t n = samples.empty() ? 0 : samples.front().n_bins();
  std::ostringstream out;
  out << "label,bin_width_us,n_bins";
  for (std::size_t i = 0; i < n; ++i) out << ",on_" << i;
  for (std::size_t i = 0; i < n; ++i) out << ",off_" << i;
  out << '\n';
  for (const auto& fv : samples) {
    if (fv.n_bins() != n || fv.off_counts.size() != n || fv.bin_width_us != samples.front().bin_width_us) {
      throw Error(ErrorCode::LengthMismatch, "feature vectors differ in geometry");
    }
    if (fv.label && fv.label->find_first_of(",\n") != std::string::npos) {
      throw Error(ErrorCode::MalformedLine, "label contains a separator");
    }
    out << fv.label.value_or("") << ',' << fv.bin_width_us << ',' << n;
    for (auto c : fv.on_counts) out << ',' << c;
    for (auto c : fv.off_counts) out << ',' << c;
    out << '\n';
  }
  return out.str();
}

std::vector<FeatureVector> parse_feature_csv(std::string_view text) {
  auto split = [](std::string_view line) {
    std::vector<std::string_view> f;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        f.push_back(line.substr(start, i - start));
        start = i + 1;
      }
    }
    return f;
  };
  auto to_int = [](std::string_view s, auto& out, std::size_t line_no) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size()) {
      throw Error(ErrorCode::MalformedLine, "feature line " + std::to_string(line_no) + ": bad integer");
    }
  };

  std::vector<FeatureVector> out;
  std::size_t line_no = 0;
  std::size_t header_bins = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    auto f = split(line);
    if (line_no == 1) {
      if (f.size() < 5 || (f.size() - 3) % 2 != 0 || f[0] != "label" || f[1] != "bin_width_us" || f[2] != "n_bins") {
        throw Error(ErrorCode::MalformedLine, "bad feature CSV header");
      }
      header_bins = (f.size() - 3) / 2;
      continue;
    }
    if (f.size() != 3 + 2 * header_bins) throw Error(ErrorCode::MalformedLine, "feature line " + std::to_string(line_no) + ": field count");
    FeatureVector fv;
    std::size_t n = 0;
    to_int(f[1], fv.bin_width_us, line_no);
    to_int(f[2], n, line_no);
    if (n != header_bins) throw Error(ErrorCode::MalformedLine, "feature line " + std::to_string(line_no) + ": n_bins");
    if (!f[0].empty()) fv.label = std::string(f[0]);
    fv.on_counts.resize(n);
    fv.off_counts.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      to_int(f[3 + i], fv.on_counts[i], line_no);
      to_int(f[3 + n + i], fv.off_counts[i], line_no);
    }
    out.push_back(std::move(fv));
  }
  if (line_no == 0) throw Error(ErrorCode::MalformedLine, "empty feature CSV");
  return out;
}

}  // namespace v2s
