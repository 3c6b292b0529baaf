// v2s: command-line front end for the event-camera vibration pipeline.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "v2s/error.hpp"
#include "v2s/harness.hpp"

namespace fs = std::filesystem;
using namespace v2s;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitInternal = 3;

TimeUs seconds_to_us(double s) { return static_cast<TimeUs>(std::llround(s * 1e6)); }
TimeUs ms_to_us(double ms) { return static_cast<TimeUs>(std::llround(ms * 1e3)); }

template <typename T>
T parse_pair(const std::string& text, char sep, const char* what) {
  const auto pos = text.find(sep);
  T out{};
  try {
    if (pos == std::string::npos) throw std::invalid_argument(text);
    std::size_t used = 0;
    const auto a = std::stoul(text.substr(0, pos), &used);
    if (used != pos) throw std::invalid_argument(text);
    const auto rest = text.substr(pos + 1);
    const auto b = std::stoul(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(text);
    out = T{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::OutOfRange, std::string("cannot parse ") + what + " '" + text + "'");
  }
  return out;
}

std::vector<std::size_t> parse_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      const auto v = std::stoul(item, &used);
      if (used != item.size() || v == 0) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::OutOfRange, "bad bin count '" + item + "'");
    }
  }
  if (out.empty()) throw Error(ErrorCode::OutOfRange, "empty bin list");
  return out;
}

EvolutionConfig load_config(const std::string& path, std::optional<std::uint64_t> seed) {
  EvolutionConfig cfg = path.empty() ? EvolutionConfig{} : parse_evolution_config(read_text_file(path));
  if (seed) cfg.master_seed = *seed;
  return cfg;
}

void log_generation(const GenerationRecord& g) {
  std::fprintf(stderr, "gen %4zu  best %.4f  mean %.4f  neurons %zu  synapses %zu\n", g.generation, g.best_fitness,
               g.mean_fitness, g.best.network.neurons.size(), g.best.network.synapses.size());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vibration-tag event-camera classification pipeline"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic event dataset");
  std::string profiles_path;
  std::size_t trials = 5;
  double duration_s = 60.0;
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  synth->add_option("--profiles", profiles_path, "Profile set JSON (built-in benchmark when omitted)");
  synth->add_option("--trials", trials, "Trials per class")->check(CLI::PositiveNumber);
  synth->add_option("--duration-s", duration_s, "Trial duration in seconds")->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_seed, "Master seed");
  synth->add_option("--out", synth_out, "Output directory")->required();

  // calibrate
  auto* calibrate = app.add_subcommand("calibrate", "Find the hot pixel of an event stream");
  std::string stream_path;
  double window_s = 60.0;
  std::string sensor_text = "1280x720";
  calibrate->add_option("--stream", stream_path, "Event CSV")->required();
  calibrate->add_option("--window-s", window_s, "Calibration window in seconds")->check(CLI::PositiveNumber);
  calibrate->add_option("--sensor", sensor_text, "Sensor size WxH");

  // featurize
  auto* featurize = app.add_subcommand("featurize", "Bin one pixel of a stream into feature vectors");
  std::string pixel_text;
  double bin_ms = 50.0;
  std::size_t bins = 50;
  std::optional<double> stride_ms;
  std::optional<double> span_s;
  std::string feature_out;
  featurize->add_option("--stream", stream_path, "Event CSV")->required();
  featurize->add_option("--pixel", pixel_text, "Pixel x,y")->required();
  featurize->add_option("--bin-ms", bin_ms, "Bin width in milliseconds")->check(CLI::PositiveNumber);
  featurize->add_option("--bins", bins, "Bins per sample")->check(CLI::PositiveNumber);
  featurize->add_option("--stride-ms", stride_ms, "Window stride in milliseconds (default: window length)");
  featurize->add_option("--duration-s", span_s, "Recording length (default: last event + 1 us)");
  featurize->add_option("--sensor", sensor_text, "Sensor size WxH");
  featurize->add_option("--out", feature_out, "Feature CSV")->required();

  // train
  auto* train = app.add_subcommand("train", "Evolve a classifier on a dataset directory");
  std::string data_dir;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string train_out;
  train->add_option("--data", data_dir, "Dataset directory")->required();
  train->add_option("--bins", bins, "Bins per sample")->check(CLI::PositiveNumber);
  train->add_option("--bin-ms", bin_ms, "Bin width in milliseconds")->check(CLI::PositiveNumber);
  train->add_option("--stride-ms", stride_ms, "Window stride in milliseconds (default: window length)");
  train->add_option("--config", config_path, "Evolution config JSON");
  train->add_option("--seed", seed, "Master seed (overrides the config)");
  train->add_option("--out", train_out, "Output directory")->required();
  bool quiet = false;
  train->add_flag("--quiet", quiet, "No per-generation log");

  // eval
  auto* eval = app.add_subcommand("eval", "Score a trained network on a dataset directory");
  std::string network_path;
  std::string model_path;
  eval->add_option("--network", network_path, "Network JSON")->required();
  eval->add_option("--data", data_dir, "Dataset directory")->required();
  eval->add_option("--model", model_path, "Model metadata (default: model.json next to the network)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Latency/accuracy sweep over bin counts");
  std::string bin_list = "5,10,50,100";
  std::string sweep_out;
  bool concurrent = false;
  sweep->add_option("--data", data_dir, "Dataset directory")->required();
  sweep->add_option("--bins", bin_list, "Comma-separated bin counts");
  sweep->add_option("--bin-ms", bin_ms, "Bin width in milliseconds")->check(CLI::PositiveNumber);
  sweep->add_option("--config", config_path, "Evolution config JSON");
  sweep->add_option("--seed", seed, "Master seed (overrides the config)");
  sweep->add_option("--out", sweep_out, "Sweep CSV")->required();
  sweep->add_flag("--concurrent", concurrent, "Run sweep points concurrently");
  sweep->add_flag("--quiet", quiet, "No per-generation log");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  try {
    if (*synth) {
      const ProfileSet profiles =
          profiles_path.empty() ? default_benchmark_profiles() : parse_profile_set(read_text_file(profiles_path));
      const auto set = synth_dataset(profiles.classes, trials, seconds_to_us(duration_s), synth_seed, profiles.sensor);
      write_dataset(synth_out, set);
      std::printf("wrote %zu trials (%zu classes) to %s\n", set.items.size(), set.class_names.size(), synth_out.c_str());
    } else if (*calibrate) {
      const auto sensor = parse_pair<SensorGeometry>(sensor_text, 'x', "sensor");
      const auto stream = read_event_file(stream_path, sensor);
      const Pixel hot = calibrate_hot_pixel(stream, seconds_to_us(window_s));
      std::printf("%u,%u\n", hot.x, hot.y);
    } else if (*featurize) {
      const auto sensor = parse_pair<SensorGeometry>(sensor_text, 'x', "sensor");
      const auto pixel = parse_pair<Pixel>(pixel_text, ',', "pixel");
      const auto stream = read_event_file(stream_path, sensor);
      const auto ps = filter_pixel(stream, pixel);
      const TimeUs width = ms_to_us(bin_ms);
      const TimeUs stride = stride_ms ? ms_to_us(*stride_ms) : width * static_cast<TimeUs>(bins);
      const auto samples = span_s ? segment_samples(ps, width, bins, stride, seconds_to_us(*span_s))
                                  : segment_samples(ps, width, bins, stride);
      if (samples.empty()) throw Error(ErrorCode::EmptyWindow, "stream shorter than one sample window");
      write_text_file(feature_out, write_feature_csv(samples));
      std::printf("wrote %zu samples to %s\n", samples.size(), feature_out.c_str());
    } else if (*train) {
      const auto dataset = read_dataset(data_dir);
      PipelineConfig pipeline;
      pipeline.bin_width_us = ms_to_us(bin_ms);
      pipeline.n_bins = bins;
      if (stride_ms) pipeline.stride_us = ms_to_us(*stride_ms);
      const auto cfg = load_config(config_path, seed);
      GenerationCallback cb;
      if (!quiet) cb = log_generation;
      const auto result = run_experiment(dataset, pipeline, cfg, cb);
      write_experiment(train_out, result, cfg.checkpoint_interval);
      std::printf("latency_ms %g  bins %zu\n", static_cast<double>(result.latency_us()) / 1000.0, bins);
      std::printf("train macro-F1 %.2f%%\n", 100.0 * result.train_f1);
      std::printf("holdout macro-F1 %.2f%%\n", 100.0 * result.validation_f1);
      std::printf("%s", result.confusion.to_csv().c_str());
    } else if (*eval) {
      const fs::path net_file(network_path);
      const fs::path meta_file = model_path.empty() ? net_file.parent_path() / "model.json" : fs::path(model_path);
      const auto net = parse_network_document(read_text_file(net_file));
      const auto meta = model_metadata_from_json(nlohmann::json::parse(read_text_file(meta_file)));
      const auto dataset = read_dataset(data_dir);
      const auto cm = evaluate_model(net, meta, dataset);
      std::printf("macro-F1 %.2f%%\n", 100.0 * macro_f1(cm));
      std::printf("%s", cm.to_csv().c_str());
    } else if (*sweep) {
      const auto dataset = read_dataset(data_dir);
      const auto counts = parse_list(bin_list);
      PipelineConfig base;
      base.bin_width_us = ms_to_us(bin_ms);
      const auto cfg = load_config(config_path, seed);
      std::function<void(std::size_t, const GenerationRecord&)> progress;
      if (!quiet) progress = [](std::size_t n, const GenerationRecord& g) {
        std::fprintf(stderr, "[bins %zu] ", n);
        log_generation(g);
      };
      const auto result = latency_sweep(dataset, base, counts, cfg, concurrent, progress);
      const auto csv = result.to_csv();
      write_text_file(sweep_out, csv);
      std::printf("%s", csv.c_str());
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kExitInternal;
  }
  return 0;
}
