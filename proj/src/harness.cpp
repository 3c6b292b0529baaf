#include "v2s/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <map>

#include "v2s/error.hpp"
#include "v2s/rng.hpp"

namespace v2s {
namespace {

using nlohmann::json;

std::string trial_file_name(const LabeledTrial& t) {
  return t.label + "_t" + std::to_string(t.trial) + ".csv";
}

}  // namespace

TrialSplit split_dataset(std::span<const std::size_t> trial_classes, std::size_t class_count, double train_fraction,
                         std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::OutOfRange, "train_fraction must lie in (0,1)");
  }
  std::vector<std::vector<std::size_t>> by_class(class_count);
  for (std::size_t i = 0; i < trial_classes.size(); ++i) {
    if (trial_classes[i] >= class_count) throw Error(ErrorCode::ClassOutOfRange, "trial class outside class list");
    by_class[trial_classes[i]].push_back(i);
  }
  TrialSplit split;
  for (std::size_t c = 0; c < class_count; ++c) {
    auto& trials = by_class[c];
    if (trials.empty()) throw Error(ErrorCode::ClassWithoutTrials, "class " + std::to_string(c) + " has no trials");
    Rng rng(derive_seed(seed, {c}));
    std::shuffle(trials.begin(), trials.end(), rng);
    const std::size_t n = trials.size();
    std::size_t n_train = n;
    if (n > 1) {
      n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
      n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
    }
    split.train.insert(split.train.end(), trials.begin(), trials.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.validation.insert(split.validation.end(), trials.begin() + static_cast<std::ptrdiff_t>(n_train), trials.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.validation.begin(), split.validation.end());
  return split;
}

std::pair<LabeledEventSet, LabeledEventSet> split_dataset(const LabeledEventSet& set, double train_fraction,
                                                          std::uint64_t seed) {
  std::vector<std::size_t> classes;
  for (const auto& item : set.items) classes.push_back(item.class_index);
  const auto split = split_dataset(classes, set.class_names.size(), train_fraction, seed);
  std::pair<LabeledEventSet, LabeledEventSet> out{{{}, set.class_names}, {{}, set.class_names}};
  for (auto i : split.train) out.first.items.push_back(set.items[i]);
  for (auto i : split.validation) out.second.items.push_back(set.items[i]);
  return out;
}

std::vector<FeatureVector> featurize_trial(const LabeledTrial& trial, const PipelineConfig& cfg) {
  const Pixel hot = calibrate_hot_pixel(trial.stream, cfg.calibration_window_us);
  const PixelStream ps = filter_pixel(trial.stream, hot);
  const TimeUs span = trial.duration_us > 0 ? trial.duration_us : (ps.events.empty() ? 0 : ps.events.back().t_us + 1);
  auto samples = segment_samples(ps, cfg.bin_width_us, cfg.n_bins, cfg.effective_stride_us(), span);
  for (auto& s : samples) s.label = trial.label;
  return samples;
}

LabeledFeatures featurize_trials(const LabeledEventSet& set, std::span<const std::size_t> trial_indices,
                                 const PipelineConfig& cfg) {
  LabeledFeatures out;
  for (auto i : trial_indices) {
    const auto& trial = set.items.at(i);
    for (auto& fv : featurize_trial(trial, cfg)) {
      out.samples.push_back(std::move(fv));
      out.labels.push_back(trial.class_index);
    }
  }
  return out;
}

EncodedSet encode_features(const LabeledFeatures& features, const Normalizer& nz, const EncoderConfig& encoder,
                           std::size_t class_count) {
  EncodedSet set;
  set.class_count = class_count;
  set.labels = features.labels;
  set.samples.reserve(features.samples.size());
  for (const auto& fv : features.samples) set.samples.push_back(encode_sample(fv, nz, encoder));
  return set;
}

bool operator==(const ModelMetadata& a, const ModelMetadata& b) {
  return a.class_names == b.class_names && a.pipeline.bin_width_us == b.pipeline.bin_width_us &&
         a.pipeline.n_bins == b.pipeline.n_bins && a.pipeline.stride_us == b.pipeline.stride_us &&
         a.pipeline.calibration_window_us == b.pipeline.calibration_window_us &&
         a.pipeline.train_fraction == b.pipeline.train_fraction && a.pipeline.encoder == b.pipeline.encoder &&
         a.normalizer == b.normalizer && a.settle_timesteps == b.settle_timesteps;
}

json model_metadata_to_json(const ModelMetadata& meta) {
  const auto& p = meta.pipeline;
  json doc{{"class_names", meta.class_names},
           {"bin_width_us", p.bin_width_us},
           {"n_bins", p.n_bins},
           {"stride_us", p.effective_stride_us()},
           {"calibration_window_us", p.calibration_window_us},
           {"train_fraction", p.train_fraction},
           {"neurons_per_value", p.encoder.neurons_per_value},
           {"timesteps_per_pair", p.encoder.timesteps_per_pair},
           {"normalizer", {{"min_count", meta.normalizer.min_count}, {"max_count", meta.normalizer.max_count}}}};
  doc["settle_timesteps"] = meta.settle_timesteps ? json(*meta.settle_timesteps) : json(nullptr);
  return doc;
}

ModelMetadata model_metadata_from_json(const json& doc) {
  ModelMetadata meta;
  try {
    meta.class_names = doc.at("class_names").get<std::vector<std::string>>();
    auto& p = meta.pipeline;
    p.bin_width_us = doc.at("bin_width_us").get<TimeUs>();
    p.n_bins = doc.at("n_bins").get<std::size_t>();
    p.stride_us = doc.at("stride_us").get<TimeUs>();
    p.calibration_window_us = doc.at("calibration_window_us").get<TimeUs>();
    p.train_fraction = doc.value("train_fraction", p.train_fraction);
    p.encoder.neurons_per_value = doc.at("neurons_per_value").get<std::size_t>();
    p.encoder.timesteps_per_pair = doc.at("timesteps_per_pair").get<std::size_t>();
    meta.normalizer.min_count = doc.at("normalizer").at("min_count").get<std::uint32_t>();
    meta.normalizer.max_count = doc.at("normalizer").at("max_count").get<std::uint32_t>();
    if (auto it = doc.find("settle_timesteps"); it != doc.end() && !it->is_null()) {
      meta.settle_timesteps = it->get<std::size_t>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("model metadata: ") + e.what());
  }
  validate_encoder(meta.pipeline.encoder);
  if (meta.normalizer.max_count < meta.normalizer.min_count) {
    throw Error(ErrorCode::SchemaViolation, "normalizer max below min");
  }
  return meta;
}

ExperimentResult run_experiment(const LabeledEventSet& dataset, const PipelineConfig& pipeline,
                                const EvolutionConfig& evo, const GenerationCallback& on_generation) {
  const std::size_t k = dataset.class_names.size();
  if (k < 2) throw Error(ErrorCode::ClassWithoutTrials, "an experiment needs at least two classes");
  if (evo.num_inputs != pipeline.encoder.input_slots()) {
    throw Error(ErrorCode::InvalidConfig, "num_inputs must equal 2 * neurons_per_value");
  }
  EvolutionConfig cfg = evo;
  cfg.num_outputs = k;
  validate_config(cfg);

  std::vector<std::size_t> classes;
  for (const auto& item : dataset.items) classes.push_back(item.class_index);
  const auto split = split_dataset(classes, k, pipeline.train_fraction, derive_seed(evo.master_seed, {0x5711}));

  const auto train_features = featurize_trials(dataset, split.train, pipeline);
  const auto val_features = featurize_trials(dataset, split.validation, pipeline);
  if (train_features.samples.empty() || val_features.samples.empty()) {
    throw Error(ErrorCode::EmptyTrainingSet, "trials are shorter than one sample window");
  }
  const Normalizer nz = fit_normalizer(train_features.samples);
  const EncodedSet train = encode_features(train_features, nz, pipeline.encoder, k);
  const EncodedSet validation = encode_features(val_features, nz, pipeline.encoder, k);

  ExperimentResult result;
  result.history = evolve(cfg, train, validation, on_generation);
  result.best = result.history.final_best;
  result.train_f1 = result.history.final_train_fitness;
  result.confusion = ConfusionMatrix(k, dataset.class_names);
  const auto preds = predict(result.best.network, validation, cfg.settle_timesteps);
  for (std::size_t i = 0; i < preds.size(); ++i) result.confusion.add(validation.labels[i], preds[i]);
  result.validation_f1 = macro_f1(result.confusion);
  result.model = {dataset.class_names, pipeline, nz, cfg.settle_timesteps};
  result.model.pipeline.stride_us = pipeline.effective_stride_us();
  result.train_samples = train.size();
  result.validation_samples = validation.size();
  return result;
}

void write_experiment(const std::filesystem::path& dir, const ExperimentResult& result,
                      std::size_t checkpoint_interval) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "best_network.json", write_network_document(result.best.network));
  write_text_file(dir / "model.json", model_metadata_to_json(result.model).dump(2) + "\n");
  write_text_file(dir / "confusion_matrix.csv", result.confusion.to_csv());
  write_text_file(dir / "history.csv", result.history.to_csv());
  json meta{{"latency_ms", static_cast<double>(result.latency_us()) / 1000.0},
            {"n_bins", result.model.pipeline.n_bins},
            {"bin_width_us", result.model.pipeline.bin_width_us},
            {"train_f1", result.train_f1},
            {"validation_f1", result.validation_f1},
            {"train_samples", result.train_samples},
            {"validation_samples", result.validation_samples},
            {"generations_run", result.history.generations.size()},
            {"best_genome_id", result.best.id},
            {"best_network_neurons", result.best.network.neurons.size()},
            {"best_network_synapses", result.best.network.synapses.size()}};
  write_text_file(dir / "metadata.json", meta.dump(2) + "\n");
  if (checkpoint_interval > 0) {
    std::filesystem::create_directories(dir / "checkpoints");
    for (const auto& g : result.history.generations) {
      if (g.generation % checkpoint_interval != 0 && &g != &result.history.generations.back()) continue;
      char name[32];
      std::snprintf(name, sizeof name, "gen_%04zu.json", g.generation);
      write_text_file(dir / "checkpoints" / name, write_network_document(g.best.network));
    }
  }
}

ConfusionMatrix evaluate_model(const Network& net, const ModelMetadata& meta, const LabeledEventSet& dataset) {
  const std::size_t k = meta.class_names.size();
  if (net.outputs.size() != k) throw Error(ErrorCode::IncompatibleSignatures, "network outputs differ from model classes");
  std::map<std::string, std::size_t> class_of;
  for (std::size_t c = 0; c < k; ++c) class_of[meta.class_names[c]] = c;

  LabeledFeatures features;
  for (const auto& trial : dataset.items) {
    auto it = class_of.find(trial.label);
    if (it == class_of.end()) throw Error(ErrorCode::ClassOutOfRange, "label '" + trial.label + "' unknown to the model");
    for (auto& fv : featurize_trial(trial, meta.pipeline)) {
      features.samples.push_back(std::move(fv));
      features.labels.push_back(it->second);
    }
  }
  if (features.samples.empty()) throw Error(ErrorCode::EmptyMatrix, "no complete sample windows in dataset");
  const auto encoded = encode_features(features, meta.normalizer, meta.pipeline.encoder, k);
  const auto preds = predict(net, encoded, meta.settle_timesteps);
  ConfusionMatrix cm(k, meta.class_names);
  for (std::size_t i = 0; i < preds.size(); ++i) cm.add(encoded.labels[i], preds[i]);
  return cm;
}

std::string SweepResult::to_csv() const {
  std::string out = "latency_ms,n_bins,validation_f1\n";
  char line[96];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%g,%zu,%.4f\n", r.latency_ms(), r.n_bins, r.validation_f1);
    out += line;
  }
  return out;
}

SweepResult latency_sweep(const LabeledEventSet& dataset, const PipelineConfig& base,
                          std::span<const std::size_t> bin_counts, const EvolutionConfig& evo, bool concurrent,
                          const std::function<void(std::size_t, const GenerationRecord&)>& progress) {
  if (bin_counts.empty()) throw Error(ErrorCode::OutOfRange, "bin_counts must be non-empty");
  auto point = [&](std::size_t i) {
    PipelineConfig pipeline = base;
    pipeline.n_bins = bin_counts[i];
    pipeline.stride_us.reset();
    EvolutionConfig cfg = evo;
    cfg.master_seed = derive_seed(evo.master_seed, {i});
    GenerationCallback cb;
    if (progress && !concurrent) cb = [&](const GenerationRecord& g) { progress(bin_counts[i], g); };
    const auto r = run_experiment(dataset, pipeline, cfg, cb);
    return SweepRow{pipeline.window_us(), pipeline.n_bins, r.validation_f1};
  };

  SweepResult result;
  if (concurrent) {
    std::vector<std::future<SweepRow>> futures;
    for (std::size_t i = 0; i < bin_counts.size(); ++i) futures.push_back(std::async(std::launch::async, point, i));
    for (auto& f : futures) result.rows.push_back(f.get());
  } else {
    for (std::size_t i = 0; i < bin_counts.size(); ++i) result.rows.push_back(point(i));
  }
  return result;
}

void write_dataset(const std::filesystem::path& dir, const LabeledEventSet& set) {
  std::filesystem::create_directories(dir);
  json trials = json::array();
  SensorGeometry sensor{};
  for (const auto& t : set.items) {
    const auto name = trial_file_name(t);
    write_event_file(dir / name, t.stream);
    sensor = t.stream.sensor();
    trials.push_back({{"file", name},
                      {"label", t.label},
                      {"trial", t.trial},
                      {"duration_us", t.duration_us},
                      {"hot_pixel", {t.hot_pixel.x, t.hot_pixel.y}}});
  }
  json manifest{{"class_names", set.class_names},
                {"sensor_width", sensor.width},
                {"sensor_height", sensor.height},
                {"trials", trials}};
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

LabeledEventSet read_dataset(const std::filesystem::path& dir) {
  LabeledEventSet set;
  try {
    const json manifest = json::parse(read_text_file(dir / "manifest.json"));
    set.class_names = manifest.at("class_names").get<std::vector<std::string>>();
    const SensorGeometry sensor{manifest.at("sensor_width").get<std::uint32_t>(),
                                manifest.at("sensor_height").get<std::uint32_t>()};
    for (const auto& t : manifest.at("trials")) {
      LabeledTrial trial;
      trial.label = t.at("label").get<std::string>();
      auto it = std::find(set.class_names.begin(), set.class_names.end(), trial.label);
      if (it == set.class_names.end()) throw Error(ErrorCode::ClassOutOfRange, "trial label '" + trial.label + "' not in class_names");
      trial.class_index = static_cast<std::size_t>(it - set.class_names.begin());
      trial.trial = t.at("trial").get<std::size_t>();
      trial.duration_us = t.at("duration_us").get<TimeUs>();
      if (auto hp = t.find("hot_pixel"); hp != t.end()) {
        trial.hot_pixel = {hp->at(0).get<std::uint32_t>(), hp->at(1).get<std::uint32_t>()};
      }
      trial.stream = read_event_file(dir / t.at("file").get<std::string>(), sensor);
      set.items.push_back(std::move(trial));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("dataset manifest: ") + e.what());
  }
  return set;
}

}  // namespace v2s
