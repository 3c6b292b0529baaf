#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "v2s/encode.hpp"
#include "v2s/evolve.hpp"
#include "v2s/metrics.hpp"
#include "v2s/preprocess.hpp"
#include "v2s/synth.hpp"

namespace v2s {

struct TrialSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

/// Stratified split over trial indices. Each class sends
/// clamp(round(fraction * n), 1, n - 1) trials to train (all of them when
/// n == 1). Throws ClassWithoutTrials when some class has no trial.
TrialSplit split_dataset(std::span<const std::size_t> trial_classes, std::size_t class_count, double train_fraction,
                         std::uint64_t seed);

std::pair<LabeledEventSet, LabeledEventSet> split_dataset(const LabeledEventSet& set, double train_fraction,
                                                          std::uint64_t seed);

/// Preprocessing and encoding settings shared by training and evaluation.
struct PipelineConfig {
  TimeUs bin_width_us = kDefaultBinWidthUs;
  std::size_t n_bins = 50;
  std::optional<TimeUs> stride_us;  // defaults to the window length
  TimeUs calibration_window_us = kDefaultCalibrationWindowUs;
  double train_fraction = 0.8;
  EncoderConfig encoder{};

  TimeUs window_us() const noexcept { return bin_width_us * static_cast<TimeUs>(n_bins); }
  TimeUs effective_stride_us() const noexcept { return stride_us.value_or(window_us()); }
};

/// Hot-pixel calibration, pixel projection, and windowing of one trial.
/// Every returned vector carries the trial's label.
std::vector<FeatureVector> featurize_trial(const LabeledTrial& trial, const PipelineConfig& cfg);

struct LabeledFeatures {
  std::vector<FeatureVector> samples;
  std::vector<std::size_t> labels;
};

LabeledFeatures featurize_trials(const LabeledEventSet& set, std::span<const std::size_t> trial_indices,
                                 const PipelineConfig& cfg);

EncodedSet encode_features(const LabeledFeatures& features, const Normalizer& nz, const EncoderConfig& encoder,
                           std::size_t class_count);

/// Everything needed to apply a trained network to new recordings.
struct ModelMetadata {
  std::vector<std::string> class_names;
  PipelineConfig pipeline{};
  Normalizer normalizer{};
  std::optional<std::size_t> settle_timesteps;

  friend bool operator==(const ModelMetadata&, const ModelMetadata&);
};

nlohmann::json model_metadata_to_json(const ModelMetadata& meta);
ModelMetadata model_metadata_from_json(const nlohmann::json& doc);

struct ExperimentResult {
  Genome best;
  double train_f1 = 0.0;
  double validation_f1 = 0.0;
  ConfusionMatrix confusion{1};
  RunHistory history;
  ModelMetadata model;
  std::size_t train_samples = 0;
  std::size_t validation_samples = 0;

  TimeUs latency_us() const noexcept { return model.pipeline.window_us(); }
};

/// preprocess -> encode -> evolve -> holdout evaluation. `evo.master_seed`
/// drives both the trial split and the evolutionary run.
ExperimentResult run_experiment(const LabeledEventSet& dataset, const PipelineConfig& pipeline,
                                const EvolutionConfig& evo, const GenerationCallback& on_generation = {});

/// Writes best_network.json, model.json, confusion_matrix.csv, history.csv,
/// metadata.json and, when checkpointing is enabled, checkpoints/gen_NNNN.json.
void write_experiment(const std::filesystem::path& dir, const ExperimentResult& result,
                      std::size_t checkpoint_interval = 0);

/// Confusion matrix of a trained network over every window of every trial.
ConfusionMatrix evaluate_model(const Network& net, const ModelMetadata& meta, const LabeledEventSet& dataset);

struct SweepRow {
  TimeUs latency_us = 0;
  std::size_t n_bins = 0;
  double validation_f1 = 0.0;

  double latency_ms() const noexcept { return static_cast<double>(latency_us) / 1000.0; }
};

struct SweepResult {
  std::vector<SweepRow> rows;

  /// `latency_ms,n_bins,validation_f1`
  std::string to_csv() const;
};

inline const std::vector<std::size_t> kDefaultBinCounts{5, 10, 50, 100};

/// One experiment per bin count. Point i uses master seed
/// derive_seed(evo.master_seed, {i}), so sequential and concurrent sweeps
/// give the same table.
SweepResult latency_sweep(const LabeledEventSet& dataset, const PipelineConfig& base,
                          std::span<const std::size_t> bin_counts, const EvolutionConfig& evo,
                          bool concurrent = false, const std::function<void(std::size_t, const GenerationRecord&)>& progress = {});

/// Dataset directory: manifest.json plus one event CSV per trial.
void write_dataset(const std::filesystem::path& dir, const LabeledEventSet& set);
LabeledEventSet read_dataset(const std::filesystem::path& dir);

}  // namespace v2s
