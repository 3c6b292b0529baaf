#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "v2s/metrics.hpp"
#include "v2s/rng.hpp"
#include "v2s/snn.hpp"

namespace v2s {

/// Per-offspring probability that each operator fires once.
struct MutationRates {
  double add_neuron = 0.10;
  double del_neuron = 0.05;
  double add_synapse = 0.30;
  double del_synapse = 0.20;
  double perturb_weight = 0.25;
  double perturb_threshold = 0.25;
  double perturb_delay = 0.25;
  double perturb_leak = 0.25;

  friend bool operator==(const MutationRates&, const MutationRates&) = default;
};

struct ParameterRanges {
  double weight_min = -2.0;
  double weight_max = 2.0;
  double threshold_max = 2.0;  // thresholds live in (0, threshold_max]
  int delay_min = 1;
  int delay_max = 8;
  double leak_min = 0.0;
  double leak_max = 1.0;

  friend bool operator==(const ParameterRanges&, const ParameterRanges&) = default;
};

struct EvolutionConfig {
  std::size_t population_size = 999;
  std::size_t generations = 100;
  std::size_t tournament_size = 4;
  std::size_t elitism_count = 10;
  MutationRates rates{};
  double crossover_rate = 0.5;
  double perturb_sigma = 0.1;  // Gaussian step as a fraction of the parameter range
  ParameterRanges ranges{};
  std::size_t max_neurons = 64;
  std::size_t max_synapses = 256;
  std::size_t initial_hidden_max = 8;
  double initial_synapse_probability = 0.1;
  std::size_t num_inputs = 8;
  std::size_t num_outputs = 5;
  std::optional<std::size_t> settle_timesteps;  // defaults to the spike train span
  std::optional<double> target_fitness;         // stop once the best train fitness reaches it
  std::size_t checkpoint_interval = 0;
  std::size_t threads = 1;  // 0 = hardware concurrency
  std::uint64_t master_seed = 0;

  friend bool operator==(const EvolutionConfig&, const EvolutionConfig&) = default;
};

void validate_config(const EvolutionConfig& cfg);
EvolutionConfig parse_evolution_config(std::string_view json_text);
nlohmann::json evolution_config_to_json(const EvolutionConfig& cfg);

struct Genome {
  std::uint64_t id = 0;
  std::vector<std::uint64_t> parents;
  Network network;

  friend bool operator==(const Genome&, const Genome&) = default;
};

/// Encoded samples with class labels in [0, class_count).
struct EncodedSet {
  std::vector<SpikeTrain> samples;
  std::vector<std::size_t> labels;
  std::size_t class_count = 0;

  std::size_t size() const noexcept { return samples.size(); }
};

Genome random_genome(const EvolutionConfig& cfg, Rng& rng, std::uint64_t id);

/// Applies each operator once with its configured probability. Never removes
/// input or output neurons and never exceeds the size caps.
Genome mutate(const Genome& g, const EvolutionConfig& cfg, Rng& rng, std::uint64_t new_id);

/// Union of both parents' neurons and synapses, each shared element taken from
/// a parent chosen 50/50, then pruned back under the caps.
Genome crossover(const Genome& a, const Genome& b, const EvolutionConfig& cfg, Rng& rng, std::uint64_t new_id);

/// Per-sample WTA predictions with a run window of span + settle.
std::vector<std::size_t> predict(const Network& net, const EncodedSet& set, std::optional<std::size_t> settle = {});

ConfusionMatrix evaluate_confusion(const Network& net, const EncodedSet& set, std::optional<std::size_t> settle = {});

/// Macro-F1 of the network's WTA predictions on `set`.
double evaluate_fitness(const Genome& g, const EncodedSet& set, std::optional<std::size_t> settle = {});

struct GenerationRecord {
  std::size_t generation = 0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
  Genome best;

  friend bool operator==(const GenerationRecord&, const GenerationRecord&) = default;
};

struct RunHistory {
  std::vector<GenerationRecord> generations;
  Genome final_best;
  double final_train_fitness = 0.0;
  double validation_fitness = 0.0;

  /// `generation,best_fitness,mean_fitness` with round-trip precision.
  std::string to_csv() const;

  friend bool operator==(const RunHistory&, const RunHistory&) = default;
};

using GenerationCallback = std::function<void(const GenerationRecord&)>;

/// Generational loop: evaluate, keep the elite unchanged, fill the rest by
/// tournament selection, optional crossover, and mutation. Every random draw
/// comes from a stream derived from (master_seed, generation, slot), so the
/// result does not depend on `threads`.
RunHistory evolve(const EvolutionConfig& cfg, const EncodedSet& train, const EncodedSet& validation,
                  const GenerationCallback& on_generation = {});

}  // namespace v2s
