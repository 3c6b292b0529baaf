#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "v2s/encode.hpp"

namespace v2s {

using NeuronId = std::int64_t;

enum class NeuronKind : std::uint8_t { input, hidden, output };

std::string_view to_string(NeuronKind kind);

/// Discrete-time leaky integrate-and-fire unit. `leak` multiplies the
/// surviving potential once per timestep (1 = no decay, 0 = full decay).
struct Neuron {
  NeuronId id = 0;
  NeuronKind kind = NeuronKind::hidden;
  double threshold = 1.0;
  double leak = 1.0;

  friend bool operator==(const Neuron&, const Neuron&) = default;
};

struct Synapse {
  NeuronId from = 0;
  NeuronId to = 0;
  double weight = 0.0;
  int delay = 1;

  friend bool operator==(const Synapse&, const Synapse&) = default;
};

/// Directed spiking graph. Recurrent edges and self-loops are allowed.
struct Network {
  std::vector<Neuron> neurons;
  std::vector<Synapse> synapses;
  std::vector<NeuronId> inputs;   // input slot -> neuron id
  std::vector<NeuronId> outputs;  // class index -> neuron id

  friend bool operator==(const Network&, const Network&) = default;
};

using OutputCounts = std::vector<std::uint32_t>;

/// One neuron firing, as recorded by a traced run.
struct FiredSpike {
  std::size_t time = 0;
  NeuronId neuron = 0;

  friend bool operator==(const FiredSpike&, const FiredSpike&) = default;
};

struct Decision {
  std::size_t class_index = 0;
  bool no_spike = false;

  friend bool operator==(const Decision&, const Decision&) = default;
};

/// Throws Error{DuplicateId, DanglingSynapse, BadDelay, BadParameter, MissingIO}.
void validate_network(const Network& net);

/// A validated network laid out for fast repeated simulation. Owns its
/// simulation state, so one instance serves one thread at a time; the
/// source Network may be shared freely.
class Simulator {
 public:
  explicit Simulator(const Network& net);

  /// Per timestep: deliver queued and external charge, fire every neuron at
  /// or above threshold (reset to 0, enqueue weight at t + delay), then
  /// apply leak. Returns output spike counts in `outputs` order.
  OutputCounts run(const SpikeTrain& train, std::size_t total_timesteps, std::vector<FiredSpike>* trace = nullptr);

  std::size_t neuron_count() const noexcept { return threshold_.size(); }

 private:
  struct Edge {
    std::uint32_t target;
    std::uint32_t delay;
    double weight;
  };

  std::vector<NeuronId> ids_;
  std::vector<double> threshold_;
  std::vector<double> leak_;
  std::vector<std::uint32_t> edge_begin_;
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> input_neuron_;
  std::vector<std::int32_t> output_slot_;
  std::size_t output_count_ = 0;
  std::size_t ring_ = 1;

  std::vector<double> potential_;
  std::vector<double> pending_;
  std::vector<std::uint32_t> pending_count_;
};

OutputCounts run(const Network& net, const SpikeTrain& train, std::size_t total_timesteps,
                 std::vector<FiredSpike>* trace = nullptr);

/// Most spikes wins; ties go to the lowest index; all zeros gives class 0
/// with `no_spike` set.
Decision decode_wta(std::span<const std::uint32_t> counts);

nlohmann::json serialize_network(const Network& net);
Network load_network(const nlohmann::json& doc);
std::string write_network_document(const Network& net);
Network parse_network_document(std::string_view text);

}  // namespace v2s
