#include "v2s/snn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>

#include "v2s/error.hpp"

namespace v2s {
namespace {

using nlohmann::json;

constexpr int kMaxDelay = 1 << 16;

std::string id_str(NeuronId id) { return std::to_string(id); }

void check_io(const Network& net, const std::vector<NeuronId>& ids, NeuronKind kind,
              const std::unordered_map<NeuronId, const Neuron*>& by_id) {
  const char* name = kind == NeuronKind::input ? "inputs" : "outputs";
  if (ids.empty()) throw Error(ErrorCode::MissingIO, std::string(name) + " list is empty");
  std::set<NeuronId> seen;
  for (auto id : ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw Error(ErrorCode::MissingIO, std::string(name) + " references missing neuron " + id_str(id));
    if (it->second->kind != kind) {
      throw Error(ErrorCode::MissingIO, "neuron " + id_str(id) + " listed in " + name + " has kind " +
                                            std::string(to_string(it->second->kind)));
    }
    if (!seen.insert(id).second) throw Error(ErrorCode::DuplicateId, std::string(name) + " lists " + id_str(id) + " twice");
  }
  std::size_t declared = 0;
  for (const auto& n : net.neurons) declared += n.kind == kind;
  if (declared != ids.size()) {
    throw Error(ErrorCode::MissingIO, std::string(name) + " list does not cover every neuron of that kind");
  }
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known, const char* where) {
  if (!obj.is_object()) throw Error(ErrorCode::SchemaViolation, std::string(where) + " must be an object");
  for (const auto& item : obj.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      throw Error(ErrorCode::SchemaViolation, std::string(where) + ": unknown field '" + item.key() + "'");
    }
  }
  for (auto key : known) {
    if (!obj.contains(std::string(key))) {
      throw Error(ErrorCode::SchemaViolation, std::string(where) + ": missing field '" + std::string(key) + "'");
    }
  }
}

json threshold_to_json(double t) {
  if (t == std::numeric_limits<double>::infinity()) return "inf";
  return t;
}

double threshold_from_json(const json& j) {
  if (j.is_string() && j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
  if (!j.is_number()) throw Error(ErrorCode::SchemaViolation, "threshold must be a number or \"inf\"");
  return j.get<double>();
}

NeuronKind kind_from_string(const std::string& s) {
  if (s == "input") return NeuronKind::input;
  if (s == "hidden") return NeuronKind::hidden;
  if (s == "output") return NeuronKind::output;
  throw Error(ErrorCode::SchemaViolation, "unknown neuron kind '" + s + "'");
}

NeuronId id_from_json(const json& j) {
  if (!j.is_number_integer()) throw Error(ErrorCode::SchemaViolation, "ids must be integers");
  return j.get<NeuronId>();
}

}  // namespace

std::string_view to_string(NeuronKind kind) {
  switch (kind) {
    case NeuronKind::input: return "input";
    case NeuronKind::hidden: return "hidden";
    case NeuronKind::output: return "output";
  }
  return "unknown";
}

void validate_network(const Network& net) {
  std::unordered_map<NeuronId, const Neuron*> by_id;
  for (const auto& n : net.neurons) {
    if (!by_id.emplace(n.id, &n).second) throw Error(ErrorCode::DuplicateId, "neuron id " + id_str(n.id) + " repeated");
    if (std::isnan(n.threshold) || n.threshold <= 0) {
      throw Error(ErrorCode::BadParameter, "neuron " + id_str(n.id) + " threshold must be > 0");
    }
    if (!(n.leak >= 0.0 && n.leak <= 1.0)) {
      throw Error(ErrorCode::BadParameter, "neuron " + id_str(n.id) + " leak must be in [0,1]");
    }
  }
  for (const auto& s : net.synapses) {
    if (!by_id.contains(s.from) || !by_id.contains(s.to)) {
      throw Error(ErrorCode::DanglingSynapse, "synapse " + id_str(s.from) + "->" + id_str(s.to));
    }
    if (s.delay < 1 || s.delay > kMaxDelay) {
      throw Error(ErrorCode::BadDelay, "synapse " + id_str(s.from) + "->" + id_str(s.to) + " delay " +
                                           std::to_string(s.delay));
    }
    if (!std::isfinite(s.weight)) throw Error(ErrorCode::BadParameter, "synapse weight must be finite");
  }
  check_io(net, net.inputs, NeuronKind::input, by_id);
  check_io(net, net.outputs, NeuronKind::output, by_id);
}

Simulator::Simulator(const Network& net) {
  validate_network(net);
  const std::size_t n = net.neurons.size();
  std::unordered_map<NeuronId, std::uint32_t> index;
  threshold_.reserve(n);
  leak_.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    index.emplace(net.neurons[i].id, i);
    ids_.push_back(net.neurons[i].id);
    threshold_.push_back(net.neurons[i].threshold);
    leak_.push_back(net.neurons[i].leak);
  }

  std::vector<std::uint32_t> degree(n + 1, 0);
  int max_delay = 1;
  for (const auto& s : net.synapses) {
    ++degree[index.at(s.from) + 1];
    max_delay = std::max(max_delay, s.delay);
  }
  edge_begin_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) edge_begin_[i + 1] = edge_begin_[i] + degree[i + 1];
  edges_.resize(net.synapses.size());
  std::vector<std::uint32_t> fill(edge_begin_.begin(), edge_begin_.end() - 1);
  for (const auto& s : net.synapses) {
    edges_[fill[index.at(s.from)]++] = {index.at(s.to), static_cast<std::uint32_t>(s.delay), s.weight};
  }

  for (auto id : net.inputs) input_neuron_.push_back(index.at(id));
  output_slot_.assign(n, -1);
  output_count_ = net.outputs.size();
  for (std::size_t k = 0; k < net.outputs.size(); ++k) output_slot_[index.at(net.outputs[k])] = static_cast<std::int32_t>(k);

  ring_ = static_cast<std::size_t>(max_delay) + 1;
  potential_.assign(n, 0.0);
  pending_.assign(ring_ * n, 0.0);
  pending_count_.assign(ring_, 0);
}

OutputCounts Simulator::run(const SpikeTrain& train, std::size_t total_timesteps, std::vector<FiredSpike>* trace) {
  if (total_timesteps < train.span) {
    throw Error(ErrorCode::OutOfRange, "total_timesteps " + std::to_string(total_timesteps) + " shorter than span " +
                                           std::to_string(train.span));
  }
  const std::size_t n = threshold_.size();
  std::fill(potential_.begin(), potential_.end(), 0.0);
  std::fill(pending_.begin(), pending_.end(), 0.0);
  std::fill(pending_count_.begin(), pending_count_.end(), 0);
  std::uint32_t in_flight = 0;

  OutputCounts counts(output_count_, 0);
  auto next_spike = train.spikes.begin();
  const auto last_spike = train.spikes.end();

  for (std::size_t t = 0; t < total_timesteps; ++t) {
    const std::size_t slot = t % ring_;
    double* arriving = pending_.data() + slot * n;
    if (pending_count_[slot] != 0) {
      for (std::size_t i = 0; i < n; ++i) {
        potential_[i] += arriving[i];
        arriving[i] = 0.0;
      }
      in_flight -= pending_count_[slot];
      pending_count_[slot] = 0;
    }
    for (; next_spike != last_spike && next_spike->time == t; ++next_spike) {
      if (next_spike->input_index >= input_neuron_.size()) {
        throw Error(ErrorCode::MissingIO, "spike targets input slot " + std::to_string(next_spike->input_index));
      }
      potential_[input_neuron_[next_spike->input_index]] += next_spike->value;
    }
    if (next_spike != last_spike && next_spike->time < t) {
      throw Error(ErrorCode::OutOfRange, "spike train is not sorted by time");
    }

    for (std::size_t i = 0; i < n; ++i) {
      if (potential_[i] >= threshold_[i]) {
        potential_[i] = 0.0;
        if (trace) trace->push_back({t, ids_[i]});
        if (output_slot_[i] >= 0) ++counts[static_cast<std::size_t>(output_slot_[i])];
        for (auto e = edge_begin_[i]; e < edge_begin_[i + 1]; ++e) {
          const Edge& edge = edges_[e];
          const std::size_t at = (t + edge.delay) % ring_;
          pending_[at * n + edge.target] += edge.weight;
          ++pending_count_[at];
          ++in_flight;
        }
      } else {
        potential_[i] *= leak_[i];
      }
    }

    // With positive thresholds and leak <= 1, nothing can fire again once
    // no charge is queued and no external input remains.
    if (in_flight == 0 && next_spike == last_spike) break;
  }
  return counts;
}

OutputCounts run(const Network& net, const SpikeTrain& train, std::size_t total_timesteps,
                 std::vector<FiredSpike>* trace) {
  Simulator sim(net);
  return sim.run(train, total_timesteps, trace);
}

Decision decode_wta(std::span<const std::uint32_t> counts) {
  if (counts.empty()) throw Error(ErrorCode::EmptyOutputs, "no output counts");
  std::size_t best = 0;
  for (std::size_t k = 1; k < counts.size(); ++k) {
    if (counts[k] > counts[best]) best = k;
  }
  return {best, counts[best] == 0};
}

json serialize_network(const Network& net) {
  json neurons = json::array();
  for (const auto& n : net.neurons) {
    neurons.push_back({{"id", n.id}, {"kind", to_string(n.kind)}, {"threshold", threshold_to_json(n.threshold)}, {"leak", n.leak}});
  }
  json synapses = json::array();
  for (const auto& s : net.synapses) {
    synapses.push_back({{"from", s.from}, {"to", s.to}, {"weight", s.weight}, {"delay", s.delay}});
  }
  return {{"neurons", neurons}, {"synapses", synapses}, {"inputs", net.inputs}, {"outputs", net.outputs}};
}

Network load_network(const json& doc) {
  Network net;
  try {
    reject_unknown(doc, {"neurons", "synapses", "inputs", "outputs"}, "network");
    for (const char* key : {"neurons", "synapses", "inputs", "outputs"}) {
      if (!doc[key].is_array()) throw Error(ErrorCode::SchemaViolation, std::string(key) + " must be an array");
    }
    for (const auto& j : doc["neurons"]) {
      reject_unknown(j, {"id", "kind", "threshold", "leak"}, "neuron");
      if (!j["kind"].is_string() || !j["leak"].is_number()) throw Error(ErrorCode::SchemaViolation, "neuron field types");
      net.neurons.push_back({id_from_json(j["id"]), kind_from_string(j["kind"].get<std::string>()),
                             threshold_from_json(j["threshold"]), j["leak"].get<double>()});
    }
    for (const auto& j : doc["synapses"]) {
      reject_unknown(j, {"from", "to", "weight", "delay"}, "synapse");
      if (!j["weight"].is_number() || !j["delay"].is_number_integer()) {
        throw Error(ErrorCode::SchemaViolation, "synapse field types");
      }
      const auto delay = j["delay"].get<std::int64_t>();
      if (delay < 1 || delay > kMaxDelay) throw Error(ErrorCode::BadDelay, "delay " + std::to_string(delay));
      net.synapses.push_back({id_from_json(j["from"]), id_from_json(j["to"]), j["weight"].get<double>(), static_cast<int>(delay)});
    }
    for (const auto& j : doc["inputs"]) net.inputs.push_back(id_from_json(j));
    for (const auto& j : doc["outputs"]) net.outputs.push_back(id_from_json(j));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, e.what());
  }
  validate_network(net);
  return net;
}

std::string write_network_document(const Network& net) { return serialize_network(net).dump(1) + "\n"; }

Network parse_network_document(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, e.what());
  }
  return load_network(doc);
}

}  // namespace v2s
