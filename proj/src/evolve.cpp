#include "v2s/evolve.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

#include "v2s/error.hpp"

namespace v2s {
namespace {

using nlohmann::json;

constexpr double kMinThresholdFraction = 1e-3;

// ---- parameter sampling -------------------------------------------------

double random_threshold(const ParameterRanges& r, Rng& rng) {
  // (0, max]: reflect a [0, max) draw
  return std::max(r.threshold_max - uniform(rng, 0.0, r.threshold_max), r.threshold_max * kMinThresholdFraction);
}

double random_leak(const ParameterRanges& r, Rng& rng) { return uniform(rng, r.leak_min, r.leak_max); }
double random_weight(const ParameterRanges& r, Rng& rng) { return uniform(rng, r.weight_min, r.weight_max); }
int random_delay(const ParameterRanges& r, Rng& rng) {
  return std::uniform_int_distribution<int>(r.delay_min, r.delay_max)(rng);
}

double perturbed(double v, double lo, double hi, double sigma_fraction, Rng& rng) {
  std::normal_distribution<double> step(0.0, sigma_fraction * (hi - lo));
  return std::clamp(v + step(rng), lo, hi);
}

// ---- structural helpers -------------------------------------------------

NeuronId next_neuron_id(const Network& net) {
  NeuronId id = 0;
  for (const auto& n : net.neurons) id = std::max(id, n.id + 1);
  return id;
}

std::vector<std::size_t> hidden_positions(const Network& net) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < net.neurons.size(); ++i) {
    if (net.neurons[i].kind == NeuronKind::hidden) out.push_back(i);
  }
  return out;
}

std::vector<NeuronId> synapse_targets(const Network& net) {
  std::vector<NeuronId> out;
  for (const auto& n : net.neurons) {
    if (n.kind != NeuronKind::input) out.push_back(n.id);
  }
  return out;
}

bool has_synapse(const Network& net, NeuronId from, NeuronId to) {
  return std::any_of(net.synapses.begin(), net.synapses.end(),
                     [&](const Synapse& s) { return s.from == from && s.to == to; });
}

void remove_hidden_at(Network& net, std::size_t pos) {
  const NeuronId id = net.neurons[pos].id;
  net.neurons.erase(net.neurons.begin() + static_cast<std::ptrdiff_t>(pos));
  std::erase_if(net.synapses, [id](const Synapse& s) { return s.from == id || s.to == id; });
}

void enforce_caps(Network& net, const EvolutionConfig& cfg, Rng& rng) {
  for (auto hidden = hidden_positions(net); net.neurons.size() > cfg.max_neurons && !hidden.empty();
       hidden = hidden_positions(net)) {
    remove_hidden_at(net, hidden[uniform_index(rng, hidden.size())]);
  }
  while (net.synapses.size() > cfg.max_synapses) {
    net.synapses.erase(net.synapses.begin() + static_cast<std::ptrdiff_t>(uniform_index(rng, net.synapses.size())));
  }
}

bool try_add_synapse(Network& net, const EvolutionConfig& cfg, Rng& rng, NeuronId from, NeuronId to) {
  if (net.synapses.size() >= cfg.max_synapses || has_synapse(net, from, to)) return false;
  net.synapses.push_back({from, to, random_weight(cfg.ranges, rng), random_delay(cfg.ranges, rng)});
  return true;
}

void mutate_network(Network& net, const EvolutionConfig& cfg, Rng& rng) {
  const auto& rates = cfg.rates;
  const auto& r = cfg.ranges;
  auto chance = [&rng](double p) { return uniform01(rng) < p; };

  if (chance(rates.add_neuron) && net.neurons.size() < cfg.max_neurons) {
    const Neuron fresh{next_neuron_id(net), NeuronKind::hidden, random_threshold(r, rng), random_leak(r, rng)};
    const NeuronId source = net.neurons[uniform_index(rng, net.neurons.size())].id;
    net.neurons.push_back(fresh);
    const auto targets = synapse_targets(net);
    const NeuronId target = targets[uniform_index(rng, targets.size())];
    try_add_synapse(net, cfg, rng, source, fresh.id);
    try_add_synapse(net, cfg, rng, fresh.id, target);
  }
  if (chance(rates.del_neuron)) {
    const auto hidden = hidden_positions(net);
    if (!hidden.empty()) remove_hidden_at(net, hidden[uniform_index(rng, hidden.size())]);
  }
  if (chance(rates.add_synapse)) {
    const auto targets = synapse_targets(net);
    for (int attempt = 0; attempt < 8; ++attempt) {
      const NeuronId from = net.neurons[uniform_index(rng, net.neurons.size())].id;
      const NeuronId to = targets[uniform_index(rng, targets.size())];
      if (try_add_synapse(net, cfg, rng, from, to) || net.synapses.size() >= cfg.max_synapses) break;
    }
  }
  if (chance(rates.del_synapse) && !net.synapses.empty()) {
    net.synapses.erase(net.synapses.begin() + static_cast<std::ptrdiff_t>(uniform_index(rng, net.synapses.size())));
  }
  if (chance(rates.perturb_weight) && !net.synapses.empty()) {
    auto& s = net.synapses[uniform_index(rng, net.synapses.size())];
    s.weight = perturbed(s.weight, r.weight_min, r.weight_max, cfg.perturb_sigma, rng);
  }
  if (chance(rates.perturb_threshold)) {
    auto& n = net.neurons[uniform_index(rng, net.neurons.size())];
    n.threshold = std::max(perturbed(n.threshold, 0.0, r.threshold_max, cfg.perturb_sigma, rng),
                           r.threshold_max * kMinThresholdFraction);
  }
  if (chance(rates.perturb_delay) && !net.synapses.empty()) {
    auto& s = net.synapses[uniform_index(rng, net.synapses.size())];
    const double moved = perturbed(s.delay, r.delay_min, r.delay_max, cfg.perturb_sigma, rng);
    s.delay = static_cast<int>(std::lround(moved));
  }
  if (chance(rates.perturb_leak)) {
    auto& n = net.neurons[uniform_index(rng, net.neurons.size())];
    n.leak = perturbed(n.leak, r.leak_min, r.leak_max, cfg.perturb_sigma, rng);
  }
}

Network crossover_networks(const Network& a, const Network& b, const EvolutionConfig& cfg, Rng& rng) {
  if (a.inputs != b.inputs || a.outputs != b.outputs) {
    throw Error(ErrorCode::IncompatibleSignatures, "parents differ in input/output layout");
  }
  Network child;
  child.inputs = a.inputs;
  child.outputs = a.outputs;

  std::map<NeuronId, std::pair<const Neuron*, const Neuron*>> neurons;
  for (const auto& n : a.neurons) neurons[n.id].first = &n;
  for (const auto& n : b.neurons) neurons[n.id].second = &n;
  for (const auto& [id, owners] : neurons) {
    const Neuron* pick = owners.first && owners.second ? (uniform01(rng) < 0.5 ? owners.first : owners.second)
                                                       : (owners.first ? owners.first : owners.second);
    child.neurons.push_back(*pick);
  }

  // k-th (from, to) edge of each parent is matched with the other's k-th
  std::map<std::tuple<NeuronId, NeuronId, int>, std::pair<const Synapse*, const Synapse*>> synapses;
  auto collect = [&synapses](const Network& net, bool first) {
    std::map<std::pair<NeuronId, NeuronId>, int> seen;
    for (const auto& s : net.synapses) {
      auto& slot = synapses[{s.from, s.to, seen[{s.from, s.to}]++}];
      (first ? slot.first : slot.second) = &s;
    }
  };
  collect(a, true);
  collect(b, false);
  for (const auto& [key, owners] : synapses) {
    const Synapse* pick = owners.first && owners.second ? (uniform01(rng) < 0.5 ? owners.first : owners.second)
                                                        : (owners.first ? owners.first : owners.second);
    child.synapses.push_back(*pick);
  }

  enforce_caps(child, cfg, rng);
  return child;
}

void check_signature(const Network& net, const EvolutionConfig& cfg) {
  if (net.inputs.size() != cfg.num_inputs || net.outputs.size() != cfg.num_outputs) {
    throw Error(ErrorCode::IncompatibleSignatures, "genome I/O sizes do not match the configuration");
  }
}

template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  workers.clear();
  if (failure) std::rethrow_exception(failure);
}

// ---- config JSON --------------------------------------------------------

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known, const char* where) {
  if (!obj.is_object()) throw Error(ErrorCode::InvalidConfig, std::string(where) + " must be an object");
  for (const auto& item : obj.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      throw Error(ErrorCode::InvalidConfig, std::string(where) + ": unknown field '" + item.key() + "'");
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end()) out = it->get<T>();
}

template <typename T>
void read_optional(const json& obj, const char* key, std::optional<T>& out) {
  if (auto it = obj.find(key); it != obj.end()) {
    if (it->is_null()) out.reset(); else out = it->get<T>();
  }
}

}  // namespace

void validate_config(const EvolutionConfig& cfg) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  const auto& m = cfg.rates;
  for (double rate : {m.add_neuron, m.del_neuron, m.add_synapse, m.del_synapse, m.perturb_weight, m.perturb_threshold,
                      m.perturb_delay, m.perturb_leak, cfg.crossover_rate, cfg.initial_synapse_probability}) {
    if (!(rate >= 0.0 && rate <= 1.0)) fail("rates and probabilities must lie in [0,1]");
  }
  if (cfg.population_size == 0) fail("population_size must be >= 1");
  if (cfg.generations == 0) fail("generations must be >= 1");
  if (cfg.tournament_size == 0) fail("tournament_size must be >= 1");
  if (cfg.elitism_count >= cfg.population_size) fail("elitism_count must be below population_size");
  if (cfg.num_inputs == 0 || cfg.num_outputs == 0) fail("num_inputs and num_outputs must be >= 1");
  if (cfg.max_neurons < cfg.num_inputs + cfg.num_outputs) fail("max_neurons below the I/O neuron count");
  if (!(cfg.perturb_sigma >= 0.0)) fail("perturb_sigma must be >= 0");
  const auto& r = cfg.ranges;
  if (!(r.weight_min <= r.weight_max)) fail("weight range is empty");
  if (!(r.threshold_max > 0.0) || !std::isfinite(r.threshold_max)) fail("threshold_max must be > 0");
  if (r.delay_min < 1 || r.delay_max < r.delay_min) fail("delay range must satisfy 1 <= min <= max");
  if (!(r.leak_min >= 0.0 && r.leak_min <= r.leak_max && r.leak_max <= 1.0)) fail("leak range must lie in [0,1]");
}

EvolutionConfig parse_evolution_config(std::string_view json_text) {
  EvolutionConfig cfg;
  try {
    const json doc = json::parse(json_text);
    reject_unknown(doc,
                   {"population_size", "generations", "tournament_size", "elitism_count", "mutation_rates",
                    "crossover_rate", "perturb_sigma", "ranges", "max_neurons", "max_synapses", "initial_hidden_max",
                    "initial_synapse_probability", "num_inputs", "num_outputs", "settle_timesteps", "target_fitness",
                    "checkpoint_interval", "threads", "master_seed"},
                   "evolution config");
    read(doc, "population_size", cfg.population_size);
    read(doc, "generations", cfg.generations);
    read(doc, "tournament_size", cfg.tournament_size);
    read(doc, "elitism_count", cfg.elitism_count);
    read(doc, "crossover_rate", cfg.crossover_rate);
    read(doc, "perturb_sigma", cfg.perturb_sigma);
    read(doc, "max_neurons", cfg.max_neurons);
    read(doc, "max_synapses", cfg.max_synapses);
    read(doc, "initial_hidden_max", cfg.initial_hidden_max);
    read(doc, "initial_synapse_probability", cfg.initial_synapse_probability);
    read(doc, "num_inputs", cfg.num_inputs);
    read(doc, "num_outputs", cfg.num_outputs);
    read_optional(doc, "settle_timesteps", cfg.settle_timesteps);
    read_optional(doc, "target_fitness", cfg.target_fitness);
    read(doc, "checkpoint_interval", cfg.checkpoint_interval);
    read(doc, "threads", cfg.threads);
    read(doc, "master_seed", cfg.master_seed);
    if (auto it = doc.find("mutation_rates"); it != doc.end()) {
      reject_unknown(*it,
                     {"add_neuron", "del_neuron", "add_synapse", "del_synapse", "perturb_weight", "perturb_threshold",
                      "perturb_delay", "perturb_leak"},
                     "mutation_rates");
      auto& m = cfg.rates;
      read(*it, "add_neuron", m.add_neuron);
      read(*it, "del_neuron", m.del_neuron);
      read(*it, "add_synapse", m.add_synapse);
      read(*it, "del_synapse", m.del_synapse);
      read(*it, "perturb_weight", m.perturb_weight);
      read(*it, "perturb_threshold", m.perturb_threshold);
      read(*it, "perturb_delay", m.perturb_delay);
      read(*it, "perturb_leak", m.perturb_leak);
    }
    if (auto it = doc.find("ranges"); it != doc.end()) {
      reject_unknown(*it, {"weight_min", "weight_max", "threshold_max", "delay_min", "delay_max", "leak_min", "leak_max"},
                     "ranges");
      auto& r = cfg.ranges;
      read(*it, "weight_min", r.weight_min);
      read(*it, "weight_max", r.weight_max);
      read(*it, "threshold_max", r.threshold_max);
      read(*it, "delay_min", r.delay_min);
      read(*it, "delay_max", r.delay_max);
      read(*it, "leak_min", r.leak_min);
      read(*it, "leak_max", r.leak_max);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("evolution config JSON: ") + e.what());
  }
  validate_config(cfg);
  return cfg;
}

json evolution_config_to_json(const EvolutionConfig& cfg) {
  const auto& m = cfg.rates;
  const auto& r = cfg.ranges;
  json doc{{"population_size", cfg.population_size},
           {"generations", cfg.generations},
           {"tournament_size", cfg.tournament_size},
           {"elitism_count", cfg.elitism_count},
           {"mutation_rates",
            {{"add_neuron", m.add_neuron},
             {"del_neuron", m.del_neuron},
             {"add_synapse", m.add_synapse},
             {"del_synapse", m.del_synapse},
             {"perturb_weight", m.perturb_weight},
             {"perturb_threshold", m.perturb_threshold},
             {"perturb_delay", m.perturb_delay},
             {"perturb_leak", m.perturb_leak}}},
           {"crossover_rate", cfg.crossover_rate},
           {"perturb_sigma", cfg.perturb_sigma},
           {"ranges",
            {{"weight_min", r.weight_min},
             {"weight_max", r.weight_max},
             {"threshold_max", r.threshold_max},
             {"delay_min", r.delay_min},
             {"delay_max", r.delay_max},
             {"leak_min", r.leak_min},
             {"leak_max", r.leak_max}}},
           {"max_neurons", cfg.max_neurons},
           {"max_synapses", cfg.max_synapses},
           {"initial_hidden_max", cfg.initial_hidden_max},
           {"initial_synapse_probability", cfg.initial_synapse_probability},
           {"num_inputs", cfg.num_inputs},
           {"num_outputs", cfg.num_outputs},
           {"checkpoint_interval", cfg.checkpoint_interval},
           {"threads", cfg.threads},
           {"master_seed", cfg.master_seed}};
  doc["settle_timesteps"] = cfg.settle_timesteps ? json(*cfg.settle_timesteps) : json(nullptr);
  doc["target_fitness"] = cfg.target_fitness ? json(*cfg.target_fitness) : json(nullptr);
  return doc;
}

Genome random_genome(const EvolutionConfig& cfg, Rng& rng, std::uint64_t id) {
  validate_config(cfg);
  const auto& r = cfg.ranges;
  Network net;
  NeuronId next = 0;
  for (std::size_t i = 0; i < cfg.num_inputs; ++i, ++next) {
    net.neurons.push_back({next, NeuronKind::input, random_threshold(r, rng), random_leak(r, rng)});
    net.inputs.push_back(next);
  }
  for (std::size_t k = 0; k < cfg.num_outputs; ++k, ++next) {
    net.neurons.push_back({next, NeuronKind::output, random_threshold(r, rng), random_leak(r, rng)});
    net.outputs.push_back(next);
  }
  const std::size_t room = cfg.max_neurons - net.neurons.size();
  const auto hidden = std::uniform_int_distribution<std::size_t>(0, std::min(cfg.initial_hidden_max, room))(rng);
  for (std::size_t h = 0; h < hidden; ++h, ++next) {
    net.neurons.push_back({next, NeuronKind::hidden, random_threshold(r, rng), random_leak(r, rng)});
  }
  if (cfg.initial_synapse_probability > 0.0) {
    const auto targets = synapse_targets(net);
    for (const auto& from : net.neurons) {
      for (auto to : targets) {
        if (uniform01(rng) < cfg.initial_synapse_probability) {
          net.synapses.push_back({from.id, to, random_weight(r, rng), random_delay(r, rng)});
        }
      }
    }
  }
  enforce_caps(net, cfg, rng);
  return {id, {}, std::move(net)};
}

Genome mutate(const Genome& g, const EvolutionConfig& cfg, Rng& rng, std::uint64_t new_id) {
  check_signature(g.network, cfg);
  Genome child{new_id, {g.id}, g.network};
  mutate_network(child.network, cfg, rng);
  return child;
}

Genome crossover(const Genome& a, const Genome& b, const EvolutionConfig& cfg, Rng& rng, std::uint64_t new_id) {
  return {new_id, {a.id, b.id}, crossover_networks(a.network, b.network, cfg, rng)};
}

std::vector<std::size_t> predict(const Network& net, const EncodedSet& set, std::optional<std::size_t> settle) {
  Simulator sim(net);
  std::vector<std::size_t> predictions;
  predictions.reserve(set.size());
  for (const auto& sample : set.samples) {
    const auto counts = sim.run(sample, sample.span + settle.value_or(sample.span));
    predictions.push_back(decode_wta(counts).class_index);
  }
  return predictions;
}

ConfusionMatrix evaluate_confusion(const Network& net, const EncodedSet& set, std::optional<std::size_t> settle) {
  if (set.size() == 0) throw Error(ErrorCode::EmptyTrainingSet, "no samples to evaluate");
  if (set.labels.size() != set.size()) throw Error(ErrorCode::LengthMismatch, "sample/label count mismatch");
  if (net.outputs.size() != set.class_count) {
    throw Error(ErrorCode::IncompatibleSignatures, "network output count differs from class count");
  }
  return confusion_matrix(predict(net, set, settle), set.labels, set.class_count);
}

double evaluate_fitness(const Genome& g, const EncodedSet& set, std::optional<std::size_t> settle) {
  return macro_f1(evaluate_confusion(g.network, set, settle));
}

namespace {

// Fitness plus a graded margin used only to order genomes of equal fitness.
struct Score {
  double fitness = 0.0;
  double margin = 0.0;
};

// margin: mean over samples of (c_true - c_other) / (c_true + c_other + 1),
// c_other being the largest count among the wrong outputs. It moves before
// the WTA decision flips, which gives selection something to climb on
// macro-F1 plateaus.
Score evaluate_score(const Network& net, const EncodedSet& set, std::optional<std::size_t> settle) {
  if (set.size() == 0) throw Error(ErrorCode::EmptyTrainingSet, "no samples to evaluate");
  if (net.outputs.size() != set.class_count) {
    throw Error(ErrorCode::IncompatibleSignatures, "network output count differs from class count");
  }
  Simulator sim(net);
  ConfusionMatrix cm(set.class_count);
  double margin = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& sample = set.samples[i];
    const auto counts = sim.run(sample, sample.span + settle.value_or(sample.span));
    const std::size_t label = set.labels.at(i);
    cm.add(label, decode_wta(counts).class_index);
    double other = 0.0;
    for (std::size_t c = 0; c < counts.size(); ++c) {
      if (c != label) other = std::max(other, static_cast<double>(counts[c]));
    }
    const double own = counts.at(label);
    margin += (own - other) / (own + other + 1.0);
  }
  return {macro_f1(cm), margin / static_cast<double>(set.size())};
}

}  // namespace

std::string RunHistory::to_csv() const {
  std::string out = "generation,best_fitness,mean_fitness\n";
  char line[96];
  for (const auto& g : generations) {
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g\n", g.generation, g.best_fitness, g.mean_fitness);
    out += line;
  }
  return out;
}

RunHistory evolve(const EvolutionConfig& cfg, const EncodedSet& train, const EncodedSet& validation,
                  const GenerationCallback& on_generation) {
  validate_config(cfg);
  if (train.size() == 0 || validation.size() == 0) throw Error(ErrorCode::EmptyTrainingSet, "empty train or validation set");
  if (train.class_count != cfg.num_outputs || validation.class_count != cfg.num_outputs) {
    throw Error(ErrorCode::InvalidConfig, "num_outputs must equal the number of classes");
  }

  const std::size_t pop_size = cfg.population_size;
  std::uint64_t next_id = 1;
  std::vector<Genome> population;
  population.reserve(pop_size);
  for (std::size_t i = 0; i < pop_size; ++i) {
    Rng rng(derive_seed(cfg.master_seed, {0, i}));
    population.push_back(random_genome(cfg, rng, next_id++));
  }
  std::vector<std::optional<Score>> fitness(pop_size);

  RunHistory history;
  for (std::size_t gen = 0;; ++gen) {
    parallel_for(pop_size, cfg.threads, [&](std::size_t i) {
      if (!fitness[i]) fitness[i] = evaluate_score(population[i].network, train, cfg.settle_timesteps);
    });

    // rank by fitness, then margin, then newest first: preferring offspring on
    // full ties lets neutral variants drift instead of freezing on the oldest
    std::vector<std::size_t> rank(pop_size);
    std::iota(rank.begin(), rank.end(), 0);
    std::sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
      const Score& x = *fitness[a];
      const Score& y = *fitness[b];
      if (x.fitness != y.fitness) return x.fitness > y.fitness;
      if (x.margin != y.margin) return x.margin > y.margin;
      return population[a].id > population[b].id;
    });
    double sum = 0.0;
    for (const auto& f : fitness) sum += f->fitness;

    GenerationRecord record{gen, fitness[rank[0]]->fitness, sum / static_cast<double>(pop_size), population[rank[0]]};
    if (on_generation) on_generation(record);
    history.generations.push_back(std::move(record));

    const bool target_hit = cfg.target_fitness && history.generations.back().best_fitness >= *cfg.target_fitness;
    if (gen + 1 >= cfg.generations || target_hit) break;

    std::vector<Genome> next;
    std::vector<std::optional<Score>> next_fitness;
    next.reserve(pop_size);
    next_fitness.reserve(pop_size);
    for (std::size_t e = 0; e < cfg.elitism_count; ++e) {
      next.push_back(population[rank[e]]);
      next_fitness.push_back(fitness[rank[e]]);
    }
    auto tournament = [&](Rng& rng) -> const Genome& {
      std::size_t best = uniform_index(rng, pop_size);
      for (std::size_t t = 1; t < cfg.tournament_size; ++t) best = std::min(best, uniform_index(rng, pop_size));
      return population[rank[best]];
    };
    for (std::size_t slot = next.size(); slot < pop_size; ++slot) {
      Rng rng(derive_seed(cfg.master_seed, {gen + 1, slot}));
      const Genome& mother = tournament(rng);
      Genome child;
      if (uniform01(rng) < cfg.crossover_rate) {
        const Genome& father = tournament(rng);
        child = Genome{0, {mother.id, father.id}, crossover_networks(mother.network, father.network, cfg, rng)};
      } else {
        child = Genome{0, {mother.id}, mother.network};
      }
      mutate_network(child.network, cfg, rng);
      child.id = next_id++;
      next.push_back(std::move(child));
      next_fitness.emplace_back();
    }
    population = std::move(next);
    fitness = std::move(next_fitness);
  }

  history.final_best = history.generations.back().best;
  history.final_train_fitness = history.generations.back().best_fitness;
  history.validation_fitness = evaluate_fitness(history.final_best, validation, cfg.settle_timesteps);
  return history;
}

}  // namespace v2s
