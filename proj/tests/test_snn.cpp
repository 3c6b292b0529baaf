#include <limits>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "v2s/error.hpp"
#include "v2s/snn.hpp"

using namespace v2s;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Network chain(double weight, int delay) {
  Network net;
  net.neurons = {{0, NeuronKind::input, 1.0, 1.0}, {1, NeuronKind::output, 1.0, 1.0}};
  net.synapses = {{0, 1, weight, delay}};
  net.inputs = {0};
  net.outputs = {1};
  return net;
}

SpikeTrain spikes(std::vector<InputSpike> s, std::size_t span) { return {std::move(s), span}; }

ErrorCode validation_error(const Network& net) {
  try {
    validate_network(net);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("network unexpectedly valid");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("validate_network") {
  Network three = chain(1.0, 1);
  three.neurons.push_back({2, NeuronKind::hidden, 0.5, 0.9});
  three.synapses.push_back({1, 2, 0.3, 3});
  CHECK_NOTHROW(validate_network(three));

  auto dangling = three;
  dangling.synapses.push_back({2, 99, 1.0, 1});
  CHECK(validation_error(dangling) == ErrorCode::DanglingSynapse);

  auto zero_delay = three;
  zero_delay.synapses[0].delay = 0;
  CHECK(validation_error(zero_delay) == ErrorCode::BadDelay);

  auto dup = three;
  dup.neurons.push_back({2, NeuronKind::hidden, 1.0, 1.0});
  CHECK(validation_error(dup) == ErrorCode::DuplicateId);

  auto no_outputs = three;
  no_outputs.outputs.clear();
  CHECK(validation_error(no_outputs) == ErrorCode::MissingIO);

  auto wrong_kind = three;
  wrong_kind.outputs = {2};
  CHECK(validation_error(wrong_kind) == ErrorCode::MissingIO);

  auto bad_leak = three;
  bad_leak.neurons[2].leak = 1.5;
  CHECK(validation_error(bad_leak) == ErrorCode::BadParameter);

  auto self_loop = three;
  self_loop.synapses.push_back({2, 2, -1.0, 1});
  CHECK_NOTHROW(validate_network(self_loop));
}

TEST_CASE("immediate threshold crossing fires at t = 0") {
  std::vector<FiredSpike> trace;
  const auto counts = run(chain(1.0, 1), spikes({{0, 0, 1.0}}, 1), 1, &trace);
  CHECK(trace == std::vector<FiredSpike>{{0, 0}});
  CHECK(counts == OutputCounts{0});  // the output neuron's charge lands at t = 1, outside the window

  // the same network over two timesteps lets the output fire once
  CHECK(run(chain(1.0, 1), spikes({{0, 0, 1.0}}, 1), 2) == OutputCounts{1});
}

TEST_CASE("delay-2 chain hand trace") {
  std::vector<FiredSpike> trace;
  const auto counts = run(chain(1.0, 2), spikes({{0, 0, 1.0}}, 1), 3, &trace);
  CHECK(trace == std::vector<FiredSpike>{{0, 0}, {2, 1}});
  CHECK(counts == OutputCounts{1});
  // two timesteps are not enough for the delayed charge
  CHECK(run(chain(1.0, 2), spikes({{0, 0, 1.0}}, 1), 2) == OutputCounts{0});
}

TEST_CASE("leak contrast") {
  auto net = chain(1.0, 1);
  const auto train = spikes({{0, 0, 0.5}, {0, 1, 0.5}}, 2);

  net.neurons[0].leak = 0.0;
  std::vector<FiredSpike> trace;
  run(net, train, 4, &trace);
  CHECK(trace.empty());

  net.neurons[0].leak = 1.0;
  trace.clear();
  run(net, train, 4, &trace);
  REQUIRE(!trace.empty());
  CHECK(trace.front() == FiredSpike{1, 0});
}

TEST_CASE("charge respects synapse delay") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const Network net = oracle::random_network(rng);
    SpikeTrain train;
    train.span = 12;
    for (std::size_t t = 0; t < train.span; t += 3) {
      for (std::size_t slot = 0; slot < net.inputs.size(); ++slot) {
        train.spikes.push_back({slot, t, std::uniform_real_distribution<double>(0.0, 1.0)(rng)});
      }
    }
    std::vector<FiredSpike> trace;
    run(net, train, 40, &trace);
    // every non-input firing needs a presynaptic firing at exactly t - delay
    for (const auto& fired : trace) {
      bool is_input = std::find(net.inputs.begin(), net.inputs.end(), fired.neuron) != net.inputs.end();
      if (is_input) continue;
      bool caused = false;
      for (const auto& s : net.synapses) {
        if (s.to != fired.neuron || fired.time < static_cast<std::size_t>(s.delay)) continue;
        caused |= std::find(trace.begin(), trace.end(), FiredSpike{fired.time - s.delay, s.from}) != trace.end();
      }
      CHECK(caused);
    }
  }
}

TEST_CASE("infinite thresholds silence every output") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    Network net = oracle::random_network(rng);
    for (auto& n : net.neurons) n.threshold = kInf;
    SpikeTrain train{{{0, 0, 1.0}, {0, 3, 1.0}}, 6};
    const auto counts = run(net, train, 12);
    CHECK(std::all_of(counts.begin(), counts.end(), [](auto c) { return c == 0; }));
  }
}

TEST_CASE("without synapses only input neurons fire") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    Network net = oracle::random_network(rng);
    net.synapses.clear();
    SpikeTrain train;
    train.span = 9;
    for (std::size_t t = 0; t < 9; ++t) train.spikes.push_back({0, t, 1.0});
    std::vector<FiredSpike> trace;
    run(net, train, 18, &trace);
    for (const auto& f : trace) CHECK(f.neuron == net.inputs[0]);
  }
}

TEST_CASE("simulation is deterministic and simulator instances are reusable") {
  std::mt19937_64 rng(8);
  const Network net = oracle::random_network(rng);
  SpikeTrain train;
  train.span = 30;
  for (std::size_t t = 0; t < 30; t += 3) train.spikes.push_back({t % net.inputs.size(), t, 0.9});
  Simulator sim(net);
  const auto first = sim.run(train, 60);
  for (int i = 0; i < 20; ++i) {
    CHECK(sim.run(train, 60) == first);
    CHECK(run(net, train, 60) == first);
  }
}

TEST_CASE("run rejects a window shorter than the spike train") {
  CHECK_THROWS_AS(run(chain(1.0, 1), spikes({{0, 0, 1.0}}, 5), 4), Error);
  CHECK_THROWS_AS(run(chain(1.0, 1), spikes({{3, 0, 1.0}}, 1), 2), Error);
}

TEST_CASE("decode_wta") {
  const std::vector<std::uint32_t> a{3, 0, 1, 0, 2};
  CHECK(decode_wta(a) == Decision{0, false});
  const std::vector<std::uint32_t> tie{2, 2, 0};
  CHECK(decode_wta(tie) == Decision{0, false});
  const std::vector<std::uint32_t> silent(5, 0);
  CHECK(decode_wta(silent) == Decision{0, true});
  const std::vector<std::uint32_t> later{0, 1, 4, 4};
  CHECK(decode_wta(later) == Decision{2, false});
  CHECK_THROWS_AS(decode_wta(std::vector<std::uint32_t>{}), Error);
}

TEST_CASE("decode_wta is invariant under positive scaling") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::uint32_t> counts(1 + rng() % 6);
    for (auto& c : counts) c = static_cast<std::uint32_t>(rng() % 4);
    const std::uint32_t factor = 1 + static_cast<std::uint32_t>(rng() % 9);
    auto scaled = counts;
    for (auto& c : scaled) c *= factor;
    CHECK(decode_wta(scaled) == decode_wta(counts));
  }
}

TEST_CASE("network documents round trip exactly") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    const Network net = oracle::random_network(rng);
    CHECK(parse_network_document(write_network_document(net)) == net);
  }
  auto silent = chain(1.0, 1);
  silent.neurons[1].threshold = kInf;
  CHECK(parse_network_document(write_network_document(silent)) == silent);
}

TEST_CASE("network document schema") {
  const auto minimal = parse_network_document(
      R"({"neurons":[{"id":0,"kind":"input","threshold":1.0,"leak":1.0},{"id":1,"kind":"output","threshold":1,"leak":0.5}],)"
      R"("synapses":[],"inputs":[0],"outputs":[1]})");
  CHECK(minimal.neurons.size() == 2);

  auto code = [](std::string_view doc) {
    try {
      parse_network_document(doc);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  CHECK(code(R"({"neurons":[],"synapses":[],"inputs":[],"outputs":[],"extra":1})") == ErrorCode::SchemaViolation);
  CHECK(code(R"({"neurons":[{"id":0,"kind":"input","threshold":1,"leak":1,"bias":0}],"synapses":[],"inputs":[0],"outputs":[]})") ==
        ErrorCode::SchemaViolation);
  CHECK(code(R"({"neurons":[{"id":0,"kind":"glial","threshold":1,"leak":1}],"synapses":[],"inputs":[0],"outputs":[]})") ==
        ErrorCode::SchemaViolation);
  CHECK(code(R"({"neurons":[{"id":0,"kind":"input","threshold":1,"leak":1}],"synapses":[],"inputs":[0],"outputs":[]})") ==
        ErrorCode::MissingIO);
  CHECK(code(R"({"neurons":[],"synapses":[]})") == ErrorCode::SchemaViolation);
  CHECK(code("[1,2") == ErrorCode::SchemaViolation);
}
