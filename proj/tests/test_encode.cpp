#include <cmath>
#include <random>

#include "doctest.h"
#include "v2s/encode.hpp"
#include "v2s/error.hpp"

using namespace v2s;

namespace {

void check_pair(const std::array<SlotCharge, 2>& got, std::size_t k, double lo_value, double hi_value) {
  CHECK(got[0].offset == k);
  CHECK(got[1].offset == k + 1);
  CHECK(got[0].value == doctest::Approx(lo_value).epsilon(1e-15));
  CHECK(got[1].value == doctest::Approx(hi_value).epsilon(1e-15));
}

}  // namespace

TEST_CASE("argyle boundary and midpoint values") {
  check_pair(argyle_encode_value(0.0), 0, 1.0, 0.0);
  check_pair(argyle_encode_value(0.5), 1, 0.5, 0.5);
  check_pair(argyle_encode_value(1.0), 2, 0.0, 1.0);
  check_pair(argyle_encode_value(1.0 / 6.0), 0, 0.5, 0.5);
}

TEST_CASE("argyle rejects values outside [0,1]") {
  for (double v : {-1e-9, 1.0 + 1e-9, std::nan("")}) {
    try {
      argyle_encode_value(v);
      FAIL("accepted " << v);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::OutOfRange);
    }
  }
  CHECK_THROWS_AS(argyle_encode_value(0.5, {1, 3}), Error);
}

TEST_CASE("argyle pairs are complementary and continuous") {
  std::mt19937_64 rng(2);
  for (std::size_t npv : {2u, 4u, 7u}) {
    const EncoderConfig cfg{npv, 3};
    for (int i = 0; i < 2000; ++i) {
      const double v = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const auto p = argyle_encode_value(v, cfg);
      CHECK(std::abs(p[0].value + p[1].value - 1.0) <= 1e-12);
      CHECK(p[1].offset < npv);
      // reconstruct the encoded value by linear interpolation
      const double decoded = (static_cast<double>(p[0].offset) * p[0].value + static_cast<double>(p[1].offset) * p[1].value) /
                             static_cast<double>(npv - 1);
      CHECK(decoded == doctest::Approx(v).epsilon(1e-12));
    }
  }
  // at an interior region boundary the vanishing spike has value 0
  const auto at_third = argyle_encode_value(1.0 / 3.0);
  const double carried = at_third[0].offset == 1 ? at_third[0].value : at_third[1].value;
  CHECK(carried == doctest::Approx(1.0));
}

TEST_CASE("encode_sample spike layout") {
  for (std::size_t n : {5u, 10u, 50u, 100u}) {
    FeatureVector fv{std::vector<std::uint32_t>(n, 3), std::vector<std::uint32_t>(n, 9), 50'000, {}};
    const auto train = encode_sample(fv, {0, 38});
    CHECK(train.span == 3 * n);
    CHECK(train.spikes.size() == 4 * n);
    for (const auto& s : train.spikes) {
      CHECK(s.time < train.span);
      CHECK(s.time % 3 == 0);
      CHECK(s.input_index < 8);
    }
  }
}

TEST_CASE("all-zero vector encodes to v = 0 pairs") {
  FeatureVector fv{std::vector<std::uint32_t>(4, 0), std::vector<std::uint32_t>(4, 0), 50'000, {}};
  const auto train = encode_sample(fv, {0, 38});
  REQUIRE(train.spikes.size() == 16);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto* s = &train.spikes[4 * i];
    CHECK(s[0] == InputSpike{0, 3 * i, 1.0});
    CHECK(s[1] == InputSpike{1, 3 * i, 0.0});
    CHECK(s[2] == InputSpike{4, 3 * i, 1.0});
    CHECK(s[3] == InputSpike{5, 3 * i, 0.0});
  }
}

TEST_CASE("ON values use slots 0..3 and OFF values 4..7") {
  FeatureVector fv{{38}, {19}, 1, {}};
  const auto train = encode_sample(fv, {0, 38});
  REQUIRE(train.spikes.size() == 4);
  CHECK(train.spikes[0] == InputSpike{2, 0, 0.0});
  CHECK(train.spikes[1] == InputSpike{3, 0, 1.0});
  CHECK(train.spikes[2].input_index == 5);
  CHECK(train.spikes[3].input_index == 6);
  CHECK(write_spike_train_csv(train).rfind("input,time,value\n2,0,0\n3,0,1\n", 0) == 0);
}
