#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "aggfw/random.hpp"

using aggfw::CounterRng;
using aggfw::Philox4x32;
using aggfw::Stream;

TEST_CASE("philox known answers") {
  // Reference vectors shipped with Random123 (kat_vectors, philox4x32_10).
  CHECK(Philox4x32::generate({0, 0, 0, 0}, {0, 0}) ==
        Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu,
                            0x9b00dbd8u});
  CHECK(Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu,
                              0xffffffffu},
                             {0xffffffffu, 0xffffffffu}) ==
        Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u,
                            0x6d5451fdu});
  CHECK(Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu,
                              0x03707344u},
                             {0xa4093822u, 0x299f31d0u}) ==
        Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u,
                            0x24126ea1u});
}

TEST_CASE("uniform draws are in range and replayable") {
  const CounterRng rng(42, Stream::kMonteCarlo);
  for (std::uint32_t i = 0; i < 1000; ++i) {
    const double u = rng.uniform(3, 7, i);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(u == rng.uniform(3, 7, i));
    const double v = rng.uniform32(3, 7, i);
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("uniform32 reads its own word of the shared block") {
  const CounterRng rng(9, Stream::kBernoulli);
  for (std::uint32_t i = 0; i < 16; ++i) {
    const auto w = rng.words(1, 2, i / 4);
    CHECK(rng.uniform32(1, 2, i) == static_cast<double>(w[i % 4]) / 4294967296.0);
  }
}

TEST_CASE("for_each_bernoulli matches pointwise draws") {
  const CounterRng rng(5, Stream::kBernoulli);
  for (double omega : {0.0, 0.3, 0.77, 1.0}) {
    std::vector<std::uint32_t> hits;
    rng.for_each_bernoulli(omega, 4, 1, 103,
                           [&](std::uint32_t i) { hits.push_back(i); });
    std::vector<std::uint32_t> expect;
    for (std::uint32_t i = 0; i < 103; ++i) {
      if (rng.bernoulli(omega, 4, 1, i)) expect.push_back(i);
    }
    CHECK(hits == expect);
  }
  std::size_t count = 0;
  rng.for_each_bernoulli(1.0, 0, 0, 50, [&](std::uint32_t) { ++count; });
  CHECK(count == 50);
}

TEST_CASE("fair coin frequency within three sigma") {
  const CounterRng rng(2024, Stream::kMonteCarlo);
  std::size_t ones = 0;
  const std::uint32_t n = 100000;
  for (std::uint32_t t = 0; t < n; ++t) ones += rng.bernoulli(0.5, 0, t, 0);
  const double freq = static_cast<double>(ones) / n;
  CHECK(freq >= 0.494);
  CHECK(freq <= 0.506);
}

TEST_CASE("streams and seeds decorrelate") {
  const CounterRng a(1, Stream::kBernoulli);
  const CounterRng b(1, Stream::kSelection);
  const CounterRng c(2, Stream::kBernoulli);
  const CounterRng d(std::uint64_t{1} << 32 | 1, Stream::kBernoulli);
  std::set<double> seen;
  for (const CounterRng* r : {&a, &b, &c, &d}) seen.insert(r->uniform(0, 0, 0));
  CHECK(seen.size() == 4);
}
