#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "ldt/gf.hpp"
#include "test_util.hpp"

using namespace ldt;

TEST_CASE("primality validation") {
  for (std::uint32_t q : {2u, 3u, 5u, 7u, 11u, 101u, 2147483647u}) CHECK_NOTHROW(Field f(q));
  for (std::uint32_t q : {0u, 1u, 4u, 6u, 9u, 10u, 91u}) {
    CHECK_THROWS_AS(Field f(q), std::invalid_argument);
  }
}

TEST_CASE("basic arithmetic examples") {
  Field f(7);
  CHECK(f.add(3, 5) == 1);
  CHECK(f.add(0, 4) == 4);
  CHECK(f.add(6, 1) == 0);
  CHECK(f.inv(3) == 5);
  CHECK(f.inv(1) == 1);
  CHECK_THROWS_AS(f.inv(0), std::domain_error);

  Field f11(11);
  for (std::uint32_t a = 1; a < 11; ++a) CHECK(f11.mul(a, f11.inv(a)) == 1);
}

TEST_CASE("field axioms exhaustively for small q") {
  for (std::uint32_t q : {2u, 3u, 5u, 7u}) {
    Field f(q);
    for (std::uint32_t a = 0; a < q; ++a) {
      for (std::uint32_t b = 0; b < q; ++b) {
        CHECK(f.add(a, b) == f.add(b, a));
        CHECK(f.mul(a, b) == f.mul(b, a));
        CHECK(f.sub(f.add(a, b), b) == a);
        for (std::uint32_t c = 0; c < q; ++c) {
          CHECK(f.add(f.add(a, b), c) == f.add(a, f.add(b, c)));
          CHECK(f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c)));
          CHECK(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)));
        }
      }
      if (a != 0) CHECK(f.mul(a, f.inv(a)) == 1 % q);
    }
  }
}

TEST_CASE("pow matches repeated multiplication") {
  Field f(13);
  for (std::uint32_t a = 0; a < 13; ++a) {
    std::uint32_t acc = 1;
    for (int e = 0; e < 20; ++e) {
      CHECK(f.pow(a, e) == acc);
      acc = f.mul(acc, a);
    }
  }
}

TEST_CASE("mixed moduli are rejected") {
  Field a(7), b(11);
  CHECK_THROWS_AS(a.require_same(b), std::invalid_argument);
  CHECK_NOTHROW(a.require_same(Field(7)));
}

TEST_CASE("philox known answers") {
  std::uint32_t c0[4] = {0, 0, 0, 0};
  detail::philox4x32_10(c0, 0, 0);
  CHECK(c0[0] == 0x6627e8d5u);
  CHECK(c0[1] == 0xe169c58du);
  CHECK(c0[2] == 0xbc57ac4cu);
  CHECK(c0[3] == 0x9b00dbd8u);

  std::uint32_t c1[4] = {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu};
  detail::philox4x32_10(c1, 0xffffffffu, 0xffffffffu);
  CHECK(c1[0] == 0x408f276du);
  CHECK(c1[1] == 0x41c83b0eu);
  CHECK(c1[2] == 0xa20bc7c6u);
  CHECK(c1[3] == 0x6d5451fdu);

  std::uint32_t c2[4] = {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u};
  detail::philox4x32_10(c2, 0xa4093822u, 0x299f31d0u);
  CHECK(c2[0] == 0xd16cfe09u);
  CHECK(c2[1] == 0x94fdccebu);
  CHECK(c2[2] == 0x5001e420u);
  CHECK(c2[3] == 0x24126ea1u);
}

TEST_CASE("siphash known answers") {
  const std::uint64_t k0 = 0x0706050403020100ull;
  const std::uint64_t k1 = 0x0f0e0d0c0b0a0908ull;
  std::vector<std::uint8_t> empty;
  CHECK(siphash24(k0, k1, empty) == 0x726fdb47dd0e0e31ull);
  std::vector<std::uint8_t> one{0x00};
  CHECK(siphash24(k0, k1, one) == 0x74f839c593dc67fdull);
  std::vector<std::uint8_t> paper(15);
  for (int i = 0; i < 15; ++i) paper[i] = static_cast<std::uint8_t>(i);
  CHECK(siphash24(k0, k1, paper) == 0xa129ca6149be45e5ull);
}

TEST_CASE("streams are deterministic and distinct") {
  RngStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 64; ++i) {
    const std::uint64_t va = a.next_u64();
    CHECK(va == b.next_u64());
    differs_c |= va != c.next_u64();
    differs_d |= va != d.next_u64();
  }
  CHECK(differs_c);
  CHECK(differs_d);
}

TEST_CASE("derive_seed separates tags") {
  CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
  CHECK(derive_seed(1, "a") != derive_seed(2, "a"));
  CHECK(derive_seed(1, "a", 0) != derive_seed(1, "a", 1));
  CHECK(derive_seed(5, "x") == derive_seed(5, "x"));
}

TEST_CASE("uniform field draws pass chi-squared in GF(11)") {
  Field f(11);
  RngStream rng(2024, 0);
  std::vector<std::uint64_t> counts(11, 0);
  const std::uint64_t n = 100000;
  for (std::uint64_t i = 0; i < n; ++i) ++counts[rng.field_element(f)];
  const double stat = testutil::chi2_uniform(counts, n);
  CHECK(stat < testutil::chi2_crit_001(10));
}

TEST_CASE("empirical mean in GF(101) within three sigmas") {
  Field f(101);
  RngStream rng(99, 1);
  const std::uint64_t n = 100000;
  double sum = 0;
  for (std::uint64_t i = 0; i < n; ++i) sum += rng.field_element(f);
  const double mean = sum / n;
  const double sigma = std::sqrt((101.0 * 101.0 - 1.0) / 12.0 / n);
  CHECK(std::abs(mean - 50.0) < 3 * sigma);
}

TEST_CASE("uniform bound edge cases") {
  RngStream rng(7, 0);
  CHECK(rng.uniform(1) == 0);
  CHECK_THROWS_AS(rng.uniform(0), std::invalid_argument);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 200; ++i) seen.insert(rng.uniform(3));
  CHECK(seen == std::set<std::uint64_t>{0, 1, 2});
}

TEST_CASE("bernoulli extremes") {
  RngStream rng(3, 0);
  CHECK_FALSE(rng.bernoulli(0.0));
  CHECK(rng.bernoulli(1.0));
  int heads = 0;
  for (int i = 0; i < 10000; ++i) heads += rng.bernoulli(0.25);
  CHECK(std::abs(heads / 10000.0 - 0.25) < 0.02);
}
