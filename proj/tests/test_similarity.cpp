#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "pdm/error.hpp"
#include "pdm/similarity.hpp"

using namespace pdm;

TEST_CASE("cosine examples") {
  const std::vector<double> x{1, 2, 3}, y{4, 5, 6};
  CHECK(cosine(x, x) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cosine(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 0.0);
  CHECK(cosine(x, y) == doctest::Approx(0.974631846197076).epsilon(1e-14));
  try {
    cosine(x, std::vector<double>{0, 0, 0});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::undefined_similarity);
  }
  CHECK_THROWS_AS(cosine(x, std::vector<double>{1, 2}), Error);
}

TEST_CASE("euclidean examples") {
  const std::vector<double> x{0.5, -2, 7};
  CHECK(euclidean(x, x) == 0.0);
  CHECK(euclidean(std::vector<double>{0, 0}, std::vector<double>{3, 4}) == 5.0);
  try {
    euclidean(x, std::vector<double>{1});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_input);
  }
}

TEST_CASE("ssm identity, constants and errors") {
  std::mt19937_64 rng(3);
  const auto x = oracle::random_vector(rng, 50);
  CHECK(ssm(x, x) == 1.0);
  const std::vector<double> c(20, 4.0);
  const auto r = ssm_detail(c, c);
  CHECK(r.value == 1.0);
  CHECK(r.degenerate);
  CHECK_THROWS_AS(ssm(std::vector<double>(5, 1.0), std::vector<double>(5, 1.0)), Error);
  CHECK_THROWS_AS(ssm(x, x, SsmParams{6}), Error);
  CHECK_THROWS_AS(ssm(x, x, SsmParams{7, 1, 0.0, 0.03}), Error);
}

TEST_CASE("ssm matches direct per-window evaluation") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 200; ++rep) {
    const auto x = oracle::random_vector(rng, 50, -3, 3);
    const auto y = oracle::random_vector(rng, 50, -1, 4);
    CHECK(std::abs(ssm(x, y) - oracle::direct_ssm(x, y, 7)) <= 1e-12);
  }
  const auto x = oracle::random_vector(rng, 64);
  const auto y = oracle::random_vector(rng, 64);
  CHECK(std::abs(ssm(x, y, SsmParams{9}) - oracle::direct_ssm(x, y, 9)) <= 1e-12);
}

TEST_CASE("ssm stride") {
  std::mt19937_64 rng(5);
  const auto x = oracle::random_vector(rng, 30);
  const auto y = oracle::random_vector(rng, 30);
  CHECK(std::abs(ssm(x, y, SsmParams{7, 3}) - oracle::direct_ssm(x, y, 7, 0.01, 0.03, 3)) <= 1e-12);
  CHECK(ssm(x, y, SsmParams{7, 3}) != ssm(x, y));
}

TEST_CASE("metric axioms on random triples") {
  std::mt19937_64 rng(1234);
  std::size_t violations = 0;
  for (int rep = 0; rep < 2000; ++rep) {
    const std::size_t n = 7 + rng() % 40;
    const auto x = oracle::random_vector(rng, n, -2, 2);
    const auto y = oracle::random_vector(rng, n, -2, 2);
    const auto z = oracle::random_vector(rng, n, -2, 2);
    for (auto m : {MeasureKind::cosine, MeasureKind::euclidean, MeasureKind::ssm}) {
      if (similarity(m, x, y) != similarity(m, y, x)) ++violations;
    }
    const double c = cosine(x, y), s = ssm(x, y);
    if (c < -1 || c > 1 || s < -1 || s > 1) ++violations;
    if (euclidean(x, z) > euclidean(x, y) + euclidean(y, z) + 1e-12) ++violations;
    std::vector<double> scaled(x);
    for (auto& v : scaled) v *= 4.0;  // power of two: exact
    if (cosine(scaled, y) != cosine(x, y)) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("polarity and parsing") {
  CHECK(polarity(MeasureKind::cosine) == Polarity::maximize);
  CHECK(polarity(MeasureKind::ssm) == Polarity::maximize);
  CHECK(polarity(MeasureKind::euclidean) == Polarity::minimize);
  CHECK(parse_measure_kind("SSIM") == MeasureKind::ssm);
  CHECK(to_string(MeasureKind::euclidean) == "euclidean");
  CHECK_FALSE(parse_measure_kind("manhattan").has_value());
}
