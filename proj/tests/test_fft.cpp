#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "pdm/fft.hpp"

using namespace pdm;

TEST_CASE("FFT matches naive DFT for assorted lengths") {
  std::mt19937_64 rng(11);
  // powers of two, smooth mixed-radix, primes above the direct radix limit (Bluestein)
  for (std::size_t n : {1, 2, 8, 64, 256, 2000, 3, 45, 49, 97, 127, 1009, 2 * 67}) {
    const auto x = oracle::random_vector(rng, n);
    const auto expected = oracle::naive_dft(x);
    const auto got = fft_plan(n)->forward_real(x);
    double diff = 0, scale = 0;
    for (std::size_t k = 0; k < n; ++k) {
      diff = std::max(diff, std::abs(got[k] - expected[k]));
      scale = std::max(scale, std::abs(expected[k]));
    }
    CAPTURE(n);
    CHECK(diff <= 1e-11 * std::max(scale, 1.0));
  }
}

TEST_CASE("FFT in-place and complex input") {
  std::mt19937_64 rng(5);
  const std::size_t n = 360;
  std::vector<cplx> x(n);
  for (auto& v : x) v = {std::uniform_real_distribution<double>(-1, 1)(rng), std::uniform_real_distribution<double>(-1, 1)(rng)};
  const FftPlan plan(n);
  const auto out = plan.forward(x);
  auto inplace = x;
  plan.forward(inplace, inplace);
  for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(out[k] - inplace[k]) < 1e-12);
  // linearity against real/imag split
  std::vector<double> re(n), im(n);
  for (std::size_t i = 0; i < n; ++i) {
    re[i] = x[i].real();
    im[i] = x[i].imag();
  }
  const auto fr = plan.forward_real(re), fi = plan.forward_real(im);
  for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(out[k] - (fr[k] + cplx{0, 1} * fi[k])) < 1e-10);
}

TEST_CASE("magnitude_spectrum zero pads") {
  std::vector<double> x{1, 2, 3};
  const auto m = magnitude_spectrum(x, 8);
  const auto expected = oracle::naive_magnitudes({1, 2, 3, 0, 0, 0, 0, 0});
  REQUIRE(m.size() == 5);
  for (std::size_t k = 0; k < m.size(); ++k) CHECK(m[k] == doctest::Approx(expected[k]).epsilon(1e-12));
}

TEST_CASE("FftPlan rejects zero length") { CHECK_THROWS(FftPlan(0)); }
