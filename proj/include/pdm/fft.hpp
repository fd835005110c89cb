#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace pdm {

using cplx = std::complex<double>;

// Forward DFT of a fixed length, X[k] = sum_n x[n] exp(-2*pi*i*k*n/N).
//
// Lengths whose prime factors are all <= 64 run a recursive mixed-radix
// Cooley-Tukey (radix-2 butterflies for the factors of two, direct small DFTs
// for the odd factors). Anything else goes through Bluestein's chirp-z
// transform on a power-of-two plan. Twiddles are tabulated once per plan.
// A plan is immutable after construction and can be shared between threads.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);
  ~FftPlan();
  FftPlan(FftPlan&&) noexcept;
  FftPlan& operator=(FftPlan&&) noexcept;

  std::size_t size() const { return n_; }

  void forward(std::span<const cplx> in, std::span<cplx> out) const;
  std::vector<cplx> forward(std::span<const cplx> in) const;
  std::vector<cplx> forward_real(std::span<const double> in) const;

 private:
  struct Bluestein;

  void recurse(const cplx* in, std::size_t stride, cplx* out, std::size_t n,
               std::size_t factor_index, std::size_t twiddle_stride) const;

  std::size_t n_{0};
  std::vector<std::size_t> factors_;
  std::vector<cplx> twiddles_;  // exp(-2*pi*i*k/n), k < n
  std::unique_ptr<Bluestein> bluestein_;
};

// Process-wide cache of plans keyed by length. Thread-safe.
std::shared_ptr<const FftPlan> fft_plan(std::size_t n);

// |DFT| of `x` zero-padded (or truncated) to `nfft`, bins 0..nfft/2.
std::vector<double> magnitude_spectrum(std::span<const double> x, std::size_t nfft);

}  // namespace pdm
