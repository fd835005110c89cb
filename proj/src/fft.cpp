#include "pdm/fft.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "pdm/error.hpp"

namespace pdm {

namespace {

constexpr std::size_t kMaxDirectRadix = 64;

std::vector<std::size_t> factorize(std::size_t n) {
  std::vector<std::size_t> f;
  for (std::size_t p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      f.push_back(p);
      n /= p;
    }
  }
  if (n > 1) f.push_back(n);
  return f;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

}  // namespace

struct FftPlan::Bluestein {
  std::size_t m{0};
  std::unique_ptr<FftPlan> inner;
  std::vector<cplx> chirp;        // exp(-i*pi*k^2/n), k < n
  std::vector<cplx> kernel_freq;  // DFT of the conjugate chirp, wrapped to length m
};

FftPlan::FftPlan(std::size_t n) : n_(n) {
  if (n == 0) throw Error(ErrorCode::invalid_input, "FftPlan: length must be positive");
  const auto factors = factorize(n);
  const bool direct = std::all_of(factors.begin(), factors.end(),
                                  [](std::size_t p) { return p <= kMaxDirectRadix; });

  twiddles_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    twiddles_[k] = {std::cos(angle), std::sin(angle)};
  }

  if (direct) {
    factors_ = factors;
    return;
  }

  bluestein_ = std::make_unique<Bluestein>();
  auto& b = *bluestein_;
  b.m = next_pow2(2 * n - 1);
  b.inner = std::make_unique<FftPlan>(b.m);
  b.chirp.resize(n);
  const std::size_t two_n = 2 * n;
  // k^2 mod 2n, stepped incrementally, keeps the phase argument small.
  std::size_t k2 = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double angle = -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
    b.chirp[k] = {std::cos(angle), std::sin(angle)};
    k2 = (k2 + 2 * k + 1) % two_n;
  }
  std::vector<cplx> kernel(b.m, cplx{0.0, 0.0});
  kernel[0] = std::conj(b.chirp[0]);
  for (std::size_t k = 1; k < n; ++k) {
    kernel[k] = std::conj(b.chirp[k]);
    kernel[b.m - k] = std::conj(b.chirp[k]);
  }
  b.kernel_freq = b.inner->forward(kernel);
}

FftPlan::~FftPlan() = default;
FftPlan::FftPlan(FftPlan&&) noexcept = default;
FftPlan& FftPlan::operator=(FftPlan&&) noexcept = default;

void FftPlan::recurse(const cplx* in, std::size_t stride, cplx* out, std::size_t n,
                      std::size_t factor_index, std::size_t twiddle_stride) const {
  if (n == 1) {
    out[0] = in[0];
    return;
  }
  const std::size_t p = factors_[factor_index];
  const std::size_t m = n / p;
  for (std::size_t r = 0; r < p; ++r) {
    recurse(in + r * stride, stride * p, out + r * m, m, factor_index + 1, twiddle_stride * p);
  }

  if (p == 2) {
    for (std::size_t k = 0; k < m; ++k) {
      const cplx t = out[m + k] * twiddles_[k * twiddle_stride];
      const cplx u = out[k];
      out[k] = u + t;
      out[m + k] = u - t;
    }
    return;
  }

  // out[r*m + k] holds sub-transform r at bin k; the outputs X[k + q*m] live at
  // the same p positions, so each k is combined in place through a scratch row.
  const std::size_t root_stride = n_ / p;  // W_p^j = twiddles_[j * root_stride]
  cplx scratch[kMaxDirectRadix];
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t r = 0; r < p; ++r) {
      scratch[r] = out[r * m + k] * twiddles_[r * k * twiddle_stride];
    }
    for (std::size_t q = 0; q < p; ++q) {
      cplx acc = scratch[0];
      for (std::size_t r = 1; r < p; ++r) acc += scratch[r] * twiddles_[((r * q) % p) * root_stride];
      out[q * m + k] = acc;
    }
  }
}

void FftPlan::forward(std::span<const cplx> in, std::span<cplx> out) const {
  if (in.size() != n_ || out.size() != n_) {
    throw Error(ErrorCode::invalid_input, "FftPlan::forward: length mismatch");
  }
  if (!bluestein_) {
    if (in.data() == out.data()) {
      std::vector<cplx> copy(in.begin(), in.end());
      recurse(copy.data(), 1, out.data(), n_, 0, 1);
    } else {
      recurse(in.data(), 1, out.data(), n_, 0, 1);
    }
    return;
  }

  const auto& b = *bluestein_;
  std::vector<cplx> a(b.m, cplx{0.0, 0.0});
  for (std::size_t k = 0; k < n_; ++k) a[k] = in[k] * b.chirp[k];
  std::vector<cplx> af(b.m);
  b.inner->forward(a, af);
  for (std::size_t k = 0; k < b.m; ++k) af[k] = std::conj(af[k] * b.kernel_freq[k]);
  // inverse transform via conj(F(conj(.)))/m
  b.inner->forward(af, a);
  const double scale = 1.0 / static_cast<double>(b.m);
  for (std::size_t k = 0; k < n_; ++k) out[k] = b.chirp[k] * std::conj(a[k]) * scale;
}

std::vector<cplx> FftPlan::forward(std::span<const cplx> in) const {
  std::vector<cplx> out(n_);
  forward(in, out);
  return out;
}

std::vector<cplx> FftPlan::forward_real(std::span<const double> in) const {
  std::vector<cplx> buf(in.begin(), in.end());
  return forward(buf);
}

std::shared_ptr<const FftPlan> fft_plan(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, std::shared_ptr<const FftPlan>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_shared<const FftPlan>(n);
  return slot;
}

std::vector<double> magnitude_spectrum(std::span<const double> x, std::size_t nfft) {
  if (nfft == 0) throw Error(ErrorCode::invalid_input, "magnitude_spectrum: nfft must be positive");
  std::vector<cplx> buf(nfft, cplx{0.0, 0.0});
  const std::size_t n = std::min(nfft, x.size());
  for (std::size_t i = 0; i < n; ++i) buf[i] = x[i];
  const auto plan = fft_plan(nfft);
  plan->forward(buf, buf);
  std::vector<double> mag(nfft / 2 + 1);
  for (std::size_t k = 0; k < mag.size(); ++k) mag[k] = std::abs(buf[k]);
  return mag;
}

}  // namespace pdm
