#include "pdm/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pdm/error.hpp"

namespace pdm {

namespace {

// Half-sample symmetric extension: ... x1 x0 | x0 x1 ... x(n-1) | x(n-1) x(n-2) ...
inline std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
  const auto period = static_cast<std::ptrdiff_t>(2 * n);
  std::ptrdiff_t j = i % period;
  if (j < 0) j += period;
  if (j >= static_cast<std::ptrdiff_t>(n)) j = period - 1 - j;
  return static_cast<std::size_t>(j);
}

}  // namespace

int max_decomposition_depth(std::size_t n) {
  if (n < db4::kTaps) return 0;
  return static_cast<int>(std::floor(std::log2(static_cast<double>(n) / (db4::kTaps - 1))));
}

DwtPair dwt_step(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) throw Error(ErrorCode::invalid_input, "dwt_step: empty input");
  const std::size_t out_len = dwt_length(n);
  DwtPair out{std::vector<double>(out_len), std::vector<double>(out_len)};
  for (std::size_t k = 0; k < out_len; ++k) {
    double lo = 0.0, hi = 0.0;
    const auto centre = static_cast<std::ptrdiff_t>(2 * k + 1);
    for (std::size_t j = 0; j < db4::kTaps; ++j) {
      const std::ptrdiff_t idx = centre - static_cast<std::ptrdiff_t>(j);
      const double v = (idx >= 0 && idx < static_cast<std::ptrdiff_t>(n))
                           ? x[static_cast<std::size_t>(idx)]
                           : x[reflect(idx, n)];
      lo += db4::dec_lo[j] * v;
      hi += db4::dec_hi[j] * v;
    }
    out.approx[k] = lo;
    out.detail[k] = hi;
  }
  return out;
}

std::vector<double> idwt_step(std::span<const double> approx, std::span<const double> detail,
                              std::size_t out_len) {
  if (approx.size() != detail.size()) {
    throw Error(ErrorCode::corrupt_tree, "idwt_step: approximation/detail length mismatch");
  }
  if (dwt_length(out_len) != approx.size()) {
    throw Error(ErrorCode::corrupt_tree, "idwt_step: " + std::to_string(approx.size()) +
                                             " coefficients cannot reconstruct " +
                                             std::to_string(out_len) + " samples");
  }
  // x[n] = sum_k a[k] g[n + L - 2 - 2k] + d[k] h[n + L - 2 - 2k]
  constexpr auto taps = static_cast<std::ptrdiff_t>(db4::kTaps);
  const auto m = static_cast<std::ptrdiff_t>(approx.size());
  std::vector<double> out(out_len, 0.0);
  for (std::size_t n = 0; n < out_len; ++n) {
    const std::ptrdiff_t shifted = static_cast<std::ptrdiff_t>(n) + taps - 2;
    // 0 <= shifted - 2k <= L - 1
    const std::ptrdiff_t k_lo = std::max<std::ptrdiff_t>(0, (shifted - (taps - 1) + 1) / 2);
    const std::ptrdiff_t k_hi = std::min<std::ptrdiff_t>(m - 1, shifted / 2);
    double acc = 0.0;
    for (std::ptrdiff_t k = k_lo; k <= k_hi; ++k) {
      const auto t = static_cast<std::size_t>(shifted - 2 * k);
      acc += approx[static_cast<std::size_t>(k)] * db4::rec_lo[t] +
             detail[static_cast<std::size_t>(k)] * db4::rec_hi[t];
    }
    out[n] = acc;
  }
  return out;
}

WaveletPacketTree::WaveletPacketTree(std::vector<Level> levels) : levels_(std::move(levels)) {
  if (levels_.size() < 2) throw Error(ErrorCode::corrupt_tree, "wavelet packet tree needs depth >= 1");
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    if (levels_[l].size() != (std::size_t{1} << l)) {
      throw Error(ErrorCode::corrupt_tree,
                  "wavelet packet tree level " + std::to_string(l) + " has " +
                      std::to_string(levels_[l].size()) + " nodes");
    }
  }
}

const std::vector<double>& WaveletPacketTree::node(int level, std::size_t index) const {
  if (level < 0 || level > depth() || index >= levels_[static_cast<std::size_t>(level)].size()) {
    throw Error(ErrorCode::invalid_input, "wavelet packet tree: node out of range");
  }
  return levels_[static_cast<std::size_t>(level)][index];
}

std::vector<double>& WaveletPacketTree::node(int level, std::size_t index) {
  return const_cast<std::vector<double>&>(std::as_const(*this).node(level, index));
}

WaveletPacketTree wpd_decompose(std::span<const double> x, int depth) {
  if (depth < 1) throw Error(ErrorCode::invalid_depth, "wpd_decompose: depth must be >= 1");
  if (x.size() < db4::kTaps || depth > max_decomposition_depth(x.size())) {
    throw Error(ErrorCode::invalid_depth,
                "wpd_decompose: " + std::to_string(x.size()) +
                    " samples are too short for depth " + std::to_string(depth));
  }
  std::vector<WaveletPacketTree::Level> levels(static_cast<std::size_t>(depth) + 1);
  levels[0].emplace_back(x.begin(), x.end());
  for (std::size_t l = 0; l < static_cast<std::size_t>(depth); ++l) {
    levels[l + 1].resize(levels[l].size() * 2);
    for (std::size_t i = 0; i < levels[l].size(); ++i) {
      auto pair = dwt_step(levels[l][i]);
      levels[l + 1][2 * i] = std::move(pair.approx);
      levels[l + 1][2 * i + 1] = std::move(pair.detail);
    }
  }
  return WaveletPacketTree(std::move(levels));
}

std::vector<double> wpd_reconstruct(const WaveletPacketTree& tree) {
  const int depth = tree.depth();
  std::vector<std::vector<double>> current;
  current.reserve(tree.leaf_count());
  for (std::size_t i = 0; i < tree.leaf_count(); ++i) current.push_back(tree.node(depth, i));

  for (int l = depth - 1; l >= 0; --l) {
    std::vector<std::vector<double>> parent(current.size() / 2);
    for (std::size_t i = 0; i < parent.size(); ++i) {
      parent[i] = idwt_step(current[2 * i], current[2 * i + 1], tree.node(l, i).size());
    }
    current = std::move(parent);
  }
  return std::move(current[0]);
}

double universal_threshold(std::span<const double> detail_coeffs, std::size_t n_signal,
                           ThresholdRule rule) {
  if (detail_coeffs.empty()) throw Error(ErrorCode::invalid_input, "universal_threshold: no coefficients");
  if (n_signal == 0) throw Error(ErrorCode::invalid_input, "universal_threshold: signal length must be positive");

  std::vector<double> mags(detail_coeffs.size());
  std::transform(detail_coeffs.begin(), detail_coeffs.end(), mags.begin(),
                 [](double w) { return std::abs(w); });
  const std::size_t mid = mags.size() / 2;
  std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(mid), mags.end());
  double median = mags[mid];
  if (mags.size() % 2 == 0) {
    const double lower = *std::max_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + lower);
  }
  const double sigma = median / 0.6745;
  const double log_n = std::log(static_cast<double>(n_signal));
  switch (rule) {
    case ThresholdRule::paper:
      return sigma * std::sqrt(2.0 * log_n / static_cast<double>(n_signal));
    case ThresholdRule::donoho:
      return sigma * std::sqrt(2.0 * log_n);
  }
  return 0.0;
}

std::vector<double> soft_threshold(std::span<const double> coeffs, double t) {
  if (!(t >= 0.0)) throw Error(ErrorCode::invalid_input, "soft_threshold: threshold must be >= 0");
  std::vector<double> out(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const double mag = std::abs(coeffs[i]) - t;
    out[i] = mag > 0.0 ? std::copysign(mag, coeffs[i]) : 0.0;
  }
  return out;
}

void shrink_detail_leaves(WaveletPacketTree& tree, double t) {
  const int depth = tree.depth();
  for (std::size_t i = 1; i < tree.leaf_count(); ++i) {
    auto& leaf = tree.node(depth, i);
    leaf = soft_threshold(leaf, t);
  }
}

std::vector<double> detail_leaf_coefficients(const WaveletPacketTree& tree) {
  std::vector<double> out;
  const int depth = tree.depth();
  for (std::size_t i = 1; i < tree.leaf_count(); ++i) {
    const auto& leaf = tree.node(depth, i);
    out.insert(out.end(), leaf.begin(), leaf.end());
  }
  return out;
}

std::vector<double> denoise(std::span<const double> x, const DenoiseConfig& cfg) {
  auto tree = wpd_decompose(x, cfg.depth);
  const double t = universal_threshold(detail_leaf_coefficients(tree), x.size(), cfg.rule);
  shrink_detail_leaves(tree, t);
  return wpd_reconstruct(tree);
}

Segment denoise(const Segment& seg, const DenoiseConfig& cfg) {
  Segment out = seg;
  out.samples = denoise(seg.samples, cfg);
  return out;
}

}  // namespace pdm
