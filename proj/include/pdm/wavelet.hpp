#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "pdm/signal.hpp"

namespace pdm {

// Daubechies-4 (8 tap) orthogonal filter bank, PyWavelets tap order.
namespace db4 {
inline constexpr std::size_t kTaps = 8;
inline constexpr std::array<double, kTaps> dec_lo{
    -0.010597401784997278, 0.032883011666982945, 0.030841381835986965, -0.18703481171888114,
    -0.02798376941698385,  0.6308807679295904,   0.7148465705525415,   0.23037781330885523};
inline constexpr std::array<double, kTaps> dec_hi{
    -0.23037781330885523, 0.7148465705525415,  -0.6308807679295904, -0.02798376941698385,
    0.18703481171888114,  0.030841381835986965, -0.032883011666982945, -0.010597401784997278};
inline constexpr std::array<double, kTaps> rec_lo{
    0.23037781330885523,  0.7148465705525415,  0.6308807679295904,   -0.02798376941698385,
    -0.18703481171888114, 0.030841381835986965, 0.032883011666982945, -0.010597401784997278};
inline constexpr std::array<double, kTaps> rec_hi{
    -0.010597401784997278, -0.032883011666982945, 0.030841381835986965, 0.18703481171888114,
    -0.02798376941698385,  -0.6308807679295904,   0.7148465705525415,   -0.23037781330885523};
}  // namespace db4

enum class BoundaryMode { symmetric };

enum class ThresholdRule {
  paper,   // sigma * sqrt(2 ln N / N)
  donoho,  // sigma * sqrt(2 ln N)
};

struct DenoiseConfig {
  int depth{3};
  ThresholdRule rule{ThresholdRule::paper};
};

// Output length of one analysis step on `n` samples: floor((n + 7) / 2).
constexpr std::size_t dwt_length(std::size_t n) { return (n + db4::kTaps - 1) / 2; }

// Deepest level at which every node still spans at least one filter length.
int max_decomposition_depth(std::size_t n);

// One analysis step with half-sample symmetric extension.
struct DwtPair {
  std::vector<double> approx;
  std::vector<double> detail;
};
DwtPair dwt_step(std::span<const double> x);

// Inverse of dwt_step, trimmed to `out_len` samples (the original length).
std::vector<double> idwt_step(std::span<const double> approx, std::span<const double> detail,
                              std::size_t out_len);

// Complete wavelet packet tree. Node (l, i) for 0 <= l <= depth, 0 <= i < 2^l,
// natural ordering: the children of (l, i) are (l+1, 2i) (low) and (l+1, 2i+1) (high).
class WaveletPacketTree {
 public:
  using Level = std::vector<std::vector<double>>;

  // Throws corrupt_tree if `levels` is not a complete binary tree.
  explicit WaveletPacketTree(std::vector<Level> levels);

  int depth() const { return static_cast<int>(levels_.size()) - 1; }
  std::size_t signal_length() const { return levels_[0][0].size(); }
  BoundaryMode boundary_mode() const { return BoundaryMode::symmetric; }

  const std::vector<double>& node(int level, std::size_t index) const;
  std::vector<double>& node(int level, std::size_t index);
  std::size_t leaf_count() const { return levels_.back().size(); }

 private:
  std::vector<Level> levels_;
};

WaveletPacketTree wpd_decompose(std::span<const double> x, int depth);
inline WaveletPacketTree wpd_decompose(const Segment& seg, int depth) {
  return wpd_decompose(seg.samples, depth);
}

// Inverse packet transform from the leaves; intermediate nodes only supply lengths.
std::vector<double> wpd_reconstruct(const WaveletPacketTree& tree);

// sigma = median(|w|)/0.6745, scaled per `rule` with N = n_signal. ln is natural log.
double universal_threshold(std::span<const double> detail_coeffs, std::size_t n_signal,
                           ThresholdRule rule);

// sign(w) * max(|w| - t, 0)
std::vector<double> soft_threshold(std::span<const double> coeffs, double t);

// Soft-thresholds every leaf except the approximation leaf (depth, 0).
void shrink_detail_leaves(WaveletPacketTree& tree, double t);

// Concatenation of every leaf except (depth, 0), in index order.
std::vector<double> detail_leaf_coefficients(const WaveletPacketTree& tree);

std::vector<double> denoise(std::span<const double> x, const DenoiseConfig& cfg);
Segment denoise(const Segment& seg, const DenoiseConfig& cfg);

}  // namespace pdm
