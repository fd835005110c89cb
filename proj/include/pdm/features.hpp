#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pdm/signal.hpp"

namespace pdm {

enum class FeatureKind { time, fft, stft };

std::string_view to_string(FeatureKind kind);
// Accepts "time", "fft", "stft" (case-insensitive).
std::optional<FeatureKind> parse_feature_kind(std::string_view name);

enum class WindowKind { hann };

// Periodic Hann window, w[n] = 0.5 - 0.5 cos(2 pi n / len).
struct StftConfig {
  std::size_t window_len{256};
  std::size_t hop{128};
  WindowKind window{WindowKind::hann};
  std::size_t nfft{0};  // 0 means window_len

  std::size_t fft_len() const { return nfft == 0 ? window_len : nfft; }
  std::size_t bins() const { return fft_len() / 2 + 1; }
  std::size_t frames(std::size_t segment_len) const {
    return segment_len < window_len ? 0 : (segment_len - window_len) / hop + 1;
  }
};

// Throws invalid_config unless hop <= window_len <= nfft and window_len <= segment_len.
void validate(const StftConfig& cfg, std::size_t segment_len);

struct FeatureMeta {
  std::size_t segment_len{0};
  std::size_t stft_window{0};
  std::size_t stft_hop{0};
  std::size_t stft_nfft{0};
  std::size_t stft_frames{0};
};

struct FeatureVector {
  FeatureKind kind{FeatureKind::fft};
  std::vector<double> values;
  FeatureMeta meta;
  bool degenerate{false};  // TIME only: zero RMS, ratio features forced to 0

  std::size_t size() const { return values.size(); }
};

// Order of the TIME feature vector.
inline constexpr std::size_t kTimeFeatureCount = 14;
inline constexpr std::array<std::string_view, kTimeFeatureCount> kTimeFeatureNames{
    "mean",          "std",              "rms",
    "peak",          "peak_to_peak",     "crest_factor",
    "kurtosis",      "skewness",         "shape_factor",
    "impulse_factor", "clearance_factor", "zero_crossings",
    "waveform_length", "mean_abs"};

// Statistics in kTimeFeatureNames order.
//  std: population (1/N).
//  kurtosis: bias-corrected excess kurtosis G2; skewness: adjusted Fisher-Pearson G1
//    (both fall back to the moment ratios below 4 samples and are 0 at zero variance).
//  zero_crossings: count of i with (x[i] >= 0) != (x[i+1] >= 0).
FeatureVector time_features(std::span<const double> x);
inline FeatureVector time_features(const Segment& seg) { return time_features(seg.samples); }

// |DFT| at bins 0..floor(N/2). No window, no normalisation.
FeatureVector fft_features(std::span<const double> x);
inline FeatureVector fft_features(const Segment& seg) { return fft_features(seg.samples); }

// Frame-major Hann-windowed magnitude spectra, bins 0..nfft/2 per frame.
FeatureVector stft_features(std::span<const double> x, const StftConfig& cfg = {});
inline FeatureVector stft_features(const Segment& seg, const StftConfig& cfg = {}) {
  return stft_features(seg.samples, cfg);
}

std::vector<double> hann_window(std::size_t len);

FeatureVector extract(FeatureKind kind, std::span<const double> x, const StftConfig& stft = {});

// Expected feature length for a segment of `segment_len` samples.
std::size_t feature_length(FeatureKind kind, std::size_t segment_len, const StftConfig& stft = {});

}  // namespace pdm
