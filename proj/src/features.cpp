#include "pdm/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

#include "pdm/error.hpp"
#include "pdm/fft.hpp"

namespace pdm {

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::time: return "time";
    case FeatureKind::fft: return "fft";
    case FeatureKind::stft: return "stft";
  }
  return "unknown";
}

std::optional<FeatureKind> parse_feature_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "time") return FeatureKind::time;
  if (lower == "fft") return FeatureKind::fft;
  if (lower == "stft") return FeatureKind::stft;
  return std::nullopt;
}

void validate(const StftConfig& cfg, std::size_t segment_len) {
  const std::size_t nfft = cfg.fft_len();
  if (cfg.window_len == 0 || cfg.hop == 0) {
    throw Error(ErrorCode::invalid_config, "stft: window and hop must be positive");
  }
  if (cfg.hop > cfg.window_len || cfg.window_len > nfft) {
    throw Error(ErrorCode::invalid_config, "stft: need hop <= window_len <= nfft");
  }
  if (cfg.window_len > segment_len) {
    throw Error(ErrorCode::invalid_config, "stft: window of " + std::to_string(cfg.window_len) +
                                               " exceeds segment of " + std::to_string(segment_len));
  }
}

FeatureVector time_features(std::span<const double> x) {
  if (x.empty()) throw Error(ErrorCode::invalid_input, "time_features: empty segment");
  const auto n = static_cast<double>(x.size());

  double sum = 0.0, sum_sq = 0.0, sum_abs = 0.0, sum_sqrt_abs = 0.0;
  double peak = 0.0, lo = x[0], hi = x[0];
  for (double v : x) {
    sum += v;
    sum_sq += v * v;
    sum_abs += std::abs(v);
    sum_sqrt_abs += std::sqrt(std::abs(v));
    peak = std::max(peak, std::abs(v));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double mean = sum / n;
  const double rms = std::sqrt(sum_sq / n);
  const double mean_abs = sum_abs / n;
  const double mean_sqrt_abs = sum_sqrt_abs / n;

  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  const double stddev = std::sqrt(m2);

  double skewness = 0.0, kurtosis = 0.0;
  if (m2 > 0.0) {
    const double g1 = m3 / std::pow(m2, 1.5);
    const double g2 = m4 / (m2 * m2) - 3.0;
    if (x.size() >= 4) {
      skewness = g1 * std::sqrt(n * (n - 1.0)) / (n - 2.0);
      kurtosis = ((n + 1.0) * g2 + 6.0) * (n - 1.0) / ((n - 2.0) * (n - 3.0));
    } else {
      skewness = g1;
      kurtosis = g2;
    }
  }

  std::size_t zero_crossings = 0;
  double waveform_length = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if ((x[i] >= 0.0) != (x[i + 1] >= 0.0)) ++zero_crossings;
    waveform_length += std::abs(x[i + 1] - x[i]);
  }

  FeatureVector fv;
  fv.kind = FeatureKind::time;
  fv.meta.segment_len = x.size();
  fv.degenerate = !(rms > 0.0);
  const auto ratio = [&](double num, double den) { return (fv.degenerate || !(den > 0.0)) ? 0.0 : num / den; };
  fv.values = {
      mean,
      stddev,
      rms,
      peak,
      hi - lo,
      ratio(peak, rms),
      kurtosis,
      skewness,
      ratio(rms, mean_abs),
      ratio(peak, mean_abs),
      ratio(peak, mean_sqrt_abs * mean_sqrt_abs),
      static_cast<double>(zero_crossings),
      waveform_length,
      mean_abs,
  };
  return fv;
}

FeatureVector fft_features(std::span<const double> x) {
  if (x.empty()) throw Error(ErrorCode::invalid_input, "fft_features: empty segment");
  FeatureVector fv;
  fv.kind = FeatureKind::fft;
  fv.meta.segment_len = x.size();
  fv.values = magnitude_spectrum(x, x.size());
  return fv;
}

std::vector<double> hann_window(std::size_t len) {
  std::vector<double> w(len);
  for (std::size_t i = 0; i < len; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(len));
  }
  return w;
}

FeatureVector stft_features(std::span<const double> x, const StftConfig& cfg) {
  validate(cfg, x.size());
  const std::size_t nfft = cfg.fft_len();
  const std::size_t bins = cfg.bins();
  const std::size_t frames = cfg.frames(x.size());
  const auto window = hann_window(cfg.window_len);
  const auto plan = fft_plan(nfft);

  FeatureVector fv;
  fv.kind = FeatureKind::stft;
  fv.meta = {x.size(), cfg.window_len, cfg.hop, nfft, frames};
  fv.values.resize(frames * bins);

  std::vector<cplx> buf(nfft);
  for (std::size_t f = 0; f < frames; ++f) {
    std::fill(buf.begin(), buf.end(), cplx{0.0, 0.0});
    const std::size_t start = f * cfg.hop;
    for (std::size_t i = 0; i < cfg.window_len; ++i) buf[i] = x[start + i] * window[i];
    plan->forward(buf, buf);
    for (std::size_t k = 0; k < bins; ++k) fv.values[f * bins + k] = std::abs(buf[k]);
  }
  return fv;
}

FeatureVector extract(FeatureKind kind, std::span<const double> x, const StftConfig& stft) {
  switch (kind) {
    case FeatureKind::time: return time_features(x);
    case FeatureKind::fft: return fft_features(x);
    case FeatureKind::stft: return stft_features(x, stft);
  }
  throw Error(ErrorCode::invalid_input, "extract: unknown feature kind");
}

std::size_t feature_length(FeatureKind kind, std::size_t segment_len, const StftConfig& stft) {
  switch (kind) {
    case FeatureKind::time: return kTimeFeatureCount;
    case FeatureKind::fft: return segment_len / 2 + 1;
    case FeatureKind::stft: return stft.frames(segment_len) * stft.bins();
  }
  return 0;
}

}  // namespace pdm
