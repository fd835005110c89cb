#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace pdm {

// A fixed-length window of a vibration recording; the unit of classification.
struct Segment {
  std::vector<double> samples;
  double sample_rate_hz{0.0};
  std::string source_id;
  std::optional<int> label;  // class id, when known
  int speed_rpm{0};          // 0 when unknown

  std::size_t size() const { return samples.size(); }
  double duration_s() const { return static_cast<double>(samples.size()) / sample_rate_hz; }
};

// Throws invalid_input unless the segment is non-empty, finite and has a positive rate.
void validate(const Segment& seg);

struct NoiseSpec {
  double snr_db{0.0};  // +inf means "no noise"
  std::uint64_t seed{0};
};

// Windows of `window_len` samples every `hop` samples; the trailing remainder is dropped.
// Segment ids are "<source_id>#<index>".
std::vector<Segment> segment_recording(std::span<const double> recording,
                                       std::size_t window_len,
                                       std::size_t hop,
                                       double sample_rate_hz,
                                       const std::string& source_id = "rec");

inline std::vector<Segment> segment_recording(std::span<const double> recording,
                                              std::size_t window_len,
                                              double sample_rate_hz,
                                              const std::string& source_id = "rec") {
  return segment_recording(recording, window_len, window_len, sample_rate_hz, source_id);
}

// Mean of squared samples.
double signal_power(std::span<const double> samples);
inline double signal_power(const Segment& seg) { return signal_power(seg.samples); }

// seg + n, n ~ N(0, P/10^(snr/10)) with P the clean mean-square power.
Segment add_awgn(const Segment& seg, const NoiseSpec& spec);

// 64-bit finalizer from SplitMix64. Used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// FNV-1a over the bytes of `s`.
std::uint64_t fnv1a64(std::string_view s);

// Standard normal variates: Marsaglia polar method driven by mt19937_64.
// Uniforms are formed from the top 53 bits of each engine draw, so the stream
// is identical across standard libraries for a given seed.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}

  double uniform();  // [0, 1)
  double next();

 private:
  std::mt19937_64 engine_;
  double spare_{0.0};
  bool has_spare_{false};
};

}  // namespace pdm
