#include "pdm/signal.hpp"

#include <cmath>
#include <string>

#include "pdm/error.hpp"

namespace pdm {

void validate(const Segment& seg) {
  if (seg.samples.empty()) throw Error(ErrorCode::invalid_input, "segment '" + seg.source_id + "' is empty");
  if (!(seg.sample_rate_hz > 0.0) || !std::isfinite(seg.sample_rate_hz)) {
    throw Error(ErrorCode::invalid_input, "segment '" + seg.source_id + "' has non-positive sample rate");
  }
  for (double v : seg.samples) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::invalid_input, "segment '" + seg.source_id + "' has non-finite samples");
    }
  }
}

std::vector<Segment> segment_recording(std::span<const double> recording,
                                       std::size_t window_len,
                                       std::size_t hop,
                                       double sample_rate_hz,
                                       const std::string& source_id) {
  if (recording.empty()) throw Error(ErrorCode::invalid_input, "segment_recording: empty recording");
  if (window_len == 0 || hop == 0) {
    throw Error(ErrorCode::invalid_input, "segment_recording: window and hop must be positive");
  }
  if (window_len > recording.size()) {
    throw Error(ErrorCode::invalid_input,
                "segment_recording: window " + std::to_string(window_len) +
                    " exceeds recording length " + std::to_string(recording.size()));
  }
  if (!(sample_rate_hz > 0.0)) throw Error(ErrorCode::invalid_input, "segment_recording: sample rate must be positive");

  const std::size_t count = (recording.size() - window_len) / hop + 1;
  std::vector<Segment> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Segment seg;
    const auto first = recording.begin() + static_cast<std::ptrdiff_t>(k * hop);
    seg.samples.assign(first, first + static_cast<std::ptrdiff_t>(window_len));
    seg.sample_rate_hz = sample_rate_hz;
    seg.source_id = source_id + "#" + std::to_string(k);
    out.push_back(std::move(seg));
  }
  return out;
}

double signal_power(std::span<const double> samples) {
  if (samples.empty()) throw Error(ErrorCode::invalid_input, "signal_power: empty input");
  double acc = 0.0;
  for (double v : samples) acc += v * v;
  return acc / static_cast<double>(samples.size());
}

Segment add_awgn(const Segment& seg, const NoiseSpec& spec) {
  if (std::isinf(spec.snr_db) && spec.snr_db > 0) return seg;
  if (!std::isfinite(spec.snr_db)) throw Error(ErrorCode::invalid_input, "add_awgn: snr_db must be finite or +inf");

  const double power = signal_power(seg);
  if (!(power > 0.0)) {
    throw Error(ErrorCode::cannot_calibrate, "add_awgn: segment '" + seg.source_id + "' has zero power");
  }
  const double sigma = std::sqrt(power / std::pow(10.0, spec.snr_db / 10.0));

  Segment out = seg;
  GaussianSampler rng(spec.seed);
  for (double& v : out.samples) v += sigma * rng.next();
  return out;
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

double GaussianSampler::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double GaussianSampler::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

}  // namespace pdm
