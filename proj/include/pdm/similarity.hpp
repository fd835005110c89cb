#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace pdm {

enum class MeasureKind { cosine, euclidean, ssm };
enum class Polarity { maximize, minimize };

constexpr Polarity polarity(MeasureKind m) {
  return m == MeasureKind::euclidean ? Polarity::minimize : Polarity::maximize;
}

std::string_view to_string(MeasureKind m);
std::optional<MeasureKind> parse_measure_kind(std::string_view name);

// Sliding-window structural similarity on 1-D vectors.
// C1 = (k1 L)^2, C2 = (k2 L)^2 with L = max(x u y) - min(x u y).
struct SsmParams {
  std::size_t window{7};
  std::size_t stride{1};
  double k1{0.01};
  double k2{0.03};
};

struct SsmResult {
  double value{0.0};
  bool degenerate{false};  // L == 0, C terms computed with L = 1
};

// sum(xy) / (|x| |y|). Throws undefined_similarity for a zero vector.
double cosine(std::span<const double> x, std::span<const double> y);

// sqrt(sum (x - y)^2)
double euclidean(std::span<const double> x, std::span<const double> y);

// Mean over all window positions of
//   (2 mx my + C1)(2 sxy + C2) / ((mx^2 + my^2 + C1)(sx^2 + sy^2 + C2))
// with population (1/w) window moments.
SsmResult ssm_detail(std::span<const double> x, std::span<const double> y, const SsmParams& p = {});
inline double ssm(std::span<const double> x, std::span<const double> y, const SsmParams& p = {}) {
  return ssm_detail(x, y, p).value;
}

double similarity(MeasureKind m, std::span<const double> x, std::span<const double> y,
                  const SsmParams& p = {});

}  // namespace pdm
