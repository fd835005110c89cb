#include "pdm/similarity.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "pdm/error.hpp"

namespace pdm {

namespace {

void require_same_length(std::span<const double> x, std::span<const double> y, const char* what) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::invalid_input, std::string(what) + ": length mismatch (" +
                                              std::to_string(x.size()) + " vs " +
                                              std::to_string(y.size()) + ")");
  }
}

}  // namespace

std::string_view to_string(MeasureKind m) {
  switch (m) {
    case MeasureKind::cosine: return "cosine";
    case MeasureKind::euclidean: return "euclidean";
    case MeasureKind::ssm: return "ssm";
  }
  return "unknown";
}

std::optional<MeasureKind> parse_measure_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "cosine" || lower == "cos") return MeasureKind::cosine;
  if (lower == "euclidean" || lower == "euc") return MeasureKind::euclidean;
  if (lower == "ssm" || lower == "ssim") return MeasureKind::ssm;
  return std::nullopt;
}

double cosine(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y, "cosine");
  double xy = 0.0, xx = 0.0, yy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xy += x[i] * y[i];
    xx += x[i] * x[i];
    yy += y[i] * y[i];
  }
  if (!(xx > 0.0) || !(yy > 0.0)) {
    throw Error(ErrorCode::undefined_similarity, "cosine: zero vector");
  }
  const double c = xy / (std::sqrt(xx) * std::sqrt(yy));
  return std::clamp(c, -1.0, 1.0);
}

double euclidean(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y, "euclidean");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

SsmResult ssm_detail(std::span<const double> x, std::span<const double> y, const SsmParams& p) {
  require_same_length(x, y, "ssm");
  if (p.window < 3 || p.window % 2 == 0) {
    throw Error(ErrorCode::invalid_input, "ssm: window must be odd and >= 3");
  }
  if (p.stride == 0) throw Error(ErrorCode::invalid_input, "ssm: stride must be positive");
  if (!(p.k1 > 0.0) || !(p.k2 > 0.0)) throw Error(ErrorCode::invalid_input, "ssm: k1, k2 must be > 0");
  if (x.size() < p.window) {
    throw Error(ErrorCode::invalid_input, "ssm: vectors of length " + std::to_string(x.size()) +
                                              " are shorter than the window");
  }

  const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
  const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
  double range = std::max(*xmax, *ymax) - std::min(*xmin, *ymin);
  SsmResult result;
  if (!(range > 0.0)) {
    range = 1.0;
    result.degenerate = true;
  }
  const double c1 = (p.k1 * range) * (p.k1 * range);
  const double c2 = (p.k2 * range) * (p.k2 * range);

  const std::size_t w = p.window;
  const double inv_w = 1.0 / static_cast<double>(w);
  const std::size_t positions = (x.size() - w) / p.stride + 1;
  double total = 0.0;
  for (std::size_t pos = 0; pos < positions; ++pos) {
    const std::size_t s = pos * p.stride;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = s; i < s + w; ++i) {
      mx += x[i];
      my += y[i];
    }
    mx *= inv_w;
    my *= inv_w;
    double vx = 0.0, vy = 0.0, cxy = 0.0;
    for (std::size_t i = s; i < s + w; ++i) {
      const double dx = x[i] - mx;
      const double dy = y[i] - my;
      vx += dx * dx;
      vy += dy * dy;
      cxy += dx * dy;
    }
    vx *= inv_w;
    vy *= inv_w;
    cxy *= inv_w;
    const double num = (2.0 * mx * my + c1) * (2.0 * cxy + c2);
    const double den = (mx * mx + my * my + c1) * (vx + vy + c2);
    total += num / den;
  }
  result.value = total / static_cast<double>(positions);
  return result;
}

double similarity(MeasureKind m, std::span<const double> x, std::span<const double> y,
                  const SsmParams& p) {
  switch (m) {
    case MeasureKind::cosine: return cosine(x, y);
    case MeasureKind::euclidean: return euclidean(x, y);
    case MeasureKind::ssm: return ssm(x, y, p);
  }
  throw Error(ErrorCode::invalid_input, "similarity: unknown measure");
}

}  // namespace pdm
