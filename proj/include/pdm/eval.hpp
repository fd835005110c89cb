#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pdm/classifier.hpp"
#include "pdm/dataset.hpp"
#include "pdm/features.hpp"
#include "pdm/similarity.hpp"
#include "pdm/wavelet.hpp"

namespace pdm {

// SNR value meaning "leave the signal clean".
inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

struct RunConfig {
  std::vector<FeatureKind> features{FeatureKind::time, FeatureKind::fft, FeatureKind::stft};
  std::vector<MeasureKind> measures{MeasureKind::cosine, MeasureKind::euclidean, MeasureKind::ssm};
  std::vector<double> snr_db{2, 4, 6, 8, 10, 20};
  bool apply_denoise{true};
  DenoiseConfig denoise;
  StftConfig stft;
  SsmParams ssm;
  SplitSpec split;
  std::size_t window_len{2000};
  std::uint64_t master_seed{0};
  bool corrupt_references{true};
  bool keep_scorecards{true};
  bool keep_libraries{false};
  std::size_t threads{0};  // 0: hardware concurrency
};

// Throws invalid_config for empty subsets, duplicates or NaN / -inf SNR values.
void validate(const RunConfig& cfg);

// Noise seed for one segment at one SNR:
//   splitmix64(splitmix64(master ^ fnv1a64(segment_id)) ^ bits(snr_db))
// Stateless, so work items can run in any order on any thread.
std::uint64_t derive_noise_seed(std::uint64_t master_seed, std::string_view segment_id, double snr_db);

// "2dB", "20dB", "clean"
std::string snr_label(double snr_db);

struct CellResult {
  FeatureKind feature{FeatureKind::fft};
  MeasureKind measure{MeasureKind::cosine};
  double snr_db{0.0};
  double accuracy{0.0};
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
  std::vector<Scorecard> scorecards;                // per test, when kept
  double classify_seconds{0.0};
};

struct StageTiming {
  double snr_db{0.0};
  std::string stage;  // "corrupt_denoise", "extract_<kind>"
  double seconds{0.0};
};

struct LibraryRecord {
  FeatureKind feature;
  double snr_db;
  ReferenceLibrary library;
};

struct EvalReport {
  RunConfig config;
  std::vector<std::string> class_names;
  std::vector<std::string> test_ids;
  std::vector<int> test_truths;
  std::vector<std::size_t> class_test_counts;
  std::size_t n_refs{0};
  std::vector<CellResult> cells;
  std::vector<StageTiming> timings;
  std::vector<LibraryRecord> libraries;

  const CellResult* find(FeatureKind f, MeasureKind m, double snr_db) const;
};

// matches / total
double accuracy(std::span<const int> predictions, std::span<const int> truths);

// Per SNR: corrupt (tests always, references iff configured), denoise, extract
// each feature kind, average references into a library, classify every test
// under each measure.
EvalReport run_sweep(std::span<const Segment> segments, const std::vector<std::string>& class_names,
                     const RunConfig& cfg);
EvalReport run_sweep(const DatasetManifest& manifest, const RunConfig& cfg);

// Clean or noisy segment pushed through corruption and denoising, as in a sweep.
Segment prepare_segment(const Segment& seg, double snr_db, const RunConfig& cfg);

}  // namespace pdm
