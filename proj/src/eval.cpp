#include "pdm/eval.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "pdm/error.hpp"

namespace pdm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Runs fn(i) for i in [0, n) on up to `threads` workers; rethrows the first failure.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t count = std::min(threads, n);
  pool.reserve(count);
  for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string context(std::optional<FeatureKind> f, std::optional<MeasureKind> m, double snr) {
  std::ostringstream ss;
  ss << "(";
  if (f) ss << "feature=" << to_string(*f) << ", ";
  if (m) ss << "measure=" << to_string(*m) << ", ";
  ss << "snr=" << snr_label(snr) << ")";
  return ss.str();
}

template <typename Fn>
void annotated(const std::string& where, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    throw Error(e.code(), std::string(e.what()) + " " + where);
  }
}

template <typename T>
bool has_duplicates(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  return std::adjacent_find(v.begin(), v.end()) != v.end();
}

}  // namespace

void validate(const RunConfig& cfg) {
  if (cfg.features.empty()) throw Error(ErrorCode::invalid_config, "run config: no feature kinds");
  if (cfg.measures.empty()) throw Error(ErrorCode::invalid_config, "run config: no measures");
  if (cfg.snr_db.empty()) throw Error(ErrorCode::invalid_config, "run config: no SNR levels");
  for (double s : cfg.snr_db) {
    if (std::isnan(s) || s == -std::numeric_limits<double>::infinity()) {
      throw Error(ErrorCode::invalid_config, "run config: SNR values must be finite or the no-noise sentinel");
    }
  }
  if (has_duplicates(cfg.features) || has_duplicates(cfg.measures) || has_duplicates(cfg.snr_db)) {
    throw Error(ErrorCode::invalid_config, "run config: duplicate feature, measure or SNR entries");
  }
  if (cfg.apply_denoise && cfg.denoise.depth < 1) throw Error(ErrorCode::invalid_config, "run config: denoise depth must be >= 1");
  if (cfg.window_len == 0) throw Error(ErrorCode::invalid_config, "run config: window must be positive");
}

std::uint64_t derive_noise_seed(std::uint64_t master_seed, std::string_view segment_id, double snr_db) {
  return splitmix64(splitmix64(master_seed ^ fnv1a64(segment_id)) ^ std::bit_cast<std::uint64_t>(snr_db));
}

std::string snr_label(double snr_db) {
  if (std::isinf(snr_db) && snr_db > 0) return "clean";
  std::ostringstream ss;
  ss << snr_db << "dB";
  return ss.str();
}

const CellResult* EvalReport::find(FeatureKind f, MeasureKind m, double snr_db) const {
  for (const auto& c : cells) {
    if (c.feature == f && c.measure == m && c.snr_db == snr_db) return &c;
  }
  return nullptr;
}

double accuracy(std::span<const int> predictions, std::span<const int> truths) {
  if (predictions.empty() || predictions.size() != truths.size()) {
    throw Error(ErrorCode::invalid_input, "accuracy: need equal-length, non-empty inputs");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) hits += predictions[i] == truths[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

Segment prepare_segment(const Segment& seg, double snr_db, const RunConfig& cfg) {
  Segment out = add_awgn(seg, {snr_db, derive_noise_seed(cfg.master_seed, seg.source_id, snr_db)});
  if (cfg.apply_denoise) out = denoise(out, cfg.denoise);
  return out;
}

EvalReport run_sweep(std::span<const Segment> segments, const std::vector<std::string>& class_names,
                     const RunConfig& cfg) {
  validate(cfg);
  if (segments.empty()) throw Error(ErrorCode::empty_dataset, "run_sweep: no segments");
  const std::size_t threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  const std::size_t m = class_names.size();

  for (const auto& s : segments) {
    validate(s);
    if (s.size() != cfg.window_len) {
      throw Error(ErrorCode::invalid_input, "run_sweep: segment '" + s.source_id + "' has " + std::to_string(s.size()) +
                                                " samples, expected " + std::to_string(cfg.window_len));
    }
    if (!s.label || *s.label < 0 || static_cast<std::size_t>(*s.label) >= m) {
      throw Error(ErrorCode::invalid_input, "run_sweep: segment '" + s.source_id + "' has no valid label");
    }
  }
  if (cfg.apply_denoise && cfg.denoise.depth > max_decomposition_depth(cfg.window_len)) {
    throw Error(ErrorCode::invalid_config, "run_sweep: denoise depth " + std::to_string(cfg.denoise.depth) +
                                               " too deep for " + std::to_string(cfg.window_len) + " samples");
  }
  for (auto f : cfg.features) {
    if (f == FeatureKind::stft) validate(cfg.stft, cfg.window_len);
  }

  const Split split = split_references(segments, cfg.split);

  EvalReport report;
  report.config = cfg;
  report.class_names = class_names;
  report.n_refs = split.refs.size();
  report.class_test_counts.assign(m, 0);
  for (const auto& t : split.tests) {
    report.test_ids.push_back(t.source_id);
    report.test_truths.push_back(*t.label);
    ++report.class_test_counts[static_cast<std::size_t>(*t.label)];
  }
  if (split.tests.empty()) throw Error(ErrorCode::split_error, "run_sweep: no test segments left after the split");

  const std::size_t n_refs = split.refs.size();
  const std::size_t n_tests = split.tests.size();
  auto segment_at = [&](std::size_t i) -> const Segment& { return i < n_refs ? split.refs[i] : split.tests[i - n_refs]; };

  for (double snr : cfg.snr_db) {
    auto start = Clock::now();
    std::vector<Segment> prepared(n_refs + n_tests);
    annotated(context(std::nullopt, std::nullopt, snr), [&] {
      parallel_for(prepared.size(), threads, [&](std::size_t i) {
        const Segment& s = segment_at(i);
        const double level = (i < n_refs && !cfg.corrupt_references) ? kNoNoise : snr;
        prepared[i] = prepare_segment(s, level, cfg);
      });
    });
    report.timings.push_back({snr, "corrupt_denoise", seconds_since(start)});

    for (auto kind : cfg.features) {
      start = Clock::now();
      std::vector<FeatureVector> feats(prepared.size());
      std::optional<ReferenceLibrary> lib;
      annotated(context(kind, std::nullopt, snr), [&] {
        parallel_for(prepared.size(), threads,
                     [&](std::size_t i) { feats[i] = extract(kind, prepared[i].samples, cfg.stft); });
        std::vector<LabeledFeature> refs;
        refs.reserve(n_refs);
        for (std::size_t i = 0; i < n_refs; ++i) {
          const auto& s = split.refs[i];
          refs.push_back({{*s.label, class_names[static_cast<std::size_t>(*s.label)]}, std::move(feats[i]), s.source_id});
        }
        lib.emplace(build_library(refs, m));
      });
      report.timings.push_back({snr, "extract_" + std::string(to_string(kind)), seconds_since(start)});
      if (cfg.keep_libraries) report.libraries.push_back({kind, snr, *lib});

      for (auto measure : cfg.measures) {
        start = Clock::now();
        CellResult cell;
        cell.feature = kind;
        cell.measure = measure;
        cell.snr_db = snr;
        std::vector<Scorecard> cards(n_tests);
        ClassifyOptions opt;
        opt.ssm = cfg.ssm;
        annotated(context(kind, measure, snr), [&] {
          parallel_for(n_tests, threads,
                       [&](std::size_t t) { cards[t] = classify(feats[n_refs + t], *lib, measure, opt); });
        });
        cell.confusion.assign(m, std::vector<std::size_t>(m, 0));
        std::vector<int> predicted(n_tests);
        for (std::size_t t = 0; t < n_tests; ++t) {
          predicted[t] = cards[t].decided;
          ++cell.confusion[static_cast<std::size_t>(report.test_truths[t])][static_cast<std::size_t>(cards[t].decided)];
        }
        cell.accuracy = accuracy(predicted, report.test_truths);
        if (cfg.keep_scorecards) cell.scorecards = std::move(cards);
        cell.classify_seconds = seconds_since(start);
        report.cells.push_back(std::move(cell));
      }
    }
  }
  return report;
}

EvalReport run_sweep(const DatasetManifest& manifest, const RunConfig& cfg) {
  auto data = load_and_segment(manifest, cfg.window_len);
  return run_sweep(data.segments, manifest.class_names(), cfg);
}

}  // namespace pdm
