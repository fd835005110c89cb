#include "pdm/classifier.hpp"

#include <algorithm>
#include <string>

#include "pdm/error.hpp"

namespace pdm {

ReferenceLibrary::ReferenceLibrary(FeatureKind kind, std::vector<LibraryEntry> entries)
    : kind_(kind), entries_(std::move(entries)) {
  if (entries_.empty()) throw Error(ErrorCode::incomplete_library, "reference library has no classes");
  const std::size_t len = entries_.front().reference.size();
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.cls.id != static_cast<int>(i)) {
      throw Error(ErrorCode::incomplete_library,
                  "reference library entry " + std::to_string(i) + " has class id " + std::to_string(e.cls.id));
    }
    if (e.reference.kind != kind_ || e.reference.size() != len || len == 0) {
      throw Error(ErrorCode::invalid_input, "reference library entries differ in kind or length");
    }
  }
}

ReferenceLibrary build_library(std::span<const LabeledFeature> refs, std::optional<std::size_t> n_classes) {
  if (refs.empty()) throw Error(ErrorCode::incomplete_library, "build_library: no reference vectors");
  const FeatureKind kind = refs.front().features.kind;
  const std::size_t len = refs.front().features.size();

  int max_id = -1;
  for (const auto& r : refs) {
    if (r.features.kind != kind) throw Error(ErrorCode::invalid_input, "build_library: mixed feature kinds");
    if (r.features.size() != len) throw Error(ErrorCode::invalid_input, "build_library: mixed feature lengths");
    if (r.cls.id < 0) throw Error(ErrorCode::invalid_input, "build_library: negative class id");
    max_id = std::max(max_id, r.cls.id);
  }
  const std::size_t m = n_classes.value_or(static_cast<std::size_t>(max_id) + 1);
  if (static_cast<std::size_t>(max_id) >= m) {
    throw Error(ErrorCode::invalid_input, "build_library: class id " + std::to_string(max_id) +
                                              " outside 0.." + std::to_string(m - 1));
  }

  std::vector<LibraryEntry> entries(m);
  std::vector<std::size_t> counts(m, 0);
  for (const auto& r : refs) {
    auto& e = entries[static_cast<std::size_t>(r.cls.id)];
    auto& count = counts[static_cast<std::size_t>(r.cls.id)];
    if (count == 0) {
      e.cls = r.cls;
      e.reference = r.features;
      e.reference.degenerate = false;
      std::fill(e.reference.values.begin(), e.reference.values.end(), 0.0);
    } else if (e.cls.name != r.cls.name) {
      throw Error(ErrorCode::invalid_input, "build_library: class " + std::to_string(r.cls.id) +
                                                " named both '" + e.cls.name + "' and '" + r.cls.name + "'");
    }
    for (std::size_t i = 0; i < len; ++i) e.reference.values[i] += r.features.values[i];
    e.provenance.push_back(r.source_id);
    ++count;
  }
  for (std::size_t c = 0; c < m; ++c) {
    if (counts[c] == 0) {
      throw Error(ErrorCode::incomplete_library, "build_library: no reference for class " + std::to_string(c));
    }
    const double inv = 1.0 / static_cast<double>(counts[c]);
    for (double& v : entries[c].reference.values) v *= inv;
  }
  return ReferenceLibrary(kind, std::move(entries));
}

int decide(std::span<const double> scores, Polarity pol, bool* tie) {
  if (scores.empty()) throw Error(ErrorCode::invalid_input, "decide: no scores");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    const bool better = pol == Polarity::maximize ? scores[i] > scores[best] : scores[i] < scores[best];
    if (better) best = i;
  }
  if (tie) {
    *tie = std::count(scores.begin(), scores.end(), scores[best]) > 1;
  }
  return static_cast<int>(best);
}

Scorecard classify(const FeatureVector& x, const ReferenceLibrary& lib, MeasureKind measure,
                   const ClassifyOptions& opt) {
  if (x.kind != lib.kind()) {
    throw Error(ErrorCode::invalid_input, "classify: feature kind " + std::string(to_string(x.kind)) +
                                              " does not match library kind " + std::string(to_string(lib.kind())));
  }
  if (x.size() != lib.feature_length()) {
    throw Error(ErrorCode::invalid_input, "classify: feature length " + std::to_string(x.size()) +
                                              " does not match library length " + std::to_string(lib.feature_length()));
  }
  Scorecard card;
  card.measure = measure;
  card.scores.reserve(lib.class_count());
  for (const auto& e : lib.entries()) card.scores.push_back(similarity(measure, x.values, e.reference.values, opt.ssm));

  Polarity pol = polarity(measure);
  if (measure == MeasureKind::cosine && opt.cosine_min_rule) pol = Polarity::minimize;
  card.decided = decide(card.scores, pol, &card.tie);
  return card;
}

}  // namespace pdm
