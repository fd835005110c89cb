#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pdm/features.hpp"
#include "pdm/similarity.hpp"

namespace pdm {

struct ClassId {
  int id{0};
  std::string name;
};

struct LabeledFeature {
  ClassId cls;
  FeatureVector features;
  std::string source_id;
};

struct LibraryEntry {
  ClassId cls;
  FeatureVector reference;  // elementwise mean of the class's reference features
  std::vector<std::string> provenance;
};

// One averaged reference vector per class, ids 0..m-1 in order. Immutable.
class ReferenceLibrary {
 public:
  // Throws invalid_input / incomplete_library if entries are not ids 0..m-1
  // of a single kind and length.
  ReferenceLibrary(FeatureKind kind, std::vector<LibraryEntry> entries);

  FeatureKind kind() const { return kind_; }
  std::size_t class_count() const { return entries_.size(); }
  std::size_t feature_length() const { return entries_.front().reference.size(); }
  const LibraryEntry& entry(int id) const { return entries_.at(static_cast<std::size_t>(id)); }
  std::span<const LibraryEntry> entries() const { return entries_; }

 private:
  FeatureKind kind_;
  std::vector<LibraryEntry> entries_;
};

// Averages reference features per class. `n_classes`, when given, is the number
// of classes that must be present; otherwise it is max(id) + 1.
ReferenceLibrary build_library(std::span<const LabeledFeature> refs,
                               std::optional<std::size_t> n_classes = std::nullopt);

struct Scorecard {
  MeasureKind measure{MeasureKind::cosine};
  std::vector<double> scores;  // indexed by class id
  int decided{0};
  bool tie{false};
};

struct ClassifyOptions {
  SsmParams ssm;
  // Pick the smallest cosine instead of the largest. Diagnostic only.
  bool cosine_min_rule{false};
};

// Extremum of `scores` under `pol`; ties go to the lowest index.
int decide(std::span<const double> scores, Polarity pol, bool* tie = nullptr);

Scorecard classify(const FeatureVector& x, const ReferenceLibrary& lib, MeasureKind measure,
                   const ClassifyOptions& opt = {});

}  // namespace pdm
