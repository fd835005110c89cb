#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pdm/classifier.hpp"
#include "pdm/features.hpp"
#include "pdm/wavelet.hpp"

namespace pdm {

// Raw little-endian IEEE-754 binary64, no header.
void write_f64_le(const std::filesystem::path& path, std::span<const double> values);
std::vector<double> read_f64_le(const std::filesystem::path& path);

// Descriptors (<base>.desc) are line oriented: a "<magic> 1" header, then
// whitespace separated key=value tokens; '#' starts a comment line.

// Feature vector as <base>.f64 plus <base>.desc.
void save_feature_vector(const FeatureVector& fv, const std::filesystem::path& base);
FeatureVector load_feature_vector(const std::filesystem::path& base);

// How the library's references were produced, so a single segment can be
// pushed through the same pipeline later.
struct LibraryContext {
  bool denoise{true};
  DenoiseConfig denoise_cfg;
  StftConfig stft;
  double snr_db{0.0};  // SNR the references were built at (inf = clean)
};

// One record per class: <base>.f64 holds the class references back to back in
// id order, <base>.desc lists the kind, length, context and one "class" line per entry.
void save_library(const ReferenceLibrary& lib, const LibraryContext& ctx, const std::filesystem::path& base);

struct LoadedLibrary {
  ReferenceLibrary library;
  LibraryContext context;
};
LoadedLibrary load_library(const std::filesystem::path& base);

}  // namespace pdm
