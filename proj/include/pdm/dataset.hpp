#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pdm/signal.hpp"

namespace pdm {

enum class RecordingFormat {
  text,  // one decimal sample per line
  f64,   // raw little-endian binary64
};

std::string_view to_string(RecordingFormat f);

void write_recording(const std::filesystem::path& path, std::span<const double> samples, RecordingFormat format);
std::vector<double> read_recording(const std::filesystem::path& path, RecordingFormat format);

struct ManifestEntry {
  std::filesystem::path path;  // as written in the manifest
  int class_id{0};
  std::string class_name;
  int motor_speed_rpm{0};
  double sample_rate_hz{0.0};
  RecordingFormat format{RecordingFormat::text};
};

// Manifest file, version 1:
//
//   # comment
//   pdm-manifest 1
//   entry path=<file> class_id=<int> class_name=<name> motor_speed_rpm=<int> sample_rate_hz=<real> format=text|f64
//
// One entry per line; tokens are whitespace separated, so values cannot contain
// spaces. Relative paths resolve against the manifest's directory.
struct DatasetManifest {
  int schema_version{1};
  std::filesystem::path base_dir;
  std::vector<ManifestEntry> entries;

  std::filesystem::path resolve(const ManifestEntry& e) const;
  std::size_t class_count() const;
  std::vector<std::string> class_names() const;  // indexed by class id
};

// Parses and validates structure; does not touch recordings.
DatasetManifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir,
                               const std::string& origin = "<manifest>");

// parse_manifest plus existence checks; with `verify_recordings` every recording
// is read once and checked for finite samples.
DatasetManifest load_manifest(const std::filesystem::path& path, bool verify_recordings = true);

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

struct SegmentedDataset {
  std::vector<Segment> segments;
  std::vector<std::string> warnings;  // recordings skipped for being shorter than the window
};

// Non-overlapping windows; segments carry the class label and motor speed.
SegmentedDataset load_and_segment(const DatasetManifest& manifest, std::size_t window_len = 2000);

enum class Selection { first, seeded_random };

struct SplitSpec {
  std::size_t refs_per_class_per_speed{1};
  Selection selection{Selection::first};
  std::uint64_t seed{0};
};

struct Split {
  std::vector<Segment> refs;
  std::vector<Segment> tests;
};

// References are drawn per (class, speed) group; both outputs keep input order.
Split split_references(std::span<const Segment> segments, const SplitSpec& spec);

struct SynthSpec {
  std::size_t n_classes{10};
  std::size_t segments_per_class{80};
  std::size_t n_speeds{4};
  double sample_rate_hz{12000.0};
  std::size_t window_len{2000};
  std::uint64_t seed{1};
  RecordingFormat format{RecordingFormat::f64};
};

int synth_speed_rpm(std::size_t speed_index);
std::string synth_class_name(std::size_t class_id, std::size_t n_classes);

// Clean recording for one (class, speed): 2-4 tones at class specific
// frequencies plus a train of decaying resonance bursts at a class specific
// rate, normalised to unit RMS, with a -34 dB sensor floor.
std::vector<double> synth_recording(const SynthSpec& spec, std::size_t class_id, std::size_t speed_index,
                                    std::size_t n_samples);

// Writes one recording per (class, speed) and <out_dir>/manifest.pdm.
DatasetManifest synth_dataset(const SynthSpec& spec, const std::filesystem::path& out_dir);

}  // namespace pdm
