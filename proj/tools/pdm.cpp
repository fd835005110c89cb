#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pdm/dataset.hpp"
#include "pdm/error.hpp"
#include "pdm/eval.hpp"
#include "pdm/report.hpp"
#include "pdm/serialize.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pdm;

namespace {

void fail_usage(const std::string& msg) { throw Error(ErrorCode::invalid_config, msg); }

double parse_snr(const std::string& s) {
  if (s == "inf" || s == "clean" || s == "none") return kNoNoise;
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || !std::isfinite(v)) fail_usage("bad SNR value '" + s + "'");
  return v;
}

RecordingFormat parse_format(const std::string& s) {
  if (s == "text" || s == "txt") return RecordingFormat::text;
  if (s == "f64") return RecordingFormat::f64;
  fail_usage("unknown recording format '" + s + "'");
  return RecordingFormat::text;
}

ThresholdRule parse_rule(const std::string& s) {
  if (s == "paper") return ThresholdRule::paper;
  if (s == "donoho") return ThresholdRule::donoho;
  fail_usage("unknown threshold rule '" + s + "'");
  return ThresholdRule::paper;
}

struct SynthArgs {
  std::string out;
  SynthSpec spec;
  std::string format{"f64"};
};

struct SegmentArgs {
  std::string dataset, out;
  std::size_t window{2000};
};

struct SweepArgs {
  std::string dataset, out{"results"};
  std::vector<std::string> features{"time", "fft", "stft"};
  std::vector<std::string> measures{"cosine", "euclidean", "ssm"};
  std::vector<std::string> snr{"2", "4", "6", "8", "10", "20"};
  std::uint64_t seed{0};
  bool refs_clean{false};
  bool no_denoise{false};
  std::size_t threads{0};
  int depth{3};
  std::string rule{"paper"};
  std::size_t refs_per_speed{1};
  std::string selection{"first"};
  std::uint64_t split_seed{0};
  std::size_t window{2000};
  std::size_t stft_window{256};
  std::size_t stft_hop{128};
  std::size_t stft_nfft{0};
  bool save_libraries{false};
  bool no_svg{false};
};

struct ClassifyArgs {
  std::string library, segment, format{"text"}, measure{"cosine"}, snr{"inf"};
  std::uint64_t seed{0};
  double rate{12000.0};
};

struct ReportArgs {
  std::string log, out;
};

int run_synth(const SynthArgs& a) {
  SynthSpec spec = a.spec;
  spec.format = parse_format(a.format);
  const auto m = synth_dataset(spec, a.out);
  std::cout << json{{"manifest", (fs::path(a.out) / "manifest.pdm").string()},
                    {"recordings", m.entries.size()},
                    {"segments", spec.n_classes * spec.segments_per_class}}
                   .dump()
            << "\n";
  return 0;
}

// Writes each segment as its own f64 recording plus a manifest that
// load_and_segment reads back one segment per entry.
int run_segment(const SegmentArgs& a) {
  const auto manifest = load_manifest(a.dataset);
  const auto data = load_and_segment(manifest, a.window);
  for (const auto& w : data.warnings) std::cerr << "warning: " << w << "\n";
  if (data.segments.empty()) throw Error(ErrorCode::empty_dataset, "segment: no segment fits the window");
  const fs::path out = a.out;
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot create " + out.string());
  const auto names = manifest.class_names();
  DatasetManifest cached;
  cached.base_dir = out;
  char name[32];
  for (std::size_t i = 0; i < data.segments.size(); ++i) {
    const auto& s = data.segments[i];
    std::snprintf(name, sizeof name, "seg_%06zu.f64", i);
    write_recording(out / name, s.samples, RecordingFormat::f64);
    cached.entries.push_back({name, *s.label, names[static_cast<std::size_t>(*s.label)], s.speed_rpm, s.sample_rate_hz,
                              RecordingFormat::f64});
  }
  save_manifest(cached, out / "manifest.pdm");
  std::cout << json{{"manifest", (out / "manifest.pdm").string()}, {"segments", data.segments.size()}}.dump() << "\n";
  return 0;
}

int run_sweep_cmd(const SweepArgs& a) {
  RunConfig cfg;
  cfg.features.clear();
  for (const auto& f : a.features) {
    const auto k = parse_feature_kind(f);
    if (!k) fail_usage("unknown feature kind '" + f + "'");
    cfg.features.push_back(*k);
  }
  cfg.measures.clear();
  for (const auto& m : a.measures) {
    const auto k = parse_measure_kind(m);
    if (!k) fail_usage("unknown measure '" + m + "'");
    cfg.measures.push_back(*k);
  }
  cfg.snr_db.clear();
  for (const auto& s : a.snr) cfg.snr_db.push_back(parse_snr(s));
  cfg.master_seed = a.seed;
  cfg.corrupt_references = !a.refs_clean;
  cfg.apply_denoise = !a.no_denoise;
  cfg.threads = a.threads;
  cfg.denoise.depth = a.depth;
  cfg.denoise.rule = parse_rule(a.rule);
  cfg.split.refs_per_class_per_speed = a.refs_per_speed;
  if (a.selection == "first") {
    cfg.split.selection = Selection::first;
  } else if (a.selection == "random") {
    cfg.split.selection = Selection::seeded_random;
  } else {
    fail_usage("unknown selection '" + a.selection + "'");
  }
  cfg.split.seed = a.split_seed;
  cfg.window_len = a.window;
  cfg.stft.window_len = a.stft_window;
  cfg.stft.hop = a.stft_hop;
  cfg.stft.nfft = a.stft_nfft;
  cfg.keep_libraries = a.save_libraries;

  const auto report = run_sweep(load_manifest(a.dataset), cfg);
  ReportFormats formats;
  formats.svg = !a.no_svg;
  const auto files = emit_report(report, a.out, formats);

  json libs = json::array();
  for (const auto& rec : report.libraries) {
    const fs::path base = fs::path(a.out) / ("library_" + std::string(to_string(rec.feature)) + "_" + snr_label(rec.snr_db));
    LibraryContext ctx{cfg.apply_denoise, cfg.denoise, cfg.stft, cfg.corrupt_references ? rec.snr_db : kNoNoise};
    save_library(rec.library, ctx, base);
    libs.push_back(base.string());
  }

  json summary{{"out", a.out}, {"files", files.size()}, {"tests", report.test_ids.size()}, {"refs", report.n_refs}};
  if (!libs.empty()) summary["libraries"] = libs;
  std::cout << summary.dump() << "\n";
  return 0;
}

int run_classify(const ClassifyArgs& a) {
  const auto loaded = load_library(a.library);
  const auto measure = parse_measure_kind(a.measure);
  if (!measure) fail_usage("unknown measure '" + a.measure + "'");

  Segment seg;
  seg.samples = read_recording(a.segment, parse_format(a.format));
  seg.sample_rate_hz = a.rate;
  seg.source_id = fs::path(a.segment).filename().string();

  RunConfig cfg;
  cfg.apply_denoise = loaded.context.denoise;
  cfg.denoise = loaded.context.denoise_cfg;
  cfg.master_seed = a.seed;
  const auto prepared = prepare_segment(seg, parse_snr(a.snr), cfg);
  const auto fv = extract(loaded.library.kind(), prepared.samples, loaded.context.stft);
  const auto card = classify(fv, loaded.library, *measure);

  const auto& entry = loaded.library.entry(card.decided);
  std::cout << json{{"decided", card.decided},
                    {"class_name", entry.cls.name},
                    {"measure", std::string(to_string(*measure))},
                    {"tie", card.tie},
                    {"scores", card.scores}}
                   .dump()
            << "\n";
  return 0;
}

int run_report(const ReportArgs& a) {
  const auto report = read_run_log(a.log);
  ReportFormats formats;
  formats.jsonl = true;
  const auto files = emit_report(report, a.out, formats);
  std::cout << json{{"out", a.out}, {"files", files.size()}}.dump() << "\n";
  return 0;
}

void print_error(std::string_view code, const std::string& message) {
  std::cerr << json{{"error", std::string(code)}, {"message", message}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Similarity-based fault classification for vibration data"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic labeled dataset");
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--classes", synth.spec.n_classes, "Number of classes")->capture_default_str();
  synth_cmd->add_option("--segments-per-class", synth.spec.segments_per_class, "Segments per class")->capture_default_str();
  synth_cmd->add_option("--speeds", synth.spec.n_speeds, "Motor speeds per class")->capture_default_str();
  synth_cmd->add_option("--rate", synth.spec.sample_rate_hz, "Sample rate in Hz")->capture_default_str();
  synth_cmd->add_option("--window", synth.spec.window_len, "Segment length")->capture_default_str();
  synth_cmd->add_option("--seed", synth.spec.seed, "Generator seed")->capture_default_str();
  synth_cmd->add_option("--format", synth.format, "Recording format: f64 or text")->capture_default_str();

  SegmentArgs segment;
  auto* segment_cmd = app.add_subcommand("segment", "Cut recordings into fixed windows and cache them");
  segment_cmd->add_option("--dataset", segment.dataset, "Input manifest")->required();
  segment_cmd->add_option("--out", segment.out, "Output directory")->required();
  segment_cmd->add_option("--window", segment.window, "Segment length")->capture_default_str();

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run the accuracy-vs-SNR evaluation");
  sweep_cmd->add_option("--dataset", sweep.dataset, "Dataset manifest")->required();
  sweep_cmd->add_option("--out", sweep.out, "Output directory")->capture_default_str();
  sweep_cmd->add_option("--features", sweep.features, "Feature kinds (time,fft,stft)")->delimiter(',');
  sweep_cmd->add_option("--measures", sweep.measures, "Measures (cosine,euclidean,ssm)")->delimiter(',');
  sweep_cmd->add_option("--snr", sweep.snr, "SNR levels in dB; 'inf' or 'clean' for no noise")->delimiter(',');
  sweep_cmd->add_option("--seed", sweep.seed, "Master noise seed")->capture_default_str();
  sweep_cmd->add_flag("--refs-clean", sweep.refs_clean, "Keep reference segments noise free");
  sweep_cmd->add_flag("--no-denoise", sweep.no_denoise, "Skip wavelet denoising");
  sweep_cmd->add_option("--threads", sweep.threads, "Worker threads, 0 for all cores")->capture_default_str();
  sweep_cmd->add_option("--depth", sweep.depth, "Wavelet packet depth")->capture_default_str();
  sweep_cmd->add_option("--threshold-rule", sweep.rule, "paper or donoho")->capture_default_str();
  sweep_cmd->add_option("--refs-per-speed", sweep.refs_per_speed, "References per (class, speed)")->capture_default_str();
  sweep_cmd->add_option("--selection", sweep.selection, "first or random")->capture_default_str();
  sweep_cmd->add_option("--split-seed", sweep.split_seed, "Seed for random reference selection")->capture_default_str();
  sweep_cmd->add_option("--window", sweep.window, "Segment length")->capture_default_str();
  sweep_cmd->add_option("--stft-window", sweep.stft_window, "STFT window length")->capture_default_str();
  sweep_cmd->add_option("--stft-hop", sweep.stft_hop, "STFT hop")->capture_default_str();
  sweep_cmd->add_option("--stft-nfft", sweep.stft_nfft, "STFT FFT length, 0 for the window length")->capture_default_str();
  sweep_cmd->add_flag("--save-libraries", sweep.save_libraries, "Write each reference library next to the report");
  sweep_cmd->add_flag("--no-svg", sweep.no_svg, "Skip SVG scatter plots");

  ClassifyArgs cls;
  auto* classify_cmd = app.add_subcommand("classify", "Classify one segment against a saved library");
  classify_cmd->add_option("--library", cls.library, "Library base path (without .desc/.f64)")->required();
  classify_cmd->add_option("--segment", cls.segment, "Segment recording")->required();
  classify_cmd->add_option("--format", cls.format, "Recording format: text or f64")->capture_default_str();
  classify_cmd->add_option("--measure", cls.measure, "cosine, euclidean or ssm")->capture_default_str();
  classify_cmd->add_option("--snr", cls.snr, "Corrupt the segment first; 'inf' leaves it clean")->capture_default_str();
  classify_cmd->add_option("--seed", cls.seed, "Master noise seed")->capture_default_str();
  classify_cmd->add_option("--rate", cls.rate, "Sample rate in Hz")->capture_default_str();

  ReportArgs rep;
  auto* report_cmd = app.add_subcommand("report", "Re-render reports from a run log");
  report_cmd->add_option("--log", rep.log, "run.jsonl")->required();
  report_cmd->add_option("--out", rep.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return 2;
  }

  try {
    if (*synth_cmd) return run_synth(synth);
    if (*segment_cmd) return run_segment(segment);
    if (*sweep_cmd) return run_sweep_cmd(sweep);
    if (*classify_cmd) return run_classify(cls);
    if (*report_cmd) return run_report(rep);
  } catch (const Error& e) {
    print_error(to_string(e.code()), e.what());
    return e.code() == ErrorCode::invalid_config ? 2 : 1;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
  return 0;
}
