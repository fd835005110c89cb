#include "pdm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "pdm/error.hpp"
#include "pdm/serialize.hpp"

namespace pdm {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
bool parse_number(const std::string& s, T& out) {
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

std::string_view to_string(RecordingFormat f) {
  return f == RecordingFormat::text ? "text" : "f64";
}

void write_recording(const fs::path& path, std::span<const double> samples, RecordingFormat format) {
  if (format == RecordingFormat::f64) {
    write_f64_le(path, samples);
    return;
  }
  std::string text;
  text.reserve(samples.size() * 24);
  char buf[64];
  for (double v : samples) {
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    text.append(buf, res.ptr);
    text.push_back('\n');
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::io_error, "write failed for " + path.string());
}

std::vector<double> read_recording(const fs::path& path, RecordingFormat format) {
  if (format == RecordingFormat::f64) return read_f64_le(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  std::vector<double> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    double v = 0.0;
    if (t == "nan" || t == "inf" || t == "-inf" || !parse_number(t, v)) {
      throw Error(ErrorCode::load_error, path.string() + ":" + std::to_string(line_no) + ": bad sample '" + t + "'");
    }
    out.push_back(v);
  }
  return out;
}

fs::path DatasetManifest::resolve(const ManifestEntry& e) const {
  return e.path.is_absolute() ? e.path : base_dir / e.path;
}

std::size_t DatasetManifest::class_count() const {
  std::set<int> ids;
  for (const auto& e : entries) ids.insert(e.class_id);
  return ids.size();
}

std::vector<std::string> DatasetManifest::class_names() const {
  std::vector<std::string> names(class_count());
  for (const auto& e : entries) {
    if (e.class_id >= 0 && static_cast<std::size_t>(e.class_id) < names.size()) names[static_cast<std::size_t>(e.class_id)] = e.class_name;
  }
  return names;
}

DatasetManifest parse_manifest(std::istream& in, const fs::path& base_dir, const std::string& origin) {
  DatasetManifest m;
  m.base_dir = base_dir;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<std::size_t> entry_lines;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    std::istringstream ss(t);
    std::string head;
    ss >> head;
    if (!have_header) {
      int version = 0;
      if (head != "pdm-manifest" || !(ss >> version)) {
        throw Error(ErrorCode::validation_error, where + ": expected 'pdm-manifest <version>' header");
      }
      if (version != 1) throw Error(ErrorCode::validation_error, where + ": unsupported manifest version " + std::to_string(version));
      m.schema_version = version;
      have_header = true;
      continue;
    }
    if (head != "entry") throw Error(ErrorCode::validation_error, where + ": unknown record '" + head + "'");

    std::map<std::string, std::string> fields;
    for (std::string tok; ss >> tok;) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos || eq == 0) throw Error(ErrorCode::validation_error, where + ": malformed token '" + tok + "'");
      if (!fields.emplace(tok.substr(0, eq), tok.substr(eq + 1)).second) {
        throw Error(ErrorCode::validation_error, where + ": repeated key '" + tok.substr(0, eq) + "'");
      }
    }
    auto need = [&](const char* key) -> const std::string& {
      auto it = fields.find(key);
      if (it == fields.end() || it->second.empty()) {
        throw Error(ErrorCode::validation_error, where + ": missing '" + key + "'");
      }
      return it->second;
    };
    ManifestEntry e;
    e.path = need("path");
    e.class_name = need("class_name");
    if (!parse_number(need("class_id"), e.class_id) || e.class_id < 0) {
      throw Error(ErrorCode::validation_error, where + ": bad class_id");
    }
    if (!parse_number(need("motor_speed_rpm"), e.motor_speed_rpm) || e.motor_speed_rpm < 0) {
      throw Error(ErrorCode::validation_error, where + ": bad motor_speed_rpm");
    }
    if (!parse_number(need("sample_rate_hz"), e.sample_rate_hz) || !(e.sample_rate_hz > 0.0) ||
        !std::isfinite(e.sample_rate_hz)) {
      throw Error(ErrorCode::validation_error, where + ": bad sample_rate_hz");
    }
    const std::string& fmt = need("format");
    if (fmt == "text") {
      e.format = RecordingFormat::text;
    } else if (fmt == "f64") {
      e.format = RecordingFormat::f64;
    } else {
      throw Error(ErrorCode::validation_error, where + ": unknown format '" + fmt + "'");
    }
    for (const auto& [k, v] : fields) {
      static const std::set<std::string> known{"path", "class_id", "class_name", "motor_speed_rpm", "sample_rate_hz", "format"};
      if (!known.count(k)) throw Error(ErrorCode::validation_error, where + ": unknown key '" + k + "'");
    }
    m.entries.push_back(std::move(e));
    entry_lines.push_back(line_no);
  }

  if (!have_header) throw Error(ErrorCode::validation_error, origin + ": missing 'pdm-manifest' header");
  if (m.entries.empty()) throw Error(ErrorCode::empty_dataset, origin + ": manifest has no entries");

  std::map<std::string, std::size_t> seen_paths;
  std::map<int, std::string> names;
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    const auto& e = m.entries[i];
    const std::string where = origin + ":" + std::to_string(entry_lines[i]);
    const std::string key = e.path.lexically_normal().string();
    auto [it, inserted] = seen_paths.emplace(key, i);
    if (!inserted) {
      const auto& prev = m.entries[it->second];
      if (prev.class_id != e.class_id || prev.class_name != e.class_name || prev.motor_speed_rpm != e.motor_speed_rpm) {
        throw Error(ErrorCode::validation_error, where + ": '" + key + "' listed with conflicting labels");
      }
      throw Error(ErrorCode::validation_error, where + ": duplicate entry for '" + key + "'");
    }
    auto [nit, fresh] = names.emplace(e.class_id, e.class_name);
    if (!fresh && nit->second != e.class_name) {
      throw Error(ErrorCode::validation_error, where + ": class_id " + std::to_string(e.class_id) + " named both '" +
                                                   nit->second + "' and '" + e.class_name + "'");
    }
    if (e.sample_rate_hz != m.entries.front().sample_rate_hz) {
      throw Error(ErrorCode::validation_error, where + ": sample rate differs from the first entry");
    }
  }
  int expected = 0;
  for (const auto& [id, name] : names) {
    if (id != expected) {
      throw Error(ErrorCode::validation_error, origin + ": class ids are not contiguous (missing " + std::to_string(expected) + ")");
    }
    ++expected;
  }
  return m;
}

DatasetManifest load_manifest(const fs::path& path, bool verify_recordings) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::load_error, "cannot open manifest " + path.string());
  auto m = parse_manifest(in, path.parent_path(), path.string());
  for (const auto& e : m.entries) {
    const auto full = m.resolve(e);
    if (!fs::is_regular_file(full)) {
      throw Error(ErrorCode::load_error, "entry '" + e.path.string() + "': file not found (" + full.string() + ")");
    }
    if (!verify_recordings) continue;
    std::vector<double> samples;
    try {
      samples = read_recording(full, e.format);
    } catch (const Error& err) {
      throw Error(ErrorCode::load_error, "entry '" + e.path.string() + "': " + err.what());
    }
    for (double v : samples) {
      if (!std::isfinite(v)) throw Error(ErrorCode::load_error, "entry '" + e.path.string() + "': non-finite samples");
    }
  }
  return m;
}

void save_manifest(const DatasetManifest& manifest, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  out << "pdm-manifest " << manifest.schema_version << "\n";
  char buf[64];
  for (const auto& e : manifest.entries) {
    auto res = std::to_chars(buf, buf + sizeof buf, e.sample_rate_hz);
    out << "entry path=" << e.path.generic_string() << " class_id=" << e.class_id << " class_name=" << e.class_name
        << " motor_speed_rpm=" << e.motor_speed_rpm << " sample_rate_hz=" << std::string(buf, res.ptr)
        << " format=" << to_string(e.format) << "\n";
  }
  if (!out) throw Error(ErrorCode::io_error, "write failed for " + path.string());
}

SegmentedDataset load_and_segment(const DatasetManifest& manifest, std::size_t window_len) {
  if (window_len == 0) throw Error(ErrorCode::invalid_input, "load_and_segment: window must be positive");
  SegmentedDataset out;
  for (const auto& e : manifest.entries) {
    std::vector<double> samples;
    try {
      samples = read_recording(manifest.resolve(e), e.format);
    } catch (const Error& err) {
      throw Error(ErrorCode::load_error, "entry '" + e.path.string() + "': " + err.what());
    }
    for (double v : samples) {
      if (!std::isfinite(v)) throw Error(ErrorCode::load_error, "entry '" + e.path.string() + "': non-finite samples");
    }
    if (samples.size() < window_len) {
      out.warnings.push_back("entry '" + e.path.string() + "': " + std::to_string(samples.size()) +
                             " samples, shorter than window " + std::to_string(window_len) + "; skipped");
      continue;
    }
    auto segs = segment_recording(samples, window_len, window_len, e.sample_rate_hz, e.path.generic_string());
    for (auto& s : segs) {
      s.label = e.class_id;
      s.speed_rpm = e.motor_speed_rpm;
      out.segments.push_back(std::move(s));
    }
  }
  return out;
}

Split split_references(std::span<const Segment> segments, const SplitSpec& spec) {
  if (spec.refs_per_class_per_speed == 0) throw Error(ErrorCode::split_error, "split: refs_per_class_per_speed must be >= 1");

  std::vector<std::pair<int, int>> order;
  std::map<std::pair<int, int>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    if (!s.label) throw Error(ErrorCode::split_error, "split: segment '" + s.source_id + "' has no label");
    const std::pair<int, int> key{*s.label, s.speed_rpm};
    auto [it, fresh] = groups.try_emplace(key);
    if (fresh) order.push_back(key);
    it->second.push_back(i);
  }

  std::vector<bool> is_ref(segments.size(), false);
  for (const auto& key : order) {
    auto members = groups[key];
    const std::size_t k = spec.refs_per_class_per_speed;
    if (members.size() < k) {
      throw Error(ErrorCode::split_error, "split: (class=" + std::to_string(key.first) + ", speed=" +
                                              std::to_string(key.second) + ") has " + std::to_string(members.size()) +
                                              " segments, needs " + std::to_string(k));
    }
    if (spec.selection == Selection::seeded_random) {
      // Partial Fisher-Yates; the stream depends only on (seed, class, speed).
      std::mt19937_64 rng(splitmix64(spec.seed ^ splitmix64((static_cast<std::uint64_t>(key.first) << 32) ^
                                                            static_cast<std::uint32_t>(key.second))));
      for (std::size_t i = 0; i < k; ++i) {
        const std::size_t span_len = members.size() - i;
        const std::size_t j = i + static_cast<std::size_t>(rng() % span_len);
        std::swap(members[i], members[j]);
      }
    }
    for (std::size_t i = 0; i < k; ++i) is_ref[members[i]] = true;
  }

  Split out;
  for (std::size_t i = 0; i < segments.size(); ++i) (is_ref[i] ? out.refs : out.tests).push_back(segments[i]);
  return out;
}

int synth_speed_rpm(std::size_t speed_index) {
  static constexpr int kSpeeds[] = {1797, 1772, 1750, 1730};
  if (speed_index < 4) return kSpeeds[speed_index];
  return 1730 - 20 * static_cast<int>(speed_index - 3);
}

std::string synth_class_name(std::size_t class_id, std::size_t n_classes) {
  static const char* kNames[] = {"Normal",   "IR-0.007", "IR-0.014", "IR-0.021", "B-0.007",
                                 "B-0.014",  "B-0.021",  "OR-0.007", "OR-0.014", "OR-0.021"};
  if (n_classes == 10) return kNames[class_id];
  return "class-" + std::to_string(class_id);
}

std::vector<double> synth_recording(const SynthSpec& spec, std::size_t class_id, std::size_t speed_index,
                                    std::size_t n_samples) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double fs = spec.sample_rate_hz;
  const double speed = synth_speed_rpm(speed_index) / 1797.0;
  const double nyquist = 0.5 * fs;
  GaussianSampler rng(splitmix64(spec.seed ^ splitmix64((class_id << 16) ^ speed_index ^ 0x5EEDULL)));

  // Tone j of class c sits at band_j * 1.06^c; classes are 6% apart within a
  // band, more than the 3.7% spread across the four motor speeds.
  static constexpr double kBands[] = {300.0, 900.0, 1700.0, 3100.0};
  const std::size_t n_tones = 2 + class_id % 3;
  const double class_step = std::pow(1.06, static_cast<double>(class_id));

  struct Tone {
    double freq, amp, phase;
  };
  std::vector<Tone> tones;
  for (std::size_t j = 0; j < n_tones; ++j) {
    const std::size_t band = (j + class_id) % 4;
    const double f = std::min(kBands[band] * class_step * speed, 0.9 * nyquist);
    tones.push_back({f, 1.0 / (1.0 + 0.35 * static_cast<double>(j)), two_pi * rng.uniform()});
  }

  // Burst train: decaying structural resonance; both the repetition rate and
  // the resonance band are class specific.
  const double burst_rate = (40.0 + 13.0 * static_cast<double>(class_id)) * speed;
  const double resonance = std::min(1500.0 + 420.0 * static_cast<double>(class_id), 0.9 * nyquist);
  const double decay_s = 0.001;
  const double burst_amp = 1.5;
  const double burst_offset = rng.uniform() / burst_rate;

  std::vector<double> x(n_samples, 0.0);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double t = static_cast<double>(i) / fs;
    double v = 0.0;
    for (const auto& tone : tones) v += tone.amp * std::sin(two_pi * tone.freq * t + tone.phase);
    const double since = std::fmod(t + burst_offset, 1.0 / burst_rate);
    v += burst_amp * std::exp(-since / decay_s) * std::sin(two_pi * resonance * since);
    x[i] = v;
  }

  const double rms = std::sqrt(signal_power(x));
  for (double& v : x) v = v / rms + 0.02 * rng.next();
  return x;
}

DatasetManifest synth_dataset(const SynthSpec& spec, const fs::path& out_dir) {
  if (spec.n_classes < 2) throw Error(ErrorCode::invalid_input, "synth_dataset: need at least 2 classes");
  if (spec.n_speeds == 0 || spec.window_len == 0) throw Error(ErrorCode::invalid_input, "synth_dataset: speeds and window must be positive");
  if (spec.segments_per_class < spec.n_speeds) {
    throw Error(ErrorCode::invalid_input, "synth_dataset: need at least one segment per (class, speed)");
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot create " + out_dir.string() + ": " + ec.message());

  DatasetManifest m;
  m.base_dir = out_dir;
  const std::size_t base = spec.segments_per_class / spec.n_speeds;
  const std::size_t extra = spec.segments_per_class % spec.n_speeds;
  for (std::size_t c = 0; c < spec.n_classes; ++c) {
    for (std::size_t s = 0; s < spec.n_speeds; ++s) {
      const std::size_t n_segments = base + (s < extra ? 1 : 0);
      // A partial trailing window exercises the discard rule.
      const std::size_t n_samples = n_segments * spec.window_len + spec.window_len / 3;
      const auto x = synth_recording(spec, c, s, n_samples);

      ManifestEntry e;
      e.class_id = static_cast<int>(c);
      e.class_name = synth_class_name(c, spec.n_classes);
      e.motor_speed_rpm = synth_speed_rpm(s);
      e.sample_rate_hz = spec.sample_rate_hz;
      e.format = spec.format;
      e.path = "c" + std::to_string(c) + "_" + std::to_string(e.motor_speed_rpm) +
               (spec.format == RecordingFormat::text ? ".txt" : ".f64");
      write_recording(out_dir / e.path, x, spec.format);
      m.entries.push_back(std::move(e));
    }
  }
  save_manifest(m, out_dir / "manifest.pdm");
  return m;
}

}  // namespace pdm
