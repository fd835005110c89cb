#include "pdm/serialize.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "pdm/error.hpp"

namespace pdm {

namespace fs = std::filesystem;

namespace {

struct DescriptorLine {
  std::string tag;  // leading token without '=', e.g. "class"
  std::map<std::string, std::string> fields;
};

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return __builtin_bswap64(v);
  }
}

fs::path with_suffix(const fs::path& base, const char* suffix) {
  fs::path p = base;
  p += suffix;
  return p;
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const std::string& context) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::load_error, context + ": bad number '" + s + "'");
  }
  return v;
}

std::size_t parse_size(const std::string& s, const std::string& context) {
  std::size_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::load_error, context + ": bad integer '" + s + "'");
  }
  return v;
}

struct Descriptor {
  std::string magic;
  int version{0};
  std::vector<DescriptorLine> lines;

  const std::string& get(const std::string& key, const std::string& context) const {
    for (const auto& l : lines) {
      if (!l.tag.empty()) continue;
      auto it = l.fields.find(key);
      if (it != l.fields.end()) return it->second;
    }
    throw Error(ErrorCode::load_error, context + ": missing key '" + key + "'");
  }
};

Descriptor read_descriptor(const fs::path& path, const std::string& expected_magic) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  Descriptor d;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    if (!have_header) {
      ss >> d.magic >> d.version;
      if (d.magic != expected_magic || d.version != 1) {
        throw Error(ErrorCode::load_error, path.string() + ": expected '" + expected_magic + " 1' header");
      }
      have_header = true;
      continue;
    }
    DescriptorLine dl;
    std::string tok;
    bool first = true;
    while (ss >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) {
        if (!first) throw Error(ErrorCode::load_error, path.string() + ": stray token '" + tok + "'");
        dl.tag = tok;
      } else {
        dl.fields[tok.substr(0, eq)] = tok.substr(eq + 1);
      }
      first = false;
    }
    d.lines.push_back(std::move(dl));
  }
  if (!have_header) throw Error(ErrorCode::load_error, path.string() + ": empty descriptor");
  return d;
}

void write_meta(std::ostream& out, const FeatureMeta& m) {
  out << "segment_len=" << m.segment_len << "\n"
      << "stft_window=" << m.stft_window << "\n"
      << "stft_hop=" << m.stft_hop << "\n"
      << "stft_nfft=" << m.stft_nfft << "\n"
      << "stft_frames=" << m.stft_frames << "\n";
}

FeatureMeta read_meta(const Descriptor& d, const std::string& ctx) {
  FeatureMeta m;
  m.segment_len = parse_size(d.get("segment_len", ctx), ctx);
  m.stft_window = parse_size(d.get("stft_window", ctx), ctx);
  m.stft_hop = parse_size(d.get("stft_hop", ctx), ctx);
  m.stft_nfft = parse_size(d.get("stft_nfft", ctx), ctx);
  m.stft_frames = parse_size(d.get("stft_frames", ctx), ctx);
  return m;
}

FeatureKind read_kind(const Descriptor& d, const std::string& ctx) {
  const auto kind = parse_feature_kind(d.get("kind", ctx));
  if (!kind) throw Error(ErrorCode::load_error, ctx + ": unknown feature kind");
  return *kind;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::io_error, "write failed for " + path.string());
}

}  // namespace

void write_f64_le(const fs::path& path, std::span<const double> values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  std::vector<std::uint64_t> words(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) words[i] = to_le(std::bit_cast<std::uint64_t>(values[i]));
  out.write(reinterpret_cast<const char*>(words.data()), static_cast<std::streamsize>(words.size() * 8));
  if (!out) throw Error(ErrorCode::io_error, "write failed for " + path.string());
}

std::vector<double> read_f64_le(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::size_t>(in.tellg());
  if (bytes % 8 != 0) {
    throw Error(ErrorCode::load_error, path.string() + ": size " + std::to_string(bytes) + " is not a multiple of 8");
  }
  in.seekg(0);
  std::vector<std::uint64_t> words(bytes / 8);
  in.read(reinterpret_cast<char*>(words.data()), static_cast<std::streamsize>(bytes));
  if (!in) throw Error(ErrorCode::io_error, "read failed for " + path.string());
  std::vector<double> out(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) out[i] = std::bit_cast<double>(to_le(words[i]));
  return out;
}

void save_feature_vector(const FeatureVector& fv, const fs::path& base) {
  write_f64_le(with_suffix(base, ".f64"), fv.values);
  std::ostringstream d;
  d << "pdm-features 1\n"
    << "kind=" << to_string(fv.kind) << "\n"
    << "length=" << fv.values.size() << "\n";
  write_meta(d, fv.meta);
  d << "degenerate=" << (fv.degenerate ? 1 : 0) << "\n";
  write_file(with_suffix(base, ".desc"), d.str());
}

FeatureVector load_feature_vector(const fs::path& base) {
  const auto desc_path = with_suffix(base, ".desc");
  const auto d = read_descriptor(desc_path, "pdm-features");
  const std::string ctx = desc_path.string();
  FeatureVector fv;
  fv.kind = read_kind(d, ctx);
  fv.meta = read_meta(d, ctx);
  fv.degenerate = d.get("degenerate", ctx) == "1";
  fv.values = read_f64_le(with_suffix(base, ".f64"));
  if (fv.values.size() != parse_size(d.get("length", ctx), ctx)) {
    throw Error(ErrorCode::load_error, ctx + ": length does not match binary payload");
  }
  return fv;
}

void save_library(const ReferenceLibrary& lib, const LibraryContext& ctx, const fs::path& base) {
  std::vector<double> payload;
  payload.reserve(lib.class_count() * lib.feature_length());
  for (const auto& e : lib.entries()) {
    payload.insert(payload.end(), e.reference.values.begin(), e.reference.values.end());
  }
  write_f64_le(with_suffix(base, ".f64"), payload);

  std::ostringstream d;
  d << "pdm-library 1\n"
    << "kind=" << to_string(lib.kind()) << "\n"
    << "length=" << lib.feature_length() << "\n"
    << "classes=" << lib.class_count() << "\n";
  write_meta(d, lib.entries().front().reference.meta);
  d << "denoise=" << (ctx.denoise ? 1 : 0) << "\n"
    << "denoise_depth=" << ctx.denoise_cfg.depth << "\n"
    << "threshold_rule=" << (ctx.denoise_cfg.rule == ThresholdRule::paper ? "paper" : "donoho") << "\n"
    << "cfg_stft_window=" << ctx.stft.window_len << "\n"
    << "cfg_stft_hop=" << ctx.stft.hop << "\n"
    << "cfg_stft_nfft=" << ctx.stft.nfft << "\n"
    << "snr_db=" << format_double(ctx.snr_db) << "\n";
  for (const auto& e : lib.entries()) {
    d << "class id=" << e.cls.id << " name=" << e.cls.name << " refs=" << e.provenance.size() << " provenance=";
    for (std::size_t i = 0; i < e.provenance.size(); ++i) d << (i ? "," : "") << e.provenance[i];
    d << "\n";
  }
  write_file(with_suffix(base, ".desc"), d.str());
}

LoadedLibrary load_library(const fs::path& base) {
  const auto desc_path = with_suffix(base, ".desc");
  const auto d = read_descriptor(desc_path, "pdm-library");
  const std::string ctx = desc_path.string();
  const FeatureKind kind = read_kind(d, ctx);
  const std::size_t len = parse_size(d.get("length", ctx), ctx);
  const std::size_t classes = parse_size(d.get("classes", ctx), ctx);
  const FeatureMeta meta = read_meta(d, ctx);

  LibraryContext lc;
  lc.denoise = d.get("denoise", ctx) == "1";
  lc.denoise_cfg.depth = static_cast<int>(parse_size(d.get("denoise_depth", ctx), ctx));
  lc.denoise_cfg.rule = d.get("threshold_rule", ctx) == "donoho" ? ThresholdRule::donoho : ThresholdRule::paper;
  lc.stft.window_len = parse_size(d.get("cfg_stft_window", ctx), ctx);
  lc.stft.hop = parse_size(d.get("cfg_stft_hop", ctx), ctx);
  lc.stft.nfft = parse_size(d.get("cfg_stft_nfft", ctx), ctx);
  lc.snr_db = parse_double(d.get("snr_db", ctx), ctx);

  const auto payload = read_f64_le(with_suffix(base, ".f64"));
  if (payload.size() != len * classes) {
    throw Error(ErrorCode::load_error, ctx + ": payload holds " + std::to_string(payload.size()) +
                                           " values, expected " + std::to_string(len * classes));
  }

  std::vector<LibraryEntry> entries;
  for (const auto& line : d.lines) {
    if (line.tag != "class") continue;
    LibraryEntry e;
    auto field = [&](const char* key) -> const std::string& {
      auto it = line.fields.find(key);
      if (it == line.fields.end()) throw Error(ErrorCode::load_error, ctx + ": class line missing '" + key + "'");
      return it->second;
    };
    e.cls.id = static_cast<int>(parse_size(field("id"), ctx));
    e.cls.name = field("name");
    std::stringstream prov(field("provenance"));
    for (std::string item; std::getline(prov, item, ',');) {
      if (!item.empty()) e.provenance.push_back(item);
    }
    const std::size_t offset = entries.size() * len;
    if (offset + len > payload.size()) throw Error(ErrorCode::load_error, ctx + ": more class lines than payload records");
    e.reference.kind = kind;
    e.reference.meta = meta;
    e.reference.values.assign(payload.begin() + static_cast<std::ptrdiff_t>(offset),
                              payload.begin() + static_cast<std::ptrdiff_t>(offset + len));
    entries.push_back(std::move(e));
  }
  if (entries.size() != classes) {
    throw Error(ErrorCode::load_error, ctx + ": " + std::to_string(entries.size()) + " class lines, expected " +
                                           std::to_string(classes));
  }
  return {ReferenceLibrary(kind, std::move(entries)), lc};
}

}  // namespace pdm
