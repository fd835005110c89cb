#include <filesystem>
#include <cstring>
#include <fstream>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "pdm/error.hpp"
#include "pdm/serialize.hpp"

using namespace pdm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("pdm_serialize_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("f64 files are little-endian binary64") {
  const auto dir = scratch("f64");
  const std::vector<double> v{1.0, -0.0, 1e-300, 3.141592653589793};
  write_f64_le(dir / "v.f64", v);
  CHECK(fs::file_size(dir / "v.f64") == 32);
  std::ifstream in(dir / "v.f64", std::ios::binary);
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  // 1.0 = 0x3FF0000000000000
  CHECK(bytes[0] == 0x00);
  CHECK(bytes[6] == 0xF0);
  CHECK(bytes[7] == 0x3F);
  const auto back = read_f64_le(dir / "v.f64");
  REQUIRE(back.size() == v.size());
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::memcmp(&back[i], &v[i], 8) == 0);

  std::ofstream(dir / "bad.f64", std::ios::binary) << "abc";
  CHECK_THROWS_AS(read_f64_le(dir / "bad.f64"), Error);
  CHECK_THROWS_AS(read_f64_le(dir / "missing.f64"), Error);
}

TEST_CASE("feature vector save/load") {
  const auto dir = scratch("fv");
  std::mt19937_64 rng(3);
  FeatureVector fv;
  fv.kind = FeatureKind::stft;
  fv.values = oracle::random_vector(rng, 1806);
  fv.meta = {2000, 256, 128, 256, 14};
  save_feature_vector(fv, dir / "x");
  CHECK(fs::exists(dir / "x.f64"));
  CHECK(fs::exists(dir / "x.desc"));
  const auto back = load_feature_vector(dir / "x");
  CHECK(back.kind == FeatureKind::stft);
  CHECK(back.values == fv.values);
  CHECK(back.meta.stft_frames == 14);
  CHECK(back.meta.segment_len == 2000);
}

TEST_CASE("library save/load round trip") {
  const auto dir = scratch("lib");
  std::mt19937_64 rng(4);
  std::vector<LabeledFeature> refs;
  for (int c = 0; c < 4; ++c) {
    for (int k = 0; k < 2; ++k) {
      FeatureVector fv;
      fv.kind = FeatureKind::fft;
      fv.values = oracle::random_vector(rng, 11);
      fv.meta.segment_len = 20;
      refs.push_back({{c, "IR-0.00" + std::to_string(c)}, fv, "rec" + std::to_string(c) + "#" + std::to_string(k)});
    }
  }
  const auto lib = build_library(refs);
  LibraryContext ctx;
  ctx.denoise_cfg.rule = ThresholdRule::donoho;
  ctx.snr_db = std::numeric_limits<double>::infinity();
  save_library(lib, ctx, dir / "lib");
  const auto loaded = load_library(dir / "lib");
  CHECK(loaded.library.class_count() == 4);
  CHECK(loaded.library.kind() == FeatureKind::fft);
  CHECK(loaded.context.denoise_cfg.rule == ThresholdRule::donoho);
  CHECK(std::isinf(loaded.context.snr_db));
  for (int c = 0; c < 4; ++c) {
    CHECK(loaded.library.entry(c).reference.values == lib.entry(c).reference.values);
    CHECK(loaded.library.entry(c).cls.name == lib.entry(c).cls.name);
    CHECK(loaded.library.entry(c).provenance == lib.entry(c).provenance);
  }

  // truncated payload
  write_f64_le(dir / "lib.f64", std::vector<double>(5, 0.0));
  try {
    load_library(dir / "lib");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::load_error);
  }
}
