#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "pdm/classifier.hpp"
#include "pdm/dataset.hpp"
#include "pdm/error.hpp"
#include "pdm/features.hpp"

using namespace pdm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("pdm_dataset_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ErrorCode parse_error(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_manifest(in, ".");
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected parse failure");
  return ErrorCode::io_error;
}

Segment labeled_segment(int cls, int rpm, int k) {
  Segment s;
  s.samples = {double(k)};
  s.sample_rate_hz = 12000;
  s.label = cls;
  s.speed_rpm = rpm;
  s.source_id = "c" + std::to_string(cls) + "_" + std::to_string(rpm) + "#" + std::to_string(k);
  return s;
}

}  // namespace

TEST_CASE("recording round trip is bit exact in both formats") {
  const auto dir = scratch("roundtrip");
  std::mt19937_64 rng(5);
  auto values = oracle::random_vector(rng, 500, -1e3, 1e3);
  values.push_back(std::numeric_limits<double>::min());
  values.push_back(std::numeric_limits<double>::denorm_min());
  values.push_back(-std::numeric_limits<double>::max());
  values.push_back(0.1);
  values.push_back(-0.0);
  for (auto fmt : {RecordingFormat::text, RecordingFormat::f64}) {
    const auto path = dir / ("rec" + std::string(to_string(fmt)));
    write_recording(path, values, fmt);
    const auto back = read_recording(path, fmt);
    REQUIRE(back.size() == values.size());
    CHECK(std::memcmp(back.data(), values.data(), values.size() * sizeof(double)) == 0);
  }
}

TEST_CASE("text recordings reject garbage") {
  const auto dir = scratch("garbage");
  std::ofstream(dir / "bad.txt") << "1.0\n2.0\nabc\n";
  CHECK_THROWS_AS(read_recording(dir / "bad.txt", RecordingFormat::text), Error);
  std::ofstream(dir / "nan.txt") << "1.0\nnan\n";
  CHECK_THROWS_AS(read_recording(dir / "nan.txt", RecordingFormat::text), Error);
  std::ofstream(dir / "blank.txt") << "1.0\n\n  2.5  \n";
  CHECK(read_recording(dir / "blank.txt", RecordingFormat::text) == std::vector<double>{1.0, 2.5});
}

TEST_CASE("manifest parsing: structure and validation errors") {
  const std::string header = "pdm-manifest 1\n";
  const std::string ok = "entry path=a.txt class_id=0 class_name=Normal motor_speed_rpm=1797 sample_rate_hz=12000 format=text\n";
  {
    std::istringstream in("# comment\n" + header + ok);
    const auto m = parse_manifest(in, "/data");
    REQUIRE(m.entries.size() == 1);
    CHECK(m.entries[0].class_name == "Normal");
    CHECK(m.resolve(m.entries[0]) == fs::path("/data/a.txt"));
  }
  CHECK(parse_error(header) == ErrorCode::empty_dataset);
  CHECK(parse_error("# only comments\n" + header + "# nothing\n") == ErrorCode::empty_dataset);
  CHECK(parse_error(ok) == ErrorCode::validation_error);  // no header
  CHECK(parse_error("pdm-manifest 2\n" + ok) == ErrorCode::validation_error);
  CHECK(parse_error(header + "entry path=a.txt class_id=0 class_name=N motor_speed_rpm=1 sample_rate_hz=1 format=wav\n") ==
        ErrorCode::validation_error);
  CHECK(parse_error(header + "entry path=a.txt class_id=0 class_name=N sample_rate_hz=1 format=text\n") ==
        ErrorCode::validation_error);
  CHECK(parse_error(header + "entry path=a.txt class_id=x class_name=N motor_speed_rpm=1 sample_rate_hz=1 format=text\n") ==
        ErrorCode::validation_error);
  // duplicate path, conflicting labels
  CHECK(parse_error(header + ok +
                    "entry path=./a.txt class_id=1 class_name=IR motor_speed_rpm=1797 sample_rate_hz=12000 format=text\n") ==
        ErrorCode::validation_error);
  // non-contiguous ids
  CHECK(parse_error(header + ok + "entry path=b.txt class_id=2 class_name=B motor_speed_rpm=1797 sample_rate_hz=12000 format=text\n") ==
        ErrorCode::validation_error);
  // inconsistent rate
  CHECK(parse_error(header + ok + "entry path=b.txt class_id=1 class_name=B motor_speed_rpm=1797 sample_rate_hz=48000 format=text\n") ==
        ErrorCode::validation_error);
  // one id, two names
  CHECK(parse_error(header + ok + "entry path=b.txt class_id=0 class_name=Other motor_speed_rpm=1772 sample_rate_hz=12000 format=text\n") ==
        ErrorCode::validation_error);
}

TEST_CASE("manifest covering 10 classes x 4 speeds has 40 entries") {
  const auto dir = scratch("table");
  std::ostringstream text;
  text << "pdm-manifest 1\n";
  const int speeds[] = {1797, 1772, 1750, 1730};
  for (int c = 0; c < 10; ++c) {
    for (int s : speeds) {
      const std::string name = "c" + std::to_string(c) + "_" + std::to_string(s) + ".f64";
      write_recording(dir / name, std::vector<double>(2500, 0.5), RecordingFormat::f64);
      text << "entry path=" << name << " class_id=" << c << " class_name=k" << c << " motor_speed_rpm=" << s
           << " sample_rate_hz=12000 format=f64\n";
    }
  }
  std::ofstream(dir / "m.pdm") << text.str();
  const auto m = load_manifest(dir / "m.pdm");
  CHECK(m.entries.size() == 40);
  CHECK(m.class_count() == 10);
  CHECK(m.class_names()[3] == "k3");
  const auto data = load_and_segment(m);
  CHECK(data.segments.size() == 40);
}

TEST_CASE("load_manifest names missing and non-finite recordings") {
  const auto dir = scratch("missing");
  std::ofstream(dir / "m.pdm") << "pdm-manifest 1\nentry path=gone.f64 class_id=0 class_name=N motor_speed_rpm=1 "
                                  "sample_rate_hz=1 format=f64\n";
  try {
    load_manifest(dir / "m.pdm");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::load_error);
    CHECK(std::string(e.what()).find("gone.f64") != std::string::npos);
  }
  write_recording(dir / "gone.f64", std::vector<double>{1.0, std::numeric_limits<double>::quiet_NaN()}, RecordingFormat::f64);
  try {
    load_manifest(dir / "m.pdm");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::load_error);
    CHECK(std::string(e.what()).find("non-finite") != std::string::npos);
  }
  CHECK_NOTHROW(load_manifest(dir / "m.pdm", false));
}

TEST_CASE("load_and_segment counts and skips short recordings") {
  const auto dir = scratch("segment");
  write_recording(dir / "long.txt", std::vector<double>(4000, 1.0), RecordingFormat::text);
  write_recording(dir / "short.txt", std::vector<double>(1999, 1.0), RecordingFormat::text);
  write_recording(dir / "odd.f64", std::vector<double>(9999, 1.0), RecordingFormat::f64);
  std::ofstream(dir / "m.pdm") << "pdm-manifest 1\n"
                                  "entry path=long.txt class_id=0 class_name=A motor_speed_rpm=1797 sample_rate_hz=12000 format=text\n"
                                  "entry path=short.txt class_id=1 class_name=B motor_speed_rpm=1797 sample_rate_hz=12000 format=text\n"
                                  "entry path=odd.f64 class_id=1 class_name=B motor_speed_rpm=1750 sample_rate_hz=12000 format=f64\n";
  const auto data = load_and_segment(load_manifest(dir / "m.pdm"));
  REQUIRE(data.segments.size() == 2 + 4);
  CHECK(data.warnings.size() == 1);
  CHECK(data.segments[0].label == 0);
  CHECK(data.segments[0].source_id == "long.txt#0");
  CHECK(data.segments[2].speed_rpm == 1750);
  CHECK(data.segments[2].duration_s() == doctest::Approx(2000.0 / 12000.0));
}

TEST_CASE("split references: counts, partition, determinism") {
  std::vector<Segment> segs;
  const int speeds[] = {1797, 1772, 1750, 1730};
  for (int c = 0; c < 10; ++c) {
    for (int s : speeds) {
      for (int k = 0; k < 5 + c; ++k) segs.push_back(labeled_segment(c, s, k));
    }
  }
  const auto split = split_references(segs, {});
  CHECK(split.refs.size() == 40);
  CHECK(split.tests.size() == segs.size() - 40);
  std::set<std::string> refs, tests;
  for (const auto& s : split.refs) refs.insert(s.source_id);
  for (const auto& s : split.tests) tests.insert(s.source_id);
  for (const auto& id : refs) CHECK_FALSE(tests.count(id));
  CHECK(refs.size() + tests.size() == segs.size());
  for (const auto& s : split.refs) CHECK(s.samples[0] == 0.0);  // FIRST -> earliest

  const SplitSpec random{2, Selection::seeded_random, 77};
  const auto a = split_references(segs, random), b = split_references(segs, random);
  CHECK(a.refs.size() == 80);
  for (std::size_t i = 0; i < a.refs.size(); ++i) CHECK(a.refs[i].source_id == b.refs[i].source_id);
  const auto other = split_references(segs, {2, Selection::seeded_random, 78});
  bool differs = false;
  for (std::size_t i = 0; i < a.refs.size(); ++i) differs |= a.refs[i].source_id != other.refs[i].source_id;
  CHECK(differs);

  try {
    split_references(segs, {6});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::split_error);
    CHECK(std::string(e.what()).find("class=0") != std::string::npos);
  }
}

TEST_CASE("synthetic dataset: counts, determinism, separability") {
  const auto dir_a = scratch("synth_a"), dir_b = scratch("synth_b");
  SynthSpec spec;
  spec.segments_per_class = 80;
  spec.seed = 2;
  const auto m = synth_dataset(spec, dir_a);
  synth_dataset(spec, dir_b);
  CHECK(m.entries.size() == 40);
  const auto loaded = load_manifest(dir_a / "manifest.pdm");
  const auto data = load_and_segment(loaded);
  CHECK(data.segments.size() == 800);
  CHECK(data.warnings.empty());

  for (const auto& e : m.entries) {
    std::ifstream fa(dir_a / e.path, std::ios::binary), fb(dir_b / e.path, std::ios::binary);
    const std::string a((std::istreambuf_iterator<char>(fa)), {}), b((std::istreambuf_iterator<char>(fb)), {});
    CHECK(a == b);
  }

  const auto split = split_references(data.segments, {});
  std::vector<LabeledFeature> refs;
  for (const auto& s : split.refs) refs.push_back({{*s.label, ""}, fft_features(s), s.source_id});
  const auto lib = build_library(refs);
  std::size_t wrong = 0;
  for (const auto& s : data.segments) wrong += classify(fft_features(s), lib, MeasureKind::euclidean).decided != *s.label;
  CHECK(wrong == 0);

  CHECK_THROWS_AS(synth_dataset(SynthSpec{1}, dir_a), Error);
}
