#include "pdm/report.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pdm/error.hpp"

namespace pdm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr FeatureKind kFeatureOrder[] = {FeatureKind::time, FeatureKind::fft, FeatureKind::stft};
constexpr MeasureKind kMeasureOrder[] = {MeasureKind::cosine, MeasureKind::euclidean, MeasureKind::ssm};

template <typename T, std::size_t N>
std::vector<T> canonical(const T (&order)[N], const std::vector<T>& present) {
  std::vector<T> out;
  for (const auto& v : order) {
    if (std::find(present.begin(), present.end(), v) != present.end()) out.push_back(v);
  }
  return out;
}

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string timestamp_line() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return std::string("# generated_at=") + buf + "\n";
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::io_error, "write failed for " + path.string());
}

std::string file_stem(FeatureKind f, double snr) { return std::string(to_string(f)) + "_" + snr_label(snr); }

json snr_to_json(double snr) { return std::isinf(snr) ? json("clean") : json(snr); }
double snr_from_json(const json& j) { return j.is_string() ? kNoNoise : j.get<double>(); }

json config_to_json(const RunConfig& c) {
  json j;
  for (auto f : c.features) j["features"].push_back(std::string(to_string(f)));
  for (auto m : c.measures) j["measures"].push_back(std::string(to_string(m)));
  for (double s : c.snr_db) j["snr_db"].push_back(snr_to_json(s));
  j["apply_denoise"] = c.apply_denoise;
  j["denoise_depth"] = c.denoise.depth;
  j["threshold_rule"] = c.denoise.rule == ThresholdRule::paper ? "paper" : "donoho";
  j["stft_window"] = c.stft.window_len;
  j["stft_hop"] = c.stft.hop;
  j["stft_nfft"] = c.stft.nfft;
  j["ssm_window"] = c.ssm.window;
  j["ssm_stride"] = c.ssm.stride;
  j["ssm_k1"] = c.ssm.k1;
  j["ssm_k2"] = c.ssm.k2;
  j["refs_per_class_per_speed"] = c.split.refs_per_class_per_speed;
  j["selection"] = c.split.selection == Selection::first ? "first" : "seeded_random";
  j["split_seed"] = c.split.seed;
  j["window_len"] = c.window_len;
  j["master_seed"] = c.master_seed;
  j["corrupt_references"] = c.corrupt_references;
  return j;
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  c.features.clear();
  c.measures.clear();
  c.snr_db.clear();
  for (const auto& f : j.at("features")) c.features.push_back(parse_feature_kind(f.get<std::string>()).value());
  for (const auto& m : j.at("measures")) c.measures.push_back(parse_measure_kind(m.get<std::string>()).value());
  for (const auto& s : j.at("snr_db")) c.snr_db.push_back(snr_from_json(s));
  c.apply_denoise = j.at("apply_denoise").get<bool>();
  c.denoise.depth = j.at("denoise_depth").get<int>();
  c.denoise.rule = j.at("threshold_rule").get<std::string>() == "paper" ? ThresholdRule::paper : ThresholdRule::donoho;
  c.stft.window_len = j.at("stft_window").get<std::size_t>();
  c.stft.hop = j.at("stft_hop").get<std::size_t>();
  c.stft.nfft = j.at("stft_nfft").get<std::size_t>();
  c.ssm.window = j.at("ssm_window").get<std::size_t>();
  c.ssm.stride = j.at("ssm_stride").get<std::size_t>();
  c.ssm.k1 = j.at("ssm_k1").get<double>();
  c.ssm.k2 = j.at("ssm_k2").get<double>();
  c.split.refs_per_class_per_speed = j.at("refs_per_class_per_speed").get<std::size_t>();
  c.split.selection = j.at("selection").get<std::string>() == "first" ? Selection::first : Selection::seeded_random;
  c.split.seed = j.at("split_seed").get<std::uint64_t>();
  c.window_len = j.at("window_len").get<std::size_t>();
  c.master_seed = j.at("master_seed").get<std::uint64_t>();
  c.corrupt_references = j.at("corrupt_references").get<bool>();
  return c;
}

// Tableau 10
constexpr const char* kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                                    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};

}  // namespace

ScatterAxes scatter_axes(FeatureKind kind) {
  if (kind == FeatureKind::time) return {MeasureKind::ssm, MeasureKind::euclidean};
  return {MeasureKind::cosine, MeasureKind::euclidean};
}

std::string accuracy_grid_csv(const EvalReport& report) {
  const auto features = canonical(kFeatureOrder, report.config.features);
  const auto measures = canonical(kMeasureOrder, report.config.measures);
  std::ostringstream out;
  out << "feature,measure";
  for (double s : report.config.snr_db) out << "," << snr_label(s);
  out << "\n";
  if (report.cells.empty()) return out.str();
  for (auto f : features) {
    for (auto m : measures) {
      out << to_string(f) << "," << to_string(m);
      for (double s : report.config.snr_db) {
        const auto* cell = report.find(f, m, s);
        out << "," << (cell ? fixed6(cell->accuracy) : std::string());
      }
      out << "\n";
    }
  }
  return out.str();
}

std::string confusion_csv(const EvalReport& report, const CellResult& cell) {
  std::ostringstream out;
  out << "true\\predicted";
  for (const auto& name : report.class_names) out << "," << name;
  out << "\n";
  for (std::size_t r = 0; r < cell.confusion.size(); ++r) {
    out << (r < report.class_names.size() ? report.class_names[r] : std::to_string(r));
    for (auto v : cell.confusion[r]) out << "," << v;
    out << "\n";
  }
  return out.str();
}

namespace {

struct ScatterPoint {
  std::string id;
  int truth;
  double x, y;
};

std::vector<ScatterPoint> scatter_points(const EvalReport& report, FeatureKind kind, double snr_db) {
  const auto axes = scatter_axes(kind);
  const auto* cx = report.find(kind, axes.x, snr_db);
  const auto* cy = report.find(kind, axes.y, snr_db);
  std::vector<ScatterPoint> pts;
  if (!cx || !cy || cx->scorecards.size() != report.test_ids.size() || cy->scorecards.size() != report.test_ids.size()) {
    return pts;
  }
  for (std::size_t t = 0; t < report.test_ids.size(); ++t) {
    const auto& a = cx->scorecards[t];
    const auto& b = cy->scorecards[t];
    pts.push_back({report.test_ids[t], report.test_truths[t], a.scores[static_cast<std::size_t>(a.decided)],
                   b.scores[static_cast<std::size_t>(b.decided)]});
  }
  return pts;
}

}  // namespace

std::string scatter_csv(const EvalReport& report, FeatureKind kind, double snr_db) {
  const auto axes = scatter_axes(kind);
  std::ostringstream out;
  out << "segment_id,true_class," << to_string(axes.x) << "," << to_string(axes.y) << "\n";
  for (const auto& p : scatter_points(report, kind, snr_db)) {
    out << p.id << "," << p.truth << "," << shortest(p.x) << "," << shortest(p.y) << "\n";
  }
  return out.str();
}

std::string scatter_svg(const EvalReport& report, FeatureKind kind, double snr_db) {
  const auto axes = scatter_axes(kind);
  const auto pts = scatter_points(report, kind, snr_db);
  constexpr double width = 640, height = 480, margin = 60;

  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (!pts.empty()) {
    xmin = xmax = pts[0].x;
    ymin = ymax = pts[0].y;
    for (const auto& p : pts) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
  }
  if (xmax - xmin <= 0) xmax = xmin + 1;
  if (ymax - ymin <= 0) ymax = ymin + 1;
  auto px = [&](double x) { return margin + (x - xmin) / (xmax - xmin) * (width - 2 * margin); };
  auto py = [&](double y) { return height - margin - (y - ymin) / (ymax - ymin) * (height - 2 * margin); };

  std::ostringstream out;
  char buf[160];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n";
  out << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  out << "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
      << to_string(kind) << " features, " << snr_label(snr_db) << "</text>\n";
  out << "<line x1=\"60\" y1=\"420\" x2=\"580\" y2=\"420\" stroke=\"black\"/>\n";
  out << "<line x1=\"60\" y1=\"60\" x2=\"60\" y2=\"420\" stroke=\"black\"/>\n";
  out << "<text x=\"320\" y=\"460\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << to_string(axes.x) << " [" << shortest(xmin) << ", " << shortest(xmax) << "]</text>\n";
  out << "<text x=\"18\" y=\"240\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 18 240)\">"
      << to_string(axes.y) << " [" << shortest(ymin) << ", " << shortest(ymax) << "]</text>\n";
  out << "<g id=\"points\">\n";
  for (const auto& p : pts) {
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2.5\" fill=\"%s\" fill-opacity=\"0.7\"/>\n",
                  px(p.x), py(p.y), kPalette[static_cast<std::size_t>(p.truth) % 10]);
    out << buf;
  }
  out << "</g>\n<g id=\"legend\">\n";
  for (std::size_t c = 0; c < report.class_names.size(); ++c) {
    const double y = 50 + 14 * static_cast<double>(c);
    std::snprintf(buf, sizeof buf, "<rect x=\"590\" y=\"%.0f\" width=\"8\" height=\"8\" fill=\"%s\"/>\n", y, kPalette[c % 10]);
    out << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"600\" y=\"%.0f\" font-family=\"sans-serif\" font-size=\"9\">", y + 8);
    out << buf << report.class_names[c] << "</text>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

void write_run_log(const EvalReport& report, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());

  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[64];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);

  json header;
  header["type"] = "header";
  header["generated_at"] = stamp;
  header["config"] = config_to_json(report.config);
  header["class_names"] = report.class_names;
  header["test_ids"] = report.test_ids;
  header["test_truths"] = report.test_truths;
  header["class_test_counts"] = report.class_test_counts;
  header["n_refs"] = report.n_refs;
  out << header.dump() << "\n";

  for (const auto& c : report.cells) {
    json j;
    j["type"] = "cell";
    j["feature"] = to_string(c.feature);
    j["measure"] = to_string(c.measure);
    j["snr_db"] = snr_to_json(c.snr_db);
    j["accuracy"] = c.accuracy;
    j["confusion"] = c.confusion;
    j["classify_seconds"] = c.classify_seconds;
    json cards = json::array();
    for (const auto& s : c.scorecards) cards.push_back({{"d", s.decided}, {"t", s.tie}, {"s", s.scores}});
    j["scorecards"] = std::move(cards);
    out << j.dump() << "\n";
  }
  for (const auto& t : report.timings) {
    json j;
    j["type"] = "timing";
    j["snr_db"] = snr_to_json(t.snr_db);
    j["stage"] = t.stage;
    j["seconds"] = t.seconds;
    out << j.dump() << "\n";
  }
  if (!out) throw Error(ErrorCode::io_error, "write failed for " + path.string());
}

EvalReport read_run_log(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  EvalReport r;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      const std::string type = j.at("type").get<std::string>();
      if (type == "header") {
        r.config = config_from_json(j.at("config"));
        r.class_names = j.at("class_names").get<std::vector<std::string>>();
        r.test_ids = j.at("test_ids").get<std::vector<std::string>>();
        r.test_truths = j.at("test_truths").get<std::vector<int>>();
        r.class_test_counts = j.at("class_test_counts").get<std::vector<std::size_t>>();
        r.n_refs = j.at("n_refs").get<std::size_t>();
        have_header = true;
      } else if (type == "cell") {
        CellResult c;
        c.feature = parse_feature_kind(j.at("feature").get<std::string>()).value();
        c.measure = parse_measure_kind(j.at("measure").get<std::string>()).value();
        c.snr_db = snr_from_json(j.at("snr_db"));
        c.accuracy = j.at("accuracy").get<double>();
        c.confusion = j.at("confusion").get<std::vector<std::vector<std::size_t>>>();
        c.classify_seconds = j.at("classify_seconds").get<double>();
        for (const auto& s : j.at("scorecards")) {
          Scorecard card;
          card.measure = c.measure;
          card.decided = s.at("d").get<int>();
          card.tie = s.at("t").get<bool>();
          card.scores = s.at("s").get<std::vector<double>>();
          c.scorecards.push_back(std::move(card));
        }
        r.cells.push_back(std::move(c));
      } else if (type == "timing") {
        r.timings.push_back({snr_from_json(j.at("snr_db")), j.at("stage").get<std::string>(), j.at("seconds").get<double>()});
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::load_error, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const std::bad_optional_access&) {
      throw Error(ErrorCode::load_error, path.string() + ":" + std::to_string(line_no) + ": unknown feature or measure");
    }
  }
  if (!have_header) throw Error(ErrorCode::load_error, path.string() + ": missing header record");
  return r;
}

std::vector<fs::path> emit_report(const EvalReport& report, const fs::path& out_dir, const ReportFormats& formats) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot create " + out_dir.string() + ": " + ec.message());
  std::vector<fs::path> written;
  const std::string stamp = timestamp_line();

  auto put = [&](const fs::path& p, const std::string& body) {
    write_text(p, stamp + body);
    written.push_back(p);
  };

  if (formats.csv) {
    put(out_dir / "accuracy_grid.csv", accuracy_grid_csv(report));
    if (!report.cells.empty()) {
      fs::create_directories(out_dir / "confusion", ec);
      if (ec) throw Error(ErrorCode::io_error, "cannot create " + (out_dir / "confusion").string());
    }
    for (const auto& c : report.cells) {
      put(out_dir / "confusion" / (std::string(to_string(c.feature)) + "_" + std::string(to_string(c.measure)) + "_" +
                                   snr_label(c.snr_db) + ".csv"),
          confusion_csv(report, c));
    }
  }

  if (formats.csv || formats.svg) {
    for (auto f : canonical(kFeatureOrder, report.config.features)) {
      const auto axes = scatter_axes(f);
      for (double s : report.config.snr_db) {
        if (!report.find(f, axes.x, s) || !report.find(f, axes.y, s)) continue;
        fs::create_directories(out_dir / "scatter", ec);
        if (ec) throw Error(ErrorCode::io_error, "cannot create " + (out_dir / "scatter").string());
        if (formats.csv) put(out_dir / "scatter" / (file_stem(f, s) + ".csv"), scatter_csv(report, f, s));
        if (formats.svg) {
          // The timestamp goes in an XML comment so the file stays valid SVG.
          const fs::path p = out_dir / "scatter" / (file_stem(f, s) + ".svg");
          write_text(p, "<!-- " + stamp.substr(2, stamp.size() - 3) + " -->\n" + scatter_svg(report, f, s));
          written.push_back(p);
        }
      }
    }
  }

  if (formats.jsonl) {
    write_run_log(report, out_dir / "run.jsonl");
    written.push_back(out_dir / "run.jsonl");
  }
  return written;
}

}  // namespace pdm
