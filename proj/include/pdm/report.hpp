#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pdm/eval.hpp"

namespace pdm {

struct ReportFormats {
  bool csv{true};
  bool jsonl{true};
  bool svg{true};
};

// Measures plotted against each other for one feature kind: (cosine, euclidean)
// for FFT and STFT, (ssm, euclidean) for TIME.
struct ScatterAxes {
  MeasureKind x;
  MeasureKind y;
};
ScatterAxes scatter_axes(FeatureKind kind);

// Writes into out_dir:
//   accuracy_grid.csv                         rows feature x measure, one column per SNR
//   confusion/<feature>_<measure>_<snr>.csv   one matrix per cell
//   scatter/<feature>_<snr>.csv|.svg          winning score under each scatter axis, one point per test
//   run.jsonl                                 full log, re-renderable with read_run_log
// Every CSV starts with one "# generated_at=..." line (an XML comment in SVGs); the rest of the
// bytes depend only on the report.
std::vector<std::filesystem::path> emit_report(const EvalReport& report, const std::filesystem::path& out_dir,
                                               const ReportFormats& formats = {});

// Report bodies without the timestamp line.
std::string accuracy_grid_csv(const EvalReport& report);
std::string confusion_csv(const EvalReport& report, const CellResult& cell);
std::string scatter_csv(const EvalReport& report, FeatureKind kind, double snr_db);
std::string scatter_svg(const EvalReport& report, FeatureKind kind, double snr_db);

void write_run_log(const EvalReport& report, const std::filesystem::path& path);
EvalReport read_run_log(const std::filesystem::path& path);

}  // namespace pdm
