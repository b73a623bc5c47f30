#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "loca/analyze.hpp"
#include "loca/cli/experiment_config.hpp"
#include "loca/nn/train.hpp"

namespace loca::cli {

/// One student run together with its calibration audit.
struct StudentRun {
  RunMetrics metrics;
  std::size_t calibration_violations = 0;
  std::size_t non_strict_targets = 0;
};

struct DemoResult {
  nn::TeacherResult teacher;
  std::vector<StudentRun> runs;
  RunReport report;
  /// Mean top-1 under loca is at least the mean under none.
  bool loca_not_worse = false;
};

/// Trains the teacher once, then distils a student per seed under the none,
/// skip and loca policies. `log` receives one progress line per run.
DemoResult run_demo(const ExperimentConfig &cfg, std::ostream *log = nullptr);

struct SweepRow {
  double alpha = 0.0;
  std::string label;
  std::size_t calibration_violations = 0;
  std::size_t non_strict_targets = 0;
};

struct SweepResult {
  nn::TeacherResult teacher;
  std::vector<SweepRow> rows;
  std::vector<StudentRun> runs;
  RunReport report;
  std::vector<std::string> warnings;
  std::vector<std::string> notices;
};

/// Distils a "none" baseline plus one loca run per distinct alpha, for every
/// seed. Alphas >= 1 run with a warning; duplicates are dropped with a notice.
/// Throws InvalidArgument for an empty list or a non-positive alpha.
SweepResult run_sweep(const ExperimentConfig &cfg, std::span<const double> alphas, std::ostream *log = nullptr);

/// Row label used for a loca run at `alpha`, e.g. "loca-0.95".
std::string loca_label(double alpha);

} // namespace loca::cli
