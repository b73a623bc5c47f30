#include "loca/cli/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "loca/errors.hpp"

namespace loca::cli {

namespace {

nn::TeacherResult train_shared_teacher(const ExperimentConfig &cfg, const nn::Dataset &data, std::ostream *log) {
  nn::TrainConfig teacher_cfg = cfg.teacher.train;
  teacher_cfg.calibration = {};
  nn::TeacherResult teacher = nn::train_teacher(data, cfg.teacher.hidden, teacher_cfg);
  if (log) {
    *log << std::fixed << std::setprecision(4) << "teacher: train_acc=" << teacher.train_accuracy
         << " test_acc=" << teacher.test_accuracy << " train_misinstruction=" << teacher.train_misinstruction.ratio
         << " (" << teacher.train_misinstruction.misinstructed << "/" << teacher.train_misinstruction.total << ")\n";
  }
  return teacher;
}

StudentRun run_student(const ExperimentConfig &cfg, const nn::Dataset &data, const nn::Mlp &teacher,
                       const std::string &label, Policy policy, std::uint64_t seed, double alpha, std::ostream *log) {
  const nn::StudentResult res =
      nn::distill_student(data, teacher, cfg.student.hidden, cfg.student_config(policy, seed, alpha));
  StudentRun run;
  run.metrics = RunMetrics{label,
                           static_cast<unsigned>(seed),
                           res.test_top1,
                           res.test_top5,
                           res.final_loss,
                           res.total_calibrated(),
                           res.total_dropped(),
                           res.seconds};
  run.calibration_violations = res.calibration_violations;
  run.non_strict_targets = res.non_strict_targets;
  if (log) {
    *log << std::fixed << std::setprecision(4) << label << " seed=" << seed << " top1=" << res.test_top1
         << " top5=" << res.test_top5 << " final_loss=" << res.final_loss << " calibrated=" << run.metrics.calibrated
         << " dropped=" << run.metrics.dropped << " seconds=" << std::setprecision(2) << res.seconds << '\n';
  }
  return run;
}

const PolicySummary *find_row(const RunReport &report, const std::string &policy) {
  for (const auto &row : report.rows) {
    if (row.policy == policy)
      return &row;
  }
  return nullptr;
}

std::string teacher_note(const nn::TeacherResult &teacher) {
  std::ostringstream note;
  note << std::fixed << std::setprecision(4) << "teacher train_misinstruction=" << teacher.train_misinstruction.ratio
       << " train_acc=" << teacher.train_accuracy << " test_acc=" << teacher.test_accuracy;
  return note.str();
}

} // namespace

std::string loca_label(double alpha) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, alpha);
  return "loca-" + std::string(buf, res.ptr);
}

DemoResult run_demo(const ExperimentConfig &cfg, std::ostream *log) {
  const nn::Dataset data = nn::gen_synthetic(cfg.dataset);
  DemoResult result{train_shared_teacher(cfg, data, log)};

  std::vector<RunMetrics> metrics;
  for (const Policy policy : {Policy::none, Policy::skip, Policy::loca}) {
    for (const auto seed : cfg.seeds) {
      result.runs.push_back(
          run_student(cfg, data, result.teacher.model, std::string(to_string(policy)), policy, seed, cfg.alpha, log));
      metrics.push_back(result.runs.back().metrics);
    }
  }
  result.report = compare_runs(metrics);
  result.report.notes.push_back(teacher_note(result.teacher));

  const auto *none = find_row(result.report, "none");
  const auto *loca = find_row(result.report, "loca");
  result.loca_not_worse = none && loca && loca->mean_top1 >= none->mean_top1;
  result.report.notes.push_back(result.loca_not_worse ? "direction loca >= none: ok"
                                                      : "direction loca >= none: FLAGGED (loca below none)");
  std::size_t violations = 0;
  for (const auto &run : result.runs)
    violations += run.calibration_violations;
  result.report.notes.push_back("calibration violations: " + std::to_string(violations));
  return result;
}

SweepResult run_sweep(const ExperimentConfig &cfg, std::span<const double> alphas, std::ostream *log) {
  if (alphas.empty())
    throw InvalidArgument("alpha list is empty");

  std::vector<std::string> warnings, notices;
  std::vector<double> distinct;
  for (const double a : alphas) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      std::ostringstream msg;
      msg << "alpha must be positive and finite, got " << a;
      throw InvalidArgument(msg.str());
    }
    if (std::find(distinct.begin(), distinct.end(), a) != distinct.end()) {
      notices.push_back("duplicate alpha " + loca_label(a).substr(5) + " ignored");
      continue;
    }
    distinct.push_back(a);
    if (a >= 1.0) {
      warnings.push_back("alpha " + loca_label(a).substr(5) +
                                " >= 1: the label is no longer guaranteed to be the teacher's top class");
    }
  }

  if (log) {
    for (const auto &n : notices)
      *log << "notice: " << n << '\n';
    for (const auto &w : warnings)
      *log << "warning: " << w << '\n';
  }

  const nn::Dataset data = nn::gen_synthetic(cfg.dataset);
  SweepResult result{train_shared_teacher(cfg, data, log)};
  result.warnings = std::move(warnings);
  result.notices = std::move(notices);

  std::vector<RunMetrics> metrics;
  for (const auto seed : cfg.seeds) {
    result.runs.push_back(run_student(cfg, data, result.teacher.model, "none", Policy::none, seed, cfg.alpha, log));
    metrics.push_back(result.runs.back().metrics);
  }
  for (const double a : distinct) {
    SweepRow row{a, loca_label(a)};
    for (const auto seed : cfg.seeds) {
      result.runs.push_back(run_student(cfg, data, result.teacher.model, row.label, Policy::loca, seed, a, log));
      metrics.push_back(result.runs.back().metrics);
      row.calibration_violations += result.runs.back().calibration_violations;
      row.non_strict_targets += result.runs.back().non_strict_targets;
    }
    result.rows.push_back(row);
  }

  result.report = compare_runs(metrics);
  result.report.notes.push_back(teacher_note(result.teacher));
  for (const auto &row : result.rows) {
    result.report.notes.push_back(row.label + ": calibration violations=" + std::to_string(row.calibration_violations) +
                                  " non-strict targets=" + std::to_string(row.non_strict_targets));
  }
  for (const auto &w : result.warnings)
    result.report.notes.push_back("warning: " + w);
  return result;
}

} // namespace loca::cli
