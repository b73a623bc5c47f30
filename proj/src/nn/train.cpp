#include "loca/nn/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <utility>

#include "loca/errors.hpp"

namespace loca::nn {

void TrainConfig::validate() const {
  std::ostringstream msg;
  if (epochs < 0)
    msg << "epochs must be >= 0; ";
  if (batch_size == 0)
    msg << "batch_size must be positive; ";
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    msg << "learning_rate must be positive; ";
  if (!(momentum >= 0.0 && momentum < 1.0))
    msg << "momentum must lie in [0, 1); ";
  if (const auto text = msg.str(); !text.empty())
    throw InvalidArgument("invalid training config: " + text.substr(0, text.size() - 2));
  loss.validate();
  calibration.validate();
}

std::size_t StudentResult::total_calibrated() const {
  return std::accumulate(calibrated_per_epoch.begin(), calibrated_per_epoch.end(), std::size_t{0});
}

std::size_t StudentResult::total_dropped() const {
  return std::accumulate(dropped_per_epoch.begin(), dropped_per_epoch.end(), std::size_t{0});
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd &features, const std::vector<std::size_t> &rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), features.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

namespace {

std::vector<ClassIndex> gather_labels(const std::vector<ClassIndex> &labels, const std::vector<std::size_t> &rows) {
  std::vector<ClassIndex> out;
  out.reserve(rows.size());
  for (std::size_t r : rows)
    out.push_back(labels[r]);
  return out;
}

LogitVector row_logits(const Eigen::MatrixXd &logits, Eigen::Index r) {
  std::vector<double> row(static_cast<std::size_t>(logits.cols()));
  for (Eigen::Index c = 0; c < logits.cols(); ++c)
    row[static_cast<std::size_t>(c)] = logits(r, c);
  return LogitVector(std::move(row));
}

/// Fills `grad` (one row per sample) and returns the batch-mean loss.
using BatchObjective = std::function<double(const std::vector<std::size_t> &rows, const Eigen::MatrixXd &logits,
                                            Eigen::MatrixXd &grad)>;

/// Shared minibatch SGD loop. The shuffle stream is derived from cfg.seed so
/// teacher and student loops with the same seed visit batches identically.
std::vector<double> run_epochs(Mlp &model, const Dataset &data, const TrainConfig &cfg,
                               const BatchObjective &objective,
                               const std::function<void()> &on_epoch_end = {}) {
  std::vector<std::size_t> order = data.indices(Split::train);
  if (order.empty())
    throw InvalidArgument("dataset has no training samples");
  std::mt19937_64 shuffle_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  SgdMomentum optimizer(model, cfg.learning_rate, cfg.momentum);

  std::vector<double> curve;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      const std::vector<std::size_t> rows(order.begin() + static_cast<std::ptrdiff_t>(start),
                                          order.begin() + static_cast<std::ptrdiff_t>(stop));
      const Eigen::MatrixXd x = gather_rows(data.features, rows);
      const ForwardTrace trace = forward_trace(model, x);
      if (!trace.logits().allFinite())
        throw TrainingDiverged(epoch, "non-finite logits");
      Eigen::MatrixXd grad(trace.logits().rows(), trace.logits().cols());
      const double loss = objective(rows, trace.logits(), grad);
      if (!std::isfinite(loss) || !grad.allFinite())
        throw TrainingDiverged(epoch, "non-finite loss");
      optimizer.step(model, backward(model, trace, grad));
      epoch_loss += loss * static_cast<double>(rows.size());
    }
    curve.push_back(epoch_loss / static_cast<double>(order.size()));
    if (!model.all_finite())
      throw TrainingDiverged(epoch, "non-finite parameters");
    if (on_epoch_end)
      on_epoch_end();
  }
  return curve;
}

double accuracy_on(const Mlp &model, const Dataset &data, Split split, std::size_t k) {
  const auto rows = data.indices(split);
  if (rows.empty())
    return 0.0;
  const auto logits = forward_logits(model, gather_rows(data.features, rows));
  const auto labels = gather_labels(split == Split::train ? data.labels : data.clean_labels, rows);
  return topk_accuracy(logits, labels, std::min(k, data.classes));
}

std::vector<std::size_t> with_io(const Dataset &data, const std::vector<std::size_t> &hidden) {
  std::vector<std::size_t> dims{data.dims()};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(data.classes);
  return dims;
}

} // namespace

TeacherResult train_teacher(const Dataset &data, const std::vector<std::size_t> &hidden, const TrainConfig &cfg) {
  cfg.validate();
  TeacherResult result{Mlp(with_io(data, hidden), cfg.seed)};

  result.loss_curve = run_epochs(result.model, data, cfg,
                                 [&](const std::vector<std::size_t> &rows, const Eigen::MatrixXd &logits,
                                     Eigen::MatrixXd &grad) {
                                   const double inv_n = 1.0 / static_cast<double>(rows.size());
                                   double loss = 0.0;
                                   for (Eigen::Index r = 0; r < logits.rows(); ++r) {
                                     const ProbVector q = softmax(row_logits(logits, r), 1.0);
                                     const ClassIndex gt = data.labels[rows[static_cast<std::size_t>(r)]];
                                     loss += ce_loss(q, gt);
                                     for (Eigen::Index c = 0; c < logits.cols(); ++c) {
                                       const double y = static_cast<std::size_t>(c) == gt.value ? 1.0 : 0.0;
                                       grad(r, c) = inv_n * (q[static_cast<std::size_t>(c)] - y);
                                     }
                                   }
                                   return loss * inv_n;
                                 });

  result.train_accuracy = accuracy_on(result.model, data, Split::train, 1);
  result.test_accuracy = accuracy_on(result.model, data, Split::test, 1);
  const auto train_rows = data.indices(Split::train);
  result.train_misinstruction = misinstruction_ratio(forward_logits(result.model, gather_rows(data.features, train_rows)),
                                                     gather_labels(data.labels, train_rows));
  return result;
}

namespace {

struct CalibrationAudit {
  std::size_t violations = 0;
  std::size_t non_strict = 0;
};

void audit_outcome(const ProbVector &original, const CalibrationOutcome &out, ClassIndex gt,
                   const CalibrationConfig &cfg, CalibrationAudit &audit) {
  if (cfg.policy != Policy::loca || !out.was_misinstructed)
    return;
  const auto &p = out.calibrated;
  bool strict = true;
  std::size_t anchor = gt.value == 0 ? 1 : 0;
  bool ratios_ok = true;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i == gt.value)
      continue;
    strict = strict && p[gt.value] > p[i];
    const double before = original[i] / original[anchor];
    const double after = p[i] / p[anchor];
    ratios_ok = ratios_ok && std::abs(after - before) <= cfg.ratio_tolerance * before;
  }
  if (!strict)
    ++audit.non_strict;
  if (cfg.alpha < 1.0 && (!strict || !ratios_ok))
    ++audit.violations;
}

} // namespace

StudentResult distill_student(const Dataset &data, const Mlp &teacher, const std::vector<std::size_t> &hidden,
                              const TrainConfig &cfg) {
  cfg.validate();
  if (teacher.classes() != data.classes || teacher.input_dims() != data.dims())
    throw InvalidArgument("teacher shape does not match the dataset");

  const auto started = std::chrono::steady_clock::now();
  StudentResult result{Mlp(with_io(data, hidden), cfg.seed)};
  CalibrationAudit audit;
  std::size_t misinstructed = 0, calibrated = 0, dropped = 0;

  const auto objective = [&](const std::vector<std::size_t> &rows, const Eigen::MatrixXd &student_logits,
                             Eigen::MatrixXd &grad) {
    const Eigen::MatrixXd teacher_logits = forward(teacher, gather_rows(data.features, rows));
    std::vector<LabelledProb> teacher_batch;
    std::vector<LogitVector> student_z;
    teacher_batch.reserve(rows.size());
    student_z.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      teacher_batch.push_back({softmax(row_logits(teacher_logits, r), cfg.loss.tau), data.labels[rows[i]]});
      student_z.push_back(row_logits(student_logits, r));
    }

    const PolicyResult policy = apply_policy(teacher_batch, cfg.calibration);
    misinstructed += policy.stats.misinstructed;
    calibrated += policy.stats.calibrated;
    dropped += policy.stats.dropped;

    std::vector<BatchSample> samples;
    samples.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      audit_outcome(teacher_batch[i].prob, policy.outcomes[i], teacher_batch[i].label, cfg.calibration, audit);
      samples.push_back({&policy.outcomes[i], &student_z[i], teacher_batch[i].label});
    }
    const BatchLoss loss = loss_for_batch(samples, cfg.loss);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t c = 0; c < data.classes; ++c)
        grad(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = loss.grad_student_logits[i][c];
    return loss.total;
  };

  result.loss_curve = run_epochs(result.model, data, cfg, objective, [&] {
    result.misinstructed_per_epoch.push_back(std::exchange(misinstructed, 0));
    result.calibrated_per_epoch.push_back(std::exchange(calibrated, 0));
    result.dropped_per_epoch.push_back(std::exchange(dropped, 0));
  });

  result.calibration_violations = audit.violations;
  result.non_strict_targets = audit.non_strict;
  result.test_top1 = accuracy_on(result.model, data, Split::test, 1);
  result.test_top5 = accuracy_on(result.model, data, Split::test, 5);
  result.final_loss = result.loss_curve.empty() ? 0.0 : result.loss_curve.back();
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

} // namespace loca::nn
