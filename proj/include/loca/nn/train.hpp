#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "loca/analyze.hpp"
#include "loca/calibrate.hpp"
#include "loca/losses.hpp"
#include "loca/nn/dataset.hpp"
#include "loca/nn/mlp.hpp"

namespace loca::nn {

struct TrainConfig {
  int epochs = 30;
  std::size_t batch_size = 64;
  double learning_rate = 0.05;
  double momentum = 0.9;
  std::uint64_t seed = 0;
  LossConfig loss;
  CalibrationConfig calibration;

  void validate() const;
};

struct TeacherResult {
  Mlp model;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  /// Measured against the (possibly noisy) training labels.
  MisinstructionStats train_misinstruction;
  std::vector<double> loss_curve;
};

/// Plain cross-entropy training. `hidden` lists the hidden layer widths.
TeacherResult train_teacher(const Dataset &data, const std::vector<std::size_t> &hidden, const TrainConfig &cfg);

struct StudentResult {
  Mlp model;
  double test_top1 = 0.0;
  double test_top5 = 0.0;
  /// Mean training loss of the last epoch.
  double final_loss = 0.0;
  std::vector<double> loss_curve;
  std::vector<std::size_t> misinstructed_per_epoch;
  std::vector<std::size_t> calibrated_per_epoch;
  std::vector<std::size_t> dropped_per_epoch;
  /// Calibrated teacher vectors (alpha < 1) whose argmax is not strictly the
  /// label or whose non-target ratios drifted beyond ratio_tolerance.
  std::size_t calibration_violations = 0;
  /// Calibrated vectors where the label is not the strict maximum. Expected
  /// to be nonzero only when alpha >= 1.
  std::size_t non_strict_targets = 0;
  double seconds = 0.0;

  std::size_t total_calibrated() const;
  std::size_t total_dropped() const;
};

/// Distils a fresh student from a frozen teacher on the training split. Each
/// batch: teacher probabilities at tau, calibration policy, combined loss,
/// one SGD step.
StudentResult distill_student(const Dataset &data, const Mlp &teacher, const std::vector<std::size_t> &hidden,
                              const TrainConfig &cfg);

/// Rows of `data.features` selected by `rows`.
Eigen::MatrixXd gather_rows(const Eigen::MatrixXd &features, const std::vector<std::size_t> &rows);

} // namespace loca::nn
