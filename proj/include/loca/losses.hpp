#pragma once

#include <span>
#include <vector>

#include "loca/calibrate.hpp"
#include "loca/probvec.hpp"

namespace loca {

struct LossConfig {
  double tau = 4.0;
  double beta = 0.9;
  double gamma = 0.1;
  /// Multiply the KD term (and its gradient) by tau^2.
  bool scale_kd_by_tau_squared = false;

  void validate() const;
};

struct LossValue {
  double total = 0.0;
  double kd_term = 0.0;
  double ce_term = 0.0;
  /// d(total) / d(student logits).
  std::vector<double> grad_student_logits;
};

/// KL(p || q) with both sides floored at kProbFloor before the logs.
double kd_loss(const ProbVector &p, const ProbVector &q);

/// Negative log-likelihood of the ground-truth class, -ln q[gt].
double ce_loss(const ProbVector &q, ClassIndex gt);

/// beta * KL(teacher || softmax(z / tau)) + gamma * CE(softmax(z), gt), with the
/// analytic gradient with respect to z.
LossValue combined_loss(const ProbVector &teacher_p, const LogitVector &student_z, ClassIndex gt,
                        const LossConfig &cfg);

struct BatchSample {
  const CalibrationOutcome *teacher;
  const LogitVector *student_z;
  ClassIndex gt;
};

struct BatchLoss {
  double total = 0.0;
  double kd_term = 0.0;
  double ce_term = 0.0;
  /// One row per sample: gradient of the batch-mean total with respect to
  /// that sample's logits (the per-sample gradient divided by batch size).
  std::vector<std::vector<double>> grad_student_logits;
};

/// Mean of combined_loss over the batch, summed in index order. Dropped
/// samples contribute their CE term only.
BatchLoss loss_for_batch(std::span<const BatchSample> batch, const LossConfig &cfg);

} // namespace loca
