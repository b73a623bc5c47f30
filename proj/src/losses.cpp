#include "loca/losses.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "loca/errors.hpp"

namespace loca {

void LossConfig::validate() const {
  std::ostringstream msg;
  if (!(tau > 0.0) || !std::isfinite(tau))
    msg << "tau must be positive (got " << tau << "); ";
  if (!(beta >= 0.0) || !std::isfinite(beta))
    msg << "beta must be nonnegative (got " << beta << "); ";
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    msg << "gamma must be nonnegative (got " << gamma << "); ";
  if (!(beta + gamma > 0.0))
    msg << "beta + gamma must be positive; ";
  if (const auto text = msg.str(); !text.empty())
    throw InvalidArgument("invalid loss config: " + text.substr(0, text.size() - 2));
}

double kd_loss(const ProbVector &p, const ProbVector &q) {
  if (p.size() != q.size()) {
    throw InvalidArgument("kd_loss dimension mismatch: " + std::to_string(p.size()) + " vs " +
                          std::to_string(q.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = std::max(p[i], kProbFloor);
    const double qi = std::max(q[i], kProbFloor);
    sum += pi * std::log(pi / qi);
  }
  return sum;
}

double ce_loss(const ProbVector &q, ClassIndex gt) {
  if (gt.value >= q.size()) {
    throw InvalidArgument("class index " + std::to_string(gt.value) + " out of range for " +
                          std::to_string(q.size()) + " classes");
  }
  return -std::log(std::max(q[gt.value], kProbFloor));
}

LossValue combined_loss(const ProbVector &teacher_p, const LogitVector &student_z, ClassIndex gt,
                        const LossConfig &cfg) {
  cfg.validate();
  const std::size_t classes = student_z.size();
  if (teacher_p.size() != classes) {
    throw InvalidArgument("teacher has " + std::to_string(teacher_p.size()) + " classes, student has " +
                          std::to_string(classes));
  }

  const ProbVector q_kd = softmax(student_z, cfg.tau);
  const ProbVector q_ce = softmax(student_z, 1.0);
  const double kd_scale = cfg.scale_kd_by_tau_squared ? cfg.tau * cfg.tau : 1.0;

  LossValue out;
  out.kd_term = kd_scale * kd_loss(teacher_p, q_kd);
  out.ce_term = ce_loss(q_ce, gt);
  out.total = cfg.beta * out.kd_term + cfg.gamma * out.ce_term;

  // d KL / dz_i = (q_i - p_i) / tau, d CE / dz_i = q_i - y_i.
  const double kd_grad_scale = cfg.beta * kd_scale / cfg.tau;
  out.grad_student_logits.resize(classes);
  for (std::size_t i = 0; i < classes; ++i) {
    const double y = i == gt.value ? 1.0 : 0.0;
    out.grad_student_logits[i] = kd_grad_scale * (q_kd[i] - teacher_p[i]) + cfg.gamma * (q_ce[i] - y);
  }
  return out;
}

BatchLoss loss_for_batch(std::span<const BatchSample> batch, const LossConfig &cfg) {
  if (batch.empty())
    throw InvalidArgument("loss_for_batch needs a nonempty batch");

  const double inv_n = 1.0 / static_cast<double>(batch.size());
  LossConfig ce_only = cfg;
  ce_only.beta = 0.0;

  BatchLoss out;
  out.grad_student_logits.reserve(batch.size());
  for (const auto &sample : batch) {
    const bool dropped = sample.teacher->dropped;
    LossValue value;
    if (dropped && cfg.gamma > 0.0) {
      value = combined_loss(sample.teacher->calibrated, *sample.student_z, sample.gt, ce_only);
      value.kd_term = 0.0;
    } else if (dropped) {
      value.grad_student_logits.assign(sample.student_z->size(), 0.0);
      value.ce_term = ce_loss(softmax(*sample.student_z, 1.0), sample.gt);
    } else {
      value = combined_loss(sample.teacher->calibrated, *sample.student_z, sample.gt, cfg);
    }
    out.total += value.total;
    out.kd_term += value.kd_term;
    out.ce_term += value.ce_term;
    for (double &g : value.grad_student_logits)
      g *= inv_n;
    out.grad_student_logits.push_back(std::move(value.grad_student_logits));
  }
  out.total *= inv_n;
  out.kd_term *= inv_n;
  out.ce_term *= inv_n;
  return out;
}

} // namespace loca
