#include "loca/calibrate.hpp"

#include <cmath>
#include <sstream>

#include "loca/errors.hpp"

namespace loca {

std::string_view to_string(Policy policy) {
  switch (policy) {
  case Policy::none:
    return "none";
  case Policy::skip:
    return "skip";
  case Policy::loca:
    return "loca";
  }
  return "unknown";
}

Policy parse_policy(std::string_view name) {
  if (name == "none")
    return Policy::none;
  if (name == "skip")
    return Policy::skip;
  if (name == "loca")
    return Policy::loca;
  throw InvalidArgument("unknown calibration policy '" + std::string(name) + "'");
}

void CalibrationConfig::validate() const {
  if (!(ratio_tolerance > 0.0))
    throw InvalidArgument("ratio_tolerance must be positive");
  if (policy != Policy::loca)
    return;
  const bool upper_ok = allow_alpha_at_or_above_one ? std::isfinite(alpha) : alpha < 1.0;
  if (!(alpha > 0.0) || !upper_ok) {
    std::ostringstream msg;
    msg << "alpha must lie in (0, 1) for the loca policy, got " << alpha;
    throw InvalidArgument(msg.str());
  }
}

namespace {

void check_label(const ProbVector &p, ClassIndex gt) {
  if (gt.value >= p.size()) {
    throw InvalidArgument("class index " + std::to_string(gt.value) + " out of range for " +
                          std::to_string(p.size()) + " classes");
  }
}

CalibrationOutcome transform(const ProbVector &p, ClassIndex gt, double alpha, bool clamp) {
  check_label(p, gt);
  const ClassIndex top = argmax_index(p);
  if (top == gt)
    return CalibrationOutcome{p, false, 1.0, 1.0, false};

  const double sigma = 1.0 / (1.0 - p[gt.value] + p[top.value]);
  const double s = alpha * sigma;
  auto raw = detail::scale_non_target(p.values(), gt, s);
  return CalibrationOutcome{validate_prob(raw, clamp), true, sigma, s, false};
}

} // namespace

bool is_misinstructed(const ProbVector &p, ClassIndex gt) {
  check_label(p, gt);
  return argmax_index(p) != gt;
}

double sigma_threshold(const ProbVector &p, ClassIndex gt) {
  check_label(p, gt);
  const ClassIndex top = argmax_index(p);
  if (top == gt)
    return 1.0;
  return 1.0 / (1.0 - p[gt.value] + p[top.value]);
}

CalibrationOutcome calibrate_loca(const ProbVector &p, ClassIndex gt, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    std::ostringstream msg;
    msg << "alpha must lie in (0, 1), got " << alpha;
    throw InvalidArgument(msg.str());
  }
  return transform(p, gt, alpha, false);
}

CalibrationOutcome calibrate_loca_unbounded(const ProbVector &p, ClassIndex gt, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    std::ostringstream msg;
    msg << "alpha must be positive and finite, got " << alpha;
    throw InvalidArgument(msg.str());
  }
  return transform(p, gt, alpha, true);
}

PolicyResult apply_policy(std::span<const LabelledProb> batch, const CalibrationConfig &config) {
  config.validate();
  PolicyResult result;
  result.outcomes.reserve(batch.size());
  if (batch.empty())
    return result;

  const std::size_t classes = batch.front().prob.size();
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch[i].prob.size() != classes) {
      throw InvalidArgument("sample " + std::to_string(i) + " has " + std::to_string(batch[i].prob.size()) +
                            " classes, expected " + std::to_string(classes));
    }
  }

  for (const auto &[prob, label] : batch) {
    const bool wrong = is_misinstructed(prob, label);
    switch (config.policy) {
    case Policy::none:
      result.outcomes.push_back({prob, wrong, sigma_threshold(prob, label), 1.0, false});
      break;
    case Policy::skip:
      result.outcomes.push_back({prob, wrong, sigma_threshold(prob, label), 1.0, wrong});
      break;
    case Policy::loca:
      result.outcomes.push_back(config.alpha < 1.0 ? calibrate_loca(prob, label, config.alpha)
                                                   : calibrate_loca_unbounded(prob, label, config.alpha));
      break;
    }
    auto &last = result.outcomes.back();
    result.stats.misinstructed += wrong ? 1 : 0;
    result.stats.dropped += last.dropped ? 1 : 0;
    result.stats.calibrated += (config.policy == Policy::loca && wrong) ? 1 : 0;
  }
  result.stats.total = batch.size();
  result.stats.ratio = static_cast<double>(result.stats.misinstructed) / static_cast<double>(batch.size());
  return result;
}

namespace detail {

std::vector<double> scale_non_target(std::span<const double> p, ClassIndex gt, double s) {
  if (gt.value >= p.size())
    throw InvalidArgument("class index out of range");
  std::vector<double> out(p.size());
  double rest = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i == gt.value)
      continue;
    out[i] = s * p[i];
    rest += out[i];
  }
  out[gt.value] = 1.0 - rest;
  return out;
}

} // namespace detail

} // namespace loca
