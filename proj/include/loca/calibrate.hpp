#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "loca/probvec.hpp"

namespace loca {

enum class Policy { none, skip, loca };

std::string_view to_string(Policy policy);
/// Parses "none", "skip" or "loca"; throws InvalidArgument otherwise.
Policy parse_policy(std::string_view name);

struct CalibrationConfig {
  double alpha = 0.95;
  Policy policy = Policy::none;
  double ratio_tolerance = 1e-12;
  /// Lets alpha reach or exceed 1 under the loca policy. The target class is
  /// then no longer guaranteed to be the strict maximum. Only the alpha sweep
  /// turns this on.
  bool allow_alpha_at_or_above_one = false;

  /// Throws InvalidArgument if the fields are inconsistent.
  void validate() const;
};

struct CalibrationOutcome {
  ProbVector calibrated;
  bool was_misinstructed = false;
  /// 1 / (1 - p[gt] + p[k]), in (0, 1].
  double sigma = 1.0;
  /// Factor applied to the non-target entries; 1 when nothing was scaled.
  double s = 1.0;
  bool dropped = false;
};

struct PolicyStats {
  std::size_t total = 0;
  std::size_t misinstructed = 0;
  std::size_t calibrated = 0;
  std::size_t dropped = 0;
  double ratio = 0.0;
};

struct PolicyResult {
  std::vector<CalibrationOutcome> outcomes;
  PolicyStats stats;
};

struct LabelledProb {
  ProbVector prob;
  ClassIndex label;
};

/// True when the teacher's top class (lowest index on ties) differs from gt.
bool is_misinstructed(const ProbVector &p, ClassIndex gt);

/// Supremum of the non-target scale factor that keeps gt the strict argmax.
double sigma_threshold(const ProbVector &p, ClassIndex gt);

/// Scales every non-target entry of a mis-instructed p by s = alpha * sigma and
/// gives the target the remaining mass. Correctly predicted samples come back
/// unchanged. Requires 0 < alpha < 1.
CalibrationOutcome calibrate_loca(const ProbVector &p, ClassIndex gt, double alpha);

/// Same transform with alpha >= 1 permitted. If the target would leave the
/// simplex the result is clamped to kProbFloor and renormalised.
CalibrationOutcome calibrate_loca_unbounded(const ProbVector &p, ClassIndex gt, double alpha);

/// Applies `config.policy` sample by sample. All vectors must share one size.
PolicyResult apply_policy(std::span<const LabelledProb> batch, const CalibrationConfig &config);

namespace detail {

/// The bare transform with an explicit scale factor and no validation of the
/// result: out[i] = s * p[i] for i != gt, out[gt] = 1 - sum of the others.
std::vector<double> scale_non_target(std::span<const double> p, ClassIndex gt, double s);

} // namespace detail

} // namespace loca
