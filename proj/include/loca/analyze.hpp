#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "loca/probvec.hpp"

namespace loca {

struct MisinstructionStats {
  std::size_t total = 0;
  std::size_t misinstructed = 0;
  double ratio = 0.0;
  /// Mis-instructed samples counted by their ground-truth class.
  std::vector<std::size_t> per_class_misinstructed;
};

/// Counts samples whose top logit (lowest index on ties) differs from the label.
MisinstructionStats misinstruction_ratio(std::span<const LogitVector> logits, std::span<const ClassIndex> labels);

/// Fraction of samples whose label is among the k largest scores. Ties are
/// ranked by lowest index, so a label only counts if it sits within the
/// first k positions of that order.
double topk_accuracy(std::span<const LogitVector> logits, std::span<const ClassIndex> labels, std::size_t k);

/// Metrics from one student run.
struct RunMetrics {
  std::string policy;
  unsigned seed = 0;
  double top1 = 0.0;
  double top5 = 0.0;
  double final_loss = 0.0;
  std::size_t calibrated = 0;
  std::size_t dropped = 0;
  double seconds = 0.0;
};

struct PolicySummary {
  std::string policy;
  std::vector<unsigned> seeds;
  std::vector<double> top1;
  double mean_top1 = 0.0;
  double std_top1 = 0.0;
  double mean_top5 = 0.0;
  double std_top5 = 0.0;
  double mean_final_loss = 0.0;
  /// Mean top-1 minus the mean top-1 of the "none" row; empty when that row is missing.
  std::optional<double> delta_vs_none;
  std::size_t calibrated = 0;
  std::size_t dropped = 0;
  /// Mean wall-clock seconds per run.
  double seconds = 0.0;
};

struct RunReport {
  std::vector<PolicySummary> rows;
  bool baseline_missing = false;
  std::vector<std::string> notes;
};

double mean(std::span<const double> values);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_stddev(std::span<const double> values);

/// Groups runs by policy label in order of first appearance.
RunReport compare_runs(std::span<const RunMetrics> runs);

/// Tab-separated table with a header row, followed by "# " note lines.
std::string format_report(const RunReport &report);

} // namespace loca
