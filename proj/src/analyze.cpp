#include "loca/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "loca/errors.hpp"

namespace loca {

namespace {

void check_batch(std::span<const LogitVector> logits, std::span<const ClassIndex> labels) {
  if (logits.size() != labels.size()) {
    throw InvalidArgument("got " + std::to_string(logits.size()) + " logit rows but " +
                          std::to_string(labels.size()) + " labels");
  }
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (labels[i].value >= logits[i].size())
      throw InvalidArgument("label of sample " + std::to_string(i) + " out of range");
  }
}

} // namespace

MisinstructionStats misinstruction_ratio(std::span<const LogitVector> logits, std::span<const ClassIndex> labels) {
  check_batch(logits, labels);
  MisinstructionStats stats;
  stats.total = logits.size();
  stats.per_class_misinstructed.assign(logits.empty() ? 0 : logits.front().size(), 0);
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (argmax_index(logits[i]) == labels[i])
      continue;
    ++stats.misinstructed;
    if (labels[i].value >= stats.per_class_misinstructed.size())
      stats.per_class_misinstructed.resize(labels[i].value + 1, 0);
    ++stats.per_class_misinstructed[labels[i].value];
  }
  stats.ratio = stats.total == 0 ? 0.0 : static_cast<double>(stats.misinstructed) / static_cast<double>(stats.total);
  return stats;
}

double topk_accuracy(std::span<const LogitVector> logits, std::span<const ClassIndex> labels, std::size_t k) {
  check_batch(logits, labels);
  if (logits.empty())
    throw InvalidArgument("topk_accuracy of an empty batch");
  // Counted as misses so that top-1 is exactly 1 - misinstruction_ratio.
  std::size_t misses = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const auto &z = logits[i];
    if (k < 1 || k > z.size())
      throw InvalidArgument("k = " + std::to_string(k) + " outside [1, " + std::to_string(z.size()) + "]");
    // Rank of the label: entries strictly larger, plus equal entries at lower indices.
    const std::size_t gt = labels[i].value;
    std::size_t ahead = 0;
    for (std::size_t j = 0; j < z.size(); ++j) {
      if (z[j] > z[gt] || (z[j] == z[gt] && j < gt))
        ++ahead;
    }
    misses += ahead < k ? 0 : 1;
  }
  return 1.0 - static_cast<double>(misses) / static_cast<double>(logits.size());
}

double mean(std::span<const double> values) {
  if (values.empty())
    return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_stddev(std::span<const double> values) {
  if (values.size() < 2)
    return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values)
    ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

RunReport compare_runs(std::span<const RunMetrics> runs) {
  if (runs.empty())
    throw InvalidArgument("compare_runs needs at least one run");

  RunReport report;
  std::vector<std::vector<const RunMetrics *>> groups;
  for (const auto &run : runs) {
    auto it = std::find_if(report.rows.begin(), report.rows.end(),
                           [&](const PolicySummary &row) { return row.policy == run.policy; });
    if (it == report.rows.end()) {
      report.rows.push_back(PolicySummary{.policy = run.policy});
      groups.emplace_back();
      it = std::prev(report.rows.end());
    }
    groups[static_cast<std::size_t>(it - report.rows.begin())].push_back(&run);
  }

  for (std::size_t r = 0; r < report.rows.size(); ++r) {
    auto &row = report.rows[r];
    std::vector<double> top5, loss, secs;
    for (const RunMetrics *run : groups[r]) {
      row.seeds.push_back(run->seed);
      row.top1.push_back(run->top1);
      top5.push_back(run->top5);
      loss.push_back(run->final_loss);
      secs.push_back(run->seconds);
      row.calibrated += run->calibrated;
      row.dropped += run->dropped;
    }
    row.mean_top1 = mean(row.top1);
    row.std_top1 = sample_stddev(row.top1);
    row.mean_top5 = mean(top5);
    row.std_top5 = sample_stddev(top5);
    row.mean_final_loss = mean(loss);
    row.seconds = mean(secs);
  }

  const auto baseline = std::find_if(report.rows.begin(), report.rows.end(),
                                     [](const PolicySummary &row) { return row.policy == "none"; });
  if (baseline == report.rows.end()) {
    report.baseline_missing = true;
    report.notes.emplace_back("baseline policy 'none' missing; delta_vs_none unavailable");
  } else {
    for (auto &row : report.rows)
      row.delta_vs_none = row.mean_top1 - baseline->mean_top1;
  }
  return report;
}

std::string format_report(const RunReport &report) {
  std::ostringstream out;
  out << "policy\tmean_top1\tstd_top1\tdelta_vs_none\tcalibrated\tdropped\tseconds\n";
  out << std::fixed;
  for (const auto &row : report.rows) {
    out << row.policy << '\t' << std::setprecision(6) << row.mean_top1 << '\t' << row.std_top1 << '\t';
    if (row.delta_vs_none)
      out << std::showpos << *row.delta_vs_none << std::noshowpos;
    else
      out << "NA";
    out << '\t' << row.calibrated << '\t' << row.dropped << '\t' << std::setprecision(3) << row.seconds << '\n';
  }
  for (const auto &note : report.notes)
    out << "# " << note << '\n';
  return out.str();
}

} // namespace loca
