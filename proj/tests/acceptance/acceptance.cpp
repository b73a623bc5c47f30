// Runs every acceptance criterion at its stated tolerance and prints one
// PASS/FAIL line per criterion. Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "loca/analyze.hpp"
#include "loca/calibrate.hpp"
#include "loca/cli/experiment.hpp"
#include "loca/cli/experiment_config.hpp"
#include "loca/losses.hpp"
#include "loca/nn/train.hpp"
#include "loca/probvec.hpp"
#include "support/oracles.hpp"

using namespace loca;
using loca::testing::Gen;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> failures;

  void require(bool ok, const std::string &what) {
    if (ok)
      return;
    pass = false;
    if (failures.size() < 5)
      failures.push_back(what);
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

/// Random distribution with a spread of sharpness, so some rows are peaked
/// and some nearly flat.
ProbVector random_prob(Gen &gen, std::size_t c) {
  const double scale = gen.uniform(0.05, 6.0);
  return softmax(LogitVector(gen.logits(c, scale)), 1.0);
}

/// Label different from the argmax most of the time, so most triples are
/// mis-instructed; sometimes the argmax itself.
ClassIndex pick_label(Gen &gen, const ProbVector &p, double wrong_share) {
  const std::size_t c = p.size();
  const std::size_t k = argmax_index(p).value;
  if (gen.uniform(0.0, 1.0) >= wrong_share)
    return ClassIndex{k};
  std::size_t gt = gen.index(0, c - 2);
  if (gt >= k)
    ++gt;
  return ClassIndex{gt};
}

Outcome criterion_invariants() {
  Outcome o;
  Gen gen(20240601);
  const auto start = Clock::now();
  const int trials = 10000;
  std::size_t misinstructed = 0;
  double worst_sum = 0.0, worst_ratio = 0.0;
  for (int t = 0; t < trials; ++t) {
    const std::size_t c = gen.index(2, 1000);
    const ProbVector p = random_prob(gen, c);
    const ClassIndex gt = pick_label(gen, p, 0.9);
    const double alpha = gen.open_unit();
    misinstructed += is_misinstructed(p, gt) ? 1 : 0;

    const CalibrationOutcome out = calibrate_loca(p, gt, alpha);
    const auto q = out.calibrated.values();

    long double sum = 0.0L;
    for (double v : q)
      sum += v;
    const double sum_err = std::abs(static_cast<double>(sum) - 1.0);
    worst_sum = std::max(worst_sum, sum_err);
    o.require(sum_err <= 1e-9, "sum off by " + fmt(sum_err) + " at C=" + std::to_string(c));

    bool strict = true;
    for (std::size_t i = 0; i < c; ++i) {
      if (i != gt.value && !(q[i] < q[gt.value]))
        strict = false;
    }
    o.require(strict, "target not strictly maximal at C=" + std::to_string(c) + " alpha=" + fmt(alpha));

    // All pairwise non-target ratios are preserved iff q_i / p_i is the same
    // for every non-target i; the spread of that quotient bounds every pair.
    double lo = INFINITY, hi = 0.0;
    for (std::size_t i = 0; i < c; ++i) {
      if (i == gt.value)
        continue;
      const double f = q[i] / p[i];
      lo = std::min(lo, f);
      hi = std::max(hi, f);
    }
    const double ratio_err = hi / lo - 1.0;
    worst_ratio = std::max(worst_ratio, ratio_err);
    o.require(ratio_err <= 1e-12, "non-target ratio drift " + fmt(ratio_err) + " at C=" + std::to_string(c));
  }
  const double secs = seconds_since(start);
  o.require(secs < 10.0, "runtime " + fmt(secs) + " s exceeds 10 s");
  o.require(misinstructed >= trials / 2, "too few mis-instructed triples generated");
  o.detail = std::to_string(trials) + " triples (" + std::to_string(misinstructed) + " mis-instructed), worst |sum-1|=" +
             fmt(worst_sum) + ", worst ratio drift=" + fmt(worst_ratio) + ", " + fmt(secs) + " s";
  return o;
}

Outcome criterion_threshold() {
  Outcome o;
  Gen gen(777);
  const auto start = Clock::now();
  std::size_t cases = 0;
  double worst_gap = 0.0;
  while (cases < 2000) {
    const std::size_t c = gen.index(2, 200);
    const ProbVector p = random_prob(gen, c);
    const ClassIndex gt = pick_label(gen, p, 1.0);
    if (!is_misinstructed(p, gt))
      continue;
    ++cases;
    const std::size_t k = argmax_index(p).value;
    const double sigma = sigma_threshold(p, gt);

    const auto at = detail::scale_non_target(p.values(), gt, sigma);
    const double gap = std::abs(at[gt.value] - sigma * p[k]);
    worst_gap = std::max(worst_gap, gap);
    o.require(gap < 1e-9, "boundary gap " + fmt(gap) + " at C=" + std::to_string(c));

    const auto beyond = detail::scale_non_target(p.values(), gt, sigma * (1.0 + 1e-6));
    bool target_loses_or_ties = false;
    for (std::size_t i = 0; i < c; ++i) {
      if (i != gt.value && beyond[i] >= beyond[gt.value])
        target_loses_or_ties = true;
    }
    o.require(target_loses_or_ties, "target still strict beyond sigma at C=" + std::to_string(c));
  }
  const double secs = seconds_since(start);
  o.require(secs < 5.0, "runtime " + fmt(secs) + " s exceeds 5 s");
  o.detail = std::to_string(cases) + " mis-instructed samples, worst boundary gap=" + fmt(worst_gap) + ", " +
             fmt(secs) + " s";
  return o;
}

Outcome criterion_gradients() {
  Outcome o;
  Gen gen(4242);
  const auto start = Clock::now();
  const double taus[] = {1.0, 2.0, 4.0};
  int configs = 0;
  double worst_abs = 0.0, worst_rel = 0.0;
  for (int t = 0; t < 600; ++t) {
    const std::size_t c = gen.index(2, 50);
    LossConfig cfg;
    cfg.tau = taus[t % 3];
    cfg.scale_kd_by_tau_squared = (t / 3) % 2 == 1;
    cfg.beta = gen.uniform(0.0, 1.0);
    cfg.gamma = gen.uniform(0.0, 1.0);
    const ClassIndex gt{gen.index(0, c - 1)};

    ProbVector teacher = softmax(LogitVector(gen.logits(c, 2.0)), cfg.tau);
    if (t % 2 == 0 && is_misinstructed(teacher, gt))
      teacher = calibrate_loca(teacher, gt, gen.open_unit()).calibrated;
    const std::vector<double> z = gen.logits(c, 2.0);

    const LossValue value = combined_loss(teacher, LogitVector(z), gt, cfg);
    const auto numeric = testing::central_difference(
        [&](const std::vector<double> &x) { return combined_loss(teacher, LogitVector(x), gt, cfg).total; }, z, 1e-5);
    for (std::size_t i = 0; i < c; ++i) {
      const double a = value.grad_student_logits[i];
      const double n = numeric[i];
      const bool ok = testing::gradients_agree(a, n, 1e-4, 1e-7);
      worst_abs = std::max(worst_abs, std::abs(a - n));
      if (std::max(std::abs(a), std::abs(n)) > 1e-7)
        worst_rel = std::max(worst_rel, std::abs(a - n) / std::max(std::abs(a), std::abs(n)));
      o.require(ok, "coordinate " + std::to_string(i) + " of C=" + std::to_string(c) + " tau=" + fmt(cfg.tau) +
                        ": analytic " + fmt(a) + " vs numeric " + fmt(n));
    }
    ++configs;
  }
  const double secs = seconds_since(start);
  o.require(secs < 30.0, "runtime " + fmt(secs) + " s exceeds 30 s");
  o.detail = std::to_string(configs) + " configurations, worst abs error=" + fmt(worst_abs) + ", worst rel error=" + fmt(worst_rel) + ", " +
             fmt(secs) + " s";
  return o;
}

ProbVector prob(std::vector<double> v) { return validate_prob(v); }

Outcome criterion_fixtures() {
  Outcome o;
  const double tol = 1e-12;
  const auto close = [&](double a, double b) { return std::abs(a - b) <= tol; };

  struct Fixture {
    std::vector<double> p;
    std::size_t gt;
    double alpha;
    std::vector<double> expected;
  };
  const std::vector<Fixture> fixtures{{{0.4, 0.6}, 0, 0.9, {0.55, 0.45}},
                                      {{0.2, 0.5, 0.3}, 2, 0.9, {0.15, 0.375, 0.475}}};
  for (const auto &f : fixtures) {
    // The oracle has to agree with the hand-derived numbers before the
    // library is checked against them.
    const auto oracle = testing::closed_form_loca(f.p, f.gt, f.alpha);
    for (std::size_t i = 0; i < f.p.size(); ++i)
      o.require(close(static_cast<double>(oracle[i]), f.expected[i]), "oracle disagrees with hand value");
    const auto got = calibrate_loca(prob(f.p), ClassIndex{f.gt}, f.alpha).calibrated;
    for (std::size_t i = 0; i < f.p.size(); ++i)
      o.require(close(got[i], f.expected[i]), "calibrate_loca entry " + std::to_string(i) + " = " + fmt(got[i]));
  }

  const double kl_expected = 0.5 * std::log(4.0 / 3.0);
  const double kl_oracle = static_cast<double>(testing::naive_kl({0.5, 0.5}, {0.25, 0.75}));
  o.require(close(kl_oracle, kl_expected), "KL oracle disagrees with 0.5 ln(4/3)");
  const double kl = kd_loss(prob({0.5, 0.5}), prob({0.25, 0.75}));
  o.require(close(kl, kl_expected), "kd_loss = " + fmt(kl));

  o.detail = "2 calibration fixtures and 1 KL fixture within 1e-12";
  return o;
}

Outcome criterion_statistics() {
  Outcome o;
  Gen gen(99);
  std::vector<LogitVector> rows;
  std::vector<std::vector<double>> raw;
  std::vector<ClassIndex> labels;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t c = 10;
    auto z = gen.logits(c, 1.5);
    // Rounding makes ties common, which exercises the lowest-index rule.
    if (i % 3 == 0) {
      for (double &v : z)
        v = std::round(v);
    }
    raw.push_back(z);
    rows.emplace_back(z);
    labels.push_back(ClassIndex{gen.index(0, c - 1)});
  }

  std::size_t naive_count = 0;
  for (std::size_t i = 0; i < raw.size(); ++i)
    naive_count += testing::naive_argmax(raw[i]) != labels[i].value ? 1 : 0;

  const MisinstructionStats stats = misinstruction_ratio(rows, labels);
  o.require(stats.misinstructed == naive_count,
            "count " + std::to_string(stats.misinstructed) + " vs naive " + std::to_string(naive_count));
  o.require(stats.ratio == static_cast<double>(naive_count) / 1000.0, "ratio differs from naive count / 1000");
  const double top1 = topk_accuracy(rows, labels, 1);
  o.require(top1 == 1.0 - stats.ratio, "top-1 " + fmt(top1) + " is not exactly 1 - ratio");
  o.detail = "1000 rows, misinstructed=" + std::to_string(stats.misinstructed) + " (naive " +
             std::to_string(naive_count) + "), top1=" + std::to_string(top1);
  return o;
}

Outcome criterion_demo() {
  Outcome o;
  const auto cfg = cli::load_experiment_config(LOCA_CONFIG_DIR "/default.json");
  o.require(cfg.seeds.size() == 5, "default config does not list 5 seeds");
  const auto start = Clock::now();
  const cli::DemoResult demo = cli::run_demo(cfg);
  const double secs = seconds_since(start);
  o.require(secs < 300.0, "runtime " + fmt(secs) + " s exceeds 300 s");

  const double teacher_ratio = demo.teacher.train_misinstruction.ratio;
  o.require(teacher_ratio >= 0.05, "teacher mis-instruction ratio " + fmt(teacher_ratio) + " below 0.05");

  double none = NAN, loca = NAN;
  for (const char *policy : {"none", "skip", "loca"}) {
    bool found = false;
    for (const auto &row : demo.report.rows) {
      if (row.policy != policy)
        continue;
      found = true;
      o.require(row.delta_vs_none.has_value(), std::string(policy) + " row has no delta");
      o.require(row.top1.size() == 5, std::string(policy) + " row does not have 5 seeds");
      if (row.policy == "none")
        none = row.mean_top1;
      if (row.policy == "loca")
        loca = row.mean_top1;
    }
    o.require(found, std::string("report is missing the ") + policy + " row");
  }
  o.require(loca >= none, "mean top-1 under loca " + fmt(loca) + " below none " + fmt(none));
  o.require(demo.loca_not_worse == (loca >= none), "direction flag disagrees with the means");

  std::ostringstream table;
  table << "teacher ratio=" << fmt(teacher_ratio) << ", none=" << none << ", loca=" << loca << ", " << fmt(secs)
        << " s";
  o.detail = table.str();
  return o;
}

Outcome criterion_sweep() {
  Outcome o;
  const auto cfg = cli::load_experiment_config(LOCA_CONFIG_DIR "/default.json");
  const std::vector<double> alphas{0.9, 0.95, 0.99, 1.0};
  std::ostringstream log;
  const cli::SweepResult sweep = cli::run_sweep(cfg, alphas, &log);

  bool warned = false;
  for (const auto &w : sweep.warnings)
    warned = warned || w.find("alpha 1 ") == 0;
  o.require(warned, "no warning for alpha = 1.0");
  o.require(log.str().find("warning: alpha 1 ") != std::string::npos, "alpha = 1.0 warning was not emitted to the log");
  o.require(sweep.warnings.size() == 1, "expected exactly one warning, got " + std::to_string(sweep.warnings.size()));

  std::size_t checked = 0;
  for (const auto &row : sweep.rows) {
    if (row.label == "none")
      continue;
    if (row.alpha < 1.0) {
      ++checked;
      o.require(row.calibration_violations == 0,
                row.label + " has " + std::to_string(row.calibration_violations) + " violations");
      o.require(row.non_strict_targets == 0, row.label + " has non-strict targets");
    }
  }
  o.require(checked == 3, "expected 3 alpha < 1 rows, saw " + std::to_string(checked));

  std::size_t calibrated = 0;
  for (const auto &run : sweep.runs) {
    if (run.metrics.policy != "none")
      calibrated += run.metrics.calibrated;
  }
  o.require(calibrated > 0, "no vectors were calibrated, so the runtime check saw nothing");
  o.detail = std::to_string(sweep.rows.size()) + " rows, " + std::to_string(calibrated) +
             " calibrated vectors audited, alpha=1.0 warned";
  return o;
}

Outcome criterion_degeneracy() {
  Outcome o;
  const auto cfg = cli::load_experiment_config(LOCA_CONFIG_DIR "/zero_misinstruction.json");
  const cli::DemoResult demo = cli::run_demo(cfg);
  o.require(demo.teacher.train_misinstruction.misinstructed == 0, "teacher mis-instructs on the training split");

  // Per-seed metrics from the demo runs.
  const auto find = [&](const std::string &policy, unsigned seed) -> const RunMetrics * {
    for (const auto &r : demo.runs) {
      if (r.metrics.policy == policy && r.metrics.seed == seed)
        return &r.metrics;
    }
    return nullptr;
  };
  for (auto seed : cfg.seeds) {
    const RunMetrics *none = find("none", static_cast<unsigned>(seed));
    if (none == nullptr) {
      o.require(false, "missing none run for seed " + std::to_string(seed));
      continue;
    }
    for (const char *policy : {"skip", "loca"}) {
      const RunMetrics *other = find(policy, static_cast<unsigned>(seed));
      if (other == nullptr) {
        o.require(false, std::string("missing ") + policy + " run");
        continue;
      }
      const bool same = other->top1 == none->top1 && other->top5 == none->top5 && other->final_loss == none->final_loss &&
                        other->calibrated == 0 && other->dropped == 0;
      o.require(same, std::string(policy) + " metrics differ from none for seed " + std::to_string(seed));
    }
  }

  // Loss curves and weights, compared directly on the same teacher.
  const nn::Dataset data = nn::gen_synthetic(cfg.dataset);
  const nn::TeacherResult teacher = nn::train_teacher(data, cfg.teacher.hidden, cfg.teacher.train);
  o.require(teacher.model == demo.teacher.model, "teacher retrain is not reproducible");
  for (auto seed : cfg.seeds) {
    const auto base = nn::distill_student(data, teacher.model, cfg.student.hidden,
                                          cfg.student_config(Policy::none, seed, cfg.alpha));
    for (Policy policy : {Policy::skip, Policy::loca}) {
      const auto other = nn::distill_student(data, teacher.model, cfg.student.hidden,
                                             cfg.student_config(policy, seed, cfg.alpha));
      const bool same = other.loss_curve == base.loss_curve && other.model == base.model &&
                        other.test_top1 == base.test_top1 && other.test_top5 == base.test_top5 &&
                        other.final_loss == base.final_loss;
      o.require(same, std::string(to_string(policy)) + " curve or weights differ from none for seed " + std::to_string(seed));
    }
  }
  o.detail = std::to_string(cfg.seeds.size()) + " seeds x 3 policies bit-identical (metrics, loss curves, weights)";
  return o;
}

} // namespace

int main() {
  struct Criterion {
    int id;
    const char *name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "calibration invariants", criterion_invariants},
      {2, "threshold tightness", criterion_threshold},
      {3, "gradient oracle", criterion_gradients},
      {4, "worked-example fixtures", criterion_fixtures},
      {5, "statistics oracle", criterion_statistics},
      {6, "default demo", criterion_demo},
      {7, "alpha sweep", criterion_sweep},
      {8, "zero mis-instruction degeneracy", criterion_degeneracy},
  };

  int failed = 0;
  for (const auto &c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o.pass = false;
      o.failures.push_back(std::string("threw: ") + e.what());
    }
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << c.id << ". " << c.name;
    if (!o.detail.empty())
      std::cout << ": " << o.detail;
    std::cout << '\n';
    for (const auto &f : o.failures)
      std::cout << "         " << f << '\n';
    failed += o.pass ? 0 : 1;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << '\n';
  return failed == 0 ? 0 : 1;
}
