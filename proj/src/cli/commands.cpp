#include "loca/cli/commands.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>

#include <CLI11.hpp>

#include "loca/analyze.hpp"
#include "loca/calibrate.hpp"
#include "loca/cli/dump_io.hpp"
#include "loca/cli/experiment.hpp"
#include "loca/errors.hpp"

namespace loca::cli {

namespace {

struct LoadedDump {
  Dump dump;
  std::vector<ClassIndex> labels;
  std::vector<LogitVector> logits;
};

LoadedDump load_pair(const std::filesystem::path &logits_path, const std::filesystem::path &labels_path) {
  LoadedDump loaded;
  loaded.dump = read_dump(logits_path);
  loaded.labels = read_labels(labels_path, loaded.dump.classes);
  if (loaded.labels.size() != loaded.dump.rows.size()) {
    throw FormatError(labels_path, 0,
                      "label count " + std::to_string(loaded.labels.size()) + " does not match logit row count " +
                          std::to_string(loaded.dump.rows.size()));
  }
  loaded.logits.reserve(loaded.dump.rows.size());
  for (const auto &row : loaded.dump.rows)
    loaded.logits.emplace_back(row);
  return loaded;
}

void write_report(const RunReport &report, const std::optional<std::filesystem::path> &path, std::ostream &out) {
  const std::string text = format_report(report);
  out << text;
  if (path) {
    std::ofstream file(*path);
    if (!file)
      throw FormatError(*path, 0, "cannot open report for writing");
    file << text;
  }
}

/// Maps library exceptions onto the exit-code contract.
template <typename Fn>
int guarded(std::ostream &err, Fn &&fn) {
  try {
    return fn();
  } catch (const TrainingDiverged &e) {
    err << "error: " << e.what() << '\n';
    return kDiverged;
  } catch (const ConfigError &e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const FormatError &e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument &e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::domain_error &e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
}

} // namespace

int cmd_stats(const std::filesystem::path &logits, const std::filesystem::path &labels, std::ostream &out,
              std::ostream &err) {
  return guarded(err, [&] {
    const LoadedDump loaded = load_pair(logits, labels);
    const MisinstructionStats stats = misinstruction_ratio(loaded.logits, loaded.labels);
    out << "total=" << stats.total << " misinstructed=" << stats.misinstructed << " ratio=" << std::fixed
        << std::setprecision(4) << stats.ratio << '\n';
    return kOk;
  });
}

int cmd_calibrate(const std::filesystem::path &logits, const std::filesystem::path &labels, double alpha, double tau,
                  const std::filesystem::path &output, std::ostream &out, std::ostream &err) {
  return guarded(err, [&] {
    if (!(alpha > 0.0 && alpha < 1.0))
      throw InvalidArgument("--alpha must lie in (0, 1)");
    if (!(tau > 0.0) || !std::isfinite(tau))
      throw InvalidArgument("--tau must be positive");
    const LoadedDump loaded = load_pair(logits, labels);

    const auto started = std::chrono::steady_clock::now();
    Dump result{loaded.dump.classes, {}};
    std::size_t calibrated = 0;
    for (std::size_t i = 0; i < loaded.logits.size(); ++i) {
      const CalibrationOutcome outcome = calibrate_loca(softmax(loaded.logits[i], tau), loaded.labels[i], alpha);
      calibrated += outcome.was_misinstructed ? 1 : 0;
      result.rows.emplace_back(outcome.calibrated.values().begin(), outcome.calibrated.values().end());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    write_dump(output, result);
    out << "calibrated=" << calibrated << " total=" << result.rows.size() << " seconds=" << std::fixed
        << std::setprecision(6) << seconds << '\n';
    return kOk;
  });
}

int cmd_demo(const std::filesystem::path &config, const std::optional<std::vector<std::uint64_t>> &seeds,
             const std::optional<std::filesystem::path> &report, std::ostream &out, std::ostream &err) {
  return guarded(err, [&] {
    ExperimentConfig cfg = load_experiment_config(config);
    if (seeds)
      cfg.seeds = *seeds;
    const DemoResult result = run_demo(cfg, &err);
    write_report(result.report, report, out);
    return kOk;
  });
}

int cmd_sweep_alpha(const std::filesystem::path &config, const std::vector<double> &alphas,
                    const std::optional<std::vector<std::uint64_t>> &seeds,
                    const std::optional<std::filesystem::path> &report, std::ostream &out, std::ostream &err) {
  return guarded(err, [&] {
    if (alphas.empty())
      throw InvalidArgument("--alpha needs at least one value");
    ExperimentConfig cfg = load_experiment_config(config);
    if (seeds)
      cfg.seeds = *seeds;
    const SweepResult result = run_sweep(cfg, alphas, &err);
    write_report(result.report, report, out);
    return kOk;
  });
}

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Logit calibration toolkit for knowledge distillation"};
  app.name(args.empty() ? "loca" : args.front());
  app.require_subcommand(1);

  std::string logits, labels, output, config;
  double alpha = 0.95, tau = 1.0;
  std::vector<double> alphas;
  std::vector<std::uint64_t> seed_list;
  std::string report;

  auto *stats = app.add_subcommand("stats", "Mis-instruction ratio of a logit dump");
  stats->add_option("--logits", logits, "Logit dump (CSV with class_i header)")->required();
  stats->add_option("--labels", labels, "Label file, one integer per line")->required();

  auto *calibrate = app.add_subcommand("calibrate", "Soften and calibrate a logit dump");
  calibrate->add_option("--logits", logits, "Logit dump")->required();
  calibrate->add_option("--labels", labels, "Label file")->required();
  calibrate->add_option("--alpha", alpha, "Scale factor fraction in (0, 1)")->required();
  calibrate->add_option("--tau", tau, "Softmax temperature")->default_val(1.0);
  calibrate->add_option("--output", output, "Calibrated probability dump")->required();

  auto *demo = app.add_subcommand("demo", "Distil with none/skip/loca over a seed list");
  demo->add_option("--config", config, "Experiment config (JSON)")->required();
  auto *demo_seeds = demo->add_option("--seeds", seed_list, "Override seed list")->delimiter(',');
  demo->add_option("--output", report, "Write the report table here");

  auto *sweep = app.add_subcommand("sweep-alpha", "Student accuracy across alpha values");
  sweep->add_option("--config", config, "Experiment config (JSON)")->required();
  sweep->add_option("--alpha", alphas, "Comma-separated alpha list")->required()->delimiter(',');
  auto *sweep_seeds = sweep->add_option("--seeds", seed_list, "Override seed list")->delimiter(',');
  sweep->add_option("--output", report, "Write the report table here");

  std::vector<std::string> argv_tail(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(argv_tail.begin(), argv_tail.end());
  try {
    app.parse(argv_tail);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << '\n' << "run with --help for usage\n";
    return kUsageError;
  }

  const auto optional_path = [&]() -> std::optional<std::filesystem::path> {
    if (report.empty())
      return std::nullopt;
    return std::filesystem::path(report);
  };

  if (stats->parsed())
    return cmd_stats(logits, labels, out, err);
  if (calibrate->parsed())
    return cmd_calibrate(logits, labels, alpha, tau, output, out, err);
  if (demo->parsed()) {
    std::optional<std::vector<std::uint64_t>> seeds;
    if (demo_seeds->count() > 0)
      seeds = seed_list;
    return cmd_demo(config, seeds, optional_path(), out, err);
  }
  std::optional<std::vector<std::uint64_t>> seeds;
  if (sweep_seeds->count() > 0)
    seeds = seed_list;
  return cmd_sweep_alpha(config, alphas, seeds, optional_path(), out, err);
}

} // namespace loca::cli
