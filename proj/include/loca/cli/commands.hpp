#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace loca::cli {

enum ExitCode : int { kOk = 0, kUsageError = 2, kDiverged = 3 };

int cmd_stats(const std::filesystem::path &logits, const std::filesystem::path &labels, std::ostream &out,
              std::ostream &err);

int cmd_calibrate(const std::filesystem::path &logits, const std::filesystem::path &labels, double alpha, double tau,
                  const std::filesystem::path &output, std::ostream &out, std::ostream &err);

/// `seeds` overrides the config's seed list; `report` is where the table is
/// written (console only when empty).
int cmd_demo(const std::filesystem::path &config, const std::optional<std::vector<std::uint64_t>> &seeds,
             const std::optional<std::filesystem::path> &report, std::ostream &out, std::ostream &err);

int cmd_sweep_alpha(const std::filesystem::path &config, const std::vector<double> &alphas,
                    const std::optional<std::vector<std::uint64_t>> &seeds,
                    const std::optional<std::filesystem::path> &report, std::ostream &out, std::ostream &err);

/// Full command line, args[0] being the program name.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace loca::cli
