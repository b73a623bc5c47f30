#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "loca/losses.hpp"
#include "loca/nn/dataset.hpp"
#include "loca/nn/train.hpp"

namespace loca::cli {

struct ModelSpec {
  std::vector<std::size_t> hidden;
  nn::TrainConfig train;
};

/// Everything a demo or sweep needs. Loss and alpha are shared by every
/// student run; the teacher always trains with plain cross-entropy.
struct ExperimentConfig {
  nn::SyntheticSpec dataset;
  ModelSpec teacher;
  ModelSpec student;
  LossConfig loss;
  double alpha = 0.95;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};

  /// Student training config for one run.
  nn::TrainConfig student_config(Policy policy, std::uint64_t seed, double run_alpha) const;
};

/// Lists every offending key, e.g. "dataset.label_noise: must lie in [0, 0.5)".
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(std::vector<std::string> problems);

  const std::vector<std::string> &problems() const noexcept { return problems_; }

private:
  std::vector<std::string> problems_;
};

/// Parses the JSON experiment file. Omitted keys keep their defaults; unknown
/// keys, wrong types and out-of-range values are all reported together.
ExperimentConfig parse_experiment_config(const std::string &json_text);
ExperimentConfig load_experiment_config(const std::filesystem::path &path);

} // namespace loca::cli
