#include <doctest.h>

#include <algorithm>

#include "loca/cli/experiment_config.hpp"

using namespace loca;
using namespace loca::cli;

namespace {

std::vector<std::string> problems_of(const std::string &json) {
  try {
    parse_experiment_config(json);
  } catch (const ConfigError &e) {
    return e.problems();
  }
  FAIL("expected a ConfigError");
  return {};
}

bool mentions(const std::vector<std::string> &problems, const std::string &prefix) {
  return std::any_of(problems.begin(), problems.end(),
                     [&](const std::string &p) { return p.rfind(prefix, 0) == 0; });
}

} // namespace

TEST_CASE("config: empty object keeps defaults") {
  const ExperimentConfig cfg = parse_experiment_config("{}");
  CHECK(cfg.alpha == 0.95);
  CHECK(cfg.loss.tau == 4.0);
  CHECK(cfg.loss.beta == 0.9);
  CHECK(cfg.loss.gamma == 0.1);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 2, 3, 4, 5});
}

TEST_CASE("config: values are read") {
  const ExperimentConfig cfg = parse_experiment_config(R"({
    "dataset": {"classes": 4, "dims": 3, "samples": 100, "label_noise": 0.1, "seed": 9},
    "teacher": {"hidden": [5], "epochs": 2, "seed": 3},
    "student": {"hidden": [], "epochs": 4, "learning_rate": 0.2},
    "loss": {"tau": 2, "scale_kd_by_tau_squared": true},
    "calibration": {"alpha": 0.8},
    "seeds": [7, 8]
  })");
  CHECK(cfg.dataset.classes == 4);
  CHECK(cfg.dataset.label_noise == 0.1);
  CHECK(cfg.teacher.hidden == std::vector<std::size_t>{5});
  CHECK(cfg.teacher.train.seed == 3);
  CHECK(cfg.student.hidden.empty());
  CHECK(cfg.student.train.learning_rate == 0.2);
  CHECK(cfg.loss.scale_kd_by_tau_squared);
  CHECK(cfg.alpha == 0.8);

  const nn::TrainConfig run = cfg.student_config(Policy::loca, 8, 0.9);
  CHECK(run.seed == 8);
  CHECK(run.calibration.alpha == 0.9);
  CHECK(run.calibration.policy == Policy::loca);
  CHECK(run.loss.tau == 2.0);
  CHECK(run.epochs == 4);
  CHECK_FALSE(run.calibration.allow_alpha_at_or_above_one);
  CHECK(cfg.student_config(Policy::loca, 8, 1.0).calibration.allow_alpha_at_or_above_one);
}

TEST_CASE("config: every offending key is listed") {
  const auto problems = problems_of(R"({
    "dataset": {"classes": 1, "label_noise": 0.7, "colour": 3},
    "loss": {"tau": -1},
    "calibration": {"alpha": 1.5},
    "seeds": [],
    "extra": true
  })");
  CHECK(mentions(problems, "dataset.classes"));
  CHECK(mentions(problems, "dataset.label_noise"));
  CHECK(mentions(problems, "dataset.colour: unknown key"));
  CHECK(mentions(problems, "loss.tau"));
  CHECK(mentions(problems, "calibration.alpha"));
  CHECK(mentions(problems, "seeds"));
  CHECK(mentions(problems, "extra: unknown key"));
}

TEST_CASE("config: wrong types and bad JSON") {
  CHECK(mentions(problems_of(R"({"teacher": {"epochs": "ten"}})"), "teacher.epochs"));
  CHECK(mentions(problems_of(R"({"student": {"hidden": [4, -1]}})"), "student.hidden"));
  CHECK(mentions(problems_of(R"({"student": {"seed": 4}})"), "student.seed: unknown key"));
  CHECK(mentions(problems_of(R"({"loss": {"scale_kd_by_tau_squared": 1}})"), "loss.scale_kd_by_tau_squared"));
  CHECK_THROWS_AS(parse_experiment_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config("[1, 2]"), ConfigError);
}

TEST_CASE("config: shipped files load") {
  const ExperimentConfig cfg = load_experiment_config(LOCA_CONFIG_DIR "/default.json");
  CHECK(cfg.dataset.label_noise > 0.0);
  CHECK(cfg.seeds.size() == 5);
  const ExperimentConfig clean = load_experiment_config(LOCA_CONFIG_DIR "/zero_misinstruction.json");
  CHECK(clean.dataset.label_noise == 0.0);
  CHECK_THROWS(load_experiment_config(LOCA_CONFIG_DIR "/no_such_file.json"));
}
