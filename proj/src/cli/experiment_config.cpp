#include "loca/cli/experiment_config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace loca::cli {

using nlohmann::json;

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error([&] {
        std::string msg = "invalid experiment config:";
        for (const auto &p : problems)
          msg += "\n  " + p;
        return msg;
      }()),
      problems_(std::move(problems)) {}

nn::TrainConfig ExperimentConfig::student_config(Policy policy, std::uint64_t seed, double run_alpha) const {
  nn::TrainConfig cfg = student.train;
  cfg.seed = seed;
  cfg.loss = loss;
  cfg.calibration.policy = policy;
  cfg.calibration.alpha = run_alpha;
  cfg.calibration.allow_alpha_at_or_above_one = run_alpha >= 1.0;
  return cfg;
}

namespace {

class Reader {
public:
  std::vector<std::string> problems;

  void object(const json &node, const std::string &path, const std::set<std::string> &allowed) {
    if (!node.is_object()) {
      problems.push_back(path + ": expected an object");
      return;
    }
    for (const auto &[key, _] : node.items()) {
      if (!allowed.contains(key))
        problems.push_back(join(path, key) + ": unknown key");
    }
  }

  template <typename T, typename Check>
  void number(const json &node, const std::string &path, const char *key, T &out, Check ok, const char *rule) {
    if (!node.is_object() || !node.contains(key))
      return;
    const auto &v = node.at(key);
    const auto name = join(path, key);
    if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer() || (std::is_unsigned_v<T> && v.get<long long>() < 0)) {
        problems.push_back(name + ": expected a nonnegative integer");
        return;
      }
    } else if (!v.is_number()) {
      problems.push_back(name + ": expected a number");
      return;
    }
    const T value = v.get<T>();
    if (!ok(value)) {
      problems.push_back(name + ": " + rule);
      return;
    }
    out = value;
  }

  void boolean(const json &node, const std::string &path, const char *key, bool &out) {
    if (!node.is_object() || !node.contains(key))
      return;
    if (!node.at(key).is_boolean()) {
      problems.push_back(join(path, key) + ": expected true or false");
      return;
    }
    out = node.at(key).get<bool>();
  }

  template <typename T>
  void int_list(const json &node, const std::string &path, const char *key, std::vector<T> &out, bool allow_empty,
                bool positive) {
    if (!node.is_object() || !node.contains(key))
      return;
    const auto &v = node.at(key);
    const auto name = join(path, key);
    if (!v.is_array() || (!allow_empty && v.empty())) {
      problems.push_back(name + (allow_empty ? ": expected a list of integers" : ": expected a nonempty list of integers"));
      return;
    }
    std::vector<T> values;
    for (const auto &item : v) {
      if (!item.is_number_integer() || item.get<long long>() < (positive ? 1 : 0)) {
        problems.push_back(name + (positive ? ": entries must be positive integers" : ": entries must be nonnegative integers"));
        return;
      }
      values.push_back(item.get<T>());
    }
    out = std::move(values);
  }

  static std::string join(const std::string &path, const std::string &key) {
    return path.empty() ? key : path + "." + key;
  }
};

const auto positive = [](auto v) { return v > 0 && std::isfinite(static_cast<double>(v)); };
const auto nonnegative = [](auto v) { return v >= 0 && std::isfinite(static_cast<double>(v)); };

void read_train(Reader &r, const json &node, const std::string &path, ModelSpec &spec, bool with_seed) {
  std::set<std::string> keys{"hidden", "epochs", "batch_size", "learning_rate", "momentum"};
  if (with_seed)
    keys.insert("seed");
  r.object(node, path, keys);
  r.int_list(node, path, "hidden", spec.hidden, true, true);
  r.number(node, path, "epochs", spec.train.epochs, nonnegative, "must be >= 0");
  r.number(node, path, "batch_size", spec.train.batch_size, positive, "must be positive");
  r.number(node, path, "learning_rate", spec.train.learning_rate, positive, "must be positive");
  r.number(node, path, "momentum", spec.train.momentum, [](double v) { return v >= 0.0 && v < 1.0; },
           "must lie in [0, 1)");
  if (with_seed)
    r.number(node, path, "seed", spec.train.seed, [](auto) { return true; }, "");
}

} // namespace

ExperimentConfig parse_experiment_config(const std::string &json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error &e) {
    throw ConfigError({std::string("<file>: not valid JSON: ") + e.what()});
  }

  ExperimentConfig cfg;
  Reader r;
  r.object(root, "", {"dataset", "teacher", "student", "loss", "calibration", "seeds"});
  if (!root.is_object())
    throw ConfigError(std::move(r.problems));

  if (root.contains("dataset")) {
    const auto &d = root["dataset"];
    auto &s = cfg.dataset;
    r.object(d, "dataset",
             {"classes", "dims", "samples", "cluster_spread", "centroid_scale", "label_noise", "seed", "train_fraction",
              "valid_fraction"});
    r.number(d, "dataset", "classes", s.classes, [](auto v) { return v >= 2; }, "must be >= 2");
    r.number(d, "dataset", "dims", s.dims, [](auto v) { return v >= 2; }, "must be >= 2");
    r.number(d, "dataset", "samples", s.samples, positive, "must be positive");
    r.number(d, "dataset", "cluster_spread", s.cluster_spread, positive, "must be positive");
    r.number(d, "dataset", "centroid_scale", s.centroid_scale, positive, "must be positive");
    r.number(d, "dataset", "label_noise", s.label_noise, [](double v) { return v >= 0.0 && v < 0.5; },
             "must lie in [0, 0.5)");
    r.number(d, "dataset", "seed", s.seed, [](auto) { return true; }, "");
    r.number(d, "dataset", "train_fraction", s.train_fraction, [](double v) { return v > 0.0 && v < 1.0; },
             "must lie in (0, 1)");
    r.number(d, "dataset", "valid_fraction", s.valid_fraction, [](double v) { return v >= 0.0 && v < 1.0; },
             "must lie in [0, 1)");
    if (s.samples < s.classes)
      r.problems.push_back("dataset.samples: must be >= dataset.classes");
    if (s.train_fraction + s.valid_fraction >= 1.0)
      r.problems.push_back("dataset.valid_fraction: train_fraction + valid_fraction must be < 1");
  }
  if (root.contains("teacher"))
    read_train(r, root["teacher"], "teacher", cfg.teacher, true);
  if (root.contains("student"))
    read_train(r, root["student"], "student", cfg.student, false);
  if (root.contains("loss")) {
    const auto &l = root["loss"];
    r.object(l, "loss", {"tau", "beta", "gamma", "scale_kd_by_tau_squared"});
    r.number(l, "loss", "tau", cfg.loss.tau, positive, "must be positive");
    r.number(l, "loss", "beta", cfg.loss.beta, nonnegative, "must be >= 0");
    r.number(l, "loss", "gamma", cfg.loss.gamma, nonnegative, "must be >= 0");
    r.boolean(l, "loss", "scale_kd_by_tau_squared", cfg.loss.scale_kd_by_tau_squared);
    if (!(cfg.loss.beta + cfg.loss.gamma > 0.0))
      r.problems.push_back("loss.gamma: beta + gamma must be positive");
  }
  if (root.contains("calibration")) {
    const auto &c = root["calibration"];
    r.object(c, "calibration", {"alpha"});
    r.number(c, "calibration", "alpha", cfg.alpha, [](double v) { return v > 0.0 && v < 1.0; }, "must lie in (0, 1)");
  }
  r.int_list(root, "", "seeds", cfg.seeds, false, false);

  if (!r.problems.empty())
    throw ConfigError(std::move(r.problems));
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError({path.string() + ": cannot open file"});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

} // namespace loca::cli
