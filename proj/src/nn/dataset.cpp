#include "loca/nn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "loca/errors.hpp"

namespace loca::nn {

void SyntheticSpec::validate() const {
  std::ostringstream msg;
  if (classes < 2)
    msg << "classes must be >= 2; ";
  if (dims < 2)
    msg << "dims must be >= 2; ";
  if (samples < classes)
    msg << "samples (" << samples << ") must be >= classes (" << classes << "); ";
  if (!(cluster_spread > 0.0) || !std::isfinite(cluster_spread))
    msg << "cluster_spread must be positive; ";
  if (!(centroid_scale > 0.0) || !std::isfinite(centroid_scale))
    msg << "centroid_scale must be positive; ";
  if (!(label_noise >= 0.0 && label_noise < 0.5))
    msg << "label_noise must lie in [0, 0.5); ";
  if (!(train_fraction > 0.0) || !(valid_fraction >= 0.0) || !(train_fraction + valid_fraction < 1.0))
    msg << "split fractions must leave a nonempty train and test split; ";
  if (const auto text = msg.str(); !text.empty())
    throw InvalidArgument("invalid synthetic dataset spec: " + text.substr(0, text.size() - 2));
}

std::vector<std::size_t> Dataset::indices(Split split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < splits.size(); ++i) {
    if (splits[i] == split)
      out.push_back(i);
  }
  return out;
}

Dataset gen_synthetic(const SyntheticSpec &spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  const auto n = static_cast<Eigen::Index>(spec.samples);
  const auto d = static_cast<Eigen::Index>(spec.dims);
  const auto c = static_cast<Eigen::Index>(spec.classes);

  Eigen::MatrixXd centroids(c, d);
  for (Eigen::Index k = 0; k < c; ++k)
    for (Eigen::Index j = 0; j < d; ++j)
      centroids(k, j) = spec.centroid_scale * normal(rng);

  // Balanced assignment, then shuffled so splits see every class.
  std::vector<std::size_t> cluster(spec.samples);
  for (std::size_t i = 0; i < spec.samples; ++i)
    cluster[i] = i % spec.classes;
  std::shuffle(cluster.begin(), cluster.end(), rng);

  Dataset data;
  data.classes = spec.classes;
  data.features.resize(n, d);
  data.labels.resize(spec.samples);
  data.clean_labels.resize(spec.samples);
  data.splits.resize(spec.samples);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<Eigen::Index>(cluster[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < d; ++j)
      data.features(i, j) = centroids(k, j) + spec.cluster_spread * normal(rng);
    data.clean_labels[static_cast<std::size_t>(i)] = ClassIndex{static_cast<std::size_t>(k)};
  }
  data.labels = data.clean_labels;

  const auto n_train = static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(spec.samples)));
  const auto n_valid = static_cast<std::size_t>(std::llround(spec.valid_fraction * static_cast<double>(spec.samples)));
  for (std::size_t i = 0; i < spec.samples; ++i)
    data.splits[i] = i < n_train ? Split::train : (i < n_train + n_valid ? Split::valid : Split::test);

  // Flip exactly round(noise * n_train) training labels to a uniformly drawn wrong class.
  std::vector<std::size_t> train_idx(n_train);
  for (std::size_t i = 0; i < n_train; ++i)
    train_idx[i] = i;
  std::shuffle(train_idx.begin(), train_idx.end(), rng);
  const auto n_flip = static_cast<std::size_t>(std::llround(spec.label_noise * static_cast<double>(n_train)));
  std::uniform_int_distribution<std::size_t> other(1, spec.classes - 1);
  for (std::size_t f = 0; f < n_flip; ++f) {
    auto &label = data.labels[train_idx[f]];
    label.value = (label.value + other(rng)) % spec.classes;
  }
  return data;
}

} // namespace loca::nn
