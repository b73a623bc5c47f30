#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "loca/probvec.hpp"

namespace loca::nn {

enum class Split : std::uint8_t { train, valid, test };

struct SyntheticSpec {
  std::size_t classes = 10;
  std::size_t dims = 16;
  std::size_t samples = 2000;
  /// Standard deviation of each cluster around its centroid.
  double cluster_spread = 1.0;
  /// Standard deviation of the centroid coordinates.
  double centroid_scale = 1.0;
  /// Fraction of training labels flipped to a different class.
  double label_noise = 0.0;
  std::uint64_t seed = 0;
  double train_fraction = 0.6;
  double valid_fraction = 0.2;

  void validate() const;
};

/// Row-major feature matrix plus labels. `clean_labels` holds the generating
/// cluster of every sample; `labels` differs from it only on flipped
/// training samples.
struct Dataset {
  std::size_t classes = 0;
  Eigen::MatrixXd features;
  std::vector<ClassIndex> labels;
  std::vector<ClassIndex> clean_labels;
  std::vector<Split> splits;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t dims() const noexcept { return static_cast<std::size_t>(features.cols()); }
  std::vector<std::size_t> indices(Split split) const;
};

/// Balanced isotropic Gaussian clusters, one centroid per class. Identical
/// output for identical specs.
Dataset gen_synthetic(const SyntheticSpec &spec);

} // namespace loca::nn
