#include "loca/probvec.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "loca/errors.hpp"

namespace loca {

LogitVector::LogitVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2)
    throw InvalidArgument("logit vector needs at least 2 classes, got " + std::to_string(values_.size()));
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]))
      throw InvalidArgument("logit " + std::to_string(i) + " is not finite");
  }
}

ProbVector softmax(const LogitVector &z, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    std::ostringstream msg;
    msg << "softmax temperature must be positive and finite, got " << tau;
    throw InvalidArgument(msg.str());
  }

  const std::size_t n = z.size();
  double top = z[0] / tau;
  for (std::size_t i = 1; i < n; ++i)
    top = std::max(top, z[i] / tau);

  std::vector<double> out(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp(z[i] / tau - top);
    total += out[i];
  }
  bool floored = false;
  for (double &v : out) {
    v /= total;
    if (v < kProbFloor) {
      v = kProbFloor;
      floored = true;
    }
  }
  if (floored) {
    const double sum = std::accumulate(out.begin(), out.end(), 0.0);
    for (double &v : out)
      v /= sum;
  }
  return ProbVector(std::move(out));
}

ClassIndex argmax_index(std::span<const double> values) {
  if (values.empty())
    throw InvalidArgument("argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best])
      best = i;
  }
  return ClassIndex{best};
}

OneHotVector one_hot(ClassIndex gt, std::size_t classes) {
  if (gt.value >= classes) {
    throw InvalidArgument("class index " + std::to_string(gt.value) + " out of range for " +
                          std::to_string(classes) + " classes");
  }
  std::vector<double> values(classes, 0.0);
  values[gt.value] = 1.0;
  return OneHotVector(std::move(values), gt);
}

ProbVector validate_prob(std::span<const double> raw, bool clamp) {
  if (raw.size() < 2)
    throw InvalidArgument("distribution needs at least 2 classes, got " + std::to_string(raw.size()));

  std::vector<double> values(raw.begin(), raw.end());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]))
      throw DomainError("entry " + std::to_string(i) + " is not finite");
  }

  double sum = std::accumulate(values.begin(), values.end(), 0.0);
  if (std::abs(sum - 1.0) > kSumTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "entries sum to " << sum << ", not 1";
    throw NotADistribution(msg.str());
  }

  if (clamp) {
    for (double &v : values)
      v = std::max(v, kProbFloor);
    sum = std::accumulate(values.begin(), values.end(), 0.0);
  }
  for (double &v : values)
    v /= sum;

  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0 && values[i] < 1.0)) {
      std::ostringstream msg;
      msg << "entry " << i << " = " << raw[i] << " lies outside (0, 1)";
      throw DomainError(msg.str());
    }
  }
  return ProbVector(std::move(values));
}

} // namespace loca
