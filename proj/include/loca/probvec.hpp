#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace loca {

/// Floor applied to probabilities before taking logs, and by softmax when an
/// entry would otherwise underflow.
inline constexpr double kProbFloor = 1e-12;

/// Absolute tolerance on |sum - 1| for a vector to count as a distribution.
inline constexpr double kSumTolerance = 1e-9;

struct ClassIndex {
  std::size_t value = 0;

  friend bool operator==(ClassIndex, ClassIndex) = default;
};

/// Raw pre-softmax scores. At least two entries, all finite.
class LogitVector {
public:
  explicit LogitVector(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

private:
  std::vector<double> values_;
};

/// A point strictly inside the probability simplex. Only obtainable through
/// softmax() or validate_prob().
class ProbVector {
public:
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const ProbVector &, const ProbVector &) = default;

private:
  explicit ProbVector(std::vector<double> values) : values_(std::move(values)) {}

  friend ProbVector softmax(const LogitVector &, double);
  friend ProbVector validate_prob(std::span<const double>, bool);

  std::vector<double> values_;
};

/// Exactly one entry equal to 1, the rest 0.
class OneHotVector {
public:
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  ClassIndex hot() const noexcept { return hot_; }

private:
  OneHotVector(std::vector<double> values, ClassIndex hot) : values_(std::move(values)), hot_(hot) {}

  friend OneHotVector one_hot(ClassIndex, std::size_t);

  std::vector<double> values_;
  ClassIndex hot_;
};

/// Temperature softmax, stabilised by subtracting the largest scaled logit.
/// Entries that would fall below kProbFloor are raised to it and the result
/// renormalised, so every entry is strictly positive.
ProbVector softmax(const LogitVector &z, double tau);

/// Index of the largest entry; ties go to the lowest index.
ClassIndex argmax_index(std::span<const double> values);
inline ClassIndex argmax_index(const ProbVector &p) { return argmax_index(p.values()); }
inline ClassIndex argmax_index(const LogitVector &z) { return argmax_index(z.values()); }

OneHotVector one_hot(ClassIndex gt, std::size_t classes);

/// Checks that `raw` is a distribution strictly inside the simplex and returns
/// it renormalised. With `clamp` set, entries below kProbFloor (including
/// zero or negative ones) are raised to the floor after the sum check and
/// before renormalising.
///
/// Throws NotADistribution when the sum is off by more than kSumTolerance and
/// DomainError when an entry lies outside (0, 1).
ProbVector validate_prob(std::span<const double> raw, bool clamp = false);

} // namespace loca
