#pragma once

#include <stdexcept>
#include <string>

namespace loca {

/// Bad argument to a library call: non-positive temperature, out-of-range
/// class index, mismatched dimensions, alpha outside (0, 1) and so on.
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Entries do not sum to one within tolerance.
class NotADistribution : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// An entry falls outside the open interval (0, 1).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Loss became non-finite during training.
class TrainingDiverged : public std::runtime_error {
public:
  TrainingDiverged(int epoch, const std::string &what)
      : std::runtime_error("training diverged at epoch " + std::to_string(epoch) + ": " + what),
        epoch_(epoch) {}

  int epoch() const noexcept { return epoch_; }

private:
  int epoch_;
};

} // namespace loca
