#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "loca/probvec.hpp"

namespace loca::nn {

/// Fully connected ReLU network with an identity output layer.
/// Layer l maps dims[l] -> dims[l + 1] as `x * W^T + b`, W stored out x in.
class Mlp {
public:
  struct Layer {
    Eigen::MatrixXd weight;
    Eigen::VectorXd bias;
  };

  /// dims = {input, hidden..., classes}. Weights are He-normal, biases zero.
  Mlp(std::vector<std::size_t> dims, std::uint64_t seed);
  /// All-zero parameters.
  explicit Mlp(std::vector<std::size_t> dims);

  const std::vector<std::size_t> &dims() const noexcept { return dims_; }
  std::size_t input_dims() const noexcept { return dims_.front(); }
  std::size_t classes() const noexcept { return dims_.back(); }

  std::vector<Layer> &layers() noexcept { return layers_; }
  const std::vector<Layer> &layers() const noexcept { return layers_; }

  bool all_finite() const;

  friend bool operator==(const Mlp &a, const Mlp &b);

private:
  std::vector<std::size_t> dims_;
  std::vector<Layer> layers_;
};

/// Activations kept by a batched forward pass for the backward pass.
/// inputs[l] is the input to layer l; pre[l] is its affine output.
struct ForwardTrace {
  std::vector<Eigen::MatrixXd> inputs;
  std::vector<Eigen::MatrixXd> pre;

  const Eigen::MatrixXd &logits() const { return pre.back(); }
};

/// Batched forward; one row of logits per row of `features`.
Eigen::MatrixXd forward(const Mlp &model, const Eigen::MatrixXd &features);
ForwardTrace forward_trace(const Mlp &model, const Eigen::MatrixXd &features);

/// Per-sample view of the batched forward.
std::vector<LogitVector> forward_logits(const Mlp &model, const Eigen::MatrixXd &features);

/// Parameter gradients, same shapes as the model's layers.
struct Gradients {
  std::vector<Mlp::Layer> layers;
};

/// Backpropagates d(loss)/d(logits) (one row per sample) through the trace.
Gradients backward(const Mlp &model, const ForwardTrace &trace, const Eigen::MatrixXd &grad_logits);

/// SGD with momentum: v = momentum * v + g; w -= lr * v.
class SgdMomentum {
public:
  SgdMomentum(const Mlp &model, double lr, double momentum);

  void step(Mlp &model, const Gradients &grads);

private:
  double lr_;
  double momentum_;
  std::vector<Mlp::Layer> velocity_;
};

/// One forward, backward and optimiser step on a batch.
void backward_and_step(Mlp &model, const Eigen::MatrixXd &features, const Eigen::MatrixXd &grad_logits,
                       SgdMomentum &optimizer);

} // namespace loca::nn
