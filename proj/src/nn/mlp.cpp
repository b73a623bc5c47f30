#include "loca/nn/mlp.hpp"

#include <cmath>
#include <random>

#include "loca/errors.hpp"

namespace loca::nn {

namespace {

void check_dims(const std::vector<std::size_t> &dims) {
  if (dims.size() < 2)
    throw InvalidArgument("an MLP needs at least input and output dimensions");
  for (std::size_t d : dims) {
    if (d == 0)
      throw InvalidArgument("MLP layer width must be positive");
  }
  if (dims.back() < 2)
    throw InvalidArgument("an MLP classifier needs at least 2 outputs");
}

std::vector<Mlp::Layer> zero_layers(const std::vector<std::size_t> &dims) {
  std::vector<Mlp::Layer> layers;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const auto in = static_cast<Eigen::Index>(dims[l]);
    const auto out = static_cast<Eigen::Index>(dims[l + 1]);
    layers.push_back({Eigen::MatrixXd::Zero(out, in), Eigen::VectorXd::Zero(out)});
  }
  return layers;
}

} // namespace

Mlp::Mlp(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  check_dims(dims_);
  layers_ = zero_layers(dims_);
}

Mlp::Mlp(std::vector<std::size_t> dims, std::uint64_t seed) : Mlp(std::move(dims)) {
  std::mt19937_64 rng(seed);
  for (auto &layer : layers_) {
    std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / static_cast<double>(layer.weight.cols())));
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c)
        layer.weight(r, c) = normal(rng);
  }
}

bool Mlp::all_finite() const {
  for (const auto &layer : layers_) {
    if (!layer.weight.allFinite() || !layer.bias.allFinite())
      return false;
  }
  return true;
}

bool operator==(const Mlp &a, const Mlp &b) {
  if (a.dims_ != b.dims_)
    return false;
  for (std::size_t l = 0; l < a.layers_.size(); ++l) {
    if (a.layers_[l].weight != b.layers_[l].weight || a.layers_[l].bias != b.layers_[l].bias)
      return false;
  }
  return true;
}

ForwardTrace forward_trace(const Mlp &model, const Eigen::MatrixXd &features) {
  if (static_cast<std::size_t>(features.cols()) != model.input_dims()) {
    throw InvalidArgument("feature width " + std::to_string(features.cols()) + " does not match model input " +
                          std::to_string(model.input_dims()));
  }
  ForwardTrace trace;
  Eigen::MatrixXd x = features;
  const auto &layers = model.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Eigen::MatrixXd z = x * layers[l].weight.transpose();
    z.rowwise() += layers[l].bias.transpose();
    trace.inputs.push_back(std::move(x));
    x = l + 1 < layers.size() ? z.cwiseMax(0.0) : z;
    trace.pre.push_back(std::move(z));
  }
  return trace;
}

Eigen::MatrixXd forward(const Mlp &model, const Eigen::MatrixXd &features) {
  return forward_trace(model, features).logits();
}

std::vector<LogitVector> forward_logits(const Mlp &model, const Eigen::MatrixXd &features) {
  const Eigen::MatrixXd logits = forward(model, features);
  std::vector<LogitVector> out;
  out.reserve(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(logits.cols()));
    for (Eigen::Index c = 0; c < logits.cols(); ++c)
      row[static_cast<std::size_t>(c)] = logits(r, c);
    out.emplace_back(std::move(row));
  }
  return out;
}

Gradients backward(const Mlp &model, const ForwardTrace &trace, const Eigen::MatrixXd &grad_logits) {
  const auto &layers = model.layers();
  if (trace.pre.size() != layers.size())
    throw InvalidArgument("forward trace does not belong to this model");
  const auto &logits = trace.logits();
  if (grad_logits.rows() != logits.rows() || grad_logits.cols() != logits.cols()) {
    throw InvalidArgument("logit gradient is " + std::to_string(grad_logits.rows()) + "x" +
                          std::to_string(grad_logits.cols()) + ", expected " + std::to_string(logits.rows()) + "x" +
                          std::to_string(logits.cols()));
  }

  Gradients grads;
  grads.layers.resize(layers.size());
  Eigen::MatrixXd delta = grad_logits;
  for (std::size_t l = layers.size(); l-- > 0;) {
    grads.layers[l].weight = delta.transpose() * trace.inputs[l];
    grads.layers[l].bias = delta.colwise().sum().transpose();
    if (l == 0)
      break;
    delta = delta * layers[l].weight;
    delta = delta.cwiseProduct((trace.pre[l - 1].array() > 0.0).cast<double>().matrix());
  }
  return grads;
}

SgdMomentum::SgdMomentum(const Mlp &model, double lr, double momentum)
    : lr_(lr), momentum_(momentum), velocity_(zero_layers(model.dims())) {
  if (!(lr >= 0.0) || !std::isfinite(lr))
    throw InvalidArgument("learning rate must be nonnegative and finite");
  if (!(momentum >= 0.0 && momentum < 1.0))
    throw InvalidArgument("momentum must lie in [0, 1)");
}

void SgdMomentum::step(Mlp &model, const Gradients &grads) {
  auto &layers = model.layers();
  if (grads.layers.size() != layers.size() || velocity_.size() != layers.size())
    throw InvalidArgument("gradient does not match model");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    velocity_[l].weight = momentum_ * velocity_[l].weight + grads.layers[l].weight;
    velocity_[l].bias = momentum_ * velocity_[l].bias + grads.layers[l].bias;
    layers[l].weight -= lr_ * velocity_[l].weight;
    layers[l].bias -= lr_ * velocity_[l].bias;
  }
}

void backward_and_step(Mlp &model, const Eigen::MatrixXd &features, const Eigen::MatrixXd &grad_logits,
                       SgdMomentum &optimizer) {
  const ForwardTrace trace = forward_trace(model, features);
  optimizer.step(model, backward(model, trace, grad_logits));
}

} // namespace loca::nn
