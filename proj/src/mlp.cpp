// Copyright (C) 2026 The TAL Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tal/mlp.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "tal/error.hpp"
#include "tal/kernels.hpp"

namespace tal {

Mlp::Mlp(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  if (dims_.size() < 3) {
    throw InvalidInputError("network needs an input, at least one hidden layer and an output");
  }
  for (std::size_t d : dims_) {
    if (d == 0) throw InvalidInputError("layer widths must be positive");
  }
  if (dims_.back() < 2) throw InvalidInputError("need at least 2 classes");
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    layers_.push_back(DenseLayer{Matrix(dims_[l + 1], dims_[l]), Vector(dims_[l + 1], 0.0)});
  }
}

Mlp Mlp::random(std::vector<std::size_t> dims, std::mt19937_64& rng) {
  Mlp net(std::move(dims));
  // U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases alike.
  for (DenseLayer& layer : net.layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in_dim()));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (double& w : layer.weights.data) w = u(rng);
    for (double& b : layer.bias) b = u(rng);
  }
  return net;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const DenseLayer& layer : layers_) n += layer.weights.data.size() + layer.bias.size();
  return n;
}

std::vector<double*> Mlp::parameter_pointers() {
  std::vector<double*> out;
  out.reserve(parameter_count());
  for (DenseLayer& layer : layers_) {
    for (double& w : layer.weights.data) out.push_back(&w);
    for (double& b : layer.bias) out.push_back(&b);
  }
  return out;
}

Mlp::Output Mlp::forward(std::span<const double> input) const {
  if (input.size() != input_dim()) {
    throw InvalidInputError("input has " + std::to_string(input.size()) +
                            " features, network expects " + std::to_string(input_dim()));
  }
  Matrix x(1, input.size());
  std::copy(input.begin(), input.end(), x.data.begin());
  const BatchTrace trace = forward_batch(x, Backend::kSerial);
  return Output{trace.features().data, trace.logits().data};
}

BatchTrace Mlp::forward_batch(const Matrix& inputs, Backend backend) const {
  if (inputs.cols != input_dim()) {
    throw InvalidInputError("batch has " + std::to_string(inputs.cols) +
                            " features, network expects " + std::to_string(input_dim()));
  }
  BatchTrace trace;
  trace.activations.reserve(layers_.size() + 1);
  trace.activations.push_back(inputs);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Matrix out;
    const bool hidden = l + 1 < layers_.size();
    kernels::dense_forward(backend, trace.activations.back(), layers_[l], hidden, out);
    trace.activations.push_back(std::move(out));
  }
  return trace;
}

void Mlp::backward_batch(const BatchTrace& trace, const Matrix& grad_logits, Mlp& grads,
                         Backend backend) const {
  if (grads.dims_ != dims_) grads = Mlp(dims_);
  Matrix delta = grad_logits;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    kernels::dense_weight_grad(backend, delta, trace.activations[l], grads.layers_[l]);
    if (l == 0) break;
    Matrix delta_in;
    kernels::dense_input_grad(backend, delta, layers_[l], trace.activations[l], delta_in);
    delta = std::move(delta_in);
  }
}

void sgd_step(Mlp& params, Mlp& velocity, const Mlp& grads, double lr, double momentum,
              double weight_decay) {
  auto& pl = params.layers();
  auto& vl = velocity.layers();
  const auto& gl = grads.layers();
  auto update = [&](std::vector<double>& w, std::vector<double>& v, const std::vector<double>& g) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      v[i] = momentum * v[i] + (g[i] + weight_decay * w[i]);
      w[i] -= lr * v[i];
    }
  };
  for (std::size_t l = 0; l < pl.size(); ++l) {
    update(pl[l].weights.data, vl[l].weights.data, gl[l].weights.data);
    update(pl[l].bias, vl[l].bias, gl[l].bias);
  }
}

double cosine_annealed_lr(double lr0, std::size_t epoch, std::size_t total_epochs) {
  const double progress = static_cast<double>(epoch) / static_cast<double>(total_epochs);
  return lr0 * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

}  // namespace tal
