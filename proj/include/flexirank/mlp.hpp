#pragma once

// One-hidden-layer feedforward classifier with logistic units throughout,
// trained by online backpropagation on squared error against one-hot targets.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "flexirank/error.hpp"
#include "flexirank/matrix.hpp"

namespace flexirank {

struct MlpModel {
  std::size_t inputs = 0;
  std::size_t hidden = 0;
  std::size_t outputs = 0;
  std::vector<double> w1;  // hidden x inputs
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // outputs x hidden
  std::vector<double> b2;  // outputs
  std::vector<int> class_labels;  // output unit -> label
  MinMaxScaler scaler;
  double rms_error = 0.0;

  std::size_t parameter_count() const { return w1.size() + b1.size() + w2.size() + b2.size(); }

  /// Flattened [w1, b1, w2, b2].
  std::vector<double> parameters() const {
    std::vector<double> p;
    p.reserve(parameter_count());
    for (const auto* v : {&w1, &b1, &w2, &b2}) p.insert(p.end(), v->begin(), v->end());
    return p;
  }

  void set_parameters(const std::vector<double>& p) {
    if (p.size() != parameter_count()) throw InvalidArgument("mlp: parameter vector size mismatch");
    auto it = p.begin();
    for (auto* v : {&w1, &b1, &w2, &b2}) {
      std::copy(it, it + static_cast<std::ptrdiff_t>(v->size()), v->begin());
      it += static_cast<std::ptrdiff_t>(v->size());
    }
  }
};

struct MlpOptions {
  std::size_t hidden = 5;
  std::size_t epochs = 1000;
  double rate = 0.5;
  std::uint64_t seed = 42;
};

namespace detail {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct MlpActivations {
  std::vector<double> hidden;
  std::vector<double> output;
};

inline MlpActivations mlp_forward(const MlpModel& net, std::span<const double> x) {
  MlpActivations a;
  a.hidden.resize(net.hidden);
  a.output.resize(net.outputs);
  for (std::size_t h = 0; h < net.hidden; ++h) {
    double z = net.b1[h];
    for (std::size_t i = 0; i < net.inputs; ++i) z += net.w1[h * net.inputs + i] * x[i];
    a.hidden[h] = sigmoid(z);
  }
  for (std::size_t o = 0; o < net.outputs; ++o) {
    double z = net.b2[o];
    for (std::size_t h = 0; h < net.hidden; ++h) z += net.w2[o * net.hidden + h] * a.hidden[h];
    a.output[o] = sigmoid(z);
  }
  return a;
}

// Accumulates dE/dparams for E = 1/2 sum (y - t)^2 on one sample, flattened.
inline void mlp_backprop(const MlpModel& net, std::span<const double> x, std::span<const double> target,
                         std::vector<double>& grad) {
  auto a = mlp_forward(net, x);
  std::vector<double> delta_out(net.outputs), delta_hidden(net.hidden, 0.0);
  for (std::size_t o = 0; o < net.outputs; ++o) {
    double y = a.output[o];
    delta_out[o] = (y - target[o]) * y * (1.0 - y);
  }
  for (std::size_t h = 0; h < net.hidden; ++h) {
    double s = 0.0;
    for (std::size_t o = 0; o < net.outputs; ++o) s += net.w2[o * net.hidden + h] * delta_out[o];
    delta_hidden[h] = s * a.hidden[h] * (1.0 - a.hidden[h]);
  }
  std::size_t off_b1 = net.w1.size(), off_w2 = off_b1 + net.b1.size(), off_b2 = off_w2 + net.w2.size();
  for (std::size_t h = 0; h < net.hidden; ++h) {
    for (std::size_t i = 0; i < net.inputs; ++i) grad[h * net.inputs + i] += delta_hidden[h] * x[i];
    grad[off_b1 + h] += delta_hidden[h];
  }
  for (std::size_t o = 0; o < net.outputs; ++o) {
    for (std::size_t h = 0; h < net.hidden; ++h) grad[off_w2 + o * net.hidden + h] += delta_out[o] * a.hidden[h];
    grad[off_b2 + o] += delta_out[o];
  }
}

}  // namespace detail

/// Fresh network with weights drawn uniformly from [-0.5, 0.5].
inline MlpModel mlp_init(std::size_t inputs, std::size_t hidden, std::size_t outputs, std::uint64_t seed) {
  if (inputs < 1 || hidden < 1 || outputs < 1) throw InvalidArgument("mlp: layer sizes must be >= 1");
  MlpModel net;
  net.inputs = inputs;
  net.hidden = hidden;
  net.outputs = outputs;
  std::mt19937_64 rng(seed);
  auto draw = [&] { return double(rng() >> 11) * 0x1.0p-53 - 0.5; };
  for (auto* v : {&net.w1, &net.b1, &net.w2, &net.b2}) v->clear();
  net.w1.resize(hidden * inputs);
  net.b1.resize(hidden);
  net.w2.resize(outputs * hidden);
  net.b2.resize(outputs);
  for (auto* v : {&net.w1, &net.b1, &net.w2, &net.b2})
    for (double& w : *v) w = draw();
  return net;
}

/// Output-unit activations for an already scaled input row.
inline std::vector<double> mlp_output(const MlpModel& net, std::span<const double> scaled_x) {
  return detail::mlp_forward(net, scaled_x).output;
}

/// Sum over samples of 1/2 ||y - t||^2. Inputs must already be scaled.
inline double mlp_loss(const MlpModel& net, const Matrix& x, const Matrix& targets) {
  double e = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto y = mlp_output(net, x.row(i));
    for (std::size_t o = 0; o < net.outputs; ++o) e += 0.5 * (y[o] - targets(i, o)) * (y[o] - targets(i, o));
  }
  return e;
}

/// Gradient of mlp_loss with respect to parameters(), by backpropagation.
inline std::vector<double> mlp_gradient(const MlpModel& net, const Matrix& x, const Matrix& targets) {
  std::vector<double> grad(net.parameter_count(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) detail::mlp_backprop(net, x.row(i), targets.row(i), grad);
  return grad;
}

/// sqrt of the mean squared output error over all samples and output units.
inline double mlp_rms_error(const MlpModel& net, const Matrix& scaled_x, const Matrix& targets) {
  if (scaled_x.rows() == 0) return 0.0;
  double loss = mlp_loss(net, scaled_x, targets);
  return std::sqrt(2.0 * loss / double(scaled_x.rows() * net.outputs));
}

/// One-hot target matrix for `labels` in the output order of `classes`.
inline Matrix one_hot(const std::vector<int>& labels, const std::vector<int>& classes) {
  Matrix t(labels.size(), classes.size(), 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = std::find(classes.begin(), classes.end(), labels[i]);
    if (it == classes.end()) throw InvalidArgument("mlp: unknown label " + std::to_string(labels[i]));
    t(i, static_cast<std::size_t>(it - classes.begin())) = 1.0;
  }
  return t;
}

/// Trains on raw features; they are min-max scaled to [0,1] first and the
/// scaling is kept in the model. Samples are visited in a seeded shuffled
/// order each epoch.
inline MlpModel mlp_train(const Matrix& data, const std::vector<int>& labels, const MlpOptions& options = {}) {
  if (data.rows() != labels.size()) throw InvalidArgument("mlp: one label per row required");
  if (data.rows() == 0) throw InvalidArgument("mlp: empty training set");
  if (options.hidden < 1) throw InvalidArgument("mlp: hidden must be >= 1");
  std::set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2) throw InvalidArgument("mlp: at least two classes are required");

  std::vector<int> classes(distinct.begin(), distinct.end());
  MlpModel net = mlp_init(data.cols(), options.hidden, classes.size(), options.seed);
  net.class_labels = classes;
  net.scaler = MinMaxScaler::fit(data);
  const Matrix x = net.scaler.transform(data);
  const Matrix t = one_hot(labels, classes);

  std::mt19937_64 rng(options.seed ^ 0x9E3779B97F4A7C15ull);
  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad(net.parameter_count());
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    for (auto row : order) {
      std::fill(grad.begin(), grad.end(), 0.0);
      detail::mlp_backprop(net, x.row(row), t.row(row), grad);
      auto params = net.parameters();
      for (std::size_t p = 0; p < params.size(); ++p) params[p] -= options.rate * grad[p];
      net.set_parameters(params);
    }
  }
  net.rms_error = mlp_rms_error(net, x, t);
  return net;
}

/// Predicted label for one raw feature row.
inline int mlp_predict(const MlpModel& net, std::span<const double> raw_x) {
  std::vector<double> x(raw_x.size());
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = net.scaler.scale(j, raw_x[j]);
  auto y = mlp_output(net, x);
  auto best = std::max_element(y.begin(), y.end()) - y.begin();
  return net.class_labels.at(static_cast<std::size_t>(best));
}

}  // namespace flexirank
