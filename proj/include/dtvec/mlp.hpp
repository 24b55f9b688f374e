#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "dtvec/train_config.hpp"
#include "dtvec/types.hpp"

namespace dtvec {

enum class Activation { identity, tanh, sigmoid };

inline std::string to_string(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::tanh: return "tanh";
    case Activation::sigmoid: return "sigmoid";
  }
  return "identity";
}

inline Activation parse_activation(const std::string& text) {
  if (text == "identity") return Activation::identity;
  if (text == "tanh") return Activation::tanh;
  if (text == "sigmoid") return Activation::sigmoid;
  throw std::invalid_argument("unknown activation '" + text + "'");
}

// Fully connected network. All weights and biases live in one flat vector so
// soft updates, optimizers and checkpoints work on a single buffer. Layer l
// stores W_l (out x in, column-major) followed by b_l (out).
//
// Batches are column-major: one sample per column.
template <typename Scalar>
class Mlp {
 public:
  using MatS = Mat<Scalar>;
  using VecS = Vec<Scalar>;

  // Intermediate outputs kept for backward(); outputs[0] is the input.
  struct Tape {
    std::vector<MatS> outputs;
  };

  Mlp() = default;

  Mlp(std::vector<int> sizes, std::vector<Activation> activations)
      : sizes_(std::move(sizes)), activations_(std::move(activations)) {
    if (sizes_.size() < 2 || activations_.size() != sizes_.size() - 1) {
      throw std::invalid_argument("Mlp: need >= 2 sizes and one activation per layer");
    }
    Eigen::Index total = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      if (sizes_[l] < 1 || sizes_[l + 1] < 1) throw std::invalid_argument("Mlp: empty layer");
      offsets_.push_back(total);
      total += static_cast<Eigen::Index>(sizes_[l + 1]) * (sizes_[l] + 1);
    }
    params_ = VecS::Zero(total);
  }

  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  int num_layers() const { return static_cast<int>(activations_.size()); }
  Eigen::Index num_params() const { return params_.size(); }
  const std::vector<int>& sizes() const { return sizes_; }
  const std::vector<Activation>& activations() const { return activations_; }

  VecS& params() { return params_; }
  const VecS& params() const { return params_; }

  bool same_shape(const Mlp& other) const {
    return sizes_ == other.sizes_ && activations_ == other.activations_;
  }

  Eigen::Map<MatS> weight(int l) {
    return {params_.data() + offsets_[l], sizes_[l + 1], sizes_[l]};
  }
  Eigen::Map<const MatS> weight(int l) const {
    return {params_.data() + offsets_[l], sizes_[l + 1], sizes_[l]};
  }
  Eigen::Map<VecS> bias(int l) {
    return {params_.data() + offsets_[l] + Eigen::Index(sizes_[l + 1]) * sizes_[l], sizes_[l + 1]};
  }
  Eigen::Map<const VecS> bias(int l) const {
    return {params_.data() + offsets_[l] + Eigen::Index(sizes_[l + 1]) * sizes_[l], sizes_[l + 1]};
  }

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for every layer; when
  // final_bound > 0 the last layer uses Uniform(-final_bound, final_bound).
  void init(Rng& rng, double final_bound = 0.0) {
    for (int l = 0; l < num_layers(); ++l) {
      double bound = 1.0 / std::sqrt(static_cast<double>(sizes_[l]));
      if (l == num_layers() - 1 && final_bound > 0.0) bound = final_bound;
      std::uniform_real_distribution<double> u(-bound, bound);
      auto w = weight(l);
      for (Eigen::Index j = 0; j < w.cols(); ++j)
        for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = static_cast<Scalar>(u(rng));
      auto b = bias(l);
      for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = static_cast<Scalar>(u(rng));
    }
  }

  MatS forward(const MatS& input) const {
    check_input(input);
    MatS x = input;
    for (int l = 0; l < num_layers(); ++l) {
      MatS z = weight(l) * x;
      z.colwise() += bias(l);
      activate(z, activations_[l]);
      x = std::move(z);
    }
    return x;
  }

  MatS forward(const MatS& input, Tape& tape) const {
    check_input(input);
    tape.outputs.clear();
    tape.outputs.push_back(input);
    for (int l = 0; l < num_layers(); ++l) {
      MatS z = weight(l) * tape.outputs.back();
      z.colwise() += bias(l);
      activate(z, activations_[l]);
      tape.outputs.push_back(std::move(z));
    }
    return tape.outputs.back();
  }

  // Given dL/d(output) for the taped batch, returns dL/d(params) in the flat
  // layout. If grad_input is non-null it receives dL/d(input).
  VecS backward(const Tape& tape, const MatS& grad_output, MatS* grad_input = nullptr) const {
    if (static_cast<int>(tape.outputs.size()) != num_layers() + 1) {
      throw std::invalid_argument("Mlp::backward: tape does not match network");
    }
    VecS grad = VecS::Zero(num_params());
    MatS delta = grad_output;
    for (int l = num_layers() - 1; l >= 0; --l) {
      apply_derivative(delta, tape.outputs[l + 1], activations_[l]);
      Eigen::Map<MatS> gw(grad.data() + offsets_[l], sizes_[l + 1], sizes_[l]);
      Eigen::Map<VecS> gb(grad.data() + offsets_[l] + Eigen::Index(sizes_[l + 1]) * sizes_[l],
                          sizes_[l + 1]);
      gw.noalias() = delta * tape.outputs[l].transpose();
      gb = delta.rowwise().sum();
      if (l > 0 || grad_input != nullptr) {
        MatS next = weight(l).transpose() * delta;
        delta = std::move(next);
      }
    }
    if (grad_input != nullptr) *grad_input = std::move(delta);
    return grad;
  }

  template <typename Other>
  Mlp<Other> cast() const {
    Mlp<Other> out(sizes_, activations_);
    out.params() = params_.template cast<Other>();
    return out;
  }

 private:
  void check_input(const MatS& input) const {
    if (input.rows() != input_size()) {
      throw std::invalid_argument("Mlp: input has " + std::to_string(input.rows()) +
                                  " rows, expected " + std::to_string(input_size()));
    }
  }

  static void activate(MatS& z, Activation a) {
    switch (a) {
      case Activation::identity: break;
      case Activation::tanh: z = z.array().tanh(); break;
      case Activation::sigmoid:
        z = (Scalar(1) + (-z.array()).exp()).inverse();
        break;
    }
  }

  // delta <- delta * f'(z), written in terms of y = f(z)
  static void apply_derivative(MatS& delta, const MatS& y, Activation a) {
    switch (a) {
      case Activation::identity: break;
      case Activation::tanh: delta.array() *= Scalar(1) - y.array().square(); break;
      case Activation::sigmoid: delta.array() *= y.array() * (Scalar(1) - y.array()); break;
    }
  }

  std::vector<int> sizes_;
  std::vector<Activation> activations_;
  std::vector<Eigen::Index> offsets_;
  VecS params_;
};

// Plain SGD or Adam over a flat parameter vector.
template <typename Scalar>
class Optimizer {
 public:
  Optimizer() = default;
  Optimizer(OptimizerKind kind, double lr, Eigen::Index n)
      : kind_(kind), lr_(lr), m_(Vec<Scalar>::Zero(n)), v_(Vec<Scalar>::Zero(n)) {}

  // Descends along `grad`.
  void step(Vec<Scalar>& params, const Vec<Scalar>& grad) {
    if (grad.size() != params.size() || params.size() != m_.size()) {
      throw std::invalid_argument("Optimizer::step: size mismatch");
    }
    const Scalar lr = static_cast<Scalar>(lr_);
    ++t_;
    if (kind_ == OptimizerKind::sgd) {
      params.noalias() -= lr * grad;
      return;
    }
    const Scalar b1 = Scalar(0.9), b2 = Scalar(0.999), eps = Scalar(1e-8);
    m_ = b1 * m_ + (Scalar(1) - b1) * grad;
    v_ = b2 * v_ + (Scalar(1) - b2) * grad.cwiseAbs2();
    const Scalar c1 = Scalar(1) - static_cast<Scalar>(std::pow(0.9, static_cast<double>(t_)));
    const Scalar c2 = Scalar(1) - static_cast<Scalar>(std::pow(0.999, static_cast<double>(t_)));
    params.array() -= lr * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps);
  }

  OptimizerKind kind() const { return kind_; }
  double learning_rate() const { return lr_; }
  long steps() const { return t_; }
  const Vec<Scalar>& first_moment() const { return m_; }
  const Vec<Scalar>& second_moment() const { return v_; }

  void restore(long steps, Vec<Scalar> m, Vec<Scalar> v) {
    t_ = steps;
    m_ = std::move(m);
    v_ = std::move(v);
  }

 private:
  OptimizerKind kind_ = OptimizerKind::adam;
  double lr_ = 1e-3;
  long t_ = 0;
  Vec<Scalar> m_;
  Vec<Scalar> v_;
};

}  // namespace dtvec
