#ifndef MOEPGG_MLP_HPP
#define MOEPGG_MLP_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <vector>

namespace moepgg {

/// Fully connected network, ReLU between layers and identity at the output.
/// Batches are column-major: one sample per column.
template <typename Scalar>
class Mlp {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  struct Gradients {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;
  };

  /// Intermediate values of one forward pass, needed by backward().
  struct Cache {
    std::vector<Matrix> inputs;       // input of each layer
    std::vector<Matrix> activations;  // pre-activation of each layer
  };

  Mlp() = default;

  /// Zero-initialised network with the given layer widths (input first).
  explicit Mlp(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
    if (sizes_.size() < 2) throw std::invalid_argument("Mlp: need at least input and output sizes");
    for (int s : sizes_)
      if (s <= 0) throw std::invalid_argument("Mlp: layer sizes must be positive");
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      weights_.push_back(Matrix::Zero(sizes_[l + 1], sizes_[l]));
      biases_.push_back(Vector::Zero(sizes_[l + 1]));
    }
  }

  /// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] for weights and biases.
  template <typename Rng>
  void init_uniform(Rng& rng) {
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      const Scalar bound = Scalar(1) / std::sqrt(Scalar(sizes_[l]));
      std::uniform_real_distribution<Scalar> dist(-bound, bound);
      for (Eigen::Index k = 0; k < weights_[l].size(); ++k) weights_[l](k) = dist(rng);
      for (Eigen::Index k = 0; k < biases_[l].size(); ++k) biases_[l](k) = dist(rng);
    }
  }

  const std::vector<int>& layer_sizes() const { return sizes_; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  std::size_t num_layers() const { return weights_.size(); }

  std::vector<Matrix>& weights() { return weights_; }
  const std::vector<Matrix>& weights() const { return weights_; }
  std::vector<Vector>& biases() { return biases_; }
  const std::vector<Vector>& biases() const { return biases_; }

  template <typename Derived>
  Matrix forward(const Eigen::MatrixBase<Derived>& x) const {
    check_input(x.rows());
    Matrix h = x;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      Matrix z = (weights_[l] * h).colwise() + biases_[l];
      if (l + 1 < weights_.size()) z = z.cwiseMax(Scalar(0));
      h = std::move(z);
    }
    return h;
  }

  template <typename Derived>
  Matrix forward(const Eigen::MatrixBase<Derived>& x, Cache& cache) const {
    check_input(x.rows());
    cache.inputs.clear();
    cache.activations.clear();
    Matrix h = x;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      cache.inputs.push_back(h);
      Matrix z = (weights_[l] * h).colwise() + biases_[l];
      cache.activations.push_back(z);
      h = (l + 1 < weights_.size()) ? Matrix(z.cwiseMax(Scalar(0))) : z;
    }
    return h;
  }

  /// Gradients of a loss given dL/d(output) for the cached batch.
  Gradients backward(const Cache& cache, const Matrix& output_grad) const {
    Gradients g;
    g.weights.resize(weights_.size());
    g.biases.resize(weights_.size());
    Matrix delta = output_grad;
    for (std::size_t l = weights_.size(); l-- > 0;) {
      if (l + 1 < weights_.size())
        delta = delta.cwiseProduct((cache.activations[l].array() > Scalar(0)).matrix().template cast<Scalar>());
      g.weights[l] = delta * cache.inputs[l].transpose();
      g.biases[l] = delta.rowwise().sum();
      if (l > 0) delta = weights_[l].transpose() * delta;
    }
    return g;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l)
      n += static_cast<std::size_t>(weights_[l].size() + biases_[l].size());
    return n;
  }

  /// Flat parameter vector: per layer, weights (column-major) then biases.
  Vector parameters() const {
    Vector out(static_cast<Eigen::Index>(parameter_count()));
    Eigen::Index at = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      out.segment(at, weights_[l].size()) = weights_[l].reshaped();
      at += weights_[l].size();
      out.segment(at, biases_[l].size()) = biases_[l];
      at += biases_[l].size();
    }
    return out;
  }

  void set_parameters(const Vector& flat) {
    if (static_cast<std::size_t>(flat.size()) != parameter_count())
      throw std::invalid_argument("Mlp::set_parameters: size mismatch");
    Eigen::Index at = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      weights_[l].reshaped() = flat.segment(at, weights_[l].size());
      at += weights_[l].size();
      biases_[l] = flat.segment(at, biases_[l].size());
      at += biases_[l].size();
    }
  }

  static Vector flatten(const Gradients& g) {
    Eigen::Index n = 0;
    for (std::size_t l = 0; l < g.weights.size(); ++l) n += g.weights[l].size() + g.biases[l].size();
    Vector out(n);
    Eigen::Index at = 0;
    for (std::size_t l = 0; l < g.weights.size(); ++l) {
      out.segment(at, g.weights[l].size()) = g.weights[l].reshaped();
      at += g.weights[l].size();
      out.segment(at, g.biases[l].size()) = g.biases[l];
      at += g.biases[l].size();
    }
    return out;
  }

  bool operator==(const Mlp& o) const {
    if (sizes_ != o.sizes_) return false;
    for (std::size_t l = 0; l < weights_.size(); ++l)
      if (weights_[l] != o.weights_[l] || biases_[l] != o.biases_[l]) return false;
    return true;
  }

 private:
  void check_input(Eigen::Index rows) const {
    if (rows != sizes_.front()) throw std::invalid_argument("Mlp::forward: input dimension mismatch");
  }

  std::vector<int> sizes_;
  std::vector<Matrix> weights_;
  std::vector<Vector> biases_;
};

/// RMSprop: v <- rho v + (1 - rho) g^2;  theta <- theta - lr g / (sqrt(v) + eps).
template <typename Scalar>
class RmsProp {
 public:
  using Vector = typename Mlp<Scalar>::Vector;

  RmsProp() = default;
  RmsProp(std::size_t parameter_count, Scalar learning_rate, Scalar smoothing = Scalar(0.99),
          Scalar epsilon = Scalar(1e-8))
      : lr_(learning_rate), rho_(smoothing), eps_(epsilon),
        square_avg_(Vector::Zero(static_cast<Eigen::Index>(parameter_count))) {}

  void step(Mlp<Scalar>& net, const typename Mlp<Scalar>::Gradients& grads) {
    const Vector g = Mlp<Scalar>::flatten(grads);
    if (g.size() != square_avg_.size()) throw std::invalid_argument("RmsProp::step: size mismatch");
    square_avg_ = rho_ * square_avg_ + (Scalar(1) - rho_) * g.cwiseAbs2();
    const Vector update = g.cwiseQuotient((square_avg_.cwiseSqrt().array() + eps_).matrix());
    net.set_parameters(net.parameters() - lr_ * update);
  }

  Scalar learning_rate() const { return lr_; }
  Scalar smoothing() const { return rho_; }
  Scalar epsilon() const { return eps_; }
  const Vector& square_avg() const { return square_avg_; }
  Vector& square_avg() { return square_avg_; }

 private:
  Scalar lr_ = Scalar(0.001);
  Scalar rho_ = Scalar(0.99);
  Scalar eps_ = Scalar(1e-8);
  Vector square_avg_;
};

}  // namespace moepgg

#endif  // MOEPGG_MLP_HPP
