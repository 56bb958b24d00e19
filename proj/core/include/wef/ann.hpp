#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wef/dataset.hpp"

namespace wef {

// Levenberg-Marquardt schedule. Damping falls by mu_down after an accepted
// step and rises by mu_up after a rejected one.
struct LmParams {
  double mu_init = 1e-3;
  double mu_up = 10.0;
  double mu_down = 0.1;
  std::size_t max_epochs = 200;
  double gradient_tol = 1e-7;
  double mu_max = 1e10;

  void validate() const;
};

// input -> 10 logsig -> 7 logsig -> 1 linear.
class AnnModel {
 public:
  static constexpr std::size_t kHidden1 = 10;
  static constexpr std::size_t kHidden2 = 7;

  AnnModel() = default;
  // All weights and biases zero.
  explicit AnnModel(std::size_t input_dim, std::uint64_t seed = 0);

  std::size_t input_dim() const noexcept { return input_dim_; }
  std::uint64_t seed() const noexcept { return seed_; }
  static std::size_t parameter_count(std::size_t input_dim) noexcept {
    return kHidden1 * (input_dim + 1) + kHidden2 * (kHidden1 + 1) + kHidden2 + 1;
  }
  std::size_t parameter_count() const noexcept { return parameter_count(input_dim_); }

  // Flattened as [W1 (col-major), b1, W2, b2, w3, b3].
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::Ref<const Eigen::VectorXd>& theta);

  double forward(std::span<const double> x) const;

  struct Trace {
    Eigen::VectorXd hidden1;
    Eigen::VectorXd hidden2;
    double output = 0.0;
  };
  Trace forward_trace(std::span<const double> x) const;

  // d output / d parameters, in parameters() order.
  Eigen::VectorXd output_gradient(std::span<const double> x) const;

  Eigen::MatrixXd w1, w2;   // 10 x d, 7 x 10
  Eigen::VectorXd b1, b2;   // 10, 7
  Eigen::RowVectorXd w3;    // 1 x 7
  double b3 = 0.0;

  friend bool operator==(const AnnModel& a, const AnnModel& b) {
    return a.input_dim_ == b.input_dim_ && a.seed_ == b.seed_ && a.w1 == b.w1 && a.w2 == b.w2 &&
           a.b1 == b.b1 && a.b2 == b.b2 && a.w3 == b.w3 && a.b3 == b.b3;
  }

 private:
  void check_input(std::span<const double> x) const;

  std::size_t input_dim_ = 0;
  std::uint64_t seed_ = 0;
};

// Weights uniform in [-0.5, 0.5], deterministic per seed.
AnnModel ann_init(std::size_t input_dim, std::uint64_t seed);

enum class LmStop { MaxEpochs, GradientTolerance, DampingLimit };

struct LmResult {
  AnnModel model;
  std::vector<double> mse_trace;  // training MSE after each accepted epoch
  LmStop stop = LmStop::MaxEpochs;
};

// Full-batch LM on squared error. Throws TrainingDiverged when the starting
// loss is not finite.
LmResult ann_train_lm(const AnnModel& model, const FeatureDataset& train, const LmParams& params);

}  // namespace wef
