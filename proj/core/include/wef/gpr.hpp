#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wef/dataset.hpp"

namespace wef {

// Isotropic squared-exponential kernel plus white noise.
struct KernelParams {
  double length_scale = 1.0;
  double signal_variance = 1.0;
  double noise_variance = 0.01;

  void validate() const;
  double operator()(std::span<const double> a, std::span<const double> b) const;

  friend bool operator==(const KernelParams&, const KernelParams&) = default;
};

struct GprPrediction {
  double mean = 0.0;
  double variance = 0.0;  // latent function variance, excludes noise
};

class GprModel {
 public:
  GprModel() = default;

  // Fits on `inputs` (rows are samples) and `targets`; the prior mean is the
  // constant `prior_mean`. Escalates diagonal jitter x10 from 1e-10 up to
  // 1e-4 before throwing ErrorKind::Fit.
  GprModel(Eigen::MatrixXd inputs, Eigen::VectorXd targets, KernelParams kernel,
           double prior_mean = 0.0);

  GprPrediction predict(std::span<const double> x) const;
  double log_marginal_likelihood() const;

  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(inputs_.cols()); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(inputs_.rows()); }
  const KernelParams& kernel() const noexcept { return kernel_; }
  double prior_mean() const noexcept { return prior_mean_; }
  double jitter() const noexcept { return jitter_; }
  const Eigen::MatrixXd& inputs() const noexcept { return inputs_; }
  const Eigen::VectorXd& targets() const noexcept { return targets_; }
  // Solves (K + noise I) alpha = targets - prior_mean.
  const Eigen::VectorXd& alpha() const noexcept { return alpha_; }

 private:
  Eigen::MatrixXd inputs_;
  Eigen::VectorXd targets_;
  KernelParams kernel_;
  double prior_mean_ = 0.0;
  double jitter_ = 0.0;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::VectorXd alpha_;
};

GprModel gpr_fit(const FeatureDataset& train, const KernelParams& params, double prior_mean = 0.0);

struct GprGrid {
  std::vector<double> length_scales{0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<double> noise_variances{1e-4, 1e-3, 1e-2, 1e-1};
};

// Fits every (length_scale, noise_variance) pair on the grid, keeping
// signal_variance from `base`, and returns the fit with the highest log
// marginal likelihood. Pairs whose factorization fails are skipped.
GprModel gpr_fit_grid(const FeatureDataset& train, const KernelParams& base, const GprGrid& grid,
                      double prior_mean = 0.0);

}  // namespace wef
