#include "wef/gpr.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "wef/error.hpp"

namespace wef {

void KernelParams::validate() const {
  if (!(length_scale > 0.0 && signal_variance > 0.0 && noise_variance > 0.0)) {
    throw Error(ErrorKind::Validation, "gpr kernel parameters must be strictly positive");
  }
}

double KernelParams::operator()(std::span<const double> a, std::span<const double> b) const {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sq += d * d;
  }
  return signal_variance * std::exp(-sq / (2.0 * length_scale * length_scale));
}

namespace {

std::span<const double> row_span(const Eigen::MatrixXd& m, Eigen::Index r, std::vector<double>& buf) {
  buf.resize(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index c = 0; c < m.cols(); ++c) buf[static_cast<std::size_t>(c)] = m(r, c);
  return buf;
}

}  // namespace

GprModel::GprModel(Eigen::MatrixXd inputs, Eigen::VectorXd targets, KernelParams kernel,
                   double prior_mean)
    : inputs_(std::move(inputs)),
      targets_(std::move(targets)),
      kernel_(kernel),
      prior_mean_(prior_mean) {
  kernel_.validate();
  const Eigen::Index n = inputs_.rows();
  if (n == 0) throw Error(ErrorKind::Validation, "gpr training set is empty");
  if (targets_.size() != n) throw Error(ErrorKind::DimensionMismatch, "gpr inputs/targets differ in length");
  if (!inputs_.allFinite() || !targets_.allFinite()) {
    throw Error(ErrorKind::Validation, "gpr training data must be finite");
  }

  Eigen::MatrixXd gram(n, n);
  std::vector<double> a, b;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto xi = row_span(inputs_, i, a);
    gram(i, i) = kernel_.signal_variance;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double k = kernel_(xi, row_span(inputs_, j, b));
      gram(i, j) = k;
      gram(j, i) = k;
    }
  }
  gram.diagonal().array() += kernel_.noise_variance;

  chol_.compute(gram);
  for (double extra = 1e-10; chol_.info() != Eigen::Success; extra *= 10.0) {
    if (extra > 1e-4 * (1.0 + 1e-9)) {
      throw Error(ErrorKind::Fit,
                  "kernel matrix is not positive definite even with 1e-4 jitter; "
                  "increase noise_variance");
    }
    Eigen::MatrixXd jittered = gram;
    jittered.diagonal().array() += extra;
    chol_.compute(jittered);
    jitter_ = extra;
  }
  alpha_ = chol_.solve((targets_.array() - prior_mean_).matrix());
}

GprPrediction GprModel::predict(std::span<const double> x) const {
  if (x.size() != input_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "gpr expects " + std::to_string(input_dim()) +
                                                  " inputs, got " + std::to_string(x.size()));
  }
  const Eigen::Index n = inputs_.rows();
  Eigen::VectorXd k(n);
  std::vector<double> buf;
  for (Eigen::Index i = 0; i < n; ++i) k(i) = kernel_(x, row_span(inputs_, i, buf));
  GprPrediction out;
  out.mean = prior_mean_ + k.dot(alpha_);
  const Eigen::VectorXd v = chol_.matrixL().solve(k);
  out.variance = std::max(0.0, kernel_.signal_variance - v.squaredNorm());
  return out;
}

double GprModel::log_marginal_likelihood() const {
  const Eigen::VectorXd centred = (targets_.array() - prior_mean_).matrix();
  const auto n = static_cast<double>(targets_.size());
  const double log_det = 2.0 * chol_.matrixLLT().diagonal().array().log().sum();
  return -0.5 * centred.dot(alpha_) - 0.5 * log_det - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

namespace {

std::pair<Eigen::MatrixXd, Eigen::VectorXd> to_matrix(const FeatureDataset& train) {
  if (train.empty()) throw Error(ErrorKind::Validation, "gpr training set is empty");
  const auto n = static_cast<Eigen::Index>(train.size());
  const auto d = static_cast<Eigen::Index>(train.front().features.size());
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = train[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(s.features.size()) != d) {
      throw Error(ErrorKind::DimensionMismatch, "ragged gpr training set");
    }
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = s.features[static_cast<std::size_t>(j)];
    y(i) = s.target;
  }
  return {std::move(x), std::move(y)};
}

}  // namespace

GprModel gpr_fit(const FeatureDataset& train, const KernelParams& params, double prior_mean) {
  auto [x, y] = to_matrix(train);
  return GprModel(std::move(x), std::move(y), params, prior_mean);
}

GprModel gpr_fit_grid(const FeatureDataset& train, const KernelParams& base, const GprGrid& grid,
                      double prior_mean) {
  auto [x, y] = to_matrix(train);
  std::optional<GprModel> best;
  double best_lml = -std::numeric_limits<double>::infinity();
  for (double ell : grid.length_scales) {
    for (double noise : grid.noise_variances) {
      KernelParams p = base;
      p.length_scale = ell;
      p.noise_variance = noise;
      try {
        GprModel m(x, y, p, prior_mean);
        const double lml = m.log_marginal_likelihood();
        if (!best || lml > best_lml) {
          best_lml = lml;
          best = std::move(m);
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Fit) throw;
      }
    }
  }
  if (!best) throw Error(ErrorKind::Fit, "no grid point produced a positive definite kernel matrix");
  return std::move(*best);
}

}  // namespace wef
