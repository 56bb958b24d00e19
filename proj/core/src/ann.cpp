#include "wef/ann.hpp"

#include <cmath>
#include <random>

#include "wef/error.hpp"

namespace wef {

namespace {

double logsig(double z) { return 1.0 / (1.0 + std::exp(-z)); }

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> x) {
  return {x.data(), static_cast<Eigen::Index>(x.size())};
}

}  // namespace

void LmParams::validate() const {
  if (!(mu_init > 0.0 && mu_up > 1.0 && mu_down > 0.0 && mu_down < 1.0 && gradient_tol > 0.0 &&
        mu_max > 0.0)) {
    throw Error(ErrorKind::Validation, "lm: need positive params with mu_down < 1 < mu_up");
  }
}

AnnModel::AnnModel(std::size_t input_dim, std::uint64_t seed)
    : w1(Eigen::MatrixXd::Zero(kHidden1, static_cast<Eigen::Index>(input_dim))),
      w2(Eigen::MatrixXd::Zero(kHidden2, kHidden1)),
      b1(Eigen::VectorXd::Zero(kHidden1)),
      b2(Eigen::VectorXd::Zero(kHidden2)),
      w3(Eigen::RowVectorXd::Zero(kHidden2)),
      input_dim_(input_dim),
      seed_(seed) {
  if (input_dim < 1) throw Error(ErrorKind::Validation, "ann input_dim must be >= 1");
}

Eigen::VectorXd AnnModel::parameters() const {
  Eigen::VectorXd theta(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index at = 0;
  auto put = [&](const auto& m) {
    theta.segment(at, m.size()) = Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
    at += m.size();
  };
  put(w1);
  put(b1);
  put(w2);
  put(b2);
  put(w3);
  theta(at) = b3;
  return theta;
}

void AnnModel::set_parameters(const Eigen::Ref<const Eigen::VectorXd>& theta) {
  if (theta.size() != static_cast<Eigen::Index>(parameter_count())) {
    throw Error(ErrorKind::DimensionMismatch, "ann parameter vector has wrong length");
  }
  Eigen::Index at = 0;
  auto get = [&](auto& m) {
    Eigen::Map<Eigen::VectorXd>(m.data(), m.size()) = theta.segment(at, m.size());
    at += m.size();
  };
  get(w1);
  get(b1);
  get(w2);
  get(b2);
  get(w3);
  b3 = theta(at);
}

void AnnModel::check_input(std::span<const double> x) const {
  if (x.size() != input_dim_) {
    throw Error(ErrorKind::DimensionMismatch, "ann expects " + std::to_string(input_dim_) +
                                                  " inputs, got " + std::to_string(x.size()));
  }
}

AnnModel::Trace AnnModel::forward_trace(std::span<const double> x) const {
  check_input(x);
  Trace t;
  t.hidden1 = (w1 * as_vector(x) + b1).unaryExpr(&logsig);
  t.hidden2 = (w2 * t.hidden1 + b2).unaryExpr(&logsig);
  t.output = w3.dot(t.hidden2) + b3;
  return t;
}

double AnnModel::forward(std::span<const double> x) const { return forward_trace(x).output; }

Eigen::VectorXd AnnModel::output_gradient(std::span<const double> x) const {
  const auto t = forward_trace(x);
  const Eigen::VectorXd delta2 = w3.transpose().cwiseProduct(
      t.hidden2.cwiseProduct(Eigen::VectorXd::Ones(kHidden2) - t.hidden2));
  const Eigen::VectorXd delta1 = (w2.transpose() * delta2)
                                     .cwiseProduct(t.hidden1.cwiseProduct(
                                         Eigen::VectorXd::Ones(kHidden1) - t.hidden1));

  Eigen::VectorXd g(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index at = 0;
  const Eigen::MatrixXd gw1 = delta1 * as_vector(x).transpose();
  g.segment(at, gw1.size()) = Eigen::Map<const Eigen::VectorXd>(gw1.data(), gw1.size());
  at += gw1.size();
  g.segment(at, kHidden1) = delta1;
  at += kHidden1;
  const Eigen::MatrixXd gw2 = delta2 * t.hidden1.transpose();
  g.segment(at, gw2.size()) = Eigen::Map<const Eigen::VectorXd>(gw2.data(), gw2.size());
  at += gw2.size();
  g.segment(at, kHidden2) = delta2;
  at += kHidden2;
  g.segment(at, kHidden2) = t.hidden2;
  at += kHidden2;
  g(at) = 1.0;
  return g;
}

AnnModel ann_init(std::size_t input_dim, std::uint64_t seed) {
  AnnModel model(input_dim, seed);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  Eigen::VectorXd theta(static_cast<Eigen::Index>(model.parameter_count()));
  for (auto& v : theta) v = dist(rng);
  model.set_parameters(theta);
  return model;
}

namespace {

double dataset_mse(const AnnModel& model, const FeatureDataset& data) {
  double sum = 0.0;
  for (const auto& s : data) {
    const double e = s.target - model.forward(s.features);
    sum += e * e;
  }
  return sum / static_cast<double>(data.size());
}

}  // namespace

LmResult ann_train_lm(const AnnModel& model, const FeatureDataset& train, const LmParams& params) {
  params.validate();
  if (train.empty()) throw Error(ErrorKind::Validation, "ann training set is empty");

  LmResult result{model, {}, LmStop::MaxEpochs};
  if (params.max_epochs == 0) return result;

  const auto n = static_cast<Eigen::Index>(train.size());
  const auto p = static_cast<Eigen::Index>(model.parameter_count());
  AnnModel current = model;
  AnnModel trial = model;
  double mse = dataset_mse(current, train);
  if (!std::isfinite(mse)) throw Error(ErrorKind::TrainingDiverged, "initial ann loss is not finite");

  double mu = params.mu_init;
  Eigen::MatrixXd jac(n, p);
  Eigen::VectorXd err(n);

  for (std::size_t epoch = 0; epoch < params.max_epochs; ++epoch) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& s = train[static_cast<std::size_t>(i)];
      jac.row(i) = current.output_gradient(s.features).transpose();
      err(i) = s.target - current.forward(s.features);
    }
    const Eigen::VectorXd grad = jac.transpose() * err;
    if (grad.lpNorm<Eigen::Infinity>() < params.gradient_tol) {
      result.stop = LmStop::GradientTolerance;
      break;
    }
    Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(p, p);
    normal.selfadjointView<Eigen::Lower>().rankUpdate(jac.transpose());
    normal.triangularView<Eigen::StrictlyUpper>() = normal.transpose();

    const Eigen::VectorXd theta = current.parameters();
    bool accepted = false;
    while (mu <= params.mu_max) {
      Eigen::MatrixXd damped = normal;
      damped.diagonal().array() += mu;
      const Eigen::VectorXd step = damped.ldlt().solve(grad);
      trial.set_parameters(theta + step);
      const double trial_mse = dataset_mse(trial, train);
      if (std::isfinite(trial_mse) && trial_mse <= mse) {
        current = trial;
        mse = trial_mse;
        mu = std::max(mu * params.mu_down, 1e-20);
        accepted = true;
        break;
      }
      mu *= params.mu_up;
    }
    if (!accepted) {
      result.stop = LmStop::DampingLimit;
      break;
    }
    result.mse_trace.push_back(mse);
  }
  result.model = std::move(current);
  return result;
}

}  // namespace wef
