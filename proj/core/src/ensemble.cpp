#include "wef/ensemble.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <limits>

#include "wef/error.hpp"
#include "wef/metrics.hpp"

namespace wef {

std::string_view to_string(Learner learner) {
  switch (learner) {
    case Learner::Ann: return "ann";
    case Learner::Cart: return "cart";
    case Learner::Gpr: return "gpr";
  }
  return "unknown";
}

void WeightVector::validate() const {
  for (double w : {ann, cart, gpr}) {
    if (!(w >= 0.0 && w <= 1.0)) throw Error(ErrorKind::Validation, "weights must lie in [0, 1]");
  }
}

WeightVector WeightVector::corner(Learner learner) {
  return {learner == Learner::Ann ? 1.0 : 0.0, learner == Learner::Cart ? 1.0 : 0.0,
          learner == Learner::Gpr ? 1.0 : 0.0};
}

void LearnerOutputs::validate() const {
  if (ann.size() != actual.size() || cart.size() != actual.size() || gpr.size() != actual.size()) {
    throw Error(ErrorKind::DimensionMismatch, "learner output columns differ in length");
  }
}

void LearnerOutputs::append(const LearnerOutputs& other) {
  other.validate();
  ann.insert(ann.end(), other.ann.begin(), other.ann.end());
  cart.insert(cart.end(), other.cart.begin(), other.cart.end());
  gpr.insert(gpr.end(), other.gpr.begin(), other.gpr.end());
  actual.insert(actual.end(), other.actual.begin(), other.actual.end());
}

const std::vector<double>& LearnerOutputs::column(Learner learner) const {
  switch (learner) {
    case Learner::Ann: return ann;
    case Learner::Cart: return cart;
    case Learner::Gpr: return gpr;
  }
  return ann;
}

double combine(const WeightVector& weights, double ann, double cart, double gpr) {
  if (!weights.usable()) {
    throw Error(ErrorKind::DegenerateWeights, "weight sum below " + std::to_string(WeightVector::kMinSum));
  }
  return (weights.ann * ann + weights.cart * cart + weights.gpr * gpr) / weights.sum();
}

std::vector<double> combine_all(const WeightVector& weights, const LearnerOutputs& outputs) {
  outputs.validate();
  std::vector<double> out(outputs.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = combine(weights, outputs.ann[i], outputs.cart[i], outputs.gpr[i]);
  }
  return out;
}

double ensemble_rmse(const WeightVector& weights, const LearnerOutputs& outputs) {
  return rmse(combine_all(weights, outputs), outputs.actual);
}

double ensemble_fitness(const WeightVector& weights, const LearnerOutputs& outputs) {
  if (!weights.usable()) return 0.0;
  return 1.0 / (1.0 + ensemble_rmse(weights, outputs));
}

WeightOptimization optimize_weights(const LearnerOutputs& outputs, const CsParams& params) {
  outputs.validate();
  if (outputs.empty()) throw Error(ErrorKind::Validation, "weight optimisation needs outputs");

  auto to_weights = [](std::span<const double> x) { return WeightVector{x[0], x[1], x[2]}; };
  const std::vector<std::vector<double>> seeds{
      {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};

  WeightOptimization out;
  out.search = cs_optimize(
      [&](std::span<const double> x) { return ensemble_fitness(to_weights(x), outputs); },
      Box::unit(3), params, seeds);

  // Equal fitness can hide an RMSE difference of one ulp; settle corner ties
  // on RMSE so corner dominance holds exactly.
  out.weights = to_weights(out.search.best_solution);
  double best_rmse = ensemble_rmse(out.weights, outputs);
  for (auto learner : {Learner::Ann, Learner::Cart, Learner::Gpr}) {
    const auto corner = WeightVector::corner(learner);
    const double r = ensemble_rmse(corner, outputs);
    if (r < best_rmse) {
      best_rmse = r;
      out.weights = corner;
    }
  }
  out.fitness = ensemble_fitness(out.weights, outputs);
  return out;
}

PointForecast forecast(const EnsembleBundle& bundle, std::span<const double> raw_features) {
  const auto x = bundle.normalization.apply(raw_features);
  PointForecast f;
  f.ann = bundle.normalization.invert_target(bundle.ann.forward(x));
  f.cart = bundle.normalization.invert_target(bundle.cart.predict(x));
  f.gpr = bundle.normalization.invert_target(bundle.gpr.predict(x).mean);
  f.ensemble = combine(bundle.weights, f.ann, f.cart, f.gpr);
  return f;
}

double ensemble_predict(const EnsembleBundle& bundle, const FeatureSample& sample) {
  return forecast(bundle, sample.features).ensemble;
}

LearnerOutputs collect_outputs(const EnsembleBundle& bundle, const FeatureDataset& raw) {
  LearnerOutputs out;
  for (const auto& s : raw) {
    const auto x = bundle.normalization.apply(s.features);
    out.ann.push_back(bundle.normalization.invert_target(bundle.ann.forward(x)));
    out.cart.push_back(bundle.normalization.invert_target(bundle.cart.predict(x)));
    out.gpr.push_back(bundle.normalization.invert_target(bundle.gpr.predict(x).mean));
    out.actual.push_back(s.target);
  }
  return out;
}

std::string dataset_fingerprint(const FeatureDataset& data) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](const void* p, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  for (const auto& s : data) {
    mix(s.features.data(), s.features.size() * sizeof(double));
    mix(&s.target, sizeof(double));
    const auto days = s.anchor_date.time_since_epoch().count();
    mix(&days, sizeof(days));
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

TrainedEnsemble fit_learners(const MarketPanel& panel, std::size_t company,
                             const EnsembleParams& params) {
  TrainedEnsemble out;
  auto& bundle = out.bundle;
  bundle.features = params.features;

  FeatureDataset samples;
  try {
    samples = build_dataset(panel, company, params.features);
  } catch (const Error&) {
    rethrow_with_stage("features");
  }
  try {
    out.data = split(samples, params.split);
    if (out.data.train.empty()) throw Error(ErrorKind::Validation, "training block is empty");
  } catch (const Error&) {
    rethrow_with_stage("split");
  }

  bundle.normalization = Normalization::fit(out.data.train);
  const auto train = bundle.normalization.apply(out.data.train);
  const std::size_t dim = params.features.feature_count();

  try {
    bundle.ann = ann_train_lm(ann_init(dim, params.seed), train, params.lm).model;
  } catch (const Error&) {
    rethrow_with_stage("ann");
  }
  try {
    bundle.cart = cart_prune(cart_grow(train, params.cart), train, params.cart);
  } catch (const Error&) {
    rethrow_with_stage("cart");
  }
  try {
    // Targets live in [0, 1]; centring on 0.5 makes the zero-mean prior exact.
    bundle.gpr = params.gpr_grid_search ? gpr_fit_grid(train, params.kernel, GprGrid{}, 0.5)
                                        : gpr_fit(train, params.kernel, 0.5);
  } catch (const Error&) {
    rethrow_with_stage("gpr");
  }

  const auto& weighting = out.data.validation.empty() ? out.data.train : out.data.validation;
  out.validation = collect_outputs(bundle, weighting);
  if (params.nan_learner) {
    auto& col = *params.nan_learner == Learner::Ann    ? out.validation.ann
                : *params.nan_learner == Learner::Cart ? out.validation.cart
                                                       : out.validation.gpr;
    std::fill(col.begin(), col.end(), std::numeric_limits<double>::quiet_NaN());
  }

  FeatureDataset seen(out.data.train);
  seen.insert(seen.end(), out.data.validation.begin(), out.data.validation.end());
  bundle.provenance.seed = params.seed;
  bundle.provenance.company = panel.companies.at(company).symbol();
  bundle.provenance.data_fingerprint = dataset_fingerprint(seen);
  bundle.provenance.created = params.created.empty() ? utc_now() : params.created;
  return out;
}

TrainedEnsemble train_ensemble(const MarketPanel& panel, std::size_t company,
                               const EnsembleParams& params) {
  auto out = fit_learners(panel, company, params);
  try {
    auto opt = optimize_weights(out.validation, params.cs);
    out.bundle.weights = opt.weights;
    out.bundle.validation_fitness = opt.fitness;
    out.search = std::move(opt.search);
  } catch (const Error&) {
    rethrow_with_stage("weights");
  }
  return out;
}

}  // namespace wef
