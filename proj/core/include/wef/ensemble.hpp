#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wef/ann.hpp"
#include "wef/cart.hpp"
#include "wef/cuckoo.hpp"
#include "wef/features.hpp"
#include "wef/gpr.hpp"
#include "wef/market_data.hpp"

namespace wef {

enum class Learner { Ann, Cart, Gpr };
std::string_view to_string(Learner learner);

// Combination weights <a, b, c> for ANN, CART and GPR.
struct WeightVector {
  static constexpr double kMinSum = 1e-6;

  double ann = 1.0;
  double cart = 1.0;
  double gpr = 1.0;

  double sum() const noexcept { return ann + cart + gpr; }
  bool usable() const noexcept { return sum() >= kMinSum; }
  // Each component in [0, 1].
  void validate() const;

  static WeightVector corner(Learner learner);
  friend bool operator==(const WeightVector&, const WeightVector&) = default;
};

// Per-sample learner predictions and the realised price, all in price units.
struct LearnerOutputs {
  std::vector<double> ann;
  std::vector<double> cart;
  std::vector<double> gpr;
  std::vector<double> actual;

  std::size_t size() const noexcept { return actual.size(); }
  bool empty() const noexcept { return actual.empty(); }
  void validate() const;
  void append(const LearnerOutputs& other);
  const std::vector<double>& column(Learner learner) const;
};

// (a w + b x + c y) / (a + b + c). Throws DegenerateWeights below kMinSum.
double combine(const WeightVector& weights, double ann, double cart, double gpr);
std::vector<double> combine_all(const WeightVector& weights, const LearnerOutputs& outputs);

// RMSE of the combined prediction against `actual`.
double ensemble_rmse(const WeightVector& weights, const LearnerOutputs& outputs);
// 1 / (1 + RMSE); 0 for degenerate weights.
double ensemble_fitness(const WeightVector& weights, const LearnerOutputs& outputs);

struct WeightOptimization {
  WeightVector weights;
  double fitness = 0.0;
  CsResult search;
};

// Cuckoo search over [0, 1]^3 whose first four nests are the three corners and
// the uniform vector, so the result is never worse than any single learner.
WeightOptimization optimize_weights(const LearnerOutputs& outputs, const CsParams& params);

struct Provenance {
  std::uint64_t seed = 0;
  std::string company;
  std::string data_fingerprint;
  std::string created;
};

struct EnsembleBundle {
  FeatureConfig features;
  Normalization normalization;
  AnnModel ann;
  CartModel cart;
  GprModel gpr;
  WeightVector weights;
  double validation_fitness = 0.0;
  Provenance provenance;
};

struct EnsembleParams {
  FeatureConfig features;
  SplitSpec split;
  LmParams lm;
  CartParams cart;
  KernelParams kernel;
  bool gpr_grid_search = false;
  CsParams cs;
  std::uint64_t seed = 0;  // ANN initialisation
  // Fixed provenance timestamp; empty means the current UTC time.
  std::string created;
  // Test hook: this learner reports NaN for every validation sample.
  std::optional<Learner> nan_learner;
};

struct PointForecast {
  double ann = 0.0;
  double cart = 0.0;
  double gpr = 0.0;
  double ensemble = 0.0;
};

// Normalizes raw features, queries each learner, denormalizes to price units
// and applies the bundle weights.
PointForecast forecast(const EnsembleBundle& bundle, std::span<const double> raw_features);
double ensemble_predict(const EnsembleBundle& bundle, const FeatureSample& sample);

// Price-unit learner outputs over raw (un-normalized) samples.
LearnerOutputs collect_outputs(const EnsembleBundle& bundle, const FeatureDataset& raw);

struct TrainedEnsemble {
  EnsembleBundle bundle;
  DatasetSplit data;          // raw samples
  LearnerOutputs validation;  // outputs the weights were fitted on
  CsResult search;
};

// Dataset, split, normalization and the three learners; weights left at
// (1, 1, 1) and validation outputs collected for a later weighting step.
TrainedEnsemble fit_learners(const MarketPanel& panel, std::size_t company,
                             const EnsembleParams& params);

// fit_learners followed by a single optimize_weights pass on the validation
// outputs (training outputs when validation_fraction is 0).
TrainedEnsemble train_ensemble(const MarketPanel& panel, std::size_t company,
                               const EnsembleParams& params);

// FNV-1a over the sample bytes, as 16 hex digits.
std::string dataset_fingerprint(const FeatureDataset& data);

}  // namespace wef
