#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "wef/cuckoo.hpp"
#include "wef/ensemble.hpp"
#include "wef/features.hpp"
#include "wef/market_data.hpp"

namespace wef {

enum class Model { Ensemble = 0, Ann = 1, Cart = 2, Gpr = 3 };
inline constexpr std::array<Model, 4> kModels{Model::Ensemble, Model::Ann, Model::Cart, Model::Gpr};
std::string_view to_string(Model model);

struct ModelMetrics {
  double error_rate = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
};

using PerModel = std::array<ModelMetrics, 4>;

struct CompanyResult {
  std::string company;
  std::size_t horizon = 1;
  bool ok = false;
  std::string error;

  PerModel test{};
  std::array<double, 4> validation_rmse{};
  WeightVector weights;
  double validation_fitness = 0.0;
  std::size_t train_size = 0;
  std::size_t validation_size = 0;

  std::vector<Date> test_dates;
  std::vector<double> actual;
  std::array<std::vector<double>, 4> predicted;
  std::vector<CsIteration> cs_history;
};

struct HorizonSummary {
  std::size_t horizon = 1;
  std::size_t companies_ok = 0;
  PerModel average{};
};

struct GateResult {
  bool applicable = true;
  bool passed = true;
  std::string detail;
};

enum class WeightMode { PerCompany, Pooled };
std::string_view to_string(WeightMode mode);

struct EvalReport {
  WeightMode weight_mode = WeightMode::PerCompany;
  bool weights_forced = false;
  std::vector<CompanyResult> results;
  std::vector<HorizonSummary> averages;
  GateResult corner_dominance;
  GateResult metric_identities;
  // Soft: ensemble's mean relative MAE increase from daily to weekly is below
  // the worst single learner's.
  GateResult horizon_degradation;
  double ensemble_mae_increase = 0.0;
  double worst_learner_mae_increase = 0.0;

  bool all_companies_ok() const;
  bool hard_gates_passed() const { return corner_dominance.passed && metric_identities.passed; }
};

struct BenchmarkParams {
  EnsembleParams ensemble;  // ensemble.features is the daily configuration
  FeatureConfig weekly = FeatureConfig::weekly();
  WeightMode weight_mode = WeightMode::PerCompany;
  // Skips cuckoo search and uses these weights everywhere.
  std::optional<WeightVector> forced_weights;
  // Test hook: this company's named learner emits NaN validation outputs.
  std::optional<std::string> nan_company;
  Learner nan_learner = Learner::Ann;
};

// Train/evaluate every company at the daily and weekly horizons. A company
// that fails is recorded with ok == false; it never aborts the run.
EvalReport run_benchmark(const MarketPanel& panel, const BenchmarkParams& params);

// Averages over companies with ok results; also evaluates the gates.
void summarize(EvalReport& report);

}  // namespace wef
