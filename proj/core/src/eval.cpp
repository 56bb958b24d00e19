#include "wef/eval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wef/error.hpp"
#include "wef/metrics.hpp"

namespace wef {

std::string_view to_string(Model model) {
  switch (model) {
    case Model::Ensemble: return "ensemble";
    case Model::Ann: return "ann";
    case Model::Cart: return "cart";
    case Model::Gpr: return "gpr";
  }
  return "unknown";
}

std::string_view to_string(WeightMode mode) {
  return mode == WeightMode::Pooled ? "pooled" : "per-company";
}

bool EvalReport::all_companies_ok() const {
  return std::all_of(results.begin(), results.end(), [](const CompanyResult& r) { return r.ok; });
}

namespace {

constexpr std::size_t idx(Model m) { return static_cast<std::size_t>(m); }

ModelMetrics measure(std::span<const double> pred, std::span<const double> actual) {
  return {error_rate(pred, actual), mae(pred, actual), rmse(pred, actual)};
}

struct Pending {
  CompanyResult result;
  TrainedEnsemble trained;
};

void finish(Pending& p, const WeightVector& weights, double fitness, std::vector<CsIteration> history) {
  auto& r = p.result;
  auto& bundle = p.trained.bundle;
  bundle.weights = weights;
  bundle.validation_fitness = fitness;
  r.weights = weights;
  r.validation_fitness = fitness;
  r.cs_history = std::move(history);

  const auto& val = p.trained.validation;
  r.validation_rmse[idx(Model::Ensemble)] = ensemble_rmse(weights, val);
  r.validation_rmse[idx(Model::Ann)] = ensemble_rmse(WeightVector::corner(Learner::Ann), val);
  r.validation_rmse[idx(Model::Cart)] = ensemble_rmse(WeightVector::corner(Learner::Cart), val);
  r.validation_rmse[idx(Model::Gpr)] = ensemble_rmse(WeightVector::corner(Learner::Gpr), val);

  const auto& test = p.trained.data.test;
  const auto outputs = collect_outputs(bundle, test);
  r.actual = outputs.actual;
  r.predicted[idx(Model::Ensemble)] = combine_all(weights, outputs);
  r.predicted[idx(Model::Ann)] = outputs.ann;
  r.predicted[idx(Model::Cart)] = outputs.cart;
  r.predicted[idx(Model::Gpr)] = outputs.gpr;
  for (const auto& s : test) r.test_dates.push_back(s.anchor_date);
  for (auto m : kModels) {
    const auto& pred = r.predicted[idx(m)];
    if (!std::all_of(pred.begin(), pred.end(), [](double v) { return std::isfinite(v); })) {
      throw Error(ErrorKind::Validation, std::string(to_string(m)) + " produced non-finite test predictions");
    }
    r.test[idx(m)] = measure(pred, r.actual);
  }
  r.ok = true;
}

EnsembleParams params_for(const BenchmarkParams& params, std::size_t horizon, const std::string& symbol) {
  EnsembleParams ep = params.ensemble;
  ep.features = horizon == params.ensemble.features.horizon ? params.ensemble.features : params.weekly;
  if (params.nan_company && *params.nan_company == symbol) ep.nan_learner = params.nan_learner;
  if (ep.created.empty()) ep.created = "benchmark";
  return ep;
}

}  // namespace

EvalReport run_benchmark(const MarketPanel& panel, const BenchmarkParams& params) {
  EvalReport report;
  report.weight_mode = params.weight_mode;
  report.weights_forced = params.forced_weights.has_value();
  const std::array<std::size_t, 2> horizons{params.ensemble.features.horizon, params.weekly.horizon};

  for (auto horizon : horizons) {
    std::vector<Pending> pending;
    for (std::size_t c = 0; c < panel.companies.size(); ++c) {
      Pending p;
      p.result.company = panel.companies[c].symbol();
      p.result.horizon = horizon;
      try {
        p.trained = fit_learners(panel, c, params_for(params, horizon, p.result.company));
        p.result.train_size = p.trained.data.train.size();
        p.result.validation_size = p.trained.data.validation.size();
      } catch (const Error& e) {
        p.result.error = e.what();
      }
      pending.push_back(std::move(p));
    }

    auto fail = [](Pending& p, const std::exception& e) {
      p.result.ok = false;
      p.result.error = e.what();
    };

    if (params.forced_weights) {
      for (auto& p : pending) {
        if (!p.result.error.empty()) continue;
        try {
          finish(p, *params.forced_weights, ensemble_fitness(*params.forced_weights, p.trained.validation), {});
        } catch (const Error& e) {
          fail(p, e);
        }
      }
    } else if (params.weight_mode == WeightMode::Pooled) {
      LearnerOutputs pooled;
      for (auto& p : pending) {
        if (p.result.error.empty()) pooled.append(p.trained.validation);
      }
      try {
        const auto opt = optimize_weights(pooled, params.ensemble.cs);
        for (auto& p : pending) {
          if (!p.result.error.empty()) continue;
          try {
            finish(p, opt.weights, ensemble_fitness(opt.weights, p.trained.validation), opt.search.history);
          } catch (const Error& e) {
            fail(p, e);
          }
        }
      } catch (const Error& e) {
        for (auto& p : pending) {
          if (p.result.error.empty()) fail(p, e);
        }
      }
    } else {
      for (auto& p : pending) {
        if (!p.result.error.empty()) continue;
        try {
          auto opt = optimize_weights(p.trained.validation, params.ensemble.cs);
          finish(p, opt.weights, opt.fitness, std::move(opt.search.history));
        } catch (const Error& e) {
          fail(p, Error(e.kind(), std::string("weights: ") + e.what()));
        }
      }
    }

    for (auto& p : pending) report.results.push_back(std::move(p.result));
  }

  summarize(report);
  return report;
}

void summarize(EvalReport& report) {
  report.averages.clear();
  std::vector<std::size_t> horizons;
  for (const auto& r : report.results) {
    if (std::find(horizons.begin(), horizons.end(), r.horizon) == horizons.end()) horizons.push_back(r.horizon);
  }
  for (auto h : horizons) {
    HorizonSummary s;
    s.horizon = h;
    for (const auto& r : report.results) {
      if (r.horizon != h || !r.ok) continue;
      ++s.companies_ok;
      for (auto m : kModels) {
        s.average[idx(m)].error_rate += r.test[idx(m)].error_rate;
        s.average[idx(m)].mae += r.test[idx(m)].mae;
        s.average[idx(m)].rmse += r.test[idx(m)].rmse;
      }
    }
    if (s.companies_ok > 0) {
      const auto n = static_cast<double>(s.companies_ok);
      for (auto& m : s.average) {
        m.error_rate /= n;
        m.mae /= n;
        m.rmse /= n;
      }
    }
    report.averages.push_back(s);
  }

  std::ostringstream corner, identities;
  report.corner_dominance = {};
  report.metric_identities = {};
  for (const auto& r : report.results) {
    if (!r.ok) continue;
    const auto& v = r.validation_rmse;
    const double best_single = std::min({v[idx(Model::Ann)], v[idx(Model::Cart)], v[idx(Model::Gpr)]});
    if (!(v[idx(Model::Ensemble)] <= best_single)) {
      report.corner_dominance.passed = false;
      corner << r.company << "/h" << r.horizon << ' ';
    }
    for (auto m : kModels) {
      const auto& t = r.test[idx(m)];
      if (!(std::isfinite(t.rmse) && t.rmse >= t.mae && t.mae >= 0.0 && t.error_rate >= 0.0)) {
        report.metric_identities.passed = false;
        identities << r.company << "/h" << r.horizon << '/' << to_string(m) << ' ';
      }
    }
  }
  if (report.weights_forced || report.weight_mode == WeightMode::Pooled) {
    report.corner_dominance = {false, true,
                               report.weights_forced ? "weights were forced; gate not applicable"
                                                     : "pooled weights; per-company gate not applicable"};
  } else {
    report.corner_dominance.detail =
        report.corner_dominance.passed ? "ensemble validation RMSE <= best single learner everywhere"
                                       : "violations: " + corner.str();
  }
  report.metric_identities.detail = report.metric_identities.passed ? "rmse >= mae >= 0 everywhere"
                                                                    : "violations: " + identities.str();

  // Relative MAE increase from the first to the second horizon, per company.
  report.horizon_degradation = {false, true, "needs two horizons"};
  if (horizons.size() >= 2) {
    std::array<double, 4> increase{};
    std::size_t pairs = 0;
    for (const auto& d : report.results) {
      if (d.horizon != horizons[0] || !d.ok) continue;
      for (const auto& w : report.results) {
        if (w.horizon != horizons[1] || !w.ok || w.company != d.company) continue;
        for (auto m : kModels) {
          const double base = d.test[idx(m)].mae;
          increase[idx(m)] += base > 0.0 ? (w.test[idx(m)].mae - base) / base : 0.0;
        }
        ++pairs;
      }
    }
    if (pairs > 0) {
      for (auto& v : increase) v /= static_cast<double>(pairs);
      report.ensemble_mae_increase = increase[idx(Model::Ensemble)];
      report.worst_learner_mae_increase =
          std::max({increase[idx(Model::Ann)], increase[idx(Model::Cart)], increase[idx(Model::Gpr)]});
      const bool ok = report.ensemble_mae_increase < report.worst_learner_mae_increase;
      std::ostringstream msg;
      msg << "ensemble relative MAE increase " << report.ensemble_mae_increase << " vs worst learner "
          << report.worst_learner_mae_increase;
      report.horizon_degradation = {true, ok, msg.str()};
    }
  }
}

}  // namespace wef
