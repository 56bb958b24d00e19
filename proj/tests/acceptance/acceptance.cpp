// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// when any hard criterion fails; soft criteria print WARN instead.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "run_config.hpp"
#include "wef/ann.hpp"
#include "wef/cart.hpp"
#include "wef/cuckoo.hpp"
#include "wef/ensemble.hpp"
#include "wef/eval.hpp"
#include "wef/features.hpp"
#include "wef/gpr.hpp"
#include "wef/report.hpp"

namespace {

using namespace wef;
using Clock = std::chrono::steady_clock;

// Tolerances.
constexpr double kCombineTol = 1e-4;
constexpr double kCombineMaxSeconds = 1e-3;
constexpr double kCovarianceTol = 1e-12;
constexpr double kGridSlack = 1e-3;
constexpr double kCsRadius = 1e-2;
constexpr int kCsRuns = 30;
constexpr int kCsRequired = 27;
constexpr double kJacobianRelTol = 1e-4;
constexpr double kRampMse = 1e-3;
constexpr double kGprTol = 1e-8;
constexpr double kInterpolationTol = 1e-4;
constexpr double kBenchmarkMaxSeconds = 600.0;

int hard_failures = 0;

void report(const std::string& name, bool ok, const std::string& detail, bool soft = false) {
  const char* tag = ok ? "PASS" : soft ? "WARN" : "FAIL";
  if (!ok && !soft) ++hard_failures;
  std::cout << tag << "  " << name << "  " << detail << std::endl;
}

template <typename F>
void guarded(const std::string& name, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(name, false, std::string("exception: ") + e.what());
  }
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void combine_fixture() {
  const WeightVector w{0.876, 0.915, 0.131};
  const auto t0 = Clock::now();
  const double got = combine(w, 100.0, 200.0, 300.0);
  const double elapsed = seconds_since(t0);
  const double oracle = (0.876 * 100.0 + 0.915 * 200.0 + 0.131 * 300.0) / (0.876 + 0.915 + 0.131);
  const bool ok = std::abs(got - 161.2383) <= kCombineTol && std::abs(got - oracle) <= 1e-12 &&
                  elapsed < kCombineMaxSeconds;
  report("combine-fixture", ok, "value " + fmt(got) + " oracle " + fmt(oracle) + " in " + fmt(elapsed * 1e3) + " ms");
}

void fitness_fixture() {
  bool ok = true;
  std::string detail;
  for (double r : {0.0, 1.0, 3.0}) {
    LearnerOutputs o;
    o.actual = {10.0, 20.0, 30.0, 40.0};
    for (double a : o.actual) o.ann.push_back(a + r);
    o.cart = o.gpr = o.ann;
    const double f = ensemble_fitness({1.0, 1.0, 1.0}, o);
    const double want = 1.0 / (1.0 + r);
    ok = ok && f == want;
    detail += "rmse " + fmt(r) + " -> " + fmt(f) + "; ";
  }
  report("fitness-fixture", ok, detail);
}

void covariance_fixture() {
  std::vector<double> x(14);
  for (int i = 0; i < 14; ++i) x[static_cast<std::size_t>(i)] = i + 1.0;
  double m = 0.0, s = 0.0;
  for (double v : x) m += v / 14.0;
  for (double v : x) s += (v - m) * (v - m);
  const double got = window_covariance(x, x);
  report("covariance-fixture", std::abs(got - 17.5) <= kCovarianceTol && std::abs(got - s / 13.0) <= kCovarianceTol,
         "value " + fmt(got));
}

void rsi_fixture() {
  std::vector<double> mixed{10.0}, up{10.0}, down{30.0};
  for (int i = 0; i < 7; ++i) mixed.push_back(mixed.back() + 1.0);
  for (int i = 0; i < 7; ++i) mixed.push_back(mixed.back() - 1.0);
  for (int i = 0; i < 14; ++i) {
    up.push_back(up.back() + 1.0);
    down.push_back(down.back() - 1.0);
  }
  const double a = rsi(mixed), b = rsi(up), c = rsi(down);
  report("rsi-fixture", a == 50.0 && b == 100.0 && c == 0.0, fmt(a) + " / " + fmt(b) + " / " + fmt(c));
}

void gini_fixture() {
  const double a = gini_impurity(std::vector<double>{1.0, 0.0});
  const double b = gini_impurity(std::vector<double>{0.5, 0.5});
  const double c = gini_impurity(std::vector<double>{0.25, 0.25, 0.25, 0.25});
  report("gini-fixture", a == 0.0 && b == 0.5 && c == 0.75, fmt(a) + " / " + fmt(b) + " / " + fmt(c));
}

void benchmark_criteria() {
  cli::RunConfig config;
  config.apply_seed(config.seed);
  const auto panel = generate_synth_market(config.synth);

  const auto t0 = Clock::now();
  const auto first = run_benchmark(panel, config.bench);
  const double elapsed = seconds_since(t0);

  bool ok = first.all_companies_ok() && first.results.size() == 20;
  std::size_t checked = 0, ties = 0;
  for (const auto& r : first.results) {
    if (!r.ok) continue;
    const double best = std::min({r.validation_rmse[1], r.validation_rmse[2], r.validation_rmse[3]});
    ok = ok && r.validation_rmse[0] <= best;
    ties += r.validation_rmse[0] == best;
    ++checked;
  }
  ok = ok && elapsed < kBenchmarkMaxSeconds && panel.companies.size() == 10 && panel.market_index.size() == 503;
  report("corner-dominance", ok,
         std::to_string(checked) + " company/horizon pairs, " + std::to_string(ties) +
             " at a corner, full benchmark " + fmt(elapsed) + " s");

  const auto second = run_benchmark(panel, config.bench);
  const auto a = report_to_json(first), b = report_to_json(second);
  report("pipeline-determinism", a == b, "report.json " + std::to_string(a.size()) + " bytes, identical: " + (a == b ? "yes" : "no"));

  const bool echo = first.horizon_degradation.passed;
  report("horizon-degradation-echo", echo,
         "ensemble relative MAE increase " + fmt(first.ensemble_mae_increase) + " vs worst learner " +
             fmt(first.worst_learner_mae_increase) + " (soft)",
         true);
}

LearnerOutputs grid_fixture(std::uint64_t seed, std::array<double, 3> noise, std::array<double, 3> bias) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  LearnerOutputs o;
  double price = 150.0;
  for (int i = 0; i < 81; ++i) {
    price *= std::exp(0.012 * z(rng));
    o.actual.push_back(price);
    o.ann.push_back(price + bias[0] + noise[0] * z(rng));
    o.cart.push_back(price + bias[1] + noise[1] * z(rng));
    o.gpr.push_back(price + bias[2] + noise[2] * z(rng));
  }
  return o;
}

void grid_oracle() {
  const std::vector<LearnerOutputs> fixtures{
      grid_fixture(1, {2.0, 3.0, 2.5}, {1.5, -2.0, 0.3}),
      grid_fixture(2, {1.0, 1.0, 4.0}, {0.0, 0.0, 0.0}),
      grid_fixture(3, {5.0, 0.8, 1.2}, {-3.0, 0.5, 2.0}),
      grid_fixture(4, {1.5, 1.5, 1.5}, {2.0, -2.0, 0.0}),
  };
  bool ok = true;
  double worst_gap = -1e300;
  for (std::size_t f = 0; f < fixtures.size(); ++f) {
    double grid_best = 0.0;
    for (int i = 0; i <= 20; ++i)
      for (int j = 0; j <= 20; ++j)
        for (int k = 0; k <= 20; ++k)
          grid_best = std::max(grid_best, ensemble_fitness({i * 0.05, j * 0.05, k * 0.05}, fixtures[f]));
    CsParams p;
    p.seed = 100 + f;
    const double got = optimize_weights(fixtures[f], p).fitness;
    worst_gap = std::max(worst_gap, grid_best - got);
    ok = ok && got >= grid_best - kGridSlack;
  }
  report("grid-oracle", ok, std::to_string(fixtures.size()) + " fixtures, max(grid - cs) = " + fmt(worst_gap));
}

void cs_convergence() {
  int hits = 0;
  bool monotone = true;
  for (int s = 0; s < kCsRuns; ++s) {
    CsParams p;
    p.seed = static_cast<std::uint64_t>(s);
    auto r = cs_optimize(
        [](std::span<const double> w) {
          double d = 0.0;
          for (double v : w) d += (v - 0.3) * (v - 0.3);
          return 1.0 / (1.0 + std::sqrt(d));
        },
        Box::unit(3), p);
    double d = 0.0;
    for (double v : r.best_solution) d += (v - 0.3) * (v - 0.3);
    hits += std::sqrt(d) < kCsRadius;
    for (std::size_t i = 1; i < r.history.size(); ++i) monotone = monotone && r.history[i].best >= r.history[i - 1].best;
  }
  report("cs-convergence", hits >= kCsRequired && monotone,
         std::to_string(hits) + "/" + std::to_string(kCsRuns) + " within " + fmt(kCsRadius) +
             ", history monotone: " + (monotone ? "yes" : "no"));
}

void lm_correctness() {
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const std::size_t dim = 1 + s % 5;
    auto m = ann_init(dim, 500 + s);
    std::vector<double> x(dim);
    for (auto& v : x) v = u(rng);
    const auto g = m.output_gradient(x);
    const auto theta = m.parameters();
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      const double h = 1e-6;
      auto tp = theta, tm = theta;
      tp[i] += h;
      tm[i] -= h;
      AnnModel a(dim), b(dim);
      a.set_parameters(tp);
      b.set_parameters(tm);
      const double fd = (a.forward(x) - b.forward(x)) / (2 * h);
      worst = std::max(worst, std::abs(g[i] - fd) / std::max(std::abs(fd), 1e-6));
    }
  }
  std::vector<double> xs(50);
  for (int i = 0; i < 50; ++i) xs[static_cast<std::size_t>(i)] = i / 49.0;
  const auto ramp = test::dataset_1d(xs, [](double x) { return x; });
  const auto r = ann_train_lm(ann_init(1, 42), ramp, {});
  const double mse = r.mse_trace.empty() ? 1e300 : r.mse_trace.back();
  report("lm-correctness", worst < kJacobianRelTol && mse < kRampMse && r.mse_trace.size() <= 200,
         "max Jacobian rel err " + fmt(worst) + " over 10 models, ramp MSE " + fmt(mse) + " after " +
             std::to_string(r.mse_trace.size()) + " epochs");
}

void gpr_exactness() {
  const std::vector<std::vector<double>> xs{{0.1, 0.3}, {0.5, 0.9}, {0.8, 0.2}};
  const std::vector<double> ys{1.2, -0.4, 0.7};
  const double ell = 0.6, sf2 = 1.3, sn2 = 0.05;
  FeatureDataset d;
  for (std::size_t i = 0; i < 3; ++i) d.push_back({xs[i], ys[i], test::day(0), i});
  const auto m = gpr_fit(d, {ell, sf2, sn2});
  const auto kinv = test::gauss_jordan_inverse(test::kernel_matrix(xs, ell, sf2, sn2));
  const auto alpha = test::mat_vec(kinv, ys);
  double err = 0.0;
  for (const std::vector<double>& q : {std::vector<double>{0.3, 0.3}, std::vector<double>{0.9, 0.9},
                                       std::vector<double>{0.1, 0.3}}) {
    std::vector<double> k;
    for (const auto& x : xs) k.push_back(test::se_kernel(q, x, ell, sf2));
    const auto p = m.predict(q);
    err = std::max(err, std::abs(p.mean - test::dot(k, alpha)));
    err = std::max(err, std::abs(p.variance - (sf2 - test::dot(k, test::mat_vec(kinv, k)))));
  }

  const auto interp_data = test::random_dataset(20, 3, 9, [](const std::vector<double>& x) {
    return std::sin(3 * x[0]) + x[1] * x[2];
  });
  const auto interp = gpr_fit(interp_data, {0.5, 1.0, 1e-8});
  double interp_err = 0.0;
  for (const auto& s : interp_data) interp_err = std::max(interp_err, std::abs(interp.predict(s.features).mean - s.target));

  bool bounded = true;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  for (int q = 0; q < 500; ++q) {
    std::vector<double> x{u(rng), u(rng)};
    const double v = m.predict(x).variance;
    bounded = bounded && v >= 0.0 && v <= sf2 + sn2;
  }
  report("gpr-exactness", err <= kGprTol && interp_err < kInterpolationTol && bounded,
         "oracle err " + fmt(err) + ", interpolation err " + fmt(interp_err) + ", variance bounded: " +
             (bounded ? "yes" : "no"));
}

void cart_exactness() {
  std::vector<double> xs(20);
  for (int i = 0; i < 20; ++i) xs[static_cast<std::size_t>(i)] = i / 19.0;
  const auto step = test::dataset_1d(xs, [](double x) { return x < 0.5 ? 0.0 : 1.0; });
  CartParams p;
  p.min_leaf = 1;
  const auto pruned = cart_prune(cart_grow(step, p), step, p);
  bool exact = pruned.depth() == 1 && pruned.nodes()[0].threshold > 0.49 && pruned.nodes()[0].threshold < 0.51;
  for (const auto& s : step) exact = exact && pruned.predict(s.features) == s.target;
  exact = exact && pruned.predict(std::vector<double>{0.2}) == 0.0 && pruned.predict(std::vector<double>{0.9}) == 1.0;

  bool bounded = true;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-2.0, 3.0);
  std::normal_distribution<double> z(0.0, 1.0);
  for (std::uint64_t f = 0; f < 100; ++f) {
    const auto d = test::random_dataset(50, 3, 1000 + f, [&](const std::vector<double>& x) {
      return 5.0 * x[0] - 2.0 * x[1] * x[2] + z(rng);
    });
    double lo = d[0].target, hi = d[0].target;
    for (const auto& s : d) {
      lo = std::min(lo, s.target);
      hi = std::max(hi, s.target);
    }
    const auto t = cart_prune(cart_grow(d, {}), d, {});
    for (int q = 0; q < 50; ++q) {
      const double y = t.predict(std::vector<double>{u(rng), u(rng), u(rng)});
      bounded = bounded && y >= lo && y <= hi;
    }
  }
  report("cart-exactness", exact && bounded,
         std::string("step recovered: ") + (exact ? "yes" : "no") + ", 100 fixtures bounded: " + (bounded ? "yes" : "no"));
}

}  // namespace

int main() {
  guarded("combine-fixture", combine_fixture);
  guarded("fitness-fixture", fitness_fixture);
  guarded("covariance-fixture", covariance_fixture);
  guarded("rsi-fixture", rsi_fixture);
  guarded("gini-fixture", gini_fixture);
  guarded("grid-oracle", grid_oracle);
  guarded("cs-convergence", cs_convergence);
  guarded("lm-correctness", lm_correctness);
  guarded("gpr-exactness", gpr_exactness);
  guarded("cart-exactness", cart_exactness);
  guarded("benchmark", benchmark_criteria);
  std::cout << (hard_failures == 0 ? "all hard criteria passed" : std::to_string(hard_failures) + " hard criteria failed")
            << std::endl;
  return hard_failures == 0 ? 0 : 1;
}
