#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "wef/bundle.hpp"
#include "wef/ensemble.hpp"
#include "wef/error.hpp"
#include "wef/metrics.hpp"
#include "wef/synth.hpp"

namespace wef {
namespace {

LearnerOutputs noisy_outputs(std::size_t n, std::uint64_t seed, std::array<double, 3> noise,
                             std::array<double, 3> bias = {0, 0, 0}) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  LearnerOutputs o;
  double price = 100.0;
  for (std::size_t i = 0; i < n; ++i) {
    price *= std::exp(0.01 * z(rng));
    o.actual.push_back(price);
    o.ann.push_back(price + bias[0] + noise[0] * z(rng));
    o.cart.push_back(price + bias[1] + noise[1] * z(rng));
    o.gpr.push_back(price + bias[2] + noise[2] * z(rng));
  }
  return o;
}

TEST(Combine, Fixtures) {
  EXPECT_DOUBLE_EQ(combine({1, 1, 1}, 42.5, 42.5, 42.5), 42.5);
  const double oracle = (0.876 * 100 + 0.915 * 200 + 0.131 * 300) / (0.876 + 0.915 + 0.131);
  EXPECT_NEAR(combine({0.876, 0.915, 0.131}, 100, 200, 300), oracle, 1e-12);
  EXPECT_NEAR(combine({0.876, 0.915, 0.131}, 100, 200, 300), 161.2383, 1e-4);
  EXPECT_EQ(combine({1, 0, 0}, 17.25, 3.0, 99.0), 17.25);
  EXPECT_EQ(combine({0, 0.3, 0}, 17.25, 3.0, 99.0), 3.0);
}

TEST(Combine, DegenerateWeights) {
  try {
    combine({0, 0, 0}, 1, 2, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateWeights);
  }
  EXPECT_THROW(combine({1e-7, 1e-7, 1e-7}, 1, 2, 3), Error);
}

TEST(Combine, Convexity) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0), p(1.0, 500.0);
  for (int i = 0; i < 1000; ++i) {
    WeightVector w{u(rng), u(rng), u(rng)};
    if (!w.usable()) continue;
    const double a = p(rng), b = p(rng), c = p(rng);
    const double y = combine(w, a, b, c);
    EXPECT_GE(y, std::min({a, b, c}) - 1e-9);
    EXPECT_LE(y, std::max({a, b, c}) + 1e-9);
  }
}

TEST(Fitness, Fixtures) {
  LearnerOutputs o;
  o.actual = {10, 20, 30};
  o.ann = o.cart = o.gpr = o.actual;
  EXPECT_EQ(ensemble_fitness({1, 1, 1}, o), 1.0);
  for (auto& v : o.ann) v += 1.0;
  o.cart = o.gpr = o.ann;
  EXPECT_EQ(ensemble_fitness({0.2, 0.5, 0.9}, o), 0.5);
  for (auto* col : {&o.ann, &o.cart, &o.gpr})
    for (std::size_t i = 0; i < 3; ++i) (*col)[i] = o.actual[i] - 3.0;
  EXPECT_EQ(ensemble_fitness({1, 0, 0}, o), 0.25);
  EXPECT_EQ(ensemble_fitness({0, 0, 0}, o), 0.0);
}

TEST(Fitness, MatchesMetricsRmse) {
  auto o = noisy_outputs(50, 3, {1, 2, 3});
  WeightVector w{0.2, 0.3, 0.5};
  const auto pred = combine_all(w, o);
  EXPECT_NEAR(ensemble_rmse(w, o), rmse(pred, o.actual), 1e-12);
  EXPECT_NEAR(ensemble_fitness(w, o), 1.0 / (1.0 + rmse(pred, o.actual)), 1e-12);
}

TEST(LearnerOutputs, Validation) {
  LearnerOutputs o;
  o.actual = {1, 2};
  o.ann = {1, 2};
  o.cart = {1};
  o.gpr = {1, 2};
  EXPECT_THROW(o.validate(), Error);
}

TEST(OptimizeWeights, PerfectLearnerDominates) {
  for (int which = 0; which < 3; ++which) {
    auto o = noisy_outputs(80, 10 + which, {4, 4, 4});
    auto& col = which == 0 ? o.ann : which == 1 ? o.cart : o.gpr;
    col = o.actual;
    auto r = optimize_weights(o, {});
    const double w[3] = {r.weights.ann, r.weights.cart, r.weights.gpr};
    for (int k = 0; k < 3; ++k)
      if (k != which) EXPECT_GT(w[which], w[k]);
    EXPECT_EQ(r.fitness, 1.0);
  }
}

TEST(OptimizeWeights, IdenticalLearners) {
  auto o = noisy_outputs(40, 4, {2, 0, 0});
  o.cart = o.gpr = o.ann;
  const double common = ensemble_fitness({1, 1, 1}, o);
  auto r = optimize_weights(o, {});
  EXPECT_NEAR(r.fitness, common, 1e-12);
}

TEST(OptimizeWeights, NeverWorseThanACorner) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto o = noisy_outputs(60, 100 + s, {1.0 + static_cast<double>(s % 3), 2.0, 0.5 + 0.3 * static_cast<double>(s)},
                           {0.5, -1.0, 0.0});
    auto r = optimize_weights(o, {});
    for (auto l : {Learner::Ann, Learner::Cart, Learner::Gpr}) {
      EXPECT_LE(ensemble_rmse(r.weights, o), ensemble_rmse(WeightVector::corner(l), o));
    }
    r.weights.validate();
  }
}

TEST(OptimizeWeights, GridOracle) {
  for (std::uint64_t s = 0; s < 3; ++s) {
    auto o = noisy_outputs(60, 500 + s, {1.5, 2.5, 2.0}, {1.0, -1.5, 0.5});
    double grid_best = 0.0;
    for (int a = 0; a <= 20; ++a)
      for (int b = 0; b <= 20; ++b)
        for (int c = 0; c <= 20; ++c) grid_best = std::max(grid_best, ensemble_fitness({a * 0.05, b * 0.05, c * 0.05}, o));
    CsParams p;
    p.seed = s;
    EXPECT_GE(optimize_weights(o, p).fitness, grid_best - 1e-3);
  }
}

TEST(OptimizeWeights, NanOutputsRaise) {
  auto o = noisy_outputs(20, 1, {1, 1, 1});
  o.cart[3] = std::nan("");
  EXPECT_THROW(optimize_weights(o, {}), Error);
}

class TrainedFixture : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    SynthMarketParams sp;
    sp.company_count = 3;
    panel_ = new MarketPanel(generate_synth_market(sp));
    params_ = new EnsembleParams();
    params_->seed = 42;
    params_->cs.seed = 43;
    params_->created = "fixed";
    trained_ = new TrainedEnsemble(train_ensemble(*panel_, 1, *params_));
  }
  static void TearDownTestSuite() {
    delete trained_;
    delete params_;
    delete panel_;
  }
  static MarketPanel* panel_;
  static EnsembleParams* params_;
  static TrainedEnsemble* trained_;
};
MarketPanel* TrainedFixture::panel_ = nullptr;
EnsembleParams* TrainedFixture::params_ = nullptr;
TrainedEnsemble* TrainedFixture::trained_ = nullptr;

TEST_F(TrainedFixture, BundleShape) {
  const auto& b = trained_->bundle;
  EXPECT_EQ(b.ann.input_dim(), 11u);
  EXPECT_EQ(b.cart.input_dim(), 11u);
  EXPECT_EQ(b.gpr.input_dim(), 11u);
  EXPECT_EQ(b.gpr.size(), trained_->data.train.size());
  b.weights.validate();
  EXPECT_EQ(b.provenance.company, "C02");
  EXPECT_EQ(b.provenance.created, "fixed");
  EXPECT_EQ(b.provenance.data_fingerprint.size(), 16u);
  EXPECT_EQ(trained_->data.train.size(), 321u);
  EXPECT_EQ(trained_->data.validation.size(), 81u);
  EXPECT_EQ(trained_->data.test.size(), 75u);
  EXPECT_EQ(trained_->validation.size(), 81u);
}

TEST_F(TrainedFixture, ByteIdenticalRetrain) {
  auto again = train_ensemble(*panel_, 1, *params_);
  EXPECT_EQ(bundle_to_json(again.bundle), bundle_to_json(trained_->bundle));
}

TEST_F(TrainedFixture, EnsembleBeatsOrMatchesEveryCornerOnValidation) {
  const auto& b = trained_->bundle;
  for (auto l : {Learner::Ann, Learner::Cart, Learner::Gpr})
    EXPECT_LE(ensemble_rmse(b.weights, trained_->validation), ensemble_rmse(WeightVector::corner(l), trained_->validation));
  EXPECT_NEAR(b.validation_fitness, ensemble_fitness(b.weights, trained_->validation), 1e-12);
}

TEST_F(TrainedFixture, ForecastTraceOracle) {
  const auto& b = trained_->bundle;
  const auto& sample = trained_->data.test[10];
  const auto x = b.normalization.apply(sample.features);
  const double ann = b.normalization.invert_target(b.ann.forward(x));
  const double cart = b.normalization.invert_target(b.cart.predict(x));
  const double gpr = b.normalization.invert_target(b.gpr.predict(x).mean);
  const auto& w = b.weights;
  const double want = (w.ann * ann + w.cart * cart + w.gpr * gpr) / (w.ann + w.cart + w.gpr);
  auto f = forecast(b, sample.features);
  EXPECT_DOUBLE_EQ(f.ann, ann);
  EXPECT_DOUBLE_EQ(f.cart, cart);
  EXPECT_DOUBLE_EQ(f.gpr, gpr);
  EXPECT_NEAR(f.ensemble, want, 1e-9 * want);
  EXPECT_DOUBLE_EQ(ensemble_predict(b, sample), f.ensemble);
}

TEST_F(TrainedFixture, CornerBundleIsAnnPipeline) {
  auto b = trained_->bundle;
  b.weights = {1, 0, 0};
  for (const auto& s : trained_->data.test) {
    auto f = forecast(b, s.features);
    EXPECT_EQ(f.ensemble, f.ann);
  }
  auto out = collect_outputs(b, trained_->data.test);
  EXPECT_EQ(combine_all(b.weights, out), out.ann);
}

TEST(TrainEnsemble, ShortPanelFailsInFeatureStage) {
  SynthMarketParams sp;
  sp.company_count = 2;
  sp.record_count = 20;
  sp.shocks.clear();
  auto panel = generate_synth_market(sp);
  try {
    train_ensemble(panel, 0, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InsufficientHistory);
    EXPECT_EQ(std::string(e.what()).rfind("features: ", 0), 0u) << e.what();
  }
}

TEST(TrainEnsemble, NanLearnerFailsInWeightStage) {
  SynthMarketParams sp;
  sp.company_count = 2;
  auto panel = generate_synth_market(sp);
  EnsembleParams p;
  p.nan_learner = Learner::Cart;
  p.lm.max_epochs = 5;
  try {
    train_ensemble(panel, 0, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Optimization);
    EXPECT_EQ(std::string(e.what()).rfind("weights: ", 0), 0u) << e.what();
  }
}

TEST(Fingerprint, SensitiveToData) {
  auto d = test::dataset_1d({0.1, 0.2, 0.3}, [](double x) { return x; });
  const auto a = dataset_fingerprint(d);
  EXPECT_EQ(a, dataset_fingerprint(d));
  d[1].target = 0.2000000001;
  EXPECT_NE(a, dataset_fingerprint(d));
}

}  // namespace
}  // namespace wef
