#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "wef/cart.hpp"
#include "wef/error.hpp"

namespace wef {
namespace {

std::vector<double> grid(std::size_t n) {
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  return xs;
}

double step(double x) { return x < 0.5 ? 0.0 : 1.0; }

struct ScanResult {
  int feature = -1;
  double threshold = 0.0;
  double sse = 0.0;
};

// Tries every midpoint on every feature and keeps the smallest child SSE.
ScanResult exhaustive_scan(const FeatureDataset& d, std::size_t min_leaf) {
  ScanResult best;
  best.sse = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < d.front().features.size(); ++f) {
    std::set<double> values;
    for (const auto& s : d) values.insert(s.features[f]);
    for (auto it = values.begin(); std::next(it) != values.end(); ++it) {
      const double thr = (*it + *std::next(it)) / 2.0;
      std::vector<double> l, r;
      for (const auto& s : d) (s.features[f] < thr ? l : r).push_back(s.target);
      if (l.size() < min_leaf || r.size() < min_leaf) continue;
      const double sse = test::sse_around_mean(l) + test::sse_around_mean(r);
      if (sse < best.sse - 1e-12) best = {static_cast<int>(f), thr, sse};
    }
  }
  return best;
}

TEST(Gini, Fixtures) {
  EXPECT_DOUBLE_EQ(gini_impurity(std::vector<double>{1.0, 0.0}), 0.0);
  EXPECT_DOUBLE_EQ(gini_impurity(std::vector<double>{0.5, 0.5}), 0.5);
  EXPECT_DOUBLE_EQ(gini_impurity(std::vector<double>{0.25, 0.25, 0.25, 0.25}), 0.75);
  EXPECT_THROW(gini_impurity(std::vector<double>{0.5, 0.6}), Error);
  EXPECT_THROW(gini_impurity(std::vector<double>{1.5, -0.5}), Error);
}

TEST(CartGrow, ConstantTargetsSingleLeaf) {
  auto d = test::dataset_1d(grid(30), [](double) { return 4.25; });
  auto t = cart_grow(d, {});
  EXPECT_EQ(t.nodes().size(), 1u);
  EXPECT_EQ(t.predict(std::vector<double>{0.7}), 4.25);
}

TEST(CartGrow, SingleSample) {
  auto d = test::dataset_1d({0.3}, [](double) { return -2.0; });
  auto t = cart_grow(d, {});
  EXPECT_EQ(t.leaf_count(), 1u);
  EXPECT_EQ(t.predict(std::vector<double>{9.0}), -2.0);
}

TEST(CartGrow, StepFunction) {
  auto d = test::dataset_1d(grid(20), step);
  CartParams p;
  p.min_leaf = 1;
  auto t = cart_grow(d, p);
  auto oracle = exhaustive_scan(d, 1);
  EXPECT_EQ(t.depth(), 1u);
  EXPECT_EQ(t.nodes()[0].threshold, oracle.threshold);
  EXPECT_GT(t.nodes()[0].threshold, 0.49);
  EXPECT_LT(t.nodes()[0].threshold, 0.51);
  for (const auto& s : d) EXPECT_EQ(t.predict(s.features), s.target);
  EXPECT_EQ(t.predict(std::vector<double>{0.2}), 0.0);
  EXPECT_EQ(t.predict(std::vector<double>{0.9}), 1.0);
}

TEST(CartGrow, RootSplitMatchesExhaustiveScan) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    auto d = test::random_dataset(40, 3, seed, [](const std::vector<double>& x) {
      return std::sin(6 * x[0]) + x[1] * x[1] - 0.5 * x[2];
    });
    CartParams p;
    p.min_leaf = 3;
    auto t = cart_grow(d, p);
    auto oracle = exhaustive_scan(d, 3);
    ASSERT_FALSE(t.nodes()[0].is_leaf());
    EXPECT_EQ(t.nodes()[0].feature, oracle.feature) << seed;
    EXPECT_NEAR(t.nodes()[0].threshold, oracle.threshold, 1e-12) << seed;
    const auto& n = t.nodes();
    EXPECT_NEAR(n[n[0].left].sse + n[n[0].right].sse, oracle.sse, 1e-9);
  }
}

TEST(CartGrow, EqualGainPrefersLowerFeature) {
  FeatureDataset d;
  for (int i = 0; i < 10; ++i) {
    const double x = i / 9.0;
    d.push_back({{x, x}, step(x), test::day(i), static_cast<std::size_t>(i)});
  }
  CartParams p;
  p.min_leaf = 1;
  auto t = cart_grow(d, p);
  EXPECT_EQ(t.nodes()[0].feature, 0);
}

TEST(CartGrow, RespectsMinLeafAndDepth) {
  auto d = test::random_dataset(200, 2, 5, [](const std::vector<double>& x) { return x[0] + x[1]; });
  CartParams p;
  p.min_leaf = 7;
  p.max_depth = 4;
  auto t = cart_grow(d, p);
  EXPECT_LE(t.depth(), 4u);
  for (const auto& n : t.nodes())
    if (n.is_leaf()) EXPECT_GE(n.count, 7u);
}

TEST(CartPredict, ThresholdTiesRouteRight) {
  std::vector<CartNode> nodes(3);
  nodes[0].feature = 0;
  nodes[0].threshold = 0.5;
  nodes[0].left = 1;
  nodes[0].right = 2;
  nodes[1].value = -1.0;
  nodes[2].value = 1.0;
  CartModel t(1, nodes);
  EXPECT_EQ(t.predict(std::vector<double>{0.5}), 1.0);
  EXPECT_EQ(t.predict(std::vector<double>{0.4999}), -1.0);
}

TEST(CartPredict, ConstantModelAndDimensionCheck) {
  CartNode leaf;
  leaf.value = 42.0;
  CartModel t(2, {leaf});
  EXPECT_EQ(t.predict(std::vector<double>{-5.0, 1e9}), 42.0);
  EXPECT_THROW(t.predict(std::vector<double>{1.0}), Error);
}

TEST(CartPredict, MalformedTreeRejected) {
  std::vector<CartNode> nodes(1);
  nodes[0].feature = 0;
  nodes[0].left = 5;
  nodes[0].right = 6;
  EXPECT_THROW(CartModel(1, nodes), Error);
}

TEST(CartPrune, SequenceEndsAtRootAndAlphasIncrease) {
  auto d = test::random_dataset(120, 2, 9, [](const std::vector<double>& x) { return x[0] > 0.3 ? x[1] : -x[1]; });
  auto seq = cost_complexity_sequence(cart_grow(d, {}));
  ASSERT_GE(seq.size(), 2u);
  EXPECT_EQ(seq.front().alpha, 0.0);
  EXPECT_EQ(seq.back().tree.leaf_count(), 1u);
  for (std::size_t k = 1; k < seq.size(); ++k) {
    EXPECT_GE(seq[k].alpha, seq[k - 1].alpha);
    EXPECT_LT(seq[k].tree.leaf_count(), seq[k - 1].tree.leaf_count());
  }
}

TEST(CartPrune, SingleLeafUnchanged) {
  auto d = test::dataset_1d(grid(10), [](double) { return 1.0; });
  auto t = cart_grow(d, {});
  EXPECT_EQ(cart_prune(t, d, {}), t);
}

TEST(CartPrune, StepFunctionKeepsSplit) {
  auto d = test::dataset_1d(grid(20), step);
  CartParams p;
  p.min_leaf = 1;
  auto detail = cart_prune_detail(cart_grow(d, p), d, p);
  ASSERT_EQ(detail.sequence.size(), 2u);

  // Root-only CV cost: every held-out block predicted by the mean of the rest.
  double root_cost = 0.0;
  const std::size_t n = d.size(), folds = p.cv_folds;
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t b = f * n / folds, e = (f + 1) * n / folds;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (i < b || i >= e) sum += d[i].target;
    const double m = sum / static_cast<double>(n - (e - b));
    for (std::size_t i = b; i < e; ++i) root_cost += (d[i].target - m) * (d[i].target - m);
  }
  EXPECT_NEAR(detail.cv_cost[1], root_cost, 1e-9);
  EXPECT_LT(detail.cv_cost[0], detail.cv_cost[1]);
  EXPECT_EQ(detail.selected, 0u);

  auto pruned = cart_prune(cart_grow(d, p), d, p);
  EXPECT_EQ(pruned.depth(), 1u);
  for (const auto& s : d) EXPECT_EQ(pruned.predict(s.features), s.target);
}

TEST(CartPrune, PureNoiseUsuallyCollapses) {
  int root_only = 0;
  const int runs = 20;
  for (int seed = 0; seed < runs; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    std::normal_distribution<double> z(0.0, 1.0);
    auto d = test::random_dataset(100, 3, 2000 + seed, [&](const std::vector<double>&) { return z(rng); });
    auto t = cart_prune(cart_grow(d, {}), d, {});
    if (t.leaf_count() == 1) ++root_only;
  }
  EXPECT_GT(root_only, runs / 2);
}

TEST(CartPrune, PredictionsWithinTrainingRange) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto d = test::random_dataset(60, 2, seed, [&](const std::vector<double>& x) { return x[0] * 10 + u(rng); });
    double lo = d[0].target, hi = d[0].target;
    for (const auto& s : d) {
      lo = std::min(lo, s.target);
      hi = std::max(hi, s.target);
    }
    auto t = cart_prune(cart_grow(d, {}), d, {});
    for (int q = 0; q < 20; ++q) {
      const double y = t.predict(std::vector<double>{u(rng) * 3, u(rng) * 3});
      EXPECT_GE(y, lo);
      EXPECT_LE(y, hi);
    }
  }
}

}  // namespace
}  // namespace wef
