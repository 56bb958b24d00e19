#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wef/dataset.hpp"
#include "wef/market_data.hpp"

namespace wef {

struct FeatureConfig {
  std::size_t n = 3;        // lag count
  std::size_t t = 5;        // lag stride, trading days
  std::size_t horizon = 1;  // 1 = daily, 7 = weekly
  std::size_t corr_window = 14;
  std::size_t index_window = 7;
  std::size_t sector_window = 14;
  std::size_t macd_short = 13;
  std::size_t macd_long = 26;
  std::size_t rsi_window = 14;
  // Replaces the raw windowed covariance of C_r/C_c with Pearson correlation.
  bool normalized_correlation = false;

  void validate() const;

  // 7 indicator slots + (n + 1) lags.
  std::size_t feature_count() const noexcept { return 7 + n + 1; }
  // Smallest anchor index with enough trailing history for every slot.
  std::size_t warmup() const noexcept;

  static FeatureConfig daily() { return {}; }
  static FeatureConfig weekly() {
    FeatureConfig c;
    c.n = 5;
    c.t = 7;
    c.horizon = 7;
    return c;
  }

  friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

// Column names of the feature vector for `config`, in order.
std::vector<std::string> feature_names(const FeatureConfig& config);

// Exponential moving average with alpha = 2 / (window + 1), seeded by the
// simple mean of the first `window` values. Element i of the result is the
// EMA at input index window - 1 + i.
std::vector<double> ema(std::span<const double> closes, std::size_t window);

// EMA_short - EMA_long at the last index.
double macd(std::span<const double> closes, std::size_t short_window = 13,
            std::size_t long_window = 26);

// Counts up and down days over closes.size() - 1 changes; flat days count
// for neither. All-up gives 100, all-flat 50.
double rsi(std::span<const double> closes);

// sum((x_i - mean_x)(y_i - mean_y)) / (len - 1), not normalised.
double window_covariance(std::span<const double> x, std::span<const double> y);
double window_pearson(std::span<const double> x, std::span<const double> y);

struct SectorStats {
  double mean = 0.0;
  double stddev = 0.0;  // population
};

// Pooled over every company's closes in [at - window + 1, at].
SectorStats sector_stats(const MarketPanel& panel, std::size_t at, std::size_t window);

// Feature vector at anchor k with no target. nullopt when k is inside the warm-up.
std::optional<std::vector<double>> build_features(const MarketPanel& panel, std::size_t company,
                                                  std::size_t k, const FeatureConfig& config);

// nullopt when k lacks history or k + horizon is past the end of the series.
std::optional<FeatureSample> build_sample(const MarketPanel& panel, std::size_t company,
                                          std::size_t k, const FeatureConfig& config);

// Every admissible anchor in chronological order. Throws InsufficientHistory
// when none exists.
FeatureDataset build_dataset(const MarketPanel& panel, std::size_t company,
                             const FeatureConfig& config);

// One row per sample: anchor date, named features, target.
std::string dataset_to_csv(const FeatureDataset& data, const FeatureConfig& config);

// Min-max scaling learned from training rows only.
class Normalization {
 public:
  Normalization() = default;
  Normalization(std::vector<double> feature_min, std::vector<double> feature_max,
                double target_min, double target_max);

  static Normalization fit(const FeatureDataset& train);

  // Values outside the training range clamp to [0, 1]; constant columns map to 0.5.
  std::vector<double> apply(std::span<const double> features) const;
  double apply_target(double target) const;
  double invert_target(double normalized) const;

  // Normalized copy of every sample (features and target).
  FeatureDataset apply(const FeatureDataset& data) const;

  std::size_t dimension() const noexcept { return feature_min_.size(); }
  std::span<const double> feature_min() const noexcept { return feature_min_; }
  std::span<const double> feature_max() const noexcept { return feature_max_; }
  double target_min() const noexcept { return target_min_; }
  double target_max() const noexcept { return target_max_; }

  friend bool operator==(const Normalization&, const Normalization&) = default;

 private:
  std::vector<double> feature_min_;
  std::vector<double> feature_max_;
  double target_min_ = 0.0;
  double target_max_ = 0.0;
};

}  // namespace wef
