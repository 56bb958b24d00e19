#include "wef/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "wef/error.hpp"

namespace wef {

void FeatureConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::Validation, "features: " + what); };
  if (n < 1) fail("n must be >= 1");
  if (t < 1) fail("t must be >= 1");
  if (horizon < 1) fail("horizon must be >= 1");
  if (macd_short < 1 || macd_short >= macd_long) fail("need 1 <= macd_short < macd_long");
  if (corr_window < 2) fail("corr_window must be >= 2");
  if (index_window < 1) fail("index_window must be >= 1");
  if (sector_window < 1) fail("sector_window must be >= 1");
  if (rsi_window < 1) fail("rsi_window must be >= 1");
}

std::size_t FeatureConfig::warmup() const noexcept {
  return std::max({n * t, macd_long - 1, corr_window - 1, index_window - 1, sector_window - 1,
                   rsi_window});
}

std::vector<std::string> feature_names(const FeatureConfig& config) {
  std::vector<std::string> names{"C_r", "C_c", "I_r", "A_c", "S_c", "M", "R"};
  for (std::size_t lag = config.n; lag > 0; --lag) {
    names.push_back("s(k-" + std::to_string(lag * config.t) + ")");
  }
  names.push_back("s(k)");
  return names;
}

std::vector<double> ema(std::span<const double> closes, std::size_t window) {
  if (window == 0) throw Error(ErrorKind::Validation, "ema window must be positive");
  if (closes.size() < window) {
    throw Error(ErrorKind::InsufficientHistory, "ema(" + std::to_string(window) + ") needs " +
                                                    std::to_string(window) + " values, got " +
                                                    std::to_string(closes.size()));
  }
  const double alpha = 2.0 / (static_cast<double>(window) + 1.0);
  std::vector<double> out;
  out.reserve(closes.size() - window + 1);
  double value = std::accumulate(closes.begin(), closes.begin() + static_cast<std::ptrdiff_t>(window), 0.0) /
                 static_cast<double>(window);
  out.push_back(value);
  for (std::size_t i = window; i < closes.size(); ++i) {
    value = alpha * closes[i] + (1.0 - alpha) * value;
    out.push_back(value);
  }
  return out;
}

double macd(std::span<const double> closes, std::size_t short_window, std::size_t long_window) {
  if (closes.size() < long_window) {
    throw Error(ErrorKind::InsufficientHistory,
                "macd needs " + std::to_string(long_window) + " closes, got " +
                    std::to_string(closes.size()));
  }
  return ema(closes, short_window).back() - ema(closes, long_window).back();
}

double rsi(std::span<const double> closes) {
  std::size_t gains = 0, losses = 0;
  for (std::size_t i = 1; i < closes.size(); ++i) {
    if (closes[i] > closes[i - 1]) ++gains;
    else if (closes[i] < closes[i - 1]) ++losses;
  }
  if (losses == 0) return gains == 0 ? 50.0 : 100.0;
  const double rs = static_cast<double>(gains) / static_cast<double>(losses);
  return 100.0 - 100.0 / (1.0 + rs);
}

namespace {

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::DimensionMismatch, "window lengths differ: " + std::to_string(x.size()) +
                                                  " vs " + std::to_string(y.size()));
  }
  if (x.size() < 2) throw Error(ErrorKind::InsufficientHistory, "window needs at least 2 values");
}

}  // namespace

double window_covariance(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const double mx = mean(x), my = mean(y);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += (x[i] - mx) * (y[i] - my);
  return sum / static_cast<double>(x.size() - 1);
}

double window_pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const double sxy = window_covariance(x, y);
  const double sxx = window_covariance(x, x);
  const double syy = window_covariance(y, y);
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

SectorStats sector_stats(const MarketPanel& panel, std::size_t at, std::size_t window) {
  if (window == 0 || at + 1 < window) {
    throw Error(ErrorKind::InsufficientHistory,
                "sector stats need " + std::to_string(window) + " days before index " +
                    std::to_string(at));
  }
  if (panel.companies.empty()) throw Error(ErrorKind::Validation, "panel has no companies");
  const std::size_t first = at + 1 - window;
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& c : panel.companies) {
    if (at >= c.size()) {
      throw Error(ErrorKind::InsufficientHistory, "index " + std::to_string(at) +
                                                      " beyond series '" + c.symbol() + "'");
    }
    for (std::size_t i = first; i <= at; ++i) sum += c.closes()[i];
    count += window;
  }
  const double mu = sum / static_cast<double>(count);
  double ss = 0.0;
  for (const auto& c : panel.companies) {
    for (std::size_t i = first; i <= at; ++i) {
      const double d = c.closes()[i] - mu;
      ss += d * d;
    }
  }
  return {mu, std::sqrt(ss / static_cast<double>(count))};
}

std::optional<std::vector<double>> build_features(const MarketPanel& panel, std::size_t company,
                                                  std::size_t k, const FeatureConfig& config) {
  const auto& series = panel.companies.at(company);
  if (k < config.warmup() || k >= series.size()) return std::nullopt;

  const auto closes = series.closes();
  const auto market = panel.market_index.closes();
  const auto sector = panel.sector_index.closes();
  if (market.size() != closes.size() || sector.size() != closes.size()) {
    throw Error(ErrorKind::Alignment, "panel is not aligned");
  }

  auto trailing = [k](std::span<const double> s, std::size_t w) { return s.subspan(k + 1 - w, w); };
  auto corr = config.normalized_correlation ? window_pearson : window_covariance;

  std::vector<double> f;
  f.reserve(config.feature_count());
  f.push_back(corr(trailing(closes, config.corr_window), trailing(market, config.corr_window)));
  f.push_back(corr(trailing(closes, config.corr_window), trailing(sector, config.corr_window)));
  f.push_back(mean(trailing(market, config.index_window)));
  const auto stats = sector_stats(panel, k, config.sector_window);
  f.push_back(stats.mean);
  f.push_back(stats.stddev);
  f.push_back(macd(closes.first(k + 1), config.macd_short, config.macd_long));
  f.push_back(rsi(trailing(closes, config.rsi_window + 1)));
  for (std::size_t lag = config.n; lag > 0; --lag) f.push_back(closes[k - lag * config.t]);
  f.push_back(closes[k]);
  return f;
}

std::optional<FeatureSample> build_sample(const MarketPanel& panel, std::size_t company,
                                          std::size_t k, const FeatureConfig& config) {
  const auto& series = panel.companies.at(company);
  if (k + config.horizon >= series.size()) return std::nullopt;
  auto features = build_features(panel, company, k, config);
  if (!features) return std::nullopt;
  FeatureSample s;
  s.features = std::move(*features);
  s.target = series.closes()[k + config.horizon];
  s.anchor_date = series.dates()[k];
  s.anchor_index = k;
  return s;
}

FeatureDataset build_dataset(const MarketPanel& panel, std::size_t company,
                             const FeatureConfig& config) {
  config.validate();
  const auto& series = panel.companies.at(company);
  FeatureDataset out;
  for (std::size_t k = config.warmup(); k < series.size(); ++k) {
    if (auto s = build_sample(panel, company, k, config)) out.push_back(std::move(*s));
  }
  if (out.empty()) {
    throw Error(ErrorKind::InsufficientHistory,
                "'" + series.symbol() + "' has " + std::to_string(series.size()) +
                    " records; need more than warm-up " + std::to_string(config.warmup()) +
                    " + horizon " + std::to_string(config.horizon));
  }
  return out;
}

std::string dataset_to_csv(const FeatureDataset& data, const FeatureConfig& config) {
  std::string out = "anchor_date";
  for (const auto& name : feature_names(config)) out += "," + name;
  out += ",target\n";
  char buf[64];
  auto put = [&](double v) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out += ',';
    out.append(buf, ptr);
  };
  for (const auto& s : data) {
    out += format_iso_date(s.anchor_date);
    for (double v : s.features) put(v);
    put(s.target);
    out += '\n';
  }
  return out;
}

Normalization::Normalization(std::vector<double> feature_min, std::vector<double> feature_max,
                             double target_min, double target_max)
    : feature_min_(std::move(feature_min)),
      feature_max_(std::move(feature_max)),
      target_min_(target_min),
      target_max_(target_max) {
  if (feature_min_.size() != feature_max_.size()) {
    throw Error(ErrorKind::DimensionMismatch, "normalization min/max lengths differ");
  }
  for (std::size_t i = 0; i < feature_min_.size(); ++i) {
    if (!(feature_max_[i] >= feature_min_[i])) {
      throw Error(ErrorKind::Validation, "normalization max < min for feature " + std::to_string(i));
    }
  }
  if (!(target_max_ >= target_min_)) throw Error(ErrorKind::Validation, "normalization target max < min");
}

Normalization Normalization::fit(const FeatureDataset& train) {
  if (train.empty()) throw Error(ErrorKind::Validation, "cannot fit normalization on an empty set");
  const std::size_t d = train.front().features.size();
  std::vector<double> lo(train.front().features), hi(train.front().features);
  double tlo = train.front().target, thi = train.front().target;
  for (const auto& s : train) {
    if (s.features.size() != d) throw Error(ErrorKind::DimensionMismatch, "ragged training set");
    for (std::size_t j = 0; j < d; ++j) {
      lo[j] = std::min(lo[j], s.features[j]);
      hi[j] = std::max(hi[j], s.features[j]);
    }
    tlo = std::min(tlo, s.target);
    thi = std::max(thi, s.target);
  }
  return Normalization(std::move(lo), std::move(hi), tlo, thi);
}

namespace {

double scale(double v, double lo, double hi) {
  if (hi == lo) return 0.5;
  return std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
}

}  // namespace

std::vector<double> Normalization::apply(std::span<const double> features) const {
  if (features.size() != dimension()) {
    throw Error(ErrorKind::DimensionMismatch, "expected " + std::to_string(dimension()) +
                                                  " features, got " + std::to_string(features.size()));
  }
  std::vector<double> out(features.size());
  for (std::size_t j = 0; j < features.size(); ++j) {
    out[j] = scale(features[j], feature_min_[j], feature_max_[j]);
  }
  return out;
}

double Normalization::apply_target(double target) const {
  return scale(target, target_min_, target_max_);
}

double Normalization::invert_target(double normalized) const {
  if (target_max_ == target_min_) return target_min_;
  return target_min_ + normalized * (target_max_ - target_min_);
}

FeatureDataset Normalization::apply(const FeatureDataset& data) const {
  FeatureDataset out;
  out.reserve(data.size());
  for (const auto& s : data) {
    out.push_back({apply(s.features), apply_target(s.target), s.anchor_date, s.anchor_index});
  }
  return out;
}

}  // namespace wef
