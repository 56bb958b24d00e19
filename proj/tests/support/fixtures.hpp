#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "wef/dataset.hpp"
#include "wef/market_data.hpp"

namespace wef::test {

inline Date day(int offset) {
  return Date{std::chrono::year{2020} / 1 / 1} + std::chrono::days{offset};
}

inline PriceSeries series_from(const std::string& symbol, const std::vector<double>& closes, int first = 0) {
  std::vector<Date> dates;
  for (std::size_t i = 0; i < closes.size(); ++i) dates.push_back(day(first + static_cast<int>(i)));
  return PriceSeries(symbol, dates, closes);
}

// Panel from explicit company closes; the market index is `market` and the
// sector index is the company mean.
MarketPanel panel_from(const std::vector<std::vector<double>>& companies, const std::vector<double>& market);

// 1-D dataset with features x and targets f(x).
inline FeatureDataset dataset_1d(const std::vector<double>& xs, const std::function<double(double)>& f) {
  FeatureDataset d;
  for (std::size_t i = 0; i < xs.size(); ++i) d.push_back({{xs[i]}, f(xs[i]), day(static_cast<int>(i)), i});
  return d;
}

inline FeatureDataset random_dataset(std::size_t n, std::size_t dim, std::uint64_t seed,
                                     const std::function<double(const std::vector<double>&)>& f) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  FeatureDataset d;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(dim);
    for (auto& v : x) v = u(rng);
    const double y = f(x);
    d.push_back({x, y, day(static_cast<int>(i)), i});
  }
  return d;
}

std::vector<double> random_walk(std::size_t n, double start, std::uint64_t seed, double vol = 0.01);

std::string read_file(const std::string& path);

}  // namespace wef::test
