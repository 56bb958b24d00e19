#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wef/dataset.hpp"
#include "wef/date.hpp"

namespace wef {

// Daily closing prices of one instrument on trading days.
// Invariants: dates strictly increasing, closes.size() == dates.size(), closes > 0.
class PriceSeries {
 public:
  PriceSeries() = default;
  // Sorts by date, then validates. Throws ValidationError on duplicates,
  // non-positive or non-finite closes, or mismatched lengths.
  PriceSeries(std::string symbol, std::vector<Date> dates, std::vector<double> closes);

  const std::string& symbol() const noexcept { return symbol_; }
  std::span<const Date> dates() const noexcept { return dates_; }
  std::span<const double> closes() const noexcept { return closes_; }
  std::size_t size() const noexcept { return closes_.size(); }
  bool empty() const noexcept { return closes_.empty(); }

  // Index of `date`, or size() when absent.
  std::size_t index_of(Date date) const;

  friend bool operator==(const PriceSeries&, const PriceSeries&) = default;

 private:
  std::string symbol_;
  std::vector<Date> dates_;
  std::vector<double> closes_;
};

struct MarketPanel {
  PriceSeries market_index;
  PriceSeries sector_index;
  std::vector<PriceSeries> companies;

  // Position of the company with this symbol; throws Validation listing the
  // available symbols when absent.
  std::size_t company_index(std::string_view symbol) const;
  std::vector<std::string> symbols() const;

  friend bool operator==(const MarketPanel&, const MarketPanel&) = default;
};

// CSV with a header naming `date` and `close` columns (case-insensitive,
// extra columns ignored). Rows may appear in any order.
PriceSeries parse_price_csv(std::string_view text, std::string symbol = {});
// Writes `date,close` with shortest round-trip decimal closes.
std::string to_price_csv(const PriceSeries& series);

PriceSeries load_price_csv(const std::filesystem::path& path);
void save_price_csv(const PriceSeries& series, const std::filesystem::path& path);

// Restricts every member series to the intersection of all date sets.
MarketPanel align(const MarketPanel& panel);

// Equal-weighted mean of the companies' closes per date. Companies must
// share an identical date vector.
PriceSeries derive_sector_index(std::span<const PriceSeries> companies,
                                std::string symbol = "SECTOR");

// Reads a panel manifest:
//   [panel]
//   market_index = "market.csv"
//   sector_index = "sector.csv"      # optional
//   companies = ["A.csv", "B.csv"]
// Relative paths resolve against the manifest's directory. Company symbols are
// the CSV file stems. The result is aligned; a missing sector index is derived.
MarketPanel load_panel_manifest(const std::filesystem::path& manifest);
void write_panel_manifest(const std::filesystem::path& manifest,
                          const std::filesystem::path& market_csv,
                          const std::filesystem::path& sector_csv,
                          std::span<const std::filesystem::path> company_csvs);

struct SplitSpec {
  std::size_t train_count = 402;
  double validation_fraction = 0.2;

  void validate() const;
};

struct DatasetSplit {
  FeatureDataset train;
  FeatureDataset validation;
  FeatureDataset test;
};

// Chronological partition, no shuffling: train is the first
// floor(train_count * (1 - validation_fraction)) samples, validation the rest
// of the leading train_count, test everything after.
DatasetSplit split(const FeatureDataset& samples, const SplitSpec& spec);

}  // namespace wef
