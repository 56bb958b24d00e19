#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wef/date.hpp"
#include "wef/market_data.hpp"

namespace wef {

struct MarketShock {
  std::size_t day = 0;     // record index
  double magnitude = 0.0;  // added to every company's log-return that day
};

// Correlated-sector market: the index is a geometric random walk and each
// company's log-return is coupling * sector_factor + idiosyncratic noise +
// scheduled shocks, where sector_factor = market return + sector noise.
struct SynthMarketParams {
  std::size_t company_count = 10;
  std::size_t record_count = 503;
  std::uint64_t seed = 7;
  double market_drift = 2e-4;
  double market_volatility = 0.01;
  double sector_volatility = 0.006;
  double sector_coupling = 0.8;
  double idiosyncratic_volatility = 0.012;
  std::vector<MarketShock> shocks{{260, -0.06}, {400, 0.04}};
  double market_start = 1000.0;
  Date start_date = Date{std::chrono::year{2018} / 12 / 3};

  void validate() const;
};

// Weekday trading calendar; companies are named C01, C02, ...
MarketPanel generate_synth_market(const SynthMarketParams& params);

}  // namespace wef
