#include "wef/synth.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "wef/error.hpp"

namespace wef {

void SynthMarketParams::validate() const {
  if (company_count < 1) throw Error(ErrorKind::Validation, "synth.company_count must be >= 1");
  if (record_count < 2) throw Error(ErrorKind::Validation, "synth.record_count must be >= 2");
  if (market_volatility < 0.0 || sector_volatility < 0.0 || idiosyncratic_volatility < 0.0) {
    throw Error(ErrorKind::Validation, "synth volatilities must be >= 0");
  }
  if (!(sector_coupling >= 0.0 && sector_coupling <= 1.0)) {
    throw Error(ErrorKind::Validation, "synth.sector_coupling must lie in [0, 1]");
  }
  if (!(market_start > 0.0)) throw Error(ErrorKind::Validation, "synth.market_start must be positive");
}

namespace {

std::vector<Date> trading_days(Date start, std::size_t count) {
  std::vector<Date> out;
  out.reserve(count);
  for (Date d = start; out.size() < count; d += std::chrono::days{1}) {
    const std::chrono::weekday wd{d};
    if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) out.push_back(d);
  }
  return out;
}

}  // namespace

MarketPanel generate_synth_market(const SynthMarketParams& params) {
  params.validate();
  const std::size_t days = params.record_count;
  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> start_price(20.0, 200.0);

  std::vector<double> shock(days, 0.0);
  for (const auto& s : params.shocks) {
    if (s.day < days) shock[s.day] += s.magnitude;
  }

  std::vector<double> market_ret(days, 0.0), sector_ret(days, 0.0);
  for (std::size_t t = 1; t < days; ++t) {
    market_ret[t] = params.market_drift + params.market_volatility * gauss(rng);
    sector_ret[t] = market_ret[t] + params.sector_volatility * gauss(rng);
  }

  const auto dates = trading_days(params.start_date, days);
  std::vector<double> market(days);
  double log_level = std::log(params.market_start);
  for (std::size_t t = 0; t < days; ++t) {
    log_level += market_ret[t];
    market[t] = std::exp(log_level);
  }

  MarketPanel panel;
  panel.market_index = PriceSeries("MARKET", dates, std::move(market));
  for (std::size_t c = 0; c < params.company_count; ++c) {
    double level = std::log(start_price(rng));
    std::vector<double> closes(days);
    for (std::size_t t = 0; t < days; ++t) {
      if (t > 0) {
        level += params.sector_coupling * sector_ret[t] +
                 params.idiosyncratic_volatility * gauss(rng) + shock[t];
      }
      closes[t] = std::exp(level);
    }
    char name[16];
    std::snprintf(name, sizeof(name), "C%02zu", c + 1);
    panel.companies.emplace_back(name, dates, std::move(closes));
  }
  panel.sector_index = derive_sector_index(panel.companies);
  return panel;
}

}  // namespace wef
