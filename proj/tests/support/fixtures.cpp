#include "fixtures.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace wef::test {

MarketPanel panel_from(const std::vector<std::vector<double>>& companies, const std::vector<double>& market) {
  MarketPanel p;
  p.market_index = series_from("MKT", market);
  for (std::size_t i = 0; i < companies.size(); ++i) p.companies.push_back(series_from("S" + std::to_string(i), companies[i]));
  p.sector_index = derive_sector_index(p.companies);
  return p;
}

std::vector<double> random_walk(std::size_t n, double start, std::uint64_t seed, double vol) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, vol);
  std::vector<double> out{start};
  while (out.size() < n) out.push_back(out.back() * std::exp(z(rng)));
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace wef::test
