#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "wef/eval.hpp"

namespace wef {

struct Histogram {
  std::vector<double> edges;  // bins + 1 edges
  std::vector<std::size_t> counts;
};

// Equal-width bins over [-R, R] where R = max |residual| (1 when all are 0).
Histogram residual_histogram(std::span<const double> residuals, std::size_t bins = 20);

std::string report_to_json(const EvalReport& report);

// Writes under `dir`:
//   tables/{error_rate,mae,rmse}_h<H>.csv   one row per company plus AVERAGE
//   tables/daily_vs_weekly.csv
//   plots/regression_<model>.csv
//   plots/residual_hist_<model>.csv
//   plots/cs_convergence.csv
//   report.json
std::vector<std::filesystem::path> emit_report(const EvalReport& report,
                                               const std::filesystem::path& dir);

}  // namespace wef
