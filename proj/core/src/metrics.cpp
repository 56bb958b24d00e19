#include "wef/metrics.hpp"

#include <cmath>
#include <string>

#include "wef/error.hpp"

namespace wef {

namespace {

void check(std::span<const double> pred, std::span<const double> actual) {
  if (pred.empty()) throw Error(ErrorKind::Validation, "metric over an empty sample");
  if (pred.size() != actual.size()) {
    throw Error(ErrorKind::DimensionMismatch, "metric inputs differ in length: " +
                                                  std::to_string(pred.size()) + " vs " +
                                                  std::to_string(actual.size()));
  }
}

}  // namespace

double rmse(std::span<const double> pred, std::span<const double> actual) {
  check(pred, actual);
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = actual[i] - pred[i];
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(pred.size()));
}

double mae(std::span<const double> pred, std::span<const double> actual) {
  check(pred, actual);
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) sum += std::abs(actual[i] - pred[i]);
  return sum / static_cast<double>(pred.size());
}

double error_rate(std::span<const double> pred, std::span<const double> actual) {
  check(pred, actual);
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!(actual[i] > 0.0)) throw Error(ErrorKind::Validation, "error rate needs positive actual prices");
    sum += std::abs(pred[i] - actual[i]) / actual[i];
  }
  return sum / static_cast<double>(pred.size());
}

}  // namespace wef
