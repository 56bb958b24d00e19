#pragma once

#include <span>

namespace wef {

// All three throw Validation on empty or mismatched inputs.
double rmse(std::span<const double> pred, std::span<const double> actual);
double mae(std::span<const double> pred, std::span<const double> actual);
// mean |pred - actual| / actual; every actual must be > 0.
double error_rate(std::span<const double> pred, std::span<const double> actual);

}  // namespace wef
