#pragma once

#include <cstddef>
#include <vector>

#include "wef/date.hpp"

namespace wef {

// One model input row: [C_r, C_c, I_r, A_c, S_c, M, R, lags oldest..newest]
// and the close `horizon` trading days after the anchor.
struct FeatureSample {
  std::vector<double> features;
  double target = 0.0;
  Date anchor_date{};
  std::size_t anchor_index = 0;
};

using FeatureDataset = std::vector<FeatureSample>;

}  // namespace wef
