#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fogfair/windowing.hpp"

namespace fogfair {

struct FeatureVector {
  std::vector<double> values;  // n_channels * (n_quantiles + 1)
  std::string subject_id;
  std::size_t start_index = 0;
};

constexpr std::size_t kDefaultQuantiles = 25;

// Per channel: values at quantile levels (k + 0.5)/n_quantiles via linear
// interpolation between order statistics, then the channel mean. Channel
// blocks are concatenated in recording channel order.
FeatureVector ecdf_features(const Window& w, std::size_t n_quantiles = kDefaultQuantiles);

std::vector<FeatureVector> ecdf_features(const WindowSet& ws,
                                         std::size_t n_quantiles = kDefaultQuantiles);

}  // namespace fogfair
