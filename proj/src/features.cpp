#include "fogfair/features.hpp"

#include <algorithm>
#include <cmath>

namespace fogfair {

FeatureVector ecdf_features(const Window& w, std::size_t n_quantiles) {
  if (n_quantiles == 0) throw Error(ErrorCode::ConfigError, "n_quantiles must be positive");
  const std::size_t n = w.data.rows();
  if (n < n_quantiles)
    throw Error(ErrorCode::WindowTooShort, "window has " + std::to_string(n) +
                                               " samples, need >= " + std::to_string(n_quantiles));

  FeatureVector fv;
  fv.subject_id = w.subject_id;
  fv.start_index = w.start_index;
  fv.values.reserve(w.data.cols() * (n_quantiles + 1));

  std::vector<double> sorted(n);
  for (std::size_t c = 0; c < w.data.cols(); ++c) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sorted[i] = w.data(i, c);
      mean += sorted[i];
    }
    mean /= static_cast<double>(n);
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < n_quantiles; ++k) {
      double p = (static_cast<double>(k) + 0.5) / static_cast<double>(n_quantiles);
      double h = p * static_cast<double>(n - 1);
      auto lo = static_cast<std::size_t>(std::floor(h));
      std::size_t hi = std::min(lo + 1, n - 1);
      double frac = h - static_cast<double>(lo);
      fv.values.push_back(sorted[lo] + frac * (sorted[hi] - sorted[lo]));
    }
    fv.values.push_back(mean);
  }
  return fv;
}

std::vector<FeatureVector> ecdf_features(const WindowSet& ws, std::size_t n_quantiles) {
  std::vector<FeatureVector> out;
  out.reserve(ws.windows.size());
  for (const auto& w : ws.windows) out.push_back(ecdf_features(w, n_quantiles));
  return out;
}

}  // namespace fogfair
