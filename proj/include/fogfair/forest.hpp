#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fogfair/core.hpp"
#include "fogfair/features.hpp"

namespace fogfair {

struct ForestConfig {
  std::size_t n_trees = 100;
  std::size_t max_features = 0;  // 0 = ceil(sqrt(d))
  std::uint64_t rng_seed = 0;
};

struct TreeNode {
  // Leaf iff feature == SIZE_MAX; internal nodes route x[feature] <= threshold left.
  std::size_t feature = SIZE_MAX;
  double threshold = 0.0;
  std::size_t left = 0;
  std::size_t right = 0;
  double positive_fraction = 0.0;

  bool is_leaf() const { return feature == SIZE_MAX; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  std::size_t n_features = 0;
  ForestConfig config;
};

ForestModel train_forest(const std::vector<FeatureVector>& features,
                         const std::vector<std::uint8_t>& labels, const ForestConfig& cfg);

// Score = fraction of trees voting FOG (leaf positive fraction > 0.5).
std::vector<double> predict_scores(const ForestModel& model,
                                   const std::vector<FeatureVector>& features);

}  // namespace fogfair
