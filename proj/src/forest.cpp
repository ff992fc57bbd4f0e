#include "fogfair/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fogfair {

namespace {

constexpr double kMinGain = 1e-12;

struct TreeBuilder {
  const std::vector<FeatureVector>& features;
  const std::vector<std::uint8_t>& labels;
  std::size_t n_features;
  std::size_t max_features;
  Rng& rng;
  std::vector<TreeNode> nodes;
  std::vector<std::size_t> feature_pool;

  double gini(std::size_t pos, std::size_t total) const {
    if (total == 0) return 0.0;
    double p = static_cast<double>(pos) / static_cast<double>(total);
    return 2.0 * p * (1.0 - p);
  }

  // Samples max_features distinct feature indices via partial Fisher-Yates.
  void sample_features(std::vector<std::size_t>& out) {
    out.clear();
    for (std::size_t i = 0; i < max_features; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.next_below(feature_pool.size() - i));
      std::swap(feature_pool[i], feature_pool[j]);
      out.push_back(feature_pool[i]);
    }
  }

  std::size_t build(std::vector<std::size_t>& idx, std::size_t lo, std::size_t hi) {
    std::size_t node_id = nodes.size();
    nodes.emplace_back();

    std::size_t total = hi - lo;
    std::size_t pos = 0;
    for (std::size_t i = lo; i < hi; ++i) pos += labels[idx[i]];
    nodes[node_id].positive_fraction = static_cast<double>(pos) / static_cast<double>(total);

    if (pos == 0 || pos == total) return node_id;

    double parent_impurity = gini(pos, total);
    double best_gain = kMinGain;
    std::size_t best_feature = SIZE_MAX;
    double best_threshold = 0.0;

    std::vector<std::size_t> candidates;
    sample_features(candidates);

    std::vector<std::pair<double, std::uint8_t>> vals(total);
    for (std::size_t f : candidates) {
      for (std::size_t i = lo; i < hi; ++i)
        vals[i - lo] = {features[idx[i]].values[f], labels[idx[i]]};
      std::sort(vals.begin(), vals.end());
      std::size_t left_n = 0, left_pos = 0;
      for (std::size_t i = 0; i + 1 < total; ++i) {
        ++left_n;
        left_pos += vals[i].second;
        if (vals[i].first == vals[i + 1].first) continue;
        std::size_t right_n = total - left_n;
        std::size_t right_pos = pos - left_pos;
        double child = (static_cast<double>(left_n) * gini(left_pos, left_n) +
                        static_cast<double>(right_n) * gini(right_pos, right_n)) /
                       static_cast<double>(total);
        double gain = parent_impurity - child;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = f;
          // left data value, so ordering alone determines the split
          best_threshold = vals[i].first;
        }
      }
    }

    if (best_feature == SIZE_MAX) return node_id;

    auto mid_it = std::partition(idx.begin() + static_cast<std::ptrdiff_t>(lo),
                                 idx.begin() + static_cast<std::ptrdiff_t>(hi),
                                 [&](std::size_t s) {
                                   return features[s].values[best_feature] <= best_threshold;
                                 });
    auto mid = static_cast<std::size_t>(mid_it - idx.begin());

    nodes[node_id].feature = best_feature;
    nodes[node_id].threshold = best_threshold;
    nodes[node_id].left = build(idx, lo, mid);
    nodes[node_id].right = build(idx, mid, hi);
    return node_id;
  }
};

double tree_positive_fraction(const DecisionTree& tree, const std::vector<double>& x) {
  std::size_t n = 0;
  while (tree.nodes[n].feature != SIZE_MAX)
    n = x[tree.nodes[n].feature] <= tree.nodes[n].threshold ? tree.nodes[n].left
                                                            : tree.nodes[n].right;
  return tree.nodes[n].positive_fraction;
}

}  // namespace

ForestModel train_forest(const std::vector<FeatureVector>& features,
                         const std::vector<std::uint8_t>& labels, const ForestConfig& cfg) {
  if (features.size() != labels.size())
    throw Error(ErrorCode::LengthMismatch, "features and labels differ in length");
  if (features.size() < 2)
    throw Error(ErrorCode::SingleClassTraining, "need at least 2 training samples");
  bool has0 = false, has1 = false;
  for (std::uint8_t l : labels) (l ? has1 : has0) = true;
  if (!has0 || !has1)
    throw Error(ErrorCode::SingleClassTraining, "training labels contain a single class");
  if (cfg.n_trees == 0) throw Error(ErrorCode::ConfigError, "n_trees must be positive");

  const std::size_t n = features.size();
  const std::size_t d = features.front().values.size();
  for (const auto& fv : features)
    if (fv.values.size() != d)
      throw Error(ErrorCode::DimensionMismatch, "feature vectors differ in length");

  ForestModel model;
  model.n_features = d;
  model.config = cfg;
  std::size_t max_features = cfg.max_features
                                 ? std::min(cfg.max_features, d)
                                 : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));

  model.trees.resize(cfg.n_trees);
  for (std::size_t t = 0; t < cfg.n_trees; ++t) {
    // Per-tree derived stream keeps results independent of training order.
    Rng rng(derive_seed(cfg.rng_seed, "forest-tree", t));
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) i = static_cast<std::size_t>(rng.next_below(n));

    TreeBuilder builder{features, labels, d, max_features, rng, {}, {}};
    builder.feature_pool.resize(d);
    std::iota(builder.feature_pool.begin(), builder.feature_pool.end(), std::size_t{0});
    builder.build(idx, 0, n);
    model.trees[t].nodes = std::move(builder.nodes);
  }
  return model;
}

std::vector<double> predict_scores(const ForestModel& model,
                                   const std::vector<FeatureVector>& features) {
  std::vector<double> scores;
  scores.reserve(features.size());
  for (const auto& fv : features) {
    if (fv.values.size() != model.n_features)
      throw Error(ErrorCode::DimensionMismatch, "feature length does not match trained forest");
    std::size_t votes = 0;
    for (const auto& tree : model.trees)
      if (tree_positive_fraction(tree, fv.values) > 0.5) ++votes;
    scores.push_back(static_cast<double>(votes) / static_cast<double>(model.trees.size()));
  }
  return scores;
}

}  // namespace fogfair
