#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fogfair/forest.hpp"

using namespace fogfair;

namespace {

FeatureVector fv(std::vector<double> values) {
  FeatureVector f;
  f.values = std::move(values);
  return f;
}

std::vector<FeatureVector> random_features(std::size_t n, std::size_t d, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  std::vector<FeatureVector> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(d);
    for (auto& x : v) x = unif(gen);
    out.push_back(fv(std::move(v)));
  }
  return out;
}

std::vector<std::uint8_t> labels_by_first_feature(const std::vector<FeatureVector>& xs) {
  std::vector<std::uint8_t> y;
  for (const auto& x : xs) y.push_back(x.values[0] > 0.0 ? 1 : 0);
  return y;
}

}  // namespace

TEST_CASE("prediction routes left on x <= threshold and votes strictly above one half") {
  // Tree 0: root splits feature 0 at 1.5; left leaf fraction 0.0, right 1.0.
  DecisionTree t0;
  t0.nodes.resize(3);
  t0.nodes[0].feature = 0;
  t0.nodes[0].threshold = 1.5;
  t0.nodes[0].left = 1;
  t0.nodes[0].right = 2;
  t0.nodes[1].positive_fraction = 0.0;
  t0.nodes[2].positive_fraction = 1.0;
  // Tree 1: a single leaf at exactly 0.5 never votes positive.
  DecisionTree t1;
  t1.nodes.resize(1);
  t1.nodes[0].positive_fraction = 0.5;

  CHECK(t0.nodes[0].is_leaf() == false);
  CHECK(t1.nodes[0].is_leaf());

  ForestModel m;
  m.trees = {t0, t1};
  m.n_features = 1;

  std::vector<double> scores = predict_scores(m, {fv({1.5}), fv({1.6})});
  REQUIRE(scores.size() == 2);
  CHECK(scores[0] == 0.0);  // boundary value goes left
  CHECK(scores[1] == 0.5);  // only tree 0 votes
}

TEST_CASE("training separates duplicated two-value data exactly") {
  // 20 copies of each value; every bootstrap sees both classes, and the
  // split threshold is the left value 0.
  std::vector<FeatureVector> xs;
  std::vector<std::uint8_t> ys;
  for (int i = 0; i < 20; ++i) {
    xs.push_back(fv({0.0}));
    ys.push_back(0);
    xs.push_back(fv({1.0}));
    ys.push_back(1);
  }
  ForestConfig cfg;
  cfg.n_trees = 25;
  cfg.rng_seed = 9;
  ForestModel m = train_forest(xs, ys, cfg);
  for (const auto& tree : m.trees) {
    REQUIRE(tree.nodes.size() == 3);
    CHECK(tree.nodes[0].feature == 0);
    CHECK(tree.nodes[0].threshold == 0.0);
  }
  std::vector<double> s = predict_scores(m, {fv({0.0}), fv({1.0}), fv({0.5})});
  CHECK(s[0] == 0.0);
  CHECK(s[1] == 1.0);
  CHECK(s[2] == 1.0);  // 0.5 > left-value threshold routes right
}

TEST_CASE("training is deterministic in the seed") {
  auto xs = random_features(80, 6, 21);
  auto ys = labels_by_first_feature(xs);
  ForestConfig cfg;
  cfg.n_trees = 10;
  cfg.rng_seed = 1234;
  ForestModel a = train_forest(xs, ys, cfg);
  ForestModel b = train_forest(xs, ys, cfg);
  auto probes = random_features(30, 6, 99);
  CHECK(predict_scores(a, probes) == predict_scores(b, probes));

  cfg.rng_seed = 1235;
  ForestModel c = train_forest(xs, ys, cfg);
  bool any_structural_difference = false;
  for (std::size_t t = 0; t < a.trees.size() && !any_structural_difference; ++t) {
    if (a.trees[t].nodes.size() != c.trees[t].nodes.size()) any_structural_difference = true;
    for (std::size_t k = 0; !any_structural_difference && k < a.trees[t].nodes.size(); ++k)
      if (a.trees[t].nodes[k].feature != c.trees[t].nodes[k].feature ||
          a.trees[t].nodes[k].threshold != c.trees[t].nodes[k].threshold)
        any_structural_difference = true;
  }
  CHECK(any_structural_difference);
}

TEST_CASE("forest scores are invariant to a monotone transform of one feature") {
  auto xs = random_features(100, 3, 5);
  auto ys = labels_by_first_feature(xs);
  auto probes = random_features(40, 3, 6);

  auto transform = [](std::vector<FeatureVector> v) {
    for (auto& f : v) f.values[1] = std::cbrt(f.values[1]) + 4.0;
    return v;
  };
  ForestConfig cfg;
  cfg.n_trees = 15;
  cfg.rng_seed = 77;
  ForestModel base = train_forest(xs, ys, cfg);
  ForestModel warped = train_forest(transform(xs), ys, cfg);

  // Same seed, same orderings: identical vote counts, so exactly equal.
  CHECK(predict_scores(base, probes) == predict_scores(warped, transform(probes)));
}

TEST_CASE("constant features produce single-leaf trees") {
  std::vector<FeatureVector> xs(10, fv({3.0, 3.0}));
  std::vector<std::uint8_t> ys{0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
  ForestConfig cfg;
  cfg.n_trees = 5;
  cfg.rng_seed = 1;
  ForestModel m = train_forest(xs, ys, cfg);
  for (const auto& tree : m.trees) CHECK(tree.nodes.size() == 1);
}

TEST_CASE("training and prediction validate their inputs") {
  ForestConfig cfg;
  cfg.n_trees = 2;
  SUBCASE("length mismatch") {
    try {
      train_forest({fv({1.0}), fv({2.0})}, {0}, cfg);
      FAIL("expected LengthMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::LengthMismatch);
    }
  }
  SUBCASE("single class") {
    try {
      train_forest({fv({1.0}), fv({2.0})}, {1, 1}, cfg);
      FAIL("expected SingleClassTraining");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SingleClassTraining);
    }
  }
  SUBCASE("ragged features") {
    try {
      train_forest({fv({1.0}), fv({2.0, 3.0})}, {0, 1}, cfg);
      FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DimensionMismatch);
    }
  }
  SUBCASE("zero trees") {
    cfg.n_trees = 0;
    CHECK_THROWS_AS(train_forest({fv({1.0}), fv({2.0})}, {0, 1}, cfg), Error);
  }
  SUBCASE("prediction dimension check") {
    ForestModel m = train_forest({fv({1.0}), fv({2.0})}, {0, 1}, cfg);
    try {
      predict_scores(m, {fv({1.0, 2.0})});
      FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DimensionMismatch);
    }
  }
  SUBCASE("max_features above dimension is clamped") {
    cfg.max_features = 999;
    auto xs = random_features(30, 3, 8);
    CHECK_NOTHROW(train_forest(xs, labels_by_first_feature(xs), cfg));
  }
}
