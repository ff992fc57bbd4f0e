#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fogfair/evaluation.hpp"

using namespace fogfair;

namespace {

GroupAssignment subject_groups(AttributeName attr,
                               const std::map<std::string, int>& membership) {
  GroupAssignment ga;
  ga.attribute = attr;
  ga.membership = membership;
  return ga;
}

// Independent exact null: DP over achievable integer rank-sum subsets.
double oracle_exact_p(std::size_t n, double w_obs) {
  const std::size_t max_sum = n * (n + 1) / 2;
  std::vector<std::uint64_t> ways(max_sum + 1, 0);
  ways[0] = 1;
  for (std::size_t r = 1; r <= n; ++r)
    for (std::size_t s = max_sum; s + 1 > r; --s) ways[s] += ways[s - r];
  std::uint64_t count = 0;
  for (std::size_t s = 0; s <= max_sum; ++s)
    if (static_cast<double>(s) >= w_obs - 1e-9) count += ways[s];
  return static_cast<double>(count) / static_cast<double>(std::uint64_t{1} << n);
}

}  // namespace

TEST_CASE("fold planning partitions subjects and covers every group") {
  std::vector<std::string> subjects;
  std::map<std::string, int> sex, age;
  for (int i = 0; i < 16; ++i) {
    std::string id = "S" + std::to_string(10 + i);
    subjects.push_back(id);
    sex[id] = i % 2;
    age[id] = (i / 2) % 2;
  }
  std::vector<GroupAssignment> attrs{subject_groups(AttributeName::Sex, sex),
                                     subject_groups(AttributeName::Age, age)};

  FoldPlan plan = plan_folds(subjects, attrs, 4, 99);
  CHECK(plan.k == 4);
  CHECK(plan.iteration_seed == 99);
  REQUIRE(plan.assignments.size() == subjects.size());

  std::vector<std::size_t> fold_sizes(4, 0);
  for (const auto& id : subjects) {
    REQUIRE(plan.assignments.count(id) == 1);
    const std::size_t f = plan.assignments.at(id);
    REQUIRE(f < 4);
    ++fold_sizes[f];
  }
  for (std::size_t s : fold_sizes) CHECK(s == 4);

  // every fold must see both groups of both attributes
  for (const auto& ga : attrs) {
    for (std::size_t f = 0; f < 4; ++f) {
      bool seen[2] = {false, false};
      for (const auto& [id, fold] : plan.assignments)
        if (fold == f) seen[ga.membership.at(id)] = true;
      CHECK(seen[0]);
      CHECK(seen[1]);
    }
  }

  FoldPlan again = plan_folds(subjects, attrs, 4, 99);
  CHECK(again.assignments == plan.assignments);

  // some nearby seed must give a different assignment
  bool any_differs = false;
  for (std::uint64_t s = 100; s < 105 && !any_differs; ++s)
    any_differs = plan_folds(subjects, attrs, 4, s).assignments != plan.assignments;
  CHECK(any_differs);
}

TEST_CASE("fold planning rejects impossible or malformed requests") {
  std::vector<std::string> subjects{"A", "B", "C", "D"};
  std::map<std::string, int> sex{{"A", 0}, {"B", 0}, {"C", 1}, {"D", 1}};
  auto ga = subject_groups(AttributeName::Sex, sex);

  SUBCASE("k below 2") {
    CHECK_THROWS_AS(plan_folds(subjects, {ga}, 1, 0), Error);
  }
  SUBCASE("fewer subjects than folds") {
    try {
      plan_folds(subjects, {ga}, 5, 0);
      FAIL("expected InfeasibleCoverage");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InfeasibleCoverage);
    }
  }
  SUBCASE("episode-level attribute") {
    auto pheno = subject_groups(AttributeName::FogPhenotype, sex);
    try {
      plan_folds(subjects, {pheno}, 2, 0);
      FAIL("expected ConfigError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ConfigError);
    }
  }
  SUBCASE("subject missing from the group map") {
    std::map<std::string, int> partial{{"A", 0}, {"B", 0}, {"C", 1}};
    try {
      plan_folds(subjects, {subject_groups(AttributeName::Sex, partial)}, 2, 0);
      FAIL("expected UnknownGroupMember");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnknownGroupMember);
    }
  }
  SUBCASE("a single-member group can never cover two folds") {
    std::map<std::string, int> lone{{"A", 0}, {"B", 0}, {"C", 0}, {"D", 1}};
    try {
      plan_folds(subjects, {subject_groups(AttributeName::Sex, lone)}, 2, 0, 8);
      FAIL("expected InfeasibleCoverage");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InfeasibleCoverage);
    }
  }
}

TEST_CASE("macro F1") {
  SUBCASE("hand-worked confusion") {
    // class 1: tp 2 fp 1 fn 1 -> 2/3; class 0: tp 1 fp 1 fn 1 -> 1/2
    double f1 = macro_f1({1, 0, 1, 0, 1}, {1, 1, 1, 0, 0});
    CHECK(f1 == doctest::Approx(7.0 / 12.0));
  }
  SUBCASE("perfect and inverted predictions") {
    CHECK(macro_f1({0, 1, 0, 1}, {0, 1, 0, 1}) == 1.0);
    CHECK(macro_f1({1, 0, 1, 0}, {0, 1, 0, 1}) == 0.0);
  }
  SUBCASE("an absent class contributes zero") {
    CHECK(macro_f1({1, 1, 1}, {1, 1, 1}) == doctest::Approx(0.5));
  }
  SUBCASE("invariant under swapping class labels") {
    std::mt19937_64 gen(7);
    std::uniform_int_distribution<int> bit(0, 1);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<std::uint8_t> yp(25), yt(25), fp(25), ft(25);
      for (int i = 0; i < 25; ++i) {
        yp[i] = static_cast<std::uint8_t>(bit(gen));
        yt[i] = static_cast<std::uint8_t>(bit(gen));
        fp[i] = 1 - yp[i];
        ft[i] = 1 - yt[i];
      }
      CHECK(macro_f1(yp, yt) == doctest::Approx(macro_f1(fp, ft)));
    }
  }
  SUBCASE("length mismatch") {
    CHECK_THROWS_AS(macro_f1({1, 0}, {1}), Error);
  }
}

TEST_CASE("aggregate_values computes a normal CI") {
  AggregateStat s = aggregate_values({0.4, 0.6});
  CHECK(s.mean == doctest::Approx(0.5));
  CHECK(s.ci_half_width == doctest::Approx(0.196));  // 1.96 * sd(0.1414)/sqrt(2)
  CHECK(s.n_samples == 2);
  CHECK(s.n_excluded == 0);

  AggregateStat with_excl = aggregate_values({1.0, 1.0, 1.0}, 4);
  CHECK(with_excl.mean == 1.0);
  CHECK(with_excl.ci_half_width == 0.0);
  CHECK(with_excl.n_excluded == 4);

  CHECK_THROWS_AS(aggregate_values({}), Error);
  try {
    aggregate_values({0.5});
    FAIL("expected TooFewSamples");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewSamples);
  }
}

TEST_CASE("aggregate excludes degenerate fairness values per metric") {
  auto sample = [](double f1, MetricValue dpr, MetricValue eod) {
    MetricSample s;
    s.f1 = f1;
    FairnessResult fr;
    fr.attribute = AttributeName::Sex;
    fr.dpr = dpr;
    fr.eod = eod;
    fr.tppr = MetricValue{0.9, {}};
    s.fairness[AttributeName::Sex] = fr;
    return s;
  };
  std::vector<MetricSample> samples{
      sample(0.5, {0.8, {}}, {0.1, {}}),
      sample(0.7, {0.6, {}}, {0.2, {DegenerateFlag::EmptyGroup}}),
      sample(0.9, {1.0, {DegenerateFlag::ZeroRateBothGroups}},
             {0.3, {DegenerateFlag::EmptyGroup}}),
  };
  AggregateResult out = aggregate(samples);

  REQUIRE(out.metrics.count("f1") == 1);
  CHECK(out.metrics.at("f1").mean == doctest::Approx(0.7));
  CHECK(out.metrics.at("f1").n_samples == 3);

  REQUIRE(out.metrics.count("sex.dpr") == 1);
  CHECK(out.metrics.at("sex.dpr").mean == doctest::Approx(0.7));
  CHECK(out.metrics.at("sex.dpr").n_samples == 2);
  CHECK(out.metrics.at("sex.dpr").n_excluded == 1);

  // only one clean eod sample survives -> key dropped entirely
  CHECK(out.metrics.count("sex.eod") == 0);

  REQUIRE(out.metrics.count("sex.tppr") == 1);
  CHECK(out.metrics.at("sex.tppr").n_samples == 3);

  // unset optionals contribute no key
  CHECK(out.metrics.count("sex.eor") == 0);

  CHECK_THROWS_AS(aggregate({samples[0]}), Error);
}

TEST_CASE("wilcoxon hand cases") {
  SUBCASE("six positive differences, distinct magnitudes") {
    std::vector<double> before{1, 1, 1, 1, 1, 1};
    std::vector<double> after{1.1, 1.2, 1.3, 1.4, 1.5, 1.6};
    WilcoxonResult r = wilcoxon_one_sided(before, after);
    CHECK(r.statistic == 21.0);
    CHECK(r.p_value == 1.0 / 64.0);
    CHECK(r.n_effective == 6);
    CHECK(r.method == WilcoxonMethod::Exact);
    CHECK_FALSE(r.all_zero_differences);
  }
  SUBCASE("tied magnitudes with opposite signs") {
    WilcoxonResult r = wilcoxon_one_sided({0.0, 0.0}, {1.0, -1.0});
    CHECK(r.statistic == 1.5);  // average rank of the |1| tie
    CHECK(r.p_value == 0.5);
    CHECK(r.n_effective == 2);
  }
  SUBCASE("zero differences are dropped") {
    WilcoxonResult r = wilcoxon_one_sided({2, 3, 4}, {2, 3, 7});
    CHECK(r.n_effective == 1);
    CHECK(r.statistic == 1.0);
    CHECK(r.p_value == 0.5);
  }
  SUBCASE("identical vectors") {
    WilcoxonResult r = wilcoxon_one_sided({1, 2, 3}, {1, 2, 3});
    CHECK(r.all_zero_differences);
    CHECK(r.p_value == 1.0);
    CHECK(r.statistic == 0.0);
    CHECK(r.n_effective == 0);
  }
  SUBCASE("length mismatch and empty input") {
    CHECK_THROWS_AS(wilcoxon_one_sided({1, 2}, {1}), Error);
    CHECK_THROWS_AS(wilcoxon_one_sided({}, {}), Error);
  }
}

TEST_CASE("exact wilcoxon agrees with a subset-sum oracle") {
  std::mt19937_64 gen(404);
  std::uniform_real_distribution<double> unif(0.1, 5.0);
  std::uniform_int_distribution<int> sign(0, 1);
  std::uniform_int_distribution<std::size_t> size(3, 10);

  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = size(gen);
    std::vector<double> before(n, 0.0), after(n);
    std::set<double> used;
    for (std::size_t i = 0; i < n; ++i) {
      double mag;
      do {
        mag = unif(gen);
      } while (!used.insert(mag).second);  // distinct |d|, integer ranks
      after[i] = sign(gen) ? mag : -mag;
    }
    WilcoxonResult r = wilcoxon_one_sided(before, after);
    REQUIRE(r.method == WilcoxonMethod::Exact);
    CHECK(r.n_effective == n);
    CHECK(r.statistic == std::floor(r.statistic));  // no ties -> integer W
    CHECK(r.p_value == oracle_exact_p(n, r.statistic));
  }
}

TEST_CASE("large samples switch to the tie-corrected normal approximation") {
  std::vector<double> before(20, 0.0), after(20);
  for (int i = 0; i < 20; ++i) after[i] = 0.1 * (i + 1);
  WilcoxonResult r = wilcoxon_one_sided(before, after);
  CHECK(r.method == WilcoxonMethod::NormalApprox);
  CHECK(r.statistic == 210.0);
  // z = (210 - 105 - 0.5)/sqrt(717.5) = 3.901 -> p ~ 4.8e-5
  CHECK(r.p_value == doctest::Approx(4.8e-5).epsilon(0.05));
  CHECK(r.n_effective == 20);

  SUBCASE("all-tied magnitudes shrink the variance but stay valid") {
    std::vector<double> b(13, 0.0), a(13, 1.0);
    a[0] = -1.0;
    a[1] = -1.0;
    WilcoxonResult t = wilcoxon_one_sided(b, a);
    CHECK(t.method == WilcoxonMethod::NormalApprox);
    CHECK(t.statistic == doctest::Approx(11 * 7.0));  // 11 positives at avg rank 7
    CHECK(t.p_value > 0.0);
    CHECK(t.p_value < 0.05);
  }
}
