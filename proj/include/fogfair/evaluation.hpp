#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fogfair/fairness.hpp"

namespace fogfair {

struct FoldPlan {
  std::size_t k = 0;
  std::map<std::string, std::size_t> assignments;  // subject_id -> fold
  std::uint64_t iteration_seed = 0;
};

/// Stratified subject-level fold assignment: subjects are bucketed by the
/// cross product of their group memberships, shuffled within each bucket, and
/// dealt round-robin. Plans failing the per-fold coverage constraint (every
/// fold sees both groups of every attribute) are retried on derived seeds.
FoldPlan plan_folds(const std::vector<std::string>& subject_ids,
                    const std::vector<GroupAssignment>& subject_attributes, std::size_t k,
                    std::uint64_t seed, std::size_t max_retries = 64);

/// Mean of per-class F1 over classes {0, 1}; a class with prec + rec = 0
/// contributes 0.
double macro_f1(const std::vector<std::uint8_t>& y_pred, const std::vector<std::uint8_t>& y_true);

struct MetricSample {
  std::size_t iteration = 0;
  std::size_t fold = 0;
  double f1 = 0.0;
  std::map<AttributeName, FairnessResult> fairness;
};

struct AggregateStat {
  double mean = 0.0;
  double ci_half_width = 0.0;  // 1.96 * s / sqrt(n)
  std::size_t n_samples = 0;
  std::size_t n_excluded = 0;
};

struct AggregateResult {
  // keys: "f1" and "<attribute>.<metric>", e.g. "sex.dpr"
  std::map<std::string, AggregateStat> metrics;
};

/// Mean and normal 95% CI. Throws TooFewSamples below 2 values.
AggregateStat aggregate_values(const std::vector<double>& values, std::size_t n_excluded = 0);

/// Aggregates f1 and every fairness metric across samples; degenerate
/// (flagged) fairness values are excluded per metric and counted.
AggregateResult aggregate(const std::vector<MetricSample>& samples);

enum class WilcoxonMethod { Exact, NormalApprox };

struct WilcoxonResult {
  double statistic = 0.0;  // W = sum of ranks of positive differences
  double p_value = 1.0;
  std::size_t n_effective = 0;
  WilcoxonMethod method = WilcoxonMethod::Exact;
  bool all_zero_differences = false;
};

/// One-sided Wilcoxon signed-rank test of median(after - before) > 0.
/// Zero differences are dropped; |d| ties get average ranks. Exact
/// enumeration for n_effective <= 12, tie-corrected normal approximation
/// with continuity correction beyond.
WilcoxonResult wilcoxon_one_sided(const std::vector<double>& before,
                                  const std::vector<double>& after);

}  // namespace fogfair
