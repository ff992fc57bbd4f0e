#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fogfair/core.hpp"
#include "fogfair/ingest.hpp"
#include "fogfair/windowing.hpp"

namespace fogfair {

enum class AttributeName { Sex, Age, DiseaseDuration, FogPhenotype };
enum class AttributeLevel { Subject, Episode };

const char* attribute_name_str(AttributeName name);
AttributeName parse_attribute_name(const std::string& s);
AttributeLevel attribute_level(AttributeName name);

enum class DegenerateFlag { EmptyGroup, ZeroRateBothGroups };

const char* degenerate_flag_name(DegenerateFlag flag);

/// Binary group membership over unit ids (subject ids for subject-level
/// attributes, episode/window unit ids otherwise).
struct GroupAssignment {
  AttributeName attribute = AttributeName::Sex;
  std::map<std::string, int> membership;  // unit id -> 0 or 1
  std::optional<double> dichotomization_threshold;
  std::set<DegenerateFlag> flags;
};

struct PredictionSet {
  std::vector<std::string> unit_ids;
  std::vector<std::uint8_t> y_pred;
  std::vector<std::uint8_t> y_true;
  std::vector<double> scores;
};

/// One fairness metric plus its degeneracy flags. Flagged values are
/// excluded from aggregation but still carry a total value.
struct MetricValue {
  double value = 0.0;
  std::set<DegenerateFlag> flags;

  bool degenerate() const { return !flags.empty(); }
};

struct FairnessResult {
  AttributeName attribute = AttributeName::Sex;
  MetricValue dpr;
  MetricValue eod;
  // Undefined for FogPhenotype, where false positives cannot exist.
  std::optional<MetricValue> tppr, fprr, eor;
  double positive_rate[2] = {0.0, 0.0};
  double tpr[2] = {0.0, 0.0};
  double fpr[2] = {0.0, 0.0};
  std::int64_t group_size[2] = {0, 0};
};

enum class Verdict { Fair, Biased };

const char* verdict_name(Verdict v);

/// Median split for Age/DiseaseDuration (g0: value <= median), fixed coding
/// for Sex (g0 = female, g1 = male). Unit ids are subject ids.
GroupAssignment dichotomize(const std::vector<SubjectMetadata>& metadata, AttributeName attribute);

/// Episode-level groups from the spectral phenotype: g0 akinetic, g1 tremulous.
GroupAssignment assign_phenotype_groups(const std::vector<Episode>& episodes,
                                        double sampling_rate_hz);

/// min/max of per-group positive-prediction rates. Throws EmptyGroup.
double demographic_parity_ratio(const PredictionSet& preds, const GroupAssignment& groups);

/// (TPPR, FPRR) as flag-carrying values; never throws for degeneracy.
std::pair<MetricValue, MetricValue> parity_ratios(const PredictionSet& preds,
                                                  const GroupAssignment& groups);

/// min(TPPR, FPRR) with degenerate components dropped from the min and their
/// flags propagated. Rejects FogPhenotype groups.
MetricValue equalized_odds_ratio(const PredictionSet& preds, const GroupAssignment& groups);

/// |TPR_g0 - TPR_g1|. Throws EmptyGroup when a group has no y_true=1 units.
double equality_of_opportunity_difference(const PredictionSet& preds,
                                          const GroupAssignment& groups);

/// Fair iff metric >= 0.8.
Verdict four_fifths_verdict(double metric_value);

/// All metrics defined for the attribute, flag-based (no degeneracy throws).
FairnessResult compute_fairness(const PredictionSet& preds, const GroupAssignment& groups);

}  // namespace fogfair
