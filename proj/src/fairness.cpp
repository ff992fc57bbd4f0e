#include "fogfair/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "fogfair/phenotype.hpp"

namespace fogfair {

const char* attribute_name_str(AttributeName name) {
  switch (name) {
    case AttributeName::Sex: return "sex";
    case AttributeName::Age: return "age";
    case AttributeName::DiseaseDuration: return "disease_duration";
    case AttributeName::FogPhenotype: return "fog_phenotype";
  }
  return "?";
}

AttributeName parse_attribute_name(const std::string& s) {
  if (s == "sex") return AttributeName::Sex;
  if (s == "age") return AttributeName::Age;
  if (s == "disease_duration") return AttributeName::DiseaseDuration;
  if (s == "fog_phenotype") return AttributeName::FogPhenotype;
  throw Error(ErrorCode::ConfigError, "unknown attribute '" + s + "'");
}

AttributeLevel attribute_level(AttributeName name) {
  return name == AttributeName::FogPhenotype ? AttributeLevel::Episode : AttributeLevel::Subject;
}

const char* degenerate_flag_name(DegenerateFlag flag) {
  return flag == DegenerateFlag::EmptyGroup ? "EmptyGroup" : "ZeroRateBothGroups";
}

const char* verdict_name(Verdict v) { return v == Verdict::Fair ? "Fair" : "Biased"; }

GroupAssignment dichotomize(const std::vector<SubjectMetadata>& metadata,
                            AttributeName attribute) {
  if (metadata.empty()) throw Error(ErrorCode::EmptyGroup, "no subjects to dichotomize");
  GroupAssignment ga;
  ga.attribute = attribute;

  if (attribute == AttributeName::Sex) {
    for (const auto& m : metadata) ga.membership[m.subject_id] = m.sex == Sex::Female ? 0 : 1;
  } else if (attribute == AttributeName::Age || attribute == AttributeName::DiseaseDuration) {
    std::vector<double> values;
    values.reserve(metadata.size());
    for (const auto& m : metadata)
      values.push_back(attribute == AttributeName::Age ? m.age_years : m.disease_duration_years);
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() == sorted.back())
      throw Error(ErrorCode::AllIdenticalValues,
                  std::string(attribute_name_str(attribute)) + " values are all identical");
    const std::size_t n = sorted.size();
    double median =
        n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    ga.dichotomization_threshold = median;
    for (std::size_t i = 0; i < metadata.size(); ++i)
      ga.membership[metadata[i].subject_id] = values[i] <= median ? 0 : 1;
  } else {
    throw Error(ErrorCode::InvalidMetricForAttribute,
                "fog_phenotype groups come from episodes, not subject metadata");
  }

  bool has[2] = {false, false};
  for (const auto& [id, g] : ga.membership) has[g] = true;
  if (!has[0] || !has[1]) ga.flags.insert(DegenerateFlag::EmptyGroup);
  return ga;
}

GroupAssignment assign_phenotype_groups(const std::vector<Episode>& episodes,
                                        double sampling_rate_hz) {
  if (episodes.empty()) throw Error(ErrorCode::NoEpisodes, "no episodes to phenotype");
  GroupAssignment ga;
  ga.attribute = AttributeName::FogPhenotype;
  bool has[2] = {false, false};
  for (const auto& ep : episodes) {
    int g = classify_episode(ep, sampling_rate_hz) == PhenotypeLabel::Akinetic ? 0 : 1;
    ga.membership[ep.unit_id()] = g;
    has[g] = true;
  }
  if (!has[0] || !has[1]) ga.flags.insert(DegenerateFlag::EmptyGroup);
  return ga;
}

namespace {

struct GroupCounts {
  std::int64_t n[2] = {0, 0};
  std::int64_t pred_pos[2] = {0, 0};
  std::int64_t cond_pos[2] = {0, 0};  // y_true = 1
  std::int64_t tp[2] = {0, 0};
  std::int64_t cond_neg[2] = {0, 0};  // y_true = 0
  std::int64_t fp[2] = {0, 0};
};

GroupCounts count_groups(const PredictionSet& preds, const GroupAssignment& groups) {
  if (preds.unit_ids.size() != preds.y_pred.size() ||
      preds.unit_ids.size() != preds.y_true.size())
    throw Error(ErrorCode::LengthMismatch, "prediction set fields differ in length");
  GroupCounts c;
  for (std::size_t i = 0; i < preds.unit_ids.size(); ++i) {
    auto it = groups.membership.find(preds.unit_ids[i]);
    if (it == groups.membership.end())
      throw Error(ErrorCode::UnknownGroupMember,
                  "unit " + preds.unit_ids[i] + " has no group assignment");
    const int g = it->second;
    ++c.n[g];
    c.pred_pos[g] += preds.y_pred[i];
    if (preds.y_true[i]) {
      ++c.cond_pos[g];
      c.tp[g] += preds.y_pred[i];
    } else {
      ++c.cond_neg[g];
      c.fp[g] += preds.y_pred[i];
    }
  }
  return c;
}

// min/max of two rates p0/n0 and p1/n1 by integer cross-multiplication, so
// the result is a single correctly rounded division of exact integers.
MetricValue rate_ratio(std::int64_t p0, std::int64_t n0, std::int64_t p1, std::int64_t n1) {
  MetricValue mv;
  if (n0 == 0 || n1 == 0) {
    mv.flags.insert(DegenerateFlag::EmptyGroup);
    mv.value = 0.0;
    return mv;
  }
  if (p0 == 0 && p1 == 0) {
    mv.value = 1.0;
    mv.flags.insert(DegenerateFlag::ZeroRateBothGroups);
    return mv;
  }
  if (p0 == 0 || p1 == 0) {
    mv.value = 0.0;
    return mv;
  }
  const std::int64_t a = p0 * n1;  // r0 * (n0*n1)
  const std::int64_t b = p1 * n0;  // r1 * (n0*n1)
  mv.value = a <= b ? static_cast<double>(a) / static_cast<double>(b)
                    : static_cast<double>(b) / static_cast<double>(a);
  return mv;
}

double safe_rate(std::int64_t p, std::int64_t n) {
  return n == 0 ? std::nan("") : static_cast<double>(p) / static_cast<double>(n);
}

MetricValue eod_value(const GroupCounts& c) {
  MetricValue mv;
  if (c.cond_pos[0] == 0 || c.cond_pos[1] == 0) {
    mv.flags.insert(DegenerateFlag::EmptyGroup);
    return mv;
  }
  const std::int64_t num = std::llabs(c.tp[0] * c.cond_pos[1] - c.tp[1] * c.cond_pos[0]);
  mv.value = static_cast<double>(num) /
             static_cast<double>(c.cond_pos[0] * c.cond_pos[1]);
  return mv;
}

MetricValue combine_eor(const MetricValue& tppr, const MetricValue& fprr) {
  MetricValue eor;
  eor.flags.insert(tppr.flags.begin(), tppr.flags.end());
  eor.flags.insert(fprr.flags.begin(), fprr.flags.end());
  const bool t_ok = !tppr.degenerate();
  const bool f_ok = !fprr.degenerate();
  if (t_ok && f_ok)
    eor.value = std::min(tppr.value, fprr.value);
  else if (t_ok)
    eor.value = tppr.value;
  else if (f_ok)
    eor.value = fprr.value;
  else
    eor.value = 0.0;
  return eor;
}

}  // namespace

double demographic_parity_ratio(const PredictionSet& preds, const GroupAssignment& groups) {
  GroupCounts c = count_groups(preds, groups);
  if (c.n[0] == 0 || c.n[1] == 0)
    throw Error(ErrorCode::EmptyGroup, "demographic parity needs both groups populated");
  return rate_ratio(c.pred_pos[0], c.n[0], c.pred_pos[1], c.n[1]).value;
}

std::pair<MetricValue, MetricValue> parity_ratios(const PredictionSet& preds,
                                                  const GroupAssignment& groups) {
  GroupCounts c = count_groups(preds, groups);
  MetricValue tppr = rate_ratio(c.tp[0], c.cond_pos[0], c.tp[1], c.cond_pos[1]);
  MetricValue fprr = rate_ratio(c.fp[0], c.cond_neg[0], c.fp[1], c.cond_neg[1]);
  return {tppr, fprr};
}

MetricValue equalized_odds_ratio(const PredictionSet& preds, const GroupAssignment& groups) {
  if (groups.attribute == AttributeName::FogPhenotype)
    throw Error(ErrorCode::InvalidMetricForAttribute,
                "equalized odds is undefined for the FOG-phenotype attribute");
  auto [tppr, fprr] = parity_ratios(preds, groups);
  return combine_eor(tppr, fprr);
}

double equality_of_opportunity_difference(const PredictionSet& preds,
                                          const GroupAssignment& groups) {
  GroupCounts c = count_groups(preds, groups);
  if (c.cond_pos[0] == 0 || c.cond_pos[1] == 0)
    throw Error(ErrorCode::EmptyGroup, "EOD needs y_true=1 units in both groups");
  return eod_value(c).value;
}

Verdict four_fifths_verdict(double metric_value) {
  return metric_value >= 0.8 ? Verdict::Fair : Verdict::Biased;
}

FairnessResult compute_fairness(const PredictionSet& preds, const GroupAssignment& groups) {
  GroupCounts c = count_groups(preds, groups);
  FairnessResult r;
  r.attribute = groups.attribute;
  r.group_size[0] = c.n[0];
  r.group_size[1] = c.n[1];
  for (int g = 0; g < 2; ++g) {
    r.positive_rate[g] = safe_rate(c.pred_pos[g], c.n[g]);
    r.tpr[g] = safe_rate(c.tp[g], c.cond_pos[g]);
    r.fpr[g] = safe_rate(c.fp[g], c.cond_neg[g]);
  }

  r.dpr = rate_ratio(c.pred_pos[0], c.n[0], c.pred_pos[1], c.n[1]);
  r.eod = eod_value(c);
  if (groups.attribute != AttributeName::FogPhenotype) {
    auto [tppr, fprr] = parity_ratios(preds, groups);
    r.tppr = tppr;
    r.fprr = fprr;
    r.eor = combine_eor(tppr, fprr);
  }
  return r;
}

}  // namespace fogfair
