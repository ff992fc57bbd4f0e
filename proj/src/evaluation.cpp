#include "fogfair/evaluation.hpp"

#include <algorithm>
#include <cmath>

namespace fogfair {

namespace {

bool coverage_ok(const FoldPlan& plan, const std::vector<GroupAssignment>& attrs) {
  for (const auto& ga : attrs) {
    // seen[fold][group]
    std::vector<std::array<bool, 2>> seen(plan.k, {false, false});
    for (const auto& [subject, fold] : plan.assignments) {
      auto it = ga.membership.find(subject);
      if (it == ga.membership.end())
        throw Error(ErrorCode::UnknownGroupMember, "subject " + subject + " missing from groups");
      seen[fold][it->second] = true;
    }
    for (const auto& s : seen)
      if (!s[0] || !s[1]) return false;
  }
  return true;
}

}  // namespace

FoldPlan plan_folds(const std::vector<std::string>& subject_ids,
                    const std::vector<GroupAssignment>& subject_attributes, std::size_t k,
                    std::uint64_t seed, std::size_t max_retries) {
  if (k < 2) throw Error(ErrorCode::ConfigError, "need k >= 2 folds");
  if (subject_ids.size() < k)
    throw Error(ErrorCode::InfeasibleCoverage,
                "fewer subjects than folds: " + std::to_string(subject_ids.size()) + " < " +
                    std::to_string(k));
  for (const auto& ga : subject_attributes)
    if (attribute_level(ga.attribute) != AttributeLevel::Subject)
      throw Error(ErrorCode::ConfigError, "fold planning takes subject-level attributes only");

  // Stratification cells: cross product of group memberships, sorted by key
  // so iteration order is deterministic.
  std::map<std::string, std::vector<std::string>> cells;
  for (const auto& subject : subject_ids) {
    std::string key;
    for (const auto& ga : subject_attributes) {
      auto it = ga.membership.find(subject);
      if (it == ga.membership.end())
        throw Error(ErrorCode::UnknownGroupMember, "subject " + subject + " missing from groups");
      key += it->second ? '1' : '0';
    }
    cells[key].push_back(subject);
  }
  for (auto& [key, members] : cells) std::sort(members.begin(), members.end());

  for (std::size_t attempt = 0; attempt <= max_retries; ++attempt) {
    const std::uint64_t attempt_seed = derive_seed(seed, "fold-plan", attempt);
    Rng rng(attempt_seed);
    FoldPlan plan;
    plan.k = k;
    plan.iteration_seed = seed;
    std::size_t next_fold = 0;
    for (auto& [key, members] : cells) {
      std::vector<std::string> shuffled = members;
      rng.shuffle(shuffled);
      for (const auto& subject : shuffled) {
        plan.assignments[subject] = next_fold;
        next_fold = (next_fold + 1) % k;
      }
    }
    if (coverage_ok(plan, subject_attributes)) return plan;
  }
  throw Error(ErrorCode::InfeasibleCoverage,
              "no fold assignment covered both groups of every attribute in every fold");
}

double macro_f1(const std::vector<std::uint8_t>& y_pred, const std::vector<std::uint8_t>& y_true) {
  if (y_pred.size() != y_true.size())
    throw Error(ErrorCode::LengthMismatch, "prediction and truth vectors differ in length");
  // confusion[t][p]
  std::size_t confusion[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < y_pred.size(); ++i) ++confusion[y_true[i] ? 1 : 0][y_pred[i] ? 1 : 0];

  double total = 0.0;
  for (int c = 0; c < 2; ++c) {
    const double tp = static_cast<double>(confusion[c][c]);
    const double fp = static_cast<double>(confusion[1 - c][c]);
    const double fn = static_cast<double>(confusion[c][1 - c]);
    const double prec = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
    const double rec = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
    total += prec + rec > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
  }
  return total / 2.0;
}

AggregateStat aggregate_values(const std::vector<double>& values, std::size_t n_excluded) {
  if (values.size() < 2)
    throw Error(ErrorCode::TooFewSamples, "aggregation needs at least 2 samples");
  AggregateStat stat;
  stat.n_samples = values.size();
  stat.n_excluded = n_excluded;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  stat.mean = mean;
  stat.ci_half_width = 1.96 * sd / std::sqrt(static_cast<double>(values.size()));
  return stat;
}

namespace {

void collect_metric(std::map<std::string, std::vector<double>>& values,
                    std::map<std::string, std::size_t>& excluded, const std::string& key,
                    const MetricValue& mv) {
  if (mv.degenerate())
    ++excluded[key];
  else
    values[key].push_back(mv.value);
}

}  // namespace

AggregateResult aggregate(const std::vector<MetricSample>& samples) {
  if (samples.size() < 2)
    throw Error(ErrorCode::TooFewSamples, "aggregation needs at least 2 samples");
  std::map<std::string, std::vector<double>> values;
  std::map<std::string, std::size_t> excluded;
  for (const auto& s : samples) {
    values["f1"].push_back(s.f1);
    for (const auto& [attr, fr] : s.fairness) {
      const std::string prefix = attribute_name_str(attr);
      collect_metric(values, excluded, prefix + ".dpr", fr.dpr);
      collect_metric(values, excluded, prefix + ".eod", fr.eod);
      if (fr.tppr) collect_metric(values, excluded, prefix + ".tppr", *fr.tppr);
      if (fr.fprr) collect_metric(values, excluded, prefix + ".fprr", *fr.fprr);
      if (fr.eor) collect_metric(values, excluded, prefix + ".eor", *fr.eor);
    }
  }
  AggregateResult out;
  for (const auto& [key, vals] : values) {
    if (vals.size() < 2) continue;  // everything (or all but one) excluded
    out.metrics[key] = aggregate_values(vals, excluded.count(key) ? excluded.at(key) : 0);
  }
  return out;
}

WilcoxonResult wilcoxon_one_sided(const std::vector<double>& before,
                                  const std::vector<double>& after) {
  if (before.size() != after.size() || before.empty())
    throw Error(ErrorCode::LengthMismatch, "paired samples must be non-empty and equal length");

  std::vector<double> d;
  d.reserve(before.size());
  for (std::size_t i = 0; i < before.size(); ++i) {
    const double diff = after[i] - before[i];
    if (diff != 0.0) d.push_back(diff);
  }

  WilcoxonResult res;
  res.n_effective = d.size();
  if (d.empty()) {
    res.all_zero_differences = true;
    res.p_value = 1.0;
    res.statistic = 0.0;
    res.method = WilcoxonMethod::Exact;
    return res;
  }

  const std::size_t n = d.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::fabs(d[a]) < std::fabs(d[b]); });

  // Average ranks across tied |d| runs.
  std::vector<double> rank(n, 0.0);
  std::vector<std::size_t> tie_sizes;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && std::fabs(d[order[j]]) == std::fabs(d[order[i]])) ++j;
    const double avg = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t t = i; t < j; ++t) rank[order[t]] = avg;
    tie_sizes.push_back(j - i);
    i = j;
  }

  double w_pos = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (d[i] > 0.0) w_pos += rank[i];
  res.statistic = w_pos;

  if (n <= 12) {
    res.method = WilcoxonMethod::Exact;
    // Null distribution enumerated over integer ranks 1..n; observed W uses
    // the average ranks above. The epsilon absorbs the .5 tie offsets.
    const std::size_t total = std::size_t{1} << n;
    std::size_t count = 0;
    for (std::size_t mask = 0; mask < total; ++mask) {
      std::size_t sum = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (mask & (std::size_t{1} << i)) sum += i + 1;
      if (static_cast<double>(sum) >= w_pos - 1e-9) ++count;
    }
    res.p_value = static_cast<double>(count) / static_cast<double>(total);
  } else {
    res.method = WilcoxonMethod::NormalApprox;
    const double nn = static_cast<double>(n);
    const double mean = nn * (nn + 1.0) / 4.0;
    double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
    for (std::size_t t : tie_sizes) {
      const double tt = static_cast<double>(t);
      var -= (tt * tt * tt - tt) / 48.0;
    }
    if (var <= 0.0) {
      res.p_value = w_pos > mean ? 0.0 : 1.0;
    } else {
      const double z = (w_pos - mean - 0.5) / std::sqrt(var);
      res.p_value = 0.5 * std::erfc(z / std::sqrt(2.0));
    }
  }
  res.p_value = std::min(1.0, std::max(0.0, res.p_value));
  return res;
}

}  // namespace fogfair
