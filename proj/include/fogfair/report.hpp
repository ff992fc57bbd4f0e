#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "fogfair/experiment.hpp"

namespace fogfair {

/// Self-contained audit artifact: aggregates plus the per-(iteration, fold)
/// samples they were computed from, so later comparisons can pair folds.
struct FairnessReport {
  int schema_version = kReportSchemaVersion;
  std::string tool_version = kToolVersion;
  std::string config_hash;  // FNV-1a of the canonical config JSON, hex
  std::uint64_t master_seed = 0;
  std::string dataset;
  std::string model;
  std::string mitigation;
  std::map<std::string, AggregateStat> metrics;  // "f1", "<attribute>.<metric>"
  std::vector<MetricSample> samples;
};

enum class ReportFormat { Text, Json, Csv };

ReportFormat parse_report_format(const std::string& s);

FairnessReport build_report(const ExperimentResult& result);

/// Four-fifths verdict for ratio metrics (*.dpr, *.tppr, *.fprr, *.eor);
/// nullopt for f1 and difference metrics.
std::optional<Verdict> metric_verdict(const std::string& key, const AggregateStat& stat);

/// Json is canonical: sorted keys, schema_version field, shortest
/// round-trip numbers; render -> parse -> render is byte-identical.
std::string render_report(const FairnessReport& report, ReportFormat format);

FairnessReport parse_report_json(const std::string& text);
FairnessReport load_report(const std::filesystem::path& path);

struct MetricComparison {
  double before_mean = 0.0;  // over paired, non-degenerate samples
  double after_mean = 0.0;
  double delta = 0.0;        // after_mean - before_mean
  bool higher_is_better = true;
  WilcoxonResult wilcoxon;   // one-sided, in the improvement direction
};

struct ComparisonReport {
  int schema_version = kReportSchemaVersion;
  std::string tool_version = kToolVersion;
  std::string before_mitigation;
  std::string after_mitigation;
  std::string dataset;
  std::string model;
  std::map<std::string, MetricComparison> metrics;
};

/// Pairs samples by (iteration, fold); both reports must cover the same
/// pairs. Degenerate fairness values drop the pair for that metric only.
ComparisonReport compare_reports(const FairnessReport& before, const FairnessReport& after);

std::string render_comparison(const ComparisonReport& cmp, ReportFormat format);

}  // namespace fogfair
