#include "fogfair/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fogfair {
namespace {

using nlohmann::json;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string sig6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// NaN-safe scalar: undefined rates serialize as null.
json num_or_null(double v) { return std::isnan(v) ? json() : json(v); }

double num_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json metric_value_to_json(const MetricValue& mv) {
  json flags = json::array();
  for (DegenerateFlag f : mv.flags) flags.push_back(degenerate_flag_name(f));
  return json{{"value", mv.value}, {"flags", std::move(flags)}};
}

MetricValue metric_value_from_json(const json& j) {
  MetricValue mv;
  mv.value = j.at("value").get<double>();
  for (const json& f : j.at("flags")) {
    std::string name = f.get<std::string>();
    if (name == "EmptyGroup")
      mv.flags.insert(DegenerateFlag::EmptyGroup);
    else if (name == "ZeroRateBothGroups")
      mv.flags.insert(DegenerateFlag::ZeroRateBothGroups);
    else
      throw Error(ErrorCode::IoError, "unknown degenerate flag: " + name);
  }
  return mv;
}

json fairness_result_to_json(const FairnessResult& r) {
  json j;
  j["dpr"] = metric_value_to_json(r.dpr);
  j["eod"] = metric_value_to_json(r.eod);
  if (r.tppr) j["tppr"] = metric_value_to_json(*r.tppr);
  if (r.fprr) j["fprr"] = metric_value_to_json(*r.fprr);
  if (r.eor) j["eor"] = metric_value_to_json(*r.eor);
  j["positive_rate"] = {num_or_null(r.positive_rate[0]), num_or_null(r.positive_rate[1])};
  j["tpr"] = {num_or_null(r.tpr[0]), num_or_null(r.tpr[1])};
  j["fpr"] = {num_or_null(r.fpr[0]), num_or_null(r.fpr[1])};
  j["group_size"] = {r.group_size[0], r.group_size[1]};
  return j;
}

FairnessResult fairness_result_from_json(AttributeName attr, const json& j) {
  FairnessResult r;
  r.attribute = attr;
  r.dpr = metric_value_from_json(j.at("dpr"));
  r.eod = metric_value_from_json(j.at("eod"));
  if (j.contains("tppr")) r.tppr = metric_value_from_json(j.at("tppr"));
  if (j.contains("fprr")) r.fprr = metric_value_from_json(j.at("fprr"));
  if (j.contains("eor")) r.eor = metric_value_from_json(j.at("eor"));
  for (int g = 0; g < 2; ++g) {
    r.positive_rate[g] = num_from(j.at("positive_rate").at(g));
    r.tpr[g] = num_from(j.at("tpr").at(g));
    r.fpr[g] = num_from(j.at("fpr").at(g));
    r.group_size[g] = j.at("group_size").at(g).get<std::int64_t>();
  }
  return r;
}

json stat_to_json(const std::string& key, const AggregateStat& stat) {
  json j;
  j["mean"] = stat.mean;
  j["ci_half_width"] = stat.ci_half_width;
  j["n_samples"] = stat.n_samples;
  j["n_excluded"] = stat.n_excluded;
  if (auto v = metric_verdict(key, stat)) j["verdict"] = verdict_name(*v);
  return j;
}

AggregateStat stat_from_json(const json& j) {
  AggregateStat stat;
  stat.mean = j.at("mean").get<double>();
  stat.ci_half_width = j.at("ci_half_width").get<double>();
  stat.n_samples = j.at("n_samples").get<std::size_t>();
  stat.n_excluded = j.at("n_excluded").get<std::size_t>();
  return stat;
}

json report_to_json(const FairnessReport& report) {
  json doc;
  doc["schema_version"] = report.schema_version;
  doc["provenance"] = {{"config_hash", report.config_hash},
                       {"master_seed", report.master_seed},
                       {"tool_version", report.tool_version}};
  doc["dataset"] = report.dataset;
  doc["model"] = report.model;
  doc["mitigation"] = report.mitigation;
  json metrics = json::object();
  for (const auto& [key, stat] : report.metrics) metrics[key] = stat_to_json(key, stat);
  doc["metrics"] = std::move(metrics);
  json samples = json::array();
  for (const MetricSample& s : report.samples) {
    json fairness = json::object();
    for (const auto& [attr, r] : s.fairness)
      fairness[attribute_name_str(attr)] = fairness_result_to_json(r);
    samples.push_back(json{{"iteration", s.iteration},
                           {"fold", s.fold},
                           {"f1", s.f1},
                           {"fairness", std::move(fairness)}});
  }
  doc["samples"] = std::move(samples);
  return doc;
}

std::string metric_key_attribute(const std::string& key) {
  auto dot = key.find('.');
  return dot == std::string::npos ? std::string() : key.substr(0, dot);
}

std::string metric_key_metric(const std::string& key) {
  auto dot = key.find('.');
  return dot == std::string::npos ? key : key.substr(dot + 1);
}

std::string render_text(const FairnessReport& report) {
  std::ostringstream out;
  out << "FOG detector fairness audit\n";
  out << "dataset: " << report.dataset << "  model: " << report.model
      << "  mitigation: " << report.mitigation << "\n";
  out << "seed: " << report.master_seed << "  config: " << report.config_hash
      << "  tool: " << report.tool_version << "\n";
  out << "samples: " << report.samples.size() << "\n\n";
  char line[160];
  std::snprintf(line, sizeof(line), "%-22s %10s %12s %5s %5s  %s\n", "metric", "mean", "95% CI",
                "n", "excl", "verdict");
  out << line;
  for (const auto& [key, stat] : report.metrics) {
    auto v = metric_verdict(key, stat);
    std::snprintf(line, sizeof(line), "%-22s %10s %12s %5zu %5zu  %s\n", key.c_str(),
                  sig6(stat.mean).c_str(), ("+-" + sig6(stat.ci_half_width)).c_str(),
                  stat.n_samples, stat.n_excluded, v ? verdict_name(*v) : "");
    out << line;
  }
  if (report.metrics.empty()) out << "(no aggregated metrics)\n";
  return out.str();
}

std::string render_csv(const FairnessReport& report) {
  std::ostringstream out;
  out << "dataset,model,mitigation,attribute,metric,mean,ci_half_width,n_samples,n_excluded,"
         "verdict\n";
  for (const auto& [key, stat] : report.metrics) {
    auto v = metric_verdict(key, stat);
    out << report.dataset << ',' << report.model << ',' << report.mitigation << ','
        << metric_key_attribute(key) << ',' << metric_key_metric(key) << ',' << sig6(stat.mean)
        << ',' << sig6(stat.ci_half_width) << ',' << stat.n_samples << ',' << stat.n_excluded
        << ',' << (v ? verdict_name(*v) : "") << '\n';
  }
  return out.str();
}

/// Per-sample value of one metric key; nullopt when missing or degenerate.
std::optional<double> sample_metric(const MetricSample& s, const std::string& key) {
  if (key == "f1") return s.f1;
  std::string attr_name = metric_key_attribute(key);
  std::string metric = metric_key_metric(key);
  for (const auto& [attr, r] : s.fairness) {
    if (attribute_name_str(attr) != attr_name) continue;
    auto pick = [](const MetricValue& mv) -> std::optional<double> {
      if (mv.degenerate()) return std::nullopt;
      return mv.value;
    };
    if (metric == "dpr") return pick(r.dpr);
    if (metric == "eod") return pick(r.eod);
    if (metric == "tppr") return r.tppr ? pick(*r.tppr) : std::nullopt;
    if (metric == "fprr") return r.fprr ? pick(*r.fprr) : std::nullopt;
    if (metric == "eor") return r.eor ? pick(*r.eor) : std::nullopt;
    return std::nullopt;
  }
  return std::nullopt;
}

json comparison_to_json(const ComparisonReport& cmp) {
  json doc;
  doc["schema_version"] = cmp.schema_version;
  doc["tool_version"] = cmp.tool_version;
  doc["dataset"] = cmp.dataset;
  doc["model"] = cmp.model;
  doc["before_mitigation"] = cmp.before_mitigation;
  doc["after_mitigation"] = cmp.after_mitigation;
  json metrics = json::object();
  for (const auto& [key, m] : cmp.metrics) {
    metrics[key] = {{"before_mean", m.before_mean},
                    {"after_mean", m.after_mean},
                    {"delta", m.delta},
                    {"higher_is_better", m.higher_is_better},
                    {"w_statistic", m.wilcoxon.statistic},
                    {"p_value", m.wilcoxon.p_value},
                    {"n_effective", m.wilcoxon.n_effective},
                    {"method",
                     m.wilcoxon.method == WilcoxonMethod::Exact ? "exact" : "normal_approx"},
                    {"all_zero_differences", m.wilcoxon.all_zero_differences}};
  }
  doc["metrics"] = std::move(metrics);
  return doc;
}

std::string render_comparison_text(const ComparisonReport& cmp) {
  std::ostringstream out;
  out << "Mitigation comparison (one-sided Wilcoxon signed-rank, improvement direction)\n";
  out << "dataset: " << cmp.dataset << "  model: " << cmp.model << "\n";
  out << "before: " << cmp.before_mitigation << "  after: " << cmp.after_mitigation << "\n\n";
  char line[160];
  std::snprintf(line, sizeof(line), "%-22s %10s %10s %10s %9s %4s %s\n", "metric", "before",
                "after", "delta", "p", "n", "method");
  out << line;
  for (const auto& [key, m] : cmp.metrics) {
    const char* method = m.wilcoxon.all_zero_differences
                             ? "all-zero"
                             : (m.wilcoxon.method == WilcoxonMethod::Exact ? "exact" : "normal");
    std::snprintf(line, sizeof(line), "%-22s %10s %10s %10s %9s %4zu %s\n", key.c_str(),
                  sig6(m.before_mean).c_str(), sig6(m.after_mean).c_str(), sig6(m.delta).c_str(),
                  sig6(m.wilcoxon.p_value).c_str(), m.wilcoxon.n_effective, method);
    out << line;
  }
  if (cmp.metrics.empty()) out << "(no shared metrics)\n";
  return out.str();
}

std::string render_comparison_csv(const ComparisonReport& cmp) {
  std::ostringstream out;
  out << "dataset,model,before_mitigation,after_mitigation,metric,before_mean,after_mean,delta,"
         "p_value,n_effective,method\n";
  for (const auto& [key, m] : cmp.metrics) {
    out << cmp.dataset << ',' << cmp.model << ',' << cmp.before_mitigation << ','
        << cmp.after_mitigation << ',' << key << ',' << sig6(m.before_mean) << ','
        << sig6(m.after_mean) << ',' << sig6(m.delta) << ',' << sig6(m.wilcoxon.p_value) << ','
        << m.wilcoxon.n_effective << ','
        << (m.wilcoxon.method == WilcoxonMethod::Exact ? "exact" : "normal_approx") << '\n';
  }
  return out.str();
}

}  // namespace

ReportFormat parse_report_format(const std::string& s) {
  if (s == "text") return ReportFormat::Text;
  if (s == "json") return ReportFormat::Json;
  if (s == "csv") return ReportFormat::Csv;
  throw Error(ErrorCode::ConfigError, "unknown format: " + s);
}

FairnessReport build_report(const ExperimentResult& result) {
  FairnessReport report;
  report.config_hash = hex64(fnv1a_hash(experiment_config_json(result.config)));
  report.master_seed = result.config.master_seed;
  report.dataset = result.dataset_id;
  report.model = model_kind_name(result.config.model);
  report.mitigation = mitigation_name(result.config.mitigation);
  report.samples = result.samples;
  if (result.samples.size() >= 2) report.metrics = aggregate(result.samples).metrics;
  return report;
}

std::optional<Verdict> metric_verdict(const std::string& key, const AggregateStat& stat) {
  std::string metric = metric_key_metric(key);
  if (metric == "dpr" || metric == "tppr" || metric == "fprr" || metric == "eor")
    return four_fifths_verdict(stat.mean);
  return std::nullopt;
}

std::string render_report(const FairnessReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::Json: return report_to_json(report).dump(2) + "\n";
    case ReportFormat::Text: return render_text(report);
    case ReportFormat::Csv: return render_csv(report);
  }
  throw Error(ErrorCode::ConfigError, "unknown report format enum value");
}

FairnessReport parse_report_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoError, std::string("invalid report JSON: ") + e.what());
  }
  FairnessReport report;
  try {
    report.schema_version = doc.at("schema_version").get<int>();
    if (report.schema_version != kReportSchemaVersion)
      throw Error(ErrorCode::IoError,
                  "unsupported report schema_version " + std::to_string(report.schema_version));
    const json& prov = doc.at("provenance");
    report.config_hash = prov.at("config_hash").get<std::string>();
    report.master_seed = prov.at("master_seed").get<std::uint64_t>();
    report.tool_version = prov.at("tool_version").get<std::string>();
    report.dataset = doc.at("dataset").get<std::string>();
    report.model = doc.at("model").get<std::string>();
    report.mitigation = doc.at("mitigation").get<std::string>();
    for (const auto& [key, j] : doc.at("metrics").items())
      report.metrics[key] = stat_from_json(j);
    for (const json& js : doc.at("samples")) {
      MetricSample s;
      s.iteration = js.at("iteration").get<std::size_t>();
      s.fold = js.at("fold").get<std::size_t>();
      s.f1 = js.at("f1").get<double>();
      for (const auto& [name, jf] : js.at("fairness").items()) {
        AttributeName attr = parse_attribute_name(name);
        s.fairness[attr] = fairness_result_from_json(attr, jf);
      }
      report.samples.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoError, std::string("malformed report JSON: ") + e.what());
  }
  return report;
}

FairnessReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open report: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_report_json(buf.str());
}

ComparisonReport compare_reports(const FairnessReport& before, const FairnessReport& after) {
  ComparisonReport cmp;
  cmp.dataset = before.dataset;
  cmp.model = before.model;
  cmp.before_mitigation = before.mitigation;
  cmp.after_mitigation = after.mitigation;

  auto index_samples = [](const FairnessReport& r) {
    std::map<std::pair<std::size_t, std::size_t>, const MetricSample*> idx;
    for (const MetricSample& s : r.samples) {
      if (!idx.emplace(std::make_pair(s.iteration, s.fold), &s).second)
        throw Error(ErrorCode::IoError, "duplicate (iteration, fold) sample in report");
    }
    return idx;
  };
  auto before_idx = index_samples(before);
  auto after_idx = index_samples(after);
  if (before_idx.size() != after_idx.size())
    throw Error(ErrorCode::LengthMismatch, "reports pair different numbers of samples");
  for (const auto& [key, _] : before_idx)
    if (!after_idx.count(key))
      throw Error(ErrorCode::LengthMismatch, "reports cover different (iteration, fold) sets");

  std::set<std::string> keys;
  auto collect_keys = [&](const FairnessReport& r) {
    for (const MetricSample& s : r.samples) {
      keys.insert("f1");
      for (const auto& [attr, res] : s.fairness) {
        std::string base = attribute_name_str(attr);
        keys.insert(base + ".dpr");
        keys.insert(base + ".eod");
        if (res.tppr) keys.insert(base + ".tppr");
        if (res.fprr) keys.insert(base + ".fprr");
        if (res.eor) keys.insert(base + ".eor");
      }
    }
  };
  collect_keys(before);
  collect_keys(after);

  for (const std::string& key : keys) {
    std::vector<double> b_vals, a_vals;
    for (const auto& [pair_key, b_sample] : before_idx) {
      const MetricSample* a_sample = after_idx.at(pair_key);
      auto b = sample_metric(*b_sample, key);
      auto a = sample_metric(*a_sample, key);
      if (b && a) {
        b_vals.push_back(*b);
        a_vals.push_back(*a);
      }
    }
    if (b_vals.empty()) continue;
    MetricComparison m;
    m.higher_is_better = metric_key_metric(key) != "eod";
    double b_sum = 0.0, a_sum = 0.0;
    for (double v : b_vals) b_sum += v;
    for (double v : a_vals) a_sum += v;
    m.before_mean = b_sum / static_cast<double>(b_vals.size());
    m.after_mean = a_sum / static_cast<double>(a_vals.size());
    m.delta = m.after_mean - m.before_mean;
    // wilcoxon_one_sided(x, y) tests median(y - x) > 0; improvement for EOD
    // means the difference metric went down.
    m.wilcoxon = m.higher_is_better ? wilcoxon_one_sided(b_vals, a_vals)
                                    : wilcoxon_one_sided(a_vals, b_vals);
    cmp.metrics[key] = m;
  }
  return cmp;
}

std::string render_comparison(const ComparisonReport& cmp, ReportFormat format) {
  switch (format) {
    case ReportFormat::Json: return comparison_to_json(cmp).dump(2) + "\n";
    case ReportFormat::Text: return render_comparison_text(cmp);
    case ReportFormat::Csv: return render_comparison_csv(cmp);
  }
  throw Error(ErrorCode::ConfigError, "unknown report format enum value");
}

}  // namespace fogfair
