#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "fogfair/experiment.hpp"
#include "fogfair/fairness.hpp"
#include "fogfair/report.hpp"
#include "fogfair/synth.hpp"

namespace py = pybind11;
using namespace fogfair;

namespace {

GroupAssignment make_groups(AttributeName attribute,
                            const std::map<std::string, int>& membership) {
  GroupAssignment ga;
  ga.attribute = attribute;
  ga.membership = membership;
  return ga;
}

PredictionSet make_predictions(const std::vector<std::string>& unit_ids,
                               const std::vector<int>& y_pred, const std::vector<int>& y_true,
                               const std::vector<double>& scores) {
  PredictionSet p;
  p.unit_ids = unit_ids;
  p.y_pred.assign(y_pred.begin(), y_pred.end());
  p.y_true.assign(y_true.begin(), y_true.end());
  p.scores = scores;
  return p;
}

py::dict fairness_dict(const FairnessResult& r) {
  auto mv = [](const MetricValue& m) {
    py::dict d;
    d["value"] = m.value;
    py::list flags;
    for (DegenerateFlag f : m.flags) flags.append(degenerate_flag_name(f));
    d["flags"] = flags;
    return d;
  };
  py::dict d;
  d["attribute"] = attribute_name_str(r.attribute);
  d["dpr"] = mv(r.dpr);
  d["eod"] = mv(r.eod);
  if (r.tppr) d["tppr"] = mv(*r.tppr);
  if (r.fprr) d["fprr"] = mv(*r.fprr);
  if (r.eor) d["eor"] = mv(*r.eor);
  d["group_size"] = py::make_tuple(r.group_size[0], r.group_size[1]);
  return d;
}

}  // namespace

PYBIND11_MODULE(_fogfair, m) {
  m.doc() = "Group-fairness auditing for wearable FOG detectors";
  m.attr("__version__") = kToolVersion;

  py::register_exception<Error>(m, "FogfairError");

  m.def("attribute_names", [] {
    return std::vector<std::string>{"sex", "age", "disease_duration", "fog_phenotype"};
  });

  m.def(
      "compute_fairness",
      [](const std::vector<std::string>& unit_ids, const std::vector<int>& y_pred,
         const std::vector<int>& y_true, const std::map<std::string, int>& membership,
         const std::string& attribute) {
        PredictionSet p = make_predictions(unit_ids, y_pred, y_true,
                                           std::vector<double>(unit_ids.size(), 0.0));
        FairnessResult r =
            compute_fairness(p, make_groups(parse_attribute_name(attribute), membership));
        return fairness_dict(r);
      },
      py::arg("unit_ids"), py::arg("y_pred"), py::arg("y_true"), py::arg("membership"),
      py::arg("attribute") = "sex",
      "All fairness metrics defined for the attribute over a prediction set");

  m.def(
      "four_fifths_verdict",
      [](double value) { return std::string(verdict_name(four_fifths_verdict(value))); },
      py::arg("metric_value"));

  m.def(
      "wilcoxon_one_sided",
      [](const std::vector<double>& before, const std::vector<double>& after) {
        WilcoxonResult r = wilcoxon_one_sided(before, after);
        py::dict d;
        d["statistic"] = r.statistic;
        d["p_value"] = r.p_value;
        d["n_effective"] = r.n_effective;
        d["method"] = r.method == WilcoxonMethod::Exact ? "exact" : "normal_approx";
        d["all_zero_differences"] = r.all_zero_differences;
        return d;
      },
      py::arg("before"), py::arg("after"),
      "One-sided Wilcoxon signed-rank test of median(after - before) > 0");

  m.def(
      "generate_synth_dataset",
      [](const std::filesystem::path& out_dir, std::size_t n_subjects, double bias_ratio,
         double phenotype_mix, std::uint64_t seed) {
        SynthConfig cfg;
        cfg.n_subjects = n_subjects;
        cfg.bias_ratio = bias_ratio;
        cfg.phenotype_mix = phenotype_mix;
        cfg.seed = seed;
        generate_synth_dataset(out_dir, cfg);
      },
      py::arg("out_dir"), py::arg("n_subjects") = 24, py::arg("bias_ratio") = 2.0,
      py::arg("phenotype_mix") = 0.85, py::arg("seed") = 7,
      "Write the synthetic biased fixture dataset");

  m.def(
      "run_audit",
      [](const std::filesystem::path& config_path) {
        ExperimentConfig cfg = load_experiment_config(config_path);
        FairnessReport report = build_report(run_experiment(cfg));
        return render_report(report, ReportFormat::Json);
      },
      py::arg("config_path"),
      "Run the configured experiment and return the canonical JSON report");
}
