#include "fogfair/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "fogfair/experiment.hpp"
#include "fogfair/report.hpp"
#include "fogfair/synth.hpp"
#include "fogfair/windowing.hpp"

namespace fogfair {
namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

void emit(const FairnessReport& report, const std::string& out_path, ReportFormat format) {
  if (!out_path.empty()) write_file(out_path, render_report(report, ReportFormat::Json));
  std::cout << render_report(report, format);
}

int run_validate(const std::string& dataset_dir) {
  Dataset ds = load_dataset(dataset_dir);
  std::set<std::string> subjects;
  std::size_t fog_samples = 0, total_samples = 0;
  for (const SensorRecording& rec : ds.recordings) {
    subjects.insert(rec.subject_id);
    total_samples += rec.labels.size();
    for (std::uint8_t l : rec.labels) fog_samples += l;
  }
  std::cout << "dataset '" << ds.dataset_id << "': " << ds.recordings.size() << " recordings, "
            << subjects.size() << " subjects, "
            << ds.recordings.front().sampling_rate_hz << " Hz, "
            << ds.recordings.front().channels.size() << " channels\n";
  std::cout << "FOG samples: " << fog_samples << " / " << total_samples << "\n";
  std::cout << "OK\n";
  return 0;
}

struct RunFlags {
  std::string config_path;
  std::string out_path;
  std::string format = "text";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> iterations;
  std::string mitigation;
};

int run_audit_like(const RunFlags& flags, bool is_audit) {
  ExperimentConfig cfg = load_experiment_config(flags.config_path);
  if (flags.seed) cfg.master_seed = *flags.seed;
  if (flags.iterations) cfg.n_iterations = *flags.iterations;
  if (is_audit) {
    // An audit measures the model as-is; mitigation belongs to `mitigate`.
    cfg.mitigation = Mitigation::None;
  } else {
    if (!flags.mitigation.empty()) cfg.mitigation = parse_mitigation(flags.mitigation);
    if (cfg.mitigation == Mitigation::None)
      throw Error(ErrorCode::ConfigError,
                  "mitigate needs a strategy: pass --mitigation or set it in the config");
  }
  ExperimentResult result = run_experiment(cfg);
  emit(build_report(result), flags.out_path, parse_report_format(flags.format));
  return 0;
}

int run_compare(const std::string& before_path, const std::string& after_path,
                const std::string& out_path, const std::string& format) {
  ComparisonReport cmp = compare_reports(load_report(before_path), load_report(after_path));
  if (!out_path.empty()) write_file(out_path, render_comparison(cmp, ReportFormat::Json));
  std::cout << render_comparison(cmp, parse_report_format(format));
  return 0;
}

int run_render(const std::string& results_path, const std::string& out_path,
               const std::string& format) {
  FairnessReport report = load_report(results_path);
  std::string rendered = render_report(report, parse_report_format(format));
  if (!out_path.empty())
    write_file(out_path, rendered);
  else
    std::cout << rendered;
  return 0;
}

int dispatch(int argc, const char* const* argv) {
  CLI::App app{"Group-fairness auditing for wearable FOG detectors"};
  app.require_subcommand(1);

  auto* validate = app.add_subcommand("validate-data", "Check dataset format invariants");
  std::string dataset_dir;
  validate->add_option("dataset", dataset_dir, "Dataset directory containing manifest.json")
      ->required();

  RunFlags audit_flags;
  auto* audit = app.add_subcommand("audit", "Cross-validated fairness audit, no mitigation");
  audit->add_option("--config", audit_flags.config_path, "Experiment config JSON")->required();
  audit->add_option("--out", audit_flags.out_path, "Write canonical JSON report here");
  audit->add_option("--format", audit_flags.format, "Stdout format: text, json, csv");
  audit->add_option("--seed", audit_flags.seed, "Override master seed");
  audit->add_option("--iterations", audit_flags.iterations, "Override iteration count");

  RunFlags mitigate_flags;
  auto* mitigate = app.add_subcommand("mitigate", "Audit with a bias mitigation strategy");
  mitigate->add_option("--config", mitigate_flags.config_path, "Experiment config JSON")
      ->required();
  mitigate->add_option("--out", mitigate_flags.out_path, "Write canonical JSON report here");
  mitigate->add_option("--format", mitigate_flags.format, "Stdout format: text, json, csv");
  mitigate->add_option("--seed", mitigate_flags.seed, "Override master seed");
  mitigate->add_option("--iterations", mitigate_flags.iterations, "Override iteration count");
  mitigate->add_option("--mitigation", mitigate_flags.mitigation,
                       "none, threshold, adversarial, adversarial-multihead, transfer");

  auto* compare = app.add_subcommand("compare", "Paired Wilcoxon test between two reports");
  std::string before_path, after_path, cmp_out, cmp_format = "text";
  compare->add_option("before", before_path, "Baseline report JSON")->required();
  compare->add_option("after", after_path, "Mitigated report JSON")->required();
  compare->add_option("--out", cmp_out, "Write canonical JSON comparison here");
  compare->add_option("--format", cmp_format, "Stdout format: text, json, csv");

  auto* report_cmd = app.add_subcommand("report", "Render a JSON report as text or CSV");
  std::string results_path, render_out, render_format = "text";
  report_cmd->add_option("results", results_path, "Report JSON produced by audit/mitigate")
      ->required();
  report_cmd->add_option("--out", render_out, "Write rendering here instead of stdout");
  report_cmd->add_option("--format", render_format, "text, json, csv");

  auto* synth = app.add_subcommand("synth", "Generate the synthetic biased fixture dataset");
  SynthConfig synth_cfg;
  std::string synth_out;
  synth->add_option("--out", synth_out, "Output dataset directory")->required();
  synth->add_option("--subjects", synth_cfg.n_subjects, "Subject count (multiple of 8)");
  synth->add_option("--seconds", synth_cfg.seconds_per_subject, "Recording length per subject");
  synth->add_option("--rate", synth_cfg.sampling_rate_hz, "Sampling rate in Hz");
  synth->add_option("--bias", synth_cfg.bias_ratio, "Strong-group tremor amplitude ratio");
  synth->add_option("--phenotype-mix", synth_cfg.phenotype_mix, "Tremulous episode fraction");
  synth->add_option("--seed", synth_cfg.seed, "Generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (validate->parsed()) return run_validate(dataset_dir);
  if (audit->parsed()) return run_audit_like(audit_flags, true);
  if (mitigate->parsed()) return run_audit_like(mitigate_flags, false);
  if (compare->parsed()) return run_compare(before_path, after_path, cmp_out, cmp_format);
  if (report_cmd->parsed()) return run_render(results_path, render_out, render_format);
  if (synth->parsed()) {
    generate_synth_dataset(synth_out, synth_cfg);
    std::cout << "wrote synthetic dataset to " << synth_out << "\n";
    return 0;
  }
  return 2;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  try {
    return dispatch(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::ConfigError ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace fogfair
