#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fogfair/evaluation.hpp"
#include "fogfair/forest.hpp"
#include "fogfair/ingest.hpp"
#include "fogfair/mitigation.hpp"
#include "fogfair/neural.hpp"

namespace fogfair {

enum class ModelKind { Forest, Neural };
enum class Mitigation { None, Threshold, Adversarial, AdversarialMultiHead, Transfer };

const char* model_kind_name(ModelKind kind);
ModelKind parse_model_kind(const std::string& s);
const char* mitigation_name(Mitigation m);
Mitigation parse_mitigation(const std::string& s);

struct ExperimentConfig {
  std::filesystem::path dataset_dir;
  ModelKind model = ModelKind::Forest;
  double window_seconds = 3.0;
  std::size_t n_quantiles = kDefaultQuantiles;
  std::size_t k_folds = 5;
  std::size_t n_iterations = 10;
  std::uint64_t master_seed = 0;
  FitScope scaling_scope = FitScope::TrainOnly;
  double min_episode_seconds = kDefaultMinEpisodeSeconds;
  std::vector<AttributeName> attributes;  // audited attributes, in report order

  Mitigation mitigation = Mitigation::None;
  AttributeName mitigation_attribute = AttributeName::Sex;  // threshold / single adversary
  FairnessCriterion threshold_criterion = FairnessCriterion::DemographicParity;
  std::size_t threshold_grid = kDefaultThresholdGrid;
  double alpha = 1.0;
  std::size_t adversary_hidden = 32;
  std::filesystem::path transfer_source_dir;  // required for Mitigation::Transfer
  std::size_t freeze_prefix = 2;              // weight-bearing layers kept frozen

  ForestConfig forest;  // rng_seed ignored; per-fold seeds are derived
  TrainConfig train;    // rng_seed ignored likewise
};

/// Reads a JSON experiment configuration. Relative dataset paths are
/// resolved against the config file's directory. Unknown keys error.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Canonical JSON form of the config (used for report provenance hashing).
std::string experiment_config_json(const ExperimentConfig& cfg);

struct ExperimentResult {
  std::string dataset_id;
  ExperimentConfig config;
  std::vector<FoldPlan> plans;        // one per iteration
  std::vector<MetricSample> samples;  // ordered by (iteration, fold)
};

/// Repeated stratified user-independent cross-validation. Per-(iteration,
/// fold) jobs run on up to FOGFAIR_THREADS workers; results land in
/// iteration-major slots, so output is identical for any worker count.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace fogfair
