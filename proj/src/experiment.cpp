#include "fogfair/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <set>
#include <thread>

#include <json.hpp>

#include "fogfair/features.hpp"
#include "fogfair/phenotype.hpp"
#include "fogfair/windowing.hpp"

namespace fogfair {
namespace {

using nlohmann::json;

FitScope parse_fit_scope(const std::string& s) {
  if (s == "train_only") return FitScope::TrainOnly;
  if (s == "global") return FitScope::Global;
  throw Error(ErrorCode::ConfigError, "unknown scaling_scope: " + s);
}

const char* fit_scope_name(FitScope scope) {
  return scope == FitScope::TrainOnly ? "train_only" : "global";
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.window_seconds <= 0.0)
    throw Error(ErrorCode::ConfigError, "window_seconds must be positive");
  if (cfg.min_episode_seconds <= 0.0)
    throw Error(ErrorCode::ConfigError, "min_episode_seconds must be positive");
  if (cfg.k_folds < 2) throw Error(ErrorCode::ConfigError, "k_folds must be at least 2");
  if (cfg.n_iterations == 0) throw Error(ErrorCode::ConfigError, "n_iterations must be positive");
  if (cfg.n_quantiles == 0) throw Error(ErrorCode::ConfigError, "n_quantiles must be positive");
  if (cfg.attributes.empty())
    throw Error(ErrorCode::ConfigError, "attributes must name at least one protected attribute");
  std::set<AttributeName> seen;
  for (AttributeName a : cfg.attributes)
    if (!seen.insert(a).second)
      throw Error(ErrorCode::ConfigError,
                  std::string("duplicate attribute: ") + attribute_name_str(a));
  if (cfg.mitigation == Mitigation::Adversarial ||
      cfg.mitigation == Mitigation::AdversarialMultiHead) {
    if (cfg.model != ModelKind::Neural)
      throw Error(ErrorCode::ConfigError, "adversarial mitigation requires the neural model");
  }
  if (cfg.mitigation == Mitigation::Threshold || cfg.mitigation == Mitigation::Adversarial) {
    if (attribute_level(cfg.mitigation_attribute) != AttributeLevel::Subject)
      throw Error(ErrorCode::ConfigError,
                  "mitigation_attribute must be a subject-level attribute");
  }
  if (cfg.mitigation == Mitigation::AdversarialMultiHead) {
    bool any = false;
    for (AttributeName a : cfg.attributes)
      if (attribute_level(a) == AttributeLevel::Subject) any = true;
    if (!any)
      throw Error(ErrorCode::ConfigError,
                  "multi-head adversarial mitigation needs subject-level attributes to audit");
  }
  if (cfg.mitigation == Mitigation::Transfer && cfg.transfer_source_dir.empty())
    throw Error(ErrorCode::ConfigError, "transfer mitigation requires transfer_source_dir");
  if (cfg.alpha < 0.0) throw Error(ErrorCode::ConfigError, "alpha must be non-negative");
  if (cfg.threshold_grid == 0)
    throw Error(ErrorCode::ConfigError, "threshold_grid must be positive");
}

std::size_t worker_count(std::size_t n_jobs) {
  std::size_t n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("FOGFAIR_THREADS")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || v == 0)
      throw Error(ErrorCode::ConfigError, "FOGFAIR_THREADS must be a positive integer");
    n = static_cast<std::size_t>(v);
  }
  return std::clamp<std::size_t>(n, 1, std::max<std::size_t>(n_jobs, 1));
}

struct FoldJobContext {
  const ExperimentConfig& cfg;
  const Dataset& dataset;
  // Subject-level group assignments for every audited subject-level
  // attribute, in cfg.attributes order (phenotype handled separately).
  const std::vector<GroupAssignment>& subject_attrs;
  const std::vector<AttributeName>& subject_attr_names;
  // Harmonized, globally scaled source windows for transfer pretraining.
  const std::vector<Matrix>* source_inputs = nullptr;
  const std::vector<std::uint8_t>* source_labels = nullptr;
};

std::vector<int> window_groups(const std::vector<Window>& windows, const GroupAssignment& ga) {
  std::vector<int> out;
  out.reserve(windows.size());
  for (const Window& w : windows) out.push_back(ga.membership.at(w.subject_id));
  return out;
}

std::vector<std::uint8_t> to_group_bytes(const std::vector<int>& groups) {
  return {groups.begin(), groups.end()};
}

MetricSample run_fold(const FoldJobContext& ctx, const FoldPlan& plan, std::size_t iteration,
                      std::size_t fold, std::uint64_t job_seed) {
  const ExperimentConfig& cfg = ctx.cfg;

  std::vector<const SensorRecording*> train_recs, test_recs;
  for (const SensorRecording& rec : ctx.dataset.recordings) {
    bool in_test = plan.assignments.at(rec.subject_id) == fold;
    (in_test ? test_recs : train_recs).push_back(&rec);
  }

  ScalingParams scaling =
      cfg.scaling_scope == FitScope::TrainOnly
          ? fit_scaling(train_recs, FitScope::TrainOnly)
          : fit_scaling(ctx.dataset.recordings, FitScope::Global);

  auto collect_windows = [&](const std::vector<const SensorRecording*>& recs) {
    std::vector<Window> out;
    for (const SensorRecording* rec : recs) {
      WindowSet ws = segment(apply_scaling(*rec, scaling), cfg.window_seconds);
      for (Window& w : ws.windows) out.push_back(std::move(w));
    }
    return out;
  };
  std::vector<Window> train_windows = collect_windows(train_recs);
  std::vector<Window> test_windows = collect_windows(test_recs);

  auto labels_of = [](const std::vector<Window>& ws) {
    std::vector<std::uint8_t> out;
    out.reserve(ws.size());
    for (const Window& w : ws) out.push_back(w.label);
    return out;
  };
  std::vector<std::uint8_t> train_labels = labels_of(train_windows);
  std::vector<std::uint8_t> test_labels = labels_of(test_windows);

  // Group vector over calibration windows for threshold fitting.
  const GroupAssignment* mitigation_assignment = nullptr;
  if (cfg.mitigation == Mitigation::Threshold || cfg.mitigation == Mitigation::Adversarial) {
    for (std::size_t i = 0; i < ctx.subject_attr_names.size(); ++i)
      if (ctx.subject_attr_names[i] == cfg.mitigation_attribute)
        mitigation_assignment = &ctx.subject_attrs[i];
    if (mitigation_assignment == nullptr)
      throw Error(ErrorCode::ConfigError,
                  "mitigation_attribute must also be listed in attributes");
  }

  std::vector<double> test_scores;
  std::vector<double> calib_scores;  // threshold mitigation only
  const std::uint64_t model_seed = derive_seed(job_seed, "model");

  if (cfg.model == ModelKind::Forest) {
    std::vector<FeatureVector> train_feats, test_feats;
    train_feats.reserve(train_windows.size());
    test_feats.reserve(test_windows.size());
    for (const Window& w : train_windows) train_feats.push_back(ecdf_features(w, cfg.n_quantiles));
    for (const Window& w : test_windows) test_feats.push_back(ecdf_features(w, cfg.n_quantiles));
    ForestConfig fc = cfg.forest;
    fc.rng_seed = model_seed;
    ForestModel model = train_forest(train_feats, train_labels, fc);
    test_scores = predict_scores(model, test_feats);
    if (cfg.mitigation == Mitigation::Threshold)
      calib_scores = predict_scores(model, train_feats);
  } else {
    std::vector<Matrix> train_inputs, test_inputs;
    train_inputs.reserve(train_windows.size());
    test_inputs.reserve(test_windows.size());
    for (const Window& w : train_windows) train_inputs.push_back(w.data);
    for (const Window& w : test_windows) test_inputs.push_back(w.data);

    TrainConfig tc = cfg.train;
    tc.rng_seed = model_seed;
    tc.class_weights = inverse_frequency_weights(train_labels);

    NeuralModel model;
    if (cfg.mitigation == Mitigation::Adversarial ||
        cfg.mitigation == Mitigation::AdversarialMultiHead) {
      AdversaryConfig adv;
      adv.hidden_dim = cfg.adversary_hidden;
      adv.alpha = cfg.alpha;
      adv.learning_rate = cfg.train.learning_rate;
      std::vector<std::vector<std::uint8_t>> group_labels;
      if (cfg.mitigation == Mitigation::Adversarial) {
        adv.mode = AdversaryMode::SingleAttribute;
        adv.attributes = {cfg.mitigation_attribute};
        group_labels.push_back(
            to_group_bytes(window_groups(train_windows, *mitigation_assignment)));
      } else {
        adv.mode = AdversaryMode::MultiHead;
        for (std::size_t i = 0; i < ctx.subject_attr_names.size(); ++i) {
          adv.attributes.push_back(ctx.subject_attr_names[i]);
          group_labels.push_back(
              to_group_bytes(window_groups(train_windows, ctx.subject_attrs[i])));
        }
      }
      model = train_debiased(train_inputs, train_labels, group_labels, tc, adv);
    } else if (cfg.mitigation == Mitigation::Transfer) {
      TrainConfig pre = cfg.train;
      pre.rng_seed = derive_seed(job_seed, "pretrain");
      pre.class_weights = inverse_frequency_weights(*ctx.source_labels);
      NeuralModel base = train_neural(*ctx.source_inputs, *ctx.source_labels, pre);
      model = transfer_finetune(base, train_inputs, train_labels, cfg.freeze_prefix, tc);
    } else {
      model = train_neural(train_inputs, train_labels, tc);
    }
    test_scores = predict_scores(model, test_inputs);
    if (cfg.mitigation == Mitigation::Threshold)
      calib_scores = predict_scores(model, train_inputs);
  }

  std::vector<std::uint8_t> y_pred;
  if (cfg.mitigation == Mitigation::Threshold) {
    ThresholdPolicy policy =
        fit_thresholds(calib_scores, train_labels,
                       window_groups(train_windows, *mitigation_assignment),
                       cfg.threshold_criterion, cfg.threshold_grid);
    y_pred = apply_thresholds(test_scores, window_groups(test_windows, *mitigation_assignment),
                              policy);
  } else {
    y_pred.reserve(test_scores.size());
    for (double s : test_scores) y_pred.push_back(s >= 0.5 ? 1 : 0);
  }

  MetricSample sample;
  sample.iteration = iteration;
  sample.fold = fold;
  sample.f1 = macro_f1(y_pred, test_labels);

  PredictionSet preds;
  preds.unit_ids.reserve(test_windows.size());
  for (const Window& w : test_windows) preds.unit_ids.push_back(w.unit_id());
  preds.y_pred = y_pred;
  preds.y_true = test_labels;
  preds.scores = test_scores;

  for (std::size_t i = 0; i < ctx.subject_attr_names.size(); ++i) {
    const GroupAssignment& subject_ga = ctx.subject_attrs[i];
    GroupAssignment ga;
    ga.attribute = subject_ga.attribute;
    ga.dichotomization_threshold = subject_ga.dichotomization_threshold;
    ga.flags = subject_ga.flags;
    for (const Window& w : test_windows)
      ga.membership[w.unit_id()] = subject_ga.membership.at(w.subject_id);
    sample.fairness[ga.attribute] = compute_fairness(preds, ga);
  }

  bool want_phenotype = std::find(cfg.attributes.begin(), cfg.attributes.end(),
                                  AttributeName::FogPhenotype) != cfg.attributes.end();
  if (want_phenotype) {
    // Episodes come from the unscaled signal; min-max scaling is affine per
    // channel and would distort the magnitude spectrum.
    std::vector<Episode> episodes;
    for (const SensorRecording* rec : test_recs)
      for (Episode& ep : extract_episodes(*rec, cfg.min_episode_seconds))
        episodes.push_back(std::move(ep));

    FairnessResult result;
    result.attribute = AttributeName::FogPhenotype;
    if (episodes.empty()) {
      result.dpr.flags.insert(DegenerateFlag::EmptyGroup);
      result.eod.flags.insert(DegenerateFlag::EmptyGroup);
    } else {
      double rate = ctx.dataset.recordings.front().sampling_rate_hz;
      GroupAssignment episode_ga = assign_phenotype_groups(episodes, rate);

      // A window inherits the phenotype of the episode containing its last
      // sample (the sample that determined its label); windows outside all
      // episodes carry no phenotype and are excluded.
      std::map<std::string, std::vector<const Episode*>> by_recording;
      for (const Episode& ep : episodes) by_recording[ep.recording_id].push_back(&ep);

      PredictionSet sub;
      GroupAssignment ga;
      ga.attribute = AttributeName::FogPhenotype;
      ga.flags = episode_ga.flags;
      for (std::size_t i = 0; i < test_windows.size(); ++i) {
        const Window& w = test_windows[i];
        std::size_t window_len = w.data.rows();
        std::size_t last = w.start_index + window_len - 1;
        auto it = by_recording.find(w.recording_id);
        if (it == by_recording.end()) continue;
        for (const Episode* ep : it->second) {
          if (ep->start_index <= last && last < ep->end_index) {
            std::string id = w.unit_id();
            sub.unit_ids.push_back(id);
            sub.y_pred.push_back(y_pred[i]);
            sub.y_true.push_back(test_labels[i]);
            sub.scores.push_back(test_scores[i]);
            ga.membership[id] = episode_ga.membership.at(ep->unit_id());
            break;
          }
        }
      }
      result = compute_fairness(sub, ga);
    }
    sample.fairness[AttributeName::FogPhenotype] = result;
  }

  return sample;
}

}  // namespace

const char* model_kind_name(ModelKind kind) {
  return kind == ModelKind::Forest ? "forest" : "neural";
}

ModelKind parse_model_kind(const std::string& s) {
  if (s == "forest") return ModelKind::Forest;
  if (s == "neural") return ModelKind::Neural;
  throw Error(ErrorCode::ConfigError, "unknown model: " + s);
}

const char* mitigation_name(Mitigation m) {
  switch (m) {
    case Mitigation::None: return "none";
    case Mitigation::Threshold: return "threshold";
    case Mitigation::Adversarial: return "adversarial";
    case Mitigation::AdversarialMultiHead: return "adversarial-multihead";
    case Mitigation::Transfer: return "transfer";
  }
  throw Error(ErrorCode::ConfigError, "unknown mitigation enum value");
}

Mitigation parse_mitigation(const std::string& s) {
  if (s == "none") return Mitigation::None;
  if (s == "threshold") return Mitigation::Threshold;
  if (s == "adversarial") return Mitigation::Adversarial;
  if (s == "adversarial-multihead") return Mitigation::AdversarialMultiHead;
  if (s == "transfer") return Mitigation::Transfer;
  throw Error(ErrorCode::ConfigError, "unknown mitigation: " + s);
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open config file: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, "invalid JSON in " + path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::ConfigError, "config root must be an object");

  static const std::set<std::string> known = {
      "dataset_dir",     "model",          "window_seconds",       "n_quantiles",
      "k_folds",         "n_iterations",   "master_seed",          "scaling_scope",
      "min_episode_seconds", "attributes", "mitigation",           "mitigation_attribute",
      "threshold_criterion", "threshold_grid", "alpha",            "adversary_hidden",
      "transfer_source_dir", "freeze_prefix",  "forest",           "train"};
  for (const auto& [key, _] : doc.items())
    if (!known.count(key)) throw Error(ErrorCode::ConfigError, "unknown config key: " + key);

  ExperimentConfig cfg;
  try {
    const std::filesystem::path base = path.has_parent_path()
                                           ? path.parent_path()
                                           : std::filesystem::path(".");
    auto resolve = [&](const std::string& p) {
      std::filesystem::path fp(p);
      return fp.is_absolute() ? fp : base / fp;
    };
    cfg.dataset_dir = resolve(doc.at("dataset_dir").get<std::string>());
    cfg.model = parse_model_kind(doc.at("model").get<std::string>());
    cfg.window_seconds = doc.value("window_seconds", cfg.window_seconds);
    cfg.n_quantiles = doc.value("n_quantiles", cfg.n_quantiles);
    cfg.k_folds = doc.value("k_folds", cfg.k_folds);
    cfg.n_iterations = doc.value("n_iterations", cfg.n_iterations);
    cfg.master_seed = doc.value("master_seed", cfg.master_seed);
    if (doc.contains("scaling_scope"))
      cfg.scaling_scope = parse_fit_scope(doc.at("scaling_scope").get<std::string>());
    cfg.min_episode_seconds = doc.value("min_episode_seconds", cfg.min_episode_seconds);
    if (doc.contains("attributes")) {
      for (const json& a : doc.at("attributes"))
        cfg.attributes.push_back(parse_attribute_name(a.get<std::string>()));
    } else {
      cfg.attributes = {AttributeName::Sex, AttributeName::Age, AttributeName::DiseaseDuration,
                        AttributeName::FogPhenotype};
    }
    if (doc.contains("mitigation"))
      cfg.mitigation = parse_mitigation(doc.at("mitigation").get<std::string>());
    if (doc.contains("mitigation_attribute"))
      cfg.mitigation_attribute =
          parse_attribute_name(doc.at("mitigation_attribute").get<std::string>());
    if (doc.contains("threshold_criterion"))
      cfg.threshold_criterion =
          parse_fairness_criterion(doc.at("threshold_criterion").get<std::string>());
    cfg.threshold_grid = doc.value("threshold_grid", cfg.threshold_grid);
    cfg.alpha = doc.value("alpha", cfg.alpha);
    cfg.adversary_hidden = doc.value("adversary_hidden", cfg.adversary_hidden);
    if (doc.contains("transfer_source_dir"))
      cfg.transfer_source_dir = resolve(doc.at("transfer_source_dir").get<std::string>());
    cfg.freeze_prefix = doc.value("freeze_prefix", cfg.freeze_prefix);
    if (doc.contains("forest")) {
      const json& f = doc.at("forest");
      for (const auto& [key, _] : f.items())
        if (key != "n_trees" && key != "max_features")
          throw Error(ErrorCode::ConfigError, "unknown forest config key: " + key);
      cfg.forest.n_trees = f.value("n_trees", cfg.forest.n_trees);
      cfg.forest.max_features = f.value("max_features", cfg.forest.max_features);
    }
    if (doc.contains("train")) {
      const json& t = doc.at("train");
      for (const auto& [key, _] : t.items())
        if (key != "learning_rate" && key != "epochs" && key != "batch_size")
          throw Error(ErrorCode::ConfigError, "unknown train config key: " + key);
      cfg.train.learning_rate = t.value("learning_rate", cfg.train.learning_rate);
      cfg.train.epochs = t.value("epochs", cfg.train.epochs);
      cfg.train.batch_size = t.value("batch_size", cfg.train.batch_size);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, "malformed config " + path.string() + ": " + e.what());
  }
  validate_config(cfg);
  return cfg;
}

std::string experiment_config_json(const ExperimentConfig& cfg) {
  json doc;
  doc["dataset_dir"] = cfg.dataset_dir.generic_string();
  doc["model"] = model_kind_name(cfg.model);
  doc["window_seconds"] = cfg.window_seconds;
  doc["n_quantiles"] = cfg.n_quantiles;
  doc["k_folds"] = cfg.k_folds;
  doc["n_iterations"] = cfg.n_iterations;
  doc["master_seed"] = cfg.master_seed;
  doc["scaling_scope"] = fit_scope_name(cfg.scaling_scope);
  doc["min_episode_seconds"] = cfg.min_episode_seconds;
  json attrs = json::array();
  for (AttributeName a : cfg.attributes) attrs.push_back(attribute_name_str(a));
  doc["attributes"] = std::move(attrs);
  doc["mitigation"] = mitigation_name(cfg.mitigation);
  doc["mitigation_attribute"] = attribute_name_str(cfg.mitigation_attribute);
  doc["threshold_criterion"] = fairness_criterion_name(cfg.threshold_criterion);
  doc["threshold_grid"] = cfg.threshold_grid;
  doc["alpha"] = cfg.alpha;
  doc["adversary_hidden"] = cfg.adversary_hidden;
  doc["transfer_source_dir"] = cfg.transfer_source_dir.generic_string();
  doc["freeze_prefix"] = cfg.freeze_prefix;
  doc["forest"] = {{"n_trees", cfg.forest.n_trees}, {"max_features", cfg.forest.max_features}};
  doc["train"] = {{"learning_rate", cfg.train.learning_rate},
                  {"epochs", cfg.train.epochs},
                  {"batch_size", cfg.train.batch_size}};
  return doc.dump();
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);

  Dataset dataset = load_dataset(cfg.dataset_dir);

  std::vector<SensorRecording> source_recs;
  std::vector<Matrix> source_inputs;
  std::vector<std::uint8_t> source_labels;
  if (cfg.mitigation == Mitigation::Transfer) {
    Dataset source = load_dataset(cfg.transfer_source_dir);
    auto [harmonized_source, harmonized_target] =
        harmonize_pair(source.recordings, dataset.recordings);
    source_recs = std::move(harmonized_source);
    dataset.recordings = std::move(harmonized_target);
    if (cfg.model == ModelKind::Neural) {
      // Pretraining sees the whole source domain under its own global scaling.
      ScalingParams source_scaling = fit_scaling(source_recs, FitScope::Global);
      for (const SensorRecording& rec : source_recs) {
        WindowSet ws = segment(apply_scaling(rec, source_scaling), cfg.window_seconds);
        for (Window& w : ws.windows) {
          source_inputs.push_back(std::move(w.data));
          source_labels.push_back(w.label);
        }
      }
    }
  }

  std::vector<AttributeName> subject_attr_names;
  std::vector<GroupAssignment> subject_attrs;
  for (AttributeName a : cfg.attributes) {
    if (attribute_level(a) != AttributeLevel::Subject) continue;
    subject_attr_names.push_back(a);
    subject_attrs.push_back(dichotomize(dataset.metadata, a));
  }

  std::vector<std::string> subjects;
  for (const SubjectMetadata& m : dataset.metadata) subjects.push_back(m.subject_id);
  std::sort(subjects.begin(), subjects.end());

  ExperimentResult result;
  result.dataset_id = dataset.dataset_id;
  result.config = cfg;
  result.plans.reserve(cfg.n_iterations);
  for (std::size_t it = 0; it < cfg.n_iterations; ++it)
    result.plans.push_back(plan_folds(subjects, subject_attrs, cfg.k_folds,
                                      derive_seed(cfg.master_seed, "iteration", it)));

  FoldJobContext ctx{cfg,
                     dataset,
                     subject_attrs,
                     subject_attr_names,
                     source_inputs.empty() ? nullptr : &source_inputs,
                     source_labels.empty() ? nullptr : &source_labels};

  const std::size_t n_jobs = cfg.n_iterations * cfg.k_folds;
  result.samples.resize(n_jobs);
  std::vector<std::exception_ptr> failures(n_jobs);

  auto run_job = [&](std::size_t j) {
    std::size_t it = j / cfg.k_folds;
    std::size_t fold = j % cfg.k_folds;
    result.samples[j] =
        run_fold(ctx, result.plans[it], it, fold, derive_seed(cfg.master_seed, "job", j));
  };

  const std::size_t n_workers = worker_count(n_jobs);
  if (n_workers <= 1) {
    for (std::size_t j = 0; j < n_jobs; ++j) {
      try {
        run_job(j);
      } catch (...) {
        failures[j] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    auto worker = [&] {
      for (;;) {
        std::size_t j = next.fetch_add(1);
        if (j >= n_jobs || abort.load()) return;
        try {
          run_job(j);
        } catch (...) {
          failures[j] = std::current_exception();
          abort.store(true);
        }
      }
    };
    std::vector<std::thread> threads;
    threads.reserve(n_workers);
    for (std::size_t t = 0; t < n_workers; ++t) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }
  for (const std::exception_ptr& e : failures)
    if (e) std::rethrow_exception(e);

  return result;
}

}  // namespace fogfair
