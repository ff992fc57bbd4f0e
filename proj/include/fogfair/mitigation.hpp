#pragma once

#include <cstdint>
#include <vector>

#include "fogfair/fairness.hpp"
#include "fogfair/neural.hpp"

namespace fogfair {

enum class FairnessCriterion { DemographicParity, TruePositiveParity, EqualizedOdds };

const char* fairness_criterion_name(FairnessCriterion c);
FairnessCriterion parse_fairness_criterion(const std::string& s);

struct ThresholdPolicy {
  double t0 = 0.5;
  double t1 = 0.5;
  FairnessCriterion criterion = FairnessCriterion::DemographicParity;
  double achieved_disparity = 0.0;  // on the calibration set
};

constexpr double kDisparityTolerance = 0.02;
constexpr std::size_t kDefaultThresholdGrid = 100;

/// Exhaustive search over (grid_resolution + 1)^2 threshold pairs. Among
/// pairs whose calibration disparity is <= 0.02 (or ties the minimum
/// achievable when none is), picks the pair with the best calibration macro
/// F1; ties break toward the lexicographically smaller (t0, t1).
/// group_of[i] must be 0 or 1.
ThresholdPolicy fit_thresholds(const std::vector<double>& scores,
                               const std::vector<std::uint8_t>& y_true,
                               const std::vector<int>& group_of, FairnessCriterion criterion,
                               std::size_t grid_resolution = kDefaultThresholdGrid);

/// y_pred = 1 iff score >= the unit's group threshold.
std::vector<std::uint8_t> apply_thresholds(const std::vector<double>& scores,
                                           const std::vector<int>& group_of,
                                           const ThresholdPolicy& policy);

enum class AdversaryMode { SingleAttribute, MultiHead };

struct AdversaryConfig {
  std::vector<AttributeName> attributes;
  std::size_t hidden_dim = 32;
  double alpha = 1.0;
  AdversaryMode mode = AdversaryMode::SingleAttribute;
  double learning_rate = 0.05;
};

/// Two-layer MLP over the predictor's penultimate representation with one
/// 2-way output head per protected attribute.
struct AdversaryModel {
  Layer shared;               // Dense rep_dim -> hidden, ReLU applied after
  std::vector<Layer> heads;   // Dense hidden -> 2 each
  bool frozen = false;
};

AdversaryModel make_adversary(std::size_t rep_dim, std::size_t hidden_dim,
                              std::size_t n_attributes, std::uint64_t seed);

/// All-zero weights; with alpha = 0 this makes debiased training collapse to
/// plain training exactly.
AdversaryModel make_zero_adversary(std::size_t rep_dim, std::size_t hidden_dim,
                                   std::size_t n_attributes);

struct StepDiagnostics {
  // max over weight tensors of |<g_P - proj(g_P), g_A>|, long double sums
  double max_projection_residual = 0.0;
  double predictor_loss = 0.0;
  double adversary_loss = 0.0;
};

/// One alternating update: the adversary takes an SGD step on its own loss
/// first, then the predictor moves along
///   g = grad(L_P) - proj_{grad(L_A)}(grad(L_P)) - alpha * grad(L_A)
/// computed per weight tensor against the refreshed adversary.
StepDiagnostics adversarial_step(NeuralModel& model, AdversaryModel& adversary,
                                 const std::vector<const Matrix*>& batch,
                                 const std::vector<std::uint8_t>& labels,
                                 const std::vector<std::vector<std::uint8_t>>& group_labels,
                                 double alpha, double predictor_lr, double adversary_lr,
                                 const std::array<double, 2>& class_weights);

/// Debiased training; group_labels holds one 0/1 vector per configured
/// attribute, aligned with inputs. Returns the predictor only. When
/// diagnostics is non-null, one entry per batch step is appended.
NeuralModel train_debiased(const std::vector<Matrix>& inputs,
                           const std::vector<std::uint8_t>& labels,
                           const std::vector<std::vector<std::uint8_t>>& group_labels,
                           const TrainConfig& cfg, const AdversaryConfig& adv_cfg,
                           std::vector<StepDiagnostics>* diagnostics = nullptr,
                           const AdversaryModel* initial_adversary = nullptr);

}  // namespace fogfair
