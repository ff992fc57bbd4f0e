#include "fogfair/mitigation.hpp"

#include <algorithm>
#include <cmath>

namespace fogfair {

const char* fairness_criterion_name(FairnessCriterion c) {
  switch (c) {
    case FairnessCriterion::DemographicParity: return "demographic_parity";
    case FairnessCriterion::TruePositiveParity: return "true_positive_parity";
    case FairnessCriterion::EqualizedOdds: return "equalized_odds";
  }
  return "?";
}

FairnessCriterion parse_fairness_criterion(const std::string& s) {
  if (s == "demographic_parity") return FairnessCriterion::DemographicParity;
  if (s == "true_positive_parity") return FairnessCriterion::TruePositiveParity;
  if (s == "equalized_odds") return FairnessCriterion::EqualizedOdds;
  throw Error(ErrorCode::ConfigError, "unknown fairness criterion '" + s + "'");
}

namespace {

struct GroupScoreIndex {
  std::vector<double> all;  // sorted ascending
  std::vector<double> pos;
  std::vector<double> neg;

  static std::size_t at_least(const std::vector<double>& sorted, double t) {
    return sorted.size() -
           static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), t) -
                                    sorted.begin());
  }
};

double f1_component(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
  const double prec = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  const double rec = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  return prec + rec > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
}

}  // namespace

ThresholdPolicy fit_thresholds(const std::vector<double>& scores,
                               const std::vector<std::uint8_t>& y_true,
                               const std::vector<int>& group_of, FairnessCriterion criterion,
                               std::size_t grid_resolution) {
  if (scores.size() != y_true.size() || scores.size() != group_of.size())
    throw Error(ErrorCode::LengthMismatch, "scores, labels and groups differ in length");
  if (grid_resolution == 0) throw Error(ErrorCode::ConfigError, "grid_resolution must be positive");

  GroupScoreIndex idx[2];
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (group_of[i] != 0 && group_of[i] != 1)
      throw Error(ErrorCode::UnknownGroupMember, "calibration unit without a 0/1 group");
    auto& gi = idx[group_of[i]];
    gi.all.push_back(scores[i]);
    (y_true[i] ? gi.pos : gi.neg).push_back(scores[i]);
  }
  for (auto& gi : idx) {
    std::sort(gi.all.begin(), gi.all.end());
    std::sort(gi.pos.begin(), gi.pos.end());
    std::sort(gi.neg.begin(), gi.neg.end());
  }
  if (idx[0].all.empty() || idx[1].all.empty())
    throw Error(ErrorCode::EmptyGroup, "both groups must appear in the calibration set");
  const bool needs_tpr = criterion != FairnessCriterion::DemographicParity;
  const bool needs_fpr = criterion == FairnessCriterion::EqualizedOdds;
  if (needs_tpr && (idx[0].pos.empty() || idx[1].pos.empty()))
    throw Error(ErrorCode::EmptyGroup, "criterion needs y_true=1 units in both groups");
  if (needs_fpr && (idx[0].neg.empty() || idx[1].neg.empty()))
    throw Error(ErrorCode::EmptyGroup, "criterion needs y_true=0 units in both groups");

  const std::size_t R = grid_resolution;
  // Per grid threshold t = i/R: counts of units/positives/negatives >= t.
  std::vector<std::array<std::int64_t, 3>> counts[2];
  for (int g = 0; g < 2; ++g) {
    counts[g].resize(R + 1);
    for (std::size_t i = 0; i <= R; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(R);
      counts[g][i] = {static_cast<std::int64_t>(GroupScoreIndex::at_least(idx[g].all, t)),
                      static_cast<std::int64_t>(GroupScoreIndex::at_least(idx[g].pos, t)),
                      static_cast<std::int64_t>(GroupScoreIndex::at_least(idx[g].neg, t))};
    }
  }
  const std::int64_t n[2] = {static_cast<std::int64_t>(idx[0].all.size()),
                             static_cast<std::int64_t>(idx[1].all.size())};
  const std::int64_t npos[2] = {static_cast<std::int64_t>(idx[0].pos.size()),
                                static_cast<std::int64_t>(idx[1].pos.size())};
  const std::int64_t nneg[2] = {static_cast<std::int64_t>(idx[0].neg.size()),
                                static_cast<std::int64_t>(idx[1].neg.size())};

  auto disparity_of = [&](std::size_t i0, std::size_t i1) {
    const auto& c0 = counts[0][i0];
    const auto& c1 = counts[1][i1];
    switch (criterion) {
      case FairnessCriterion::DemographicParity:
        return std::fabs(static_cast<double>(c0[0]) / static_cast<double>(n[0]) -
                         static_cast<double>(c1[0]) / static_cast<double>(n[1]));
      case FairnessCriterion::TruePositiveParity:
        return std::fabs(static_cast<double>(c0[1]) / static_cast<double>(npos[0]) -
                         static_cast<double>(c1[1]) / static_cast<double>(npos[1]));
      case FairnessCriterion::EqualizedOdds: {
        double dtpr = std::fabs(static_cast<double>(c0[1]) / static_cast<double>(npos[0]) -
                                static_cast<double>(c1[1]) / static_cast<double>(npos[1]));
        double dfpr = std::fabs(static_cast<double>(c0[2]) / static_cast<double>(nneg[0]) -
                                static_cast<double>(c1[2]) / static_cast<double>(nneg[1]));
        return std::max(dtpr, dfpr);
      }
    }
    return 0.0;
  };

  double min_disparity = std::numeric_limits<double>::infinity();
  for (std::size_t i0 = 0; i0 <= R; ++i0)
    for (std::size_t i1 = 0; i1 <= R; ++i1) min_disparity = std::min(min_disparity, disparity_of(i0, i1));
  const double cutoff = std::max(kDisparityTolerance, min_disparity);

  const std::int64_t total_pos = npos[0] + npos[1];
  const std::int64_t total_neg = nneg[0] + nneg[1];
  ThresholdPolicy best;
  best.criterion = criterion;
  double best_f1 = -1.0;
  for (std::size_t i0 = 0; i0 <= R; ++i0)
    for (std::size_t i1 = 0; i1 <= R; ++i1) {
      const double disp = disparity_of(i0, i1);
      if (disp > cutoff) continue;
      const std::int64_t tp = counts[0][i0][1] + counts[1][i1][1];
      const std::int64_t fp = counts[0][i0][2] + counts[1][i1][2];
      const std::int64_t fn = total_pos - tp;
      const std::int64_t tn = total_neg - fp;
      const double f1 = 0.5 * (f1_component(tp, fp, fn) + f1_component(tn, fn, fp));
      if (f1 > best_f1) {
        best_f1 = f1;
        best.t0 = static_cast<double>(i0) / static_cast<double>(R);
        best.t1 = static_cast<double>(i1) / static_cast<double>(R);
        best.achieved_disparity = disp;
      }
    }
  return best;
}

std::vector<std::uint8_t> apply_thresholds(const std::vector<double>& scores,
                                           const std::vector<int>& group_of,
                                           const ThresholdPolicy& policy) {
  if (scores.size() != group_of.size())
    throw Error(ErrorCode::LengthMismatch, "scores and groups differ in length");
  std::vector<std::uint8_t> pred(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (group_of[i] != 0 && group_of[i] != 1)
      throw Error(ErrorCode::UnknownGroupMember, "unit without a 0/1 group");
    const double t = group_of[i] == 0 ? policy.t0 : policy.t1;
    pred[i] = scores[i] >= t ? 1 : 0;
  }
  return pred;
}

namespace {

void glorot_init(Layer& layer, Rng& rng) {
  const double limit =
      std::sqrt(6.0 / static_cast<double>(layer.in_dim + layer.out_dim));
  for (double& w : layer.weights.values) w = (2.0 * rng.next_double() - 1.0) * limit;
}

Layer dense(std::size_t in_dim, std::size_t out_dim) {
  Layer l;
  l.kind = LayerKind::Dense;
  l.in_dim = in_dim;
  l.out_dim = out_dim;
  l.weights = Tensor({out_dim, in_dim});
  l.bias = Tensor({out_dim});
  return l;
}

struct AdvGrads {
  Tensor shared_w, shared_b;
  std::vector<Tensor> head_w, head_b;

  static AdvGrads zeros_like(const AdversaryModel& adv) {
    AdvGrads g;
    g.shared_w = Tensor(adv.shared.weights.shape);
    g.shared_b = Tensor(adv.shared.bias.shape);
    for (const auto& h : adv.heads) {
      g.head_w.emplace_back(h.weights.shape);
      g.head_b.emplace_back(h.bias.shape);
    }
    return g;
  }
};

// Stable 2-class cross-entropy pieces.
double ce_loss_and_grad(const double logits[2], std::uint8_t y, double dlogits[2]) {
  const double m = std::max(logits[0], logits[1]);
  const double lse = m + std::log(std::exp(logits[0] - m) + std::exp(logits[1] - m));
  dlogits[0] = std::exp(logits[0] - lse) - (y == 0 ? 1.0 : 0.0);
  dlogits[1] = std::exp(logits[1] - lse) - (y == 1 ? 1.0 : 0.0);
  return lse - logits[y];
}

// Forward + backward of the adversary on one representation. Accumulates
// parameter gradients scaled by `scale` when grads != nullptr; writes the
// per-sample loss gradient w.r.t. the representation into drep when non-null.
double adversary_sample(const AdversaryModel& adv, const Matrix& rep,
                        const std::vector<std::uint8_t>& sample_groups, double scale,
                        AdvGrads* grads, std::vector<double>* drep) {
  const std::size_t rep_dim = adv.shared.in_dim;
  const std::size_t hidden = adv.shared.out_dim;

  std::vector<double> h_pre(hidden), h(hidden);
  for (std::size_t o = 0; o < hidden; ++o) {
    double acc = adv.shared.bias.values[o];
    const double* wo = adv.shared.weights.values.data() + o * rep_dim;
    for (std::size_t i = 0; i < rep_dim; ++i) acc += wo[i] * rep(0, i);
    h_pre[o] = acc;
    h[o] = acc > 0.0 ? acc : 0.0;
  }

  double loss = 0.0;
  std::vector<double> dh(hidden, 0.0);
  for (std::size_t a = 0; a < adv.heads.size(); ++a) {
    const Layer& head = adv.heads[a];
    double logits[2];
    for (std::size_t o = 0; o < 2; ++o) {
      double acc = head.bias.values[o];
      const double* wo = head.weights.values.data() + o * hidden;
      for (std::size_t i = 0; i < hidden; ++i) acc += wo[i] * h[i];
      logits[o] = acc;
    }
    double dlogits[2];
    loss += ce_loss_and_grad(logits, sample_groups[a], dlogits);
    for (std::size_t o = 0; o < 2; ++o) {
      const double* wo = head.weights.values.data() + o * hidden;
      if (grads) {
        grads->head_b[a].values[o] += scale * dlogits[o];
        double* gwo = grads->head_w[a].values.data() + o * hidden;
        for (std::size_t i = 0; i < hidden; ++i) gwo[i] += scale * dlogits[o] * h[i];
      }
      for (std::size_t i = 0; i < hidden; ++i) dh[i] += dlogits[o] * wo[i];
    }
  }

  if (drep) drep->assign(rep_dim, 0.0);
  for (std::size_t o = 0; o < hidden; ++o) {
    const double g = h_pre[o] > 0.0 ? dh[o] : 0.0;
    if (g == 0.0) continue;
    const double* wo = adv.shared.weights.values.data() + o * rep_dim;
    if (grads) {
      grads->shared_b.values[o] += scale * g;
      double* gwo = grads->shared_w.values.data() + o * rep_dim;
      for (std::size_t i = 0; i < rep_dim; ++i) gwo[i] += scale * g * rep(0, i);
    }
    if (drep)
      for (std::size_t i = 0; i < rep_dim; ++i) (*drep)[i] += g * wo[i];
  }
  return loss;
}

void adversary_sgd(AdversaryModel& adv, const AdvGrads& grads, double lr) {
  for (std::size_t j = 0; j < adv.shared.weights.values.size(); ++j)
    adv.shared.weights.values[j] -= lr * grads.shared_w.values[j];
  for (std::size_t j = 0; j < adv.shared.bias.values.size(); ++j)
    adv.shared.bias.values[j] -= lr * grads.shared_b.values[j];
  for (std::size_t a = 0; a < adv.heads.size(); ++a) {
    for (std::size_t j = 0; j < adv.heads[a].weights.values.size(); ++j)
      adv.heads[a].weights.values[j] -= lr * grads.head_w[a].values[j];
    for (std::size_t j = 0; j < adv.heads[a].bias.values.size(); ++j)
      adv.heads[a].bias.values[j] -= lr * grads.head_b[a].values[j];
  }
}

// g_P <- g_P - proj_{g_A}(g_P) - alpha * g_A per tensor. Returns the largest
// |<residual, g_A>| across tensors, accumulated in long double.
double compose_update(GradientSet& gp, const GradientSet& ga, double alpha) {
  double max_resid = 0.0;
  auto process = [&](std::vector<double>& p, const std::vector<double>& a) {
    if (p.empty()) return;
    long double dot_pa = 0.0L, dot_aa = 0.0L;
    for (std::size_t j = 0; j < p.size(); ++j) {
      dot_pa += static_cast<long double>(p[j]) * static_cast<long double>(a[j]);
      dot_aa += static_cast<long double>(a[j]) * static_cast<long double>(a[j]);
    }
    if (dot_aa >= 1e-12L) {
      const double coef = static_cast<double>(dot_pa / dot_aa);
      long double resid = 0.0L;
      for (std::size_t j = 0; j < p.size(); ++j) {
        p[j] -= coef * a[j];
        resid += static_cast<long double>(p[j]) * static_cast<long double>(a[j]);
      }
      max_resid = std::max(max_resid, std::fabs(static_cast<double>(resid)));
    }
    if (alpha != 0.0)
      for (std::size_t j = 0; j < p.size(); ++j) p[j] -= alpha * a[j];
  };
  for (std::size_t i = 0; i < gp.weights.size(); ++i) {
    process(gp.weights[i].values, ga.weights[i].values);
    process(gp.bias[i].values, ga.bias[i].values);
  }
  return max_resid;
}

}  // namespace

AdversaryModel make_adversary(std::size_t rep_dim, std::size_t hidden_dim,
                              std::size_t n_attributes, std::uint64_t seed) {
  if (hidden_dim == 0 || n_attributes == 0)
    throw Error(ErrorCode::ConfigError, "adversary needs hidden units and >= 1 attribute");
  AdversaryModel adv;
  adv.shared = dense(rep_dim, hidden_dim);
  Rng rng(seed);
  glorot_init(adv.shared, rng);
  for (std::size_t a = 0; a < n_attributes; ++a) {
    adv.heads.push_back(dense(hidden_dim, 2));
    glorot_init(adv.heads.back(), rng);
  }
  return adv;
}

AdversaryModel make_zero_adversary(std::size_t rep_dim, std::size_t hidden_dim,
                                   std::size_t n_attributes) {
  AdversaryModel adv;
  adv.shared = dense(rep_dim, hidden_dim);
  for (std::size_t a = 0; a < n_attributes; ++a) adv.heads.push_back(dense(hidden_dim, 2));
  return adv;
}

StepDiagnostics adversarial_step(NeuralModel& model, AdversaryModel& adversary,
                                 const std::vector<const Matrix*>& batch,
                                 const std::vector<std::uint8_t>& labels,
                                 const std::vector<std::vector<std::uint8_t>>& group_labels,
                                 double alpha, double predictor_lr, double adversary_lr,
                                 const std::array<double, 2>& class_weights) {
  const std::size_t B = batch.size();
  if (B == 0 || labels.size() != B)
    throw Error(ErrorCode::LengthMismatch, "batch and labels must be non-empty and equal length");
  if (group_labels.size() != adversary.heads.size())
    throw Error(ErrorCode::MissingGroupLabels, "one group-label vector per adversary head required");
  for (const auto& gl : group_labels)
    if (gl.size() != B)
      throw Error(ErrorCode::MissingGroupLabels, "group labels must cover the whole batch");

  StepDiagnostics diag;
  const std::size_t rep_idx = representation_layer(model);

  // Predictor loss and gradient through the same routine plain training
  // uses, so the alpha = 0, zero-adversary path reproduces it bitwise.
  GradientSet gp;
  diag.predictor_loss = forward_backward(model, batch, labels, class_weights, gp);

  // Separate forward pass to cache the penultimate representations.
  std::vector<ForwardCache> caches(B);
  for (std::size_t i = 0; i < B; ++i) forward(model, *batch[i], &caches[i]);

  std::vector<std::uint8_t> sample_groups(adversary.heads.size());
  const double inv_b = 1.0 / static_cast<double>(B);

  // Adversary SGD step on its own loss, computed at current weights.
  if (!adversary.frozen) {
    AdvGrads agrads = AdvGrads::zeros_like(adversary);
    for (std::size_t i = 0; i < B; ++i) {
      for (std::size_t a = 0; a < group_labels.size(); ++a) sample_groups[a] = group_labels[a][i];
      adversary_sample(adversary, caches[i].acts[rep_idx], sample_groups, inv_b, &agrads, nullptr);
    }
    adversary_sgd(adversary, agrads, adversary_lr);
  }

  // Adversary loss gradient w.r.t. predictor weights, against the refreshed
  // adversary, routed through the representation.
  GradientSet ga = GradientSet::zeros_like(model);
  double adv_loss = 0.0;
  std::vector<double> drep;
  for (std::size_t i = 0; i < B; ++i) {
    for (std::size_t a = 0; a < group_labels.size(); ++a) sample_groups[a] = group_labels[a][i];
    adv_loss += adversary_sample(adversary, caches[i].acts[rep_idx], sample_groups, 0.0, nullptr,
                                 &drep);
    Matrix dr(1, drep.size());
    for (std::size_t j = 0; j < drep.size(); ++j) dr(0, j) = drep[j];
    backward(model, caches[i], dr, rep_idx, inv_b, ga);
  }
  diag.adversary_loss = adv_loss * inv_b;

  diag.max_projection_residual = compose_update(gp, ga, alpha);
  sgd_step(model, gp, predictor_lr);
  return diag;
}

NeuralModel train_debiased(const std::vector<Matrix>& inputs,
                           const std::vector<std::uint8_t>& labels,
                           const std::vector<std::vector<std::uint8_t>>& group_labels,
                           const TrainConfig& cfg, const AdversaryConfig& adv_cfg,
                           std::vector<StepDiagnostics>* diagnostics,
                           const AdversaryModel* initial_adversary) {
  if (inputs.empty()) throw Error(ErrorCode::SingleClassTraining, "empty training set");
  if (adv_cfg.attributes.empty())
    throw Error(ErrorCode::ConfigError, "adversarial debiasing needs >= 1 attribute");
  if (adv_cfg.mode == AdversaryMode::SingleAttribute && adv_cfg.attributes.size() != 1)
    throw Error(ErrorCode::ConfigError, "single-attribute mode takes exactly one attribute");
  if (group_labels.size() != adv_cfg.attributes.size())
    throw Error(ErrorCode::MissingGroupLabels, "one group-label vector per attribute required");
  for (const auto& gl : group_labels)
    if (gl.size() != inputs.size())
      throw Error(ErrorCode::MissingGroupLabels, "group labels must cover every training unit");

  NeuralModel model = make_neural_model(inputs.front().cols(), derive_seed(cfg.rng_seed, "init"));
  AdversaryModel adversary =
      initial_adversary
          ? *initial_adversary
          : make_adversary(representation_dim(model), adv_cfg.hidden_dim, adv_cfg.attributes.size(),
                           derive_seed(cfg.rng_seed, "adversary-init"));
  if (adversary.shared.in_dim != representation_dim(model) ||
      adversary.heads.size() != adv_cfg.attributes.size())
    throw Error(ErrorCode::ShapeIncompatible, "adversary does not match model and attributes");

  for (const auto& x : inputs)
    if (x.cols() != model.input_channels || x.rows() < model.min_input_len)
      throw Error(ErrorCode::ShapeIncompatible, "training window shape does not fit the network");
  bool has0 = false, has1 = false;
  for (std::uint8_t l : labels) (l ? has1 : has0) = true;
  if (!has0 || !has1)
    throw Error(ErrorCode::SingleClassTraining, "training labels contain a single class");

  std::vector<const Matrix*> batch_ptrs;
  std::vector<std::uint8_t> batch_labels;
  std::vector<std::vector<std::uint8_t>> batch_groups(group_labels.size());
  run_epochs(
      inputs.size(), cfg,
      [&](const std::vector<std::size_t>& batch) {
        batch_ptrs.clear();
        batch_labels.clear();
        for (auto& bg : batch_groups) bg.clear();
        for (std::size_t idx : batch) {
          batch_ptrs.push_back(&inputs[idx]);
          batch_labels.push_back(labels[idx]);
          for (std::size_t a = 0; a < group_labels.size(); ++a)
            batch_groups[a].push_back(group_labels[a][idx]);
        }
        StepDiagnostics diag =
            adversarial_step(model, adversary, batch_ptrs, batch_labels, batch_groups,
                             adv_cfg.alpha, cfg.learning_rate, adv_cfg.learning_rate,
                             cfg.class_weights);
        if (!std::isfinite(diag.predictor_loss))
          throw Error(ErrorCode::DivergedLoss, "training loss became non-finite");
        if (diagnostics) diagnostics->push_back(diag);
      },
      nullptr);
  return model;
}

}  // namespace fogfair
