#pragma once

// Decision models for vertex addition: L2-regularized logistic regression
// (full and edge-only feature sets) and the prior-matching random policy.

#include <cstdint>
#include <random>
#include <vector>

#include "qfc/engine.hpp"
#include "qfc/features.hpp"

namespace qfc {

struct LRModel {
  FeatureConfig config;
  Lexicon lexicon;
  double inverse_reg_c = 10.0;
  double bias = 0.0;
  std::vector<double> weights;  // length config.dim
};

/// sigmoid(w·x + bias), clamped to the open interval (0, 1).
double predict(const LRModel& model, const FeatureVector& fv);

/// Oracle decisions featurized for training.
struct TrainingSet {
  std::vector<FeatureVector> features;
  std::vector<int> labels;

  std::size_t size() const noexcept { return labels.size(); }
  long positives() const;
};

/// Featurizes every oracle decision of every instance (all need gold).
TrainingSet build_training_set(const std::vector<Instance>& instances, const FeatureConfig& config,
                               const Lexicon& lexicon);

struct LROptions {
  double c = 10.0;
  double grad_tolerance = 1e-6;  // on ‖∇f‖ / max(1, ‖∇f(0)‖)
  int max_passes = 200;
  int history = 10;
};

struct LRTrainStats {
  int iterations = 0;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  double final_grad_norm = 0.0;
  bool converged = false;
};

/// Minimizes Σ log(1 + exp(-ỹ(w·x + b))) + ‖w‖² / (2c) with L-BFGS. The
/// bias is not penalized. Deterministic for a fixed data order. Throws
/// Error on single-class data or a non-finite loss.
LRModel train_lr(const TrainingSet& data, const FeatureConfig& config, Lexicon lexicon, const LROptions& options = {},
                 LRTrainStats* stats = nullptr);

/// Regularized objective at the given parameters (weights in the hashed space).
double logistic_objective(const TrainingSet& data, const std::vector<double>& weights, double bias, double c);

class LRDecisionModel final : public DecisionModel {
 public:
  explicit LRDecisionModel(const LRModel& model) : model_(&model) {}
  double score(const CompressionState& state, Position candidate) const override;

 private:
  const LRModel* model_;
};

/// Accepts each candidate with a fixed probability. Stochastic: scores are
/// Bernoulli draws in {0, 1} from a seeded engine.
class RandomPolicy final : public DecisionModel {
 public:
  RandomPolicy(double accept_prob, std::uint64_t seed);
  double accept_prob() const noexcept { return accept_prob_; }
  std::uint64_t seed() const noexcept { return seed_; }
  void reseed(std::uint64_t seed);
  double score(const CompressionState& state, Position candidate) const override;

 private:
  double accept_prob_;
  std::uint64_t seed_;
  mutable std::mt19937_64 rng_;
};

/// accept_prob = fraction of positive labels. Throws Error on empty input.
RandomPolicy fit_random_policy(const std::vector<int>& labels, std::uint64_t seed);

/// Picks c from `grid` by mean token F1 of compressions on `validation`.
/// The first grid value wins ties.
struct GridResult {
  double best_c = 0.0;
  std::vector<double> grid;
  std::vector<double> f1;
};
GridResult grid_search_c(const TrainingSet& data, const FeatureConfig& config, const Lexicon& lexicon,
                         const std::vector<Instance>& validation, const std::vector<double>& grid = {0.1, 1, 10, 100});

}  // namespace qfc
