#pragma once

#include <cstddef>
#include <vector>

#include "adbn/adaptive.hpp"
#include "adbn/rbm.hpp"

namespace adbn {

// IF-THEN inactivation rule: when every antecedent neuron in `layer` fires,
// the consequent neuron in layer+1 is forced inactive.
struct Rule {
  std::size_t layer;
  std::vector<std::size_t> antecedent;  // sorted, non-empty
  std::size_t consequent;

  bool operator==(const Rule&) const = default;
};

struct ClassifierHead {
  std::size_t input_dim = 0;
  std::size_t class_count = 0;
  Vec weights;  // input_dim * class_count, row-major
  Vec biases;   // class_count

  ClassifierHead() = default;
  ClassifierHead(std::size_t in, std::size_t classes)
      : input_dim(in), class_count(classes), weights(in * classes, 0.0), biases(classes, 0.0) {}

  double w(std::size_t i, std::size_t k) const { return weights[i * class_count + k]; }
  double& w(std::size_t i, std::size_t k) { return weights[i * class_count + k]; }
};

struct DbnModel {
  std::vector<RbmParams> layers;
  ClassifierHead head;
  std::vector<Rule> rules;

  void check_chaining() const;  // throws ContractError on any broken pair
};

struct LayerStats {
  std::size_t layer;
  double wd_total;      // >= 0
  double energy_total;  // mean layer energy over the training data
};

struct LayerGenConfig {
  double theta_L1 = 0.05;
  double theta_L2 = 0.05;
  double alpha_WD = 1.0;
  double alpha_E = 1.0;
  std::size_t max_layers = 5;
};

// Mean-field activations per layer, input excluded. Deterministic.
std::vector<Vec> propagate(const DbnModel& model, const Vec& v);

// Mean over inputs of the layer energy with mean-field hidden values.
double layer_energy_total(const RbmParams& params, const std::vector<Vec>& inputs);

// True iff the alpha-scaled WD sum and |energy| sum both exceed their
// thresholds and the stack is below max_layers.
bool should_generate_layer(const std::vector<LayerStats>& stats_history,
                           const LayerGenConfig& config);

// Child visible dim = parent hidden dim; child b inherits parent c.
RbmParams spawn_child_rbm(const RbmParams& parent, std::size_t child_hidden, RngStream& rng);

struct AdaptiveDbnResult {
  DbnModel model;  // head untrained
  std::vector<LayerStats> layer_stats;
  TrainingLog log;
};

AdaptiveDbnResult train_adaptive_dbn(const std::vector<Vec>& data, const AdaptiveConfig& adapt,
                                     const LayerGenConfig& layer_cfg,
                                     const TrainingHyperparams& train, RngStream& rng);

// Softmax regression on frozen top-layer activations; layers untouched.
void train_head(DbnModel& model, const std::vector<Vec>& samples,
                const std::vector<std::size_t>& labels, std::size_t class_count,
                std::size_t epochs, double lr, std::size_t batch_size, RngStream& rng);

Vec softmax_probs(const ClassifierHead& head, const Vec& activations);

// Argmax of the head softmax; ties break toward the lowest class index.
std::pair<std::size_t, Vec> classify(const DbnModel& model, const Vec& v);

}  // namespace adbn
