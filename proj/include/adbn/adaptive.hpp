#pragma once

#include <cstddef>
#include <deque>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "adbn/rbm.hpp"
#include "adbn/rng.hpp"

namespace adbn {

// Windowed gradient-variance tracking per hidden neuron (the walking
// distance). b-gradients are deliberately ignored. Buffers follow structural
// edits: a generated neuron starts with an empty history, an annihilated
// neuron's buffers are dropped.
class GradientStats {
 public:
  GradientStats(std::size_t visible, std::size_t hidden, std::size_t window = 5);

  void push(const GradientEstimate& grad);

  std::size_t window() const { return window_; }
  std::size_t visible_count() const { return visible_; }
  std::size_t hidden_count() const { return neurons_.size(); }

  // Unbiased sample variance over the buffered epochs; 0 with < 2 entries.
  double dc_var(std::size_t j) const;
  Vec dw_var_column(std::size_t j) const;

  std::size_t history_size(std::size_t j) const { return neurons_[j].dc_hist.size(); }

  void insert_neuron(std::size_t at);
  void remove_neurons(const std::set<std::size_t>& indices);

  // Mean over neurons of dc_var plus mean over connections of dW variance
  // (the per-layer WD summand).
  double total_wd() const;

 private:
  struct NeuronBuffers {
    std::deque<double> dc_hist;
    std::deque<Vec> dw_hist;  // one I-vector per buffered epoch
  };
  std::size_t visible_;
  std::size_t window_;
  std::vector<NeuronBuffers> neurons_;
};

struct AdaptiveConfig {
  double theta_G = 0.05;    // generation threshold
  double theta_A = 0.1;     // annihilation threshold, in (0,1)
  double alpha_c = 1.0;
  double alpha_W = 1.0;
  double eps1 = 0.01;       // weight decay criterion
  double eps2 = 0.01;       // hidden binariness criterion
  double eps3 = 0.01;       // small-weight criterion, final phase
  double theta_small = 0.1; // |W| cutoff for the final-phase term
  std::size_t generation_phase_epochs = 100;
  std::size_t forgetting_phase_epochs = 50;
  std::size_t final_phase_epochs = 20;
  std::size_t max_hidden = 2000;
  std::size_t wd_window = 5;
};

struct TrainingHyperparams {
  double learning_rate = 0.1;
  std::size_t batch_size = 100;
  unsigned cd_k = 1;
  std::size_t initial_hidden = 20;
  std::size_t head_epochs = 200;
};

enum class ForgettingPhase { decay, final };

struct TrainingLogRow {
  std::size_t epoch;
  std::size_t hidden_count;
  double recon_error;
  double mean_energy;
  double wd_c;
  double wd_W;
  std::string event;  // "", "gen:<j>", "ann:<j,j,...>", "layer:<l>"
};

struct TrainingLog {
  std::vector<TrainingLogRow> rows;

  void write_csv(std::ostream& os) const;
};

// score_j = (alpha_c * dc_var_j) * (alpha_W * ||dW_var column j||_2);
// empty when fewer than 2 window entries are buffered.
Vec generation_scores(const GradientStats& stats, const AdaptiveConfig& config);

// Inserts a child next to parent j: weights = parent column + small noise,
// bias copied. Returns false (no edit) when max_hidden is reached.
bool generate_neuron(RbmParams& params, GradientStats& stats, std::size_t j,
                     std::size_t max_hidden, RngStream& rng);

// { j : mean_n p(h_j=1|v_n) < theta_A }
std::set<std::size_t> annihilation_candidates(const RbmParams& params,
                                              const std::vector<Vec>& data,
                                              const AdaptiveConfig& config);

void annihilate_neurons(RbmParams& params, GradientStats& stats,
                        const std::set<std::size_t>& indices);

// Penalty contribution to ADD to the CD ascent gradient. decay phase:
// L1 weight decay plus binariness pressure on c; final phase: the decay
// term is replaced by the small-weight term gated at theta_small.
GradientEstimate forgetting_gradient(const RbmParams& params, const Vec& hidden_probs,
                                     ForgettingPhase phase, const AdaptiveConfig& config);

struct AdaptiveRbmResult {
  RbmParams params;
  GradientStats stats;
  TrainingLog log;
};

// Three-phase schedule: generation/annihilation, forgetting with frozen
// structure, final forgetting.
AdaptiveRbmResult train_adaptive_rbm(const std::vector<Vec>& data, const AdaptiveConfig& config,
                                     const TrainingHyperparams& train, RngStream& rng,
                                     std::size_t initial_hidden = 0);

}  // namespace adbn
