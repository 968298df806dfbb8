#include "adbn/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace adbn {

namespace {

double sample_variance(const std::deque<double>& xs) {
  const std::size_t n = xs.size();
  if (n < 2) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(n - 1);
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

GradientStats::GradientStats(std::size_t visible, std::size_t hidden, std::size_t window)
    : visible_(visible), window_(window), neurons_(hidden) {
  if (window < 2) throw ContractError("GradientStats: window must be >= 2");
}

void GradientStats::push(const GradientEstimate& grad) {
  if (grad.dc.size() != neurons_.size() || grad.dW.size() != visible_ * neurons_.size())
    throw ContractError("GradientStats::push: gradient dimensions do not match");
  const std::size_t J = neurons_.size();
  for (std::size_t j = 0; j < J; ++j) {
    NeuronBuffers& nb = neurons_[j];
    nb.dc_hist.push_back(grad.dc[j]);
    Vec col(visible_);
    for (std::size_t i = 0; i < visible_; ++i) col[i] = grad.dW[i * J + j];
    nb.dw_hist.push_back(std::move(col));
    while (nb.dc_hist.size() > window_) nb.dc_hist.pop_front();
    while (nb.dw_hist.size() > window_) nb.dw_hist.pop_front();
  }
}

double GradientStats::dc_var(std::size_t j) const { return sample_variance(neurons_[j].dc_hist); }

Vec GradientStats::dw_var_column(std::size_t j) const {
  const NeuronBuffers& nb = neurons_[j];
  Vec var(visible_, 0.0);
  const std::size_t n = nb.dw_hist.size();
  if (n < 2) return var;
  for (std::size_t i = 0; i < visible_; ++i) {
    double mean = 0.0;
    for (const Vec& col : nb.dw_hist) mean += col[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (const Vec& col : nb.dw_hist) ss += (col[i] - mean) * (col[i] - mean);
    var[i] = ss / static_cast<double>(n - 1);
  }
  return var;
}

void GradientStats::insert_neuron(std::size_t at) {
  if (at > neurons_.size()) throw ContractError("GradientStats::insert_neuron: index out of range");
  neurons_.insert(neurons_.begin() + static_cast<std::ptrdiff_t>(at), NeuronBuffers{});
}

void GradientStats::remove_neurons(const std::set<std::size_t>& indices) {
  for (auto it = indices.rbegin(); it != indices.rend(); ++it) {
    if (*it >= neurons_.size())
      throw ContractError("GradientStats::remove_neurons: index out of range");
    neurons_.erase(neurons_.begin() + static_cast<std::ptrdiff_t>(*it));
  }
}

double GradientStats::total_wd() const {
  if (neurons_.empty()) return 0.0;
  double c_sum = 0.0, w_sum = 0.0;
  for (std::size_t j = 0; j < neurons_.size(); ++j) {
    c_sum += dc_var(j);
    Vec col = dw_var_column(j);
    for (double v : col) w_sum += v;
  }
  const double J = static_cast<double>(neurons_.size());
  const double IJ = static_cast<double>(visible_ * neurons_.size());
  return c_sum / J + w_sum / IJ;
}

Vec generation_scores(const GradientStats& stats, const AdaptiveConfig& config) {
  const std::size_t J = stats.hidden_count();
  Vec scores(J, 0.0);
  for (std::size_t j = 0; j < J; ++j) {
    if (stats.history_size(j) < 2) continue;
    Vec col = stats.dw_var_column(j);
    double norm = 0.0;
    for (double v : col) norm += v * v;
    norm = std::sqrt(norm);
    scores[j] = (config.alpha_c * stats.dc_var(j)) * (config.alpha_W * norm);
  }
  return scores;
}

bool generate_neuron(RbmParams& params, GradientStats& stats, std::size_t j,
                     std::size_t max_hidden, RngStream& rng) {
  if (j >= params.hidden_count) throw ContractError("generate_neuron: parent index out of range");
  if (params.hidden_count >= max_hidden) return false;

  const std::size_t I = params.visible_count;
  const std::size_t J = params.hidden_count;
  const std::size_t child = j + 1;  // next to the parent

  RbmParams out(I, J + 1);
  out.b = params.b;
  for (std::size_t q = 0, src = 0; q < J + 1; ++q) {
    if (q == child) {
      out.c[q] = params.c[j];
      continue;
    }
    out.c[q] = params.c[src++];
  }
  for (std::size_t i = 0; i < I; ++i) {
    for (std::size_t q = 0, src = 0; q < J + 1; ++q) {
      if (q == child) continue;
      out.w(i, q) = params.w(i, src++);
    }
  }
  for (std::size_t i = 0; i < I; ++i)
    out.w(i, child) = params.w(i, j) + rng.uniform(-0.01, 0.01);

  params = std::move(out);
  stats.insert_neuron(child);
  return true;
}

std::set<std::size_t> annihilation_candidates(const RbmParams& params,
                                              const std::vector<Vec>& data,
                                              const AdaptiveConfig& config) {
  if (data.empty()) throw ContractError("annihilation_candidates: empty data");
  const std::size_t J = params.hidden_count;
  Vec mean(J, 0.0);
  for (const Vec& v : data) {
    Vec hp = hidden_conditional(params, v);
    for (std::size_t j = 0; j < J; ++j) mean[j] += hp[j];
  }
  std::set<std::size_t> out;
  for (std::size_t j = 0; j < J; ++j)
    if (mean[j] / static_cast<double>(data.size()) < config.theta_A) out.insert(j);
  return out;
}

void annihilate_neurons(RbmParams& params, GradientStats& stats,
                        const std::set<std::size_t>& indices) {
  if (indices.empty()) return;
  for (std::size_t j : indices)
    if (j >= params.hidden_count) throw ContractError("annihilate_neurons: index out of range");
  if (indices.size() >= params.hidden_count)
    throw ContractError("annihilate_neurons: cannot remove every hidden neuron");

  const std::size_t I = params.visible_count;
  const std::size_t J = params.hidden_count;
  const std::size_t Jnew = J - indices.size();
  RbmParams out(I, Jnew);
  out.b = params.b;
  for (std::size_t j = 0, q = 0; j < J; ++j) {
    if (indices.count(j)) continue;
    out.c[q] = params.c[j];
    for (std::size_t i = 0; i < I; ++i) out.w(i, q) = params.w(i, j);
    ++q;
  }
  params = std::move(out);
  stats.remove_neurons(indices);
}

GradientEstimate forgetting_gradient(const RbmParams& params, const Vec& hidden_probs,
                                     ForgettingPhase phase, const AdaptiveConfig& config) {
  if (hidden_probs.size() != params.hidden_count)
    throw ContractError("forgetting_gradient: hidden_probs length mismatch");

  const std::size_t I = params.visible_count;
  const std::size_t J = params.hidden_count;
  GradientEstimate g(I, J);

  // Binariness pressure on c: push each unit away from 0.5 toward whichever
  // side it is already on (subgradient 0 exactly at 0.5).
  for (std::size_t j = 0; j < J; ++j) g.dc[j] = config.eps2 * sign(hidden_probs[j] - 0.5);

  switch (phase) {
    case ForgettingPhase::decay:
      for (std::size_t k = 0; k < I * J; ++k) g.dW[k] = -config.eps1 * sign(params.W[k]);
      break;
    case ForgettingPhase::final:
      for (std::size_t k = 0; k < I * J; ++k)
        if (std::fabs(params.W[k]) < config.theta_small)
          g.dW[k] = config.eps3 * sign(params.W[k]);
      break;
    default:
      throw ContractError("forgetting_gradient: invalid phase");
  }
  return g;
}

namespace {

// One epoch of minibatch CD ascent; returns the epoch-mean CD gradient
// (penalties excluded, they are not part of the walking distance).
GradientEstimate run_epoch(RbmParams& params, const std::vector<Vec>& data,
                           const AdaptiveConfig& config, const TrainingHyperparams& train,
                           RngStream& rng, const ForgettingPhase* phase) {
  const std::size_t I = params.visible_count;
  const std::size_t J = params.hidden_count;
  GradientEstimate epoch_mean(I, J);
  std::size_t nbatches = 0;

  for (std::size_t start = 0; start < data.size(); start += train.batch_size) {
    const std::size_t end = std::min(start + train.batch_size, data.size());
    std::vector<Vec> batch(data.begin() + static_cast<std::ptrdiff_t>(start),
                           data.begin() + static_cast<std::ptrdiff_t>(end));
    GradientEstimate g = cd_gradient(params, batch, train.cd_k, rng);
    epoch_mean.add_scaled(g, 1.0);
    ++nbatches;

    if (phase != nullptr) {
      Vec mean_h(J, 0.0);
      for (const Vec& v : batch) {
        Vec hp = hidden_conditional(params, v);
        for (std::size_t j = 0; j < J; ++j) mean_h[j] += hp[j];
      }
      for (double& x : mean_h) x /= static_cast<double>(batch.size());
      g.add_scaled(forgetting_gradient(params, mean_h, *phase, config), 1.0);
    }
    params = sgd_step(params, g, train.learning_rate);
  }
  epoch_mean.scale(1.0 / static_cast<double>(nbatches));
  return epoch_mean;
}

double mean_field_energy(const RbmParams& params, const std::vector<Vec>& data) {
  double total = 0.0;
  for (const Vec& v : data) total += energy(params, v, hidden_conditional(params, v));
  return total / static_cast<double>(data.size());
}

TrainingLogRow make_row(std::size_t epoch, const RbmParams& params, const GradientStats& stats,
                        const std::vector<Vec>& data, std::string event) {
  double wd_c = 0.0, wd_w = 0.0;
  const std::size_t J = stats.hidden_count();
  for (std::size_t j = 0; j < J; ++j) {
    wd_c += stats.dc_var(j);
    for (double v : stats.dw_var_column(j)) wd_w += v;
  }
  if (J > 0) {
    wd_c /= static_cast<double>(J);
    wd_w /= static_cast<double>(J * stats.visible_count());
  }
  return TrainingLogRow{epoch, params.hidden_count, reconstruction_error(params, data),
                        mean_field_energy(params, data), wd_c, wd_w, std::move(event)};
}

}  // namespace

AdaptiveRbmResult train_adaptive_rbm(const std::vector<Vec>& data, const AdaptiveConfig& config,
                                     const TrainingHyperparams& train, RngStream& rng,
                                     std::size_t initial_hidden) {
  if (data.empty()) throw ContractError("train_adaptive_rbm: empty data");
  const std::size_t I = data.front().size();
  const std::size_t J0 = initial_hidden > 0 ? initial_hidden : train.initial_hidden;

  AdaptiveRbmResult r{init_rbm(I, J0, rng), GradientStats(I, J0, config.wd_window), {}};
  std::size_t epoch = 0;

  // Phase 1: CD plus structural edits at epoch ends.
  for (std::size_t e = 0; e < config.generation_phase_epochs; ++e, ++epoch) {
    GradientEstimate mean_g = run_epoch(r.params, data, config, train, rng, nullptr);
    r.stats.push(mean_g);

    std::string event;
    Vec scores = generation_scores(r.stats, config);
    std::size_t best = 0;
    double best_score = 0.0;
    for (std::size_t j = 0; j < scores.size(); ++j)
      if (scores[j] > best_score) { best_score = scores[j]; best = j; }
    if (best_score > config.theta_G) {
      if (generate_neuron(r.params, r.stats, best, config.max_hidden, rng))
        event = "gen:" + std::to_string(best);
    }

    std::set<std::size_t> dead = annihilation_candidates(r.params, data, config);
    if (!dead.empty() && dead.size() < r.params.hidden_count) {
      annihilate_neurons(r.params, r.stats, dead);
      std::ostringstream os;
      os << "ann:";
      bool first = true;
      for (std::size_t j : dead) {
        if (!first) os << ",";
        os << j;
        first = false;
      }
      if (!event.empty()) event += ";";
      event += os.str();
    }
    r.log.rows.push_back(make_row(epoch, r.params, r.stats, data, event));
  }

  // Phase 2: forgetting (decay + binariness), structure frozen.
  for (std::size_t e = 0; e < config.forgetting_phase_epochs; ++e, ++epoch) {
    ForgettingPhase phase = ForgettingPhase::decay;
    r.stats.push(run_epoch(r.params, data, config, train, rng, &phase));
    r.log.rows.push_back(make_row(epoch, r.params, r.stats, data, ""));
  }

  // Phase 3: final forgetting, small-weight term replaces decay.
  for (std::size_t e = 0; e < config.final_phase_epochs; ++e, ++epoch) {
    ForgettingPhase phase = ForgettingPhase::final;
    r.stats.push(run_epoch(r.params, data, config, train, rng, &phase));
    r.log.rows.push_back(make_row(epoch, r.params, r.stats, data, ""));
  }

  return r;
}

void TrainingLog::write_csv(std::ostream& os) const {
  os << "epoch,hidden_count,recon_error,mean_energy,wd_c,wd_W,event\n";
  os.precision(17);
  for (const TrainingLogRow& row : rows) {
    os << row.epoch << ',' << row.hidden_count << ',' << row.recon_error << ','
       << row.mean_energy << ',' << row.wd_c << ',' << row.wd_W << ',' << row.event << '\n';
  }
}

}  // namespace adbn
