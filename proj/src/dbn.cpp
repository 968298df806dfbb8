#include "adbn/dbn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace adbn {

void DbnModel::check_chaining() const {
  for (std::size_t l = 1; l < layers.size(); ++l) {
    if (layers[l].visible_count != layers[l - 1].hidden_count)
      throw ContractError("DbnModel: layer " + std::to_string(l) + " visible dim " +
                          std::to_string(layers[l].visible_count) + " != previous hidden dim " +
                          std::to_string(layers[l - 1].hidden_count));
  }
  if (!layers.empty() && head.input_dim != 0 && head.input_dim != layers.back().hidden_count)
    throw ContractError("DbnModel: head input dim does not match top layer");
}

std::vector<Vec> propagate(const DbnModel& model, const Vec& v) {
  if (model.layers.empty()) throw ContractError("propagate: model has no layers");
  std::vector<Vec> acts;
  acts.reserve(model.layers.size());
  const Vec* cur = &v;
  for (const RbmParams& layer : model.layers) {
    acts.push_back(hidden_conditional(layer, *cur));
    cur = &acts.back();
  }
  return acts;
}

double layer_energy_total(const RbmParams& params, const std::vector<Vec>& inputs) {
  if (inputs.empty()) throw ContractError("layer_energy_total: empty inputs");
  double total = 0.0;
  for (const Vec& x : inputs) total += energy(params, x, hidden_conditional(params, x));
  return total / static_cast<double>(inputs.size());
}

bool should_generate_layer(const std::vector<LayerStats>& stats_history,
                           const LayerGenConfig& config) {
  if (stats_history.empty()) throw ContractError("should_generate_layer: empty history");
  if (stats_history.size() >= config.max_layers) return false;
  double wd_sum = 0.0, e_sum = 0.0;
  for (const LayerStats& s : stats_history) {
    wd_sum += config.alpha_WD * s.wd_total;
    e_sum += config.alpha_E * std::fabs(s.energy_total);
  }
  return wd_sum > config.theta_L1 && e_sum > config.theta_L2;
}

RbmParams spawn_child_rbm(const RbmParams& parent, std::size_t child_hidden, RngStream& rng) {
  if (child_hidden < 1) throw ContractError("spawn_child_rbm: child_hidden must be >= 1");
  RbmParams child = init_rbm(parent.hidden_count, child_hidden, rng);
  child.b = parent.c;
  return child;
}

AdaptiveDbnResult train_adaptive_dbn(const std::vector<Vec>& data, const AdaptiveConfig& adapt,
                                     const LayerGenConfig& layer_cfg,
                                     const TrainingHyperparams& train, RngStream& rng) {
  if (data.empty()) throw ContractError("train_adaptive_dbn: empty data");

  AdaptiveDbnResult r;
  std::vector<Vec> inputs = data;
  std::size_t layer_index = 0;

  while (true) {
    AdaptiveRbmResult rbm = train_adaptive_rbm(inputs, adapt, train, rng);
    r.model.layers.push_back(rbm.params);
    r.layer_stats.push_back(LayerStats{layer_index, rbm.stats.total_wd(),
                                       layer_energy_total(rbm.params, inputs)});
    for (TrainingLogRow& row : rbm.log.rows) {
      std::string tag = "layer:" + std::to_string(layer_index);
      row.event = row.event.empty() ? tag : tag + ";" + row.event;
      r.log.rows.push_back(std::move(row));
    }

    if (!should_generate_layer(r.layer_stats, layer_cfg)) break;

    std::vector<Vec> next;
    next.reserve(inputs.size());
    for (const Vec& x : inputs) next.push_back(hidden_conditional(rbm.params, x));
    inputs = std::move(next);
    ++layer_index;
  }

  r.model.head = ClassifierHead(r.model.layers.back().hidden_count, 0);
  return r;
}

Vec softmax_probs(const ClassifierHead& head, const Vec& activations) {
  if (activations.size() != head.input_dim)
    throw ContractError("softmax_probs: activation length mismatch");
  Vec logits(head.class_count, 0.0);
  for (std::size_t k = 0; k < head.class_count; ++k) {
    double a = head.biases[k];
    for (std::size_t i = 0; i < head.input_dim; ++i) a += head.w(i, k) * activations[i];
    logits[k] = a;
  }
  double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double& l : logits) {
    l = std::exp(l - mx);
    z += l;
  }
  for (double& l : logits) l /= z;
  return logits;
}

void train_head(DbnModel& model, const std::vector<Vec>& samples,
                const std::vector<std::size_t>& labels, std::size_t class_count,
                std::size_t epochs, double lr, std::size_t batch_size, RngStream& rng) {
  if (samples.size() != labels.size()) throw ContractError("train_head: samples/labels mismatch");
  for (std::size_t y : labels)
    if (y >= class_count) throw ContractError("train_head: label out of range");

  model.check_chaining();
  const std::size_t top = model.layers.back().hidden_count;
  if (model.head.input_dim != top || model.head.class_count != class_count)
    model.head = ClassifierHead(top, class_count);

  std::vector<Vec> feats;
  feats.reserve(samples.size());
  for (const Vec& v : samples) feats.push_back(propagate(model, v).back());

  const std::size_t n = feats.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  for (std::size_t e = 0; e < epochs; ++e) {
    // Fisher-Yates with the shared stream keeps runs reproducible.
    for (std::size_t i = n; i > 1; --i)
      std::swap(order[i - 1], order[rng.next_u64() % i]);

    for (std::size_t start = 0; start < n; start += batch_size) {
      const std::size_t end = std::min(start + batch_size, n);
      Vec gw(top * class_count, 0.0), gb(class_count, 0.0);
      for (std::size_t s = start; s < end; ++s) {
        const Vec& x = feats[order[s]];
        const std::size_t y = labels[order[s]];
        Vec p = softmax_probs(model.head, x);
        for (std::size_t k = 0; k < class_count; ++k) {
          double err = (k == y ? 1.0 : 0.0) - p[k];
          gb[k] += err;
          for (std::size_t i = 0; i < top; ++i) gw[i * class_count + k] += err * x[i];
        }
      }
      const double scale = lr / static_cast<double>(end - start);
      for (std::size_t k = 0; k < gw.size(); ++k) model.head.weights[k] += scale * gw[k];
      for (std::size_t k = 0; k < class_count; ++k) model.head.biases[k] += scale * gb[k];
    }
  }
}

std::pair<std::size_t, Vec> classify(const DbnModel& model, const Vec& v) {
  Vec probs = softmax_probs(model.head, propagate(model, v).back());
  std::size_t best = 0;
  for (std::size_t k = 1; k < probs.size(); ++k)
    if (probs[k] > probs[best]) best = k;  // ties keep the lowest index
  return {best, std::move(probs)};
}

}  // namespace adbn
