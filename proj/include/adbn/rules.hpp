#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "adbn/dbn.hpp"

namespace adbn {

struct FiringTrace {
  std::vector<Vec> activations;                 // per layer, input excluded
  std::vector<std::set<std::size_t>> fired;     // { j : p_j > theta_fire }, strict
  double theta_fire = 0.6;
  std::size_t predicted = 0;
  std::optional<std::size_t> true_label;
};

struct PathGraph {
  struct Edge {
    std::size_t layer;  // source layer index
    std::size_t from;
    std::size_t to;
    double weight_magnitude;
    unsigned strength;  // quintile class 1..5
  };
  std::set<std::pair<std::size_t, std::size_t>> nodes;  // (layer, neuron)
  std::vector<Edge> edges;
};

// Strict fire condition: activation must exceed the threshold, equality is
// not fired.
inline bool is_fired(double activation, double theta_fire) { return activation > theta_fire; }

FiringTrace fire_trace(const DbnModel& model, const Vec& v, double theta_fire = 0.6);

// (fired count, inactive count) per sample at one layer.
std::vector<std::pair<std::size_t, std::size_t>> fired_count_stats(const DbnModel& model,
                                                                   const std::vector<Vec>& data,
                                                                   std::size_t layer,
                                                                   double theta_fire);

PathGraph build_path_graph(const DbnModel& model, const std::vector<FiringTrace>& traces);

void write_dot(const PathGraph& graph, std::ostream& os);

struct LabeledSamples {
  std::vector<Vec> samples;
  std::vector<std::size_t> labels;
};

std::vector<Rule> mine_rules(const DbnModel& model, const LabeledSamples& validation,
                             std::pair<std::size_t, std::size_t> class_pair,
                             double theta_fire = 0.6, std::size_t max_antecedent = 4);

// Propagation with rule-gated inactivation: once a layer's fired set
// contains a rule's whole antecedent, the consequent activation in the next
// layer is forced to 0 before propagating further.
std::pair<std::size_t, FiringTrace> apply_rules(const DbnModel& model,
                                                const std::vector<Rule>& rules, const Vec& v,
                                                double theta_fire = 0.6);

struct RuleEvaluation {
  double accuracy_without;
  double accuracy_with;
  std::vector<std::vector<std::size_t>> confusion_without;  // [true][pred]
  std::vector<std::vector<std::size_t>> confusion_with;
};

RuleEvaluation evaluate_with_rules(const DbnModel& model, const std::vector<Rule>& rules,
                                   const LabeledSamples& data, double theta_fire = 0.6);

// `IF L<l>:[j1,j2,...] THEN INACTIVATE L<l+1>:<j>` per line.
void write_rules_text(const std::vector<Rule>& rules, std::ostream& os);
std::vector<Rule> parse_rules_text(std::istream& is);

}  // namespace adbn
