#include "adbn/rules.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <tuple>

namespace adbn {

namespace {

std::set<std::size_t> fired_set(const Vec& probs, double theta_fire) {
  std::set<std::size_t> out;
  for (std::size_t j = 0; j < probs.size(); ++j)
    if (is_fired(probs[j], theta_fire)) out.insert(j);
  return out;
}

bool antecedent_fires(const Rule& rule, const std::set<std::size_t>& fired) {
  for (std::size_t j : rule.antecedent)
    if (!fired.count(j)) return false;
  return true;
}

}  // namespace

FiringTrace fire_trace(const DbnModel& model, const Vec& v, double theta_fire) {
  FiringTrace t;
  t.theta_fire = theta_fire;
  t.activations = propagate(model, v);
  for (const Vec& a : t.activations) t.fired.push_back(fired_set(a, theta_fire));
  t.predicted = classify(model, v).first;
  return t;
}

std::vector<std::pair<std::size_t, std::size_t>> fired_count_stats(const DbnModel& model,
                                                                   const std::vector<Vec>& data,
                                                                   std::size_t layer,
                                                                   double theta_fire) {
  if (layer >= model.layers.size()) throw ContractError("fired_count_stats: invalid layer");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(data.size());
  const std::size_t J = model.layers[layer].hidden_count;
  for (const Vec& v : data) {
    std::size_t fired = fired_set(propagate(model, v)[layer], theta_fire).size();
    out.emplace_back(fired, J - fired);
  }
  return out;
}

PathGraph build_path_graph(const DbnModel& model, const std::vector<FiringTrace>& traces) {
  if (traces.empty()) throw ContractError("build_path_graph: empty traces");
  PathGraph g;
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;
  for (const FiringTrace& t : traces) {
    for (std::size_t l = 0; l < t.fired.size(); ++l)
      for (std::size_t j : t.fired[l]) g.nodes.insert({l, j});
    for (std::size_t l = 0; l + 1 < t.fired.size(); ++l) {
      const RbmParams& upper = model.layers[l + 1];
      for (std::size_t j : t.fired[l]) {
        for (std::size_t jn : t.fired[l + 1]) {
          if (!seen.insert({l, j, jn}).second) continue;
          g.edges.push_back({l, j, jn, std::fabs(upper.w(j, jn)), 0});
        }
      }
    }
  }

  // Quintile strength over included edges only.
  if (!g.edges.empty()) {
    std::vector<std::size_t> order(g.edges.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return g.edges[a].weight_magnitude < g.edges[b].weight_magnitude;
    });
    for (std::size_t pos = 0; pos < order.size(); ++pos)
      g.edges[order[pos]].strength = static_cast<unsigned>(1 + pos * 5 / order.size());
  }
  return g;
}

void write_dot(const PathGraph& graph, std::ostream& os) {
  os << "digraph paths {\n";
  for (const auto& [layer, neuron] : graph.nodes)
    os << "  L" << layer << "_" << neuron << ";\n";
  for (const PathGraph::Edge& e : graph.edges)
    os << "  L" << e.layer << "_" << e.from << " -> L" << e.layer + 1 << "_" << e.to
       << " [penwidth=" << e.strength << "];\n";
  os << "}\n";
}

std::pair<std::size_t, FiringTrace> apply_rules(const DbnModel& model,
                                                const std::vector<Rule>& rules, const Vec& v,
                                                double theta_fire) {
  for (const Rule& r : rules) {
    if (r.antecedent.empty()) throw ContractError("apply_rules: empty antecedent");
    if (r.layer + 1 >= model.layers.size())
      throw ContractError("apply_rules: rule layer out of range");
    for (std::size_t j : r.antecedent)
      if (j >= model.layers[r.layer].hidden_count)
        throw ContractError("apply_rules: antecedent index out of range");
    if (r.consequent >= model.layers[r.layer + 1].hidden_count)
      throw ContractError("apply_rules: consequent index out of range");
  }

  FiringTrace t;
  t.theta_fire = theta_fire;
  const Vec* cur = &v;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    Vec act = hidden_conditional(model.layers[l], *cur);
    if (l > 0) {
      const std::set<std::size_t>& below = t.fired[l - 1];
      for (const Rule& r : rules)
        if (r.layer == l - 1 && antecedent_fires(r, below)) act[r.consequent] = 0.0;
    }
    t.activations.push_back(std::move(act));
    t.fired.push_back(fired_set(t.activations.back(), theta_fire));
    cur = &t.activations.back();
  }
  Vec probs = softmax_probs(model.head, t.activations.back());
  std::size_t best = 0;
  for (std::size_t k = 1; k < probs.size(); ++k)
    if (probs[k] > probs[best]) best = k;
  t.predicted = best;
  return {best, std::move(t)};
}

RuleEvaluation evaluate_with_rules(const DbnModel& model, const std::vector<Rule>& rules,
                                   const LabeledSamples& data, double theta_fire) {
  if (data.samples.empty()) throw ContractError("evaluate_with_rules: empty data");
  const std::size_t C = model.head.class_count;
  RuleEvaluation r;
  r.confusion_without.assign(C, std::vector<std::size_t>(C, 0));
  r.confusion_with.assign(C, std::vector<std::size_t>(C, 0));
  std::size_t hit_without = 0, hit_with = 0;
  for (std::size_t n = 0; n < data.samples.size(); ++n) {
    const std::size_t y = data.labels[n];
    std::size_t plain = classify(model, data.samples[n]).first;
    std::size_t ruled = apply_rules(model, rules, data.samples[n], theta_fire).first;
    r.confusion_without[y][plain]++;
    r.confusion_with[y][ruled]++;
    if (plain == y) ++hit_without;
    if (ruled == y) ++hit_with;
  }
  const double n = static_cast<double>(data.samples.size());
  r.accuracy_without = hit_without / n;
  r.accuracy_with = hit_with / n;
  return r;
}

namespace {

std::size_t pair_confusion(const RuleEvaluation& ev, std::size_t a, std::size_t b) {
  return ev.confusion_with[a][b] + ev.confusion_with[b][a];
}

}  // namespace

std::vector<Rule> mine_rules(const DbnModel& model, const LabeledSamples& validation,
                             std::pair<std::size_t, std::size_t> class_pair, double theta_fire,
                             std::size_t max_antecedent) {
  if (max_antecedent < 1) throw ContractError("mine_rules: max_antecedent must be >= 1");
  const auto [A, B] = class_pair;
  bool has_a = false, has_b = false;
  for (std::size_t y : validation.labels) {
    has_a |= y == A;
    has_b |= y == B;
  }
  if (!has_a || !has_b) throw ContractError("mine_rules: validation must contain both classes");
  if (model.layers.size() < 2) return {};

  // Traces split per true class into correct and pair-confused wrong.
  std::vector<FiringTrace> correct_a, correct_b, wrong_ab, wrong_ba;
  for (std::size_t n = 0; n < validation.samples.size(); ++n) {
    const std::size_t y = validation.labels[n];
    if (y != A && y != B) continue;
    FiringTrace t = fire_trace(model, validation.samples[n], theta_fire);
    t.true_label = y;
    if (t.predicted == y)
      (y == A ? correct_a : correct_b).push_back(std::move(t));
    else if (y == A && t.predicted == B)
      wrong_ab.push_back(std::move(t));
    else if (y == B && t.predicted == A)
      wrong_ba.push_back(std::move(t));
  }
  if (wrong_ab.empty() && wrong_ba.empty()) return {};

  const double kWrongFrac = 0.8;
  const double kCorrectFrac = 0.1;

  auto fire_fraction = [](const std::vector<FiringTrace>& traces, std::size_t layer,
                          std::size_t j) {
    if (traces.empty()) return 0.0;
    std::size_t cnt = 0;
    for (const FiringTrace& t : traces) cnt += t.fired[layer].count(j);
    return static_cast<double>(cnt) / static_cast<double>(traces.size());
  };

  // Candidate rules per boundary, highest boundary first.
  std::vector<Rule> candidates;
  for (std::size_t l = model.layers.size() - 1; l >= 1; --l) {
    const std::size_t boundary = l - 1;  // antecedent layer
    for (int side = 0; side < 2; ++side) {
      const std::vector<FiringTrace>& wrong = side == 0 ? wrong_ab : wrong_ba;
      const std::vector<FiringTrace>& correct = side == 0 ? correct_a : correct_b;
      if (wrong.empty()) continue;
      for (std::size_t jn = 0; jn < model.layers[l].hidden_count; ++jn) {
        if (fire_fraction(wrong, l, jn) < kWrongFrac) continue;
        if (fire_fraction(correct, l, jn) > kCorrectFrac) continue;

        std::vector<std::pair<double, std::size_t>> ante;
        for (std::size_t j = 0; j < model.layers[boundary].hidden_count; ++j) {
          double f = fire_fraction(wrong, boundary, j);
          if (f >= kWrongFrac) ante.emplace_back(f, j);
        }
        if (ante.empty()) continue;
        std::stable_sort(ante.begin(), ante.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        if (ante.size() > max_antecedent) ante.resize(max_antecedent);
        Rule r{boundary, {}, jn};
        for (const auto& [f, j] : ante) r.antecedent.push_back(j);
        std::sort(r.antecedent.begin(), r.antecedent.end());
        candidates.push_back(std::move(r));
      }
    }
  }

  // Greedy acceptance: a candidate must not reduce validation accuracy and
  // must strictly reduce the A<->B confusion count; best reduction first.
  std::vector<Rule> accepted;
  RuleEvaluation base = evaluate_with_rules(model, accepted, validation, theta_fire);
  bool progress = true;
  while (progress && !candidates.empty()) {
    progress = false;
    std::size_t best_idx = candidates.size();
    RuleEvaluation best_eval{};
    long best_gain = 0;
    for (std::size_t idx = 0; idx < candidates.size(); ++idx) {
      std::vector<Rule> trial = accepted;
      trial.push_back(candidates[idx]);
      RuleEvaluation ev = evaluate_with_rules(model, trial, validation, theta_fire);
      if (ev.accuracy_with < base.accuracy_with) continue;
      long gain = static_cast<long>(pair_confusion(base, A, B)) -
                  static_cast<long>(pair_confusion(ev, A, B));
      if (gain <= 0) continue;
      if (best_idx == candidates.size() || gain > best_gain) {
        best_idx = idx;
        best_gain = gain;
        best_eval = ev;
      }
    }
    if (best_idx < candidates.size()) {
      accepted.push_back(candidates[best_idx]);
      candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(best_idx));
      base = best_eval;
      progress = true;
    }
  }
  return accepted;
}

void write_rules_text(const std::vector<Rule>& rules, std::ostream& os) {
  for (const Rule& r : rules) {
    os << "IF L" << r.layer << ":[";
    for (std::size_t i = 0; i < r.antecedent.size(); ++i) {
      if (i) os << ",";
      os << r.antecedent[i];
    }
    os << "] THEN INACTIVATE L" << r.layer + 1 << ":" << r.consequent << "\n";
  }
}

std::vector<Rule> parse_rules_text(std::istream& is) {
  std::vector<Rule> rules;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    Rule r;
    std::size_t l2;
    char bracket = 0;
    std::istringstream ss(line);
    std::string word;
    ss >> word;  // IF
    if (word != "IF") throw ContractError("parse_rules_text: bad line: " + line);
    ss >> word;  // L<l>:[...]
    if (word.size() < 4 || word[0] != 'L')
      throw ContractError("parse_rules_text: bad antecedent: " + line);
    std::istringstream ws(word.substr(1));
    ws >> r.layer >> bracket >> bracket;  // ':' then '['
    while (ws) {
      std::size_t j;
      if (!(ws >> j)) break;
      r.antecedent.push_back(j);
      char sep;
      ws >> sep;
      if (sep == ']') break;
    }
    ss >> word;  // THEN
    ss >> word;  // INACTIVATE
    ss >> word;  // L<l+1>:<j>
    std::istringstream cs(word.substr(1));
    cs >> l2 >> bracket >> r.consequent;
    if (r.antecedent.empty() || l2 != r.layer + 1)
      throw ContractError("parse_rules_text: bad rule: " + line);
    rules.push_back(std::move(r));
  }
  return rules;
}

}  // namespace adbn
