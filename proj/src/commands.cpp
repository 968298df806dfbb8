#include "adbn/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include "adbn/checkpoint.hpp"
#include "adbn/rules.hpp"

namespace adbn {

namespace fs = std::filesystem;

namespace {

void print_confusion(const std::vector<std::vector<std::size_t>>& m, std::ostream& os) {
  for (const auto& row : m) {
    for (std::size_t k = 0; k < row.size(); ++k) os << (k ? " " : "") << row[k];
    os << '\n';
  }
}

double accuracy(const DbnModel& model, const LabeledSamples& data) {
  std::size_t hits = 0;
  for (std::size_t n = 0; n < data.samples.size(); ++n)
    if (classify(model, data.samples[n]).first == data.labels[n]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(data.samples.size());
}

}  // namespace

int cmd_train(const ExperimentConfig& cfg) {
  DataSplits splits = resolve_dataset(cfg);
  fs::create_directories(cfg.out_dir);

  {
    std::ofstream f(cfg.out_dir + "/config.txt");
    if (!f) throw DataError("train: cannot write to " + cfg.out_dir);
    write_config(cfg, f);
  }

  RngStream rng(cfg.seed);
  AdaptiveDbnResult result =
      train_adaptive_dbn(splits.train.samples, cfg.adaptive, cfg.layer_gen, cfg.train, rng);
  train_head(result.model, splits.train.samples, splits.train.labels, splits.class_count,
             cfg.train.head_epochs, cfg.train.learning_rate, cfg.train.batch_size, rng);

  save_checkpoint_file(result.model, cfg.out_dir + "/checkpoint.bin");
  {
    std::ofstream f(cfg.out_dir + "/train_log.csv");
    result.log.write_csv(f);
  }

  const double train_acc = accuracy(result.model, splits.train);
  const double test_acc = accuracy(result.model, splits.test);
  {
    std::ofstream f(cfg.out_dir + "/summary.txt");
    f << "layers=" << result.model.layers.size() << '\n';
    for (std::size_t l = 0; l < result.model.layers.size(); ++l)
      f << "layer" << l << "_hidden=" << result.model.layers[l].hidden_count << '\n';
    f << "train_accuracy=" << train_acc << '\n' << "test_accuracy=" << test_acc << '\n';
  }
  std::cout << "layers=" << result.model.layers.size() << " train_accuracy=" << train_acc
            << " test_accuracy=" << test_acc << '\n';
  return kExitOk;
}

int cmd_eval(const ExperimentConfig& cfg, const std::string& checkpoint, bool with_rules) {
  DbnModel model = load_checkpoint_file(checkpoint);
  DataSplits splits = resolve_dataset(cfg);

  std::cout << "train_accuracy=" << accuracy(model, splits.train) << '\n';
  RuleEvaluation ev = evaluate_with_rules(model, {}, splits.test, cfg.theta_fire);
  std::cout << "test_accuracy=" << ev.accuracy_without << '\n' << "confusion:\n";
  print_confusion(ev.confusion_without, std::cout);

  if (with_rules) {
    RuleEvaluation rev = evaluate_with_rules(model, model.rules, splits.test, cfg.theta_fire);
    std::cout << "test_accuracy_without_rules=" << rev.accuracy_without << '\n'
              << "test_accuracy_with_rules=" << rev.accuracy_with << '\n'
              << "confusion_with_rules:\n";
    print_confusion(rev.confusion_with, std::cout);
  }
  return kExitOk;
}

int cmd_trace(const ExperimentConfig& cfg, const std::string& checkpoint) {
  DbnModel model = load_checkpoint_file(checkpoint);
  DataSplits splits = resolve_dataset(cfg);
  const std::size_t A = cfg.rule_class_a;
  const std::size_t B = cfg.rule_class_b;

  bool has_a = false, has_b = false;
  for (std::size_t y : splits.test.labels) {
    has_a |= y == A;
    has_b |= y == B;
  }
  if (!has_a || !has_b)
    throw DataError("trace: class " + std::to_string(has_a ? B : A) + " absent from dataset");

  std::vector<FiringTrace> correct_a, wrong_ab, correct_b, wrong_ba;
  for (std::size_t n = 0; n < splits.test.samples.size(); ++n) {
    const std::size_t y = splits.test.labels[n];
    if (y != A && y != B) continue;
    FiringTrace t = fire_trace(model, splits.test.samples[n], cfg.theta_fire);
    if (y == A && t.predicted == A) correct_a.push_back(std::move(t));
    else if (y == A && t.predicted == B) wrong_ab.push_back(std::move(t));
    else if (y == B && t.predicted == B) correct_b.push_back(std::move(t));
    else if (y == B && t.predicted == A) wrong_ba.push_back(std::move(t));
  }

  fs::create_directories(cfg.out_dir);
  auto emit = [&](const std::vector<FiringTrace>& traces, const std::string& name) {
    std::ofstream f(cfg.out_dir + "/" + name + ".dot");
    if (traces.empty()) {
      f << "digraph paths {\n}\n";
      std::cout << name << ": no matching samples, empty graph\n";
      return;
    }
    PathGraph g = build_path_graph(model, traces);
    write_dot(g, f);
    std::cout << name << ": " << g.nodes.size() << " nodes, " << g.edges.size() << " edges\n";
  };
  emit(correct_a, "correct_" + std::to_string(A));
  emit(wrong_ab, "wrong_" + std::to_string(A) + "_to_" + std::to_string(B));
  emit(correct_b, "correct_" + std::to_string(B));
  emit(wrong_ba, "wrong_" + std::to_string(B) + "_to_" + std::to_string(A));
  return kExitOk;
}

int cmd_rules(const ExperimentConfig& cfg, const std::string& checkpoint) {
  DbnModel model = load_checkpoint_file(checkpoint);
  DataSplits splits = resolve_dataset(cfg);

  RuleEvaluation before = evaluate_with_rules(model, {}, splits.validation, cfg.theta_fire);
  std::vector<Rule> rules = mine_rules(model, splits.validation,
                                       {cfg.rule_class_a, cfg.rule_class_b}, cfg.theta_fire,
                                       cfg.max_antecedent);
  RuleEvaluation after = evaluate_with_rules(model, rules, splits.validation, cfg.theta_fire);

  fs::create_directories(cfg.out_dir);
  {
    std::ofstream f(cfg.out_dir + "/rules.txt");
    write_rules_text(rules, f);
  }
  model.rules = rules;
  save_checkpoint_file(model, cfg.out_dir + "/checkpoint.bin");

  std::cout << "rules=" << rules.size() << '\n'
            << "validation_accuracy_before=" << before.accuracy_without << '\n'
            << "validation_accuracy_after=" << after.accuracy_with << '\n';
  return kExitOk;
}

}  // namespace adbn
