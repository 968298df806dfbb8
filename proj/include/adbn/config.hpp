#pragma once

#include <iosfwd>
#include <string>

#include "adbn/adaptive.hpp"
#include "adbn/datasets.hpp"
#include "adbn/dbn.hpp"
#include "adbn/rules.hpp"

namespace adbn {

// Flat key=value experiment configuration. Every field has a default; flags
// override file values.
struct ExperimentConfig {
  // dataset
  std::string dataset = "bars_and_stripes";  // bars_and_stripes | confusable_pair | cifar10 | csv
  std::string dataset_path;                  // cifar10 dir or csv file
  std::size_t bas_size = 4;
  std::size_t sample_count = 500;
  std::size_t dim = 64;
  double overlap = 0.8;
  bool cifar_grayscale = true;
  std::size_t cifar_subset = 0;  // 0 = full split
  double zca_epsilon = 0.01;

  AdaptiveConfig adaptive;
  LayerGenConfig layer_gen;
  TrainingHyperparams train;

  double theta_fire = 0.6;
  std::size_t rule_class_a = 0;
  std::size_t rule_class_b = 1;
  std::size_t max_antecedent = 4;

  std::uint64_t seed = 7;
  std::string out_dir = "adbn-run";
};

ExperimentConfig parse_config(std::istream& is);
ExperimentConfig load_config_file(const std::string& path);
void write_config(const ExperimentConfig& cfg, std::ostream& os);

// Applies one key=value assignment; throws ContractError on unknown keys.
void set_config_key(ExperimentConfig& cfg, const std::string& key, const std::string& value);

struct DataSplits {
  LabeledSamples train;
  LabeledSamples validation;
  LabeledSamples test;
  std::size_t class_count = 0;
};

// Deterministic splits from the config: synthetic sets are generated from
// the seed and split 50/25/25; cifar10/csv use their native splits with the
// validation half carved from the test split.
DataSplits resolve_dataset(const ExperimentConfig& cfg);

}  // namespace adbn
