#include "adbn/config.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace adbn {

namespace {

std::size_t to_size(const std::string& v) { return static_cast<std::size_t>(std::stoull(v)); }

LabeledSamples slice(const LabeledDataset& d, std::size_t begin, std::size_t end) {
  LabeledSamples out;
  out.samples.assign(d.samples.begin() + static_cast<std::ptrdiff_t>(begin),
                     d.samples.begin() + static_cast<std::ptrdiff_t>(end));
  out.labels.assign(d.labels.begin() + static_cast<std::ptrdiff_t>(begin),
                    d.labels.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

}  // namespace

void set_config_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "dataset") cfg.dataset = value;
  else if (key == "dataset_path") cfg.dataset_path = value;
  else if (key == "bas_size") cfg.bas_size = to_size(value);
  else if (key == "sample_count") cfg.sample_count = to_size(value);
  else if (key == "dim") cfg.dim = to_size(value);
  else if (key == "overlap") cfg.overlap = std::stod(value);
  else if (key == "cifar_grayscale") cfg.cifar_grayscale = value == "1" || value == "true";
  else if (key == "cifar_subset") cfg.cifar_subset = to_size(value);
  else if (key == "zca_epsilon") cfg.zca_epsilon = std::stod(value);
  else if (key == "theta_G") cfg.adaptive.theta_G = std::stod(value);
  else if (key == "theta_A") cfg.adaptive.theta_A = std::stod(value);
  else if (key == "alpha_c") cfg.adaptive.alpha_c = std::stod(value);
  else if (key == "alpha_W") cfg.adaptive.alpha_W = std::stod(value);
  else if (key == "eps1") cfg.adaptive.eps1 = std::stod(value);
  else if (key == "eps2") cfg.adaptive.eps2 = std::stod(value);
  else if (key == "eps3") cfg.adaptive.eps3 = std::stod(value);
  else if (key == "theta_small") cfg.adaptive.theta_small = std::stod(value);
  else if (key == "generation_phase_epochs") cfg.adaptive.generation_phase_epochs = to_size(value);
  else if (key == "forgetting_phase_epochs") cfg.adaptive.forgetting_phase_epochs = to_size(value);
  else if (key == "final_phase_epochs") cfg.adaptive.final_phase_epochs = to_size(value);
  else if (key == "max_hidden") cfg.adaptive.max_hidden = to_size(value);
  else if (key == "wd_window") cfg.adaptive.wd_window = to_size(value);
  else if (key == "theta_L1") cfg.layer_gen.theta_L1 = std::stod(value);
  else if (key == "theta_L2") cfg.layer_gen.theta_L2 = std::stod(value);
  else if (key == "alpha_WD") cfg.layer_gen.alpha_WD = std::stod(value);
  else if (key == "alpha_E") cfg.layer_gen.alpha_E = std::stod(value);
  else if (key == "max_layers") cfg.layer_gen.max_layers = to_size(value);
  else if (key == "learning_rate") cfg.train.learning_rate = std::stod(value);
  else if (key == "batch_size") cfg.train.batch_size = to_size(value);
  else if (key == "cd_k") cfg.train.cd_k = static_cast<unsigned>(to_size(value));
  else if (key == "initial_hidden") cfg.train.initial_hidden = to_size(value);
  else if (key == "head_epochs") cfg.train.head_epochs = to_size(value);
  else if (key == "theta_fire") cfg.theta_fire = std::stod(value);
  else if (key == "rule_class_a") cfg.rule_class_a = to_size(value);
  else if (key == "rule_class_b") cfg.rule_class_b = to_size(value);
  else if (key == "max_antecedent") cfg.max_antecedent = to_size(value);
  else if (key == "seed") cfg.seed = std::stoull(value);
  else if (key == "out_dir") cfg.out_dir = value;
  else throw ContractError("config: unknown key '" + key + "'");
}

ExperimentConfig parse_config(std::istream& is) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw ContractError("config line " + std::to_string(lineno) + ": expected key=value");
      continue;
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    set_config_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("config: cannot open " + path);
  return parse_config(f);
}

void write_config(const ExperimentConfig& cfg, std::ostream& os) {
  os.precision(17);
  os << "dataset=" << cfg.dataset << '\n';
  if (!cfg.dataset_path.empty()) os << "dataset_path=" << cfg.dataset_path << '\n';
  os << "bas_size=" << cfg.bas_size << '\n'
     << "sample_count=" << cfg.sample_count << '\n'
     << "dim=" << cfg.dim << '\n'
     << "overlap=" << cfg.overlap << '\n'
     << "cifar_grayscale=" << (cfg.cifar_grayscale ? 1 : 0) << '\n'
     << "cifar_subset=" << cfg.cifar_subset << '\n'
     << "zca_epsilon=" << cfg.zca_epsilon << '\n'
     << "theta_G=" << cfg.adaptive.theta_G << '\n'
     << "theta_A=" << cfg.adaptive.theta_A << '\n'
     << "alpha_c=" << cfg.adaptive.alpha_c << '\n'
     << "alpha_W=" << cfg.adaptive.alpha_W << '\n'
     << "eps1=" << cfg.adaptive.eps1 << '\n'
     << "eps2=" << cfg.adaptive.eps2 << '\n'
     << "eps3=" << cfg.adaptive.eps3 << '\n'
     << "theta_small=" << cfg.adaptive.theta_small << '\n'
     << "generation_phase_epochs=" << cfg.adaptive.generation_phase_epochs << '\n'
     << "forgetting_phase_epochs=" << cfg.adaptive.forgetting_phase_epochs << '\n'
     << "final_phase_epochs=" << cfg.adaptive.final_phase_epochs << '\n'
     << "max_hidden=" << cfg.adaptive.max_hidden << '\n'
     << "wd_window=" << cfg.adaptive.wd_window << '\n'
     << "theta_L1=" << cfg.layer_gen.theta_L1 << '\n'
     << "theta_L2=" << cfg.layer_gen.theta_L2 << '\n'
     << "alpha_WD=" << cfg.layer_gen.alpha_WD << '\n'
     << "alpha_E=" << cfg.layer_gen.alpha_E << '\n'
     << "max_layers=" << cfg.layer_gen.max_layers << '\n'
     << "learning_rate=" << cfg.train.learning_rate << '\n'
     << "batch_size=" << cfg.train.batch_size << '\n'
     << "cd_k=" << cfg.train.cd_k << '\n'
     << "initial_hidden=" << cfg.train.initial_hidden << '\n'
     << "head_epochs=" << cfg.train.head_epochs << '\n'
     << "theta_fire=" << cfg.theta_fire << '\n'
     << "rule_class_a=" << cfg.rule_class_a << '\n'
     << "rule_class_b=" << cfg.rule_class_b << '\n'
     << "max_antecedent=" << cfg.max_antecedent << '\n'
     << "seed=" << cfg.seed << '\n'
     << "out_dir=" << cfg.out_dir << '\n';
}

DataSplits resolve_dataset(const ExperimentConfig& cfg) {
  DataSplits out;
  if (cfg.dataset == "bars_and_stripes" || cfg.dataset == "confusable_pair") {
    RngStream rng(cfg.seed ^ 0x5eedDa7aull);
    LabeledDataset all = cfg.dataset == "bars_and_stripes"
                             ? bars_and_stripes(cfg.bas_size, cfg.sample_count, rng)
                             : confusable_pair(cfg.dim, cfg.sample_count, cfg.overlap, rng);
    out.class_count = all.class_count;
    const std::size_t n = all.samples.size();
    const std::size_t ntrain = n / 2;
    const std::size_t nvalid = n / 4;
    out.train = slice(all, 0, ntrain);
    out.validation = slice(all, ntrain, ntrain + nvalid);
    out.test = slice(all, ntrain + nvalid, n);
  } else if (cfg.dataset == "cifar10") {
    if (cfg.dataset_path.empty()) throw DataError("cifar10: dataset_path is required");
    Cifar10Data data = load_cifar10(cfg.dataset_path, cfg.cifar_grayscale);
    if (cfg.cifar_subset > 0) {
      data.train.samples.resize(std::min(cfg.cifar_subset, data.train.samples.size()));
      data.train.labels.resize(data.train.samples.size());
      data.test.samples.resize(std::min(cfg.cifar_subset / 2, data.test.samples.size()));
      data.test.labels.resize(data.test.samples.size());
    }
    ZcaTransform zca = fit_zca(data.train.samples, cfg.zca_epsilon);
    RescaleMap map;
    data.train.samples = apply_zca(zca, data.train.samples, map, true);
    data.test.samples = apply_zca(zca, data.test.samples, map, false);
    out.class_count = 10;
    out.train = {data.train.samples, data.train.labels};
    const std::size_t half = data.test.samples.size() / 2;
    LabeledDataset test_ds = data.test;
    out.validation = slice(test_ds, 0, half);
    out.test = slice(test_ds, half, test_ds.samples.size());
  } else if (cfg.dataset == "csv") {
    if (cfg.dataset_path.empty()) throw DataError("csv: dataset_path is required");
    std::ifstream f(cfg.dataset_path);
    if (!f) throw DataError("csv: cannot open " + cfg.dataset_path);
    LabeledDataset all = read_csv_dataset(f);
    out.class_count = all.class_count;
    const std::size_t n = all.samples.size();
    out.train = slice(all, 0, n / 2);
    out.validation = slice(all, n / 2, 3 * n / 4);
    out.test = slice(all, 3 * n / 4, n);
  } else {
    throw DataError("unknown dataset '" + cfg.dataset + "'");
  }
  return out;
}

}  // namespace adbn
