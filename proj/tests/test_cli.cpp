#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "adbn/checkpoint.hpp"
#include "adbn/commands.hpp"
#include "adbn/config.hpp"
#include "doctest.h"

using namespace adbn;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("adbn_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string read_bytes(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

DbnModel small_model() {
  RngStream rng(3);
  DbnModel m;
  m.layers = {init_rbm(4, 3, rng), init_rbm(3, 2, rng)};
  m.head = ClassifierHead(2, 2);
  for (double& x : m.head.weights) x = rng.uniform(-1, 1);
  m.rules = {{0, {1, 2}, 0}};
  return m;
}

ExperimentConfig quick_config(const std::string& out_dir) {
  ExperimentConfig cfg;
  cfg.dataset = "bars_and_stripes";
  cfg.bas_size = 3;
  cfg.sample_count = 80;
  cfg.adaptive.generation_phase_epochs = 2;
  cfg.adaptive.forgetting_phase_epochs = 1;
  cfg.adaptive.final_phase_epochs = 1;
  cfg.train.batch_size = 10;
  cfg.train.initial_hidden = 3;
  cfg.train.head_epochs = 10;
  cfg.out_dir = out_dir;
  cfg.seed = 7;
  return cfg;
}

}  // namespace

TEST_CASE("checkpoint round-trips byte-exact") {
  DbnModel m = small_model();
  std::ostringstream os1(std::ios::binary);
  save_checkpoint(m, os1);

  std::istringstream is(os1.str(), std::ios::binary);
  DbnModel back = load_checkpoint(is);
  CHECK(back.layers.size() == 2);
  CHECK(back.layers[0].W == m.layers[0].W);
  CHECK(back.head.weights == m.head.weights);
  CHECK(back.rules == m.rules);

  std::ostringstream os2(std::ios::binary);
  save_checkpoint(back, os2);
  CHECK(os1.str() == os2.str());
}

TEST_CASE("checkpoint rejects bad magic and bad version") {
  std::string bytes;
  {
    std::ostringstream os(std::ios::binary);
    save_checkpoint(small_model(), os);
    bytes = os.str();
  }
  std::string corrupt = bytes;
  corrupt[0] = 'X';
  std::istringstream is1(corrupt, std::ios::binary);
  CHECK_THROWS_WITH_AS(load_checkpoint(is1), doctest::Contains("ADBN"), CheckpointError);

  corrupt = bytes;
  corrupt[4] = 99;
  std::istringstream is2(corrupt, std::ios::binary);
  CHECK_THROWS_WITH_AS(load_checkpoint(is2), doctest::Contains("version"), CheckpointError);

  std::istringstream is3(bytes.substr(0, 20), std::ios::binary);
  CHECK_THROWS_AS(load_checkpoint(is3), CheckpointError);
}

TEST_CASE("config: parse, override, unknown key, round-trip") {
  std::istringstream is(
      "dataset = confusable_pair\n"
      "# comment line\n"
      "dim=32\n"
      "theta_G=0.01\n"
      "seed=42\n");
  ExperimentConfig cfg = parse_config(is);
  CHECK(cfg.dataset == "confusable_pair");
  CHECK(cfg.dim == 32);
  CHECK(cfg.adaptive.theta_G == 0.01);
  CHECK(cfg.seed == 42);
  CHECK(cfg.train.batch_size == 100);        // default per the protocol
  CHECK(cfg.train.learning_rate == 0.1);
  CHECK(cfg.adaptive.theta_A == 0.1);
  CHECK(cfg.layer_gen.theta_L1 == 0.05);

  set_config_key(cfg, "batch_size", "25");
  CHECK(cfg.train.batch_size == 25);
  CHECK_THROWS_AS(set_config_key(cfg, "bogus", "1"), ContractError);

  std::ostringstream os;
  write_config(cfg, os);
  std::istringstream round(os.str());
  ExperimentConfig back = parse_config(round);
  CHECK(back.dim == cfg.dim);
  CHECK(back.train.batch_size == 25);
}

TEST_CASE("resolve_dataset: split sizes and missing-path errors") {
  ExperimentConfig cfg;
  cfg.dataset = "bars_and_stripes";
  cfg.bas_size = 3;
  cfg.sample_count = 100;
  DataSplits s = resolve_dataset(cfg);
  CHECK(s.train.samples.size() == 50);
  CHECK(s.validation.samples.size() == 25);
  CHECK(s.test.samples.size() == 25);
  CHECK(s.class_count == 2);

  ExperimentConfig bad;
  bad.dataset = "cifar10";
  CHECK_THROWS_AS(resolve_dataset(bad), DataError);
  bad.dataset = "nonsense";
  CHECK_THROWS_AS(resolve_dataset(bad), DataError);
}

TEST_CASE("cmd_train writes a round-trippable checkpoint and is byte-reproducible") {
  TempDir dir;
  ExperimentConfig cfg = quick_config((dir.path / "run1").string());
  REQUIRE(cmd_train(cfg) == kExitOk);

  const fs::path ckpt = dir.path / "run1" / "checkpoint.bin";
  REQUIRE(fs::exists(ckpt));
  REQUIRE(fs::exists(dir.path / "run1" / "train_log.csv"));
  REQUIRE(fs::exists(dir.path / "run1" / "summary.txt"));

  DbnModel model = load_checkpoint_file(ckpt.string());
  std::ostringstream os;
  save_checkpoint(model, os);
  CHECK(os.str() == read_bytes(ckpt));

  cfg.out_dir = (dir.path / "run2").string();
  REQUIRE(cmd_train(cfg) == kExitOk);
  CHECK(read_bytes(dir.path / "run2" / "checkpoint.bin") == read_bytes(ckpt));
  CHECK(read_bytes(dir.path / "run2" / "train_log.csv") ==
        read_bytes(dir.path / "run1" / "train_log.csv"));
}

TEST_CASE("cmd_eval and cmd_trace run against a trained checkpoint") {
  TempDir dir;
  ExperimentConfig cfg = quick_config((dir.path / "run").string());
  REQUIRE(cmd_train(cfg) == kExitOk);
  const std::string ckpt = (dir.path / "run" / "checkpoint.bin").string();

  CHECK(cmd_eval(cfg, ckpt, false) == kExitOk);
  CHECK(cmd_eval(cfg, ckpt, true) == kExitOk);

  cfg.out_dir = (dir.path / "trace").string();
  CHECK(cmd_trace(cfg, ckpt) == kExitOk);
  for (const char* name : {"correct_0.dot", "correct_1.dot", "wrong_0_to_1.dot", "wrong_1_to_0.dot"}) {
    CAPTURE(name);
    REQUIRE(fs::exists(dir.path / "trace" / name));
    const std::string dot = read_bytes(dir.path / "trace" / name);
    CHECK(dot.rfind("digraph", 0) == 0);
    CHECK(dot.find('}') != std::string::npos);
  }
}

TEST_CASE("cmd_rules writes the rules file and an embedded checkpoint") {
  TempDir dir;
  ExperimentConfig cfg = quick_config((dir.path / "run").string());
  // two stacked layers so rule mining has a boundary to work with
  cfg.layer_gen.theta_L1 = 0.0;
  cfg.layer_gen.theta_L2 = 0.0;
  cfg.layer_gen.max_layers = 2;
  REQUIRE(cmd_train(cfg) == kExitOk);
  const std::string ckpt = (dir.path / "run" / "checkpoint.bin").string();

  cfg.out_dir = (dir.path / "ruled").string();
  REQUIRE(cmd_rules(cfg, ckpt) == kExitOk);
  REQUIRE(fs::exists(dir.path / "ruled" / "rules.txt"));
  REQUIRE(fs::exists(dir.path / "ruled" / "checkpoint.bin"));

  DbnModel embedded = load_checkpoint_file((dir.path / "ruled" / "checkpoint.bin").string());
  std::ifstream rf(dir.path / "ruled" / "rules.txt");
  CHECK(parse_rules_text(rf) == embedded.rules);
}

TEST_CASE("eval rejects a checkpoint/dataset dimension mismatch") {
  TempDir dir;
  DbnModel m = small_model();  // 4 visible inputs
  const std::string ckpt = (dir.path / "m.bin").string();
  save_checkpoint_file(m, ckpt);

  ExperimentConfig cfg = quick_config((dir.path / "out").string());  // 3x3 = 9-dim inputs
  CHECK_THROWS_AS(cmd_eval(cfg, ckpt, false), ContractError);
}
