#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "adbn/checkpoint.hpp"
#include "adbn/commands.hpp"

namespace {

void apply_thread_cap() {
#ifdef _OPENMP
  if (const char* env = std::getenv("ADBN_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
#endif
}

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::vector<std::string> overrides;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "key=value config file");
    app->add_option("--out", out_dir, "output directory");
    app->add_option("--seed", seed, "RNG seed")->each([this](const std::string&) { seed_set = true; });
    app->add_option("--set", overrides, "extra key=value overrides")->take_all();
  }

  adbn::ExperimentConfig resolve() const {
    adbn::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = adbn::load_config_file(config_path);
    for (const std::string& kv : overrides) {
      const std::size_t eq = kv.find('=');
      if (eq == std::string::npos)
        throw adbn::ContractError("--set expects key=value, got '" + kv + "'");
      adbn::set_config_key(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed_set) cfg.seed = seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    return cfg;
  }
};

}  // namespace

int main(int argc, char** argv) {
  apply_thread_cap();

  CLI::App app{"Adaptive DBN training, evaluation, path tracing and rule mining"};
  app.require_subcommand(1);

  CommonOpts train_opts, eval_opts, trace_opts, rules_opts;
  std::string eval_ckpt, trace_ckpt, rules_ckpt;
  bool with_rules = false;
  std::string classes;

  CLI::App* train = app.add_subcommand("train", "train an adaptive DBN");
  train_opts.attach(train);

  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  eval_opts.attach(eval);
  eval->add_option("--checkpoint", eval_ckpt, "checkpoint file")->required();
  eval->add_flag("--with-rules", with_rules, "include the with/without-rules comparison");

  CLI::App* trace = app.add_subcommand("trace", "export fired-neuron path graphs");
  trace_opts.attach(trace);
  trace->add_option("--checkpoint", trace_ckpt, "checkpoint file")->required();
  trace->add_option("--classes", classes, "class pair A,B");

  CLI::App* rules = app.add_subcommand("rules", "mine and embed IF-THEN rules");
  rules_opts.attach(rules);
  rules->add_option("--checkpoint", rules_ckpt, "checkpoint file")->required();
  rules->add_option("--classes", classes, "class pair A,B");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? adbn::kExitOk : adbn::kExitUsage;
  }

  try {
    auto apply_classes = [&](adbn::ExperimentConfig& cfg) {
      if (classes.empty()) return;
      const std::size_t comma = classes.find(',');
      if (comma == std::string::npos)
        throw adbn::ContractError("--classes expects A,B");
      cfg.rule_class_a = std::stoull(classes.substr(0, comma));
      cfg.rule_class_b = std::stoull(classes.substr(comma + 1));
    };

    if (train->parsed()) return adbn::cmd_train(train_opts.resolve());
    if (eval->parsed()) return adbn::cmd_eval(eval_opts.resolve(), eval_ckpt, with_rules);
    if (trace->parsed()) {
      adbn::ExperimentConfig cfg = trace_opts.resolve();
      apply_classes(cfg);
      return adbn::cmd_trace(cfg, trace_ckpt);
    }
    if (rules->parsed()) {
      adbn::ExperimentConfig cfg = rules_opts.resolve();
      apply_classes(cfg);
      return adbn::cmd_rules(cfg, rules_ckpt);
    }
    return adbn::kExitUsage;
  } catch (const adbn::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return adbn::kExitData;
  } catch (const adbn::CheckpointError& e) {
    std::cerr << "checkpoint error: " << e.what() << '\n';
    return adbn::kExitData;
  } catch (const adbn::ContractError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return adbn::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return adbn::kExitInternal;
  }
}
