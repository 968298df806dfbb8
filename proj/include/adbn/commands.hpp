#pragma once

#include <string>

#include "adbn/config.hpp"

namespace adbn {

// Exit codes shared by the CLI: 0 success, 1 usage error, 2 data error,
// 3 internal invariant violation.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitInternal = 3;

// Trains the adaptive DBN plus head; writes checkpoint.bin, train_log.csv,
// config.txt and summary.txt into cfg.out_dir.
int cmd_train(const ExperimentConfig& cfg);

// Prints train/test accuracy and confusion matrix; with_rules adds the
// paired with/without-rules comparison.
int cmd_eval(const ExperimentConfig& cfg, const std::string& checkpoint, bool with_rules);

// Writes the four DOT graphs per class pair (correct-A, wrong-A>B,
// correct-B, wrong-B>A) into cfg.out_dir.
int cmd_trace(const ExperimentConfig& cfg, const std::string& checkpoint);

// Mines rules on the validation split, writes rules.txt and a new
// checkpoint with the rules embedded; prints before/after accuracy.
int cmd_rules(const ExperimentConfig& cfg, const std::string& checkpoint);

}  // namespace adbn
