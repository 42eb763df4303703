// include/fctts/train/config.h

// Copyright 2026  The fctts Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef FCTTS_TRAIN_CONFIG_H_
#define FCTTS_TRAIN_CONFIG_H_

#include <cstdint>
#include <map>
#include <string>

#include "fctts/nn/optimizer.h"

namespace fctts {

enum class Phase { kVerifier, kBaseline, kFc };

std::string PhaseName(Phase p);
Phase ParsePhase(const std::string &name);

/// Parses "key = value" lines. '#' starts a comment; blank lines are
/// ignored. Throws ConfigError on malformed lines or repeated keys.
std::map<std::string, std::string> ParseKeyValueText(const std::string &text);

struct TrainConfig {
  Phase phase = Phase::kBaseline;
  std::string arch = "toy";  // "toy" or "full"
  double w_reg = 1e-6;
  double w_spk = 0.0;
  int batch_size = 8;
  long total_steps = 3000;
  std::uint64_t seed = 0;
  OptimizerConfig optimizer;
  long checkpoint_every = 1000;  // 0 writes only the final checkpoint
  bool prenet_dropout = true;
  std::string verifier_checkpoint;
  /// Synthesizer checkpoint to continue from (required for fc).
  std::string init_checkpoint;
  std::string output_dir = "run";

  /// Phase-appropriate defaults (optimizer, steps, w_spk).
  static TrainConfig Defaults(Phase phase);
  /// Assigns one key. Unknown keys and unparsable values throw ConfigError.
  void Set(const std::string &key, const std::string &value);
  void Validate() const;
  std::string ToText() const;
};

/// Defaults(phase) overridden by every key in the file. A `phase` key, if
/// present, must agree with `phase`.
TrainConfig LoadTrainConfig(const std::string &path, Phase phase);

}  // namespace fctts

#endif  // FCTTS_TRAIN_CONFIG_H_
