// include/fctts/nn/optimizer.h

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

#ifndef FCTTS_NN_OPTIMIZER_H_
#define FCTTS_NN_OPTIMIZER_H_

#include <string>
#include <vector>

#include "fctts/nn/parameters.h"

namespace fctts {

struct OptimizerConfig {
  std::string kind = "sgd";  // "sgd" (momentum) or "adam"
  double learning_rate = 0.01;
  double momentum = 0.9;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  /// Global gradient-norm clip; 0 disables.
  double clip_norm = 0.0;
};

/// First-order optimizer over a ParameterSet. Slot tensors live in a
/// ParameterSet of their own so they can be checkpointed alongside the model.
class Optimizer {
 public:
  Optimizer() = default;
  Optimizer(OptimizerConfig config, const ParameterSet &params);

  /// Applies one update. Returns the pre-clip global gradient norm.
  double Step(ParameterSet &params, std::vector<Eigen::MatrixXd> grads);

  const OptimizerConfig &config() const { return config_; }
  long step_count() const { return step_count_; }
  const ParameterSet &slots() const { return slots_; }

  /// Restores slot tensors written by `slots()` and the step counter.
  void Restore(const ParameterSet &slots, long step_count);

 private:
  OptimizerConfig config_;
  ParameterSet slots_;  // "m/<name>" (and "v/<name>" for adam)
  long step_count_ = 0;
};

}  // namespace fctts

#endif  // FCTTS_NN_OPTIMIZER_H_
