// src/nn/optimizer.cc

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

#include "fctts/nn/optimizer.h"

#include <cmath>

#include "fctts/errors.h"

namespace fctts {

Optimizer::Optimizer(OptimizerConfig config, const ParameterSet &params)
    : config_(std::move(config)) {
  if (config_.kind != "sgd" && config_.kind != "adam")
    throw ConfigError("unknown optimizer '" + config_.kind + "'");
  if (config_.learning_rate < 0.0) throw ConfigError("negative learning rate");
  for (int i = 0; i < params.size(); ++i) {
    const auto &p = params[i];
    slots_.Add("m/" + params.name(i), Eigen::MatrixXd::Zero(p.rows(), p.cols()));
  }
  if (config_.kind == "adam")
    for (int i = 0; i < params.size(); ++i) {
      const auto &p = params[i];
      slots_.Add("v/" + params.name(i), Eigen::MatrixXd::Zero(p.rows(), p.cols()));
    }
}

double Optimizer::Step(ParameterSet &params, std::vector<Eigen::MatrixXd> grads) {
  const int n = params.size();
  if (static_cast<int>(grads.size()) != n)
    throw ConfigError("gradient count does not match parameter count");
  double sq = 0.0;
  for (const auto &g : grads) sq += g.squaredNorm();
  const double norm = std::sqrt(sq);
  if (config_.clip_norm > 0.0 && norm > config_.clip_norm) {
    const double s = config_.clip_norm / norm;
    for (auto &g : grads) g *= s;
  }
  ++step_count_;
  const double lr = config_.learning_rate;
  if (config_.kind == "sgd") {
    for (int i = 0; i < n; ++i) {
      Eigen::MatrixXd &m = slots_[i];
      m = config_.momentum * m + grads[i];
      params[i] -= lr * m;
    }
  } else {
    const double b1 = config_.beta1, b2 = config_.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_count_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_count_));
    for (int i = 0; i < n; ++i) {
      Eigen::MatrixXd &m = slots_[i];
      Eigen::MatrixXd &v = slots_[n + i];
      m = b1 * m + (1.0 - b1) * grads[i];
      v = b2 * v + (1.0 - b2) * grads[i].cwiseAbs2();
      params[i].array() -=
          lr * (m.array() / c1) / ((v.array() / c2).sqrt() + config_.epsilon);
    }
  }
  return norm;
}

void Optimizer::Restore(const ParameterSet &slots, long step_count) {
  if (slots.size() != slots_.size())
    throw ConfigError("optimizer slot count mismatch on restore");
  for (int i = 0; i < slots_.size(); ++i) {
    const auto &src = slots.at(slots_.name(i));
    if (src.rows() != slots_[i].rows() || src.cols() != slots_[i].cols())
      throw ConfigError("optimizer slot shape mismatch for " + slots_.name(i));
    slots_[i] = src;
  }
  step_count_ = step_count;
}

}  // namespace fctts
