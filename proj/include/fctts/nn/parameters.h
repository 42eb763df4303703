// include/fctts/nn/parameters.h

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

#ifndef FCTTS_NN_PARAMETERS_H_
#define FCTTS_NN_PARAMETERS_H_

#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "fctts/ad/tape.h"

namespace fctts {

/// Ordered collection of named dense tensors.
class ParameterSet {
 public:
  /// Appends a tensor and returns its index. Names must be unique.
  int Add(const std::string &name, Eigen::MatrixXd value);

  int size() const { return static_cast<int>(values_.size()); }
  bool Contains(const std::string &name) const { return index_.count(name) > 0; }
  int IndexOf(const std::string &name) const;
  const std::string &name(int i) const { return names_[i]; }

  Eigen::MatrixXd &operator[](int i) { return values_[i]; }
  const Eigen::MatrixXd &operator[](int i) const { return values_[i]; }
  Eigen::MatrixXd &at(const std::string &name) { return values_[IndexOf(name)]; }
  const Eigen::MatrixXd &at(const std::string &name) const {
    return values_[IndexOf(name)];
  }

  std::vector<Eigen::MatrixXd> ZerosLike() const;
  double SquaredNorm() const;
  long NumScalars() const;
  /// FNV-1a over names, shapes and raw value bytes.
  std::uint64_t Hash() const;

 private:
  std::vector<std::string> names_;
  std::vector<Eigen::MatrixXd> values_;
  std::unordered_map<std::string, int> index_;
};

/// Tape handles for every tensor of a ParameterSet, in set order.
struct Binding {
  std::vector<ad::Var> vars;
  ad::Var operator[](int i) const { return vars[static_cast<std::size_t>(i)]; }
};

/// Trainable parameters become tape leaves; frozen ones become constants and
/// never receive gradient.
Binding Bind(ad::Tape &tape, const ParameterSet &params, bool trainable);

/// Gradients of the tape's last Backward root w.r.t. each bound parameter.
std::vector<Eigen::MatrixXd> CollectGradients(const ad::Tape &tape,
                                              const Binding &binding);

/// Uniform Glorot initialization for a fan_in x fan_out matrix.
Eigen::MatrixXd GlorotUniform(Eigen::Index fan_in, Eigen::Index fan_out,
                              std::mt19937_64 &rng);
/// He-normal initialization scaled by `gain`.
Eigen::MatrixXd HeNormal(Eigen::Index fan_in, Eigen::Index fan_out,
                         std::mt19937_64 &rng, double gain = 1.0);

}  // namespace fctts

#endif  // FCTTS_NN_PARAMETERS_H_
