// src/nn/parameters.cc

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

#include "fctts/nn/parameters.h"

#include <cmath>
#include <cstring>

#include "fctts/errors.h"

namespace fctts {

int ParameterSet::Add(const std::string &name, Eigen::MatrixXd value) {
  if (index_.count(name)) throw ConfigError("duplicate parameter " + name);
  const int i = static_cast<int>(values_.size());
  names_.push_back(name);
  values_.push_back(std::move(value));
  index_[name] = i;
  return i;
}

int ParameterSet::IndexOf(const std::string &name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ConfigError("unknown parameter " + name);
  return it->second;
}

std::vector<Eigen::MatrixXd> ParameterSet::ZerosLike() const {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(values_.size());
  for (const auto &v : values_)
    out.push_back(Eigen::MatrixXd::Zero(v.rows(), v.cols()));
  return out;
}

double ParameterSet::SquaredNorm() const {
  double s = 0.0;
  for (const auto &v : values_) s += v.squaredNorm();
  return s;
}

long ParameterSet::NumScalars() const {
  long n = 0;
  for (const auto &v : values_) n += static_cast<long>(v.size());
  return n;
}

std::uint64_t ParameterSet::Hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void *data, std::size_t n) {
    const auto *p = static_cast<const unsigned char *>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  for (std::size_t i = 0; i < values_.size(); ++i) {
    mix(names_[i].data(), names_[i].size());
    const Eigen::Index dims[2] = {values_[i].rows(), values_[i].cols()};
    mix(dims, sizeof(dims));
    mix(values_[i].data(), sizeof(double) * values_[i].size());
  }
  return h;
}

Binding Bind(ad::Tape &tape, const ParameterSet &params, bool trainable) {
  Binding b;
  b.vars.reserve(static_cast<std::size_t>(params.size()));
  for (int i = 0; i < params.size(); ++i)
    b.vars.push_back(trainable ? tape.Leaf(params[i]) : tape.Constant(params[i]));
  return b;
}

std::vector<Eigen::MatrixXd> CollectGradients(const ad::Tape &tape,
                                              const Binding &binding) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(binding.vars.size());
  for (const ad::Var &v : binding.vars) out.push_back(tape.Gradient(v));
  return out;
}

Eigen::MatrixXd GlorotUniform(Eigen::Index fan_in, Eigen::Index fan_out,
                              std::mt19937_64 &rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> u(-limit, limit);
  Eigen::MatrixXd m(fan_in, fan_out);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = u(rng);
  return m;
}

Eigen::MatrixXd HeNormal(Eigen::Index fan_in, Eigen::Index fan_out,
                         std::mt19937_64 &rng, double gain) {
  std::normal_distribution<double> n(0.0, gain * std::sqrt(2.0 / fan_in));
  Eigen::MatrixXd m(fan_in, fan_out);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = n(rng);
  return m;
}

}  // namespace fctts
