// src/ad/tape.cc

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

#include "fctts/ad/tape.h"

#include "fctts/errors.h"

namespace fctts::ad {

Var Tape::Constant(Matrix value) {
  return Record(std::move(value), false, nullptr);
}

Var Tape::Leaf(Matrix value) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::Record(Matrix value, bool requires_grad, BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  if (requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

void Tape::Backward(Var root) {
  if (root.tape() != this) throw ConfigError("Backward: root from another tape");
  const Matrix &rv = nodes_[root.id()].value;
  if (rv.rows() != 1 || rv.cols() != 1)
    throw ConfigError("Backward: root must be a 1x1 scalar");
  for (Node &n : nodes_) {
    n.has_grad = false;
    n.grad.resize(0, 0);
  }
  if (!nodes_[root.id()].requires_grad) return;
  Accumulate(root.id(), Matrix::Ones(1, 1));
  for (int id = root.id(); id >= 0; --id) {
    Node &n = nodes_[id];
    if (!n.has_grad || !n.backward) continue;
    n.backward(*this, n.grad, n.value);
  }
}

Matrix Tape::Gradient(Var v) const {
  const Node &n = nodes_[v.id()];
  if (n.has_grad) return n.grad;
  return Matrix::Zero(n.value.rows(), n.value.cols());
}

}  // namespace fctts::ad
