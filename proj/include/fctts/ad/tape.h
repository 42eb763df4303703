// include/fctts/ad/tape.h

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

#ifndef FCTTS_AD_TAPE_H_
#define FCTTS_AD_TAPE_H_

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace fctts::ad {

using Matrix = Eigen::MatrixXd;

class Tape;

/// Handle to a node on a Tape. Cheap to copy; only valid while its tape is.
class Var {
 public:
  Var() = default;
  Var(Tape *tape, int id) : tape_(tape), id_(id) {}

  const Matrix &value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  bool requires_grad() const;
  double scalar() const { return value()(0, 0); }

  Tape *tape() const { return tape_; }
  int id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  Tape *tape_ = nullptr;
  int id_ = -1;
};

/// Reverse-mode recording of matrix operations. Nodes are appended in
/// evaluation order, so the reverse of insertion order is a valid
/// topological order for the backward sweep.
///
/// A Tape is single-threaded; independent tapes may run concurrently as
/// long as the values they were built from are not mutated.
class Tape {
 public:
  /// (tape, output gradient, output value)
  using BackwardFn =
      std::function<void(Tape &, const Matrix &, const Matrix &)>;

  Tape() { nodes_.reserve(1024); }
  Tape(const Tape &) = delete;
  Tape &operator=(const Tape &) = delete;

  Var Constant(Matrix value);
  Var Leaf(Matrix value);
  /// Appends an op node. `backward` receives the node's output gradient and
  /// value and routes the gradient to the parents through Accumulate. It is
  /// dropped when `requires_grad` is false.
  Var Record(Matrix value, bool requires_grad, BackwardFn backward);

  const Matrix &value(int id) const { return nodes_[id].value; }
  bool requires_grad(int id) const { return nodes_[id].requires_grad; }

  template <typename Derived>
  void Accumulate(int id, const Eigen::MatrixBase<Derived> &g) {
    Node &n = nodes_[id];
    if (!n.requires_grad) return;
    if (n.has_grad) {
      n.grad += g;
    } else {
      n.grad = g;
      n.has_grad = true;
    }
  }

  /// Runs the backward sweep from a 1x1 root, seeding d(root)/d(root) = 1.
  void Backward(Var root);

  /// Gradient of the last Backward root w.r.t. v; zeros if v was unreached.
  Matrix Gradient(Var v) const;
  bool HasGradient(Var v) const { return nodes_[v.id()].has_grad; }

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    bool has_grad = false;
    BackwardFn backward;
  };
  std::vector<Node> nodes_;
};

inline const Matrix &Var::value() const { return tape_->value(id_); }
inline bool Var::requires_grad() const { return tape_->requires_grad(id_); }

}  // namespace fctts::ad

#endif  // FCTTS_AD_TAPE_H_
