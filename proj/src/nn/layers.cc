// src/nn/layers.cc

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

#include "fctts/nn/layers.h"

#include "fctts/errors.h"

namespace fctts::nn {

ad::Var Conv1d(ad::Var x, int kernel, ad::Var weight, ad::Var bias) {
  if (kernel % 2 == 0) throw ConfigError("Conv1d kernel must be odd");
  ConvGeometry g;
  g.in_h = x.rows();
  g.in_w = 1;
  g.in_ch = x.cols();
  g.out_ch = weight.cols();
  g.kernel_h = kernel;
  g.pad_h = kernel / 2;
  return ad::Conv2d(x, g, weight, bias);
}

LstmState LstmStep(ad::Var gates_x, const LstmState &prev, ad::Var w_h) {
  const Eigen::Index h = prev.h.cols();
  ad::Var gates = ad::Add(gates_x, ad::MatMul(prev.h, w_h));
  ad::Var i = ad::Sigmoid(ad::SliceCols(gates, 0, h));
  ad::Var f = ad::Sigmoid(ad::SliceCols(gates, h, h));
  ad::Var g = ad::Tanh(ad::SliceCols(gates, 2 * h, h));
  ad::Var o = ad::Sigmoid(ad::SliceCols(gates, 3 * h, h));
  LstmState next;
  next.c = ad::Add(ad::Mul(f, prev.c), ad::Mul(i, g));
  next.h = ad::Mul(o, ad::Tanh(next.c));
  return next;
}

}  // namespace fctts::nn
