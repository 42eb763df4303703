// include/fctts/nn/layers.h

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

#ifndef FCTTS_NN_LAYERS_H_
#define FCTTS_NN_LAYERS_H_

#include "fctts/ad/ops.h"

namespace fctts::nn {

/// x W + b, with x (n x in), W (in x out), b (1 x out).
inline ad::Var Dense(ad::Var x, ad::Var w, ad::Var b) {
  return ad::AddRow(ad::MatMul(x, w), b);
}

/// Same-padded, stride-1 convolution over time: x (T x C_in),
/// weight (kernel * C_in x C_out), bias (1 x C_out). Kernel must be odd.
ad::Var Conv1d(ad::Var x, int kernel, ad::Var weight, ad::Var bias);

struct LstmState {
  ad::Var h;  // 1 x H
  ad::Var c;  // 1 x H
};

/// One LSTM step. `gates_x` is the input contribution x Wx + b (1 x 4H),
/// precomputed so a whole sequence can share one matmul. Gate order is
/// input, forget, cell, output.
LstmState LstmStep(ad::Var gates_x, const LstmState &prev, ad::Var w_h);

}  // namespace fctts::nn

#endif  // FCTTS_NN_LAYERS_H_
