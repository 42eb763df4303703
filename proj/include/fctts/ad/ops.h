// include/fctts/ad/ops.h

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

#ifndef FCTTS_AD_OPS_H_
#define FCTTS_AD_OPS_H_

#include <span>
#include <vector>

#include "fctts/ad/tape.h"
#include "fctts/nn/kernels.h"

namespace fctts::ad {

// Elementwise and linear algebra. Binary ops require equal shapes unless
// noted; all operands must live on the same tape.
Var Add(Var a, Var b);
Var Sub(Var a, Var b);
Var Mul(Var a, Var b);
Var Scale(Var a, double s);
Var MatMul(Var a, Var b);
Var Transpose(Var a);
/// a (n x m) + row (1 x m) broadcast over rows.
Var AddRow(Var a, Var row);
/// Elementwise product with a constant (dropout masks, loss masks).
Var MulConst(Var a, const Matrix &c);

Var Tanh(Var a);
Var Sigmoid(Var a);
Var Relu(Var a);

Var ConcatCols(std::span<const Var> parts);
Var ConcatRows(std::span<const Var> parts);
Var SliceCols(Var a, Eigen::Index start, Eigen::Index n);
Var SliceRows(Var a, Eigen::Index start, Eigen::Index n);
/// Reinterprets the row-major element order of `a` as rows x cols.
Var ReshapeRowMajor(Var a, Eigen::Index rows, Eigen::Index cols);

Var Sum(Var a);
Var Mean(Var a);
/// Row-wise softmax.
Var SoftmaxRows(Var a);
/// Embedding lookup: row i of the result is row ids[i] of `table`.
Var GatherRows(Var table, const std::vector<int> &ids);

/// Convolution of an (in_h * in_w) x in_ch map with weight
/// (patch_size x out_ch) and bias (1 x out_ch).
Var Conv2d(Var x, const ConvGeometry &g, Var weight, Var bias);
/// (h * w) x C -> h x C, averaging over the w axis.
Var MeanOverWidth(Var x, Eigen::Index h, Eigen::Index w);
/// T x C -> 1 x 2C, per-channel mean then sqrt(population var + eps).
Var StatisticsPool(Var x, double eps);
/// 1x1 cosine of two equal-size matrices viewed as vectors.
Var CosineSimilarity(Var a, Var b);

// Losses, all returning 1x1.
/// -log softmax(logits)[label] for a 1 x K logit row.
Var SoftmaxCrossEntropy(Var logits, int label);
/// Sum over entries of binary cross-entropy with logits.
Var BceWithLogitsSum(Var logits, const Matrix &targets);
/// Sum over entries of (a - target)^2.
Var SquaredErrorSum(Var a, const Matrix &target);

}  // namespace fctts::ad

#endif  // FCTTS_AD_OPS_H_
