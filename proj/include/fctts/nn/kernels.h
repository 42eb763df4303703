// include/fctts/nn/kernels.h

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

#ifndef FCTTS_NN_KERNELS_H_
#define FCTTS_NN_KERNELS_H_

// Dense numeric kernels shared by the autodiff ops and the plain inference
// paths. Templated on the Eigen expression so they accept blocks and maps.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "fctts/errors.h"

namespace fctts {

/// Shape of a 2-D convolution over a feature map stored as an
/// (height * width) x channels matrix, row index h * width + w.
struct ConvGeometry {
  Eigen::Index in_h = 0, in_w = 0, in_ch = 0, out_ch = 0;
  int kernel_h = 1, kernel_w = 1;
  int stride_h = 1, stride_w = 1;
  int pad_h = 0, pad_w = 0;

  Eigen::Index out_h() const {
    return (in_h + 2 * pad_h - kernel_h) / stride_h + 1;
  }
  Eigen::Index out_w() const {
    return (in_w + 2 * pad_w - kernel_w) / stride_w + 1;
  }
  Eigen::Index patch_size() const {
    return static_cast<Eigen::Index>(kernel_h) * kernel_w * in_ch;
  }
};

/// Unfolds every receptive field into a row. Column index of a tap is
/// (kh * kernel_w + kw) * in_ch + c; out-of-range taps read zero.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> Im2Col(
    const Eigen::MatrixBase<Derived> &x, const ConvGeometry &g) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index oh = g.out_h(), ow = g.out_w();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> cols =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(oh * ow,
                                                                 g.patch_size());
  for (int kh = 0; kh < g.kernel_h; ++kh)
    for (int kw = 0; kw < g.kernel_w; ++kw)
      for (Eigen::Index c = 0; c < g.in_ch; ++c) {
        const Eigen::Index j = (kh * g.kernel_w + kw) * g.in_ch + c;
        for (Eigen::Index y = 0; y < oh; ++y) {
          const Eigen::Index sy = y * g.stride_h + kh - g.pad_h;
          if (sy < 0 || sy >= g.in_h) continue;
          for (Eigen::Index xo = 0; xo < ow; ++xo) {
            const Eigen::Index sx = xo * g.stride_w + kw - g.pad_w;
            if (sx < 0 || sx >= g.in_w) continue;
            cols(y * ow + xo, j) = x(sy * g.in_w + sx, c);
          }
        }
      }
  return cols;
}

/// Adjoint of Im2Col: scatter-adds patch rows back onto the input grid.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> Col2Im(
    const Eigen::MatrixBase<Derived> &cols, const ConvGeometry &g) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index oh = g.out_h(), ow = g.out_w();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> x =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(
          g.in_h * g.in_w, g.in_ch);
  for (int kh = 0; kh < g.kernel_h; ++kh)
    for (int kw = 0; kw < g.kernel_w; ++kw)
      for (Eigen::Index c = 0; c < g.in_ch; ++c) {
        const Eigen::Index j = (kh * g.kernel_w + kw) * g.in_ch + c;
        for (Eigen::Index y = 0; y < oh; ++y) {
          const Eigen::Index sy = y * g.stride_h + kh - g.pad_h;
          if (sy < 0 || sy >= g.in_h) continue;
          for (Eigen::Index xo = 0; xo < ow; ++xo) {
            const Eigen::Index sx = xo * g.stride_w + kw - g.pad_w;
            if (sx < 0 || sx >= g.in_w) continue;
            x(sy * g.in_w + sx, c) += cols(y * ow + xo, j);
          }
        }
      }
  return x;
}

/// Mean-then-std statistics pooling over the time (row) axis. The std half
/// is the population deviation sqrt(var + eps). Each channel is summed in
/// sorted order, so any permutation of the rows gives a bit-identical result.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 1, Eigen::Dynamic> StatisticsPool(
    const Eigen::MatrixBase<Derived> &x, typename Derived::Scalar eps) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index t = x.rows(), c = x.cols();
  if (t < 1 || c < 1) throw InvalidInputError("statistics pooling of an empty feature map");
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> out(2 * c);
  std::vector<Scalar> col(static_cast<std::size_t>(t));
  for (Eigen::Index ch = 0; ch < c; ++ch) {
    for (Eigen::Index i = 0; i < t; ++i) col[i] = x(i, ch);
    std::sort(col.begin(), col.end());
    Scalar sum = 0;
    for (Scalar v : col) sum += v;
    const Scalar mean = sum / static_cast<Scalar>(t);
    Scalar sq = 0;
    for (Scalar v : col) sq += (v - mean) * (v - mean);
    out(ch) = mean;
    out(c + ch) = std::sqrt(sq / static_cast<Scalar>(t) + eps);
  }
  return out;
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar CosineSimilarity(const Eigen::MatrixBase<DerivedA> &a,
                                           const Eigen::MatrixBase<DerivedB> &b) {
  if (a.size() != b.size())
    throw ConfigError("cosine of vectors with different dimensions");
  const auto na = a.norm(), nb = b.norm();
  if (!(na > 0) || !(nb > 0))
    throw NumericalError("cosine similarity of a zero-norm vector");
  return a.reshaped().dot(b.reshaped()) / (na * nb);
}

}  // namespace fctts

#endif  // FCTTS_NN_KERNELS_H_
