// src/ad/ops.cc

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

#include "fctts/ad/ops.h"

#include <cmath>
#include <string>

#include "fctts/errors.h"

namespace fctts::ad {

namespace {

Tape &SameTape(Var a, Var b) {
  if (a.tape() != b.tape()) throw ConfigError("operands on different tapes");
  return *a.tape();
}

std::string Shape(Var a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

void CheckSameShape(Var a, Var b, const char *op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ConfigError(std::string(op) + ": shape mismatch " + Shape(a) +
                      " vs " + Shape(b));
}

Matrix SigmoidOf(const Matrix &x) {
  return x.unaryExpr([](double v) {
    if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
  });
}

}  // namespace

Var Add(Var a, Var b) {
  Tape &t = SameTape(a, b);
  CheckSameShape(a, b, "Add");
  const int ia = a.id(), ib = b.id();
  return t.Record(a.value() + b.value(), a.requires_grad() || b.requires_grad(),
                  [ia, ib](Tape &t, const Matrix &g, const Matrix &) {
                    t.Accumulate(ia, g);
                    t.Accumulate(ib, g);
                  });
}

Var Sub(Var a, Var b) {
  Tape &t = SameTape(a, b);
  CheckSameShape(a, b, "Sub");
  const int ia = a.id(), ib = b.id();
  return t.Record(a.value() - b.value(), a.requires_grad() || b.requires_grad(),
                  [ia, ib](Tape &t, const Matrix &g, const Matrix &) {
                    t.Accumulate(ia, g);
                    t.Accumulate(ib, -g);
                  });
}

Var Mul(Var a, Var b) {
  Tape &t = SameTape(a, b);
  CheckSameShape(a, b, "Mul");
  const int ia = a.id(), ib = b.id();
  return t.Record(a.value().cwiseProduct(b.value()),
                  a.requires_grad() || b.requires_grad(),
                  [ia, ib](Tape &t, const Matrix &g, const Matrix &) {
                    if (t.requires_grad(ia))
                      t.Accumulate(ia, g.cwiseProduct(t.value(ib)));
                    if (t.requires_grad(ib))
                      t.Accumulate(ib, g.cwiseProduct(t.value(ia)));
                  });
}

Var Scale(Var a, double s) {
  const int ia = a.id();
  return a.tape()->Record(a.value() * s, a.requires_grad(),
                          [ia, s](Tape &t, const Matrix &g, const Matrix &) {
                            t.Accumulate(ia, g * s);
                          });
}

Var MatMul(Var a, Var b) {
  Tape &t = SameTape(a, b);
  if (a.cols() != b.rows())
    throw ConfigError("MatMul: " + Shape(a) + " times " + Shape(b));
  const int ia = a.id(), ib = b.id();
  return t.Record(a.value() * b.value(), a.requires_grad() || b.requires_grad(),
                  [ia, ib](Tape &t, const Matrix &g, const Matrix &) {
                    if (t.requires_grad(ia))
                      t.Accumulate(ia, g * t.value(ib).transpose());
                    if (t.requires_grad(ib))
                      t.Accumulate(ib, t.value(ia).transpose() * g);
                  });
}

Var Transpose(Var a) {
  const int ia = a.id();
  return a.tape()->Record(a.value().transpose(), a.requires_grad(),
                          [ia](Tape &t, const Matrix &g, const Matrix &) {
                            t.Accumulate(ia, g.transpose());
                          });
}

Var AddRow(Var a, Var row) {
  Tape &t = SameTape(a, row);
  if (row.rows() != 1 || row.cols() != a.cols())
    throw ConfigError("AddRow: bias " + Shape(row) + " for input " + Shape(a));
  const int ia = a.id(), ir = row.id();
  Matrix out = a.value();
  out.rowwise() += row.value().row(0);
  return t.Record(std::move(out), a.requires_grad() || row.requires_grad(),
                  [ia, ir](Tape &t, const Matrix &g, const Matrix &) {
                    t.Accumulate(ia, g);
                    if (t.requires_grad(ir)) t.Accumulate(ir, g.colwise().sum());
                  });
}

Var MulConst(Var a, const Matrix &c) {
  if (c.rows() != a.rows() || c.cols() != a.cols())
    throw ConfigError("MulConst: shape mismatch");
  const int ia = a.id();
  return a.tape()->Record(a.value().cwiseProduct(c), a.requires_grad(),
                          [ia, c](Tape &t, const Matrix &g, const Matrix &) {
                            t.Accumulate(ia, g.cwiseProduct(c));
                          });
}

Var Tanh(Var a) {
  const int ia = a.id();
  return a.tape()->Record(
      a.value().array().tanh().matrix(), a.requires_grad(),
      [ia](Tape &t, const Matrix &g, const Matrix &y) {
        t.Accumulate(ia, (g.array() * (1.0 - y.array().square())).matrix());
      });
}

Var Sigmoid(Var a) {
  const int ia = a.id();
  return a.tape()->Record(
      SigmoidOf(a.value()), a.requires_grad(),
      [ia](Tape &t, const Matrix &g, const Matrix &y) {
        t.Accumulate(ia, (g.array() * y.array() * (1.0 - y.array())).matrix());
      });
}

Var Relu(Var a) {
  const int ia = a.id();
  return a.tape()->Record(
      a.value().cwiseMax(0.0), a.requires_grad(),
      [ia](Tape &t, const Matrix &g, const Matrix &y) {
        t.Accumulate(ia, (y.array() > 0.0).select(g.array(), 0.0).matrix());
      });
}

Var ConcatCols(std::span<const Var> parts) {
  if (parts.empty()) throw ConfigError("ConcatCols: no inputs");
  Tape &t = *parts[0].tape();
  const Eigen::Index rows = parts[0].rows();
  Eigen::Index cols = 0;
  bool rg = false;
  std::vector<int> ids;
  std::vector<Eigen::Index> widths;
  for (const Var &p : parts) {
    if (p.tape() != &t) throw ConfigError("ConcatCols: mixed tapes");
    if (p.rows() != rows)
      throw ConfigError("ConcatCols: row mismatch " + Shape(p) + " vs " +
                        Shape(parts[0]));
    cols += p.cols();
    rg = rg || p.requires_grad();
    ids.push_back(p.id());
    widths.push_back(p.cols());
  }
  Matrix out(rows, cols);
  Eigen::Index c = 0;
  for (const Var &p : parts) {
    out.middleCols(c, p.cols()) = p.value();
    c += p.cols();
  }
  return t.Record(std::move(out), rg,
                  [ids, widths](Tape &t, const Matrix &g, const Matrix &) {
                    Eigen::Index c = 0;
                    for (std::size_t i = 0; i < ids.size(); ++i) {
                      if (t.requires_grad(ids[i]))
                        t.Accumulate(ids[i], g.middleCols(c, widths[i]));
                      c += widths[i];
                    }
                  });
}

Var ConcatRows(std::span<const Var> parts) {
  if (parts.empty()) throw ConfigError("ConcatRows: no inputs");
  Tape &t = *parts[0].tape();
  const Eigen::Index cols = parts[0].cols();
  Eigen::Index rows = 0;
  bool rg = false;
  std::vector<int> ids;
  std::vector<Eigen::Index> heights;
  for (const Var &p : parts) {
    if (p.tape() != &t) throw ConfigError("ConcatRows: mixed tapes");
    if (p.cols() != cols)
      throw ConfigError("ConcatRows: column mismatch " + Shape(p) + " vs " +
                        Shape(parts[0]));
    rows += p.rows();
    rg = rg || p.requires_grad();
    ids.push_back(p.id());
    heights.push_back(p.rows());
  }
  Matrix out(rows, cols);
  Eigen::Index r = 0;
  for (const Var &p : parts) {
    out.middleRows(r, p.rows()) = p.value();
    r += p.rows();
  }
  return t.Record(std::move(out), rg,
                  [ids, heights](Tape &t, const Matrix &g, const Matrix &) {
                    Eigen::Index r = 0;
                    for (std::size_t i = 0; i < ids.size(); ++i) {
                      if (t.requires_grad(ids[i]))
                        t.Accumulate(ids[i], g.middleRows(r, heights[i]));
                      r += heights[i];
                    }
                  });
}

Var SliceCols(Var a, Eigen::Index start, Eigen::Index n) {
  if (start < 0 || n < 0 || start + n > a.cols())
    throw ConfigError("SliceCols out of range");
  const int ia = a.id();
  const Eigen::Index rows = a.rows(), cols = a.cols();
  return a.tape()->Record(
      a.value().middleCols(start, n), a.requires_grad(),
      [ia, start, n, rows, cols](Tape &t, const Matrix &g, const Matrix &) {
        Matrix full = Matrix::Zero(rows, cols);
        full.middleCols(start, n) = g;
        t.Accumulate(ia, full);
      });
}

Var SliceRows(Var a, Eigen::Index start, Eigen::Index n) {
  if (start < 0 || n < 0 || start + n > a.rows())
    throw ConfigError("SliceRows out of range");
  const int ia = a.id();
  const Eigen::Index rows = a.rows(), cols = a.cols();
  return a.tape()->Record(
      a.value().middleRows(start, n), a.requires_grad(),
      [ia, start, n, rows, cols](Tape &t, const Matrix &g, const Matrix &) {
        Matrix full = Matrix::Zero(rows, cols);
        full.middleRows(start, n) = g;
        t.Accumulate(ia, full);
      });
}

namespace {

Matrix RowMajorReshape(const Matrix &a, Eigen::Index rows, Eigen::Index cols) {
  Matrix out(rows, cols);
  const Eigen::Index ac = a.cols();
  for (Eigen::Index i = 0; i < rows * cols; ++i)
    out(i / cols, i % cols) = a(i / ac, i % ac);
  return out;
}

}  // namespace

Var ReshapeRowMajor(Var a, Eigen::Index rows, Eigen::Index cols) {
  if (rows * cols != a.value().size())
    throw ConfigError("ReshapeRowMajor: size mismatch");
  const int ia = a.id();
  const Eigen::Index ar = a.rows(), ac = a.cols();
  return a.tape()->Record(RowMajorReshape(a.value(), rows, cols),
                          a.requires_grad(),
                          [ia, ar, ac](Tape &t, const Matrix &g, const Matrix &) {
                            t.Accumulate(ia, RowMajorReshape(g, ar, ac));
                          });
}

Var Sum(Var a) {
  const int ia = a.id();
  const Eigen::Index rows = a.rows(), cols = a.cols();
  return a.tape()->Record(
      Matrix::Constant(1, 1, a.value().sum()), a.requires_grad(),
      [ia, rows, cols](Tape &t, const Matrix &g, const Matrix &) {
        t.Accumulate(ia, Matrix::Constant(rows, cols, g(0, 0)));
      });
}

Var Mean(Var a) {
  const double n = static_cast<double>(a.value().size());
  return Scale(Sum(a), 1.0 / n);
}

Var SoftmaxRows(Var a) {
  const Matrix &x = a.value();
  Matrix y(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double m = x.row(r).maxCoeff();
    y.row(r) = (x.row(r).array() - m).exp().matrix();
    y.row(r) /= y.row(r).sum();
  }
  const int ia = a.id();
  return a.tape()->Record(
      std::move(y), a.requires_grad(),
      [ia](Tape &t, const Matrix &g, const Matrix &y) {
        Matrix gx(y.rows(), y.cols());
        for (Eigen::Index r = 0; r < y.rows(); ++r) {
          const double dot = g.row(r).dot(y.row(r));
          gx.row(r) = (y.row(r).array() * (g.row(r).array() - dot)).matrix();
        }
        t.Accumulate(ia, gx);
      });
}

Var GatherRows(Var table, const std::vector<int> &ids) {
  const Matrix &tab = table.value();
  Matrix out(static_cast<Eigen::Index>(ids.size()), tab.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= tab.rows())
      throw InvalidInputError("GatherRows: id " + std::to_string(ids[i]) +
                              " outside table of " + std::to_string(tab.rows()));
    out.row(static_cast<Eigen::Index>(i)) = tab.row(ids[i]);
  }
  const int it = table.id();
  const Eigen::Index rows = tab.rows(), cols = tab.cols();
  return table.tape()->Record(
      std::move(out), table.requires_grad(),
      [it, ids, rows, cols](Tape &t, const Matrix &g, const Matrix &) {
        Matrix full = Matrix::Zero(rows, cols);
        for (std::size_t i = 0; i < ids.size(); ++i)
          full.row(ids[i]) += g.row(static_cast<Eigen::Index>(i));
        t.Accumulate(it, full);
      });
}

Var Conv2d(Var x, const ConvGeometry &g, Var weight, Var bias) {
  Tape &t = SameTape(x, weight);
  if (x.rows() != g.in_h * g.in_w || x.cols() != g.in_ch)
    throw ConfigError("Conv2d: input " + Shape(x) + " does not match geometry " +
                      std::to_string(g.in_h) + "x" + std::to_string(g.in_w) +
                      "x" + std::to_string(g.in_ch));
  if (weight.rows() != g.patch_size() || weight.cols() != g.out_ch)
    throw ConfigError("Conv2d: weight " + Shape(weight) + " expected " +
                      std::to_string(g.patch_size()) + "x" +
                      std::to_string(g.out_ch));
  if (bias.rows() != 1 || bias.cols() != g.out_ch)
    throw ConfigError("Conv2d: bias " + Shape(bias));
  if (g.out_h() < 1 || g.out_w() < 1)
    throw InvalidInputError("Conv2d: input too small for kernel");
  Matrix cols = Im2Col(x.value(), g);
  Matrix out = cols * weight.value();
  out.rowwise() += bias.value().row(0);
  const int ix = x.id(), iw = weight.id(), ib = bias.id();
  const bool rg =
      x.requires_grad() || weight.requires_grad() || bias.requires_grad();
  if (!rg) return t.Record(std::move(out), false, nullptr);
  return t.Record(
      std::move(out), true,
      [ix, iw, ib, g, cols = std::move(cols)](Tape &t, const Matrix &gout,
                                              const Matrix &) {
        if (t.requires_grad(iw)) t.Accumulate(iw, cols.transpose() * gout);
        if (t.requires_grad(ib)) t.Accumulate(ib, gout.colwise().sum());
        if (t.requires_grad(ix)) {
          const Matrix gcols = gout * t.value(iw).transpose();
          t.Accumulate(ix, Col2Im(gcols, g));
        }
      });
}

Var MeanOverWidth(Var x, Eigen::Index h, Eigen::Index w) {
  if (x.rows() != h * w) throw ConfigError("MeanOverWidth: shape mismatch");
  const Matrix &v = x.value();
  Matrix out = Matrix::Zero(h, v.cols());
  for (Eigen::Index r = 0; r < h; ++r) {
    for (Eigen::Index c = 0; c < w; ++c) out.row(r) += v.row(r * w + c);
    out.row(r) /= static_cast<double>(w);
  }
  const int ix = x.id();
  return x.tape()->Record(std::move(out), x.requires_grad(),
                          [ix, h, w](Tape &t, const Matrix &g, const Matrix &) {
                            Matrix gx(h * w, g.cols());
                            for (Eigen::Index r = 0; r < h; ++r)
                              for (Eigen::Index c = 0; c < w; ++c)
                                gx.row(r * w + c) = g.row(r) / static_cast<double>(w);
                            t.Accumulate(ix, gx);
                          });
}

Var StatisticsPool(Var x, double eps) {
  Matrix out = fctts::StatisticsPool(x.value(), eps);
  const int ix = x.id();
  return x.tape()->Record(
      std::move(out), x.requires_grad(),
      [ix](Tape &t, const Matrix &g, const Matrix &y) {
        const Matrix &v = t.value(ix);
        const Eigen::Index n = v.rows(), c = v.cols();
        Matrix gx(n, c);
        for (Eigen::Index ch = 0; ch < c; ++ch) {
          const double mean = y(0, ch), sd = y(0, c + ch);
          const double gm = g(0, ch) / n;
          const double gs = g(0, c + ch) / (n * sd);
          gx.col(ch) = ((v.col(ch).array() - mean) * gs + gm).matrix();
        }
        t.Accumulate(ix, gx);
      });
}

Var CosineSimilarity(Var a, Var b) {
  Tape &t = SameTape(a, b);
  if (a.value().size() != b.value().size())
    throw ConfigError("CosineSimilarity: size mismatch");
  const double cos = fctts::CosineSimilarity(a.value(), b.value());
  const int ia = a.id(), ib = b.id();
  return t.Record(
      Matrix::Constant(1, 1, cos), a.requires_grad() || b.requires_grad(),
      [ia, ib](Tape &t, const Matrix &g, const Matrix &y) {
        const Matrix &av = t.value(ia), &bv = t.value(ib);
        const double na = av.norm(), nb = bv.norm(), c = y(0, 0);
        if (t.requires_grad(ia))
          t.Accumulate(ia, g(0, 0) * (bv / (na * nb) - c * av / (na * na)));
        if (t.requires_grad(ib))
          t.Accumulate(ib, g(0, 0) * (av / (na * nb) - c * bv / (nb * nb)));
      });
}

Var SoftmaxCrossEntropy(Var logits, int label) {
  const Matrix &z = logits.value();
  if (z.rows() != 1 || label < 0 || label >= z.cols())
    throw ConfigError("SoftmaxCrossEntropy: bad logits/label");
  const double m = z.maxCoeff();
  const double lse = m + std::log((z.array() - m).exp().sum());
  const int il = logits.id();
  return logits.tape()->Record(
      Matrix::Constant(1, 1, lse - z(0, label)), logits.requires_grad(),
      [il, label, lse](Tape &t, const Matrix &g, const Matrix &) {
        Matrix p = (t.value(il).array() - lse).exp().matrix();
        p(0, label) -= 1.0;
        t.Accumulate(il, g(0, 0) * p);
      });
}

Var BceWithLogitsSum(Var logits, const Matrix &targets) {
  const Matrix &z = logits.value();
  if (z.rows() != targets.rows() || z.cols() != targets.cols())
    throw ConfigError("BceWithLogitsSum: shape mismatch");
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double x = z(i), y = targets(i);
    loss += std::max(x, 0.0) - x * y + std::log1p(std::exp(-std::abs(x)));
  }
  const int il = logits.id();
  return logits.tape()->Record(
      Matrix::Constant(1, 1, loss), logits.requires_grad(),
      [il, targets](Tape &t, const Matrix &g, const Matrix &) {
        t.Accumulate(il, g(0, 0) * (SigmoidOf(t.value(il)) - targets));
      });
}

Var SquaredErrorSum(Var a, const Matrix &target) {
  if (a.rows() != target.rows() || a.cols() != target.cols())
    throw ConfigError("SquaredErrorSum: " + Shape(a) + " vs target " +
                      std::to_string(target.rows()) + "x" +
                      std::to_string(target.cols()));
  const int ia = a.id();
  return a.tape()->Record(
      Matrix::Constant(1, 1, (a.value() - target).squaredNorm()),
      a.requires_grad(), [ia, target](Tape &t, const Matrix &g, const Matrix &) {
        t.Accumulate(ia, 2.0 * g(0, 0) * (t.value(ia) - target));
      });
}

}  // namespace fctts::ad
