// Copyright 2026 The aeclab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "aeclab/nn/ops.h"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>

#include "aeclab/error.h"
#include "aeclab/random.h"
#include "aeclab/signal/fft.h"
#include "aeclab/signal/stft.h"

namespace aeclab::nn {
namespace {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapMat = Eigen::Map<Mat<T>>;
template <typename T>
using CMapMat = Eigen::Map<const Mat<T>>;

// Null for tensors that take no gradient. Nodes that do are kept alive by
// the output's parent list, so the raw pointer stays valid in closures.
template <typename T>
Node<T>* Target(const Tensor<T>& t) {
  return t.defined() && t.requires_grad() ? t.node() : nullptr;
}

template <typename T>
void RequireShape(const Tensor<T>& t, const Shape& want, const char* what) {
  if (t.shape() != want) {
    throw Error(std::string(what) + ": expected shape " + ShapeToString(want) +
                ", got " + ShapeToString(t.shape()));
  }
}

template <typename T>
void RequireRank(const Tensor<T>& t, size_t rank, const char* what) {
  if (t.rank() != rank) {
    throw Error(std::string(what) + ": expected rank " + std::to_string(rank) +
                ", got shape " + ShapeToString(t.shape()));
  }
}

// Elementwise op with derivative expressed through input x and output y.
template <typename T, typename F, typename D>
Tensor<T> Pointwise(const Tensor<T>& x, F f, D dfdx) {
  std::vector<T> out(x.size());
  auto in = x.values();
  for (size_t i = 0; i < out.size(); ++i) out[i] = f(in[i]);
  Node<T>* px = Target(x);
  return Tensor<T>::FromOp(x.shape(), std::move(out), {x},
                           [px, dfdx](const Node<T>& self) {
                             auto& g = px->MutableGrad();
                             for (size_t i = 0; i < g.size(); ++i) {
                               g[i] += self.grad[i] *
                                       dfdx(px->value[i], self.value[i]);
                             }
                           });
}

struct ConvGeom {
  size_t t = 0, f = 0;        // input spatial
  size_t ot = 0, of = 0;      // output spatial
  size_t kt = 0, kf = 0;
  size_t st = 1, sf = 1;
  size_t pt = 0, pf = 0;      // pad before
  size_t cin = 0;
  size_t cols() const { return kt * kf * cin; }
};

ConvGeom MakeGeom(size_t t, size_t f, size_t cin, size_t kt, size_t kf,
                  size_t st, size_t sf) {
  if (kt == 0 || kf == 0 || st == 0 || sf == 0) {
    throw Error("conv kernel and stride must be positive");
  }
  ConvGeom g;
  g.t = t;
  g.f = f;
  g.cin = cin;
  g.kt = kt;
  g.kf = kf;
  g.st = st;
  g.sf = sf;
  const SameGeometry gt = SamePadding(t, kt, st);
  const SameGeometry gf = SamePadding(f, kf, sf);
  g.ot = gt.out;
  g.of = gf.out;
  g.pt = gt.pad_before;
  g.pf = gf.pad_before;
  return g;
}

// cols: [ot*of, kt*kf*cin]
template <typename T>
void Im2Col(const T* x, const ConvGeom& g, T* cols) {
  const size_t nc = g.cols();
  for (size_t ot = 0; ot < g.ot; ++ot) {
    for (size_t of = 0; of < g.of; ++of) {
      T* row = cols + (ot * g.of + of) * nc;
      for (size_t i = 0; i < g.kt; ++i) {
        const long ti = static_cast<long>(ot * g.st + i) - static_cast<long>(g.pt);
        for (size_t j = 0; j < g.kf; ++j) {
          const long fj = static_cast<long>(of * g.sf + j) - static_cast<long>(g.pf);
          T* dst = row + (i * g.kf + j) * g.cin;
          if (ti < 0 || fj < 0 || ti >= static_cast<long>(g.t) ||
              fj >= static_cast<long>(g.f)) {
            std::fill(dst, dst + g.cin, T(0));
          } else {
            const T* src = x + (ti * g.f + fj) * g.cin;
            std::copy(src, src + g.cin, dst);
          }
        }
      }
    }
  }
}

// Adjoint of Im2Col: scatter-adds cols back into x.
template <typename T>
void Col2Im(const T* cols, const ConvGeom& g, T* x) {
  const size_t nc = g.cols();
  for (size_t ot = 0; ot < g.ot; ++ot) {
    for (size_t of = 0; of < g.of; ++of) {
      const T* row = cols + (ot * g.of + of) * nc;
      for (size_t i = 0; i < g.kt; ++i) {
        const long ti = static_cast<long>(ot * g.st + i) - static_cast<long>(g.pt);
        if (ti < 0 || ti >= static_cast<long>(g.t)) continue;
        for (size_t j = 0; j < g.kf; ++j) {
          const long fj = static_cast<long>(of * g.sf + j) - static_cast<long>(g.pf);
          if (fj < 0 || fj >= static_cast<long>(g.f)) continue;
          const T* src = row + (i * g.kf + j) * g.cin;
          T* dst = x + (ti * g.f + fj) * g.cin;
          for (size_t c = 0; c < g.cin; ++c) dst[c] += src[c];
        }
      }
    }
  }
}

template <typename T>
T SigmoidScalar(T v) {
  return v >= T(0) ? T(1) / (T(1) + std::exp(-v))
                   : std::exp(v) / (T(1) + std::exp(v));
}

}  // namespace

SameGeometry SamePadding(size_t in, size_t kernel, size_t stride) {
  if (kernel == 0 || stride == 0) throw Error("kernel and stride must be positive");
  SameGeometry g;
  g.out = (in + stride - 1) / stride;
  const long total = static_cast<long>((g.out - 1) * stride + kernel) -
                     static_cast<long>(in);
  g.pad_before = total > 0 ? static_cast<size_t>(total) / 2 : 0;
  return g;
}

// Column sums accumulated row by row. Eigen's colwise reduction peels by
// buffer alignment, which made bias gradients differ between runs.
template <typename T>
void AddRowSums(const CMapMat<T>& g, T* out) {
  for (Eigen::Index r = 0; r < g.rows(); ++r) {
    const T* row = g.data() + r * g.cols();
    for (Eigen::Index j = 0; j < g.cols(); ++j) out[j] += row[j];
  }
}

template <typename T>
Tensor<T> Dense(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
  RequireRank(w, 2, "dense weight");
  const size_t in = w.dim(0), out = w.dim(1);
  const bool vec = x.rank() == 1;
  if ((vec && x.dim(0) != in) || (!vec && (x.rank() != 2 || x.dim(1) != in))) {
    throw Error("dense: input " + ShapeToString(x.shape()) +
                " does not match weight " + ShapeToString(w.shape()));
  }
  if (b.defined()) RequireShape(b, {out}, "dense bias");
  const size_t rows = vec ? 1 : x.dim(0);
  std::vector<T> y(rows * out);
  MapMat<T> Y(y.data(), rows, out);
  CMapMat<T> X(x.values().data(), rows, in);
  CMapMat<T> W(w.values().data(), in, out);
  Y.noalias() = X * W;
  if (b.defined()) {
    Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> B(b.values().data(), out);
    Y.rowwise() += B;
  }
  Shape shape = vec ? Shape{out} : Shape{rows, out};
  return Tensor<T>::FromOp(
      shape, std::move(y), {x, w, b}, [x, w, b, rows, in, out](const Node<T>& self) {
        CMapMat<T> G(self.grad.data(), rows, out);
        if (Node<T>* px = Target(x)) {
          MapMat<T>(px->MutableGrad().data(), rows, in).noalias() +=
              G * CMapMat<T>(w.values().data(), in, out).transpose();
        }
        if (Node<T>* pw = Target(w)) {
          MapMat<T>(pw->MutableGrad().data(), in, out).noalias() +=
              CMapMat<T>(x.values().data(), rows, in).transpose() * G;
        }
        if (Node<T>* pb = Target(b)) {
          AddRowSums(G, pb->MutableGrad().data());
        }
      });
}

template <typename T>
Tensor<T> Conv2d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b,
                 size_t stride_t, size_t stride_f) {
  RequireRank(x, 3, "conv2d input");
  RequireRank(w, 4, "conv2d kernel");
  if (w.dim(2) != x.dim(2)) {
    throw Error("conv2d: kernel " + ShapeToString(w.shape()) +
                " does not match input channels " + ShapeToString(x.shape()));
  }
  const size_t cout = w.dim(3);
  if (b.defined()) RequireShape(b, {cout}, "conv2d bias");
  const ConvGeom g = MakeGeom(x.dim(0), x.dim(1), x.dim(2), w.dim(0), w.dim(1),
                              stride_t, stride_f);
  const size_t rows = g.ot * g.of, nc = g.cols();
  auto cols = std::make_shared<std::vector<T>>(rows * nc);
  Im2Col(x.values().data(), g, cols->data());
  std::vector<T> y(rows * cout);
  MapMat<T> Y(y.data(), rows, cout);
  Y.noalias() = CMapMat<T>(cols->data(), rows, nc) *
                CMapMat<T>(w.values().data(), nc, cout);
  if (b.defined()) {
    Y.rowwise() +=
        Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>(b.values().data(), cout);
  }
  return Tensor<T>::FromOp(
      {g.ot, g.of, cout}, std::move(y), {x, w, b},
      [x, w, b, g, cols, rows, nc, cout](const Node<T>& self) {
        CMapMat<T> G(self.grad.data(), rows, cout);
        if (Node<T>* pw = Target(w)) {
          MapMat<T>(pw->MutableGrad().data(), nc, cout).noalias() +=
              CMapMat<T>(cols->data(), rows, nc).transpose() * G;
        }
        if (Node<T>* pb = Target(b)) {
          AddRowSums(G, pb->MutableGrad().data());
        }
        if (Node<T>* px = Target(x)) {
          std::vector<T> dcols(rows * nc);
          MapMat<T>(dcols.data(), rows, nc).noalias() =
              G * CMapMat<T>(w.values().data(), nc, cout).transpose();
          Col2Im(dcols.data(), g, px->MutableGrad().data());
        }
      });
}

template <typename T>
Tensor<T> Deconv2d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b,
                   size_t stride_t, size_t stride_f, size_t out_t, size_t out_f) {
  RequireRank(x, 3, "deconv2d input");
  RequireRank(w, 4, "deconv2d kernel");
  if (w.dim(3) != x.dim(2)) {
    throw Error("deconv2d: kernel " + ShapeToString(w.shape()) +
                " does not match input channels " + ShapeToString(x.shape()));
  }
  const size_t cout = w.dim(2), cin = x.dim(2);
  if (b.defined()) RequireShape(b, {cout}, "deconv2d bias");
  // Geometry of the forward conv this op is the adjoint of.
  const ConvGeom g = MakeGeom(out_t, out_f, cout, w.dim(0), w.dim(1), stride_t,
                              stride_f);
  if (g.ot != x.dim(0) || g.of != x.dim(1)) {
    throw Error("deconv2d: output shape [" + std::to_string(out_t) + "," +
                std::to_string(out_f) + "] inconsistent with input " +
                ShapeToString(x.shape()) + " at this stride");
  }
  const size_t rows = g.ot * g.of, nc = g.cols();
  std::vector<T> cols(rows * nc);
  MapMat<T>(cols.data(), rows, nc).noalias() =
      CMapMat<T>(x.values().data(), rows, cin) *
      CMapMat<T>(w.values().data(), nc, cin).transpose();
  std::vector<T> y(out_t * out_f * cout, T(0));
  Col2Im(cols.data(), g, y.data());
  if (b.defined()) {
    auto bv = b.values();
    for (size_t i = 0; i < out_t * out_f; ++i) {
      for (size_t c = 0; c < cout; ++c) y[i * cout + c] += bv[c];
    }
  }
  return Tensor<T>::FromOp(
      {out_t, out_f, cout}, std::move(y), {x, w, b},
      [x, w, b, g, rows, nc, cin, cout](const Node<T>& self) {
        if (Node<T>* pb = Target(b)) {
          auto& gb = pb->MutableGrad();
          for (size_t i = 0; i < self.grad.size(); ++i) gb[i % cout] += self.grad[i];
        }
        if (!Target(x) && !Target(w)) return;
        std::vector<T> dcols(rows * nc);
        Im2Col(self.grad.data(), g, dcols.data());
        CMapMat<T> DC(dcols.data(), rows, nc);
        if (Node<T>* px = Target(x)) {
          MapMat<T>(px->MutableGrad().data(), rows, cin).noalias() +=
              DC * CMapMat<T>(w.values().data(), nc, cin);
        }
        if (Node<T>* pw = Target(w)) {
          MapMat<T>(pw->MutableGrad().data(), nc, cin).noalias() +=
              DC.transpose() * CMapMat<T>(x.values().data(), rows, cin);
        }
      });
}

template <typename T>
Tensor<T> Lstm(const Tensor<T>& x, const Tensor<T>& wx, const Tensor<T>& wh,
               const Tensor<T>& b, bool reverse) {
  RequireRank(x, 2, "lstm input");
  RequireRank(wh, 2, "lstm recurrent weight");
  const size_t steps = x.dim(0), in = x.dim(1), h = wh.dim(0);
  if (steps == 0) throw Error("lstm needs at least one time step");
  RequireShape(wh, {h, 4 * h}, "lstm recurrent weight");
  RequireShape(wx, {in, 4 * h}, "lstm input weight");
  RequireShape(b, {4 * h}, "lstm bias");
  const size_t g4 = 4 * h;

  // Post-activation gates [steps, 4H] (i, f, g, o), cell states, outputs.
  auto gates = std::make_shared<std::vector<T>>(steps * g4);
  auto cell = std::make_shared<std::vector<T>>(steps * h);
  std::vector<T> out(steps * h);
  MapMat<T> Z(gates->data(), steps, g4);
  Z.noalias() = CMapMat<T>(x.values().data(), steps, in) *
                CMapMat<T>(wx.values().data(), in, g4);
  Z.rowwise() +=
      Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>(b.values().data(), g4);
  CMapMat<T> WH(wh.values().data(), h, g4);
  Eigen::Matrix<T, 1, Eigen::Dynamic> rec(g4);
  for (size_t s = 0; s < steps; ++s) {
    const size_t t = reverse ? steps - 1 - s : s;
    T* z = gates->data() + t * g4;
    if (s > 0) {
      const size_t tp = reverse ? t + 1 : t - 1;
      rec.noalias() =
          Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>(out.data() + tp * h, h) * WH;
      for (size_t k = 0; k < g4; ++k) z[k] += rec[k];
    }
    const T* c_prev = s > 0 ? cell->data() + (reverse ? t + 1 : t - 1) * h : nullptr;
    for (size_t k = 0; k < h; ++k) {
      const T ig = SigmoidScalar(z[k]);
      const T fg = SigmoidScalar(z[h + k]);
      const T gg = std::tanh(z[2 * h + k]);
      const T og = SigmoidScalar(z[3 * h + k]);
      z[k] = ig;
      z[h + k] = fg;
      z[2 * h + k] = gg;
      z[3 * h + k] = og;
      const T c = fg * (c_prev ? c_prev[k] : T(0)) + ig * gg;
      (*cell)[t * h + k] = c;
      out[t * h + k] = og * std::tanh(c);
    }
  }
  return Tensor<T>::FromOp(
      {steps, h}, std::move(out), {x, wx, wh, b},
      [x, wx, wh, b, gates, cell, steps, in, h, g4, reverse](const Node<T>& self) {
        // dz holds pre-activation gate gradients for every step.
        std::vector<T> dz(steps * g4, T(0));
        std::vector<T> dh(h), dc_next(h, T(0));
        Eigen::Matrix<T, 1, Eigen::Dynamic> dh_rec = Eigen::Matrix<T, 1, Eigen::Dynamic>::Zero(h);
        CMapMat<T> WH(wh.values().data(), h, g4);
        for (size_t s = steps; s-- > 0;) {
          const size_t t = reverse ? steps - 1 - s : s;
          const T* a = gates->data() + t * g4;
          const T* c = cell->data() + t * h;
          const T* c_prev = s > 0 ? cell->data() + (reverse ? t + 1 : t - 1) * h : nullptr;
          T* d = dz.data() + t * g4;
          for (size_t k = 0; k < h; ++k) {
            const T dht = self.grad[t * h + k] + dh_rec[k];
            const T tc = std::tanh(c[k]);
            const T ig = a[k], fg = a[h + k], gg = a[2 * h + k], og = a[3 * h + k];
            const T dc = dht * og * (T(1) - tc * tc) + dc_next[k];
            const T cp = c_prev ? c_prev[k] : T(0);
            d[k] = dc * gg * ig * (T(1) - ig);
            d[h + k] = dc * cp * fg * (T(1) - fg);
            d[2 * h + k] = dc * ig * (T(1) - gg * gg);
            d[3 * h + k] = dht * tc * og * (T(1) - og);
            dc_next[k] = dc * fg;
          }
          dh_rec.noalias() =
              Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>(d, g4) * WH.transpose();
        }
        CMapMat<T> DZ(dz.data(), steps, g4);
        if (Node<T>* p = Target(x)) {
          MapMat<T>(p->MutableGrad().data(), steps, in).noalias() +=
              DZ * CMapMat<T>(wx.values().data(), in, g4).transpose();
        }
        if (Node<T>* p = Target(wx)) {
          MapMat<T>(p->MutableGrad().data(), in, g4).noalias() +=
              CMapMat<T>(x.values().data(), steps, in).transpose() * DZ;
        }
        if (Node<T>* p = Target(b)) {
          AddRowSums(DZ, p->MutableGrad().data());
        }
        if (Node<T>* p = Target(wh)) {
          // h_prev for row t is the output at the previous step in scan order.
          MapMat<T> GW(p->MutableGrad().data(), h, g4);
          const std::vector<T>& hv = self.value;
          for (size_t s = 1; s < steps; ++s) {
            const size_t t = reverse ? steps - 1 - s : s;
            const size_t tp = reverse ? t + 1 : t - 1;
            GW.noalias() +=
                Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>>(hv.data() + tp * h, h) *
                Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>(dz.data() + t * g4, g4);
          }
        }
      });
}

template <typename T>
Tensor<T> BatchNorm(const Tensor<T>& x, const Tensor<T>& gamma,
                    const Tensor<T>& beta, BatchNormState<T>* state, Mode mode) {
  if (x.rank() < 1) throw Error("batch_norm needs a channel axis");
  const size_t c = x.shape().back();
  const size_t m = c ? x.size() / c : 0;
  RequireShape(gamma, {c}, "batch_norm gamma");
  RequireShape(beta, {c}, "batch_norm beta");
  if (state == nullptr || state->running_mean.size() != c ||
      state->running_var.size() != c) {
    throw Error("batch_norm running statistics do not match channel count");
  }
  if (m == 0) throw Error("batch_norm on empty input");
  auto xv = x.values();
  auto gv = gamma.values();
  auto bv = beta.values();
  const T eps = state->eps;
  std::vector<T> mean(c, T(0)), var(c, T(0));
  if (mode == Mode::kTrain) {
    std::vector<double> s(c, 0.0), s2(c, 0.0);
    for (size_t i = 0; i < m; ++i) {
      for (size_t k = 0; k < c; ++k) s[k] += xv[i * c + k];
    }
    for (size_t k = 0; k < c; ++k) s[k] /= m;
    // Second pass corrects the rounding of the first, so a constant channel
    // has an exactly zero deviation.
    std::vector<double> corr(c, 0.0);
    for (size_t i = 0; i < m; ++i) {
      for (size_t k = 0; k < c; ++k) corr[k] += xv[i * c + k] - s[k];
    }
    for (size_t k = 0; k < c; ++k) s[k] += corr[k] / m;
    for (size_t i = 0; i < m; ++i) {
      for (size_t k = 0; k < c; ++k) {
        const double d = xv[i * c + k] - s[k];
        s2[k] += d * d;
      }
    }
    for (size_t k = 0; k < c; ++k) {
      mean[k] = static_cast<T>(s[k]);
      var[k] = static_cast<T>(s2[k] / m);
      state->running_mean[k] =
          state->momentum * state->running_mean[k] + (T(1) - state->momentum) * mean[k];
      state->running_var[k] =
          state->momentum * state->running_var[k] + (T(1) - state->momentum) * var[k];
    }
  } else {
    mean = state->running_mean;
    var = state->running_var;
  }
  auto inv_std = std::make_shared<std::vector<T>>(c);
  for (size_t k = 0; k < c; ++k) (*inv_std)[k] = T(1) / std::sqrt(var[k] + eps);
  auto xhat = std::make_shared<std::vector<T>>(x.size());
  std::vector<T> y(x.size());
  for (size_t i = 0; i < m; ++i) {
    for (size_t k = 0; k < c; ++k) {
      const size_t j = i * c + k;
      (*xhat)[j] = (xv[j] - mean[k]) * (*inv_std)[k];
      y[j] = gv[k] * (*xhat)[j] + bv[k];
    }
  }
  const bool train = mode == Mode::kTrain;
  return Tensor<T>::FromOp(
      x.shape(), std::move(y), {x, gamma, beta},
      [x, gamma, beta, xhat, inv_std, m, c, train](const Node<T>& self) {
        const auto& g = self.grad;
        std::vector<T> sum_g(c, T(0)), sum_gx(c, T(0));
        for (size_t i = 0; i < m; ++i) {
          for (size_t k = 0; k < c; ++k) {
            sum_g[k] += g[i * c + k];
            sum_gx[k] += g[i * c + k] * (*xhat)[i * c + k];
          }
        }
        if (Node<T>* p = Target(gamma)) {
          for (size_t k = 0; k < c; ++k) p->MutableGrad()[k] += sum_gx[k];
        }
        if (Node<T>* p = Target(beta)) {
          for (size_t k = 0; k < c; ++k) p->MutableGrad()[k] += sum_g[k];
        }
        if (Node<T>* p = Target(x)) {
          auto& gx = p->MutableGrad();
          auto gv = gamma.values();
          for (size_t i = 0; i < m; ++i) {
            for (size_t k = 0; k < c; ++k) {
              const size_t j = i * c + k;
              const T scale = gv[k] * (*inv_std)[k];
              if (train) {
                gx[j] += scale * (g[j] - sum_g[k] / T(m) -
                                  (*xhat)[j] * sum_gx[k] / T(m));
              } else {
                gx[j] += scale * g[j];
              }
            }
          }
        }
      });
}

template <typename T>
Tensor<T> MaxPool1d(const Tensor<T>& x, size_t window, size_t stride) {
  RequireRank(x, 1, "maxpool1d input");
  if (window == 0 || stride == 0) throw Error("maxpool window and stride must be positive");
  if (window > x.size()) {
    throw Error("maxpool window " + std::to_string(window) + " exceeds length " +
                std::to_string(x.size()));
  }
  const size_t n = (x.size() - window) / stride + 1;
  auto xv = x.values();
  std::vector<T> y(n);
  auto arg = std::make_shared<std::vector<size_t>>(n);
  for (size_t i = 0; i < n; ++i) {
    size_t best = i * stride;
    for (size_t j = best + 1; j < i * stride + window; ++j) {
      if (xv[j] > xv[best]) best = j;
    }
    (*arg)[i] = best;
    y[i] = xv[best];
  }
  Node<T>* px = Target(x);
  return Tensor<T>::FromOp({n}, std::move(y), {x}, [px, arg](const Node<T>& self) {
    auto& g = px->MutableGrad();
    for (size_t i = 0; i < arg->size(); ++i) g[(*arg)[i]] += self.grad[i];
  });
}

template <typename T>
Tensor<T> Elu(const Tensor<T>& x) {
  return Pointwise(
      x, [](T v) { return v > T(0) ? v : std::expm1(v); },
      [](T v, T y) { return v > T(0) ? T(1) : y + T(1); });
}

template <typename T>
Tensor<T> Relu(const Tensor<T>& x) {
  return Pointwise(
      x, [](T v) { return v > T(0) ? v : T(0); },
      [](T v, T) { return v > T(0) ? T(1) : T(0); });
}

template <typename T>
Tensor<T> RectifiedPower(const Tensor<T>& x, double power) {
  if (!(power >= 1.0)) throw Error("rectified power must be >= 1");
  const T p = static_cast<T>(power);
  return Pointwise(
      x, [p](T v) { return v > T(0) ? std::pow(v, p) : T(0); },
      [p](T v, T) { return v > T(0) ? p * std::pow(v, p - T(1)) : T(0); });
}

template <typename T>
Tensor<T> Sigmoid(const Tensor<T>& x) {
  return Pointwise(
      x, [](T v) { return SigmoidScalar(v); },
      [](T, T y) { return y * (T(1) - y); });
}

template <typename T>
Tensor<T> Softmax(const Tensor<T>& x) {
  if (x.rank() < 1 || x.size() == 0) throw Error("softmax on empty tensor");
  const size_t c = x.shape().back(), rows = x.size() / c;
  auto xv = x.values();
  std::vector<T> y(x.size());
  for (size_t r = 0; r < rows; ++r) {
    const T* in = xv.data() + r * c;
    T* out = y.data() + r * c;
    const T mx = *std::max_element(in, in + c);
    double total = 0.0;
    for (size_t k = 0; k < c; ++k) {
      out[k] = std::exp(in[k] - mx);
      total += out[k];
    }
    for (size_t k = 0; k < c; ++k) out[k] = static_cast<T>(out[k] / total);
  }
  Node<T>* px = Target(x);
  return Tensor<T>::FromOp(x.shape(), std::move(y), {x},
                           [px, rows, c](const Node<T>& self) {
                             auto& g = px->MutableGrad();
                             for (size_t r = 0; r < rows; ++r) {
                               const T* yv = self.value.data() + r * c;
                               const T* gy = self.grad.data() + r * c;
                               T dot = T(0);
                               for (size_t k = 0; k < c; ++k) dot += gy[k] * yv[k];
                               for (size_t k = 0; k < c; ++k) {
                                 g[r * c + k] += yv[k] * (gy[k] - dot);
                               }
                             }
                           });
}

template <typename T>
Tensor<T> Dropout(const Tensor<T>& x, double rate, Mode mode, uint64_t seed) {
  if (!(rate >= 0.0 && rate < 1.0)) throw Error("dropout rate must be in [0, 1)");
  if (mode == Mode::kEval || rate == 0.0) return x;
  Rng rng(seed);
  const T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
  auto scale = std::make_shared<std::vector<T>>(x.size());
  std::vector<T> y(x.size());
  auto xv = x.values();
  for (size_t i = 0; i < y.size(); ++i) {
    (*scale)[i] = rng.Uniform() < rate ? T(0) : keep_scale;
    y[i] = xv[i] * (*scale)[i];
  }
  Node<T>* px = Target(x);
  return Tensor<T>::FromOp(x.shape(), std::move(y), {x},
                           [px, scale](const Node<T>& self) {
                             auto& g = px->MutableGrad();
                             for (size_t i = 0; i < g.size(); ++i) {
                               g[i] += self.grad[i] * (*scale)[i];
                             }
                           });
}

template <typename T>
Tensor<T> MseLoss(const Tensor<T>& pred, const Tensor<T>& target) {
  if (pred.shape() != target.shape()) {
    throw Error("mse_loss shape mismatch: " + ShapeToString(pred.shape()) + " vs " +
                ShapeToString(target.shape()));
  }
  const size_t n = pred.size();
  if (n == 0) throw Error("mse_loss on empty tensors");
  auto p = pred.values();
  auto t = target.values();
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(p[i]) - t[i];
    acc += d * d;
  }
  return Tensor<T>::FromOp(
      {1}, {static_cast<T>(acc / n)}, {pred, target},
      [pred, target, n](const Node<T>& self) {
        const T k = T(2) * self.grad[0] / T(n);
        auto p = pred.values();
        auto t = target.values();
        if (Node<T>* pp = Target(pred)) {
          auto& g = pp->MutableGrad();
          for (size_t i = 0; i < n; ++i) g[i] += k * (p[i] - t[i]);
        }
        if (Node<T>* pt = Target(target)) {
          auto& g = pt->MutableGrad();
          for (size_t i = 0; i < n; ++i) g[i] -= k * (p[i] - t[i]);
        }
      });
}

template <typename T>
Tensor<T> FocalLoss(const Tensor<T>& probs, int cls, double gamma,
                    std::span<const double> alpha) {
  const size_t c = probs.size();
  if (cls < 0 || static_cast<size_t>(cls) >= c) {
    throw Error("class index " + std::to_string(cls) + " outside [0, " +
                std::to_string(c) + ")");
  }
  if (!(gamma >= 0.0)) throw Error("focal gamma must be nonnegative");
  if (!alpha.empty() && alpha.size() != c) {
    throw Error("focal alpha has " + std::to_string(alpha.size()) +
                " weights for " + std::to_string(c) + " classes");
  }
  const double a = alpha.empty() ? 1.0 : alpha[cls];
  const double p = probs.values()[cls];
  const double lp = std::log(p + kProbEps);
  // Skipping the modulating factor at gamma == 0 keeps this bit-identical
  // to plain cross-entropy.
  const double mod = gamma == 0.0 ? 1.0 : std::pow(std::max(0.0, 1.0 - p), gamma);
  const double loss = -a * mod * lp;
  Node<T>* pp = Target(probs);
  return Tensor<T>::FromOp(
      {1}, {static_cast<T>(loss)}, {probs},
      [pp, cls, gamma, a, p, lp](const Node<T>& self) {
        double d = -a / (p + kProbEps);
        if (gamma != 0.0) {
          const double q = std::max(0.0, 1.0 - p);
          d = -a * (std::pow(q, gamma) / (p + kProbEps) -
                    gamma * std::pow(q, gamma - 1.0) * lp);
        }
        pp->MutableGrad()[cls] += static_cast<T>(self.grad[0] * d);
      });
}

template <typename T>
Tensor<T> CrossEntropyLoss(const Tensor<T>& probs, int cls) {
  return FocalLoss(probs, cls, 0.0, {});
}

template <typename T>
Tensor<T> Sum(const Tensor<T>& x) {
  double acc = 0.0;
  for (T v : x.values()) acc += v;
  Node<T>* px = Target(x);
  return Tensor<T>::FromOp({1}, {static_cast<T>(acc)}, {x}, [px](const Node<T>& self) {
    for (T& g : px->MutableGrad()) g += self.grad[0];
  });
}

template <typename T>
Tensor<T> Add(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) {
    throw Error("add shape mismatch: " + ShapeToString(a.shape()) + " vs " +
                ShapeToString(b.shape()));
  }
  std::vector<T> y(a.size());
  for (size_t i = 0; i < y.size(); ++i) y[i] = a.values()[i] + b.values()[i];
  Node<T>* pa = Target(a);
  Node<T>* pb = Target(b);
  return Tensor<T>::FromOp(a.shape(), std::move(y), {a, b}, [pa, pb](const Node<T>& self) {
    if (pa) AccumulateGrad<T>(pa, self.grad);
    if (pb) AccumulateGrad<T>(pb, self.grad);
  });
}

template <typename T>
Tensor<T> Scale(const Tensor<T>& x, double s) {
  const T k = static_cast<T>(s);
  return Pointwise(x, [k](T v) { return k * v; }, [k](T, T) { return k; });
}

template <typename T>
Tensor<T> Reshape(const Tensor<T>& x, Shape shape) {
  if (NumElements(shape) != x.size()) {
    throw Error("cannot reshape " + ShapeToString(x.shape()) + " to " +
                ShapeToString(shape));
  }
  Node<T>* px = Target(x);
  std::vector<T> y(x.values().begin(), x.values().end());
  return Tensor<T>::FromOp(std::move(shape), std::move(y), {x},
                           [px](const Node<T>& self) { AccumulateGrad<T>(px, self.grad); });
}

template <typename T>
Tensor<T> ConcatLast(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.rank() != b.rank() || a.rank() == 0 ||
      !std::equal(a.shape().begin(), a.shape().end() - 1, b.shape().begin())) {
    throw Error("concat shape mismatch: " + ShapeToString(a.shape()) + " vs " +
                ShapeToString(b.shape()));
  }
  const size_t ca = a.shape().back(), cb = b.shape().back();
  const size_t rows = ca ? a.size() / ca : b.size() / std::max<size_t>(cb, 1);
  std::vector<T> y(rows * (ca + cb));
  for (size_t r = 0; r < rows; ++r) {
    std::copy_n(a.values().data() + r * ca, ca, y.data() + r * (ca + cb));
    std::copy_n(b.values().data() + r * cb, cb, y.data() + r * (ca + cb) + ca);
  }
  Shape shape = a.shape();
  shape.back() = ca + cb;
  Node<T>* pa = Target(a);
  Node<T>* pb = Target(b);
  return Tensor<T>::FromOp(shape, std::move(y), {a, b},
                           [pa, pb, rows, ca, cb](const Node<T>& self) {
                             for (size_t r = 0; r < rows; ++r) {
                               const T* g = self.grad.data() + r * (ca + cb);
                               if (pa) {
                                 T* d = pa->MutableGrad().data() + r * ca;
                                 for (size_t k = 0; k < ca; ++k) d[k] += g[k];
                               }
                               if (pb) {
                                 T* d = pb->MutableGrad().data() + r * cb;
                                 for (size_t k = 0; k < cb; ++k) d[k] += g[ca + k];
                               }
                             }
                           });
}

template <typename T>
Tensor<T> ConcatRows(const std::vector<Tensor<T>>& parts) {
  if (parts.empty()) throw Error("concat of zero tensors");
  Shape shape = parts[0].shape();
  if (shape.empty()) throw Error("concat needs rank >= 1");
  shape[0] = 0;
  std::vector<T> y;
  std::vector<std::pair<Node<T>*, size_t>> targets;
  for (const Tensor<T>& p : parts) {
    if (p.rank() != shape.size() ||
        !std::equal(p.shape().begin() + 1, p.shape().end(), shape.begin() + 1)) {
      throw Error("concat rows shape mismatch: " + ShapeToString(p.shape()));
    }
    shape[0] += p.dim(0);
    y.insert(y.end(), p.values().begin(), p.values().end());
    targets.emplace_back(Target(p), p.size());
  }
  return Tensor<T>::FromOp(shape, std::move(y), parts, [targets](const Node<T>& self) {
    size_t offset = 0;
    for (auto [t, n] : targets) {
      if (t) AccumulateGrad<T>(t, std::span(self.grad).subspan(offset, n));
      offset += n;
    }
  });
}

template <typename T>
Tensor<T> SliceRows(const Tensor<T>& x, size_t start, size_t count) {
  if (x.rank() < 1 || start + count > x.dim(0)) {
    throw Error("slice rows [" + std::to_string(start) + ", " +
                std::to_string(start + count) + ") out of " + ShapeToString(x.shape()));
  }
  const size_t row = x.dim(0) ? x.size() / x.dim(0) : 0;
  Shape shape = x.shape();
  shape[0] = count;
  std::vector<T> y(x.values().begin() + start * row,
                   x.values().begin() + (start + count) * row);
  Node<T>* px = Target(x);
  return Tensor<T>::FromOp(shape, std::move(y), {x},
                           [px, start, row](const Node<T>& self) {
                             T* g = px->MutableGrad().data() + start * row;
                             for (size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
                           });
}

template <typename T>
Tensor<T> Slice1d(const Tensor<T>& x, size_t start, size_t count) {
  RequireRank(x, 1, "slice1d input");
  const size_t n = x.size();
  std::vector<T> y(count, T(0));
  for (size_t i = 0; i < count && start + i < n; ++i) y[i] = x.values()[start + i];
  Node<T>* px = Target(x);
  return Tensor<T>::FromOp({count}, std::move(y), {x},
                           [px, start, n](const Node<T>& self) {
                             auto& g = px->MutableGrad();
                             for (size_t i = 0; i < self.grad.size() && start + i < n; ++i) {
                               g[start + i] += self.grad[i];
                             }
                           });
}

template <typename T>
Tensor<T> CrossCorrelate(const Tensor<T>& a, const Tensor<T>& b, size_t max_lag,
                         bool normalized) {
  RequireRank(a, 1, "cross_correlate a");
  RequireRank(b, 1, "cross_correlate b");
  const size_t na = a.size(), nb = b.size();
  if (max_lag >= std::min(na, nb)) {
    throw Error("max_lag " + std::to_string(max_lag) +
                " must be below both input lengths");
  }
  const size_t lags = max_lag + 1;
  auto av = a.values();
  auto bv = b.values();
  // Prefix sums of squares give every windowed energy in O(1).
  std::vector<double> pa(na + 1, 0.0), pb(nb + 1, 0.0);
  for (size_t n = 0; n < na; ++n) pa[n + 1] = pa[n] + double(av[n]) * av[n];
  for (size_t n = 0; n < nb; ++n) pb[n + 1] = pb[n] + double(bv[n]) * bv[n];
  auto ea = std::make_shared<std::vector<double>>(lags);
  auto eb = std::make_shared<std::vector<double>>(lags);
  auto r = std::make_shared<std::vector<double>>(lags);
  std::vector<T> y(lags);
  for (size_t l = 0; l < lags; ++l) {
    const size_t m = std::min(na, nb - l);
    double dot = 0.0;
    const T* x0 = av.data();
    const T* x1 = bv.data() + l;
    for (size_t n = 0; n < m; ++n) dot += double(x0[n]) * x1[n];
    (*ea)[l] = pa[m];
    (*eb)[l] = pb[l + m] - pb[l];
    double v = dot;
    if (normalized) {
      const double denom = std::sqrt((*ea)[l] * (*eb)[l]);
      v = denom > 0.0 ? dot / denom : 0.0;
    }
    (*r)[l] = v;
    y[l] = static_cast<T>(v);
  }
  return Tensor<T>::FromOp(
      {lags}, std::move(y), {a, b},
      [a, b, na, nb, lags, normalized, ea, eb, r](const Node<T>& self) {
        Node<T>* pa_ = Target(a);
        Node<T>* pb_ = Target(b);
        auto av = a.values();
        auto bv = b.values();
        T* ga = pa_ ? pa_->MutableGrad().data() : nullptr;
        T* gb = pb_ ? pb_->MutableGrad().data() : nullptr;
        for (size_t l = 0; l < lags; ++l) {
          const double g = self.grad[l];
          if (g == 0.0) continue;
          const size_t m = std::min(na, nb - l);
          double ka = g, kb = g, sa = 0.0, sb = 0.0;
          if (normalized) {
            const double denom = std::sqrt((*ea)[l] * (*eb)[l]);
            if (!(denom > 0.0)) continue;
            ka = kb = g / denom;
            sa = g * (*r)[l] / (*ea)[l];
            sb = g * (*r)[l] / (*eb)[l];
          }
          for (size_t n = 0; n < m; ++n) {
            const double x0 = av[n], x1 = bv[n + l];
            if (ga) ga[n] += static_cast<T>(ka * x1 - sa * x0);
            if (gb) gb[n + l] += static_cast<T>(kb * x0 - sb * x1);
          }
        }
      });
}

template <typename T>
Tensor<T> MaskedIstft(const Tensor<T>& mask, const Spectrogram& spec) {
  RequireShape(mask, {spec.num_frames, spec.num_bins}, "masked istft mask");
  Spectrogram masked = spec;
  auto mv = mask.values();
  for (size_t i = 0; i < masked.bins.size(); ++i) masked.bins[i] *= double(mv[i]);
  const Waveform w = Istft(masked);
  std::vector<T> y(w.samples.begin(), w.samples.end());
  auto src = std::make_shared<Spectrogram>(spec);
  Node<T>* pm = Target(mask);
  return Tensor<T>::FromOp(
      {spec.signal_length}, std::move(y), {mask}, [pm, src](const Node<T>& self) {
        const Spectrogram& s = *src;
        const int n = s.win_len;
        const std::vector<double> window = HannWindow(n);
        const size_t covered = (s.num_frames - 1) * s.hop + n;
        std::vector<double> weight(std::max(covered, s.signal_length), 0.0);
        for (size_t k = 0; k < s.num_frames; ++k) {
          for (int i = 0; i < n; ++i) weight[k * s.hop + i] += window[i] * window[i];
        }
        const RealFft fft(n);
        std::vector<double> q(n);
        std::vector<std::complex<double>> qf(s.num_bins);
        auto& g = pm->MutableGrad();
        for (size_t k = 0; k < s.num_frames; ++k) {
          bool any = false;
          for (int i = 0; i < n; ++i) {
            const size_t t = k * s.hop + i;
            q[i] = 0.0;
            if (t < s.signal_length && weight[t] > 1e-10) {
              q[i] = self.grad[t] * window[i] / (weight[t] * n);
              any = any || q[i] != 0.0;
            }
          }
          if (!any) continue;
          fft.Forward(q, qf);
          for (size_t f = 0; f < s.num_bins; ++f) {
            const double c = (f == 0 || f + 1 == s.num_bins) ? 1.0 : 2.0;
            g[k * s.num_bins + f] += static_cast<T>(
                c * std::real(s.bins[k * s.num_bins + f] * std::conj(qf[f])));
          }
        }
      });
}

template <typename T>
Tensor<T> MaskedLogMagnitude(const Tensor<T>& mask, std::span<const T> magnitude,
                             double eps) {
  if (mask.size() != magnitude.size()) {
    throw Error("masked log magnitude: mask " + ShapeToString(mask.shape()) +
                " does not match " + std::to_string(magnitude.size()) + " magnitudes");
  }
  if (!(eps > 0.0)) throw Error("eps must be positive");
  auto mag = std::make_shared<std::vector<T>>(magnitude.begin(), magnitude.end());
  std::vector<T> y(mask.size());
  auto mv = mask.values();
  for (size_t i = 0; i < y.size(); ++i) {
    y[i] = static_cast<T>(std::log(double(mv[i]) * (*mag)[i] + eps));
  }
  Node<T>* pm = Target(mask);
  return Tensor<T>::FromOp(mask.shape(), std::move(y), {mask},
                           [pm, mag, eps](const Node<T>& self) {
                             auto& g = pm->MutableGrad();
                             for (size_t i = 0; i < g.size(); ++i) {
                               const double denom = double(pm->value[i]) * (*mag)[i] + eps;
                               g[i] += static_cast<T>(self.grad[i] * (*mag)[i] / denom);
                             }
                           });
}

#define AECLAB_INSTANTIATE_OPS(T)                                                  \
  template Tensor<T> Dense(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);  \
  template Tensor<T> Conv2d(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,  \
                            size_t, size_t);                                       \
  template Tensor<T> Deconv2d(const Tensor<T>&, const Tensor<T>&,                  \
                              const Tensor<T>&, size_t, size_t, size_t, size_t);   \
  template Tensor<T> Lstm(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,    \
                          const Tensor<T>&, bool);                                 \
  template Tensor<T> BatchNorm(const Tensor<T>&, const Tensor<T>&,                 \
                               const Tensor<T>&, BatchNormState<T>*, Mode);        \
  template Tensor<T> MaxPool1d(const Tensor<T>&, size_t, size_t);                  \
  template Tensor<T> Elu(const Tensor<T>&);                                        \
  template Tensor<T> Relu(const Tensor<T>&);                                       \
  template Tensor<T> RectifiedPower(const Tensor<T>&, double);                     \
  template Tensor<T> Sigmoid(const Tensor<T>&);                                    \
  template Tensor<T> Softmax(const Tensor<T>&);                                    \
  template Tensor<T> Dropout(const Tensor<T>&, double, Mode, uint64_t);            \
  template Tensor<T> MseLoss(const Tensor<T>&, const Tensor<T>&);                  \
  template Tensor<T> CrossEntropyLoss(const Tensor<T>&, int);                      \
  template Tensor<T> FocalLoss(const Tensor<T>&, int, double,                      \
                               std::span<const double>);                           \
  template Tensor<T> Sum(const Tensor<T>&);                                        \
  template Tensor<T> Add(const Tensor<T>&, const Tensor<T>&);                      \
  template Tensor<T> Scale(const Tensor<T>&, double);                              \
  template Tensor<T> Reshape(const Tensor<T>&, Shape);                             \
  template Tensor<T> ConcatLast(const Tensor<T>&, const Tensor<T>&);               \
  template Tensor<T> ConcatRows(const std::vector<Tensor<T>>&);                    \
  template Tensor<T> SliceRows(const Tensor<T>&, size_t, size_t);                  \
  template Tensor<T> Slice1d(const Tensor<T>&, size_t, size_t);                    \
  template Tensor<T> CrossCorrelate(const Tensor<T>&, const Tensor<T>&, size_t,    \
                                    bool);                                         \
  template Tensor<T> MaskedIstft(const Tensor<T>&, const Spectrogram&);            \
  template Tensor<T> MaskedLogMagnitude(const Tensor<T>&, std::span<const T>,      \
                                        double);

AECLAB_INSTANTIATE_OPS(float)
AECLAB_INSTANTIATE_OPS(double)

}  // namespace aeclab::nn
