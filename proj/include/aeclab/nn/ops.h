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

#ifndef AECLAB_NN_OPS_H_
#define AECLAB_NN_OPS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "aeclab/nn/tensor.h"
#include "aeclab/signal/waveform.h"

namespace aeclab::nn {

enum class Mode { kTrain, kEval };

// TF-style "same" geometry: out = ceil(in / stride), with the padding split
// so the extra element (if any) goes after.
struct SameGeometry {
  size_t out = 0;
  size_t pad_before = 0;
};
SameGeometry SamePadding(size_t in, size_t kernel, size_t stride);

// x: [N, in] or [in]; w: [in, out]; b: [out] or undefined.
template <typename T>
Tensor<T> Dense(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b);

// Cross-correlation over a [time, freq, channels] map with "same" padding on
// both axes. w: [kt, kf, c_in, c_out]; b: [c_out] or undefined.
template <typename T>
Tensor<T> Conv2d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b,
                 size_t stride_t, size_t stride_f);

// Transposed convolution: the exact adjoint of Conv2d taking an
// [out_t, out_f, c_out] map to x's [t, f, c_in] shape, with the same weight
// layout w: [kt, kf, c_out, c_in]. b: [c_out] or undefined. Fails unless
// Conv2d on an [out_t, out_f] map yields x's spatial shape.
template <typename T>
Tensor<T> Deconv2d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b,
                   size_t stride_t, size_t stride_f, size_t out_t, size_t out_f);

// One LSTM direction with zero initial state. Gate order i, f, g, o.
// x: [time, in]; wx: [in, 4H]; wh: [H, 4H]; b: [4H]. Returns [time, H]
// indexed by input time even when run in reverse.
template <typename T>
Tensor<T> Lstm(const Tensor<T>& x, const Tensor<T>& wx, const Tensor<T>& wh,
               const Tensor<T>& b, bool reverse);

template <typename T>
struct BatchNormState {
  std::vector<T> running_mean;
  std::vector<T> running_var;
  T momentum = T(0.99);
  T eps = T(1e-5);

  explicit BatchNormState(size_t channels = 0)
      : running_mean(channels, T(0)), running_var(channels, T(1)) {}
};

// Per-channel normalization over every non-channel position of [..., C].
// Train mode uses the batch statistics and updates the running ones.
template <typename T>
Tensor<T> BatchNorm(const Tensor<T>& x, const Tensor<T>& gamma,
                    const Tensor<T>& beta, BatchNormState<T>* state, Mode mode);

template <typename T>
Tensor<T> MaxPool1d(const Tensor<T>& x, size_t window, size_t stride);

template <typename T>
Tensor<T> Elu(const Tensor<T>& x);
template <typename T>
Tensor<T> Relu(const Tensor<T>& x);
// max(x, 0)^power, power >= 1.
template <typename T>
Tensor<T> RectifiedPower(const Tensor<T>& x, double power);
template <typename T>
Tensor<T> Sigmoid(const Tensor<T>& x);
// Row-wise over the last dimension.
template <typename T>
Tensor<T> Softmax(const Tensor<T>& x);

// Inverted dropout; identity in eval mode or at rate 0.
template <typename T>
Tensor<T> Dropout(const Tensor<T>& x, double rate, Mode mode, uint64_t seed);

template <typename T>
Tensor<T> MseLoss(const Tensor<T>& pred, const Tensor<T>& target);

inline constexpr double kProbEps = 1e-10;

// -ln(probs[cls] + eps)
template <typename T>
Tensor<T> CrossEntropyLoss(const Tensor<T>& probs, int cls);

// -alpha[cls] * (1 - p)^gamma * ln(p + eps), p = probs[cls].
template <typename T>
Tensor<T> FocalLoss(const Tensor<T>& probs, int cls, double gamma,
                    std::span<const double> alpha);

template <typename T>
Tensor<T> Sum(const Tensor<T>& x);
template <typename T>
Tensor<T> Add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> Scale(const Tensor<T>& x, double s);
template <typename T>
Tensor<T> Reshape(const Tensor<T>& x, Shape shape);
// Concatenates along the last dimension; leading dims must agree.
template <typename T>
Tensor<T> ConcatLast(const Tensor<T>& a, const Tensor<T>& b);
// Concatenates along the first dimension.
template <typename T>
Tensor<T> ConcatRows(const std::vector<Tensor<T>>& parts);
template <typename T>
Tensor<T> SliceRows(const Tensor<T>& x, size_t start, size_t count);
// x: [N]. Entries past the end of x read as zero.
template <typename T>
Tensor<T> Slice1d(const Tensor<T>& x, size_t start, size_t count);

// Differentiable counterpart of aeclab::CrossCorrelate: entry l pairs a[n]
// with b[n + l]. a, b: [N].
template <typename T>
Tensor<T> CrossCorrelate(const Tensor<T>& a, const Tensor<T>& b,
                         size_t max_lag, bool normalized);

// istft(mask * spec) with the phase of `spec`; mask: [frames, bins].
template <typename T>
Tensor<T> MaskedIstft(const Tensor<T>& mask, const Spectrogram& spec);

// ln(mask * magnitude + eps); mask and magnitude share a shape.
template <typename T>
Tensor<T> MaskedLogMagnitude(const Tensor<T>& mask,
                             std::span<const T> magnitude, double eps);

}  // namespace aeclab::nn

#endif  // AECLAB_NN_OPS_H_
