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

#ifndef AECLAB_SIGNAL_FFT_H_
#define AECLAB_SIGNAL_FFT_H_

#include <complex>
#include <span>

namespace aeclab {

// Real-input FFT of even length n backed by FFTW. Plans are cached per size;
// the cache is guarded so transforms may run from several threads at once.
class RealFft {
 public:
  explicit RealFft(int n);

  int size() const { return n_; }
  int num_bins() const { return n_ / 2 + 1; }

  // out[k] = sum_t in[t] exp(-2 pi i k t / n), k = 0..n/2.
  void Forward(std::span<const double> in,
               std::span<std::complex<double>> out) const;
  // Unnormalized inverse: out[t] = sum over the full Hermitian spectrum.
  // Divide by n to invert Forward.
  void Inverse(std::span<const std::complex<double>> in,
               std::span<double> out) const;

 private:
  int n_;
  void* forward_plan_;
  void* inverse_plan_;
};

}  // namespace aeclab

#endif  // AECLAB_SIGNAL_FFT_H_
