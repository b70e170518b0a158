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

#include "aeclab/signal/fft.h"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "aeclab/error.h"

namespace aeclab {
namespace {

struct PlanPair {
  fftw_plan forward;
  fftw_plan inverse;
};

// FFTW planning is not thread-safe; execution with the new-array interface is.
std::mutex& PlannerMutex() {
  static std::mutex mu;
  return mu;
}

PlanPair GetPlans(int n) {
  static std::map<int, PlanPair> cache;
  std::lock_guard<std::mutex> lock(PlannerMutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> real(n);
  std::vector<fftw_complex> cplx(n / 2 + 1);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair plans;
  plans.forward = fftw_plan_dft_r2c_1d(n, real.data(), cplx.data(), flags);
  plans.inverse = fftw_plan_dft_c2r_1d(n, cplx.data(), real.data(), flags);
  cache.emplace(n, plans);
  return plans;
}

}  // namespace

RealFft::RealFft(int n) : n_(n) {
  if (n <= 0 || n % 2 != 0) throw Error("fft size must be positive and even");
  PlanPair plans = GetPlans(n);
  forward_plan_ = plans.forward;
  inverse_plan_ = plans.inverse;
}

void RealFft::Forward(std::span<const double> in,
                      std::span<std::complex<double>> out) const {
  if (in.size() != static_cast<size_t>(n_) ||
      out.size() != static_cast<size_t>(num_bins())) {
    throw Error("fft buffer size mismatch");
  }
  // r2c does not modify its input.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_),
                       const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void RealFft::Inverse(std::span<const std::complex<double>> in,
                      std::span<double> out) const {
  if (in.size() != static_cast<size_t>(num_bins()) ||
      out.size() != static_cast<size_t>(n_)) {
    throw Error("fft buffer size mismatch");
  }
  // c2r destroys its input, so work on a copy.
  std::vector<std::complex<double>> scratch(in.begin(), in.end());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_),
                       reinterpret_cast<fftw_complex*>(scratch.data()),
                       out.data());
}

}  // namespace aeclab
