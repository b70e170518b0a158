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

#ifndef AECLAB_MODELS_NETWORKS_H_
#define AECLAB_MODELS_NETWORKS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "aeclab/models/config.h"
#include "aeclab/nn/ops.h"
#include "aeclab/nn/params.h"

namespace aeclab {

using Real = float;
using RTensor = nn::Tensor<Real>;

// Conv encoder, BLSTM core and mirrored deconv decoder with skip
// concatenation, predicting a [frames, bins] mask in [0, 1].
class Crnn {
 public:
  Crnn(const CrnnConfig& config, int in_channels, int num_bins, const std::string& name,
       nn::ParameterStore<Real>* store, Rng& rng);

  // features: [frames, bins, in_channels]. Frames are processed in
  // independent chunks of config.chunk_frames; the last chunk is shorter
  // when the frame count does not divide evenly.
  RTensor Forward(const RTensor& features, nn::Mode mode) const;

  // Spatial sizes of the encoder outputs, e.g. 257 -> 129 -> 65 -> 33.
  std::vector<size_t> FrequencyTrace() const { return freq_; }

 private:
  struct ConvLayer {
    RTensor w, b, gamma, beta;
    nn::BatchNormState<Real>* bn = nullptr;
    size_t kt = 1;
  };
  struct LstmLayer {
    RTensor wx, wh, b;
  };

  RTensor ForwardChunk(const RTensor& x, nn::Mode mode) const;
  RTensor Bilstm(const RTensor& x, size_t layer) const;

  CrnnConfig config_;
  int in_channels_;
  std::vector<size_t> freq_;  // bins at the input and after each encoder layer
  std::vector<ConvLayer> enc_, dec_;
  std::vector<LstmLayer> fwd_, bwd_;
  RTensor proj_w_, proj_b_;
};

// Dense classifier from pooled correlation features to a class distribution.
class DelayNet {
 public:
  DelayNet(const DelayNetConfig& config, const std::string& name,
           nn::ParameterStore<Real>* store, Rng& rng);

  // features: [classes]. Dropout after the second hidden layer uses
  // `dropout_seed` in train mode.
  RTensor Forward(const RTensor& features, nn::Mode mode, uint64_t dropout_seed) const;

 private:
  DelayNetConfig config_;
  std::vector<RTensor> w_, b_;
};

}  // namespace aeclab

#endif  // AECLAB_MODELS_NETWORKS_H_
