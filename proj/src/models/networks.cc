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

#include "aeclab/models/networks.h"

#include <algorithm>

#include "aeclab/error.h"

namespace aeclab {

using nn::Mode;

Crnn::Crnn(const CrnnConfig& config, int in_channels, int num_bins, const std::string& name,
           nn::ParameterStore<Real>* store, Rng& rng)
    : config_(config), in_channels_(in_channels) {
  const auto& maps = config.feature_maps;
  if (maps.size() != 3) throw Error("crnn needs exactly three feature maps");
  freq_.push_back(num_bins);
  std::vector<size_t> chans = {size_t(in_channels)};
  for (size_t l = 0; l < 3; ++l) {
    ConvLayer c;
    c.kt = l == 0 ? config.first_kernel_t : config.kernel_t;
    const size_t cin = chans.back(), cout = maps[l], kf = config.kernel_f;
    const std::string p = name + "/enc" + std::to_string(l + 1);
    c.w = store->AddGlorot(p + "/w", {c.kt, kf, cin, cout}, c.kt * kf * cin, c.kt * kf * cout, rng);
    c.b = store->AddConstant(p + "/b", {cout}, 0.0f);
    c.gamma = store->AddConstant(p + "/gamma", {cout}, 1.0f);
    c.beta = store->AddConstant(p + "/beta", {cout}, 0.0f);
    c.bn = store->AddBatchNorm(p, cout);
    enc_.push_back(c);
    chans.push_back(cout);
    freq_.push_back(nn::SamePadding(freq_.back(), kf, config.stride_f).out);
  }

  const size_t flat = freq_[3] * chans[3];
  const size_t h = config.blstm_hidden;
  for (int l = 0; l < config.blstm_layers; ++l) {
    const size_t in = l == 0 ? flat : 2 * h;
    for (int dir = 0; dir < 2; ++dir) {
      const std::string p =
          name + "/blstm" + std::to_string(l) + (dir == 0 ? "_fwd" : "_bwd");
      LstmLayer layer;
      layer.wx = store->AddGlorot(p + "/wx", {in, 4 * h}, in, 4 * h, rng);
      layer.wh = store->AddGlorot(p + "/wh", {h, 4 * h}, h, 4 * h, rng);
      std::vector<Real> bias(4 * h, 0.0f);
      std::fill(bias.begin() + h, bias.begin() + 2 * h, 1.0f);  // forget gate
      layer.b = store->Add(p + "/b", {4 * h}, bias);
      (dir == 0 ? fwd_ : bwd_).push_back(layer);
    }
  }
  proj_w_ = store->AddGlorot(name + "/proj/w", {2 * h, flat}, 2 * h, flat, rng);
  proj_b_ = store->AddConstant(name + "/proj/b", {flat}, 0.0f);

  // Decoder layer l maps the concatenation at encoder depth l+1 back to the
  // resolution and width of encoder depth l. The last layer emits the mask.
  for (int l = 2; l >= 0; --l) {
    ConvLayer d;
    d.kt = l == 0 ? config.first_kernel_t : config.kernel_t;
    const size_t cin = 2 * chans[l + 1];
    const size_t cout = l == 0 ? 1 : chans[l];
    const size_t kf = config.kernel_f;
    const std::string p = name + "/dec" + std::to_string(l + 1);
    d.w = store->AddGlorot(p + "/w", {d.kt, kf, cout, cin}, d.kt * kf * cin, d.kt * kf * cout, rng);
    d.b = store->AddConstant(p + "/b", {cout}, 0.0f);
    if (l > 0) {
      d.gamma = store->AddConstant(p + "/gamma", {cout}, 1.0f);
      d.beta = store->AddConstant(p + "/beta", {cout}, 0.0f);
      d.bn = store->AddBatchNorm(p, cout);
    }
    dec_.push_back(d);
  }
}

RTensor Crnn::Bilstm(const RTensor& x, size_t layer) const {
  const LstmLayer& f = fwd_[layer];
  const LstmLayer& b = bwd_[layer];
  return nn::ConcatLast(nn::Lstm(x, f.wx, f.wh, f.b, false),
                        nn::Lstm(x, b.wx, b.wh, b.b, true));
}

RTensor Crnn::ForwardChunk(const RTensor& x, Mode mode) const {
  const size_t t = x.dim(0);
  std::vector<RTensor> skips;
  RTensor h = x;
  for (const ConvLayer& c : enc_) {
    h = nn::Elu(nn::BatchNorm(nn::Conv2d(h, c.w, c.b, 1, config_.stride_f), c.gamma, c.beta,
                              c.bn, mode));
    skips.push_back(h);
  }
  const nn::Shape enc_shape = h.shape();
  RTensor core = nn::Reshape(h, {t, enc_shape[1] * enc_shape[2]});
  for (size_t l = 0; l < fwd_.size(); ++l) core = Bilstm(core, l);
  h = nn::Reshape(nn::Dense(core, proj_w_, proj_b_), enc_shape);
  for (size_t i = 0; i < dec_.size(); ++i) {
    const ConvLayer& d = dec_[i];
    const size_t depth = 2 - i;  // encoder depth whose resolution we restore
    const size_t out_f = freq_[depth];
    h = nn::Deconv2d(nn::ConcatLast(h, skips[depth]), d.w, d.b, 1, config_.stride_f, t, out_f);
    if (d.bn != nullptr) {
      h = nn::Elu(nn::BatchNorm(h, d.gamma, d.beta, d.bn, mode));
    } else {
      h = nn::Sigmoid(h);
    }
  }
  return nn::Reshape(h, {t, freq_[0]});
}

RTensor Crnn::Forward(const RTensor& features, Mode mode) const {
  if (features.rank() != 3 || features.dim(1) != freq_[0] ||
      features.dim(2) != size_t(in_channels_)) {
    throw Error("crnn expects features [frames, " + std::to_string(freq_[0]) + ", " +
                std::to_string(in_channels_) + "], got " +
                nn::ShapeToString(features.shape()));
  }
  const size_t frames = features.dim(0);
  if (frames == 0) throw Error("crnn needs at least one frame");
  const size_t chunk = config_.chunk_frames;
  if (frames <= chunk) return ForwardChunk(features, mode);
  std::vector<RTensor> parts;
  for (size_t start = 0; start < frames; start += chunk) {
    const size_t n = std::min(chunk, frames - start);
    parts.push_back(ForwardChunk(nn::SliceRows(features, start, n), mode));
  }
  return nn::ConcatRows(parts);
}

DelayNet::DelayNet(const DelayNetConfig& config, const std::string& name,
                   nn::ParameterStore<Real>* store, Rng& rng)
    : config_(config) {
  std::vector<size_t> sizes = {size_t(config.classes)};
  for (int d : config.dense) sizes.push_back(d);
  sizes.push_back(config.classes);
  for (size_t l = 0; l + 1 < sizes.size(); ++l) {
    const std::string p = name + "/d" + std::to_string(l + 1);
    w_.push_back(store->AddGlorot(p + "/w", {sizes[l], sizes[l + 1]}, sizes[l], sizes[l + 1], rng));
    b_.push_back(store->AddConstant(p + "/b", {sizes[l + 1]}, 0.0f));
  }
}

RTensor DelayNet::Forward(const RTensor& features, Mode mode, uint64_t dropout_seed) const {
  if (features.rank() != 1 || features.dim(0) != size_t(config_.classes)) {
    throw Error("delay net expects " + std::to_string(config_.classes) + " features, got " +
                nn::ShapeToString(features.shape()));
  }
  RTensor h = config_.feature_power == 1.0 ? features
                                           : nn::RectifiedPower(features, config_.feature_power);
  for (size_t l = 0; l + 1 < w_.size(); ++l) {
    h = nn::Relu(nn::Dense(h, w_[l], b_[l]));
    if (l == 1) h = nn::Dropout(h, config_.dropout, mode, dropout_seed);
  }
  return nn::Softmax(nn::Dense(h, w_.back(), b_.back()));
}

}  // namespace aeclab
