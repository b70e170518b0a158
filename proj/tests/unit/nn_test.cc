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

#include <gtest/gtest.h>

#include <memory>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "aeclab/error.h"
#include "aeclab/nn/adam.h"
#include "aeclab/nn/checkpoint.h"
#include "aeclab/nn/ops.h"
#include "aeclab/nn/params.h"
#include "aeclab/signal/dsp.h"
#include "aeclab/signal/stft.h"
#include "support/gradcheck.h"

namespace aeclab::nn {
namespace {

using testing::DTensor;
using testing::GradCheck;
using testing::RandomConst;
using testing::RandomParam;

constexpr int kSeeds = 20;
constexpr double kGradTol = 1e-4;

// Scalar readout with nonuniform weights so every output entry matters.
DTensor Readout(const DTensor& y, uint64_t seed) {
  Rng rng(seed ^ 0xABCDEF);
  return MseLoss(y, RandomConst(y.shape(), rng));
}

std::vector<double> Vals(const DTensor& t) { return {t.values().begin(), t.values().end()}; }

TEST(TensorTest, SumGradientIsOnes) {
  Rng rng(1);
  DTensor x = RandomParam({3, 4}, rng);
  Backward(Sum(x));
  for (double g : x.grad()) EXPECT_EQ(g, 1.0);
}

TEST(TensorTest, RepeatedBackwardAccumulates) {
  Rng rng(2);
  DTensor x = RandomParam({5}, rng);
  DTensor loss = Sum(Elu(x));
  Backward(loss);
  const std::vector<double> once(x.grad().begin(), x.grad().end());
  Backward(loss);
  for (size_t i = 0; i < once.size(); ++i) EXPECT_DOUBLE_EQ(x.grad()[i], 2 * once[i]);
}

TEST(TensorTest, NonScalarBackwardFails) {
  Rng rng(3);
  DTensor x = RandomParam({2}, rng);
  EXPECT_THROW(Backward(Elu(x)), Error);
}

TEST(TensorTest, SharedSubgraphGradientsAdd) {
  DTensor x = DTensor::Parameter({1}, {3.0});
  DTensor y = Add(x, x);
  Backward(Sum(Add(y, Scale(x, 2.0))));
  EXPECT_DOUBLE_EQ(x.grad()[0], 4.0);
}

TEST(DenseTest, Examples) {
  DTensor x = DTensor::Constant({2}, {1, 2});
  DTensor eye = DTensor::Constant({2, 2}, {1, 0, 0, 1});
  EXPECT_EQ(Vals(Dense(x, eye, DTensor())), (std::vector<double>{1, 2}));
  DTensor b = DTensor::Constant({2}, {3, 3});
  EXPECT_EQ(Vals(Dense(x, eye, b)), (std::vector<double>{4, 5}));
  EXPECT_THROW(Dense(DTensor::Constant({3}, {1, 2, 3}), eye, b), Error);
}

TEST(DenseTest, GradCheck) {
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(seed);
    DTensor x = RandomParam({3, 4}, rng), w = RandomParam({4, 5}, rng),
            b = RandomParam({5}, rng);
    EXPECT_LT(GradCheck([&] { return Readout(Dense(x, w, b), seed); }, {x, w, b}), kGradTol);
  }
}

TEST(ConvTest, IdentityKernel) {
  Rng rng(4);
  DTensor x = RandomConst({3, 5, 2}, rng);
  DTensor w = DTensor::Constant({1, 1, 2, 2}, {1, 0, 0, 1});
  EXPECT_EQ(Vals(Conv2d(x, w, DTensor(), 1, 1)), Vals(x));
  EXPECT_EQ(Vals(Deconv2d(x, w, DTensor(), 1, 1, 3, 5)), Vals(x));
}

TEST(ConvTest, EncoderFrequencySizes) {
  std::vector<size_t> sizes{257};
  const size_t kf = 3;
  for (int layer = 0; layer < 3; ++layer) sizes.push_back(SamePadding(sizes.back(), kf, 2).out);
  EXPECT_EQ(sizes, (std::vector<size_t>{257, 129, 65, 33}));
  // Time axis is preserved with stride 1 for both kernel heights.
  EXPECT_EQ(SamePadding(7, 1, 1).out, 7u);
  EXPECT_EQ(SamePadding(7, 2, 1).out, 7u);

  Rng rng(5);
  DTensor x = RandomConst({4, 257, 2}, rng);
  DTensor h1 = Conv2d(x, RandomConst({1, 3, 2, 3}, rng), DTensor(), 1, 2);
  DTensor h2 = Conv2d(h1, RandomConst({2, 3, 3, 3}, rng), DTensor(), 1, 2);
  DTensor h3 = Conv2d(h2, RandomConst({2, 3, 3, 3}, rng), DTensor(), 1, 2);
  EXPECT_EQ(h1.shape(), (Shape{4, 129, 3}));
  EXPECT_EQ(h2.shape(), (Shape{4, 65, 3}));
  EXPECT_EQ(h3.shape(), (Shape{4, 33, 3}));
  DTensor u2 = Deconv2d(h3, RandomConst({2, 3, 3, 3}, rng), DTensor(), 1, 2, 4, 65);
  DTensor u1 = Deconv2d(u2, RandomConst({2, 3, 3, 3}, rng), DTensor(), 1, 2, 4, 129);
  DTensor u0 = Deconv2d(u1, RandomConst({1, 3, 1, 3}, rng), DTensor(), 1, 2, 4, 257);
  EXPECT_EQ(u0.shape(), (Shape{4, 257, 1}));
}

TEST(ConvTest, DeconvRejectsInconsistentOutputShape) {
  Rng rng(6);
  DTensor y = RandomConst({4, 33, 2}, rng);
  DTensor w = RandomConst({2, 3, 2, 2}, rng);
  EXPECT_THROW(Deconv2d(y, w, DTensor(), 1, 2, 4, 70), Error);
  EXPECT_THROW(Conv2d(y, w, DTensor(), 0, 2), Error);
}

TEST(ConvTest, AdjointIdentity) {
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(100 + seed);
    const size_t t = 2 + seed % 4, f = 5 + seed % 7, cin = 1 + seed % 3, cout = 1 + seed % 2;
    const size_t kt = 1 + seed % 2, kf = 3, sf = 1 + seed % 2;
    DTensor x = RandomConst({t, f, cin}, rng);
    DTensor w = RandomConst({kt, kf, cin, cout}, rng);
    DTensor cx = Conv2d(x, w, DTensor(), 1, sf);
    DTensor y = RandomConst(cx.shape(), rng);
    DTensor dy = Deconv2d(y, w, DTensor(), 1, sf, t, f);
    const double lhs = std::inner_product(cx.values().begin(), cx.values().end(),
                                          y.values().begin(), 0.0);
    const double rhs = std::inner_product(x.values().begin(), x.values().end(),
                                          dy.values().begin(), 0.0);
    EXPECT_NEAR(lhs, rhs, 1e-9 * std::max(1.0, std::abs(lhs))) << "seed " << seed;
  }
}

TEST(ConvTest, GradCheck) {
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(200 + seed);
    DTensor x = RandomParam({4, 6, 2}, rng), w = RandomParam({2, 3, 2, 3}, rng),
            b = RandomParam({3}, rng);
    EXPECT_LT(GradCheck([&] { return Readout(Conv2d(x, w, b, 1, 2), seed); }, {x, w, b}),
              kGradTol);
  }
}

TEST(ConvTest, DeconvGradCheck) {
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(300 + seed);
    DTensor y = RandomParam({4, 3, 3}, rng), w = RandomParam({2, 3, 2, 3}, rng),
            b = RandomParam({2}, rng);
    EXPECT_LT(GradCheck([&] { return Readout(Deconv2d(y, w, b, 1, 2, 4, 6), seed); },
                        {y, w, b}),
              kGradTol);
  }
}

struct LstmWeights {
  DTensor wx, wh, b;
};

LstmWeights RandomLstm(size_t in, size_t h, Rng& rng, bool param) {
  auto make = [&](Shape s) { return param ? RandomParam(s, rng, 0.5) : RandomConst(s, rng, 0.5); };
  return {make({in, 4 * h}), make({h, 4 * h}), make({4 * h})};
}

TEST(LstmTest, ZeroWeightsGiveZeroOutput) {
  DTensor x = DTensor::Full({6, 3}, 0.7);
  DTensor out = Lstm(x, DTensor::Zeros({3, 8}), DTensor::Zeros({2, 8}),
                     DTensor::Zeros({8}), false);
  for (double v : out.values()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(out.shape(), (Shape{6, 2}));
}

TEST(LstmTest, TimeReversalSwapsDirections) {
  Rng rng(7);
  const size_t steps = 6, in = 3, h = 4;
  DTensor x = RandomConst({steps, in}, rng);
  std::vector<double> rev(x.size());
  for (size_t t = 0; t < steps; ++t) {
    for (size_t k = 0; k < in; ++k) rev[t * in + k] = x.values()[(steps - 1 - t) * in + k];
  }
  DTensor xr = DTensor::Constant({steps, in}, rev);
  LstmWeights a = RandomLstm(in, h, rng, false), b = RandomLstm(in, h, rng, false);
  DTensor fwd = Lstm(x, a.wx, a.wh, a.b, false);
  DTensor bwd = Lstm(x, b.wx, b.wh, b.b, true);
  // Reversed input with the weight sets swapped.
  DTensor fwd_r = Lstm(xr, b.wx, b.wh, b.b, false);
  DTensor bwd_r = Lstm(xr, a.wx, a.wh, a.b, true);
  for (size_t t = 0; t < steps; ++t) {
    for (size_t k = 0; k < h; ++k) {
      EXPECT_NEAR(fwd_r.values()[t * h + k], bwd.values()[(steps - 1 - t) * h + k], 1e-12);
      EXPECT_NEAR(bwd_r.values()[t * h + k], fwd.values()[(steps - 1 - t) * h + k], 1e-12);
    }
  }
}

TEST(LstmTest, GradCheckFiveSteps) {
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(400 + seed);
    DTensor x = RandomParam({5, 3}, rng);
    LstmWeights w = RandomLstm(3, 4, rng, true);
    const bool reverse = seed % 2 == 1;
    EXPECT_LT(GradCheck([&] { return Readout(Lstm(x, w.wx, w.wh, w.b, reverse), seed); },
                        {x, w.wx, w.wh, w.b}),
              kGradTol)
        << "seed " << seed;
  }
}

TEST(BatchNormTest, ConstantInputGivesBeta) {
  BatchNormState<double> state(2);
  DTensor x = DTensor::Full({4, 3, 2}, 1.7);
  DTensor y = BatchNorm(x, DTensor::Full({2}, 1.0), DTensor::Full({2}, 5.0), &state,
                        Mode::kTrain);
  for (double v : y.values()) EXPECT_DOUBLE_EQ(v, 5.0);
}

TEST(BatchNormTest, TrainStatisticsAndRunningUpdate) {
  Rng rng(8);
  BatchNormState<double> state(3);
  std::vector<double> v(5 * 7 * 3);
  for (size_t i = 0; i < v.size(); ++i) v[i] = 3.0 + 2.0 * rng.Normal() + double(i % 3);
  DTensor x = DTensor::Constant({5, 7, 3}, v);
  DTensor y = BatchNorm(x, DTensor::Full({3}, 1.0), DTensor::Full({3}, 0.0), &state,
                        Mode::kTrain);
  for (size_t k = 0; k < 3; ++k) {
    double m = 0, s = 0, bm = 0;
    for (size_t i = 0; i < 35; ++i) {
      m += y.values()[i * 3 + k];
      bm += v[i * 3 + k];
    }
    m /= 35;
    bm /= 35;
    for (size_t i = 0; i < 35; ++i) s += std::pow(y.values()[i * 3 + k] - m, 2);
    EXPECT_NEAR(m, 0.0, 1e-12);
    EXPECT_NEAR(s / 35, 1.0, 1e-4);
    EXPECT_NEAR(state.running_mean[k], 0.01 * bm, 1e-12);
  }
  // Eval mode uses the running statistics.
  DTensor e = BatchNorm(x, DTensor::Full({3}, 1.0), DTensor::Full({3}, 0.0), &state,
                        Mode::kEval);
  EXPECT_NEAR(e.values()[0],
              (v[0] - state.running_mean[0]) / std::sqrt(state.running_var[0] + state.eps),
              1e-12);
}

TEST(BatchNormTest, GradCheck) {
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(500 + seed);
    BatchNormState<double> state(2);
    DTensor x = RandomParam({3, 4, 2}, rng), g = RandomParam({2}, rng),
            b = RandomParam({2}, rng);
    const Mode mode = seed % 4 == 3 ? Mode::kEval : Mode::kTrain;
    EXPECT_LT(GradCheck([&] { return Readout(BatchNorm(x, g, b, &state, mode), seed); },
                        {x, g, b}),
              kGradTol);
  }
}

TEST(MaxPoolTest, Examples) {
  DTensor x = DTensor::Constant({4}, {1, 3, 2, 5});
  EXPECT_EQ(Vals(MaxPool1d(x, 2, 2)), (std::vector<double>{3, 5}));
  EXPECT_EQ(MaxPool1d(DTensor::Zeros({410}), 10, 10).size(), 41u);
  EXPECT_THROW(MaxPool1d(x, 5, 5), Error);
}

TEST(MaxPoolTest, GradientRoutesToArgmax) {
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(600 + seed);
    DTensor x = RandomParam({40}, rng);
    EXPECT_LT(GradCheck([&] { return Readout(MaxPool1d(x, 10, 10), seed); }, {x}), kGradTol);
    for (size_t w = 0; w < 4; ++w) {
      const auto begin = x.values().begin() + w * 10;
      const size_t arg = std::max_element(begin, begin + 10) - x.values().begin();
      for (size_t i = w * 10; i < w * 10 + 10; ++i) {
        if (i != arg) EXPECT_EQ(x.grad()[i], 0.0);
      }
    }
  }
}

TEST(ActivationTest, Values) {
  EXPECT_EQ(Elu(DTensor::Constant({1}, {0.0})).item(), 0.0);
  EXPECT_EQ(Relu(DTensor::Constant({1}, {-1.0})).item(), 0.0);
  EXPECT_EQ(Sigmoid(DTensor::Constant({1}, {0.0})).item(), 0.5);
  DTensor s = Softmax(DTensor::Full({41}, 2.5));
  for (double v : s.values()) EXPECT_NEAR(v, 1.0 / 41, 1e-15);
  EXPECT_NEAR(Sigmoid(DTensor::Constant({1}, {-800.0})).item(), 0.0, 1e-300);
}

TEST(ActivationTest, SoftmaxRowsSumToOne) {
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(700 + seed);
    DTensor s = Softmax(RandomConst({3, 41}, rng, 10.0));
    for (size_t r = 0; r < 3; ++r) {
      double total = 0;
      for (size_t k = 0; k < 41; ++k) total += s.values()[r * 41 + k];
      EXPECT_NEAR(total, 1.0, 1e-9);
    }
  }
}

TEST(ActivationTest, GradCheck) {
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(800 + seed);
    // Keep entries away from the kinks at 0.
    std::vector<double> v(12);
    for (double& x : v) {
      x = rng.Normal();
      if (std::abs(x) < 1e-2) x = 0.5;
    }
    DTensor x = DTensor::Parameter({3, 4}, v);
    EXPECT_LT(GradCheck([&] { return Readout(Elu(x), seed); }, {x}), kGradTol);
    EXPECT_LT(GradCheck([&] { return Readout(Relu(x), seed); }, {x}), kGradTol);
    EXPECT_LT(GradCheck([&] { return Readout(Sigmoid(x), seed); }, {x}), kGradTol);
    EXPECT_LT(GradCheck([&] { return Readout(Softmax(x), seed); }, {x}), kGradTol);
  }
}

TEST(ActivationTest, RectifiedPower) {
  DTensor x = DTensor::Constant({3}, {-2.0, 0.5, 2.0});
  EXPECT_EQ(Vals(RectifiedPower(x, 3.0)), (std::vector<double>{0.0, 0.125, 8.0}));
  EXPECT_THROW(RectifiedPower(x, 0.5), Error);
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(850 + seed);
    std::vector<double> v(12);
    for (double& e : v) {
      e = rng.Normal();
      if (std::abs(e) < 1e-2) e = 0.5;
    }
    DTensor p = DTensor::Parameter({12}, v);
    EXPECT_LT(GradCheck([&] { return Readout(RectifiedPower(p, 1.0 + seed % 8), seed); }, {p}),
              kGradTol);
  }
}

TEST(DropoutTest, IdentityCases) {
  Rng rng(9);
  DTensor x = RandomConst({100}, rng);
  EXPECT_EQ(Vals(Dropout(x, 0.5, Mode::kEval, 1)), Vals(x));
  EXPECT_EQ(Vals(Dropout(x, 0.0, Mode::kTrain, 1)), Vals(x));
  EXPECT_THROW(Dropout(x, 1.0, Mode::kTrain, 1), Error);
}

TEST(DropoutTest, SurvivorFractionAndScaling) {
  DTensor x = DTensor::Full({100000}, 1.0);
  DTensor y = Dropout(x, 0.5, Mode::kTrain, 42);
  size_t kept = 0;
  for (double v : y.values()) {
    if (v != 0.0) {
      ++kept;
      EXPECT_DOUBLE_EQ(v, 2.0);
    }
  }
  EXPECT_NEAR(kept / 1e5, 0.5, 0.01);
  EXPECT_EQ(Vals(Dropout(x, 0.5, Mode::kTrain, 42)), Vals(y));
}

TEST(DropoutTest, GradCheck) {
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(900 + seed);
    DTensor x = RandomParam({20}, rng);
    EXPECT_LT(GradCheck([&] { return Readout(Dropout(x, 0.2, Mode::kTrain, seed), seed); }, {x}),
              kGradTol);
  }
}

TEST(LossTest, MseExamples) {
  Rng rng(10);
  DTensor t = RandomConst({4, 5}, rng);
  EXPECT_EQ(MseLoss(t, t).item(), 0.0);
  std::vector<double> shifted = Vals(t);
  for (double& v : shifted) v += 2.0;
  DTensor p = DTensor::Parameter({4, 5}, shifted);
  DTensor loss = MseLoss(p, t);
  EXPECT_NEAR(loss.item(), 4.0, 1e-12);
  Backward(loss);
  for (double g : p.grad()) EXPECT_NEAR(g, 2.0 * 2.0 / 20, 1e-12);
  EXPECT_THROW(MseLoss(p, DTensor::Zeros({20})), Error);
}

TEST(LossTest, CrossEntropyExamples) {
  std::vector<double> onehot(41, 0.0);
  onehot[7] = 1.0;
  EXPECT_NEAR(CrossEntropyLoss(DTensor::Constant({41}, onehot), 7).item(), 0.0, 1e-9);
  DTensor uniform = DTensor::Full({41}, 1.0 / 41);
  EXPECT_NEAR(CrossEntropyLoss(uniform, 3).item(), std::log(41.0), 1e-8);
  EXPECT_NEAR(std::log(41.0), 3.7136, 1e-4);
  EXPECT_THROW(CrossEntropyLoss(uniform, 41), Error);
  EXPECT_THROW(CrossEntropyLoss(uniform, -1), Error);
}

TEST(LossTest, FocalExamples) {
  std::vector<double> onehot(41, 0.0);
  onehot[0] = 1.0;
  EXPECT_NEAR(FocalLoss(DTensor::Constant({41}, onehot), 0, 2.0, {}).item(), 0.0, 1e-9);
  std::vector<double> half(41, 0.5 / 40);
  half[5] = 0.5;
  const double f = FocalLoss(DTensor::Constant({41}, half), 5, 2.0, {}).item();
  EXPECT_NEAR(f, 0.25 * std::log(2.0), 1e-9);
  EXPECT_NEAR(f, 0.1733, 1e-4);
  std::vector<double> alpha(41, 1.0);
  alpha[5] = 3.0;
  EXPECT_NEAR(FocalLoss(DTensor::Constant({41}, half), 5, 2.0, alpha).item(), 3 * f, 1e-12);
  EXPECT_THROW(FocalLoss(DTensor::Constant({41}, half), 5, -1.0, {}), Error);
}

TEST(LossTest, FocalWithGammaZeroIsCrossEntropy) {
  std::vector<double> ones(41, 1.0);
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(1000 + seed);
    DTensor p = Softmax(RandomConst({41}, rng));
    const int cls = seed % 41;
    EXPECT_EQ(FocalLoss(p, cls, 0.0, ones).item(), CrossEntropyLoss(p, cls).item());
  }
}

TEST(LossTest, ClassificationGradCheck) {
  std::vector<double> alpha(7);
  for (size_t i = 0; i < alpha.size(); ++i) alpha[i] = 0.5 + 0.1 * i;
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(1100 + seed);
    DTensor z = RandomParam({7}, rng);
    const int cls = seed % 7;
    EXPECT_LT(GradCheck([&] { return CrossEntropyLoss(Softmax(z), cls); }, {z}), kGradTol);
    EXPECT_LT(GradCheck([&] { return FocalLoss(Softmax(z), cls, 2.0, alpha); }, {z}), kGradTol);
  }
}

TEST(ShapeOpsTest, GradCheck) {
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(1200 + seed);
    DTensor a = RandomParam({3, 2, 2}, rng), b = RandomParam({3, 2, 3}, rng),
            c = RandomParam({2, 2, 2}, rng), v = RandomParam({9}, rng);
    EXPECT_LT(GradCheck([&] { return Readout(ConcatLast(a, b), seed); }, {a, b}), kGradTol);
    EXPECT_LT(GradCheck([&] { return Readout(ConcatRows<double>({a, c, a}), seed); }, {a, c}),
              kGradTol);
    EXPECT_LT(GradCheck([&] { return Readout(SliceRows(a, 1, 2), seed); }, {a}), kGradTol);
    EXPECT_LT(GradCheck([&] { return Readout(Reshape(a, {6, 2}), seed); }, {a}), kGradTol);
    EXPECT_LT(GradCheck([&] { return Readout(Slice1d(v, 4, 8), seed); }, {v}), kGradTol);
    EXPECT_LT(GradCheck([&] { return Readout(Add(a, Scale(a, -0.3)), seed); }, {a}), kGradTol);
  }
  DTensor v = DTensor::Constant({3}, {1, 2, 3});
  EXPECT_EQ(Vals(Slice1d(v, 1, 4)), (std::vector<double>{2, 3, 0, 0}));
  EXPECT_THROW(Reshape(v, {2, 2}), Error);
}

TEST(CrossCorrelateOpTest, MatchesSignalCore) {
  Rng rng(11);
  DTensor a = RandomConst({300}, rng), b = RandomConst({280}, rng);
  Waveform wa({a.values().begin(), a.values().end()}, 16000);
  Waveform wb({b.values().begin(), b.values().end()}, 16000);
  for (bool norm : {false, true}) {
    const std::vector<double> ref = aeclab::CrossCorrelate(wa, wb, 40, norm);
    DTensor got = CrossCorrelate(a, b, 40, norm);
    for (size_t l = 0; l <= 40; ++l) EXPECT_NEAR(got.values()[l], ref[l], 1e-9);
  }
  EXPECT_THROW(CrossCorrelate(a, b, 280, true), Error);
}

TEST(CrossCorrelateOpTest, GradCheck) {
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(1300 + seed);
    DTensor a = RandomParam({30}, rng), b = RandomParam({34}, rng);
    const bool norm = seed % 2 == 0;
    EXPECT_LT(GradCheck([&] { return Readout(CrossCorrelate(a, b, 9, norm), seed); }, {a, b}),
              kGradTol);
  }
}

TEST(MaskedIstftTest, MatchesApplyMaskThenIstft) {
  Rng rng(12);
  std::vector<double> s(2000);
  for (double& v : s) v = rng.Normal();
  const Spectrogram spec = Stft(Waveform(s, 16000));
  std::vector<double> m(spec.num_frames * spec.num_bins);
  for (double& v : m) v = rng.Uniform();
  TfMask mask(spec.num_frames, spec.num_bins);
  mask.values = m;
  const Waveform ref = Istft(ApplyMask(spec, mask));
  DTensor got = MaskedIstft(DTensor::Constant({spec.num_frames, spec.num_bins}, m), spec);
  ASSERT_EQ(got.size(), ref.size());
  for (size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(got.values()[i], ref.samples[i], 1e-12);
}

TEST(MaskedIstftTest, GradCheck) {
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(1400 + seed);
    std::vector<double> s(900 + 37 * seed);
    for (double& v : s) v = rng.Normal();
    const Spectrogram spec = Stft(Waveform(s, 16000));
    std::vector<double> m(spec.num_frames * spec.num_bins);
    for (double& v : m) v = rng.Uniform();
    DTensor mask = DTensor::Parameter({spec.num_frames, spec.num_bins}, m);
    EXPECT_LT(GradCheck([&] { return Readout(MaskedIstft(mask, spec), seed); }, {mask}),
              kGradTol);
  }
}

TEST(MaskedLogMagnitudeTest, ValuesAndGradCheck) {
  std::vector<double> mag{1.0, std::exp(1.0) - 1e-7, 0.0};
  DTensor ones = DTensor::Full({3}, 1.0);
  DTensor y = MaskedLogMagnitude<double>(ones, mag, 1e-7);
  EXPECT_NEAR(y.values()[0], 0.0, 1e-6);
  EXPECT_NEAR(y.values()[1], 1.0, 1e-12);
  EXPECT_NEAR(y.values()[2], std::log(1e-7), 1e-12);
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(1500 + seed);
    std::vector<double> m(20), a(20);
    for (size_t i = 0; i < 20; ++i) {
      m[i] = 0.05 + 0.9 * rng.Uniform();
      a[i] = std::abs(rng.Normal()) + 0.1;
    }
    DTensor mask = DTensor::Parameter({4, 5}, m);
    EXPECT_LT(GradCheck([&] { return Readout(MaskedLogMagnitude<double>(mask, a, 1e-7), seed); },
                        {mask}),
              kGradTol);
  }
}

TEST(CompositeTest, ConvBatchNormEluDenseMse) {
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(1600 + seed);
    BatchNormState<double> state(3);
    DTensor x = RandomParam({3, 5, 2}, rng), w = RandomParam({2, 3, 2, 3}, rng),
            cb = RandomParam({3}, rng), g = RandomParam({3}, rng), be = RandomParam({3}, rng),
            dw = RandomParam({9, 4}, rng), db = RandomParam({4}, rng);
    auto f = [&] {
      DTensor h = Elu(BatchNorm(Conv2d(x, w, cb, 1, 2), g, be, &state, Mode::kTrain));
      return Readout(Dense(Reshape(h, {3, 9}), dw, db), seed);
    };
    EXPECT_LT(GradCheck(f, {x, w, cb, g, be, dw, db}), kGradTol) << "seed " << seed;
  }
}

TEST(AdamTest, ZeroGradientLeavesParameters) {
  DTensor p = DTensor::Parameter({3}, {1, 2, 3});
  Adam<double> opt({p});
  p.ZeroGrad();
  opt.Step();
  EXPECT_EQ(Vals(p), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(opt.step(), 1);
}

TEST(AdamTest, FirstStepMagnitude) {
  DTensor p = DTensor::Parameter({1}, {0.0});
  Adam<double> opt({p});
  p.mutable_grad()[0] = 1.0;
  opt.Step();
  EXPECT_NEAR(p.item(), -2e-4 / (1 + 1e-8), 1e-15);
}

TEST(AdamTest, ConstantPositiveGradientShrinksMonotonically) {
  DTensor p = DTensor::Parameter({1}, {1.0});
  Adam<double> opt({p});
  double prev = p.item();
  for (int i = 0; i < 5; ++i) {
    p.ZeroGrad();
    p.mutable_grad()[0] = 0.7;
    opt.Step();
    EXPECT_LT(p.item(), prev);
    prev = p.item();
  }
}

double TrainTinyGraph(uint64_t seed, std::vector<double>* trajectory) {
  Rng rng(seed);
  ParameterStore<float> store;
  auto w1 = store.AddGlorot("w1", {6, 8}, 6, 8, rng);
  auto b1 = store.AddConstant("b1", {8}, 0.0f);
  auto w2 = store.AddGlorot("w2", {8, 3}, 8, 3, rng);
  Adam<float> opt(store.tensors(), {.lr = 1e-2});
  std::vector<float> xv(6), tv(3);
  for (int step = 0; step < 30; ++step) {
    for (float& v : xv) v = static_cast<float>(rng.Normal());
    for (size_t k = 0; k < 3; ++k) tv[k] = 0.5f * xv[k] - xv[k + 3];
    auto x = Tensor<float>::Constant({6}, xv);
    auto h = Dropout(Relu(Dense(x, w1, b1)), 0.2, Mode::kTrain, DeriveSeed(seed, "drop", step));
    auto loss = MseLoss(Dense(h, w2, Tensor<float>()), Tensor<float>::Constant({3}, tv));
    opt.ZeroGrad();
    Backward(loss);
    opt.Step();
    trajectory->push_back(loss.item());
  }
  return trajectory->back();
}

TEST(DeterminismTest, FixedSeedGivesIdenticalTrajectory) {
  std::vector<double> a, b, c;
  TrainTinyGraph(5, &a);
  TrainTinyGraph(5, &b);
  TrainTinyGraph(6, &c);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

// Same graph, buffers at different heap offsets: gradients must not move.
TEST(DeterminismTest, GradientsIgnoreBufferAlignment) {
  std::vector<std::vector<float>> first;
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<std::unique_ptr<char[]>> junk;
    for (int j = 0; j < trial; ++j) junk.emplace_back(new char[4 * j + 4]);
    Rng rng(17);
    auto param = [&rng](Shape s) {
      size_t n = 1;
      for (size_t d : s) n *= d;
      std::vector<float> v(n);
      for (float& x : v) x = static_cast<float>(0.3 * rng.Normal());
      return Tensor<float>::Parameter(s, v);
    };
    std::vector<Tensor<float>> p = {param({7, 33}), param({33, 21}), param({21}),
                                    param({13, 44}), param({11, 44}), param({44})};
    const auto seq = Reshape(Slice1d(Reshape(p[0], {231}), 0, 117), {9, 13});
    const auto y = Add(Sum(Sigmoid(Dense(p[0], p[1], p[2]))),
                       Sum(Sigmoid(Lstm(seq, p[3], p[4], p[5], false))));
    Backward(y);
    std::vector<std::vector<float>> g;
    for (const auto& t : p) g.emplace_back(t.grad().begin(), t.grad().end());
    if (trial == 0) {
      first = g;
    } else {
      ASSERT_EQ(g, first) << "trial " << trial;
    }
  }
}

TEST(CheckpointTest, RoundTripThroughParameterStore) {
  const std::string path =
      (std::filesystem::temp_directory_path() / "aeclab_nn_ckpt_test.bin").string();
  Rng rng(13);
  ParameterStore<float> store;
  store.AddGlorot("layer/w", {3, 4}, 3, 4, rng);
  BatchNormState<float>* bn = store.AddBatchNorm("layer/bn", 4);
  bn->running_mean = {1, 2, 3, 4};
  Checkpoint ckpt;
  ckpt.config_json = R"({"config":{"a":"1"}})";
  store.Save(&ckpt);
  WriteCheckpoint(path, ckpt);

  Rng other(99);
  ParameterStore<float> loaded;
  loaded.AddGlorot("layer/w", {3, 4}, 3, 4, other);
  BatchNormState<float>* bn2 = loaded.AddBatchNorm("layer/bn", 4);
  const Checkpoint back = ReadCheckpoint(path);
  EXPECT_EQ(back.config_json, ckpt.config_json);
  loaded.Load(back);
  const auto& p0 = store.params()[0].second;
  const auto& p1 = loaded.params()[0].second;
  EXPECT_TRUE(std::equal(p0.values().begin(), p0.values().end(), p1.values().begin()));
  EXPECT_EQ(bn2->running_mean, bn->running_mean);

  ParameterStore<float> wrong;
  wrong.AddConstant("layer/w", {4, 3}, 0.0f);
  EXPECT_THROW(wrong.Load(back), Error);
  std::filesystem::remove(path);
}

TEST(CheckpointTest, RejectsForeignFiles) {
  const std::string path =
      (std::filesystem::temp_directory_path() / "aeclab_not_a_ckpt.bin").string();
  { std::ofstream(path) << "definitely not a checkpoint"; }
  EXPECT_THROW(ReadCheckpoint(path), Error);
  EXPECT_THROW(ReadCheckpoint(path + ".missing"), Error);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace aeclab::nn
