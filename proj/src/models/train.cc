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

#include "aeclab/models/train.h"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "aeclab/error.h"
#include "aeclab/nn/checkpoint.h"
#include "aeclab/random.h"
#include "aeclab/signal/stft.h"

namespace aeclab {
namespace {

using nn::Mode;

std::vector<Real> Magnitudes(const Spectrogram& s) {
  std::vector<Real> m(s.bins.size());
  for (size_t i = 0; i < m.size(); ++i) m[i] = static_cast<Real>(std::abs(s.bins[i]));
  return m;
}

RTensor LogMagTarget(const Waveform& w, const ModelConfig& c) {
  const Spectrogram s = Stft(w, c.win_len, c.hop);
  std::vector<Real> v(s.bins.size());
  for (size_t i = 0; i < v.size(); ++i) {
    v[i] = static_cast<Real>(std::log(std::abs(s.bins[i]) + kLogMagnitudeEps));
  }
  return RTensor::Constant({s.num_frames, s.num_bins}, std::move(v));
}

nlohmann::json KeysToJson(const KeyValues& kv) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : kv) j[k] = v;
  return j;
}

KeyValues JsonToKeys(const nlohmann::json& j) {
  KeyValues kv;
  for (const auto& [k, v] : j.items()) kv[k] = v.get<std::string>();
  return kv;
}

std::vector<std::string> ReadLogRows(const std::string& path, int max_epoch) {
  std::vector<std::string> rows;
  std::ifstream in(path);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    if (std::stoi(line.substr(0, line.find(','))) <= max_epoch) rows.push_back(line);
  }
  return rows;
}

}  // namespace

std::string FormatEpochRow(const EpochMetrics& m) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g,%.6g,%.6g,%.3f", m.epoch, m.enhance_mse,
                m.delay_loss, m.echo_aux, m.delay_top1, m.delay_within1, m.wall_seconds);
  return buf;
}

std::vector<double> FocalAlpha(const Manifest& manifest, int classes) {
  std::vector<double> count(classes, 1.0);
  for (const MixtureRecord& r : manifest.records) {
    if (r.delay_class < 0 || r.delay_class >= classes) {
      throw Error("record " + r.id + " has delay class " + std::to_string(r.delay_class) +
                  " outside the grid");
    }
    count[r.delay_class] += 1.0;
  }
  double mean = 0.0;
  for (double& c : count) {
    c = 1.0 / c;
    mean += c;
  }
  mean /= classes;
  for (double& c : count) c /= mean;
  return count;
}

LossReport TrainStep(const AecModel& model, const MixtureSignals& signals,
                     const TrainSchedule& schedule, std::span<const double> focal_alpha,
                     uint64_t step, nn::Adam<Real>* optimizer,
                     const std::vector<double>* delay_features) {
  const ModelConfig& c = model.config();
  const int true_class = signals.delay_class;
  const int forced =
      schedule.compensation == "oracle" ? c.delay.pool * std::min(true_class, c.delay.classes - 1)
                                        : -1;
  const ModelGraph g = model.Build(signals.mic, signals.ref, Mode::kTrain,
                                   DeriveSeed(schedule.seed, "dropout", step), forced,
                                   MaskProbe::kNone, MaskProbe::kNone, delay_features);
  LossReport report;
  report.predicted_class = g.predicted_class;
  RTensor total;
  auto accumulate = [&total](const RTensor& term, double weight) {
    if (weight == 0.0) return;
    const RTensor scaled = nn::Scale(term, weight);
    total = total.defined() ? nn::Add(total, scaled) : scaled;
  };
  const std::vector<Real> mic_mag = Magnitudes(g.mic_spec);
  if (g.enhance_mask.defined()) {
    const RTensor enh = nn::MaskedLogMagnitude<Real>(g.enhance_mask, mic_mag, kLogMagnitudeEps);
    const RTensor loss = nn::MseLoss(enh, LogMagTarget(signals.near, c));
    report.enhance_mse = loss.item();
    accumulate(loss, c.loss_weights[0]);
  }
  if (g.delay_probs.defined()) {
    if (true_class < 0 || true_class >= c.delay.classes) {
      throw Error("delay class " + std::to_string(true_class) + " outside the model's grid");
    }
    const RTensor loss =
        schedule.delay_loss == "focal"
            ? nn::FocalLoss(g.delay_probs, true_class, schedule.focal_gamma, focal_alpha)
            : nn::CrossEntropyLoss(g.delay_probs, true_class);
    report.delay_loss = loss.item();
    // The delay-only model has nothing else to train.
    accumulate(loss, c.kind == ModelKind::kDelayNet ? 1.0 : c.loss_weights[1]);
  }
  if (g.echo_mask.defined() && c.aux_weight > 0.0) {
    if (signals.echo.empty()) throw Error("auxiliary echo loss needs the true echo");
    const RTensor est = nn::MaskedLogMagnitude<Real>(g.echo_mask, mic_mag, kLogMagnitudeEps);
    const RTensor loss = nn::MseLoss(est, LogMagTarget(signals.ScaledEcho(), c));
    report.echo_aux = loss.item();
    accumulate(loss, c.aux_weight);
  }
  if (total.defined()) report.total = total.item();
  if (optimizer != nullptr && total.defined()) {
    optimizer->ZeroGrad();
    nn::Backward(total);
    optimizer->Step();
  }
  return report;
}

void SaveModel(const std::string& path, const AecModel& model, const TrainSchedule& schedule,
               nn::Adam<Real>* optimizer, const TrainingState& state) {
  nn::Checkpoint ckpt;
  nlohmann::json meta;
  meta["config"] = KeysToJson(ModelConfigToKeys(model.config()));
  meta["schedule"] = KeysToJson(ScheduleToKeys(schedule));
  meta["state"] = {{"epoch", state.epoch}, {"adam_step", state.adam_step}};
  ckpt.config_json = meta.dump();
  model.store().Save(&ckpt);
  if (optimizer != nullptr) {
    const auto& params = model.store().params();
    for (size_t i = 0; i < params.size(); ++i) {
      const auto& m = optimizer->first_moments()[i];
      const auto& v = optimizer->second_moments()[i];
      ckpt.arrays.push_back({"adam.m:" + params[i].first, params[i].second.shape(), m});
      ckpt.arrays.push_back({"adam.v:" + params[i].first, params[i].second.shape(), v});
    }
  }
  // Write-then-rename so an interrupted save never clobbers the last good file.
  const std::string tmp = path + ".tmp";
  nn::WriteCheckpoint(tmp, ckpt);
  std::filesystem::rename(tmp, path);
}

namespace {

struct Loaded {
  nn::Checkpoint ckpt;
  ModelConfig config;
  TrainSchedule schedule;
  TrainingState state;
};

Loaded ReadModelCheckpoint(const std::string& path) {
  Loaded l;
  l.ckpt = nn::ReadCheckpoint(path);
  try {
    const auto meta = nlohmann::json::parse(l.ckpt.config_json);
    l.config = ModelConfigFromKeys(JsonToKeys(meta.at("config")));
    KeyReader r(JsonToKeys(meta.at("schedule")));
    ReadScheduleKeys(r, &l.schedule);
    r.Finish();
    l.state.epoch = meta.at("state").at("epoch").get<int>();
    l.state.adam_step = meta.at("state").at("adam_step").get<int64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error("bad checkpoint metadata in " + path + ": " + e.what());
  }
  return l;
}

void RestoreOptimizer(const nn::Checkpoint& ckpt, const AecModel& model, nn::Adam<Real>* opt,
                      int64_t step) {
  const auto& params = model.store().params();
  for (size_t i = 0; i < params.size(); ++i) {
    const nn::Shape& shape = params[i].second.shape();
    const auto& m = ckpt.Get("adam.m:" + params[i].first, shape);
    const auto& v = ckpt.Get("adam.v:" + params[i].first, shape);
    opt->first_moments()[i].assign(m.data.begin(), m.data.end());
    opt->second_moments()[i].assign(v.data.begin(), v.data.end());
  }
  opt->set_step(step);
}

}  // namespace

std::unique_ptr<AecModel> LoadModel(const std::string& path, TrainSchedule* schedule,
                                    TrainingState* state) {
  Loaded l = ReadModelCheckpoint(path);
  auto model = std::make_unique<AecModel>(l.config, l.schedule.seed);
  model->store().Load(l.ckpt);
  if (schedule) *schedule = l.schedule;
  if (state) *state = l.state;
  return model;
}

TrainResult TrainRun(const Manifest& manifest, const ModelConfig& config,
                     const TrainSchedule& schedule, const TrainPaths& paths,
                     const std::function<void(const EpochMetrics&)>& on_epoch) {
  if (manifest.records.empty()) throw Error("training manifest has no records");
  size_t n = manifest.records.size();
  if (schedule.max_records > 0) n = std::min(n, size_t(schedule.max_records));
  std::vector<MixtureSignals> data;
  data.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    try {
      data.push_back(RenderRecord(manifest.records[i], manifest.config));
    } catch (const Error& e) {
      throw Error("record " + manifest.records[i].id + ": " + e.what());
    }
  }
  const std::vector<double> alpha = FocalAlpha(manifest, config.delay.classes);
  // The delay-only model's inputs never change, so compute them once.
  std::vector<std::vector<double>> features;
  if (config.kind == ModelKind::kDelayNet) {
    for (const MixtureSignals& s : data) {
      features.push_back(DelayFeatures(s.mic, s.ref, config.delay));
    }
  }

  TrainResult result;
  result.model = std::make_unique<AecModel>(config, schedule.seed);
  AecModel& model = *result.model;
  nn::AdamOptions opts{schedule.lr, schedule.beta1, schedule.beta2, schedule.adam_eps};
  nn::Adam<Real> adam(model.store().tensors(), opts);

  int start_epoch = 0;
  std::vector<std::string> log_rows;
  if (!paths.resume.empty()) {
    Loaded l = ReadModelCheckpoint(paths.resume);
    if (ModelConfigToKeys(l.config) != ModelConfigToKeys(config)) {
      throw Error("checkpoint " + paths.resume + " was trained with a different model config");
    }
    model.store().Load(l.ckpt);
    RestoreOptimizer(l.ckpt, model, &adam, l.state.adam_step);
    start_epoch = l.state.epoch;
    if (!paths.log.empty() && std::filesystem::exists(paths.log)) {
      log_rows = ReadLogRows(paths.log, start_epoch);
    }
  }

  auto write_log = [&] {
    if (paths.log.empty()) return;
    std::ofstream out(paths.log);
    out << kTrainLogHeader << "\n";
    for (const auto& row : log_rows) out << row << "\n";
    if (!out) throw Error("cannot write training log " + paths.log);
  };
  write_log();
  if (!paths.checkpoint.empty() && start_epoch >= schedule.epochs) {
    SaveModel(paths.checkpoint, model, schedule, &adam, {start_epoch, adam.step()});
  }

  const auto t0 = std::chrono::steady_clock::now();
  for (int epoch = start_epoch + 1; epoch <= schedule.epochs; ++epoch) {
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(DeriveSeed(schedule.seed, "order", epoch));
    for (size_t i = n; i > 1; --i) {
      std::swap(order[i - 1], order[rng.UniformInt(0, int64_t(i) - 1)]);
    }
    EpochMetrics m;
    m.epoch = epoch;
    for (size_t idx : order) {
      const MixtureSignals& s = data[idx];
      const LossReport r = TrainStep(model, s, schedule, alpha, uint64_t(adam.step()), &adam,
                                     features.empty() ? nullptr : &features[idx]);
      m.enhance_mse += r.enhance_mse;
      m.delay_loss += r.delay_loss;
      m.echo_aux += r.echo_aux;
      m.delay_top1 += r.predicted_class == s.delay_class;
      m.delay_within1 += std::abs(r.predicted_class - s.delay_class) <= 1;
      if (!std::isfinite(r.total)) {
        throw Error("non-finite loss at epoch " + std::to_string(epoch) + " on record " +
                    manifest.records[idx].id);
      }
    }
    m.enhance_mse /= n;
    m.delay_loss /= n;
    m.echo_aux /= n;
    m.delay_top1 /= n;
    m.delay_within1 /= n;
    m.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.epochs.push_back(m);
    log_rows.push_back(FormatEpochRow(m));
    write_log();
    if (!paths.checkpoint.empty()) {
      SaveModel(paths.checkpoint, model, schedule, &adam, {epoch, adam.step()});
    }
    if (on_epoch) on_epoch(m);
  }
  return result;
}

}  // namespace aeclab
