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

#include "aeclab/harness/experiments.h"

#include <algorithm>
#include <array>
#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <thread>

#include "aeclab/classical/nlms.h"
#include "aeclab/error.h"
#include "aeclab/random.h"
#include "aeclab/signal/metrics.h"

namespace aeclab {
namespace {

uint64_t Fnv1a(const std::string& text, uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string Hex(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, v);
  return buf;
}

std::string PortionLabel(double p) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", p);
  return buf;
}

ExperimentReport NewReport(const std::string& name, const HarnessConfig& config) {
  ExperimentReport r;
  r.experiment = name;
  r.seed = config.data.seed;
  r.config = HarnessConfigToKeys(config);
  return r;
}

const char kEnhancementNote[] =
    "erle_db is measured on single-talk renders (near-end muted); si_sdr_db on double-talk "
    "mixtures against the near-end, as a non-paper proxy for PESQ; 'mean' rows average the "
    "per-SER means";

Enhancer ModelEnhancer(const AecModel& model) {
  return [&model](const Waveform& mic, const Waveform& ref) { return model.Run(mic, ref).enhanced; };
}

Enhancer EcdeEnhancer(const EcdeConfig& config) {
  return [config](const Waveform& mic, const Waveform& ref) {
    return EcdePipeline(mic, ref, config).residual;
  };
}

}  // namespace

void ParallelFor(size_t n, int workers, const std::function<void(size_t)>& fn) {
  size_t threads = workers > 0 ? size_t(workers) : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

ModelStore::ModelStore(std::string dir, bool train_missing,
                       std::function<void(const std::string&)> log)
    : dir_(std::move(dir)), train_missing_(train_missing), log_(std::move(log)) {}

std::string ModelStore::PathFor(const std::string& tag, const Manifest& manifest,
                                const ModelConfig& config, const TrainSchedule& schedule) const {
  uint64_t h = Fnv1a(ManifestRecordsToJsonl(manifest));
  h = Fnv1a(FormatKeyValues(DatasetConfigToKeys(manifest.config)), h);
  h = Fnv1a(FormatKeyValues(manifest.notes), h);
  h = Fnv1a(FormatKeyValues(ModelConfigToKeys(config)), h);
  h = Fnv1a(FormatKeyValues(ScheduleToKeys(schedule)), h);
  return (std::filesystem::path(dir_) / (tag + "-" + Hex(h) + ".ckpt")).string();
}

std::unique_ptr<AecModel> ModelStore::Obtain(const std::string& tag, const Manifest& manifest,
                                             const ModelConfig& config,
                                             const TrainSchedule& schedule) {
  TrainPaths paths;
  if (!dir_.empty()) {
    paths.checkpoint = PathFor(tag, manifest, config, schedule);
    if (std::filesystem::exists(paths.checkpoint)) {
      if (log_) log_("loading " + tag + " from " + paths.checkpoint);
      return LoadModel(paths.checkpoint);
    }
  }
  if (!train_missing_) {
    throw Error("missing trained checkpoint for " + tag +
                (paths.checkpoint.empty() ? std::string() : " (expected " + paths.checkpoint + ")"));
  }
  if (!dir_.empty()) {
    std::filesystem::create_directories(dir_);
    paths.log = paths.checkpoint.substr(0, paths.checkpoint.size() - 5) + ".log.csv";
  }
  if (log_) {
    log_("training " + tag + " on " + std::to_string(manifest.records.size()) + " records, " +
         std::to_string(schedule.epochs) + " epochs");
  }
  auto on_epoch = [&](const EpochMetrics& m) {
    if (log_) log_(tag + " " + FormatEpochRow(m));
  };
  return TrainRun(manifest, config, schedule, paths, on_epoch).model;
}

std::vector<int> EstimateDelays(const Manifest& manifest, const std::string& estimator,
                                const AecModel* model, int d_max, int workers) {
  if (estimator == "learned" || estimator == "multitask") {
    const ModelKind want = estimator == "learned" ? ModelKind::kDelayNet : ModelKind::kMultitask;
    if (model == nullptr) throw Error("estimator '" + estimator + "' needs a trained model");
    if (model->config().kind != want) {
      throw Error("estimator '" + estimator + "' needs a " + ModelKindName(want) +
                  " checkpoint, got " + ModelKindName(model->config().kind));
    }
  } else if (estimator != "classical") {
    throw Error("unknown delay estimator '" + estimator + "'");
  }
  std::vector<int> out(manifest.records.size());
  ParallelFor(out.size(), workers, [&](size_t i) {
    const MixtureSignals s = RenderRecord(manifest.records[i], manifest.config);
    out[i] = estimator == "classical" ? XcorrDelayEstimate(s.mic, s.ref, d_max)
                                      : model->EstimateDelay(s.mic, s.ref);
  });
  return out;
}

std::vector<ReportRow> DelayRows(const Manifest& manifest, const std::vector<int>& estimates,
                                 const std::string& train_set, const std::string& test_set,
                                 const std::string& method, int d_max) {
  const size_t n = manifest.records.size();
  if (n == 0 || estimates.size() != n) throw Error("delay rows need one estimate per record");
  const int buckets = d_max / kDelayClassWidth + 1;
  std::vector<int> hist(buckets + 1, 0);
  int within = 0, top1 = 0;
  for (size_t i = 0; i < n; ++i) {
    const MixtureRecord& rec = manifest.records[i];
    const int err = std::abs(rec.delay_samples - estimates[i]);
    ++hist[std::min(err / kDelayClassWidth, buckets)];
    within += err < kDelayClassWidth;
    top1 += estimates[i] / kDelayClassWidth == rec.delay_class;
  }
  const double pct = 100.0 / double(n);
  auto row = [&](const std::string& metric, const std::string& bucket, double value) {
    return ReportRow{train_set, test_set, method, metric, bucket, "all", value, int(n)};
  };
  std::vector<ReportRow> rows;
  for (int b = 0; b <= buckets; ++b) {
    const int lo = b * kDelayClassWidth;
    const std::string label = b < buckets ? std::to_string(lo) + "-" +
                                                std::to_string(lo + kDelayClassWidth - 1)
                                          : ">=" + std::to_string(lo);
    rows.push_back(row(kMetricErrorHist, label, hist[b] * pct));
  }
  rows.push_back(row(kMetricWithin10, "all", within * pct));
  rows.push_back(row(kMetricTop1, "all", top1 * pct));
  return rows;
}

EnhancementScores ScoreEnhancer(const Manifest& test, const Enhancer& enhance, int workers) {
  const size_t n = test.records.size();
  if (n == 0) throw Error("empty test manifest");
  std::vector<double> erle(n), si_sdr(n);
  ParallelFor(n, workers, [&](size_t i) {
    const MixtureSignals s = RenderRecord(test.records[i], test.config);
    const Waveform single = s.SingleTalkMic();
    erle[i] = Erle(single, enhance(single, s.ref));
    si_sdr[i] = SiSdr(s.near, enhance(s.mic, s.ref));
  });
  // Aggregate in record order so the sums never depend on scheduling.
  std::map<double, std::array<double, 3>> by_ser;
  for (size_t i = 0; i < n; ++i) {
    auto& a = by_ser[test.records[i].ser_db];
    a[0] += erle[i];
    a[1] += si_sdr[i];
    a[2] += 1.0;
  }
  EnhancementScores s;
  s.total = int(n);
  for (const auto& [ser, a] : by_ser) {
    s.sers.push_back(ser);
    s.erle.push_back(a[0] / a[2]);
    s.si_sdr.push_back(a[1] / a[2]);
    s.counts.push_back(int(a[2]));
    s.mean_erle += s.erle.back();
    s.mean_si_sdr += s.si_sdr.back();
  }
  s.mean_erle /= double(s.sers.size());
  s.mean_si_sdr /= double(s.sers.size());
  return s;
}

void AppendScoreRows(const EnhancementScores& s, const std::string& train_set,
                     const std::string& test_set, const std::string& method,
                     ExperimentReport* main, ExperimentReport* per_ser) {
  if (main) {
    main->rows.push_back({train_set, test_set, method, kMetricErle, "all", "mean", s.mean_erle,
                          s.total});
    main->rows.push_back({train_set, test_set, method, kMetricSiSdr, "all", "mean",
                          s.mean_si_sdr, s.total});
  }
  if (per_ser) {
    for (size_t k = 0; k < s.sers.size(); ++k) {
      const std::string ser = PortionLabel(s.sers[k]);
      per_ser->rows.push_back(
          {train_set, test_set, method, kMetricErle, "all", ser, s.erle[k], s.counts[k]});
      per_ser->rows.push_back(
          {train_set, test_set, method, kMetricSiSdr, "all", ser, s.si_sdr[k], s.counts[k]});
    }
  }
}

ExperimentOutput RunDelayEval(const HarnessConfig& config, ModelStore& store) {
  ExperimentReport report = NewReport("delay_eval", config);
  report.notes.push_back(
      "single-talk records (near-end inactive); error = |true delay - estimate| in samples; "
      "percentages of test records");
  const int d_max = config.data.d_max;
  std::unique_ptr<AecModel> multitask;
  for (const bool rir : {false, true}) {
    const std::string scenario = rir ? "rir" : "simple";
    const Manifest test = BuildManifest(config.DelayTestSet(rir));
    for (const std::string& est : config.delay_estimators) {
      std::unique_ptr<AecModel> learned;
      const AecModel* model = nullptr;
      std::string train_set = "none";
      if (est == "learned") {
        const Manifest train = BuildManifest(config.DelayTrainSet(rir));
        learned = store.Obtain("delaynet-" + scenario, train, config.Model(ModelKind::kDelayNet),
                               config.ScheduleFor(ModelKind::kDelayNet));
        model = learned.get();
        train_set = "delay-" + scenario;
      } else if (est == "multitask") {
        if (!multitask) {
          multitask = store.Obtain("multitask-B", BuildManifest(config.TrainSet(true)),
                                   config.Model(ModelKind::kMultitask),
                                   config.ScheduleFor(ModelKind::kMultitask));
        }
        model = multitask.get();
        train_set = "B";
      }
      const std::vector<int> estimates = EstimateDelays(test, est, model, d_max, config.workers);
      for (auto& row : DelayRows(test, estimates, train_set, scenario, est, d_max)) {
        report.rows.push_back(std::move(row));
      }
    }
  }
  return {{std::move(report)}};
}

ExperimentOutput RunMatchMismatch(const HarnessConfig& config, ModelStore& store) {
  ExperimentReport main = NewReport("match_mismatch", config);
  ExperimentReport per_ser = NewReport("match_mismatch_per_ser", config);
  main.notes.push_back(kEnhancementNote);
  main.notes.push_back("set A has no delays, set B random delays in [0, d_max]; ecde has no "
                       "training, so its rows repeat across train sets");
  per_ser.notes = main.notes;
  const Manifest train[2] = {BuildManifest(config.TrainSet(false)),
                             BuildManifest(config.TrainSet(true))};
  const Manifest test[2] = {BuildManifest(config.TestSet(false)),
                            BuildManifest(config.TestSet(true))};
  const char* names[2] = {"A", "B"};
  for (const std::string& method : config.methods) {
    if (method == "ecde") {
      const Enhancer ecde = EcdeEnhancer(config.ecde);
      const EnhancementScores scores[2] = {ScoreEnhancer(test[0], ecde, config.workers),
                                           ScoreEnhancer(test[1], ecde, config.workers)};
      for (int tr = 0; tr < 2; ++tr) {
        for (int te = 0; te < 2; ++te) {
          AppendScoreRows(scores[te], names[tr], names[te], method, &main, &per_ser);
        }
      }
      continue;
    }
    const ModelKind kind = ParseModelKind(method);
    for (int tr = 0; tr < 2; ++tr) {
      const auto model = store.Obtain(method + "-" + names[tr], train[tr], config.Model(kind),
                                      config.ScheduleFor(kind));
      for (int te = 0; te < 2; ++te) {
        AppendScoreRows(ScoreEnhancer(test[te], ModelEnhancer(*model), config.workers),
                        names[tr], names[te], method, &main, &per_ser);
      }
    }
  }
  return {{std::move(main), std::move(per_ser)}};
}

ExperimentOutput RunAugmentationStudy(const HarnessConfig& config, ModelStore& store) {
  ExperimentReport main = NewReport("augmentation", config);
  ExperimentReport per_ser = NewReport("augmentation_per_ser", config);
  main.notes.push_back(kEnhancementNote);
  main.notes.push_back("train set 'portion=p' is set A with round(p*N) records given a random "
                       "delay in [1, d_max]; focal delay loss for 0 < p < 1, cross-entropy "
                       "otherwise; portion 0 is set A itself; ecde is not trained and is omitted");
  per_ser.notes = main.notes;
  const Manifest base = BuildManifest(config.TrainSet(false));
  const Manifest test[2] = {BuildManifest(config.TestSet(false)),
                            BuildManifest(config.TestSet(true))};
  const char* names[2] = {"A", "B"};
  const uint64_t augment_seed = DeriveSeed(config.data.seed, "augment");
  for (const std::string& method : config.methods) {
    if (method == "ecde") continue;
    const ModelKind kind = ParseModelKind(method);
    for (const double p : config.portions) {
      const Manifest train = p == 0.0 ? base : AugmentPortion(base, p, augment_seed);
      TrainSchedule schedule = config.ScheduleFor(kind);
      if (kind == ModelKind::kMultitask) {
        schedule.delay_loss = p > 0.0 && p < 1.0 ? "focal" : "ce";
      }
      // Portion 0 reuses the set-A model of the match/mismatch experiment.
      const std::string tag = p == 0.0 ? method + "-A" : method + "-p" + PortionLabel(p);
      const auto model = store.Obtain(tag, train, config.Model(kind), schedule);
      const std::string label = "portion=" + PortionLabel(p);
      for (int te = 0; te < 2; ++te) {
        AppendScoreRows(ScoreEnhancer(test[te], ModelEnhancer(*model), config.workers), label,
                        names[te], method, &main, &per_ser);
      }
    }
  }
  return {{std::move(main), std::move(per_ser)}};
}

ExperimentOutput RunExperiment(const std::string& name, const HarnessConfig& config,
                               ModelStore& store) {
  if (name == "delay") return RunDelayEval(config, store);
  if (name == "match_mismatch") return RunMatchMismatch(config, store);
  if (name == "augmentation") return RunAugmentationStudy(config, store);
  throw UsageError("unknown experiment '" + name +
                   "' (expected delay, match_mismatch or augmentation)");
}

}  // namespace aeclab
