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

#ifndef AECLAB_DATASET_DATASET_H_
#define AECLAB_DATASET_DATASET_H_

#include <cstdint>
#include <string>
#include <vector>

#include "aeclab/dataset/mixture.h"
#include "aeclab/dataset/rir.h"
#include "aeclab/key_values.h"

namespace aeclab {

// Every key here maps 1:1 onto a flat config key of the same name.
struct DatasetConfig {
  std::string split = "train";  // train | test
  int count = 200;
  uint64_t seed = 1;
  int sample_rate = kDefaultSampleRate;
  double clip_seconds = 1.25;
  bool delays = true;
  int d_max = kMaxDelaySamples;
  std::vector<double> train_sers = {-6.0, -3.0, 0.0, 3.0, 6.0};
  std::vector<double> test_sers = {0.0, 3.5, 7.0};
  std::vector<std::string> rirs = {"E1A", "E1B", "E1C", "E2A"};
  std::string rir_extra;  // optional fifth slot, "name:rt60:offset"
  int far_per_near = 0;   // 0 = 5 for train, 1 for test
  int num_far_sources = 0;  // 0 = max(1, count / 5)
  double near_min_fraction = 0.6;
  std::string near_dir;  // optional WAV corpora replacing synthetic speech
  std::string far_dir;
  bool write_wavs = true;
  // false renders single-talk records: the near-end is muted after SER
  // scaling, so mic carries only the echo.
  bool near_active = true;

  std::vector<double> Sers() const;
  std::vector<NamedRir> Catalog() const;
  size_t ClipSamples() const;
};

// Pulls every dataset key out of `reader`.
void ReadDatasetKeys(KeyReader& reader, DatasetConfig* config);
// Strict variant: any key that is not a dataset key is an error.
DatasetConfig DatasetConfigFromKeys(const KeyValues& kv);
KeyValues DatasetConfigToKeys(const DatasetConfig& config);

struct Manifest {
  std::vector<MixtureRecord> records;
  std::string split;
  uint64_t seed = 0;
  DatasetConfig config;
  // Extra provenance appended by transformations such as AugmentPortion.
  KeyValues notes;
};

// Samples records per the config; fully determined by config.seed. Does not
// render audio.
Manifest BuildManifest(const DatasetConfig& config);

// BuildManifest plus, when out_dir is nonempty, writes manifest.jsonl,
// manifest.meta.json and (if config.write_wavs) per-record WAVs under
// out_dir/wav/.
Manifest BuildDataset(const DatasetConfig& config, const std::string& out_dir);

// Gives exactly round(portion * N) records a fresh uniform delay in
// [1, d_max]; everything else is copied verbatim.
Manifest AugmentPortion(const Manifest& base, double portion, uint64_t seed);

// Renders the audio for one record.
MixtureSignals RenderRecord(const MixtureRecord& record, const DatasetConfig& config);

// Source ids: "synth:<seed>:<samples>" or "wav:<path>".
std::string SynthSourceId(uint64_t seed, size_t samples);
Waveform ResolveSource(const std::string& id, int sample_rate);

// JSON-lines manifest plus a sidecar "<path minus .jsonl>.meta.json" holding
// split, seed and the config snapshot.
void WriteManifest(const std::string& path, const Manifest& manifest);
Manifest ReadManifest(const std::string& path);
std::string ManifestRecordsToJsonl(const Manifest& manifest);

}  // namespace aeclab

#endif  // AECLAB_DATASET_DATASET_H_
