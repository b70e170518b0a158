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

// Python bindings. Waveforms cross the boundary as 1-D float64 numpy arrays.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <cstring>
#include <string>

#include "aeclab/classical/nlms.h"
#include "aeclab/dataset/dataset.h"
#include "aeclab/error.h"
#include "aeclab/models/train.h"
#include "aeclab/signal/dsp.h"
#include "aeclab/signal/metrics.h"
#include "aeclab/signal/stft.h"
#include "aeclab/signal/wav_io.h"

namespace py = pybind11;

namespace aeclab {
namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Waveform ToWave(const Array& a, int sample_rate) {
  if (a.ndim() != 1) throw py::value_error("expected a 1-D array");
  return Waveform(std::vector<double>(a.data(), a.data() + a.size()), sample_rate);
}

Array ToArray(const std::vector<double>& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  if (!v.empty()) std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(double));
  return out;
}

KeyValues ToKeys(const py::dict& d) {
  KeyValues kv;
  for (const auto& [k, v] : d) kv[py::str(k)] = py::str(v);
  return kv;
}

py::dict RecordDict(const MixtureRecord& r) {
  py::dict d;
  d["id"] = r.id;
  d["near"] = r.near;
  d["far"] = r.far;
  d["rir"] = r.rir;
  d["ser_db"] = r.ser_db;
  d["delay_samples"] = r.delay_samples;
  d["delay_class"] = r.delay_class;
  d["seed"] = r.seed;
  return d;
}

py::array_t<std::complex<double>> StftArray(const Array& x, int win_len, int hop, int sr) {
  const Spectrogram s = Stft(ToWave(x, sr), win_len, hop);
  py::array_t<std::complex<double>> out(
      {static_cast<py::ssize_t>(s.num_frames), static_cast<py::ssize_t>(s.num_bins)});
  if (!s.bins.empty()) {
    std::memcpy(out.mutable_data(), s.bins.data(), s.bins.size() * sizeof(std::complex<double>));
  }
  return out;
}

Array IstftArray(const py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>& a,
                 size_t length, int win_len, int hop, int sr) {
  if (a.ndim() != 2) throw py::value_error("expected a [frames, bins] array");
  Spectrogram s;
  s.num_frames = a.shape(0);
  s.num_bins = a.shape(1);
  s.win_len = win_len;
  s.hop = hop;
  s.sample_rate = sr;
  s.signal_length = length;
  s.bins.assign(a.data(), a.data() + a.size());
  return ToArray(Istft(s).samples);
}

class PyModel {
 public:
  explicit PyModel(const std::string& path) : model_(LoadModel(path)) {}

  std::string kind() const { return ModelKindName(model_->config().kind); }
  int estimate_delay(const Array& mic, const Array& ref) const {
    const int sr = model_->config().sample_rate;
    return model_->EstimateDelay(ToWave(mic, sr), ToWave(ref, sr));
  }
  py::tuple run(const Array& mic, const Array& ref) const {
    const int sr = model_->config().sample_rate;
    const MultitaskOutput o = model_->Run(ToWave(mic, sr), ToWave(ref, sr));
    return py::make_tuple(ToArray(o.enhanced.samples), ToArray(o.dist));
  }

 private:
  std::unique_ptr<AecModel> model_;
};

}  // namespace
}  // namespace aeclab

PYBIND11_MODULE(_aeclab, m) {
  using namespace aeclab;
  m.doc() = "Acoustic echo cancellation with delay estimation";
  // Translators run newest first, so the subclass goes last.
  py::register_exception<Error>(m, "AeclabError", PyExc_RuntimeError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);

  const int sr = kDefaultSampleRate;
  m.attr("SAMPLE_RATE") = sr;

  m.def("stft", &StftArray, py::arg("x"), py::arg("win_len") = kDefaultWinLen,
        py::arg("hop") = kDefaultHop, py::arg("sample_rate") = sr);
  m.def("istft", &IstftArray, py::arg("spec"), py::arg("length"),
        py::arg("win_len") = kDefaultWinLen, py::arg("hop") = kDefaultHop,
        py::arg("sample_rate") = sr);
  m.def("erle", [sr](const Array& mic, const Array& res) {
    return Erle(ToWave(mic, sr), ToWave(res, sr));
  });
  m.def("ser", [sr](const Array& near, const Array& echo) {
    return Ser(ToWave(near, sr), ToWave(echo, sr));
  });
  m.def("si_sdr", [sr](const Array& ref, const Array& est) {
    return SiSdr(ToWave(ref, sr), ToWave(est, sr));
  });
  m.def("mix_at_ser", [sr](const Array& near, const Array& echo, double ser_db) {
    const SerMix mix = MixAtSer(ToWave(near, sr), ToWave(echo, sr), ser_db);
    return py::make_tuple(ToArray(mix.mic.samples), mix.gain);
  });
  m.def("delay_shift", [sr](const Array& x, long d) {
    return ToArray(DelayShift(ToWave(x, sr), d).samples);
  });
  m.def(
      "cross_correlate",
      [sr](const Array& a, const Array& b, size_t max_lag, bool normalized) {
        return ToArray(CrossCorrelate(ToWave(a, sr), ToWave(b, sr), max_lag, normalized));
      },
      py::arg("a"), py::arg("b"), py::arg("max_lag"), py::arg("normalized") = true);
  m.def(
      "xcorr_delay_estimate",
      [sr](const Array& mic, const Array& ref, int d_max) {
        return XcorrDelayEstimate(ToWave(mic, sr), ToWave(ref, sr), d_max);
      },
      py::arg("mic"), py::arg("ref"), py::arg("d_max") = kMaxDelaySamples);
  m.def(
      "nlms_cancel",
      [sr](const Array& mic, const Array& ref, const py::dict& config) {
        EcdeConfig c;
        KeyReader r(ToKeys(config));
        ReadEcdeKeys(r, &c);
        r.Finish();
        const NlmsResult res = NlmsCancel(ToWave(mic, sr), ToWave(ref, sr), c.nlms);
        return py::make_tuple(ToArray(res.residual.samples), ToArray(res.coefficients));
      },
      py::arg("mic"), py::arg("ref"), py::arg("config") = py::dict());
  m.def(
      "ecde",
      [sr](const Array& mic, const Array& ref, const py::dict& config) {
        EcdeConfig c;
        KeyReader r(ToKeys(config));
        ReadEcdeKeys(r, &c);
        r.Finish();
        const EcdeResult res = EcdePipeline(ToWave(mic, sr), ToWave(ref, sr), c);
        return py::make_tuple(ToArray(res.residual.samples), res.delay);
      },
      py::arg("mic"), py::arg("ref"), py::arg("config") = py::dict());
  m.def(
      "delay_features",
      [sr](const Array& echo_est, const Array& ref, const std::string& preset) {
        const DelayNetConfig c = PresetByName(preset, ModelKind::kMultitask).delay;
        return ToArray(DelayFeatures(ToWave(echo_est, sr), ToWave(ref, sr), c));
      },
      py::arg("echo_est"), py::arg("ref"), py::arg("preset") = "desk");
  m.def(
      "build_manifest",
      [](const py::dict& config) {
        const Manifest man = BuildManifest(DatasetConfigFromKeys(ToKeys(config)));
        py::list out;
        for (const auto& r : man.records) out.append(RecordDict(r));
        return out;
      },
      py::arg("config") = py::dict());
  m.def(
      "render",
      [](const py::dict& config, size_t index) {
        const Manifest man = BuildManifest(DatasetConfigFromKeys(ToKeys(config)));
        if (index >= man.records.size()) throw py::index_error("record index out of range");
        const MixtureSignals s = RenderRecord(man.records[index], man.config);
        py::dict d;
        d["mic"] = ToArray(s.mic.samples);
        d["ref"] = ToArray(s.ref.samples);
        d["near"] = ToArray(s.near.samples);
        d["echo"] = ToArray(s.ScaledEcho().samples);
        d["delay_samples"] = s.delay_samples;
        return d;
      },
      py::arg("config"), py::arg("index"));
  m.def(
      "augment_portion",
      [](const py::dict& config, double portion, uint64_t seed) {
        const Manifest man =
            AugmentPortion(BuildManifest(DatasetConfigFromKeys(ToKeys(config))), portion, seed);
        py::list out;
        for (const auto& r : man.records) out.append(RecordDict(r));
        return out;
      },
      py::arg("config"), py::arg("portion"), py::arg("seed"));
  m.def(
      "train",
      [](const std::string& manifest, const std::string& model, const std::string& preset,
         const py::dict& config, const std::string& checkpoint) {
        const Manifest man = ReadManifest(manifest);
        ModelConfig mc = PresetByName(preset, ParseModelKind(model));
        mc.sample_rate = man.config.sample_rate;
        TrainSchedule schedule;
        KeyReader r(ToKeys(config));
        ReadModelKeys(r, &mc);
        ReadScheduleKeys(r, &schedule);
        r.Finish();
        TrainPaths paths;
        paths.checkpoint = checkpoint;
        py::list losses;
        const TrainResult res = TrainRun(man, mc, schedule, paths);
        for (const auto& e : res.epochs) {
          losses.append(py::make_tuple(e.epoch, e.enhance_mse, e.delay_loss, e.echo_aux));
        }
        return losses;
      },
      py::arg("manifest"), py::arg("model"), py::arg("preset") = "desk",
      py::arg("config") = py::dict(), py::arg("checkpoint"));
  m.def(
      "write_dataset",
      [](const py::dict& config, const std::string& out_dir) {
        return BuildDataset(DatasetConfigFromKeys(ToKeys(config)), out_dir).records.size();
      },
      py::arg("config"), py::arg("out_dir"));
  m.def("read_wav", [](const std::string& path) {
    const Waveform w = ReadWav(path);
    return py::make_tuple(ToArray(w.samples), w.sample_rate);
  });
  m.def(
      "write_wav",
      [](const std::string& path, const Array& x, int sample_rate) {
        WriteWav(path, ToWave(x, sample_rate));
      },
      py::arg("path"), py::arg("x"), py::arg("sample_rate") = sr);

  py::class_<PyModel>(m, "Model")
      .def(py::init<const std::string&>(), py::arg("checkpoint"))
      .def_property_readonly("kind", &PyModel::kind)
      .def("estimate_delay", &PyModel::estimate_delay, py::arg("mic"), py::arg("ref"))
      .def("run", &PyModel::run, py::arg("mic"), py::arg("ref"));
}
