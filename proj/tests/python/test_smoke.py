import numpy as np
import pytest

import aeclab

FS = aeclab.SAMPLE_RATE


def noise(n, seed):
    return np.random.default_rng(seed).standard_normal(n)


def test_stft_round_trip_interior():
    x = noise(FS, 1)
    spec = aeclab.stft(x)
    assert spec.shape == (61, 257)
    y = aeclab.istft(spec, len(x))
    assert np.max(np.abs(x[512:-512] - y[512:-512])) < 1e-6


def test_metric_identities():
    d = noise(4000, 2)
    assert aeclab.erle(d, d) == 0.0
    assert abs(aeclab.erle(d, d / 10) - 20.0) < 1e-9
    near, echo = noise(4000, 3), noise(4000, 4)
    mic, gain = aeclab.mix_at_ser(near, echo, 3.5)
    assert abs(aeclab.ser(near, gain * echo) - 3.5) < 1e-9
    np.testing.assert_allclose(mic, near + gain * echo)


def test_classical_delay_and_ecde():
    ref = noise(2 * FS, 5)
    mic = 0.5 * aeclab.delay_shift(ref, 250)
    assert aeclab.xcorr_delay_estimate(mic, ref) == 250
    residual, delay = aeclab.ecde(mic, ref)
    assert delay == 250
    assert aeclab.erle(mic[FS:], residual[FS:]) >= 20.0


def test_nlms_config_keys_are_strict():
    x = noise(1000, 6)
    with pytest.raises(ValueError):
        aeclab.nlms_cancel(x, x, {"nlms_bogus": 1})
    _, h = aeclab.nlms_cancel(x, x, {"nlms_taps": 64})
    assert len(h) == 64


def test_delay_features_oracle():
    ref = noise(10000, 7)
    for d in (0, 9, 10, 137, 409):
        f = aeclab.delay_features(aeclab.delay_shift(ref, d), ref)
        assert int(np.argmax(f)) == d // 10


def test_manifest_is_deterministic_and_augmentable():
    cfg = {"count": 10, "seed": 3, "delays": "false", "write_wavs": "false"}
    a = aeclab.build_manifest(cfg)
    assert a == aeclab.build_manifest(cfg)
    assert all(r["delay_samples"] == 0 for r in a)
    aug = aeclab.augment_portion(cfg, 0.2, 11)
    assert sum(r["delay_samples"] != 0 for r in aug) == 2
    sig = aeclab.render(cfg, 0)
    np.testing.assert_allclose(sig["mic"], sig["near"] + sig["echo"], atol=1e-12)


def test_train_and_run_model(tmp_path):
    data = tmp_path / "data"
    assert aeclab.write_dataset({"count": 2, "seed": 4, "write_wavs": "false"}, str(data)) == 2
    ckpt = tmp_path / "m.ckpt"
    losses = aeclab.train(str(data / "manifest.jsonl"), "multitask", "desk", {"epochs": 1},
                          str(ckpt))
    assert len(losses) == 1
    model = aeclab.Model(str(ckpt))
    assert model.kind == "multitask"
    ref = noise(FS, 8) * 0.1
    mic = aeclab.delay_shift(ref, 40)
    enhanced, dist = model.run(mic, ref)
    assert enhanced.shape == mic.shape
    assert abs(dist.sum() - 1.0) < 1e-5
    assert 0 <= model.estimate_delay(mic, ref) <= 400


def test_errors_map_to_python_exceptions(tmp_path):
    with pytest.raises(RuntimeError):
        aeclab.Model(str(tmp_path / "missing.ckpt"))
    with pytest.raises(ValueError):
        aeclab.build_manifest({"no_such_key": 1})
