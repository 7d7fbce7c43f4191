"""Config loading: defaults, strict keys, validation failures."""

import json

import pytest

from eegkan.config import (
    FilterSettings,
    ModelSettings,
    RunConfig,
    SweepSettings,
    SynthSettings,
    WelchSettings,
    load_config,
)
from eegkan.dsp import CANONICAL_BANDS
from eegkan.errors import ConfigError
from eegkan.recordings import DEFAULT_CHANNELS


def write_config(tmp_path, payload):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


class TestDefaults:
    def test_none_gives_defaults(self):
        cfg = load_config(None)
        assert cfg == RunConfig()

    def test_default_values(self):
        cfg = RunConfig()
        assert cfg.channel_names == DEFAULT_CHANNELS
        assert cfg.bands == CANONICAL_BANDS
        assert cfg.filter == FilterSettings(order=5, low_hz=0.3, high_hz=25.0)
        assert cfg.welch == WelchSettings(segment_len=256, overlap=0.5, window="hann")
        assert cfg.model.dropout_rate == 0.5
        assert cfg.model.output_dim == 3
        assert cfg.sweep == SweepSettings(
            kinds=("ann", "kan"),
            epochs=(100, 250, 500, 1000),
            lr=(0.0001, 0.001, 0.01, 0.1),
            nodes=(4, 16, 64, 260),
            seeds=(1, 2, 3),
        )
        assert cfg.synth.n_per_class == 20
        assert cfg.seed == 0
        assert cfg.test_frac == 0.2
        assert cfg.with_gender is False
        assert cfg.out_dir == "out"

    def test_empty_file_gives_defaults(self, tmp_path):
        path = write_config(tmp_path, {})
        assert load_config(path) == RunConfig()


class TestFileOverrides:
    def test_full_document(self, tmp_path):
        payload = {
            "channel_names": ["C3", "C4"],
            "bands": [
                {"name": "slow", "low_hz": 1.0, "high_hz": 8.0},
                {"name": "fast", "low_hz": 8.0, "high_hz": 20.0},
            ],
            "filter": {"order": 4, "low_hz": 0.5, "high_hz": 20.0},
            "welch": {"segment_len": 128, "overlap": 0.25},
            "model": {"dropout_rate": 0.2, "grid_range": [-3.0, 3.0]},
            "sweep": {"kinds": ["kan"], "epochs": [50], "lr": [0.01],
                      "nodes": [8], "seeds": [7]},
            "synth": {"n_per_class": 5, "sample_rate_hz": 128.0},
            "seed": 9,
            "test_frac": 0.25,
            "with_gender": True,
            "out_dir": "results",
        }
        cfg = load_config(write_config(tmp_path, payload))
        assert cfg.channel_names == ("C3", "C4")
        assert [b.name for b in cfg.bands] == ["slow", "fast"]
        assert cfg.filter.order == 4
        assert cfg.welch.segment_len == 128
        assert cfg.model.dropout_rate == 0.2
        assert cfg.model.grid_range == (-3.0, 3.0)
        assert cfg.sweep.kinds == ("kan",)
        assert cfg.synth.n_per_class == 5
        assert cfg.seed == 9
        assert cfg.test_frac == 0.25
        assert cfg.with_gender is True
        assert cfg.out_dir == "results"

    def test_partial_section_keeps_other_defaults(self, tmp_path):
        cfg = load_config(write_config(tmp_path, {"filter": {"order": 3}}))
        assert cfg.filter.order == 3
        assert cfg.filter.low_hz == 0.3
        assert cfg.welch == WelchSettings()


class TestRejection:
    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(tmp_path / "absent.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigError, match="not valid JSON"):
            load_config(path)

    def test_non_object_document(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ConfigError, match="JSON object"):
            load_config(path)

    def test_unknown_top_level_key(self, tmp_path):
        with pytest.raises(ConfigError, match="unknown keys.*learning_rate"):
            load_config(write_config(tmp_path, {"learning_rate": 0.1}))

    def test_unknown_section_key(self, tmp_path):
        with pytest.raises(ConfigError, match="filter.*unknown keys.*ripple"):
            load_config(write_config(tmp_path, {"filter": {"ripple": 1.0}}))

    @pytest.mark.parametrize("payload,fragment", [
        ({"filter": {"order": 0}}, "order"),
        ({"filter": {"low_hz": 30.0}}, "low < high"),
        ({"welch": {"segment_len": 4}}, "segment_len"),
        ({"welch": {"overlap": 1.0}}, "overlap"),
        ({"welch": {"window": "boxcar"}}, "hann"),
        ({"model": {"dropout_rate": 1.0}}, "dropout_rate"),
        ({"model": {"output_dim": 1}}, "output_dim"),
        ({"model": {"grid_range": [2.0, -2.0]}}, "grid_range"),
        ({"sweep": {"kinds": ["cnn"]}}, "kinds"),
        ({"sweep": {"epochs": []}}, "epochs"),
        ({"sweep": {"lr": [0.0]}}, "lr"),
        ({"sweep": {"nodes": [0]}}, "nodes"),
        ({"sweep": {"seeds": []}}, "seeds"),
        ({"synth": {"n_per_class": 0}}, "n_per_class"),
        ({"synth": {"noise_level": -0.5}}, "noise_level"),
        ({"synth": {"sample_rate_hz": 40.0}}, "Nyquist"),
        ({"test_frac": 1.5}, "test_frac"),
        ({"seed": "zero"}, "integer"),
        ({"seed": True}, "seed"),
        ({"with_gender": "yes"}, "true or false"),
        ({"bands": []}, "non-empty"),
        ({"bands": [{"name": "a", "low_hz": 1.0}]}, "bands"),
        ({"channel_names": []}, "channel_names"),
    ])
    def test_invalid_values(self, tmp_path, payload, fragment):
        with pytest.raises(ConfigError, match=fragment):
            load_config(write_config(tmp_path, payload))
