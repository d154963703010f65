import json

import pytest

from weighted_chi2.config import Config, get_config, reset_config
from weighted_chi2.errors import SpecError
from weighted_chi2.run_config import (
    FigureConfig,
    RunPreset,
    VerifyConfig,
    get_preset_path,
    load_preset,
)


class TestPresets:

    def test_default_preset_matches_dataclass_defaults(self):
        preset = load_preset("default")
        assert preset.figure == FigureConfig()
        assert preset.verify == VerifyConfig()
        assert preset.figure.pairs == [(1.0, 0.5), (2.0, 1.0), (1.0, -0.5), (2.0, -1.0)]

    def test_quick_preset(self):
        preset = load_preset("quick")
        assert preset.name == "quick"
        assert preset.verify.samples == 100_000
        assert preset.verify.seed == 7
        assert preset.verify.quantile_levels == [0.1, 0.5, 0.9]

    def test_unknown_name_falls_back(self, caplog):
        preset = load_preset("no-such-preset")
        assert preset == RunPreset()
        assert "no-such-preset" in caplog.text

    def test_builtin_lookup(self):
        assert get_preset_path("default").endswith("default.yaml")
        assert get_preset_path("missing") is None

    def test_yaml_round_trip(self, tmp_path):
        preset = RunPreset(
            name="custom",
            figure=FigureConfig(dof=8, pairs=[(3.0, -1.0)], points=11, span_sigmas=4.0),
            verify=VerifyConfig(quantile_levels=[0.25, 0.75], samples=5000, seed=1, abs_tol=1e-7),
        )
        path = tmp_path / "custom.yaml"
        preset.to_yaml(str(path))
        assert load_preset(str(path)) == preset

    def test_partial_document_keeps_defaults(self):
        preset = RunPreset.from_dict({"name": "x", "figure": {"dof": 20}})
        assert preset.figure.dof == 20
        assert preset.figure.points == 201
        assert preset.verify == VerifyConfig()

    def test_empty_document(self):
        assert RunPreset.from_dict(None) == RunPreset()

    @pytest.mark.parametrize("data", [
        ["not", "a", "mapping"],
        {"figure": {"dof": 5}},
        {"figure": {"points": 1}},
        {"figure": {"pairs": [[1.0]]}},
        {"figure": {"span_sigmas": 0}},
        {"verify": {"quantile_levels": [0.5, 1.0]}},
    ])
    def test_invalid(self, data):
        with pytest.raises(SpecError):
            RunPreset.from_dict(data)


class TestSettings:

    def test_defaults(self):
        config = get_config()
        assert config.seed == 42
        assert config.samples == 1_000_000
        assert config.abs_tol == 1e-8
        assert config.merge_tol == 1e-9
        assert config.preset == "default"

    def test_set_persists(self):
        get_config().set("samples", "2500")
        reset_config()
        assert get_config().samples == 2500
        stored = json.loads(get_config().config_path.read_text(encoding="utf-8"))
        assert stored["samples"] == 2500

    def test_unknown_key(self):
        with pytest.raises(KeyError):
            get_config().set("colour", "red")

    def test_bad_value(self):
        with pytest.raises(ValueError):
            get_config().set("seed", "forty-two")

    def test_corrupt_file_falls_back(self, caplog):
        config = get_config()
        config.config_path.write_text("{broken", encoding="utf-8")
        assert Config().as_dict() == Config.DEFAULTS
        assert "unreadable" in caplog.text

    def test_unknown_stored_keys_ignored(self):
        path = get_config().config_path
        path.write_text(json.dumps({"seed": 5, "legacy": True}), encoding="utf-8")
        reset_config()
        assert get_config().seed == 5
        assert "legacy" not in get_config().as_dict()
