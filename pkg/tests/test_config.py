from __future__ import annotations

import pytest

from app.core import configio
from app.core.configio import RunConfig, load_config, save_config


def test_config_save_load(tmp_path):
    cfg_path = tmp_path / "test_config.json"
    cfg = {"seed": 10, "diagram": "cat"}

    save_config(cfg, cfg_path)
    assert cfg_path.exists()

    loaded = load_config(cfg_path)
    assert loaded == cfg


def test_load_nonexistent_config(tmp_path):
    assert load_config(tmp_path / "nope.json") is None


def test_load_rejects_non_object(tmp_path):
    path = tmp_path / "list.json"
    path.write_text("[1, 2]", encoding="utf-8")
    assert load_config(path) is None


def test_save_falls_back_when_directory_is_not_writable(tmp_path, monkeypatch):
    target = tmp_path / "locked" / "config.json"
    real_mkdir = configio.Path.mkdir

    def mkdir(self, *args, **kwargs):
        if self == target.parent:
            raise PermissionError("read-only")
        return real_mkdir(self, *args, **kwargs)

    monkeypatch.setattr(configio, "_fallback", lambda p: tmp_path / "fallback" / p.name)
    monkeypatch.setattr(configio.Path, "mkdir", mkdir)
    save_config({"count": 3}, target)
    assert not target.exists()
    assert load_config(target) == {"count": 3}


def test_run_config_defaults_and_overrides():
    persisted = {"seed": 5, "depth": 2, "weights": [1, 1, 1], "unrelated": True}
    cfg = RunConfig.from_mapping("invariance", persisted, seed=None, count=7, inputs=["a", "b"])
    assert cfg.seed == 5
    assert cfg.depth == 2
    assert cfg.count == 7
    assert cfg.weights == (1.0, 1.0, 1.0)
    assert cfg.inputs == ("a", "b")
    echo = cfg.echo()
    assert echo["inputs"] == ["a", "b"]
    assert "extra" not in echo


@pytest.mark.parametrize(
    "overrides",
    [{"seed": -1}, {"count": -3}, {"output_format": "yaml"}, {"diagram": "tricat"}, {"weights": (1.0, 0.0, 1.0)}],
)
def test_run_config_rejects_bad_values(overrides):
    with pytest.raises(ValueError):
        RunConfig(command="validate", **overrides)


def test_with_inputs_replaces_inputs():
    cfg = RunConfig("nerve", inputs=("x",)).with_inputs("y", "z")
    assert cfg.inputs == ("y", "z")
    assert cfg.command == "nerve"
