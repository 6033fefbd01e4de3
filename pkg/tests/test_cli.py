import json

import pytest

from hilbert_shimura.cli import run
from hilbert_shimura.errors import ConfigError
from hilbert_shimura.pipeline import DEFAULT_CONFIG, load_config


def _load(path):
    return json.loads(path.read_text())


def test_classes(tmp_path):
    assert run(["classes", "--out", str(tmp_path)]) == 0
    data = _load(tmp_path / "classes.json")
    assert data["weights"] == [3, 5]
    assert data["mass"] == "8/15"
    assert data["fixture_ideal_class"] == 1


def test_brandt_column_sums(tmp_path):
    assert run(["brandt", "--prime-norms", "9", "--out", str(tmp_path)]) == 0
    data = _load(tmp_path / "brandt_9.json")
    assert data["norm"] == 9
    assert data["column_sums"] == [[10, 10]]


def test_brandt_workers_are_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["brandt", "--prime-norms", "4,11", "--workers", "1", "--out", str(a)]) == 0
    assert run(["brandt", "--prime-norms", "4,11", "--workers", "2", "--out", str(b)]) == 0
    for name in ["brandt_4.json", "brandt_11.json"]:
        assert (a / name).read_bytes() == (b / name).read_bytes()
    assert len(_load(a / "brandt_11.json")["matrices"]) == 2


def test_theta_header_only_at_zero(tmp_path):
    assert run(["theta", "--trace-bound", "0", "--out", str(tmp_path)]) == 0
    data = _load(tmp_path / "theta_1_-1.json")
    assert data["entries"] == []
    assert data["header"]["T"] == 0
    assert data["header"]["constant_term"] == "0"


def test_theta_runs_are_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["theta", "--trace-bound", "12", "--out", str(a)]) == 0
    assert run(["theta", "--trace-bound", "12", "--out", str(b), "--seed", "7"]) == 0
    assert (a / "theta_1_-1.json").read_bytes() == (b / "theta_1_-1.json").read_bytes()
    rows = _load(a / "theta_1_-1.json")["entries"]
    # [R] - [I] at xi = 3 - w is -2 on the unit ideal
    assert any(r[0] == "3" and r[1] == "-1" and r[3] == "-2" for r in rows)


def test_lift_small(tmp_path):
    args = ["lift", "--xi", "3,-1", "--norm-bound", "60", "--trace-bound", "40", "--out", str(tmp_path)]
    assert run(args) == 0
    data = _load(tmp_path / "lift_3-w.json")
    assert data["alpha"] == "-2"
    assert data["entries"]


def test_bad_config_exits_2(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text("{not json")
    assert run(["classes", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    err = json.loads(capsys.readouterr().err)
    assert err["exit_code"] == 2 and err["error"] == "ConfigError"


def test_bad_flags_exit_2(tmp_path):
    assert run(["classes", "--trace-bound", "many"]) == 2
    assert run(["nonsense"]) == 2
    assert run(["lift", "--xi", "3", "--out", str(tmp_path)]) == 2
    assert run(["lift", "--xi", "-1,0", "--out", str(tmp_path)]) == 2


def test_level_prime_exits_3(tmp_path, capsys):
    assert run(["brandt", "--prime-norms", "31", "--out", str(tmp_path)]) == 3
    err = json.loads(capsys.readouterr().err)
    assert err["exit_code"] == 3


def test_load_config_defaults_and_overrides(tmp_path):
    cfg = load_config()
    assert cfg.D == 5 and cfg.trace_bound == 100 and cfg.theta_check_prime_norms == [9, 11]
    cfg = load_config(DEFAULT_CONFIG, trace_bound=12, workers=None)
    assert cfg.trace_bound == 12 and cfg.workers == 1


@pytest.mark.parametrize(
    "patch",
    [{"bogus": 1}, {"trace_bound": "ten"}, {"trace_bound": -1}, {"algebra": [1, 1]}, {"order": "missing.json"}],
)
def test_load_config_rejects(tmp_path, patch):
    data = _load(DEFAULT_CONFIG)
    for key in ("order", "ideal", "curve"):
        data[key] = str(DEFAULT_CONFIG.parent / data[key])
    data.update(patch)
    if "order" in patch:
        data["order"] = str(tmp_path / patch["order"])
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(data))
    with pytest.raises(ConfigError):
        load_config(path)
