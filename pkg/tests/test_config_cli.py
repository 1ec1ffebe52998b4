"""Config parsing and the command-line pipelines, run in process."""

import json
import math

import numpy as np
import pytest

from iswaves.cli import main
from iswaves.config import (
    ConfigError,
    apply_overrides,
    load_config,
    params_from_config,
    parse_assignment,
    resolved_config,
    sanitize,
    write_json,
)

P1_LINES = """\
# canonical two-layer point
params.gamma = 0.5
params.epsilon = 0.1
params.mu = 0.1
params.a = -0.0833333333333333
params.b = 0.25
params.c = -0.0833333333333333
params.d = 0.25
params.mu2 = 4.0
params.beta = 2.0
"""


@pytest.fixture()
def p1_cfg(tmp_path):
    path = tmp_path / "p1.cfg"
    path.write_text(P1_LINES)
    return str(path)


def test_parse_assignment_types():
    assert parse_assignment("params.gamma = 0.5") == ("params.gamma", 0.5)
    key, val = parse_assignment("params.mu2=inf")
    assert key == "params.mu2" and math.isinf(val)
    key, val = parse_assignment("grid.N = 256")
    assert val == 256 and isinstance(val, int)
    assert parse_assignment("solve.family = BO") == ("solve.family", "BO")


def test_parse_assignment_rejections():
    with pytest.raises(ConfigError, match="unknown configuration key"):
        parse_assignment("params.bogus = 1")
    with pytest.raises(ConfigError, match="bad value"):
        parse_assignment("grid.N = twelve")
    with pytest.raises(ConfigError, match="key = value"):
        parse_assignment("params.gamma 0.5")


def test_load_config(tmp_path, p1_cfg):
    cfg = load_config(p1_cfg)
    assert cfg["params.gamma"] == 0.5
    assert len(cfg) == 9

    dup = tmp_path / "dup.cfg"
    dup.write_text("params.mu = 0.1\nparams.mu = 0.2\n")
    with pytest.raises(ConfigError, match="duplicate key"):
        load_config(str(dup))

    bad = tmp_path / "bad.cfg"
    bad.write_text("\n# fine\nparams.nope = 3\n")
    with pytest.raises(ConfigError, match=r"bad\.cfg:3"):
        load_config(str(bad))


def test_apply_overrides(p1_cfg):
    cfg = load_config(p1_cfg)
    out = apply_overrides(cfg, ["params.mu2=inf", "grid.L=50"])
    assert math.isinf(out["params.mu2"])
    assert out["grid.L"] == 50.0
    assert cfg["params.mu2"] == 4.0  # the input mapping is untouched


def test_params_from_config(p1_cfg):
    p = params_from_config(load_config(p1_cfg))
    assert p.gamma == 0.5 and p.mu2 == 4.0 and p.beta == 2.0
    with pytest.raises(ConfigError, match="params.epsilon"):
        params_from_config({"params.gamma": 0.5})
    # constructor rejections surface as config errors
    bad = dict(load_config(p1_cfg), **{"params.gamma": 1.5})
    with pytest.raises(ConfigError):
        params_from_config(bad)


def test_resolved_config_and_sanitize():
    resolved = resolved_config({"params.mu2": math.inf, "grid.N": 256})
    assert resolved["params.mu2"] == "inf"
    assert resolved["grid.N"] == 256

    out = sanitize(
        {
            "arr": np.arange(3, dtype=np.float64),
            "f": np.float64(1.5),
            "i": np.int64(7),
            "inf": math.inf,
            "ninf": -math.inf,
            "nan": math.nan,
            "nested": [np.float32(2.0), {"x": np.inf}],
        }
    )
    assert out["arr"] == [0.0, 1.0, 2.0]
    assert out["f"] == 1.5 and isinstance(out["f"], float)
    assert out["i"] == 7 and isinstance(out["i"], int)
    assert out["inf"] == "inf" and out["ninf"] == "-inf" and out["nan"] == "nan"
    assert out["nested"][1]["x"] == "inf"
    json.dumps(out)  # must be serializable as-is


def test_write_json_embeds_config(tmp_path):
    path = tmp_path / "r.json"
    write_json(str(path), {"value": 1.0}, {"params.mu2": math.inf})
    data = json.loads(path.read_text())
    assert data["value"] == 1.0
    assert data["config"]["params.mu2"] == "inf"


def test_cli_validate_pass_and_fail(p1_cfg, tmp_path, capsys):
    out = str(tmp_path / "ok")
    assert main(["validate", "--config", p1_cfg, "--out", out]) == 0
    report = json.loads((tmp_path / "ok" / "admissibility.json").read_text())
    assert report["admissible"] is True
    assert (tmp_path / "ok" / "meta.json").exists()
    assert "admissible" in capsys.readouterr().out

    bad = str(tmp_path / "bad")
    code = main([
        "validate", "--config", p1_cfg, "--out", bad, "--set", "validate.omega=0.2",
    ])
    assert code == 1
    report = json.loads((tmp_path / "bad" / "admissibility.json").read_text())
    assert report["admissible"] is False
    assert any("speed" in v for v in report["violations"])


def test_cli_config_error_exits_2(p1_cfg, tmp_path, capsys):
    out = str(tmp_path / "o")
    code = main(["validate", "--config", p1_cfg, "--out", out, "--set", "params.bogus=1"])
    assert code == 2
    assert "config error" in capsys.readouterr().err

    code = main(["solve", "--out", out, "--set", "params.gamma=0.5"])
    assert code == 2
    err = capsys.readouterr().err
    assert "config error" in err and "missing required keys" in err


def test_cli_solve_decay_pipeline(p1_cfg, tmp_path, capsys):
    out = str(tmp_path / "bo")
    code = main([
        "solve", "--config", p1_cfg, "--out", out,
        "--set", "params.mu2=inf",
        "--set", "grid.L=50", "--set", "grid.N=512",
        "--set", "solve.family=BO",
    ])
    assert code == 0
    report = json.loads((tmp_path / "bo" / "report.json").read_text())
    assert report["family"] == "BO"
    assert report["residuals"][-1] < 1e-9
    assert (tmp_path / "bo" / "branch" / "branch.json").exists()

    dec = str(tmp_path / "dec")
    code = main([
        "decay", "--config", p1_cfg, "--out", dec,
        "--set", "params.mu2=inf",
        "--set", f"decay.branch_dir={out}/branch",
        "--set", "decay.kind=algebraic",
        "--set", "decay.window_lo=8", "--set", "decay.window_hi=16",
    ])
    assert code == 0
    fit = json.loads((tmp_path / "dec" / "decay_nu.json").read_text())
    assert fit["kind"] == "algebraic"
    assert "non-plateau" not in fit["flags"]

    code = main([
        "decay", "--config", p1_cfg, "--out", dec,
        "--set", f"decay.branch_dir={out}/branch",
        "--set", "decay.field=zeta",
    ])
    assert code == 2
    capsys.readouterr()


def test_cli_solve_is_deterministic(p1_cfg, tmp_path):
    args = [
        "solve", "--config", p1_cfg,
        "--set", "params.mu2=inf",
        "--set", "grid.L=50", "--set", "grid.N=512",
        "--set", "solve.family=BO", "--set", "seed=3",
    ]
    out1, out2 = str(tmp_path / "r1"), str(tmp_path / "r2")
    assert main(args + ["--out", out1]) == 0
    assert main(args + ["--out", out2]) == 0
    b1 = (tmp_path / "r1" / "report.json").read_bytes()
    b2 = (tmp_path / "r2" / "report.json").read_bytes()
    assert b1 == b2


def test_cli_kernel_check_k1(tmp_path, capsys):
    out = str(tmp_path / "kc")
    code = main(["kernel-check", "--out", out, "--set", "kernel.which=K1"])
    assert code == 0
    data = json.loads((tmp_path / "kc" / "kernel_check.json").read_text())
    assert data["K1"]["max_abs_diff"] < 1e-5
    assert "kernel-check" in capsys.readouterr().out


def test_cli_evolve_gaussian(p1_cfg, tmp_path):
    out = str(tmp_path / "evo")
    code = main([
        "evolve", "--config", p1_cfg, "--out", out,
        "--family", "bfd_finite", "--T", "0.2", "--dt", "0.02",
        "--snapshots-every", "0.1",
        "--set", "grid.L=20", "--set", "grid.N=128",
    ])
    assert code == 0
    traj = json.loads((tmp_path / "evo" / "trajectory.json").read_text())
    assert traj["status"] == "completed"
    assert traj["condH"]["satisfied"] is True
    assert traj["h_drift_max"] < 1e-10
    assert (tmp_path / "evo" / "final_state.csv").exists()
    snaps = list((tmp_path / "evo").glob("snapshot_t*.csv"))
    assert len(snaps) >= 2


def test_cli_sweep_small(tmp_path, capsys):
    out = str(tmp_path / "sw")
    code = main([
        "sweep", "--out", out,
        "--set", "sweep.draws=2", "--set", "sweep.fields_per_draw=2",
        "--set", "seed=5",
    ])
    assert code == 0
    data = json.loads((tmp_path / "sw" / "sweep.json").read_text())
    assert data["draws"] == 2
    assert data["violations"] == []
    assert data["min_quadratic_form"] > 0.0
    assert "sweep" in capsys.readouterr().out
