import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from spreadfft.cli import (
    DEFAULT_CONFIG,
    cmd_compare,
    cmd_mc,
    cmd_price,
    cmd_selftest,
    cmd_sweep,
    main,
    parse_config,
)
from spreadfft.errors import ParseError, ValidationError
from spreadfft.model import IndependentVolModel, benchmark_proportional

REPO_ROOT = Path(__file__).resolve().parents[1]
BENCHMARK_CFG = REPO_ROOT / "benchmark.cfg"


# ------------------------------------------------------------------- parsing

def test_shipped_benchmark_config_matches_reference_set():
    cfg = parse_config(BENCHMARK_CFG)
    model, state = benchmark_proportional()
    assert isinstance(cfg.model, type(model))
    np.testing.assert_array_equal(cfg.model.sigma, model.sigma)
    assert cfg.model.cir == model.cir
    assert cfg.model.rho_ss == model.rho_ss
    np.testing.assert_array_equal(cfg.model.rho_sv, model.rho_sv)
    assert cfg.model.jumps.lam == model.jumps.lam
    np.testing.assert_array_equal(cfg.model.jumps.k_bar, model.jumps.k_bar)
    np.testing.assert_array_equal(cfg.model.jumps.jump_cov, model.jumps.jump_cov)
    np.testing.assert_array_equal(cfg.market.s0, state.s0)
    assert cfg.market.r == state.r
    assert cfg.contract.strike == 2.0
    assert cfg.contract.maturity == 1.0
    assert cfg.fft.n == 512 and cfg.fft.eps == (-3.0, 1.0) and cfg.fft.u_min == 40.0


def test_builtin_defaults_equal_shipped_file():
    # the canonical text forms coincide, so every derived object does too
    assert parse_config(None).raw == parse_config(BENCHMARK_CFG).raw


def test_missing_strike_names_field(tmp_path):
    text = DEFAULT_CONFIG.replace("K = 2\n", "")
    path = tmp_path / "c.cfg"
    path.write_text(text)
    with pytest.raises(ValidationError) as err:
        parse_config(path)
    assert any("contract.K" in f for f in err.value.fields)


def test_invalid_damping_names_field(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text(DEFAULT_CONFIG.replace("eps = -3, 1", "eps = 0, 0"))
    with pytest.raises(ValidationError) as err:
        parse_config(path)
    assert any("damping region" in f for f in err.value.fields)


def test_parse_error_carries_line_number(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("[model]\nsigma 1, 0.5\n")
    with pytest.raises(ParseError) as err:
        parse_config(path)
    assert "line" in str(err.value).lower()


def test_unknown_keys_rejected(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text(DEFAULT_CONFIG + "\n[model]\n" if False else DEFAULT_CONFIG.replace(
        "[market]", "[market]\nbogus = 1"))
    with pytest.raises(ValidationError) as err:
        parse_config(path)
    assert any("market.bogus" in f for f in err.value.fields)


def test_set_overrides_apply():
    cfg = parse_config(None, overrides=["contract.K=4", "model.sigma=1, 1"])
    assert cfg.contract.strike == 4.0
    assert list(cfg.model.sigma) == [1.0, 1.0]
    with pytest.raises(ValidationError):
        parse_config(None, overrides=["contract.bogus=1"])


def test_independent_variant_parses(tmp_path):
    text = DEFAULT_CONFIG.replace("variant = proportional", "variant = independent")
    text = text.replace("rho_ss = 0.5\n", "")
    path = tmp_path / "c.cfg"
    path.write_text(text)
    cfg = parse_config(path)
    assert isinstance(cfg.model, IndependentVolModel)
    assert cfg.model.cir[0].kappa == 1.0 and cfg.model.cir[1].kappa == 1.0


def test_independent_variant_rejects_rho_ss(tmp_path):
    text = DEFAULT_CONFIG.replace("variant = proportional", "variant = independent")
    path = tmp_path / "c.cfg"
    path.write_text(text)
    with pytest.raises(ValidationError) as err:
        parse_config(path)
    assert any("rho_ss" in f for f in err.value.fields)


def test_mc_disabled_with_zero_paths():
    cfg = parse_config(None, overrides=["mc.n_paths=0"])
    assert cfg.mc is None


# ------------------------------------------------------------------ commands

def test_cmd_price_record_and_determinism():
    cfg = parse_config(None, overrides=["fft.n=128"])
    a = json.loads(cmd_price(cfg))
    b = json.loads(cmd_price(cfg))
    for record in (a, b):
        assert {"price", "strike", "maturity", "grid", "cf_evals",
                "warnings", "elapsed_seconds"} <= set(record)
    a.pop("elapsed_seconds"); b.pop("elapsed_seconds")
    assert a == b
    assert a["grid"]["n"] == 128
    assert a["cf_evals"] == 128 * 128


def test_cmd_mc_runs():
    cfg = parse_config(None, overrides=["mc.n_paths=4096", "mc.n_steps=10"])
    rec = json.loads(cmd_mc(cfg))
    assert rec["n_paths"] == 4096 and rec["seed"] == 42
    assert rec["std_error"] > 0


def test_cmd_compare_layout_and_consistency():
    cfg = parse_config(None, overrides=["mc.n_paths=20000", "mc.n_steps=50", "fft.n=256"])
    csv_text = cmd_compare(cfg, strikes=[4.0, 2.0, 3.0])
    lines = csv_text.strip().split("\n")
    assert lines[0] == "K,mc_price,mc_stderr,fft_price,rel_err_percent"
    ks = [float(row.split(",")[0]) for row in lines[1:]]
    assert ks == sorted(ks) == [2.0, 3.0, 4.0]
    for row in lines[1:]:
        k, mc_p, mc_se, fft_p, rel = row.split(",")
        assert float(rel) == pytest.approx(
            100.0 * (float(fft_p) - float(mc_p)) / float(mc_p), abs=5e-6)
        # engines agree within a few MC standard errors at this scale
        assert abs(float(fft_p) - float(mc_p)) < 4 * float(mc_se)
        assert abs(float(rel)) < 1.0


def test_cmd_compare_byte_identical_reruns():
    cfg = parse_config(None, overrides=["mc.n_paths=8192", "mc.n_steps=20", "fft.n=128"])
    assert cmd_compare(cfg, strikes=[2.0, 3.0]) == cmd_compare(cfg, strikes=[2.0, 3.0])


def test_cmd_compare_fft_only_mode():
    cfg = parse_config(None, overrides=["mc.n_paths=0", "fft.n=128"])
    lines = cmd_compare(cfg, strikes=[2.0, 3.0]).strip().split("\n")
    for row in lines[1:]:
        k, mc_p, mc_se, fft_p, rel = row.split(",")
        assert mc_p == "" and mc_se == "" and rel == ""
        assert float(fft_p) > 0


def test_cmd_sweep_single_cell_matches_price(tmp_path):
    text = DEFAULT_CONFIG + "\n[sweep]\naxis1 = contract.K\naxis1_values = 2\n"
    path = tmp_path / "c.cfg"
    path.write_text(text)
    cfg = parse_config(path, overrides=["fft.n=128"])
    csv_text, had_errors = cmd_sweep(cfg)
    assert not had_errors
    lines = csv_text.strip().split("\n")
    assert lines[0] == "contract.K,price"
    price = float(lines[1].split(",")[1])
    direct = json.loads(cmd_price(cfg))["price"]
    assert price == pytest.approx(direct, abs=5e-7)


def test_cmd_sweep_two_axes_layout(tmp_path):
    text = DEFAULT_CONFIG + ("\n[sweep]\naxis1 = lambda\naxis1_values = 0.5, 1\n"
                             "axis2 = rho_ss\naxis2_values = -0.5 : 0.5 : 3\n")
    path = tmp_path / "c.cfg"
    path.write_text(text)
    cfg = parse_config(path, overrides=["fft.n=128", "contract.K=1"])
    csv_text, had_errors = cmd_sweep(cfg)
    assert not had_errors
    lines = csv_text.strip().split("\n")
    assert lines[0] == "model.lambda\\model.rho_ss,-0.5,0,0.5"
    assert len(lines) == 3
    grid = np.array([[float(v) for v in row.split(",")[1:]] for row in lines[1:]])
    assert grid.shape == (2, 3)
    # price decreases with asset correlation and increases with intensity
    assert np.all(np.diff(grid, axis=1) < 0)
    assert np.all(np.diff(grid, axis=0) > 0)


def test_cmd_sweep_captures_cell_errors(tmp_path):
    # second damping component sweeps out of the valid region: the offending
    # cells carry an error code and the run still completes
    text = DEFAULT_CONFIG + "\n[sweep]\naxis1 = fft.eps2\naxis1_values = 0.5, 2.5\n"
    path = tmp_path / "c.cfg"
    path.write_text(text)
    cfg = parse_config(path, overrides=["fft.n=128"])
    csv_text, had_errors = cmd_sweep(cfg)
    assert had_errors
    lines = csv_text.strip().split("\n")
    assert "ERR:ValidationError" in lines[2] or "ERR:DampingViolation" in lines[2]
    assert float(lines[1].split(",")[1]) > 0


def test_cmd_sweep_workers_deterministic(tmp_path):
    text = DEFAULT_CONFIG + ("\n[sweep]\naxis1 = contract.K\naxis1_values = 2 : 4 : 5\n")
    path = tmp_path / "c.cfg"
    path.write_text(text)
    cfg = parse_config(path, overrides=["fft.n=128"])
    a, _ = cmd_sweep(cfg, workers=1)
    b, _ = cmd_sweep(cfg, workers=3)
    assert a == b


def test_sweep_axis_resolution_error(tmp_path):
    text = DEFAULT_CONFIG + "\n[sweep]\naxis1 = nonsense\naxis1_values = 1, 2\n"
    path = tmp_path / "c.cfg"
    path.write_text(text)
    with pytest.raises(ValidationError):
        parse_config(path)


def test_csv_formatting_conventions():
    cfg = parse_config(None, overrides=["mc.n_paths=0", "fft.n=128"])
    text = cmd_compare(cfg, strikes=[2.0])
    assert "\r" not in text
    assert text.endswith("\n")
    fft_field = text.strip().split("\n")[1].split(",")[3]
    assert len(fft_field.split(".")[1]) == 6      # fixed 6-decimal prices


# ---------------------------------------------------------------- CLI driver

def test_selftest_passes():
    report, ok = cmd_selftest()
    assert ok, report
    assert "PASS" in report and "FAIL" not in report


def test_main_price_roundtrip(tmp_path):
    out = tmp_path / "price.json"
    rc = main(["--config", str(BENCHMARK_CFG), "--set", "fft.n=128",
               "--out", str(out), "price"])
    assert rc == 0
    rec = json.loads(out.read_text())
    assert rec["price"] > 0


def test_main_exit_codes(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text(DEFAULT_CONFIG.replace("K = 2\n", ""))
    assert main(["--config", str(bad), "price"]) == 2

    r = subprocess.run([sys.executable, "-m", "spreadfft.cli", "--help"],
                       capture_output=True, text=True)
    assert r.returncode == 0
    for cmd in ("price", "mc", "compare", "sweep", "selftest"):
        assert cmd in r.stdout

    r = subprocess.run([sys.executable, "-m", "spreadfft.cli", "--bogus", "price"],
                       capture_output=True, text=True)
    assert r.returncode != 0


def test_main_seed_override():
    rec1 = json.loads(cmd_mc(parse_config(None, overrides=["mc.n_paths=4096",
                                                           "mc.n_steps=5", "mc.seed=7"])))
    rec2 = json.loads(cmd_mc(parse_config(None, overrides=["mc.n_paths=4096",
                                                           "mc.n_steps=5", "mc.seed=8"])))
    assert rec1["estimate"] != rec2["estimate"]
