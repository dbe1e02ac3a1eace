"""Command-line driver: config ingestion, pricing commands, CSV/JSON output.

Config files are flat INI-style text: ``[section]`` headers, ``key = value``
lines, ``#`` comments. Sections and keys:

    [model]    variant (proportional|independent), sigma, kappa, v_bar,
               vol_of_vol, v0, lambda, k_bar, delta, jump_corr,
               rho_ss (proportional only), rho_sv
    [market]   s0, r
    [contract] K, T            (required; everything else has defaults)
    [fft]      n, u_min, eps, sign_convention (positive|negative)
    [mc]       n_paths, n_steps, seed, antithetic
    [sweep]    axis1, axis1_values, axis2, axis2_values

Two-asset vector values are comma pairs (``sigma = 1, 0.5``); for the
independent variant the CIR keys accept one value (shared by both assets)
or a comma pair. Axis values are either explicit comma lists or
``start : stop : count`` ranges. Commands: price, mc, compare, sweep,
selftest.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import fft_pricer, mc_engine
from .errors import DampingViolation, ParseError, SpreadFftError, ValidationError
from .fft_pricer import FftGridConfig, price_spread_fft
from .mc_engine import McConfig, price_spread_mc
from .model import (
    CirParams,
    IndependentVolModel,
    JumpParams,
    MarketState,
    ProportionalVolModel,
    SpreadContract,
    validate,
)

__all__ = ["RunConfig", "SweepCell", "parse_config", "cmd_price", "cmd_mc",
           "cmd_compare", "cmd_sweep", "cmd_selftest", "main", "DEFAULT_CONFIG"]

# Matches the shipped benchmark.cfg: reference parameter set, K = 2, T = 1.
DEFAULT_CONFIG = """\
[model]
variant = proportional
sigma = 1, 0.5
kappa = 1
v_bar = 0.04
vol_of_vol = 0.05
v0 = 0.04
lambda = 1
k_bar = 0.05, 0.05
delta = 0.05, 0.05
jump_corr = 0
rho_ss = 0.5
rho_sv = -0.5, 0.25

[market]
s0 = 100, 96
r = 0.1

[contract]
K = 2
T = 1

[fft]
n = 512
u_min = 40
eps = -3, 1
sign_convention = positive

[mc]
n_paths = 100000
n_steps = 500
seed = 42
antithetic = false
"""

_SCHEMA = {
    "model": {"variant", "sigma", "kappa", "v_bar", "vol_of_vol", "v0", "lambda",
              "k_bar", "delta", "jump_corr", "rho_ss", "rho_sv"},
    "market": {"s0", "r"},
    "contract": {"K", "T"},
    "fft": {"n", "u_min", "eps", "sign_convention"},
    "mc": {"n_paths", "n_steps", "seed", "antithetic"},
    "sweep": {"axis1", "axis1_values", "axis2", "axis2_values"},
}

_DEFAULTS = {
    "model": {"variant": "proportional", "sigma": "1, 0.5", "kappa": "1",
              "v_bar": "0.04", "vol_of_vol": "0.05", "v0": "0.04", "lambda": "1",
              "k_bar": "0.05, 0.05", "delta": "0.05, 0.05", "jump_corr": "0",
              "rho_sv": "-0.5, 0.25"},
    "market": {"s0": "100, 96", "r": "0.1"},
    "contract": {},
    "fft": {"n": "512", "u_min": "40", "eps": "-3, 1", "sign_convention": "positive"},
    "mc": {"n_paths": "100000", "n_steps": "500", "seed": "42", "antithetic": "false"},
    "sweep": {},
}
# rho_ss is defaulted only for the proportional variant (see _build_model).
_RHO_SS_DEFAULT = "0.5"

# Sweepable parameter paths -> (section, key, component index or None).
_SWEEP_PATHS = {
    "model.lambda": ("model", "lambda", None),
    "model.rho_ss": ("model", "rho_ss", None),
    "model.jump_corr": ("model", "jump_corr", None),
    "model.sigma1": ("model", "sigma", 0),
    "model.sigma2": ("model", "sigma", 1),
    "model.k_bar1": ("model", "k_bar", 0),
    "model.k_bar2": ("model", "k_bar", 1),
    "model.delta1": ("model", "delta", 0),
    "model.delta2": ("model", "delta", 1),
    "model.rho_sv1": ("model", "rho_sv", 0),
    "model.rho_sv2": ("model", "rho_sv", 1),
    "model.v0": ("model", "v0", None),
    "model.v_bar": ("model", "v_bar", None),
    "model.kappa": ("model", "kappa", None),
    "model.vol_of_vol": ("model", "vol_of_vol", None),
    "market.s0_1": ("market", "s0", 0),
    "market.s0_2": ("market", "s0", 1),
    "market.r": ("market", "r", None),
    "contract.K": ("contract", "K", None),
    "contract.T": ("contract", "T", None),
    "fft.eps1": ("fft", "eps", 0),
    "fft.eps2": ("fft", "eps", 1),
    "fft.u_min": ("fft", "u_min", None),
    "fft.n": ("fft", "n", None),
}


@dataclass
class SweepCell:
    axis_values: tuple
    price: float | None
    method: str
    warnings: list
    error: str | None = None


@dataclass
class RunConfig:
    model: ProportionalVolModel | IndependentVolModel
    market: MarketState
    contract: SpreadContract
    fft: FftGridConfig
    mc: McConfig | None                   # None = MC disabled (n_paths = 0)
    mc_seed: int
    sweep_axes: list                      # [(path, ndarray of values)], 0..2 entries
    raw: dict                             # canonical text form, for sweep rebuilds


def _parse_float(text, field, errors):
    try:
        return float(text)
    except ValueError:
        errors.append(f"{field}: not a number ({text!r})")
        return math.nan


def _parse_int(text, field, errors):
    try:
        return int(text)
    except ValueError:
        errors.append(f"{field}: not an integer ({text!r})")
        return 0


def _parse_bool(text, field, errors):
    t = text.strip().lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    errors.append(f"{field}: not a boolean ({text!r})")
    return False


def _parse_vec(text, field, errors, n=2):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) == 1:
        parts = parts * n
    if len(parts) != n:
        errors.append(f"{field}: expected {n} comma-separated values ({text!r})")
        return [math.nan] * n
    return [_parse_float(p, field, errors) for p in parts]


def _parse_axis_values(text, field, errors):
    if ":" in text:
        parts = [p.strip() for p in text.split(":")]
        if len(parts) != 3:
            errors.append(f"{field}: ranges are start : stop : count ({text!r})")
            return np.array([])
        start = _parse_float(parts[0], field, errors)
        stop = _parse_float(parts[1], field, errors)
        count = _parse_int(parts[2], field, errors)
        if count < 1:
            errors.append(f"{field}: count must be >= 1")
            return np.array([])
        return np.linspace(start, stop, count)
    return np.array([_parse_float(p.strip(), field, errors) for p in text.split(",") if p.strip()])


def _read_sections(text: str) -> dict:
    cp = configparser.ConfigParser(delimiters=("=",), inline_comment_prefixes=("#",),
                                   interpolation=None, strict=True)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ParseError(str(exc)) from exc
    return {section: dict(cp.items(section)) for section in cp.sections()}


def _canonical(raw: dict, errors: list) -> dict:
    """Validate section/key names and fill defaults; values stay textual."""
    data = {section: dict(defaults) for section, defaults in _DEFAULTS.items()}
    for section, entries in raw.items():
        if section not in _SCHEMA:
            errors.append(f"{section}: unknown section")
            continue
        for key, value in entries.items():
            if key not in _SCHEMA[section]:
                errors.append(f"{section}.{key}: unknown key")
            else:
                data[section][key] = value
    return data


def _build_model(md: dict, errors: list):
    variant = md.get("variant", "proportional").strip().lower()
    if variant not in ("proportional", "independent"):
        errors.append(f"model.variant: must be proportional or independent, got {variant!r}")
        return None
    sigma = _parse_vec(md["sigma"], "model.sigma", errors)
    lam = _parse_float(md["lambda"], "model.lambda", errors)
    k_bar = _parse_vec(md["k_bar"], "model.k_bar", errors)
    delta = _parse_vec(md["delta"], "model.delta", errors)
    jump_corr = _parse_float(md["jump_corr"], "model.jump_corr", errors)
    rho_sv = _parse_vec(md["rho_sv"], "model.rho_sv", errors)
    if errors:
        return None
    jumps = JumpParams.from_stdevs(lam, k_bar, delta, corr=jump_corr)

    if variant == "proportional":
        kappa = _parse_float(md["kappa"], "model.kappa", errors)
        v_bar = _parse_float(md["v_bar"], "model.v_bar", errors)
        vov = _parse_float(md["vol_of_vol"], "model.vol_of_vol", errors)
        v0 = _parse_float(md["v0"], "model.v0", errors)
        rho_ss = _parse_float(md.get("rho_ss", _RHO_SS_DEFAULT), "model.rho_ss", errors)
        if errors:
            return None
        return ProportionalVolModel(sigma=sigma, cir=CirParams(kappa, v_bar, vov, v0),
                                    rho_ss=rho_ss, rho_sv=rho_sv, jumps=jumps)

    if "rho_ss" in md:
        errors.append("model.rho_ss: not a parameter of the independent variant")
        return None
    kappa = _parse_vec(md["kappa"], "model.kappa", errors)
    v_bar = _parse_vec(md["v_bar"], "model.v_bar", errors)
    vov = _parse_vec(md["vol_of_vol"], "model.vol_of_vol", errors)
    v0 = _parse_vec(md["v0"], "model.v0", errors)
    if errors:
        return None
    cirs = tuple(CirParams(kappa[m], v_bar[m], vov[m], v0[m]) for m in range(2))
    return IndependentVolModel(sigma=sigma, cir=cirs, rho_sv=rho_sv, jumps=jumps)


def _build_config(data: dict) -> RunConfig:
    errors: list[str] = []

    model_errors: list[str] = []
    model = _build_model(dict(data["model"]), model_errors)
    errors += model_errors

    market = None
    part: list[str] = []
    s0 = _parse_vec(data["market"]["s0"], "market.s0", part)
    r = _parse_float(data["market"]["r"], "market.r", part)
    if not part:
        try:
            market = MarketState(s0=s0, r=r)
        except ValueError as exc:
            part.append(f"market.s0: {exc}")
    errors += part

    contract = None
    part = [f"contract.{k}: required" for k in ("K", "T") if k not in data["contract"]]
    if not part:
        strike = _parse_float(data["contract"]["K"], "contract.K", part)
        mat = _parse_float(data["contract"]["T"], "contract.T", part)
        if not part:
            try:
                contract = SpreadContract(strike=strike, maturity=mat)
            except ValueError as exc:
                part.append(f"contract: {exc}")
    errors += part

    fft_cfg = None
    part = []
    n = _parse_int(data["fft"]["n"], "fft.n", part)
    u_min = _parse_float(data["fft"]["u_min"], "fft.u_min", part)
    eps = _parse_vec(data["fft"]["eps"], "fft.eps", part)
    sign_text = data["fft"]["sign_convention"].strip().lower()
    sign = {"positive": 1, "+1": 1, "negative": -1, "-1": -1}.get(sign_text)
    if sign is None:
        part.append(f"fft.sign_convention: must be positive or negative, got {sign_text!r}")
    if not part:
        try:
            fft_cfg = FftGridConfig(n=n, u_min=u_min, eps=tuple(eps), sign_convention=sign)
        except DampingViolation as exc:
            part.append(f"fft.eps: outside damping region ({exc})")
        except ValueError as exc:
            part.append(f"fft: {exc}")
    errors += part

    mc_cfg = None
    part = []
    n_paths = _parse_int(data["mc"]["n_paths"], "mc.n_paths", part)
    n_steps = _parse_int(data["mc"]["n_steps"], "mc.n_steps", part)
    seed = _parse_int(data["mc"]["seed"], "mc.seed", part)
    antithetic = _parse_bool(data["mc"]["antithetic"], "mc.antithetic", part)
    if not part and n_paths > 0:
        try:
            mc_cfg = McConfig(n_paths=n_paths, n_steps=n_steps, seed=seed, antithetic=antithetic)
        except ValueError as exc:
            part.append(f"mc: {exc}")
    errors += part

    sweep_axes = []
    sw = data["sweep"]
    for axis in ("axis1", "axis2"):
        if axis in sw:
            path = _resolve_sweep_path(sw[axis].strip(), errors)
            values = _parse_axis_values(sw.get(f"{axis}_values", ""), f"sweep.{axis}_values", errors)
            if values.size == 0:
                errors.append(f"sweep.{axis}_values: required with sweep.{axis}")
            if path is not None:
                sweep_axes.append((path, values))
        elif f"{axis}_values" in sw:
            errors.append(f"sweep.{axis}: required with sweep.{axis}_values")
    if "axis2" in sw and "axis1" not in sw:
        errors.append("sweep.axis1: required before axis2")

    if model is not None:
        report = validate(model)
        errors.extend(f"model: {v}" for v in report.violations)

    if errors:
        raise ValidationError("invalid config: " + "; ".join(errors), fields=errors)
    return RunConfig(model=model, market=market, contract=contract, fft=fft_cfg,
                     mc=mc_cfg, mc_seed=seed, sweep_axes=sweep_axes, raw=data)


def _resolve_sweep_path(name: str, errors: list):
    if name in _SWEEP_PATHS:
        return name
    matches = [p for p in _SWEEP_PATHS if p.split(".", 1)[1] == name]
    if len(matches) == 1:
        return matches[0]
    errors.append(f"sweep axis {name!r} does not resolve to a config path")
    return None


def _apply_set(data: dict, assignment: str) -> None:
    if "=" not in assignment:
        raise ValidationError(f"--set expects section.key=value, got {assignment!r}",
                              fields=[assignment])
    path, value = assignment.split("=", 1)
    path = path.strip()
    if "." not in path:
        raise ValidationError(f"--set path must be section.key, got {path!r}", fields=[path])
    section, key = path.split(".", 1)
    if section not in _SCHEMA or key not in _SCHEMA[section]:
        raise ValidationError(f"--set {path}: unknown config field", fields=[path])
    data[section][key] = value.strip()


def parse_config(source=None, overrides=()) -> RunConfig:
    """Load and validate a run configuration.

    ``source`` is a file path, ``-`` for stdin, or None for the built-in
    benchmark defaults. ``overrides`` are ``section.key=value`` strings
    applied before validation. Raises ParseError for malformed text (the
    message carries the line number) and ValidationError listing every
    offending field.
    """
    if source is None:
        text = DEFAULT_CONFIG
    elif source == "-":
        text = sys.stdin.read()
    else:
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    raw = _read_sections(text)
    errors: list[str] = []
    data = _canonical(raw, errors)
    if errors:
        raise ValidationError("invalid config: " + "; ".join(errors), fields=errors)
    for assignment in overrides:
        _apply_set(data, assignment)
    return _build_config(data)


def _rebuilt(cfg: RunConfig, path: str, value: float) -> RunConfig:
    """New RunConfig with one sweepable parameter replaced."""
    section, key, comp = _SWEEP_PATHS[path]
    data = {s: dict(kv) for s, kv in cfg.raw.items()}
    if comp is None:
        text = repr(int(value)) if (section, key) == ("fft", "n") else repr(float(value))
        data[section][key] = text
    else:
        errors: list[str] = []
        vec = _parse_vec(data[section][key], path, errors)
        vec[comp] = float(value)
        data[section][key] = f"{vec[0]!r}, {vec[1]!r}"
    return _build_config(data)


def _fmt_price(p: float) -> str:
    return f"{p:.6f}"


def _grid_meta(grid: fft_pricer.FftGrid) -> dict:
    return {
        "n": grid.n,
        "du": list(grid.du),
        "dx": list(grid.dx),
        "u_bar": list(grid.u_bar),
        "x_bar": list(grid.x_bar),
        "target_index": list(grid.target_index),
    }


def cmd_price(cfg: RunConfig) -> str:
    """One FFT price as a single-line JSON record with full provenance."""
    t0 = time.perf_counter()
    res = price_spread_fft(cfg.model, cfg.market, cfg.contract, cfg.fft)
    elapsed = time.perf_counter() - t0
    record = {
        "price": round(res.price, 10),
        "strike": cfg.contract.strike,
        "maturity": cfg.contract.maturity,
        "grid": _grid_meta(res.grid),
        "cf_evals": res.cf_evals,
        "warnings": res.warnings,
        "elapsed_seconds": round(elapsed, 6),
    }
    return json.dumps(record)


def cmd_mc(cfg: RunConfig, workers: int = 1) -> str:
    """One Monte Carlo price as a single-line JSON record."""
    if cfg.mc is None:
        raise ValidationError("mc.n_paths: must be positive for the mc command",
                              fields=["mc.n_paths"])
    res = price_spread_mc(cfg.model, cfg.market, cfg.contract, cfg.mc, workers=workers)
    record = {
        "estimate": round(res.estimate, 10),
        "std_error": round(res.std_error, 10),
        "n_paths": res.n_paths,
        "seed": cfg.mc.seed,
        "elapsed_seconds": round(res.elapsed, 6),
    }
    return json.dumps(record)


def cmd_compare(cfg: RunConfig, strikes=None, workers: int = 1) -> str:
    """CSV comparing MC and FFT prices per strike.

    Columns: K, mc_price, mc_stderr, fft_price, rel_err_percent with
    rel_err_percent = 100 (fft - mc)/mc. Paths are simulated once and
    re-priced per strike. With MC disabled (n_paths = 0) the MC columns
    stay empty. Rows ascend in K.
    """
    ks = sorted(strikes) if strikes else [cfg.contract.strike]
    mc_stats = {}
    if cfg.mc is not None:
        mc_stats = mc_engine.spread_price_stats(cfg.model, cfg.market, cfg.contract.maturity,
                                                ks, cfg.mc, workers=workers)

    lines = ["K,mc_price,mc_stderr,fft_price,rel_err_percent"]
    for k in ks:
        res = price_spread_fft(cfg.model, cfg.market,
                               replace(cfg.contract, strike=k), cfg.fft)
        if cfg.mc is not None:
            mc_mean, mc_se = mc_stats[k]
            rel = 100.0 * (res.price - mc_mean) / mc_mean
            lines.append(f"{k:g},{_fmt_price(mc_mean)},{_fmt_price(mc_se)},"
                         f"{_fmt_price(res.price)},{rel:.6f}")
        else:
            lines.append(f"{k:g},,,{_fmt_price(res.price)},")
    return "\n".join(lines) + "\n"


def _sweep_cell(cfg: RunConfig, combo) -> SweepCell:
    try:
        cell_cfg = cfg
        for path, value in combo:
            cell_cfg = _rebuilt(cell_cfg, path, value)
        res = price_spread_fft(cell_cfg.model, cell_cfg.market, cell_cfg.contract, cell_cfg.fft)
        return SweepCell(axis_values=tuple(v for _, v in combo), price=res.price,
                         method="fft", warnings=res.warnings)
    except (SpreadFftError, ValueError, OverflowError) as exc:
        return SweepCell(axis_values=tuple(v for _, v in combo), price=None,
                         method="fft", warnings=[], error=type(exc).__name__)


def cmd_sweep(cfg: RunConfig, workers: int = 1) -> tuple[str, bool]:
    """CSV sensitivity matrix over one or two parameter axes.

    Two-axis sweeps emit a header row of axis-2 values and one row per
    axis-1 value; single-axis sweeps emit (value, price) rows. Cells
    whose pricing fails carry ERR:<code> and the run continues. Returns
    (csv_text, had_errors).
    """
    if not cfg.sweep_axes:
        raise ValidationError("sweep.axis1: no sweep axes configured", fields=["sweep.axis1"])
    axes = cfg.sweep_axes
    combos = []
    if len(axes) == 1:
        path, values = axes[0]
        combos = [((path, v),) for v in values]
    else:
        (p1, v1), (p2, v2) = axes
        combos = [((p1, a), (p2, b)) for a in v1 for b in v2]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(lambda c: _sweep_cell(cfg, c), combos))
    else:
        cells = [_sweep_cell(cfg, c) for c in combos]

    def cell_text(cell: SweepCell) -> str:
        return f"ERR:{cell.error}" if cell.error else _fmt_price(cell.price)

    had_errors = any(c.error for c in cells)
    if len(axes) == 1:
        path, values = axes[0]
        lines = [f"{path},price"]
        lines += [f"{v:g},{cell_text(c)}" for v, c in zip(values, cells)]
    else:
        (p1, v1), (p2, v2) = axes
        lines = [f"{p1}\\{p2}," + ",".join(f"{v:g}" for v in v2)]
        it = iter(cells)
        for a in v1:
            row = [f"{a:g}"] + [cell_text(next(it)) for _ in v2]
            lines.append(",".join(row))
    return "\n".join(lines) + "\n", had_errors


def cmd_selftest() -> tuple[str, bool]:
    """Fast internal consistency battery; returns (report, all_passed)."""
    from .charfn import cf_proportional
    from .model import benchmark_proportional
    from .payoff import DampedArgument, complex_log_gamma, spread_payoff_hat

    checks = []

    def check(name, fn):
        try:
            ok = bool(fn())
            checks.append((name, ok, ""))
        except Exception as exc:  # report, never abort
            checks.append((name, False, f"{type(exc).__name__}: {exc}"))

    check("log-gamma recurrence", lambda: abs(
        np.exp(complex_log_gamma(3.7 + 2.1j) - complex_log_gamma(2.7 + 2.1j)) - (2.7 + 2.1j)
    ) < 1e-10)
    check("payoff transform at origin", lambda: abs(
        spread_payoff_hat(DampedArgument((0.0, 0.0), (-3.0, 1.0))) - 1.0 / 6.0
    ) < 1e-12)

    def dft_check():
        rng = np.random.default_rng(3)
        a = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        k = np.arange(8)
        ref = np.array([[np.sum(a * np.exp(2j * np.pi * (k[:, None] * l1 + k[None, :] * l2) / 8))
                         for l2 in range(8)] for l1 in range(8)]) / 64
        return np.max(np.abs(fft_pricer.inverse_dft2(a, 1) - ref)) < 1e-10
    check("inverse DFT vs direct sum", dft_check)

    model, state = benchmark_proportional()
    check("cf normalization", lambda: complex(
        cf_proportional((0.0, 0.0), 1.0, model, state).value) == 1.0 + 0.0j)

    def grid_check():
        grid = fft_pricer.build_grid(FftGridConfig(n=256, u_min=40.0), state,
                                     SpreadContract(2.0, 1.0))
        x0 = [math.log(state.s0[m] / 2.0) for m in range(2)]
        on_lattice = all(
            abs(-grid.x_bar[m] + grid.target_index[m] * grid.dx[m] - x0[m]) < 1e-10
            for m in range(2))
        steps = all(abs(grid.du[m] * grid.dx[m] - 2 * math.pi / grid.n) < 1e-12 for m in range(2))
        return on_lattice and steps
    check("grid placement identities", grid_check)

    def price_stability():
        prices = [price_spread_fft(model, state, SpreadContract(2.0, 1.0),
                                   FftGridConfig(n=n, u_min=40.0)).price for n in (256, 512)]
        return abs(prices[0] - prices[1]) < 2e-4
    check("price grid stability", price_stability)

    def mc_repro():
        cfg = McConfig(n_paths=4096, n_steps=50, seed=9)
        a = price_spread_mc(model, state, SpreadContract(2.0, 1.0), cfg, workers=1)
        b = price_spread_mc(model, state, SpreadContract(2.0, 1.0), cfg, workers=2)
        return a.estimate == b.estimate
    check("mc reproducibility", mc_repro)

    lines = [f"{'PASS' if ok else 'FAIL'} {name}" + (f" ({note})" if note else "")
             for name, ok, note in checks]
    return "\n".join(lines) + "\n", all(ok for _, ok, _ in checks)


def _write_out(text: str, out_path) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="spreadfft",
        description="Spread-option pricing by damped bivariate FFT with a Monte Carlo cross-check.",
    )
    parser.add_argument("--config", default=None, help="config file path, or - for stdin")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config entry (section.key=value); repeatable")
    parser.add_argument("--out", default=None, help="output path (default stdout)")
    parser.add_argument("--seed", type=int, default=None, help="override mc.seed")
    parser.add_argument("--threads", type=int, default=1, help="worker threads")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("price", help="FFT price as one JSON line")
    sub.add_parser("mc", help="Monte Carlo price as one JSON line")
    cmp_p = sub.add_parser("compare", help="CSV of MC vs FFT prices per strike")
    cmp_p.add_argument("--strikes", default=None,
                       help="comma-separated strike list (default: contract.K)")
    sub.add_parser("sweep", help="CSV sensitivity matrix over configured axes")
    sub.add_parser("selftest", help="run the internal consistency battery")

    args = parser.parse_args(argv)

    try:
        if args.command == "selftest":
            report, ok = cmd_selftest()
            _write_out(report, args.out)
            return 0 if ok else 1

        overrides = list(args.set)
        if args.seed is not None:
            overrides.append(f"mc.seed={args.seed}")
        cfg = parse_config(args.config, overrides=overrides)

        if args.command == "price":
            _write_out(cmd_price(cfg) + "\n", args.out)
            return 0
        if args.command == "mc":
            _write_out(cmd_mc(cfg, workers=args.threads) + "\n", args.out)
            return 0
        if args.command == "compare":
            strikes = None
            if args.strikes:
                strikes = [float(s) for s in args.strikes.split(",") if s.strip()]
            _write_out(cmd_compare(cfg, strikes=strikes, workers=args.threads), args.out)
            return 0
        if args.command == "sweep":
            text, had_errors = cmd_sweep(cfg, workers=args.threads)
            _write_out(text, args.out)
            return 1 if had_errors else 0
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SpreadFftError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
