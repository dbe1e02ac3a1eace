"""Monte Carlo oracle for both market models.

Correlated Euler simulation of the log-price dynamics with
full-truncation variance stepping and common-clock compound-Poisson
jumps. Paths are generated in fixed-size chunks, each driven by a
counter-based Philox stream keyed by (seed, chunk index), and partial
sums are reduced in chunk order, so estimates are bit-identical across
runs and worker counts.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import NotPsd
from .model import MarketState, ProportionalVolModel, SpreadContract

__all__ = ["McConfig", "McResult", "CfEstimate", "chol3", "simulate_terminal",
           "price_spread_mc", "spread_price_stats", "empirical_cf"]

CHUNK = 1 << 16   # paths per RNG stream; fixed so results never depend on scheduling


@dataclass(frozen=True)
class McConfig:
    n_paths: int = 1_000_000
    n_steps: int = 2000        # per year; total steps scale with maturity
    seed: int = 0
    antithetic: bool = False

    def __post_init__(self):
        if self.n_paths < 2:
            raise ValueError("n_paths must be >= 2")
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        if self.antithetic and self.n_paths % 2:
            raise ValueError("antithetic sampling needs an even n_paths")


@dataclass
class McResult:
    estimate: float
    std_error: float
    n_paths: int
    elapsed: float


@dataclass
class CfEstimate:
    """Empirical characteristic function with per-component standard errors."""
    value: np.ndarray | complex
    stderr_re: np.ndarray | float
    stderr_im: np.ndarray | float
    n_paths: int


def chol3(corr) -> np.ndarray:
    """Lower-triangular factor of a small correlation matrix.

    Pivots below -1e-12 raise NotPsd; slightly negative pivots within
    that tolerance are clamped to zero, so any matrix accepted here
    factors after at most 1e-12 of diagonal jitter.
    """
    a = np.array(corr, dtype=float)
    n = a.shape[0]
    if a.ndim != 2 or a.shape != (n, n):
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.allclose(a, a.T, atol=1e-12):
        raise ValueError("correlation matrix must be symmetric")
    if not np.allclose(np.diag(a), 1.0, atol=1e-12):
        raise ValueError("correlation matrix must have unit diagonal")
    low = np.zeros_like(a)
    for i in range(n):
        for j in range(i + 1):
            s = a[i, j] - low[i, :j] @ low[j, :j]
            if i == j:
                if s < -1e-12:
                    raise NotPsd(f"pivot {s:.3g} at row {i} below -1e-12")
                low[i, i] = math.sqrt(max(s, 0.0))
            else:
                low[i, j] = s / low[j, j] if low[j, j] > 0.0 else 0.0
    return low


def _chol_cov(cov) -> np.ndarray:
    """Factor a small covariance matrix, tolerating semidefiniteness."""
    cov = np.asarray(cov, dtype=float)
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        jitter = 1e-12 * max(np.trace(cov), 1.0)
        try:
            return np.linalg.cholesky(cov + jitter * np.eye(cov.shape[0]))
        except np.linalg.LinAlgError:
            raise NotPsd("jump covariance is not positive semi-definite") from None


def _driver_setup(model):
    """Driver correlation factor and index layout per model family."""
    if isinstance(model, ProportionalVolModel):
        return chol3(model.driver_correlation()), ("s1", "s2", "v")
    corr = np.eye(4)
    corr[0, 2] = corr[2, 0] = model.rho_sv[0]
    corr[1, 3] = corr[3, 1] = model.rho_sv[1]
    return chol3(corr), ("s1", "s2", "v1", "v2")


def _chunk_counts(n_paths: int):
    counts = []
    remaining = n_paths
    while remaining > 0:
        counts.append(min(CHUNK, remaining))
        remaining -= CHUNK
    return counts


def _simulate_chunk(model, state, maturity, cfg, chunk_index, count, debug=False):
    """Terminal log-prices for one chunk; deterministic in (cfg.seed, chunk_index)."""
    rng = np.random.Generator(np.random.Philox(key=[cfg.seed, chunk_index]))
    n_steps = max(1, round(cfg.n_steps * maturity))
    dt = maturity / n_steps
    sdt = math.sqrt(dt)

    proportional = isinstance(model, ProportionalVolModel)
    low, _ = _driver_setup(model)
    n_drv = low.shape[0]
    lam = model.jumps.lam
    k_bar = model.jumps.k_bar
    jump_low = _chol_cov(model.jumps.jump_cov)
    sig = model.sigma
    r = state.r

    h = count // 2 if cfg.antithetic else count
    x = np.tile(np.log(state.s0), (count, 1))
    if proportional:
        v = np.full(count, model.cir.v0)
        cirs = (model.cir,)
    else:
        v = np.tile([model.cir[0].v0, model.cir[1].v0], (count, 1))
        cirs = model.cir

    floored = 0
    w_sums = np.zeros((count, n_drv)) if debug else None

    for _ in range(n_steps):
        z = rng.standard_normal((h, n_drv))
        if cfg.antithetic:
            z = np.concatenate((z, -z), axis=0)
        z = z @ low.T
        if debug:
            w_sums += z * sdt

        if proportional:
            vp = np.maximum(v, 0.0)
            floored += int(np.count_nonzero(v < 0.0))
            root = np.sqrt(vp) * sdt
            x[:, 0] += (r - lam * k_bar[0] - 0.5 * sig[0] ** 2 * vp) * dt + sig[0] * root * z[:, 0]
            x[:, 1] += (r - lam * k_bar[1] - 0.5 * sig[1] ** 2 * vp) * dt + sig[1] * root * z[:, 1]
            v += cirs[0].kappa * (cirs[0].v_bar - vp) * dt + cirs[0].vol_of_vol * root * z[:, 2]
        else:
            vp = np.maximum(v, 0.0)
            floored += int(np.count_nonzero(v < 0.0))
            root = np.sqrt(vp) * sdt
            for m in range(2):
                x[:, m] += (r - lam * k_bar[m] - 0.5 * sig[m] ** 2 * vp[:, m]) * dt \
                    + sig[m] * root[:, m] * z[:, m]
                v[:, m] += cirs[m].kappa * (cirs[m].v_bar - vp[:, m]) * dt \
                    + cirs[m].vol_of_vol * root[:, m] * z[:, 2 + m]

        if lam > 0.0:
            n_jumps = rng.poisson(lam * dt, h)
            jn = rng.standard_normal((h, 2))
            if cfg.antithetic:
                n_jumps = np.concatenate((n_jumps, n_jumps))
                jn = np.concatenate((jn, -jn), axis=0)
            scale = np.sqrt(n_jumps)[:, None]
            x += n_jumps[:, None] * k_bar[None, :] + scale * (jn @ jump_low.T)

    if not debug:
        return x, None
    info = {
        "v_terminal": v,
        "driver_sums": w_sums,
        "floored_fraction": floored / (count * n_steps),
    }
    return x, info


def _map_chunks(model, state, maturity, cfg, workers, debug=False):
    """Yield per-chunk results in chunk order, optionally computed in parallel."""
    counts = _chunk_counts(cfg.n_paths)
    jobs = list(enumerate(counts))
    if workers <= 1:
        for idx, cnt in jobs:
            yield _simulate_chunk(model, state, maturity, cfg, idx, cnt, debug)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_simulate_chunk, model, state, maturity, cfg, idx, cnt, debug)
                       for idx, cnt in jobs]
            for fut in futures:
                yield fut.result()


def simulate_terminal(model, state: MarketState, maturity: float, cfg: McConfig,
                      debug: bool = False, workers: int = 1):
    """Terminal log-price matrix of shape (n_paths, 2).

    With ``debug=True`` also returns a dict carrying terminal variances,
    accumulated Brownian driver values and the fraction of variance steps
    that needed flooring.
    """
    xs, infos = [], []
    for x, info in _map_chunks(model, state, maturity, cfg, workers, debug):
        xs.append(x)
        infos.append(info)
    x = np.concatenate(xs, axis=0)
    if not debug:
        return x
    merged = {
        "v_terminal": np.concatenate([i["v_terminal"] for i in infos], axis=0),
        "driver_sums": np.concatenate([i["driver_sums"] for i in infos], axis=0),
        "floored_fraction": float(np.mean([i["floored_fraction"] for i in infos])),
    }
    return x, merged


def _accumulate(units_iter):
    """Deterministic mean/stderr over unit values streamed chunk by chunk."""
    n = 0
    total = 0.0
    total_sq = 0.0
    for units in units_iter:
        n += units.shape[0]
        total += float(units.sum())
        total_sq += float((units * units).sum())
    mean = total / n
    var = max(total_sq - n * mean * mean, 0.0) / max(n - 1, 1)
    return mean, math.sqrt(var / n), n


def _pair_units(values: np.ndarray, antithetic: bool) -> np.ndarray:
    if not antithetic:
        return values
    h = values.shape[0] // 2
    return 0.5 * (values[:h] + values[h:])


def price_spread_mc(model, state: MarketState, contract: SpreadContract,
                    cfg: McConfig, workers: int = 1) -> McResult:
    """Discounted mean of the spread payoff with its standard error.

    Antithetic pairs are averaged before the variance estimate so the
    reported standard error reflects the paired sampling.
    """
    t0 = time.perf_counter()
    disc = math.exp(-state.r * contract.maturity)

    def units():
        for x, _ in _map_chunks(model, state, contract.maturity, cfg, workers):
            payoff = np.maximum(np.exp(x[:, 0]) - np.exp(x[:, 1]) - contract.strike, 0.0)
            yield _pair_units(disc * payoff, cfg.antithetic)

    mean, stderr, _ = _accumulate(units())
    return McResult(estimate=mean, std_error=stderr, n_paths=cfg.n_paths,
                    elapsed=time.perf_counter() - t0)


def spread_price_stats(model, state: MarketState, maturity: float, strikes,
                       cfg: McConfig, workers: int = 1) -> dict:
    """Discounted spread-price mean and stderr for several strikes from one
    simulation; returns {strike: (estimate, std_error)}."""
    disc = math.exp(-state.r * maturity)
    acc = {k: [0, 0.0, 0.0] for k in strikes}
    for x, _ in _map_chunks(model, state, maturity, cfg, workers):
        spread = np.exp(x[:, 0]) - np.exp(x[:, 1])
        for k in strikes:
            units = _pair_units(disc * np.maximum(spread - k, 0.0), cfg.antithetic)
            entry = acc[k]
            entry[0] += units.shape[0]
            entry[1] += float(units.sum())
            entry[2] += float((units * units).sum())
    out = {}
    for k, (n, s, s2) in acc.items():
        mean = s / n
        var = max(s2 - n * mean * mean, 0.0) / max(n - 1, 1)
        out[k] = (mean, math.sqrt(var / n))
    return out


def empirical_cf(model, state: MarketState, tau: float, u, cfg: McConfig,
                 workers: int = 1) -> CfEstimate:
    """Sample mean of exp(i u . (X_tau - X_0)) with componentwise stderr.

    ``u`` is one real 2-vector or an array of them with shape (k, 2); a
    single simulation serves every requested point.
    """
    u_arr = np.atleast_2d(np.asarray(u, dtype=float))
    single = np.asarray(u).ndim == 1
    x0 = np.log(state.s0)

    sums = np.zeros(u_arr.shape[0], dtype=complex)
    sq_re = np.zeros(u_arr.shape[0])
    sq_im = np.zeros(u_arr.shape[0])
    n_units = 0
    for x, _ in _map_chunks(model, state, tau, cfg, workers):
        dx = x - x0
        phase = dx @ u_arr.T                       # (count, k)
        re = _pair_units(np.cos(phase), cfg.antithetic)
        im = _pair_units(np.sin(phase), cfg.antithetic)
        n_units += re.shape[0]
        sums += re.sum(axis=0) + 1j * im.sum(axis=0)
        sq_re += (re * re).sum(axis=0)
        sq_im += (im * im).sum(axis=0)

    mean = sums / n_units
    denom = max(n_units - 1, 1)
    var_re = np.maximum(sq_re - n_units * mean.real**2, 0.0) / denom
    var_im = np.maximum(sq_im - n_units * mean.imag**2, 0.0) / denom
    se_re = np.sqrt(var_re / n_units)
    se_im = np.sqrt(var_im / n_units)
    if single:
        return CfEstimate(value=complex(mean[0]), stderr_re=float(se_re[0]),
                          stderr_im=float(se_im[0]), n_paths=cfg.n_paths)
    return CfEstimate(value=mean, stderr_re=se_re, stderr_im=se_im, n_paths=cfg.n_paths)
