"""Market model parameter containers and validation.

Two-asset jump-diffusion models with square-root stochastic variance:
either one CIR variance process per asset (cross-asset dependence only
through jumps) or a single variance process shared by both assets and
scaled per asset. All containers are immutable after construction and
safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CirParams",
    "JumpParams",
    "IndependentVolModel",
    "ProportionalVolModel",
    "MarketState",
    "SpreadContract",
    "ValidationReport",
    "validate",
    "benchmark_proportional",
    "benchmark_independent",
]

# Eigenvalues above this (negative) floor still count as PSD.
PSD_TOL = 1e-12


def _frozen_array(values, shape) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(shape)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class CirParams:
    """Square-root mean-reverting variance process parameters."""

    kappa: float        # mean-reversion speed, per year
    v_bar: float        # long-run variance level
    vol_of_vol: float   # diffusion coefficient of the variance, per sqrt(year)
    v0: float           # initial variance

    @property
    def feller_ratio(self) -> float:
        """2*kappa*v_bar / vol_of_vol**2; below 1 the origin is attainable."""
        return 2.0 * self.kappa * self.v_bar / self.vol_of_vol**2


@dataclass(frozen=True)
class JumpParams:
    """Common-clock compound-Poisson jumps with jointly normal log sizes."""

    lam: float                # jump intensity, per year
    k_bar: np.ndarray         # mean log-jump size per asset, shape (2,)
    jump_cov: np.ndarray      # covariance of log-jump sizes, shape (2, 2)

    def __post_init__(self):
        object.__setattr__(self, "k_bar", _frozen_array(self.k_bar, (2,)))
        object.__setattr__(self, "jump_cov", _frozen_array(self.jump_cov, (2, 2)))

    @classmethod
    def from_stdevs(cls, lam, k_bar, delta, corr: float = 0.0) -> "JumpParams":
        """Build the covariance from per-asset stdevs and a size correlation."""
        d1, d2 = float(delta[0]), float(delta[1])
        cov = [[d1 * d1, corr * d1 * d2], [corr * d1 * d2, d2 * d2]]
        return cls(lam=float(lam), k_bar=k_bar, jump_cov=cov)


@dataclass(frozen=True)
class IndependentVolModel:
    """Each asset carries its own variance process; no continuous cross-asset
    correlation. Joint dependence enters only through the common jump clock."""

    sigma: np.ndarray                      # volatility multiplier per asset, shape (2,)
    cir: tuple[CirParams, CirParams]       # one variance process per asset
    rho_sv: np.ndarray                     # asset/own-variance correlation, shape (2,)
    jumps: JumpParams

    def __post_init__(self):
        object.__setattr__(self, "sigma", _frozen_array(self.sigma, (2,)))
        object.__setattr__(self, "rho_sv", _frozen_array(self.rho_sv, (2,)))
        object.__setattr__(self, "cir", tuple(self.cir))


@dataclass(frozen=True)
class ProportionalVolModel:
    """Both assets share one variance process, scaled per asset by sigma."""

    sigma: np.ndarray          # volatility multiplier per asset, shape (2,)
    cir: CirParams             # shared variance process
    rho_ss: float              # asset/asset driver correlation
    rho_sv: np.ndarray         # asset/variance driver correlation, shape (2,)
    jumps: JumpParams

    def __post_init__(self):
        object.__setattr__(self, "sigma", _frozen_array(self.sigma, (2,)))
        object.__setattr__(self, "rho_sv", _frozen_array(self.rho_sv, (2,)))

    def driver_correlation(self) -> np.ndarray:
        """3x3 correlation of the drivers (asset 1, asset 2, variance)."""
        r12 = self.rho_ss
        r1v, r2v = self.rho_sv
        return np.array([[1.0, r12, r1v], [r12, 1.0, r2v], [r1v, r2v, 1.0]])


@dataclass(frozen=True)
class MarketState:
    """Initial spot prices and the risk-free rate."""

    s0: np.ndarray   # initial spot price per asset, shape (2,), > 0
    r: float         # continuously compounded risk-free rate, per year

    def __post_init__(self):
        object.__setattr__(self, "s0", _frozen_array(self.s0, (2,)))
        if not np.all(self.s0 > 0.0):
            raise ValueError(f"spot prices must be strictly positive, got {self.s0}")


@dataclass(frozen=True)
class SpreadContract:
    """European call on the difference of the two asset prices."""

    strike: float     # > 0; the strike-scaling reduction needs log(s0/K)
    maturity: float   # years, > 0

    def __post_init__(self):
        if not self.strike > 0.0:
            raise ValueError(f"strike must be positive, got {self.strike}")
        if not self.maturity > 0.0:
            raise ValueError(f"maturity must be positive, got {self.maturity}")


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _check_cir(cir: CirParams, label: str, report: ValidationReport) -> None:
    if not cir.kappa > 0.0:
        report.violations.append(f"{label}: mean-reversion speed must be > 0")
    if not cir.v_bar > 0.0:
        report.violations.append(f"{label}: long-run variance must be > 0")
    if not cir.vol_of_vol > 0.0:
        report.violations.append(f"{label}: vol-of-vol must be > 0")
    if cir.v0 < 0.0:
        report.violations.append(f"{label}: initial variance must be >= 0")
    if cir.vol_of_vol > 0.0 and cir.kappa > 0.0 and cir.v_bar > 0.0:
        if cir.feller_ratio < 1.0:
            report.warnings.append(
                f"{label}: Feller ratio {cir.feller_ratio:.4g} < 1, variance can reach zero"
            )


def _check_jumps(jumps: JumpParams, report: ValidationReport) -> None:
    if jumps.lam < 0.0:
        report.violations.append("jumps: intensity must be >= 0")
    cov = jumps.jump_cov
    if not np.allclose(cov, cov.T, atol=1e-12):
        report.violations.append("jumps: covariance not symmetric")
    else:
        eigmin = float(np.linalg.eigvalsh(cov)[0])
        if eigmin < -PSD_TOL:
            report.violations.append("jumps: covariance not PSD")


def _check_correlation_matrix(corr: np.ndarray, report: ValidationReport) -> None:
    if np.any(np.abs(corr) > 1.0):
        report.violations.append("correlation out of range")
        return
    eigmin = float(np.linalg.eigvalsh(corr)[0])
    if eigmin < -PSD_TOL:
        report.violations.append("correlation matrix not PSD")
    elif eigmin < 1e-8:
        report.warnings.append(
            f"correlation matrix near-singular (smallest eigenvalue {eigmin:.3g})"
        )


def validate(model: IndependentVolModel | ProportionalVolModel) -> ValidationReport:
    """Collect invariant violations and warnings; never raises.

    An empty ``violations`` list means the model is usable. Warnings flag
    conditions (Feller ratio < 1, near-singular correlations) that remain
    well-defined for both the closed-form transform and the simulator.
    """
    report = ValidationReport()
    if np.any(model.sigma < 0.0):
        report.violations.append("sigma components must be >= 0")
    _check_jumps(model.jumps, report)

    if isinstance(model, ProportionalVolModel):
        _check_cir(model.cir, "cir", report)
        _check_correlation_matrix(model.driver_correlation(), report)
    else:
        for m, cir in enumerate(model.cir):
            _check_cir(cir, f"cir[{m}]", report)
        if np.any(np.abs(model.rho_sv) > 1.0):
            report.violations.append("correlation out of range")
    return report


def benchmark_proportional() -> tuple[ProportionalVolModel, MarketState]:
    """Reference shared-variance parameter set used throughout the test tables.

    Jump sizes are independent across assets (zero off-diagonal covariance).
    """
    model = ProportionalVolModel(
        sigma=(1.0, 0.5),
        cir=CirParams(kappa=1.0, v_bar=0.04, vol_of_vol=0.05, v0=0.04),
        rho_ss=0.5,
        rho_sv=(-0.5, 0.25),
        jumps=JumpParams.from_stdevs(lam=1.0, k_bar=(0.05, 0.05), delta=(0.05, 0.05)),
    )
    state = MarketState(s0=(100.0, 96.0), r=0.1)
    return model, state


def benchmark_independent() -> tuple[IndependentVolModel, MarketState]:
    """Per-asset-variance counterpart of the reference set: the shared CIR
    process is duplicated per asset and the asset/asset correlation dropped."""
    cir = CirParams(kappa=1.0, v_bar=0.04, vol_of_vol=0.05, v0=0.04)
    model = IndependentVolModel(
        sigma=(1.0, 0.5),
        cir=(cir, cir),
        rho_sv=(-0.5, 0.25),
        jumps=JumpParams.from_stdevs(lam=1.0, k_bar=(0.05, 0.05), delta=(0.05, 0.05)),
    )
    state = MarketState(s0=(100.0, 96.0), r=0.1)
    return model, state
