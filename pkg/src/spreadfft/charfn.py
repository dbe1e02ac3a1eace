"""Closed-form characteristic functions of the two-asset log-price vector.

Both market models are affine: the continuous part has the exponential
form exp(C(s) + <V0, D(s)>) with C, D solving Riccati equations in closed
form, and the common-clock jump part multiplies in via its Levy exponent.
All functions accept complex scalar or broadcastable array arguments, so
one call evaluates an entire frequency grid.

The returned values deliberately exclude the exp(i u . X0) spot factor:
the pricer applies it through grid placement, letting a single evaluation
serve every lattice node.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDenominator, NonFinite
from .model import CirParams, IndependentVolModel, JumpParams, MarketState, ProportionalVolModel

__all__ = [
    "RiccatiCoeffs",
    "CfValue",
    "jump_cf",
    "riccati_coeffs_proportional",
    "riccati_coeffs_independent",
    "cd_functions",
    "cf_proportional",
    "cf_independent",
]

_DEN_FLOOR = 1e-300


@dataclass(frozen=True)
class RiccatiCoeffs:
    """Coefficients of dD/ds = zeta - omega*D + (vol_of_vol^2/2)*D^2.

    ``gamma`` is the principal square root of omega^2 - 2*vol_of_vol^2*zeta.
    Fields are complex scalars or arrays, matching the argument shape.
    """

    zeta: np.ndarray | complex
    omega: np.ndarray | complex
    gamma: np.ndarray | complex


@dataclass(frozen=True)
class CfValue:
    """Characteristic function value with its exponent pieces.

    value = exp(log_c + <V0, log_d>) * jump_factor, spot factor excluded.
    ``log_d`` is a scalar exponent slope for the shared-variance model and
    a per-asset pair for the independent-variance model.
    """

    value: np.ndarray | complex
    log_c: np.ndarray | complex
    log_d: object
    jump_factor: np.ndarray | complex


def jump_cf(u, tau: float, jumps: JumpParams):
    """Compound-Poisson characteristic factor exp(tau*lam*(e^q - 1)) with
    q = i u'k_bar - u'cov u / 2. Entire in u, so finite for finite input."""
    if tau < 0.0:
        raise ValueError("tau must be >= 0")
    u1 = np.asarray(u[0], dtype=complex)
    u2 = np.asarray(u[1], dtype=complex)
    k1, k2 = jumps.k_bar
    c = jumps.jump_cov
    quad = c[0, 0] * u1 * u1 + 2.0 * c[0, 1] * u1 * u2 + c[1, 1] * u2 * u2
    q = 1j * (u1 * k1 + u2 * k2) - 0.5 * quad
    with np.errstate(over="ignore", invalid="ignore"):
        # overflow surfaces as NonFinite from the callers' finiteness check
        return np.exp(tau * jumps.lam * (np.exp(q) - 1.0))


def riccati_coeffs_proportional(u, model: ProportionalVolModel, alt_form: bool = False) -> RiccatiCoeffs:
    """Riccati coefficients for the shared-variance model.

    The default omega weights each asset's correlation term by its sigma
    multiplier, which is what the pricing PDE produces. ``alt_form`` drops
    those weights (an alternative convention kept for cross-checking).
    """
    u1 = np.asarray(u[0], dtype=complex)
    u2 = np.asarray(u[1], dtype=complex)
    s1, s2 = model.sigma
    xi = model.cir.kappa
    theta = model.cir.vol_of_vol
    r1v, r2v = model.rho_sv

    zeta = -0.5 * (
        1j * (s1 * s1 * u1 + s2 * s2 * u2)
        + s1 * s1 * u1 * u1
        + s2 * s2 * u2 * u2
        + 2.0 * model.rho_ss * s1 * s2 * u1 * u2
    )
    if alt_form:
        omega = xi - 1j * theta * (r1v * u1 + r2v * u2)
    else:
        omega = xi - 1j * theta * (s1 * r1v * u1 + s2 * r2v * u2)
    gamma = np.sqrt(omega * omega - 2.0 * theta * theta * zeta)
    return RiccatiCoeffs(zeta=zeta, omega=omega, gamma=gamma)


def riccati_coeffs_independent(u_m, asset_index: int, model: IndependentVolModel,
                               alt_form: bool = False) -> RiccatiCoeffs:
    """Riccati coefficients for one asset of the per-asset-variance model.

    The default zeta is the one the Riccati ODE actually carries,
    -sigma^2 (i u + u^2)/2; ``alt_form`` selects the alternative
    vol-of-vol-scaled convention kept for cross-checking.
    """
    u = np.asarray(u_m, dtype=complex)
    sig = model.sigma[asset_index]
    cir = model.cir[asset_index]
    rho = model.rho_sv[asset_index]
    theta = cir.vol_of_vol

    if alt_form:
        zeta = -0.5 * theta * theta * (1j * u * sig + u * u * sig * sig)
    else:
        zeta = -0.5 * sig * sig * (1j * u + u * u)
    omega = cir.kappa - 1j * theta * sig * rho * u
    gamma = np.sqrt(omega * omega - 2.0 * theta * theta * zeta)
    return RiccatiCoeffs(zeta=zeta, omega=omega, gamma=gamma)


def _log1p_over(w):
    """log(1 + w)/w, series-stabilized near zero, elementwise."""
    w = np.asarray(w, dtype=complex)
    small = np.abs(w) < 1e-4
    ws = np.where(small, w, 0.0)
    series = 1.0 - ws / 2.0 + ws * ws / 3.0 - ws * ws * ws / 4.0 + ws**4 / 5.0
    wb = np.where(small, 1.0, w)  # placeholder keeps log finite on small lanes
    direct = np.log(1.0 + wb) / wb
    return np.where(small, series, direct)


def _tracked_log_ratio(gamma, gmo, s: float):
    """Continuity-tracked log of den(s)/(2 gamma) for points where the
    disk argument bound fails; walks the segment [0, s] unwinding phase."""
    n_seg = int(np.ceil(8 + 4.0 * abs(gamma) * s))
    ts = np.linspace(0.0, s, n_seg + 1)
    d = (2.0 * gamma - gmo * (1.0 - np.exp(-gamma * ts))) / (2.0 * gamma)
    arg_total = np.sum(np.angle(d[1:] / d[:-1]))
    return np.log(np.abs(d[-1])) + 1j * arg_total


def cd_functions(coeffs: RiccatiCoeffs, cir: CirParams, drift_term, s: float):
    """Closed-form exponent functions C(s), D(s) of the affine transform.

    ``drift_term`` is the risk-neutral drift contraction i sum_m u_m (r -
    lam k_bar_m) that multiplies s inside C. Both functions vanish at
    s = 0 exactly. The log of the denominator ratio is evaluated through
    a cancellation-free rearrangement (gamma - omega is formed as
    -2 vol_of_vol^2 zeta / (gamma + omega)), which keeps C accurate in
    the vanishing vol-of-vol limit and picks the continuous branch.
    """
    if s < 0.0:
        raise ValueError("s must be >= 0")
    zeta = np.asarray(coeffs.zeta, dtype=complex)
    omega = np.asarray(coeffs.omega, dtype=complex)
    gamma = np.asarray(coeffs.gamma, dtype=complex)
    theta2 = cir.vol_of_vol**2

    gamma_plus = gamma + omega
    gmo = -2.0 * theta2 * zeta / gamma_plus          # gamma - omega, no cancellation
    g = gmo / gamma_plus
    expo = np.exp(-gamma * s)
    one_m_e = 1.0 - expo

    den = 2.0 * gamma - gmo * one_m_e
    if np.any(np.abs(den) < _DEN_FLOOR):
        raise DegenerateDenominator(
            f"Riccati denominator collapsed below {_DEN_FLOOR} at s = {s}"
        )
    d_fun = 2.0 * zeta * one_m_e / den

    # log(den/(2 gamma)) = log1p(w) with w = -g (1-e^{-gamma s})/(1+g);
    # dividing by vol_of_vol^2 analytically keeps the C coefficient finite.
    w = -g * one_m_e / (1.0 + g)
    w_over_theta2 = 2.0 * zeta * one_m_e / (gamma_plus * gamma_plus * (1.0 + g))
    lnd_over_theta2 = w_over_theta2 * _log1p_over(w)

    unsafe = (np.abs(g) >= 0.95) | ~np.isfinite(w)
    if np.any(unsafe):
        flat_idx = np.argwhere(unsafe)
        lnd_over_theta2 = np.array(lnd_over_theta2, dtype=complex, copy=True)
        for idx in flat_idx:
            tup = tuple(idx)
            lnd_over_theta2[tup] = _tracked_log_ratio(gamma[tup], gmo[tup], s) / theta2

    c_fun = np.asarray(drift_term, dtype=complex) * s - cir.kappa * cir.v_bar * (
        2.0 * lnd_over_theta2 - 2.0 * zeta / gamma_plus * s
    )
    return c_fun, d_fun


def _check_finite(value, u):
    if np.all(np.isfinite(value)):
        return
    bad = np.argwhere(~np.isfinite(np.asarray(value)))
    first = tuple(bad[0])
    u1b, u2b = np.broadcast_arrays(np.asarray(u[0]), np.asarray(u[1]))
    raise NonFinite(
        f"characteristic function overflowed at u = ({u1b[first]}, {u2b[first]}); "
        "the damping vector likely violates the model's moment condition"
    )


def cf_proportional(u, tau: float, model: ProportionalVolModel, state: MarketState,
                    alt_form: bool = False) -> CfValue:
    """CF of the log-price increment under the shared-variance model."""
    if tau < 0.0:
        raise ValueError("tau must be >= 0")
    coeffs = riccati_coeffs_proportional(u, model, alt_form=alt_form)
    k1, k2 = model.jumps.k_bar
    lam = model.jumps.lam
    u1 = np.asarray(u[0], dtype=complex)
    u2 = np.asarray(u[1], dtype=complex)
    drift = 1j * (u1 * (state.r - lam * k1) + u2 * (state.r - lam * k2))
    c_fun, d_fun = cd_functions(coeffs, model.cir, drift, tau)
    jump = jump_cf(u, tau, model.jumps)
    with np.errstate(over="ignore", invalid="ignore"):
        value = np.exp(c_fun + model.cir.v0 * d_fun) * jump
    _check_finite(value, u)
    return CfValue(value=value, log_c=c_fun, log_d=d_fun, jump_factor=jump)


def cf_independent(u, tau: float, model: IndependentVolModel, state: MarketState,
                   alt_form: bool = False) -> CfValue:
    """CF of the log-price increment under the per-asset-variance model:
    product of the two continuous per-asset factors and the joint jump CF."""
    if tau < 0.0:
        raise ValueError("tau must be >= 0")
    lam = model.jumps.lam
    c_total = 0.0
    d_parts = []
    exponent = 0.0
    for m in range(2):
        um = np.asarray(u[m], dtype=complex)
        coeffs = riccati_coeffs_independent(um, m, model, alt_form=alt_form)
        drift = 1j * um * (state.r - lam * model.jumps.k_bar[m])
        c_m, d_m = cd_functions(coeffs, model.cir[m], drift, tau)
        c_total = c_total + c_m
        d_parts.append(d_m)
        exponent = exponent + c_m + model.cir[m].v0 * d_m
    jump = jump_cf(u, tau, model.jumps)
    with np.errstate(over="ignore", invalid="ignore"):
        value = np.exp(exponent) * jump
    _check_finite(value, u)
    return CfValue(value=value, log_c=c_total, log_d=tuple(d_parts), jump_factor=jump)
