import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import invert_payoff_hat, mp_loggamma
from spreadfft.errors import DampingViolation, PoleError
from spreadfft.payoff import (
    DampedArgument,
    complex_log_gamma,
    damping_warnings,
    spread_payoff_hat,
)


def test_log_gamma_known_values():
    assert complex_log_gamma(1.0) == pytest.approx(0.0, abs=1e-14)
    # Gamma(1/2) = sqrt(pi)
    assert complex_log_gamma(0.5).real == pytest.approx(0.5723649429247001, abs=1e-13)
    # frozen from the 50-digit oracle
    got = complex_log_gamma(3 + 4j)
    assert got == pytest.approx(-1.7566267846037841 + 4.7426644380346585j, abs=1e-12)
    assert got == pytest.approx(mp_loggamma(3 + 4j), abs=1e-12)


def test_log_gamma_accuracy_over_strip():
    # contract: relative error of exp(result) below 1e-12 for
    # 0.1 <= Re z <= 50, |Im z| <= 200
    rng = np.random.default_rng(2)
    zs = rng.uniform(0.1, 50.0, 120) + 1j * rng.uniform(-200.0, 200.0, 120)
    for z in zs:
        ref = mp_loggamma(z)
        err = abs(np.exp(complex_log_gamma(complex(z)) - ref) - 1.0)
        assert err < 1e-12, f"z={z}: exp rel err {err}"


def test_log_gamma_reflection_region():
    for z in (-2.3 + 0.7j, -0.4 - 5.0j, 0.2 + 0.1j):
        # branch offsets cancel under exp; compare gamma values
        ours = np.exp(complex_log_gamma(z))
        ref = np.exp(mp_loggamma(z))
        assert abs(ours - ref) < 1e-10 * abs(ref)


@settings(max_examples=100, deadline=None)
@given(re=st.floats(0.5, 20.0), im=st.floats(-50.0, 50.0))
def test_log_gamma_recurrence(re, im):
    z = complex(re, im)
    lhs = np.exp(complex_log_gamma(z + 1.0) - complex_log_gamma(z))
    assert abs(lhs - z) <= 1e-10 * max(1.0, abs(z))


def test_log_gamma_poles():
    for z in (0.0, -1.0, -7.0):
        with pytest.raises(PoleError):
            complex_log_gamma(z)
    # nearby non-integer points are fine
    assert np.isfinite(complex_log_gamma(-7.0 + 1e-8))


def test_log_gamma_vectorized_matches_scalar():
    z = np.array([[0.7 + 2j, 5.0 - 3j], [12.5 + 0.1j, 0.3 - 0.2j]])
    vec = complex_log_gamma(z)
    for idx in np.ndindex(z.shape):
        assert vec[idx] == pytest.approx(complex_log_gamma(complex(z[idx])), abs=1e-13)


def test_damped_argument_region():
    DampedArgument(u_real=(0.0, 0.0), eps=(-3.0, 1.0))         # valid
    with pytest.raises(DampingViolation):
        DampedArgument(u_real=(0.0, 0.0), eps=(-3.0, -0.1))    # eps2 <= 0
    with pytest.raises(DampingViolation):
        DampedArgument(u_real=(0.0, 0.0), eps=(-0.5, 0.4))     # eps1+eps2 >= -1
    with pytest.raises(DampingViolation):
        DampedArgument(u_real=(0.0, 0.0), eps=(0.0, 0.0))


def test_damping_soft_warning_threshold():
    assert damping_warnings((-3.0, 1.0)) == []
    notes = damping_warnings((-3.0, 0.15))
    assert len(notes) == 1 and "eps2" in notes[0]


def test_payoff_hat_at_origin():
    # arguments collapse to Gamma(1) Gamma(1) / Gamma(4) = 1/6
    val = spread_payoff_hat(DampedArgument(u_real=(0.0, 0.0), eps=(-3.0, 1.0)))
    assert val == pytest.approx(1.0 / 6.0, rel=1e-12)


def test_payoff_hat_mirror_symmetry():
    rng = np.random.default_rng(5)
    for _ in range(20):
        u = rng.uniform(-30, 30, 2)
        plus = spread_payoff_hat(DampedArgument(u_real=(u[0], u[1]), eps=(-3.0, 1.0)))
        minus = spread_payoff_hat(DampedArgument(u_real=(-u[0], -u[1]), eps=(-3.0, 1.0)))
        assert minus == pytest.approx(np.conj(plus), rel=1e-12, abs=1e-300)


def test_payoff_hat_no_overflow_far_out():
    val = spread_payoff_hat(DampedArgument(u_real=(1e4, -1e4), eps=(-3.0, 1.0)))
    assert np.isfinite(val)
    val = spread_payoff_hat(DampedArgument(u_real=(1e4, 1e4), eps=(-3.0, 1.0)))
    assert np.isfinite(val)


def test_payoff_hat_grid_evaluation():
    w = np.linspace(-40, 40, 33)
    grid = spread_payoff_hat(DampedArgument(u_real=(w[:, None], w[None, :]), eps=(-3.0, 1.0)))
    assert grid.shape == (33, 33)
    assert np.all(np.isfinite(grid))
    i, j = 5, 20
    point = spread_payoff_hat(DampedArgument(u_real=(w[i], w[j]), eps=(-3.0, 1.0)))
    assert grid[i, j] == pytest.approx(point, rel=1e-13)


def test_payoff_hat_inversion_recovers_damped_payoff():
    # quadrature inversion of the transform reproduces
    # e^{eps . x} (e^{x1} - e^{x2} - 1)_+ pointwise
    eps = (-3.0, 1.0)
    x = np.array([0.5, -1.0])
    got = invert_payoff_hat([x], eps, box=80.0, du=0.1)[0]
    want = math.exp(eps[0] * x[0] + eps[1] * x[1]) * max(
        math.exp(x[0]) - math.exp(x[1]) - 1.0, 0.0)
    assert got == pytest.approx(want, abs=1e-3)
    # frozen value of the damped payoff at this point
    assert want == pytest.approx(0.023052901190395, abs=1e-12)
