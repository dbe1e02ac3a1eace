"""Spread-option pricing engine.

Two jump-diffusion stochastic-volatility market models with closed-form
characteristic functions, priced by a damped two-dimensional FFT method
and cross-checked against a built-in Monte Carlo engine.
"""

from .charfn import (
    CfValue,
    RiccatiCoeffs,
    cd_functions,
    cf_independent,
    cf_proportional,
    jump_cf,
    riccati_coeffs_independent,
    riccati_coeffs_proportional,
)
from .errors import (
    DampingViolation,
    DegenerateDenominator,
    NegativePrice,
    NoFeasibleStep,
    NonFinite,
    NotPsd,
    ParseError,
    PoleError,
    SpreadFftError,
    ValidationError,
)
from .fft_pricer import (
    FftGrid,
    FftGridConfig,
    PriceResult,
    assemble_g,
    build_grid,
    inverse_dft2,
    price_spread_fft,
    select_step,
)
from .mc_engine import (
    CfEstimate,
    McConfig,
    McResult,
    chol3,
    empirical_cf,
    price_spread_mc,
    simulate_terminal,
    spread_price_stats,
)
from .model import (
    CirParams,
    IndependentVolModel,
    JumpParams,
    MarketState,
    ProportionalVolModel,
    SpreadContract,
    ValidationReport,
    benchmark_independent,
    benchmark_proportional,
    validate,
)
from .payoff import DampedArgument, complex_log_gamma, damping_warnings, spread_payoff_hat

__version__ = "0.1.0"
