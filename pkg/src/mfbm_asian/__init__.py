"""Asian (power) option pricing under mixed fractional Brownian motion with jumps."""

from .model import (
    Averaging,
    Fidelity,
    ModelParams,
    OptionContract,
    OptionKind,
    TermParams,
    adjusted_strike,
    derive_term_params,
    jump_moment_rho,
    mean_arithmetic_power,
    mean_geometric_power,
)
from .pricing import (
    PriceResult,
    approximation_error_bound,
    arithmetic_bounds,
    price,
    price_arithmetic_power_approx,
    price_geometric_power,
)
from .special import TruncationPolicy, normal_cdf, poisson_weights

__version__ = "0.1.0"

__all__ = [
    "Averaging",
    "Fidelity",
    "ModelParams",
    "OptionContract",
    "OptionKind",
    "PriceResult",
    "TermParams",
    "TruncationPolicy",
    "adjusted_strike",
    "approximation_error_bound",
    "arithmetic_bounds",
    "derive_term_params",
    "jump_moment_rho",
    "mean_arithmetic_power",
    "mean_geometric_power",
    "normal_cdf",
    "poisson_weights",
    "price",
    "price_arithmetic_power_approx",
    "price_geometric_power",
]
