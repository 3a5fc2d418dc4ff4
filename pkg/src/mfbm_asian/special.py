"""Scalar kernels: the standard normal CDF and truncated Poisson weights."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sc

_SQRT1_2 = math.sqrt(0.5)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class TruncationPolicy:
    """Controls where the infinite jump-count series is cut.

    The list of weights ends at the first index whose Poisson tail mass is
    at most ``mass_tol``. Past the mode it also ends once a weight falls below
    ``term_tol`` times the modal weight, which only matters when ``mass_tol``
    is set below what double precision can resolve. ``n_cap`` is a hard stop.
    """

    mass_tol: float = 1e-12
    term_tol: float = 1e-13
    n_cap: int = 512

    def __post_init__(self) -> None:
        if not self.mass_tol > 0:
            raise ValueError("mass_tol must be > 0")
        if not self.term_tol > 0:
            raise ValueError("term_tol must be > 0")
        if self.n_cap < 1:
            raise ValueError("n_cap must be >= 1")


DEFAULT_POLICY = TruncationPolicy()


def normal_cdf(x):
    """Standard normal CDF, scalar or array.

    Evaluated as ``erfc(-x/sqrt(2))/2``; the complementary error function keeps
    full relative accuracy in the lower tail, so there is no cancellation.
    """
    arr = np.asarray(x, dtype=float)
    if np.isnan(arr).any():
        raise ValueError("normal_cdf: NaN input")
    out = 0.5 * sc.erfc(-arr * _SQRT1_2)
    if out.ndim == 0:
        return float(out)
    return out


def normal_pdf(x):
    arr = np.asarray(x, dtype=float)
    out = _INV_SQRT_2PI * np.exp(-0.5 * arr * arr)
    if out.ndim == 0:
        return float(out)
    return out


def poisson_tail(n: int, mean: float) -> float:
    """P(N > n) for N ~ Poisson(mean), via the regularized incomplete gamma."""
    if mean == 0.0:
        return 0.0
    return float(sc.pdtrc(n, mean))


_LN_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_STIRLERR_SMALL = [
    math.lgamma(n + 1.0) - (n + 0.5) * math.log(n) + n - _LN_SQRT_2PI if n else 0.0
    for n in range(16)
]


def _stirlerr(n: int) -> float:
    """ln(n!) minus its Stirling approximation."""
    if n < 16:
        return _STIRLERR_SMALL[n]
    nn = float(n) * n
    return (1 / 12 - (1 / 360 - (1 / 1260 - (1 / 1680 - 1 / (1188 * nn)) / nn) / nn) / nn) / n


def _bd0(x: float, mean: float) -> float:
    """x ln(x/mean) + mean - x without cancellation near x = mean."""
    if abs(x - mean) < 0.1 * (x + mean):
        v = (x - mean) / (x + mean)
        s = (x - mean) * v
        ej = 2.0 * x * v
        v2 = v * v
        j = 1
        while True:
            ej *= v2
            s_next = s + ej / (2 * j + 1)
            if s_next == s:
                return s
            s = s_next
            j += 1
    return x * math.log(x / mean) + mean - x


def poisson_pmf(n: int, mean: float) -> float:
    """P(N = n) by the saddle-point form, accurate to a few ulps near the mode."""
    if n == 0:
        return math.exp(-mean)
    return math.exp(-_stirlerr(n) - _bd0(float(n), mean)) / math.sqrt(2.0 * math.pi * n)


def poisson_weights(
    lambda_t: float, policy: TruncationPolicy = DEFAULT_POLICY
) -> tuple[np.ndarray, float]:
    """Poisson probabilities ``w_0..w_N`` and the mass left beyond ``N``.

    Each weight is computed independently, so tightening the policy only
    appends entries and never changes the ones already present.
    """
    if not math.isfinite(lambda_t):
        raise ValueError("lambda*T must be finite")
    if lambda_t < 0:
        raise ValueError(f"lambda*T must be >= 0, got {lambda_t}")
    if lambda_t == 0.0:
        return np.ones(1), 0.0

    mode = int(math.floor(lambda_t))
    floor = policy.term_tol * poisson_pmf(mode, lambda_t)

    weights: list[float] = []
    tail = 1.0
    for n in range(policy.n_cap + 1):
        w = poisson_pmf(n, lambda_t)
        weights.append(w)
        tail = poisson_tail(n, lambda_t)
        if tail <= policy.mass_tol:
            break
        if n >= mode and w < floor:
            break
    return np.array(weights), tail
