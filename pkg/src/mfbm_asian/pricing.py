"""Closed-form Poisson-series prices for geometric and arithmetic Asian (power) options.

Each price is a Poisson-weighted sum over the number of jumps ``n`` of a
Black-type term in the conditional Gaussian law of the log geometric average.
Arithmetic contracts reuse the geometric series with the adjusted strike.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .model import (
    Averaging,
    Fidelity,
    ModelParams,
    OptionContract,
    TermParams,
    derive_term_params,
    mean_arithmetic_power,
    mean_geometric_power,
)
from .special import DEFAULT_POLICY, TruncationPolicy, normal_cdf, poisson_weights

WARN_HURST = "hurst-below-3/4"
WARN_NONPOSITIVE_STRIKE = "nonpositive-adjusted-strike"
WARN_CLAMPED = "negative-series-clamped"


@dataclass(frozen=True)
class PriceResult:
    price: float
    series_terms: int
    truncation_bound: float
    lower_bound: float | None = None
    upper_bound: float | None = None
    error_bound: float | None = None
    warnings: tuple[str, ...] = field(default_factory=tuple)

    def as_dict(self) -> dict:
        return {
            "price": self.price,
            "series_terms": self.series_terms,
            "truncation_bound": self.truncation_bound,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "error_bound": self.error_bound,
            "warnings": list(self.warnings),
        }


@dataclass(frozen=True)
class TermValue:
    """Call and put values of one jump-count term, before Poisson weighting."""

    call: float
    put: float
    forward: float  # discounted conditional mean of the payoff average
    discounted_strike: float
    certain_exercise: bool


def actuarial_discount(model: ModelParams, maturity: float) -> float:
    """exp(-(r - q)T - lambda(rho - 1)T), the expected-return discount."""
    return math.exp(-(model.r - model.q) * maturity - model.jump_compensator * maturity)


def _forward_exponent(term: TermParams, contract: OptionContract) -> tuple[float, float]:
    """Exponent of the conditional moment and the d1 - d2 shift."""
    m = contract.power
    consistent = contract.fidelity is Fidelity.CONSISTENT
    if contract.averaging is Averaging.ARITHMETIC and not consistent:
        # the arithmetic power theorem prints the m = 1 moment
        exponent = term.mu_hat + 0.5 * term.sigma_hat_sq
    else:
        exponent = m * term.mu_hat + 0.5 * m * m * term.sigma_hat_sq
    shift = m * term.sigma_hat if consistent else term.sigma_hat
    return exponent, shift


def term_value(
    model: ModelParams, contract: OptionContract, term: TermParams
) -> TermValue:
    t = contract.maturity
    m = contract.power
    k_eff = term.k_prime if term.k_prime is not None else contract.strike
    exponent, shift = _forward_exponent(term, contract)
    forward = actuarial_discount(model, t) * math.exp(exponent)
    disc_k = k_eff * math.exp(-model.r * t)

    if term.u <= 0.0:
        return TermValue(forward - disc_k, 0.0, forward, disc_k, True)

    log_u_root = math.log(term.u) / m
    sig = term.sigma_hat
    if sig == 0.0:
        itm = term.mu_hat > log_u_root
        call = forward - disc_k if itm else 0.0
        put = 0.0 if itm else disc_k - forward
        return TermValue(call, put, forward, disc_k, False)

    d2 = (term.mu_hat - log_u_root) / sig
    d1 = d2 + shift
    call = forward * normal_cdf(d1) - disc_k * normal_cdf(d2)
    put = disc_k * normal_cdf(-d2) - forward * normal_cdf(-d1)
    return TermValue(call, put, forward, disc_k, False)


def _series(
    model: ModelParams, contract: OptionContract, policy: TruncationPolicy
) -> tuple[np.ndarray, float, list[TermParams]]:
    weights, tail = poisson_weights(model.lam * contract.maturity, policy)
    terms = [derive_term_params(model, contract, n) for n in range(len(weights))]
    return weights, tail, terms


def _base_warnings(model: ModelParams) -> list[str]:
    if model.epsilon > 0.0 and model.hurst <= 0.75:
        return [WARN_HURST]
    return []


def _sum_series(
    model: ModelParams, contract: OptionContract, policy: TruncationPolicy
) -> PriceResult:
    weights, tail, terms = _series(model, contract, policy)
    warnings = _base_warnings(model)
    parts = []
    scale = 0.0
    for w, term in zip(weights, terms):
        tv = term_value(model, contract, term)
        if (tv.certain_exercise and term.k_prime is not None
                and WARN_NONPOSITIVE_STRIKE not in warnings):
            warnings.append(WARN_NONPOSITIVE_STRIKE)
        parts.append(w * (tv.call if contract.is_call else tv.put))
        scale = max(scale, tv.forward, abs(tv.discounted_strike))
    price = math.fsum(parts)
    if price < 0.0:
        warnings.append(WARN_CLAMPED)
        price = 0.0
    return PriceResult(
        price=price,
        series_terms=len(weights),
        truncation_bound=tail * scale,
        warnings=tuple(warnings),
    )


def price_geometric_power(
    model: ModelParams, contract: OptionContract, policy: TruncationPolicy = DEFAULT_POLICY
) -> PriceResult:
    """Price of a geometric Asian power call or put (``m = 1`` is the plain option)."""
    if contract.averaging is not Averaging.GEOMETRIC:
        raise ValueError("price_geometric_power needs a geometric-average contract")
    return _sum_series(model, contract, policy)


def approximation_error_bound(
    model: ModelParams, contract: OptionContract, policy: TruncationPolicy = DEFAULT_POLICY
) -> float:
    """exp(-rT) (E[A^m] - E[G^m]), Poisson-averaged over the jump count.

    Bounds the distance between the adjusted-strike approximation and the
    true arithmetic price, and is the width of the arithmetic price bracket.
    """
    if contract.averaging is not Averaging.ARITHMETIC:
        raise ValueError("approximation_error_bound needs an arithmetic-average contract")
    weights, _, terms = _series(model, contract, policy)
    m = contract.power
    gaps = [
        w
        * (
            mean_arithmetic_power(model, term, m, contract.maturity, contract.fidelity)
            - mean_geometric_power(term, m)
        )
        for w, term in zip(weights, terms)
    ]
    return math.exp(-model.r * contract.maturity) * math.fsum(gaps)


def arithmetic_bounds(
    model: ModelParams, contract: OptionContract, policy: TruncationPolicy = DEFAULT_POLICY
) -> tuple[float, float]:
    """(C_G, C_G + error bound) bracket for an arithmetic call."""
    if contract.averaging is not Averaging.ARITHMETIC or not contract.is_call:
        raise ValueError("arithmetic_bounds needs an arithmetic-average call")
    geo = replace(contract, averaging=Averaging.GEOMETRIC)
    lower = price_geometric_power(model, geo, policy).price
    return lower, lower + approximation_error_bound(model, contract, policy)


def price_arithmetic_power_approx(
    model: ModelParams, contract: OptionContract, policy: TruncationPolicy = DEFAULT_POLICY
) -> PriceResult:
    """Adjusted-strike approximation of an arithmetic Asian power option.

    The result carries the price bracket and the error bound. For a call the
    geometric price is the floor; for a put it is the ceiling, since the
    arithmetic average dominates the geometric one.
    """
    if contract.averaging is not Averaging.ARITHMETIC:
        raise ValueError("price_arithmetic_power_approx needs an arithmetic-average contract")
    res = _sum_series(model, contract, policy)
    err = approximation_error_bound(model, contract, policy)
    geo = replace(contract, averaging=Averaging.GEOMETRIC)
    geo_price = price_geometric_power(model, geo, policy).price
    if contract.is_call:
        lower, upper = geo_price, geo_price + err
    else:
        lower, upper = max(geo_price - err, 0.0), geo_price
    return replace(res, lower_bound=lower, upper_bound=upper, error_bound=err)


def price(
    model: ModelParams, contract: OptionContract, policy: TruncationPolicy = DEFAULT_POLICY
) -> PriceResult:
    if contract.averaging is Averaging.GEOMETRIC:
        return price_geometric_power(model, contract, policy)
    return price_arithmetic_power_approx(model, contract, policy)
