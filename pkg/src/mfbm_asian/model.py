"""Model and contract types, and the per-jump-count quantities every formula uses."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from enum import Enum


class OptionKind(str, Enum):
    CALL = "call"
    PUT = "put"


class Averaging(str, Enum):
    GEOMETRIC = "geometric"
    ARITHMETIC = "arithmetic"


class Fidelity(str, Enum):
    """How literally the closed forms are evaluated.

    ``PAPER`` evaluates every expression as originally printed. ``CONSISTENT``
    keeps the ``m(m-1)/2`` variance term in the mean of the m-th power of the
    arithmetic average and shifts ``d1`` by ``m*sigma_hat`` for power payoffs,
    which makes the prices agree with sampling the stated Gaussian law.
    The two coincide for ``m = 1``.
    """

    PAPER = "paper"
    CONSISTENT = "consistent"


def _check_finite(obj) -> None:
    for f in fields(obj):
        v = getattr(obj, f.name)
        if isinstance(v, float) and not math.isfinite(v):
            raise ValueError(f"{f.name} must be finite, got {v}")


@dataclass(frozen=True)
class ModelParams:
    """Market and model parameters of the jump-diffusion mixed fBm asset."""

    s0: float
    r: float
    q: float = 0.0
    sigma: float = 0.0
    epsilon: float = 0.0
    hurst: float = 0.5
    lam: float = 0.0
    mu_j: float = 0.0
    sigma_j: float = 0.0

    def __post_init__(self) -> None:
        for name in ("s0", "r", "q", "sigma", "epsilon", "hurst", "lam", "mu_j", "sigma_j"):
            object.__setattr__(self, name, float(getattr(self, name)))
        _check_finite(self)
        if self.s0 <= 0:
            raise ValueError(f"s0 must be > 0, got {self.s0}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.lam < 0:
            raise ValueError(f"lambda must be >= 0, got {self.lam}")
        if self.sigma_j < 0:
            raise ValueError(f"sigma_j must be >= 0, got {self.sigma_j}")
        if not 0.0 < self.hurst < 1.0:
            raise ValueError(f"hurst must lie in (0, 1), got {self.hurst}")

    @property
    def rho(self) -> float:
        return jump_moment_rho(self.mu_j, self.sigma_j)

    @property
    def jump_compensator(self) -> float:
        """lambda*(rho - 1); zero when jumps are switched off."""
        if self.lam == 0.0:
            return 0.0
        return self.lam * (self.rho - 1.0)


@dataclass(frozen=True)
class OptionContract:
    kind: OptionKind
    strike: float
    maturity: float
    power: int = 1
    averaging: Averaging = Averaging.GEOMETRIC
    fidelity: Fidelity = Fidelity.PAPER

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", OptionKind(self.kind))
        object.__setattr__(self, "averaging", Averaging(self.averaging))
        object.__setattr__(self, "fidelity", Fidelity(self.fidelity))
        object.__setattr__(self, "strike", float(self.strike))
        object.__setattr__(self, "maturity", float(self.maturity))
        _check_finite(self)
        if isinstance(self.power, bool) or int(self.power) != self.power:
            raise ValueError(f"power must be an integer, got {self.power!r}")
        object.__setattr__(self, "power", int(self.power))
        if self.maturity <= 0:
            raise ValueError(f"maturity must be > 0, got {self.maturity}")
        if self.power < 1:
            raise ValueError(f"power must be >= 1, got {self.power}")
        if self.strike < 0:
            raise ValueError(f"strike must be >= 0, got {self.strike}")

    @property
    def is_call(self) -> bool:
        return self.kind is OptionKind.CALL


@dataclass(frozen=True)
class TermParams:
    """Quantities conditional on exactly ``n`` jumps before maturity.

    ``mu_hat``/``sigma_hat_sq`` are the mean and variance of the time average
    of ``ln S_t``. ``u`` is the threshold the geometric average must exceed
    for a call to pay off; ``k_prime`` is only set for arithmetic contracts.
    """

    n: int
    r_n: float
    sigma_n_sq: float
    mu_hat: float
    sigma_hat_sq: float
    rho: float
    u: float
    k_prime: float | None = None

    @property
    def sigma_hat(self) -> float:
        return math.sqrt(self.sigma_hat_sq)


def jump_moment_rho(mu_j: float, sigma_j: float) -> float:
    """E[exp(J)] for J ~ N(mu_j, sigma_j^2)."""
    if not (math.isfinite(mu_j) and math.isfinite(sigma_j)):
        raise ValueError("jump parameters must be finite")
    if sigma_j < 0:
        raise ValueError(f"sigma_j must be >= 0, got {sigma_j}")
    return math.exp(mu_j + 0.5 * sigma_j * sigma_j)


def _expm1_ratio(x: float) -> float:
    """(e^x - 1)/x with the removable singularity at 0 filled in."""
    if abs(x) < 1e-8:
        return 1.0 + 0.5 * x
    return math.expm1(x) / x


def _drift_and_variance(model: ModelParams, t: float, n: int) -> tuple[float, float]:
    # with no jumps possible the jump-size parameters must not leak in
    if model.lam == 0.0 or n == 0:
        r_n = model.r - model.q
        jump_var = 0.0
    else:
        r_n = model.r - model.q + n / t * (model.mu_j + 0.5 * model.sigma_j**2)
        jump_var = n * model.sigma_j**2
    sigma_n_sq = model.sigma**2 + (model.epsilon**2 * t ** (2.0 * model.hurst) + jump_var) / t
    return r_n, sigma_n_sq


def _mu_hat(model: ModelParams, t: float, r_n: float, sigma_n_sq: float) -> float:
    return math.log(model.s0) + 0.5 * (r_n - 0.5 * sigma_n_sq) * t


def mean_geometric_power(term: TermParams, m: int) -> float:
    """E[G^m] = exp(m*mu_hat + m^2*sigma_hat^2/2)."""
    if m < 1:
        raise ValueError(f"power must be >= 1, got {m}")
    return math.exp(m * term.mu_hat + 0.5 * m * m * term.sigma_hat_sq)


def mean_arithmetic_power(
    model: ModelParams,
    term: TermParams,
    m: int,
    maturity: float,
    fidelity: Fidelity = Fidelity.PAPER,
) -> float:
    """Time average of the m-th moment of the conditional spot over [0, T].

    In paper mode the growth rate is ``m*r_n``; consistent mode adds the
    ``m(m-1)/2 * sigma_n^2`` lognormal convexity term. For ``m = 1`` both
    reduce to ``S0 (exp(r_n T) - 1)/(r_n T)``.
    """
    if m < 1:
        raise ValueError(f"power must be >= 1, got {m}")
    rate = m * term.r_n
    if Fidelity(fidelity) is Fidelity.CONSISTENT:
        rate += 0.5 * m * (m - 1) * term.sigma_n_sq
    return model.s0**m * _expm1_ratio(rate * maturity)


def adjusted_strike(
    strike: float,
    model: ModelParams,
    term: TermParams,
    m: int,
    maturity: float,
    fidelity: Fidelity = Fidelity.PAPER,
) -> float:
    """K' = K - (E[A^m] - E[G^m]); may come out non-positive."""
    if strike < 0:
        raise ValueError(f"strike must be >= 0, got {strike}")
    return (
        strike
        + mean_geometric_power(term, m)
        - mean_arithmetic_power(model, term, m, maturity, fidelity)
    )


def strike_threshold(model: ModelParams, strike: float, maturity: float) -> float:
    """U = K exp(-qT - (1 - rho) lambda T)."""
    return strike * math.exp(-model.q * maturity + model.jump_compensator * maturity)


def derive_term_params(model: ModelParams, contract: OptionContract, n: int) -> TermParams:
    t = contract.maturity
    if not t > 0:
        raise ValueError(f"maturity must be > 0, got {t}")
    if n < 0:
        raise ValueError(f"jump count must be >= 0, got {n}")
    r_n, sigma_n_sq = _drift_and_variance(model, t, n)
    mu_hat = _mu_hat(model, t, r_n, sigma_n_sq)
    term = TermParams(
        n=n,
        r_n=r_n,
        sigma_n_sq=sigma_n_sq,
        mu_hat=mu_hat,
        sigma_hat_sq=sigma_n_sq * t / 3.0,
        rho=model.rho,
        u=math.nan,
    )
    if contract.averaging is Averaging.ARITHMETIC:
        k_prime = adjusted_strike(
            contract.strike, model, term, contract.power, t, contract.fidelity
        )
        return replace(term, u=strike_threshold(model, k_prime, t), k_prime=k_prime)
    return replace(term, u=strike_threshold(model, contract.strike, t))
