"""Monte Carlo oracles for the closed forms.

Two independent engines live here. ``conditional_lognormal_oracle`` samples
the conditional Gaussian law of the log geometric average directly, so it
checks the algebra of the closed forms. ``mc_price`` simulates whole paths of
the jump-diffusion mixed fBm asset, with jumps placed at their sampled times,
and so measures how far the closed forms sit from the path-level model.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import fbm
from .model import Averaging, ModelParams, OptionContract, derive_term_params
from .pricing import actuarial_discount
from .special import DEFAULT_POLICY, TruncationPolicy, normal_cdf, poisson_weights

GENERATORS = ("cholesky", "circulant")

# substream slots inside one block
_S_BROWN, _S_FRAC, _S_COUNT, _S_TIMES, _S_SIZES = range(5)


@dataclass(frozen=True)
class McConfig:
    n_paths: int
    n_steps: int = 256
    seed: int = 0
    use_control_variate: bool = False
    generator: str | None = None  # None picks cholesky up to 4096 steps
    threads: int = 1
    block_size: int = 8192

    def __post_init__(self) -> None:
        if self.n_paths < 1:
            raise ValueError("n_paths must be >= 1")
        if self.n_steps < 2:
            raise ValueError("n_steps must be >= 2")
        if self.block_size < 1:
            raise ValueError("block_size must be >= 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.generator is not None and self.generator not in GENERATORS:
            raise ValueError(f"generator must be one of {GENERATORS}")
        if self.generator == "cholesky" and self.n_steps > fbm.CHOLESKY_MAX_STEPS:
            raise ValueError(
                f"cholesky generator is limited to {fbm.CHOLESKY_MAX_STEPS} steps"
            )

    @property
    def resolved_generator(self) -> str:
        if self.generator is not None:
            return self.generator
        return "cholesky" if self.n_steps <= fbm.CHOLESKY_MAX_STEPS else "circulant"


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n_effective: int
    seed: int

    def z_score(self, target: float) -> float:
        if self.std_error == 0.0:
            return 0.0 if self.mean == target else math.copysign(math.inf, self.mean - target)
        return (self.mean - target) / self.std_error


@dataclass(frozen=True)
class PathBatch:
    """Simulated log-spot paths on a uniform grid, plus the jumps that built them.

    ``jump_path[k]`` is the path of jump ``k`` and ``jump_step[k]`` the first
    grid index at or after its arrival time.
    """

    grid: np.ndarray
    log_spot: np.ndarray
    jump_counts: np.ndarray
    jump_path: np.ndarray
    jump_step: np.ndarray
    jump_size: np.ndarray
    generator: str


def _block_streams(seed: int, block: int) -> list[np.random.Generator]:
    root = np.random.SeedSequence(seed, spawn_key=(block,))
    return [np.random.default_rng(s) for s in root.spawn(5)]


def _fractional_part(model, n, maturity, n_steps, generator, rng):
    if model.epsilon == 0.0:
        return np.zeros((n, n_steps)), generator
    if generator == "circulant":
        try:
            return fbm.fbm_circulant(n, n_steps, maturity, model.hurst, rng), generator
        except fbm.EmbeddingError:
            if n_steps > fbm.CHOLESKY_MAX_STEPS:
                raise
            generator = "cholesky"
    return fbm.fbm_cholesky(n, n_steps, maturity, model.hurst, rng), generator


def _simulate(model: ModelParams, maturity: float, n: int, n_steps: int,
              generator: str, streams: list[np.random.Generator]) -> PathBatch:
    grid = np.linspace(0.0, maturity, n_steps + 1)
    dt = maturity / n_steps
    t = grid[1:]

    brown = np.cumsum(
        streams[_S_BROWN].standard_normal((n, n_steps)) * math.sqrt(dt), axis=1
    )
    frac, used = _fractional_part(model, n, maturity, n_steps, generator, streams[_S_FRAC])

    drift = (
        math.log(model.s0)
        + (model.r - model.q - 0.5 * model.sigma**2) * t
        - 0.5 * model.epsilon**2 * t ** (2.0 * model.hurst)
    )
    log_spot = np.empty((n, n_steps + 1))
    log_spot[:, 0] = math.log(model.s0)
    log_spot[:, 1:] = drift + model.sigma * brown + model.epsilon * frac

    if model.lam > 0.0:
        counts = streams[_S_COUNT].poisson(model.lam * maturity, n)
        total = int(counts.sum())
        times = streams[_S_TIMES].uniform(0.0, maturity, total)
        sizes = streams[_S_SIZES].normal(model.mu_j, model.sigma_j, total)
        owner = np.repeat(np.arange(n), counts)
        step = np.clip(np.ceil(times / dt).astype(np.int64), 1, n_steps)
        jumps = np.zeros((n, n_steps + 1))
        np.add.at(jumps, (owner, step), sizes)
        log_spot += np.cumsum(jumps, axis=1)
    else:
        counts = np.zeros(n, dtype=np.int64)
        owner = step = np.zeros(0, dtype=np.int64)
        sizes = np.zeros(0)
    return PathBatch(grid, log_spot, counts, owner, step, sizes, used)


def sample_mixed_paths(model: ModelParams, maturity: float, config: McConfig,
                       block: int = 0) -> PathBatch:
    """Simulate ``config.n_paths`` paths from the substreams of one block."""
    if not maturity > 0:
        raise ValueError("maturity must be > 0")
    streams = _block_streams(config.seed, block)
    return _simulate(model, maturity, config.n_paths, config.n_steps,
                     config.resolved_generator, streams)


def trapezoid_weights(n_steps: int) -> np.ndarray:
    w = np.full(n_steps + 1, 1.0 / n_steps)
    w[0] = w[-1] = 0.5 / n_steps
    return w


def _black_payoff_mean(mean, var, m, fwd_disc, disc_k, is_call):
    """E[(fwd_disc e^{mL} - disc_k)^+] (or the put) for L ~ N(mean, var), vectorized."""
    mean = np.asarray(mean, dtype=float)
    var = np.broadcast_to(np.asarray(var, dtype=float), mean.shape)
    fwd = fwd_disc * np.exp(m * mean + 0.5 * m * m * var)
    if disc_k <= 0.0:
        return fwd - disc_k if is_call else np.zeros_like(fwd)
    sd = np.sqrt(var)
    thresh = math.log(disc_k / fwd_disc) / m
    with np.errstate(divide="ignore", invalid="ignore"):
        d2 = np.where(sd > 0, (mean - thresh) / sd, np.where(mean > thresh, np.inf, -np.inf))
    d1 = d2 + m * sd
    if is_call:
        return fwd * normal_cdf(d1) - disc_k * normal_cdf(d2)
    return disc_k * normal_cdf(-d2) - fwd * normal_cdf(-d1)


def _gaussian_average_law(model: ModelParams, maturity: float, n_steps: int):
    """Mean and variance of the trapezoid average of the jump-free log spot."""
    grid = np.linspace(0.0, maturity, n_steps + 1)
    w = trapezoid_weights(n_steps)
    drift = (
        math.log(model.s0)
        + (model.r - model.q - 0.5 * model.sigma**2) * grid
        - 0.5 * model.epsilon**2 * grid ** (2.0 * model.hurst)
    )
    cov = model.sigma**2 * np.minimum.outer(grid, grid)
    if model.epsilon > 0.0:
        cov = cov + model.epsilon**2 * fbm.covariance_matrix(grid, model.hurst)
    return float(w @ drift), float(w @ cov @ w)


def discrete_geometric_price(model: ModelParams, contract: OptionContract,
                             n_steps: int) -> float:
    """Exact price of the trapezoid-sampled geometric payoff for a jump-free model."""
    if model.lam != 0.0:
        raise ValueError("discrete_geometric_price requires lambda = 0")
    mean, var = _gaussian_average_law(model, contract.maturity, n_steps)
    t = contract.maturity
    return float(_black_payoff_mean(
        mean, var, contract.power, actuarial_discount(model, t),
        contract.strike * math.exp(-model.r * t), contract.is_call,
    ))


def _centered(y: np.ndarray) -> tuple[float, np.ndarray]:
    """Sample mean and deviations, shifted by the first draw so constant samples stay exact."""
    d = y - y[0]
    d_mean = d.mean()
    return float(y[0] + d_mean), d - d_mean


def _plain_estimate(y: np.ndarray, seed: int) -> McEstimate:
    n = y.size
    mean, dev = _centered(y)
    var = float(dev @ dev) / (n - 1) if n > 1 else 0.0
    return McEstimate(mean, math.sqrt(var / n), n, seed)


def _control_estimate(y: np.ndarray, x: np.ndarray, seed: int) -> McEstimate:
    """Regression control-variate estimate for a control ``x`` with known mean zero."""
    n = y.size
    mean_y, dy = _centered(y)
    mean_x, dx = _centered(x)
    sxx = float(dx @ dx)
    beta = float(dx @ dy) / sxx if sxx > 0 else 0.0
    resid = dy - beta * dx
    var = float(resid @ resid) / (n - 2) if n > 2 else 0.0
    return McEstimate(mean_y - beta * mean_x, math.sqrt(var / n), n, seed)


def _block_sizes(total: int, block_size: int) -> list[int]:
    full, rest = divmod(total, block_size)
    return [block_size] * full + ([rest] if rest else [])


def _run_blocks(func, config: McConfig) -> list:
    """Run ``func(block, n)`` over all path blocks; results come back in block order."""
    sizes = _block_sizes(config.n_paths, config.block_size)
    jobs = list(enumerate(sizes))
    if config.threads == 1 or len(jobs) == 1:
        return [func(b, n) for b, n in jobs]
    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        return list(pool.map(lambda job: func(*job), jobs))


def mc_price(model: ModelParams, contract: OptionContract, config: McConfig) -> McEstimate:
    """Path-level price of the contract under the actuarial discounting.

    With ``use_control_variate`` an arithmetic contract is paired with the
    geometric payoff at the same strike. Its control mean is the closed-form
    price of the sampled geometric average conditional on the path's jump
    times, which is exact for every parameter set, so the control adds no bias.
    """
    t = contract.maturity
    m = contract.power
    fwd_disc = actuarial_discount(model, t)
    disc_k = contract.strike * math.exp(-model.r * t)
    w = trapezoid_weights(config.n_steps)
    arithmetic = contract.averaging is Averaging.ARITHMETIC
    use_cv = config.use_control_variate and arithmetic
    if use_cv:
        g_mean, g_var = _gaussian_average_law(model, t, config.n_steps)
        # weight a jump landing at grid index i carries into the average
        tail_w = np.cumsum(w[::-1])[::-1]
    sign = 1.0 if contract.is_call else -1.0

    def payoff(avg_pow):
        return np.maximum(sign * (fwd_disc * avg_pow - disc_k), 0.0)

    def block(b: int, n: int) -> dict:
        batch = _simulate(model, t, n, config.n_steps, config.resolved_generator,
                          _block_streams(config.seed, b))
        log_avg = batch.log_spot @ w
        if arithmetic:
            y = payoff((np.exp(batch.log_spot) @ w) ** m)
        else:
            y = payoff(np.exp(m * log_avg))
        x = None
        if use_cv:
            c = tail_w[batch.jump_step]
            c_sum = np.bincount(batch.jump_path, weights=c, minlength=n)
            c_sq = np.bincount(batch.jump_path, weights=c * c, minlength=n)
            cond_mean = g_mean + model.mu_j * c_sum
            cond_var = g_var + model.sigma_j**2 * c_sq
            expected = _black_payoff_mean(cond_mean, cond_var, m, fwd_disc, disc_k,
                                          contract.is_call)
            x = payoff(np.exp(m * log_avg)) - expected
        return y, x

    parts = _run_blocks(block, config)
    y = np.concatenate([p[0] for p in parts])
    if not use_cv:
        return _plain_estimate(y, config.seed)
    return _control_estimate(y, np.concatenate([p[1] for p in parts]), config.seed)


def terminal_spot_mean(model: ModelParams, maturity: float, config: McConfig) -> McEstimate:
    """Sample mean of S_T with its standard error."""

    def block(b: int, n: int) -> dict:
        batch = _simulate(model, maturity, n, config.n_steps, config.resolved_generator,
                          _block_streams(config.seed, b))
        return np.exp(batch.log_spot[:, -1])

    return _plain_estimate(np.concatenate(_run_blocks(block, config)), config.seed)


def conditional_lognormal_oracle(
    model: ModelParams,
    contract: OptionContract,
    n_samples: int,
    seed: int,
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> McEstimate:
    """Poisson-weighted Monte Carlo over the conditional law of the log average.

    For each jump count the log geometric average is drawn from its Gaussian
    law and the actuarially discounted payoff of ``exp(m L)`` against the
    effective strike (``K`` or the adjusted ``K'``) is averaged. Every jump
    count gets its own substream and ``n_samples`` draws.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    t = contract.maturity
    m = contract.power
    fwd_disc = actuarial_discount(model, t)
    disc_r = math.exp(-model.r * t)
    sign = 1.0 if contract.is_call else -1.0
    weights, _ = poisson_weights(model.lam * t, policy)
    streams = np.random.SeedSequence(seed).spawn(len(weights))
    means, variances = [], []
    for n, (w, ss) in enumerate(zip(weights, streams)):
        term = derive_term_params(model, contract, n)
        k_eff = term.k_prime if term.k_prime is not None else contract.strike
        z = np.random.default_rng(ss).standard_normal(n_samples)
        log_avg = term.mu_hat + term.sigma_hat * z
        y = np.maximum(sign * (fwd_disc * np.exp(m * log_avg) - k_eff * disc_r), 0.0)
        est = _plain_estimate(y, seed)
        means.append(w * est.mean)
        variances.append(w * w * est.std_error**2)
    return McEstimate(math.fsum(means), math.sqrt(math.fsum(variances)), n_samples, seed)
