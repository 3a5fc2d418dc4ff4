"""Exact sampling of fractional Brownian motion on a uniform grid."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

CHOLESKY_MAX_STEPS = 4096


class EmbeddingError(RuntimeError):
    """The circulant embedding has a materially negative eigenvalue."""


def fbm_covariance(t, s, hurst: float):
    """Cov(B^H_t, B^H_s) = (t^2H + s^2H - |t - s|^2H) / 2."""
    if not 0.0 < hurst < 1.0:
        raise ValueError(f"hurst must lie in (0, 1), got {hurst}")
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    if (t < 0).any() or (s < 0).any():
        raise ValueError("fbm_covariance: times must be >= 0")
    h2 = 2.0 * hurst
    out = 0.5 * (t**h2 + s**h2 - np.abs(t - s) ** h2)
    return float(out) if out.ndim == 0 else out


def covariance_matrix(times: np.ndarray, hurst: float) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    return fbm_covariance(times[:, None], times[None, :], hurst)


@lru_cache(maxsize=32)
def _cholesky_factor(n_steps: int, maturity: float, hurst: float) -> np.ndarray:
    times = np.linspace(0.0, maturity, n_steps + 1)[1:]
    return np.linalg.cholesky(covariance_matrix(times, hurst))


def fgn_autocovariance(n: int, hurst: float) -> np.ndarray:
    """Autocovariance of unit-step fractional Gaussian noise at lags 0..n-1."""
    k = np.arange(n, dtype=float)
    h2 = 2.0 * hurst
    return 0.5 * (np.abs(k + 1) ** h2 - 2.0 * k**h2 + np.abs(k - 1) ** h2)


@lru_cache(maxsize=32)
def _circulant_sqrt_eigs(n_steps: int, hurst: float) -> np.ndarray:
    gamma = fgn_autocovariance(n_steps + 1, hurst)
    row = np.concatenate([gamma, gamma[-2:0:-1]])  # length 2*n_steps
    eigs = np.fft.fft(row).real
    if eigs.min() < -1e-10 * eigs.max():
        raise EmbeddingError(
            f"circulant embedding not non-negative (min eigenvalue {eigs.min():.3e})"
        )
    return np.sqrt(np.clip(eigs, 0.0, None) / row.size)


def fbm_cholesky(n_paths: int, n_steps: int, maturity: float, hurst: float,
                 rng: np.random.Generator) -> np.ndarray:
    """fBm values at t_1..t_M, shape (n_paths, n_steps)."""
    if n_steps > CHOLESKY_MAX_STEPS:
        raise ValueError(f"cholesky generator limited to {CHOLESKY_MAX_STEPS} steps")
    chol = _cholesky_factor(n_steps, float(maturity), float(hurst))
    z = rng.standard_normal((n_paths, n_steps))
    return z @ chol.T


def fbm_circulant(n_paths: int, n_steps: int, maturity: float, hurst: float,
                  rng: np.random.Generator) -> np.ndarray:
    """fBm values at t_1..t_M via Davies-Harte embedding of the increments."""
    lam = _circulant_sqrt_eigs(n_steps, float(hurst))
    size = lam.size
    z = rng.standard_normal((n_paths, size)) + 1j * rng.standard_normal((n_paths, size))
    w = np.fft.fft(lam * z, axis=1)
    # real and imaginary parts are independent copies; the real part is used
    fgn = w.real[:, :n_steps]
    dt = maturity / n_steps
    return np.cumsum(fgn, axis=1) * dt**hurst
