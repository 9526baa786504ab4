"""Closed-form MMSE channel-estimation statistics from large-scale fading.

With shared pilots across cells, the despread pilot observation for slot k
at BS j is r_jk = sum_l sqrt(rho_p) g_jkl + noise.  The MMSE estimate of the
own-cell channel is g_hat_jkj = alpha[j,k,j] * r_jk with

    alpha[j, k, l] = sqrt(rho_p) * beta[j,k,l] / (1 + rho_p * sum_l1 beta[j,k,l1]).

The estimate and the estimation error are orthogonal, so their per-antenna
variances add up to the channel gain beta[j,k,j].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .network import CellLayout, SystemParams, build_fading

__all__ = ["EstimationStats", "ChannelState", "mmse_coeffs", "prelog_factors"]


@dataclass(frozen=True, eq=False)
class EstimationStats:
    """Per-link MMSE coefficients and estimate/error variances.

    ``alpha`` has shape (L, K, L); ``est_var`` and ``err_var`` have shape
    (L, K) and hold the per-antenna variances of the own-channel estimate and
    of the estimation error.
    """

    alpha: np.ndarray
    est_var: np.ndarray
    err_var: np.ndarray

    @property
    def alpha_own(self) -> np.ndarray:
        """alpha[j, k, j] as an (L, K) array."""
        L = self.alpha.shape[0]
        idx = np.arange(L)
        return self.alpha[idx[:, None], np.arange(self.alpha.shape[1])[None, :], idx[:, None]]


def mmse_coeffs(beta: np.ndarray, params: SystemParams) -> EstimationStats:
    """MMSE estimation statistics for a fading tensor."""
    beta = np.asarray(beta, dtype=float)
    sp = math.sqrt(params.rho_p)
    denom = 1.0 + params.rho_p * beta.sum(axis=2)  # (L, K)
    alpha = sp * beta / denom[:, :, None]
    idx = np.arange(params.L)
    beta_own = beta[idx[:, None], np.arange(params.K)[None, :], idx[:, None]]
    alpha_own = alpha[idx[:, None], np.arange(params.K)[None, :], idx[:, None]]
    est_var = sp * beta_own * alpha_own
    err_var = beta_own * (1.0 - sp * alpha_own)
    return EstimationStats(alpha=alpha, est_var=est_var, err_var=err_var)


def prelog_factors(params: SystemParams) -> tuple[float, float]:
    """Decoded-user pre-log factors for shared vs per-cell pilot sets.

    Re-using one pilot set everywhere means a BS decodes L co-pilot users;
    rotating distinct sets per cell contaminates the estimate with every
    out-of-cell user, so K*(L-1)+1 users would have to be decoded.  Returns
    ``(1/L, 1/(K*(L-1)+1))``.
    """
    same = 1.0 / params.L
    different = 1.0 / (params.K * (params.L - 1) + 1)
    return same, different


@dataclass(frozen=True, eq=False)
class ChannelState:
    """Deterministic channel statistics bundle: params, fading and MMSE stats.

    This is the common input to the rate-bound, region and simulation layers.
    Instances are immutable and safe to share across workers.
    """

    params: SystemParams
    beta: np.ndarray
    stats: EstimationStats

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=float)
        expected = (self.params.L, self.params.K, self.params.L)
        if beta.shape != expected:
            raise ValueError(f"beta must have shape {expected}, got {beta.shape}")
        if not np.all(np.isfinite(beta)) or np.any(beta <= 0):
            raise ValueError("beta entries must be finite and strictly positive")
        object.__setattr__(self, "beta", beta)

    @classmethod
    def from_beta(cls, beta: np.ndarray, params: SystemParams) -> "ChannelState":
        return cls(params=params, beta=np.asarray(beta, dtype=float),
                   stats=mmse_coeffs(beta, params))

    @classmethod
    def from_layout(cls, layout: CellLayout, params: SystemParams) -> "ChannelState":
        return cls.from_beta(build_fading(layout, params), params)

    def with_m(self, m: float) -> "ChannelState":
        """Same fading with a different antenna count (stats are M-free)."""
        return ChannelState(params=self.params.with_m(m), beta=self.beta, stats=self.stats)

    @property
    def L(self) -> int:
        return self.params.L

    @property
    def K(self) -> int:
        return self.params.K
