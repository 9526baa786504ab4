"""Closed-form achievable-rate lower bounds after MRC.

Each BS j observes, for pilot slot i, a scalar multiple-access channel over
the L co-pilot users.  With Gaussian signaling and a worst-case uncorrelated
Gaussian effective noise, jointly decoding the users in a set ``omega`` while
treating the rest as noise yields, for every subset ``theta`` of ``omega``,
the achievable sum-rate bound

    sum_{l in theta} R_l <= C( N(theta) / (N(omega^c) + F) ),

where ``N(S) = M * sqrt(rho_p) * rho_u * sum_{l in S} beta_jil * alpha_jil``
is the coherently combined power of the users in S, and
``F = sum_{l,k} rho_u * beta_jkl + 1`` is the non-coherent interference plus
noise floor.  Rates are in bits per channel use (base-2 logs).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .estimation import ChannelState

__all__ = [
    "DecodeSpec",
    "PowerDecomposition",
    "capacity",
    "coherent_power",
    "noise_floor",
    "rate_bound",
    "rate_bound_sets",
    "power_terms",
    "tin_rate",
    "tin_rate_asymptotic",
    "mu_coefficient",
]

_LN2 = math.log(2.0)


def capacity(snr) -> float:
    """Shannon rate log2(1 + snr) in bits."""
    return np.log1p(snr) / _LN2


@dataclass(frozen=True)
class DecodeSpec:
    """Which users BS ``j`` decodes for pilot slot ``i``.

    ``omega`` is the jointly decoded set of cell indices; ``theta`` is the
    nonempty subset whose sum-rate is being bounded.  Users outside ``omega``
    are treated as noise.
    """

    j: int
    i: int
    omega: frozenset[int]
    theta: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "omega", frozenset(self.omega))
        object.__setattr__(self, "theta", frozenset(self.theta))
        if not self.theta:
            raise ValueError("theta must be a nonempty set of cell indices")
        if not self.theta <= self.omega:
            raise ValueError(f"theta {set(self.theta)} must be a subset of omega {set(self.omega)}")
        if any(l < 0 for l in self.omega) or self.j < 0 or self.i < 0:
            raise ValueError("cell, BS and pilot indices must be nonnegative")

    def validate(self, L: int, K: int) -> None:
        if self.j >= L:
            raise ValueError(f"BS index {self.j} out of range for L={L}")
        if self.i >= K:
            raise ValueError(f"pilot index {self.i} out of range for K={K}")
        if any(l >= L for l in self.omega):
            raise ValueError(f"omega {set(self.omega)} has entries out of range for L={L}")


@dataclass(frozen=True)
class PowerDecomposition:
    """The four power terms of the combined signal: desired coherent power,
    channel-estimation-error interference, other-user interference, noise."""

    desired: float
    est_error: float
    other_users: float
    noise: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.desired, self.est_error, self.other_users, self.noise)

    @property
    def total_noise(self) -> float:
        return self.est_error + self.other_users + self.noise


def coherent_power(state: ChannelState, j: int, i: int) -> np.ndarray:
    """Per-cell coherent power N({l}) = M sqrt(rho_p) rho_u beta_jil alpha_jil."""
    p = state.params
    b = state.beta[j, i, :]
    a = state.stats.alpha[j, i, :]
    return p.M * math.sqrt(p.rho_p) * p.rho_u * b * a


def noise_floor(state: ChannelState, j: int) -> float:
    """Non-coherent interference plus noise floor sum_{l,k} rho_u beta_jkl + 1."""
    return float(state.params.rho_u * state.beta[j].sum() + 1.0)


def rate_bound(state: ChannelState, spec: DecodeSpec) -> float:
    """Achievable sum-rate bound for ``spec.theta`` at BS ``spec.j`` (bits)."""
    spec.validate(state.L, state.K)
    coh = coherent_power(state, spec.j, spec.i)
    omega_c = [l for l in range(state.L) if l not in spec.omega]
    num = coh[list(spec.theta)].sum()
    den = coh[omega_c].sum() + noise_floor(state, spec.j)
    return float(capacity(num / den))


def rate_bound_sets(state: ChannelState, j: int, i: int, theta, omega) -> float:
    """Convenience wrapper building the :class:`DecodeSpec` inline."""
    return rate_bound(state, DecodeSpec(j, i, frozenset(omega), frozenset(theta)))


def power_terms(state: ChannelState, j: int, i: int, omega) -> PowerDecomposition:
    """Analytic power split of the combined output at BS j, pilot slot i.

    ``desired`` is the squared mean of the coherent components of the decoded
    set ``omega`` (scales as M^2); the three noise terms scale as M.
    """
    p = state.params
    beta = state.beta
    b_own = beta[j, i, j]
    a_own = state.stats.alpha[j, i, j]
    omega = sorted(set(omega))
    if any(l < 0 or l >= state.L for l in omega):
        raise ValueError(f"omega {omega} has entries out of range for L={state.L}")
    desired = p.M ** 2 * p.rho_p * p.rho_u * float(
        (beta[j, i, omega] ** 2).sum()) * a_own ** 2
    scale = p.M * math.sqrt(p.rho_p) * b_own * a_own
    est_error = scale * p.rho_u * float(beta[j, i, :].sum())
    mask = np.ones(state.K, dtype=bool)
    mask[i] = False
    other_users = scale * p.rho_u * float(beta[j, mask, :].sum())
    return PowerDecomposition(desired=float(desired), est_error=float(est_error),
                              other_users=float(other_users), noise=float(scale))


def tin_rate(state: ChannelState, j: int, i: int) -> float:
    """Rate when BS j decodes only its own user and treats the co-pilot
    interference (whose combined power also grows with M) as noise."""
    return rate_bound_sets(state, j, i, theta={j}, omega={j})


def tin_rate_asymptotic(state: ChannelState, j: int, i: int) -> float:
    """Large-M limit of the TIN rate: C(beta_own^2 / sum_other beta^2).

    Unbounded (returns ``inf``) for a single-cell network where no co-pilot
    interference exists.
    """
    if state.L == 1:
        return math.inf
    b = state.beta[j, i, :]
    others = np.delete(b, j)
    return float(capacity(b[j] ** 2 / (others ** 2).sum()))


def mu_coefficient(state: ChannelState, j: int, i: int) -> float:
    """SINR-per-squared-gain coefficient: with full joint decoding, the
    sum-rate bound for theta is log2(1 + mu * sum_{l in theta} beta_jil^2)."""
    p = state.params
    b_sum = float(state.beta[j, i, :].sum())
    return p.M * p.rho_p * p.rho_u / (noise_floor(state, j) * (1.0 + p.rho_p * b_sum))
