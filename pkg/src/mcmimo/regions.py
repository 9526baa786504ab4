"""Achievable rate regions at one BS: TIN, SD, S-SND polytopes and the SND
union of MAC polytopes.

A :class:`Polytope` is a set of subset-sum constraints over the L co-pilot
user rates; coordinates that appear in no constraint are unbounded.  The SND
region is a union of one MAC polytope per decoded set ``omega`` containing
the own cell; users outside ``omega`` enter the bounds as noise and their
rate coordinates are unconstrained within that part.

All constraint bounds are evaluated once at construction time; regions are
immutable afterwards and membership queries are read-only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .bounds import capacity, coherent_power, noise_floor, rate_bound_sets, tin_rate
from .estimation import ChannelState

__all__ = [
    "Polytope",
    "RegionFamily",
    "tin_region",
    "sd_region",
    "ssnd_region",
    "snd_region",
    "membership",
]


def _mask_to_set(mask: int) -> frozenset[int]:
    out = []
    l = 0
    while mask:
        if mask & 1:
            out.append(l)
        mask >>= 1
        l += 1
    return frozenset(out)


def _set_to_mask(s: Iterable[int]) -> int:
    mask = 0
    for l in s:
        mask |= 1 << l
    return mask


def _constraint_order(item):
    subset, _ = item
    return (len(subset), _set_to_mask(subset))


@dataclass(frozen=True)
class Polytope:
    """Rates R >= 0 with sum_{l in subset} R_l <= bound for each constraint.

    ``constraints`` maps nonempty cell subsets to nonnegative rate bounds,
    stored sorted by (cardinality, bitmask).  Missing subsets are unbounded.
    """

    dim: int
    constraints: tuple[tuple[frozenset[int], float], ...]

    def __post_init__(self):
        seen = set()
        for subset, bound in self.constraints:
            if not subset:
                raise ValueError("constraint subsets must be nonempty")
            if subset in seen:
                raise ValueError(f"duplicate constraint subset {set(subset)}")
            if any(l < 0 or l >= self.dim for l in subset):
                raise ValueError(f"subset {set(subset)} out of range for dim {self.dim}")
            if bound < 0:
                raise ValueError(f"constraint bound must be nonnegative, got {bound}")
            seen.add(subset)
        ordered = tuple(sorted(self.constraints, key=_constraint_order))
        object.__setattr__(self, "constraints", ordered)

    def contains(self, point: Sequence[float]) -> bool:
        point = np.asarray(point, dtype=float)
        if point.shape != (self.dim,):
            raise ValueError(f"point must have length {self.dim}, got shape {point.shape}")
        if np.any(point < 0):
            raise ValueError("rate points must be componentwise nonnegative")
        for subset, bound in self.constraints:
            if point[list(subset)].sum() > bound:
                return False
        return True


@dataclass(frozen=True)
class RegionFamily:
    """A per-BS achievable region: one polytope, or a union of them for SND.

    For SND, ``omegas[p]`` is the decoded set of ``parts[p]``; the union runs
    over every decoded set containing the own cell.
    """

    kind: str
    parts: tuple[Polytope, ...]
    omegas: tuple[frozenset[int], ...]

    def __post_init__(self):
        if self.kind not in ("tin", "sd", "ssnd", "snd"):
            raise ValueError(f"unknown region kind {self.kind!r}")
        if len(self.parts) != len(self.omegas):
            raise ValueError("parts and omegas must align")
        if self.kind != "snd" and len(self.parts) != 1:
            raise ValueError(f"{self.kind} region must have exactly one part")

    @property
    def dim(self) -> int:
        return self.parts[0].dim

    def contains(self, point: Sequence[float]) -> bool:
        return any(part.contains(point) for part in self.parts)


def _subsets(mask: int):
    """Nonempty submasks of ``mask`` in increasing order."""
    sub = mask
    out = []
    while sub:
        out.append(sub)
        sub = (sub - 1) & mask
    return sorted(out)


def _subset_sums(values: np.ndarray) -> np.ndarray:
    """sums[mask] = sum of values[l] over set bits of mask."""
    n = len(values)
    sums = np.zeros(1 << n)
    for mask in range(1, 1 << n):
        low = mask & -mask
        sums[mask] = sums[mask ^ low] + values[low.bit_length() - 1]
    return sums


def tin_region(state: ChannelState, j: int, i: int) -> RegionFamily:
    """Own-rate box: only the own user is decoded, others are noise."""
    poly = Polytope(dim=state.L,
                    constraints=((frozenset({j}), tin_rate(state, j, i)),))
    return RegionFamily(kind="tin", parts=(poly,), omegas=(frozenset({j}),))


def sd_region(state: ChannelState, j: int, i: int) -> RegionFamily:
    """Full MAC polytope: all L co-pilot users jointly and uniquely decoded."""
    full = frozenset(range(state.L))
    cons = tuple((_mask_to_set(m), rate_bound_sets(state, j, i, _mask_to_set(m), full))
                 for m in _subsets((1 << state.L) - 1))
    return RegionFamily(kind="sd", parts=(Polytope(state.L, cons),), omegas=(full,))


def ssnd_region(state: ChannelState, j: int, i: int) -> RegionFamily:
    """SD polytope with every constraint not involving the own rate removed."""
    full = frozenset(range(state.L))
    cons = tuple((_mask_to_set(m), rate_bound_sets(state, j, i, _mask_to_set(m), full))
                 for m in _subsets((1 << state.L) - 1) if m & (1 << j))
    return RegionFamily(kind="ssnd", parts=(Polytope(state.L, cons),), omegas=(full,))


def snd_region(state: ChannelState, j: int, i: int, max_cells: int = 12) -> RegionFamily:
    """Union of MAC polytopes over all decoded sets containing the own cell.

    Within the part for decoded set omega, users outside omega contribute
    their coherent power to the bound denominators and their rate coordinates
    are unconstrained.  Exponential in L; refuses L > max_cells.
    """
    L = state.L
    if L > max_cells:
        raise ValueError(
            f"snd_region enumerates 2^(L-1) decoded sets; L={L} exceeds the "
            f"supported limit of {max_cells}")
    coh = coherent_power(state, j, i)
    floor = noise_floor(state, j)
    sums = _subset_sums(coh)
    full_mask = (1 << L) - 1
    parts = []
    omegas = []
    for om in range(1, full_mask + 1):
        if not om & (1 << j):
            continue
        den = sums[full_mask ^ om] + floor
        cons = tuple((_mask_to_set(m), float(capacity(sums[m] / den)))
                     for m in _subsets(om))
        parts.append(Polytope(L, cons))
        omegas.append(_mask_to_set(om))
    return RegionFamily(kind="snd", parts=tuple(parts), omegas=tuple(omegas))


def membership(point: Sequence[float], region: Union[RegionFamily, Polytope]) -> bool:
    """True if the rate point lies in the region (any part, for unions)."""
    return region.contains(point)
