"""Cell geometry, distance-based large-scale fading, and canonical layouts.

Conventions used throughout the package:

* positions are 2-D ``(x, y)`` coordinates in meters,
* cell, user and BS indices are 0-based,
* ``beta[j, k, l]`` is the large-scale gain from user ``k`` of cell ``l``
  to the BS of cell ``j``.

Canonical layouts place all ``K`` users of a cell at a single point on the
cell edge, which gives a conservative (cell-edge) rate estimate.  Arbitrary
per-user positions are supported through :class:`CellLayout`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SystemParams",
    "CellLayout",
    "pathloss",
    "build_fading",
    "two_cell_layout",
    "three_cell_layout",
]


@dataclass(frozen=True)
class SystemParams:
    """Scalar network parameters.

    Attributes:
        L: number of cells (one BS per cell).
        K: users per cell.
        M: BS antenna count.  Stored as a positive real so that threshold
           searches may interpolate between integer antenna counts.
        rho_u: linear uplink transmit SNR.
        rho_p: linear pilot SNR.
        alpha_pl: path-loss exponent.
        d0: path-loss reference distance in meters.
        tau: pilot sequence length in symbols; defaults to K.
    """

    L: int
    K: int
    M: float
    rho_u: float
    rho_p: float
    alpha_pl: float = 2.0
    d0: float = 100.0
    tau: int | None = None

    def __post_init__(self):
        if not isinstance(self.L, int) or self.L < 1:
            raise ValueError(f"L must be a positive integer, got {self.L!r}")
        if not isinstance(self.K, int) or self.K < 1:
            raise ValueError(f"K must be a positive integer, got {self.K!r}")
        if not self.M > 0:
            raise ValueError(f"M must be positive, got {self.M!r}")
        if not self.rho_u > 0:
            raise ValueError(f"rho_u must be positive, got {self.rho_u!r}")
        if not self.rho_p > 0:
            raise ValueError(f"rho_p must be positive, got {self.rho_p!r}")
        if self.alpha_pl < 0:
            raise ValueError(f"alpha_pl must be >= 0, got {self.alpha_pl!r}")
        if not self.d0 > 0:
            raise ValueError(f"d0 must be positive, got {self.d0!r}")
        if self.tau is None:
            object.__setattr__(self, "tau", self.K)
        elif not isinstance(self.tau, int) or self.tau < 1:
            raise ValueError(f"tau must be a positive integer, got {self.tau!r}")

    def with_m(self, m: float) -> "SystemParams":
        """Copy of the parameters with a different antenna count."""
        return SystemParams(self.L, self.K, m, self.rho_u, self.rho_p,
                            self.alpha_pl, self.d0, self.tau)


@dataclass(frozen=True, eq=False)
class CellLayout:
    """BS and user positions.

    ``bs`` has shape (L, 2); ``users`` has shape (L, K, 2) where
    ``users[l, k]`` is the position of user k in cell l.
    """

    bs: np.ndarray
    users: np.ndarray

    def __post_init__(self):
        bs = np.asarray(self.bs, dtype=float)
        users = np.asarray(self.users, dtype=float)
        if bs.ndim != 2 or bs.shape[1] != 2:
            raise ValueError(f"bs positions must have shape (L, 2), got {bs.shape}")
        if users.ndim != 3 or users.shape[2] != 2:
            raise ValueError(f"user positions must have shape (L, K, 2), got {users.shape}")
        if users.shape[0] != bs.shape[0]:
            raise ValueError(
                f"layout has {bs.shape[0]} BSs but user positions for {users.shape[0]} cells")
        object.__setattr__(self, "bs", bs)
        object.__setattr__(self, "users", users)

    @property
    def num_cells(self) -> int:
        return self.bs.shape[0]

    @property
    def users_per_cell(self) -> int:
        return self.users.shape[1]

    def to_dict(self) -> dict:
        return {
            "bs_positions": self.bs.tolist(),
            "user_positions": self.users.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CellLayout":
        try:
            return cls(np.asarray(d["bs_positions"]), np.asarray(d["user_positions"]))
        except KeyError as exc:
            raise ValueError(f"layout dict is missing key {exc.args[0]!r}") from None


def pathloss(d, d0: float, alpha_pl: float):
    """Distance-based gain ``(d0 / d) ** alpha_pl``.

    Accepts scalars or arrays.  Distances must be strictly positive.
    """
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("pathloss requires strictly positive distances")
    if d0 <= 0:
        raise ValueError("pathloss requires a strictly positive reference distance d0")
    out = (d0 / d) ** alpha_pl
    return float(out) if out.ndim == 0 else out


def build_fading(layout: CellLayout, params: SystemParams) -> np.ndarray:
    """Large-scale fading tensor ``beta[j, k, l]`` for a layout.

    Every entry is the pathloss gain over the BS-to-user distance.  Raises if
    the layout dimensions disagree with ``params`` or if a user sits exactly
    on a BS.
    """
    if layout.num_cells != params.L:
        raise ValueError(
            f"layout has {layout.num_cells} cells but params.L = {params.L}")
    if layout.users_per_cell != params.K:
        raise ValueError(
            f"layout has {layout.users_per_cell} users per cell but params.K = {params.K}")
    # diff[j, l, k] = user k of cell l relative to BS j
    diff = layout.users[None, :, :, :] - layout.bs[:, None, None, :]
    dist = np.linalg.norm(diff, axis=-1)  # (L, L, K), indexed [j, l, k]
    if np.any(dist <= 0.0):
        raise ValueError("a user is co-located with a BS; distances must be positive")
    beta = pathloss(dist, params.d0, params.alpha_pl)
    return np.ascontiguousarray(beta.transpose(0, 2, 1))  # -> [j, k, l]


def _mirrored_pair(center_a, center_b, radius, angle_deg):
    """User points for two cells that mirror each other across their bisector.

    The angle is measured at each BS from the ray pointing toward the other
    BS, so 0 deg places the user between the BSs and 180 deg on the outer
    edge.  Both cells use the same angle, mirrored, which keeps the layout
    symmetric.
    """
    phi = math.radians(angle_deg)
    ux = radius * math.cos(phi)
    uy = radius * math.sin(phi)
    pa = (center_a[0] + ux, center_a[1] + uy)
    pb = (center_b[0] - ux, center_b[1] + uy)
    return pa, pb


def two_cell_layout(x: float, spacing: float, user_angle_deg: float = 180.0,
                    users_per_cell: int = 1) -> CellLayout:
    """Symmetric two-cell layout: BSs ``spacing`` apart, users at radius ``x``.

    All users of a cell are co-located at distance ``x`` from their BS, at
    ``user_angle_deg`` measured from the ray toward the other BS (mirrored in
    the second cell).  The default 180 deg puts users on the outer cell edge,
    so the cross-cell distance is ``spacing + x``; 0 deg ("facing") gives a
    cross distance of ``spacing - x``.
    """
    if x <= 0:
        raise ValueError(f"cell radius x must be positive, got {x!r}")
    if spacing <= 0:
        raise ValueError(f"BS spacing must be positive, got {spacing!r}")
    if users_per_cell < 1:
        raise ValueError("users_per_cell must be >= 1")
    bs = np.array([[0.0, 0.0], [spacing, 0.0]])
    p1, p2 = _mirrored_pair(bs[0], bs[1], x, user_angle_deg)
    users = np.array([[p1] * users_per_cell, [p2] * users_per_cell])
    return CellLayout(bs, users)


def three_cell_layout(x: float, spacing: float | None = None, theta_deg: float = 90.0,
                      outer_angle_deg: float = 180.0, users_per_cell: int = 1) -> CellLayout:
    """Three collinear cells with a movable middle-cell user position.

    BSs sit on a horizontal axis ``spacing`` apart (default ``2 * x``, i.e.
    adjacent circles of radius ``x``).  Outer-cell users are co-located at
    radius ``x`` and angle ``outer_angle_deg`` from the ray toward the middle
    BS; the default 180 deg is the outermost edge point, the farthest from
    all BSs.  Middle-cell users sit on the cell edge at ``theta_deg`` measured
    from the ray toward BS 0, so theta = 0 is nearest cell 0 and theta = 180
    nearest cell 2.  The layout for theta and 360 - theta is mirror-identical.
    """
    if x <= 0:
        raise ValueError(f"cell radius x must be positive, got {x!r}")
    if spacing is None:
        spacing = 2.0 * x
    if spacing <= 0:
        raise ValueError(f"BS spacing must be positive, got {spacing!r}")
    if not 0.0 <= theta_deg <= 360.0:
        raise ValueError(f"theta_deg must be in [0, 360], got {theta_deg!r}")
    if users_per_cell < 1:
        raise ValueError("users_per_cell must be >= 1")
    bs = np.array([[0.0, 0.0], [spacing, 0.0], [2.0 * spacing, 0.0]])
    p_left, p_right = _mirrored_pair(bs[0], bs[2], x, outer_angle_deg)
    th = math.radians(theta_deg)
    p_mid = (spacing - x * math.cos(th), x * math.sin(th))
    users = np.array([
        [p_left] * users_per_cell,
        [p_mid] * users_per_cell,
        [p_right] * users_per_cell,
    ])
    return CellLayout(bs, users)
