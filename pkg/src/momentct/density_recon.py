"""Density reconstruction from a finite moment table.

The reconstruction evaluates, at each point, a binomially weighted
alternating sum of shifted moments; it converges uniformly to the density
as the orders grow.  The sum is severely cancellation-prone: coefficients
grow roughly like 4^order while the value stays O(1).  Coefficients are
therefore computed in exact integer arithmetic and the terms summed with
exact float summation; tables carrying exact rational entries are
propagated in exact arithmetic throughout.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConditioningWarning, OrderError, StabilityError
from .numerics import log_gamma
from .phantoms import Density, MomentTable

#: Above this order the double-precision path is meaningless even with
#: exact summation; require an explicit override.
DEFAULT_STABILITY_CAP = 40

#: Decimal digits of cancellation beyond which a warning is emitted.
_CANCELLATION_WARN_DIGITS = 15.0


@dataclass(frozen=True)
class ReconGrid:
    """Density samples at pixel centers ((i+0.5)/N, (j+0.5)/N)."""

    resolution: int
    values: np.ndarray
    orders: tuple | None = None

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.resolution, self.resolution):
            raise ValueError(f"values shape {v.shape} != resolution {self.resolution}")
        object.__setattr__(self, "values", v)

    def pixel_centers(self):
        xs = (np.arange(self.resolution) + 0.5) / self.resolution
        return np.meshgrid(xs, xs, indexing="ij")


@dataclass(frozen=True)
class BoundInputs:
    """Inputs of the uniform-approximation error bound."""

    sup_norm: float
    modulus: float
    delta: float
    m: int
    n: int

    def __post_init__(self) -> None:
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.sup_norm < 0 or self.modulus < 0:
            raise ValueError("sup_norm and modulus must be nonnegative")
        if self.m < 1 or self.n < 1:
            raise ValueError("orders must be positive")


def sup_error_bound(b: BoundInputs) -> float:
    """modulus + 4||f|| / (delta^2 (min(m,n)+2)) + 2||f|| / (delta^4 (m+2)(n+2))."""
    alpha_star = min(b.m, b.n)
    return (
        b.modulus
        + 4.0 * b.sup_norm / (b.delta**2 * (alpha_star + 2))
        + 2.0 * b.sup_norm / (b.delta**4 * (b.m + 2) * (b.n + 2))
    )


def minimized_sup_error_bound(sup_norm: float, modulus_fn, m: int, n: int,
                              deltas=None) -> float:
    """Bound minimized over a delta grid (default 0.05, 0.10, ..., 0.50)."""
    if deltas is None:
        deltas = [0.05 * i for i in range(1, 11)]
    return min(
        sup_error_bound(BoundInputs(sup_norm, modulus_fn(d), d, m, n)) for d in deltas
    )


def cancellation_log10(m: int, n: int) -> float:
    """Rough decimal-digit estimate of worst-case cancellation.

    Bounds log10 of the coefficient mass max_a (m+1) C(m,a) 2^(m-a) per
    dimension; the evaluated sum is O(1), so this many digits can cancel.
    """

    def one_dim(mm: int) -> float:
        best = 0.0
        for a in range(mm + 1):
            lg = (
                math.log(mm + 1)
                + log_gamma(mm + 1)
                - log_gamma(a + 1)
                - log_gamma(mm - a + 1)
                + (mm - a) * math.log(2.0)
            )
            best = max(best, lg)
        return best / math.log(10.0)

    return one_dim(m) + one_dim(n)


def _floor_index(order: int, x: float) -> int:
    # [order * x] clamped so x = 1 keeps a valid (single-term) inner sum
    return min(int(math.floor(order * x)), order)


def moment_approximation(table: MomentTable, m: int, n: int,
                         x1: float, x2: float,
                         stability_cap: int = DEFAULT_STABILITY_CAP) -> float:
    """Approximate the density at (x1, x2) from moments up to order m + n.

    Coefficients are exact integers; float tables are summed with exact
    float summation (fsum), exact rational tables in rational arithmetic.
    """
    if m < 1 or n < 1:
        raise ValueError("orders m, n must be positive")
    if m > stability_cap or n > stability_cap:
        raise StabilityError(
            f"orders ({m}, {n}) beyond stability cap {stability_cap}; "
            "raise stability_cap to override"
        )
    if table.max_order < m + n:
        raise OrderError(
            f"need moments to order m+n = {m + n}, table holds {table.max_order}"
        )
    if not (0.0 <= x1 <= 1.0 and 0.0 <= x2 <= 1.0):
        raise ValueError("evaluation point outside the unit square")

    a = _floor_index(m, x1)
    b = _floor_index(n, x2)
    exact = table.is_exact()
    terms = []
    for al in range(m - a + 1):
        c1 = (m + 1) * math.comb(m, a) * math.comb(m - a, al)
        for be in range(n - b + 1):
            c2 = (n + 1) * math.comb(n, b) * math.comb(n - b, be)
            coeff = c1 * c2 if (al + be) % 2 == 0 else -(c1 * c2)
            gamma = table.value(al + a, be + b)
            terms.append(coeff * gamma if exact else float(coeff) * gamma)
    if exact:
        return float(sum(terms))
    return math.fsum(terms)


def reconstruct_grid(table: MomentTable, m: int, n: int, resolution: int,
                     stability_cap: int = DEFAULT_STABILITY_CAP) -> ReconGrid:
    """Moment approximation sampled at pixel centers."""
    if resolution < 1:
        raise ValueError("resolution must be positive")
    if not table.is_exact():
        digits = cancellation_log10(m, n)
        if digits > _CANCELLATION_WARN_DIGITS:
            warnings.warn(
                f"moment approximation at orders ({m}, {n}) cancels ~{digits:.0f} "
                "decimal digits; double-precision moments cannot support this",
                ConditioningWarning,
                stacklevel=2,
            )
    xs = (np.arange(resolution) + 0.5) / resolution
    values = np.empty((resolution, resolution))
    for i, x1 in enumerate(xs):
        for j, x2 in enumerate(xs):
            values[i, j] = moment_approximation(table, m, n, float(x1), float(x2),
                                                stability_cap=stability_cap)
    return ReconGrid(resolution=resolution, values=values, orders=(m, n))


def sup_error(rec: ReconGrid, d: Density) -> float:
    """Max absolute deviation from the density at the pixel centers."""
    xx, yy = rec.pixel_centers()
    truth = np.asarray(d.evaluate(xx, yy), dtype=float)
    return float(np.max(np.abs(rec.values - truth)))


def relative_l2_error(rec: ReconGrid, d: Density) -> float:
    """Relative L2 deviation from the density at the pixel centers."""
    xx, yy = rec.pixel_centers()
    truth = np.asarray(d.evaluate(xx, yy), dtype=float)
    denom = float(np.linalg.norm(truth))
    if denom == 0.0:
        return float(np.linalg.norm(rec.values))
    return float(np.linalg.norm(rec.values - truth)) / denom
