"""Recovery of bivariate power moments from sinogram rows.

The k-th offset moment of a row is a degree-k homogeneous polynomial in
(cos theta, sin theta) whose coefficients are the order-k moments of the
density, binomially weighted.  Rows smoothed by a symmetric kernel couple
to the raw offset moments through a triangular relation in the kernel's
signed moment sequence; inverting that relation is exact algebra.  The
order-k coefficient system is a cot-node Vandermonde matrix scaled by
sin^k theta rows and binomial columns and is solved in assembled form.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConditioningWarning,
    DataQualityError,
    MisuseError,
    OrderError,
    SingularSystemError,
)
from .mollifiers import MollifierSpec
from .numerics import DEFAULT_MAX_ORDER, CotangentVandermonde, solve_vandermonde_system
from .phantoms import SQRT2, MomentTable
from .projector import Sinogram

#: Extra half-width (beyond the kernel width) of the moment integration
#: window, in grid cells.
_WINDOW_GUARD_CELLS = 2


@dataclass(frozen=True)
class AngularMomentSet:
    """Offset moments b[i, k] of sinogram rows at the recorded angles."""

    angles: np.ndarray
    max_order: int
    values: np.ndarray  # shape (len(angles), max_order + 1)
    provenance: str  # "raw" | "mollified"

    def __post_init__(self) -> None:
        if self.provenance not in ("raw", "mollified"):
            raise ValueError(f"bad provenance {self.provenance!r}")
        if self.values.shape != (self.angles.size, self.max_order + 1):
            raise ValueError("values shape does not match angles/max_order")


@dataclass(frozen=True)
class MomentSystem:
    """Assembled order-k coefficient system A x = b."""

    order: int
    angles: np.ndarray
    matrix: np.ndarray
    rhs: np.ndarray


def assemble_moment_matrix(angles, k: int) -> np.ndarray:
    """A[i, j] = C(k, j) cos^j(theta_i) sin^(k-j)(theta_i)."""
    th = np.asarray(angles, dtype=float)
    j = np.arange(k + 1)
    comb = np.array([math.comb(k, jj) for jj in j], dtype=float)
    return comb[None, :] * np.cos(th)[:, None] ** j[None, :] \
        * np.sin(th)[:, None] ** (k - j)[None, :]


def vandermonde_det_formula(angles, k: int) -> float:
    """Determinant of the assembled order-k matrix via the factored form:
    prod_j C(k,j) * prod_i sin^k(theta_i) * prod_{i<j} (cot t_j - cot t_i).

    The node-difference product alternates in sign (cot decreases on
    (0, pi)), so the determinant is nonzero but not sign-definite.
    """
    th = np.asarray(angles, dtype=float)
    t = 1.0 / np.tan(th)
    det = 1.0
    for j in range(k + 1):
        det *= math.comb(k, j)
    det *= float(np.prod(np.sin(th) ** k))
    for i in range(th.size):
        for j in range(i + 1, th.size):
            det *= t[j] - t[i]
    return det


def auto_angles(K: int, grid_angles: np.ndarray | None = None) -> np.ndarray:
    """Default solve angles pi (i+1)/(K+2), optionally snapped to a grid."""
    targets = np.array([math.pi * (i + 1) / (K + 2) for i in range(K + 1)])
    if grid_angles is None:
        return targets
    idx = np.array([int(np.argmin(np.abs(grid_angles - t))) for t in targets])
    if np.unique(idx).size != idx.size:
        raise ValueError("angle grid too coarse to host K+1 distinct solve angles")
    return grid_angles[idx]


def angular_moments(s: Sinogram, K: int, angles, *, support_pad: float = 0.0,
                    window: str = "support") -> AngularMomentSet:
    """Trapezoid offset moments of the rows nearest the requested angles.

    Each requested angle is snapped to the nearest sampled angle (always
    within half a grid cell); the returned set records the snapped values.
    With window="support" the integration runs over the offset range
    [-1 - pad, sqrt2 + pad] plus a two-cell guard, which contains the
    (possibly kernel-widened) support of any admissible density; cells
    beyond it carry no signal, only noise.  window="full" integrates the
    whole grid.
    """
    if K < 0:
        raise OrderError("moment order must be nonnegative")
    req = np.asarray(angles, dtype=float)
    if np.any(req <= 0.0) or np.any(req >= math.pi):
        raise ValueError("requested angles must lie strictly inside (0, pi)")
    grid = s.angle_grid.points()
    idx = np.array([int(np.argmin(np.abs(grid - a))) for a in req])
    if np.unique(idx).size != idx.size:
        raise ValueError("requested angles collapse onto duplicate sinogram rows")
    snapped = grid[idx]

    ps = s.offset_grid.points()
    h = s.offset_grid.spacing
    if window == "support":
        pad = support_pad + _WINDOW_GUARD_CELLS * h
        mask = (ps >= -1.0 - pad) & (ps <= SQRT2 + pad)
    elif window == "full":
        mask = np.ones_like(ps, dtype=bool)
    else:
        raise ValueError(f"window must be 'support' or 'full', got {window!r}")
    pw = ps[mask]
    rows = s.values[idx][:, mask]

    powers = pw[None, :] ** np.arange(K + 1)[:, None]  # (K+1, n_window)
    weighted = rows[:, None, :] * powers[None, :, :]
    values = h * (weighted.sum(axis=2) - 0.5 * (weighted[:, :, 0] + weighted[:, :, -1]))
    provenance = "mollified" if s.kind == "mollified" else "raw"
    return AngularMomentSet(angles=snapped, max_order=K, values=values,
                            provenance=provenance)


def _check_kernel_moments(m: MollifierSpec, K: int) -> None:
    if m.max_order < K:
        raise OrderError(
            f"kernel moment sequence only reaches order {m.max_order}, need {K}"
        )
    if abs(m.moments[0] - 1.0) > 1e-8:
        raise ValueError("kernel moment c_0 must equal 1 (unit mass)")


def convolve_moments(ams: AngularMomentSet, m: MollifierSpec) -> AngularMomentSet:
    """Forward triangular relation: bhat[k] = sum_j C(k,j) c_j b[k-j]."""
    if ams.provenance != "raw":
        raise MisuseError("forward relation expects raw-provenance moments")
    _check_kernel_moments(m, ams.max_order)
    b = ams.values
    bhat = np.empty_like(b)
    for k in range(ams.max_order + 1):
        bhat[:, k] = sum(
            math.comb(k, j) * m.moments[j] * b[:, k - j] for j in range(k + 1)
        )
    return AngularMomentSet(ams.angles, ams.max_order, bhat, "mollified")


def deconvolve_moments(hat: AngularMomentSet, m: MollifierSpec) -> AngularMomentSet:
    """Exact inverse of the forward relation, by forward recursion in k."""
    if hat.provenance != "mollified":
        raise MisuseError("deconvolution expects mollified-provenance moments")
    _check_kernel_moments(m, hat.max_order)
    bhat = hat.values
    b = np.empty_like(bhat)
    for k in range(hat.max_order + 1):
        acc = bhat[:, k].copy()
        for j in range(1, k + 1):
            acc -= math.comb(k, j) * m.moments[j] * b[:, k - j]
        b[:, k] = acc / m.moments[0]
    return AngularMomentSet(hat.angles, hat.max_order, b, "raw")


def _solve_indices(n_angles: int, k: int) -> np.ndarray:
    if k == 0:
        return np.array([n_angles // 2])
    idx = np.unique(np.round(np.linspace(0, n_angles - 1, k + 1)).astype(int))
    if idx.size != k + 1:
        raise SingularSystemError(
            f"need {k + 1} distinct angles for order {k}, have {n_angles}"
        )
    return idx


def solve_moment_system(ams: AngularMomentSet, k: int,
                        max_order: int = DEFAULT_MAX_ORDER) -> np.ndarray:
    """Recover (gamma_{0,k}, gamma_{1,k-1}, ..., gamma_{k,0}).

    Uses an evenly spread subset of k+1 recorded angles (the middle angle
    alone for k = 0).  Solves with row scales sin^k(theta) and binomial
    column scales; warns when the condition estimate exceeds 1e12.
    """
    if ams.provenance != "raw":
        raise MisuseError("moment systems require raw-provenance angular moments")
    if k > ams.max_order:
        raise OrderError(f"order {k} beyond the measured maximum {ams.max_order}")
    idx = _solve_indices(ams.angles.size, k)
    th = ams.angles[idx]
    V = CotangentVandermonde.from_angles(th)
    row_scales = np.sin(th) ** k
    col_scales = np.array([math.comb(k, j) for j in range(k + 1)], dtype=float)
    rhs = ams.values[idx, k]
    x = solve_vandermonde_system(V, rhs, row_scales, col_scales, max_order=max_order)
    A = assemble_moment_matrix(th, k)
    cond = float(np.linalg.cond(A, 1))
    if cond > 1e12:
        warnings.warn(
            f"order-{k} moment system condition estimate {cond:.2e}",
            ConditioningWarning,
            stacklevel=2,
        )
    return x


def build_moment_system(ams: AngularMomentSet, k: int) -> MomentSystem:
    """Assembled system for inspection/diagnostics."""
    idx = _solve_indices(ams.angles.size, k)
    th = ams.angles[idx]
    return MomentSystem(order=k, angles=th, matrix=assemble_moment_matrix(th, k),
                        rhs=ams.values[idx, k])


def recover_moment_table(s: Sinogram, m: MollifierSpec | None, K: int,
                         angles=None, *, max_order: int | None = None,
                         window: str = "support",
                         diagnostics: dict | None = None) -> MomentTable:
    """Full pipeline: offset moments -> (deconvolution) -> per-order solves.

    `angles` defaults to pi (i+1)/(K+2) snapped to the sinogram grid.
    Mollified sinograms require the kernel that produced them; raw and
    noisy sinograms must not pass one.  When a `diagnostics` dict is given
    it receives the solve angles and per-order condition estimates.
    """
    cap = max_order if max_order is not None else DEFAULT_MAX_ORDER
    if K > cap:
        raise OrderError(
            f"K={K} exceeds the configured maximum order {cap}; "
            "pass max_order to override"
        )
    if s.kind == "mollified" and m is None:
        raise MisuseError("mollified sinogram needs its mollifier for deconvolution")
    if s.kind != "mollified" and m is not None:
        raise MisuseError(f"kind={s.kind!r} sinogram must not carry a mollifier")

    grid = s.angle_grid.points()
    if angles is None:
        th = auto_angles(K, grid)
    else:
        th = np.asarray(angles, dtype=float)
        if th.size != K + 1:
            raise ValueError(f"need exactly K+1 = {K + 1} angles, got {th.size}")
        if np.any(np.diff(th) <= 0):
            raise ValueError("angles must be strictly increasing")

    pad = m.epsilon if m is not None else 0.0
    ams = angular_moments(s, K, th, support_pad=pad, window=window)
    if s.kind == "mollified":
        ams = deconvolve_moments(ams, m)

    b0 = ams.values[:, 0]
    scale = float(np.median(np.abs(b0)))
    if float(np.max(np.abs(b0 - np.median(b0)))) > max(1e-3, 0.05 * scale):
        raise DataQualityError(
            "order-0 row moments disagree across angles beyond tolerance; "
            "offset coverage or data quality is suspect"
        )

    values: dict = {}
    conditions = []
    for k in range(K + 1):
        x = solve_moment_system(ams, k, max_order=cap)
        for j in range(k + 1):
            values[(j, k - j)] = float(x[j])
        if diagnostics is not None:
            sys_k = build_moment_system(ams, k)
            conditions.append((k, float(np.linalg.cond(sys_k.matrix, 1))))
    if diagnostics is not None:
        diagnostics["angles"] = th
        diagnostics["conditions"] = conditions
    return MomentTable(max_order=K, values=values)


def synthesize_angular_moments(table: MomentTable, angles, K: int) -> np.ndarray:
    """Re-synthesize b[i, k] from a moment table (range-test direction)."""
    if K > table.max_order:
        raise OrderError(f"table only reaches order {table.max_order}")
    th = np.asarray(angles, dtype=float)
    out = np.zeros((th.size, K + 1))
    for k in range(K + 1):
        for j in range(k + 1):
            out[:, k] += (
                math.comb(k, j)
                * np.cos(th) ** j
                * np.sin(th) ** (k - j)
                * float(table.value(j, k - j))
            )
    return out
