"""Forward simulation: sample line integrals of a density on an
angle x offset grid, smooth rows with a mollifier, and inject seeded noise.

Rows are indexed by angle; row i holds the transform at angle_grid point i
sampled over the offset grid.  All operations are pure; noise derives one
independent RNG stream per row from (seed, row), so results do not depend
on evaluation order or thread count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import CoverageError, MisuseError
from .mollifiers import MollifierSpec, sampled_kernel
from .numerics import Grid1D
from .phantoms import SQRT2, Density

KINDS = ("raw", "mollified", "noisy", "filtered")


@dataclass(frozen=True)
class Sinogram:
    angle_grid: Grid1D
    offset_grid: Grid1D
    values: np.ndarray
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        v = np.asarray(self.values, dtype=float)
        expected = (self.angle_grid.count, self.offset_grid.count)
        if v.shape != expected:
            raise ValueError(f"values shape {v.shape} does not match grids {expected}")
        object.__setattr__(self, "values", v)


def moment_angle_grid(count: int) -> Grid1D:
    """count angles strictly inside (0, pi): theta_i = pi (i+1)/(count+1)."""
    step = math.pi / (count + 1)
    return Grid1D(step, count * step, count)


def half_circle_grid(count: int) -> Grid1D:
    """count angles covering [0, pi): theta_i = pi i / count."""
    return Grid1D(0.0, math.pi * (count - 1) / count, count)


def full_circle_grid(count: int) -> Grid1D:
    """count angles covering [0, 2 pi): theta_i = 2 pi i / count."""
    return Grid1D(0.0, 2.0 * math.pi * (count - 1) / count, count)


def offset_grid(count: int, margin: float = 1.1) -> Grid1D:
    """Symmetric offset grid over [-sqrt(2) margin, sqrt(2) margin]."""
    if margin < 1.0:
        raise CoverageError(f"offset margin must be >= 1, got {margin}")
    return Grid1D(-margin * SQRT2, margin * SQRT2, count)


def angle_coverage(grid: Grid1D) -> str:
    """Classify an angle grid as covering a 'full' turn, a 'half' turn,
    or being 'partial'.

    A deficit of up to one spacing is tolerated so that open-interval
    grids (which exclude both endpoints, like the (0, pi) moment grids)
    classify by the turn they tile.
    """
    span = grid.stop - grid.start + grid.spacing
    tol = grid.spacing * (1 + 1e-9)
    if abs(span - 2.0 * math.pi) <= tol:
        return "full"
    if abs(span - math.pi) <= tol:
        return "half"
    return "partial"


def project(d: Density, angles: Grid1D, offsets: Grid1D,
            line_step: float | None = None) -> Sinogram:
    """Sample the line-integral transform of a density.

    Each sample is the composite-trapezoid integral of the density along
    the clipped line segment, arc-length parameterized with step at most
    `line_step` (default: a quarter of the offset spacing).
    """
    if offsets.start > -SQRT2 + 1e-12 or offsets.stop < SQRT2 - 1e-12:
        raise CoverageError(
            f"offsets [{offsets.start:.4g}, {offsets.stop:.4g}] do not cover "
            f"[-sqrt2, sqrt2]; moments would be truncated"
        )
    dp = offsets.spacing
    if line_step is None:
        line_step = 0.25 * dp
    if line_step > dp * (1 + 1e-12):
        raise ValueError(f"line_step {line_step:.4g} exceeds offset spacing {dp:.4g}")

    ps = offsets.points()
    values = np.zeros((angles.count, offsets.count))
    th = angles.points()
    symmetric = abs(offsets.start + offsets.stop) < 1e-12
    if angle_coverage(angles) == "full" and angles.count % 2 == 0 and symmetric:
        # a full turn samples every line twice ((theta, p) and (theta+pi, -p));
        # compute the first half and extend by that identity, which keeps the
        # two representations of each line bitwise equal
        half = angles.count // 2
        for i in range(half):
            values[i] = _project_row(d, th[i], ps, line_step)
        values[half:] = values[:half, ::-1]
    else:
        for i in range(angles.count):
            values[i] = _project_row(d, th[i], ps, line_step)
    return Sinogram(angle_grid=angles, offset_grid=offsets, values=values, kind="raw")


def _project_row(d: Density, theta: float, ps: np.ndarray, line_step: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    lo = np.full(ps.shape, -np.inf)
    hi = np.full(ps.shape, np.inf)
    feasible = np.ones(ps.shape, dtype=bool)
    # clip x(u) = p*w + u*w_perp against 0 <= x1, x2 <= 1
    for slope, intercept in ((-s, ps * c), (c, ps * s)):
        if abs(slope) < 1e-15:
            feasible &= (intercept >= -1e-12) & (intercept <= 1.0 + 1e-12)
        else:
            u0 = (0.0 - intercept) / slope
            u1 = (1.0 - intercept) / slope
            lo = np.maximum(lo, np.minimum(u0, u1))
            hi = np.minimum(hi, np.maximum(u0, u1))
    length = np.where(feasible, hi - lo, 0.0)
    length = np.maximum(length, 0.0)
    hit = length > 0.0
    if not np.any(hit):
        return np.zeros_like(ps)

    nsteps = max(2, int(math.ceil(float(length.max()) / line_step)) + 1)
    frac = np.linspace(0.0, 1.0, nsteps)
    u = lo[hit, None] + length[hit, None] * frac[None, :]
    x1 = ps[hit, None] * c - u * s
    x2 = ps[hit, None] * s + u * c
    f = np.asarray(d.evaluate(x1, x2), dtype=float)
    h = length[hit] / (nsteps - 1)
    integral = h * (f.sum(axis=1) - 0.5 * (f[:, 0] + f[:, -1]))
    row = np.zeros_like(ps)
    row[hit] = integral
    return row


def mollify(s: Sinogram, m: MollifierSpec) -> Sinogram:
    """Convolve each row with the sampled kernel over the offset grid.

    The sampled kernel is renormalized to exact unit discrete mass, so the
    per-row integral (hence every k = 0 moment) is preserved up to the
    zero-padding at the grid boundary.
    """
    if s.kind not in ("raw", "noisy"):
        raise MisuseError(f"can only mollify raw or noisy sinograms, got {s.kind!r}")
    dp = s.offset_grid.spacing
    _, weights = sampled_kernel(m, dp)
    kernel = weights * dp
    if kernel.size > s.offset_grid.count:
        raise ValueError("kernel wider than the offset grid")
    out = np.empty_like(s.values)
    for i in range(s.values.shape[0]):
        out[i] = np.convolve(s.values[i], kernel, mode="same")
    return replace(s, values=out, kind="mollified")


def add_noise(s: Sinogram, sigma: float, seed: int) -> Sinogram:
    """Add i.i.d. zero-mean Gaussian noise, one seeded stream per row."""
    if sigma < 0:
        raise ValueError(f"noise level must be nonnegative, got {sigma}")
    if sigma == 0.0:
        return replace(s, values=s.values.copy(), kind="noisy")
    out = np.empty_like(s.values)
    for i in range(s.values.shape[0]):
        rng = np.random.default_rng((int(seed), i))
        out[i] = s.values[i] + rng.normal(0.0, sigma, s.values.shape[1])
    return replace(s, values=out, kind="noisy")


def l1_norm(s: Sinogram) -> float:
    """Double integral of |values| over offset and angle.

    Offsets use the trapezoid rule.  Angle grids covering a full turn are
    integrated with the periodic closure (rectangle rule), otherwise with
    the trapezoid rule over the sampled span.
    """
    dp = s.offset_grid.spacing
    row_ints = np.trapezoid(np.abs(s.values), dx=dp, axis=1)
    dth = s.angle_grid.spacing
    if angle_coverage(s.angle_grid) == "full":
        return float(dth * row_ints.sum())
    return float(np.trapezoid(row_ints, dx=dth))


def evenness_residual(s: Sinogram) -> float:
    """max |v(theta, p) - v(theta + pi, -p)| over the sampled grid.

    Requires a full-turn angle grid with an even count and a symmetric
    offset grid, so that both the opposite angle and the negated offset
    land exactly on grid points.
    """
    n = s.angle_grid.count
    if angle_coverage(s.angle_grid) != "full" or n % 2:
        raise ValueError("evenness needs a full-circle angle grid with even count")
    if abs(s.offset_grid.start + s.offset_grid.stop) > 1e-12:
        raise ValueError("evenness needs a symmetric offset grid")
    shifted = np.roll(s.values, -n // 2, axis=0)[:, ::-1]
    return float(np.max(np.abs(s.values - shifted)))
