"""File formats: sinogram CSV, moment-table CSV, reconstruction CSV/PGM.

All floats are written with 17 significant digits, which round-trips IEEE
doubles exactly.  Writes go through a temp file and an atomic rename.
"""

from __future__ import annotations

import os
import re
import tempfile
from pathlib import Path

import numpy as np

from .density_recon import ReconGrid
from .errors import FormatError
from .numerics import Grid1D
from .phantoms import MomentTable
from .projector import Sinogram


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _atomic_write_text(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


_SINO_HEADER = re.compile(
    r"^# sinogram kind=(\w+) angles=(\d+) offsets=(\d+) "
    r"theta0=(\S+) dtheta=(\S+) p0=(\S+) dp=(\S+)$"
)


def write_sinogram(s: Sinogram, path) -> None:
    lines = [
        f"# sinogram kind={s.kind} angles={s.angle_grid.count} "
        f"offsets={s.offset_grid.count} theta0={_fmt(s.angle_grid.start)} "
        f"dtheta={_fmt(s.angle_grid.spacing)} p0={_fmt(s.offset_grid.start)} "
        f"dp={_fmt(s.offset_grid.spacing)}"
    ]
    for row in s.values:
        lines.append(",".join(_fmt(v) for v in row))
    _atomic_write_text(path, "\n".join(lines) + "\n")


def read_sinogram(path) -> Sinogram:
    with open(path) as fh:
        header = fh.readline().rstrip("\n")
        match = _SINO_HEADER.match(header)
        if not match:
            raise FormatError(f"malformed sinogram header: {header!r}")
        kind, n_s, m_s, theta0, dtheta, p0, dp = match.groups()
        n, m = int(n_s), int(m_s)
        theta0, dtheta, p0, dp = map(float, (theta0, dtheta, p0, dp))
        values = np.empty((n, m))
        for i in range(n):
            line = fh.readline()
            if not line:
                raise FormatError(f"sinogram truncated at row {i}")
            row = np.fromstring(line, sep=",")
            if row.size != m:
                raise FormatError(f"row {i} has {row.size} values, expected {m}")
            values[i] = row
    angle_grid = Grid1D(theta0, theta0 + (n - 1) * dtheta, n)
    offset_grid = Grid1D(p0, p0 + (m - 1) * dp, m)
    try:
        return Sinogram(angle_grid=angle_grid, offset_grid=offset_grid,
                        values=values, kind=kind)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def write_moments(table: MomentTable, path) -> None:
    lines = [f"# moments K={table.max_order}"]
    for (a1, a2) in sorted(table.values, key=lambda ab: (ab[0] + ab[1], ab[0])):
        lines.append(f"{a1},{a2},{_fmt(table.values[(a1, a2)])}")
    _atomic_write_text(path, "\n".join(lines) + "\n")


def read_moments(path) -> MomentTable:
    with open(path) as fh:
        header = fh.readline().rstrip("\n")
        match = re.match(r"^# moments K=(\d+)$", header)
        if not match:
            raise FormatError(f"malformed moment header: {header!r}")
        K = int(match.group(1))
        values = {}
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise FormatError(f"malformed moment row: {line!r}")
            values[(int(parts[0]), int(parts[1]))] = float(parts[2])
    try:
        return MomentTable(max_order=K, values=values)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def write_recon_csv(rec: ReconGrid, path) -> None:
    header = f"# recon N={rec.resolution}"
    if rec.orders is not None:
        header += f" m={rec.orders[0]} n={rec.orders[1]}"
    lines = [header]
    for row in rec.values:
        lines.append(",".join(_fmt(v) for v in row))
    _atomic_write_text(path, "\n".join(lines) + "\n")


def read_recon_csv(path) -> ReconGrid:
    with open(path) as fh:
        header = fh.readline().rstrip("\n")
        match = re.match(r"^# recon N=(\d+)(?: m=(\d+) n=(\d+))?$", header)
        if not match:
            raise FormatError(f"malformed recon header: {header!r}")
        n = int(match.group(1))
        orders = None
        if match.group(2) is not None:
            orders = (int(match.group(2)), int(match.group(3)))
        values = np.empty((n, n))
        for i in range(n):
            line = fh.readline()
            if not line:
                raise FormatError(f"recon grid truncated at row {i}")
            row = np.fromstring(line, sep=",")
            if row.size != n:
                raise FormatError(f"row {i} has {row.size} values, expected {n}")
            values[i] = row
    return ReconGrid(resolution=n, values=values, orders=orders)


def write_pgm(values: np.ndarray, path) -> None:
    """P2 (ASCII) grayscale export, affine-scaled to 0..255.

    The scale and offset are recorded as comment lines so the physical
    values can be recovered: value = offset + scale * pixel.  Rows are
    written with the second coordinate increasing downwards.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 2:
        raise ValueError("PGM export needs a 2-D array")
    vmin = float(v.min())
    vmax = float(v.max())
    span = vmax - vmin
    scale = span / 255.0 if span > 0 else 1.0
    pixels = np.zeros_like(v, dtype=int) if span == 0 else \
        np.clip(np.rint((v - vmin) / scale), 0, 255).astype(int)
    img = pixels.T[::-1, :]  # x2 axis points up in data, down in the image
    lines = [
        "P2",
        f"# offset={_fmt(vmin)} scale={_fmt(scale)}",
        f"{img.shape[1]} {img.shape[0]}",
        "255",
    ]
    for row in img:
        lines.append(" ".join(str(p) for p in row))
    _atomic_write_text(path, "\n".join(lines) + "\n")
