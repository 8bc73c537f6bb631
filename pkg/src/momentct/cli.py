"""Command-line front end.

Subcommands mirror the reconstruction procedure: `project` simulates the
measured data, `moments` recovers the moment table, `reconstruct` produces
density images (from moments and/or by filtered backprojection), `pipeline`
runs all three in one process, and `selftest` executes the acceptance
suite.

Exit codes: 0 success, 2 invalid configuration/input, 3 coverage error,
4 singular system, 5 insufficient moment order or stability cap.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import fileio
from .config import RunConfig, load_config
from .density_recon import (
    minimized_sup_error_bound,
    reconstruct_grid,
    relative_l2_error,
    sup_error,
)
from .errors import (
    CapabilityError,
    ConfigError,
    CoverageError,
    DataQualityError,
    FormatError,
    MisuseError,
    OrderError,
    SingularSystemError,
    StabilityError,
)
from .moment_recovery import recover_moment_table
from .projector import add_noise, angle_coverage, evenness_residual, l1_norm, mollify, project
from .spectral import fbp_reconstruct


def _load(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if getattr(args, "outdir", None):
        cfg = replace(cfg, output=replace(cfg.output, directory=args.outdir))
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, noise=replace(cfg.noise, seed=args.seed))
    if getattr(args, "sigma", None) is not None:
        cfg = replace(cfg, noise=replace(cfg.noise, sigma=args.sigma))
    if getattr(args, "angles", None) is not None:
        th = tuple(float(t) for t in args.angles.split(","))
        cfg = replace(cfg, moments=replace(cfg.moments, angles=th, K=len(th) - 1))
    if getattr(args, "angles_auto", None) is not None:
        cfg = replace(cfg, moments=replace(cfg.moments, angles=None, K=args.angles_auto))
    if getattr(args, "filter", None) is not None:
        cfg = replace(cfg, filter=replace(cfg.filter, kind=args.filter))
    if getattr(args, "cutoff", None) is not None:
        cfg = replace(cfg, filter=replace(cfg.filter, cutoff=args.cutoff))
    if getattr(args, "reg_floor", None) is not None:
        cfg = replace(cfg, filter=replace(cfg.filter, reg_floor=args.reg_floor))
    cfg.validate()
    return cfg


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_project(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    density = cfg.make_density()
    angles = cfg.make_angle_grid()
    offsets = cfg.make_offset_grid()
    line_step = cfg.grids.line_step_factor * offsets.spacing
    sino = project(density, angles, offsets, line_step=line_step)
    if cfg.noise.sigma > 0:
        sino = add_noise(sino, cfg.noise.sigma, cfg.noise.seed)
    kernel = cfg.make_mollifier()
    if kernel is not None:
        sino = mollify(sino, kernel)
    path = out / "sinogram.csv"
    fileio.write_sinogram(sino, path)
    fileio.write_pgm(sino.values, out / "sinogram.pgm")
    n = cfg.recon.resolution
    xs = (np.arange(n) + 0.5) / n
    xx, yy = np.meshgrid(xs, xs, indexing="ij")
    fileio.write_pgm(np.asarray(density.evaluate(xx, yy), dtype=float),
                     out / "phantom.pgm")
    mass = density.mass
    print(f"sinogram: {path} kind={sino.kind} "
          f"({angles.count} angles x {offsets.count} offsets)")
    print(f"l1 norm: {l1_norm(sino):.6f} (2*pi*mass = {2 * math.pi * mass:.6f})")
    if angle_coverage(sino.angle_grid) == "full" and sino.angle_grid.count % 2 == 0:
        print(f"evenness residual: {evenness_residual(sino):.3e}")
    else:
        print("evenness residual: n/a (needs a full-turn angle grid)")
    return 0


def cmd_moments(cfg: RunConfig, sino_path: Path) -> int:
    out = _outdir(cfg)
    sino = fileio.read_sinogram(sino_path)
    kernel = cfg.make_mollifier() if sino.kind == "mollified" else None
    diagnostics: dict = {}
    table = recover_moment_table(
        sino, kernel, cfg.moments.K,
        angles=cfg.moments.angles,
        max_order=cfg.moments.max_order,
        window=cfg.moments.window,
        diagnostics=diagnostics,
    )
    path = out / "moments.csv"
    fileio.write_moments(table, path)
    print(f"moments: {path} K={table.max_order}")
    for k, cond in diagnostics["conditions"]:
        print(f"order {k}: condition estimate {cond:.3e}")
    return 0


def cmd_reconstruct(cfg: RunConfig, input_path: Path) -> int:
    out = _outdir(cfg)
    with open(input_path) as fh:
        head = fh.readline()
    density = cfg.make_density()
    if head.startswith("# moments"):
        table = fileio.read_moments(input_path)
        rec = reconstruct_grid(table, cfg.recon.m, cfg.recon.n, cfg.recon.resolution)
        fileio.write_recon_csv(rec, out / "recon_moments.csv")
        fileio.write_pgm(rec.values, out / "recon_moments.pgm")
        err = sup_error(rec, density)
        print(f"moment reconstruction: {out / 'recon_moments.csv'} "
              f"orders=({cfg.recon.m},{cfg.recon.n}) N={cfg.recon.resolution}")
        print(f"sup error vs phantom: {err:.6f}")
        try:
            bound = minimized_sup_error_bound(
                density.sup_norm, density.modulus_bound, cfg.recon.m, cfg.recon.n
            )
            print(f"sup error bound (minimized over delta): {bound:.6f}")
        except CapabilityError:
            print("sup error bound: n/a (phantom not uniformly continuous)")
    elif head.startswith("# sinogram"):
        sino = fileio.read_sinogram(input_path)
        fspec = cfg.make_filter(sino.kind)
        kernel = cfg.make_mollifier() if fspec.kind == "modified_riesz" else None
        rec = fbp_reconstruct(sino, fspec, kernel, cfg.recon.resolution)
        fileio.write_recon_csv(rec, out / "recon_fbp.csv")
        fileio.write_pgm(rec.values, out / "recon_fbp.pgm")
        print(f"fbp reconstruction: {out / 'recon_fbp.csv'} "
              f"filter={fspec.kind} N={cfg.recon.resolution}")
        print(f"relative l2 error vs phantom: {relative_l2_error(rec, density):.6f}")
    else:
        raise FormatError(f"unrecognized input header: {head.strip()!r}")
    return 0


def cmd_pipeline(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    print("== project ==")
    code = cmd_project(cfg)
    if code:
        return code
    print("== moments ==")
    code = cmd_moments(cfg, out / "sinogram.csv")
    if code:
        return code
    print("== reconstruct ==")
    if cfg.recon.method in ("moments", "both"):
        code = cmd_reconstruct(cfg, out / "moments.csv")
        if code:
            return code
    if cfg.recon.method in ("fbp", "both"):
        code = cmd_reconstruct(cfg, out / "sinogram.csv")
        if code:
            return code
    return 0


def cmd_selftest() -> int:
    try:
        import pytest
    except ImportError:
        print("selftest requires pytest", file=sys.stderr)
        return 1
    for base in (Path.cwd(), *Path(__file__).resolve().parents):
        candidate = base / "tests" / "test_acceptance.py"
        if candidate.exists():
            return pytest.main([str(candidate), "-v"])
    print("acceptance suite not found (tests/test_acceptance.py)", file=sys.stderr)
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="momentct",
        description="Moment-based density reconstruction from line-integral data",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("-c", "--config", help="INI run configuration")
        p.add_argument("-o", "--outdir", help="output directory override")

    p_proj = sub.add_parser("project", help="simulate sinogram data")
    common(p_proj)
    p_proj.add_argument("--sigma", type=float, help="noise level override")
    p_proj.add_argument("--seed", type=int, help="noise seed override")

    p_mom = sub.add_parser("moments", help="recover the moment table")
    common(p_mom)
    p_mom.add_argument("sinogram", nargs="?", help="sinogram CSV (default <outdir>/sinogram.csv)")
    p_mom.add_argument("--angles", help="comma-separated solve angles in radians")
    p_mom.add_argument("--angles-auto", type=int, metavar="K",
                       help="auto-place K+1 solve angles")

    p_rec = sub.add_parser("reconstruct", help="reconstruct the density")
    common(p_rec)
    p_rec.add_argument("input", nargs="?", help="moment or sinogram CSV")
    p_rec.add_argument("--filter", choices=("auto", "riesz", "modified_riesz"))
    p_rec.add_argument("--cutoff", type=float, help="filter band cutoff")
    p_rec.add_argument("--reg-floor", dest="reg_floor", type=float,
                       help="kernel-transform regularization floor")

    p_pipe = sub.add_parser("pipeline", help="project + moments + reconstruct")
    common(p_pipe)
    p_pipe.add_argument("--sigma", type=float)
    p_pipe.add_argument("--seed", type=int)

    sub.add_parser("selftest", help="run the acceptance suite")
    return parser


_EXIT_CODES = (
    (CoverageError, 3),
    (SingularSystemError, 4),
    ((OrderError, StabilityError), 5),
    ((ConfigError, FormatError, MisuseError, DataQualityError, CapabilityError, ValueError), 2),
)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "selftest":
        return cmd_selftest()
    try:
        cfg = _load(args)
        if args.command == "project":
            return cmd_project(cfg)
        if args.command == "moments":
            path = Path(args.sinogram) if args.sinogram else \
                Path(cfg.output.directory) / "sinogram.csv"
            return cmd_moments(cfg, path)
        if args.command == "reconstruct":
            path = Path(args.input) if args.input else \
                Path(cfg.output.directory) / "moments.csv"
            return cmd_reconstruct(cfg, path)
        if args.command == "pipeline":
            return cmd_pipeline(cfg)
        raise AssertionError(f"unhandled command {args.command}")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # mapped diagnostics, no tracebacks for users
        for types, code in _EXIT_CODES:
            if isinstance(exc, types):
                print(f"error: {exc}", file=sys.stderr)
                return code
        raise


if __name__ == "__main__":
    sys.exit(main())
