"""Command-line front end: generate point clouds, reconstruct level sets,
extract contours/meshes. Every reconstruction writes a flat key=value
manifest next to its outputs so runs are reproducible."""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import alm, distance, extract, grid, osm, shapes


def _parse_grid(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(t) for t in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid spec {text!r}, want MxN[xP]")
    return dims


def _parse_center(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.split(","))


def _load_config(path) -> dict:
    values = {}
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, val = line.partition("=")
        values[key.strip().replace("-", "_")] = val.strip()
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curverec",
        description="Curvature-regularized implicit reconstruction from "
                    "point clouds")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic point cloud")
    gen.add_argument("--shape", required=True,
                     choices=shapes.KINDS_2D + shapes.KINDS_3D + ("sparse_square",))
    gen.add_argument("--scale", type=float, default=20.0)
    gen.add_argument("--center", type=_parse_center, default=None)
    gen.add_argument("--samples", type=int, default=512)
    gen.add_argument("--noise-sigma", type=float, default=0.0)
    gen.add_argument("--keep", type=float, default=1.0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--grid", type=_parse_grid, default=None)
    gen.add_argument("--out", required=True)

    rec = sub.add_parser("reconstruct", help="reconstruct a level set")
    rec.add_argument("--solver", choices=("osm", "alm"), default="osm")
    rec.add_argument("--s", type=int, choices=(1, 2), default=None)
    rec.add_argument("--eta", type=float, default=None)
    rec.add_argument("--grid", type=_parse_grid, default=None)
    rec.add_argument("--dt", type=float, default=None)
    rec.add_argument("--gamma", type=float, default=None)
    rec.add_argument("--alpha", type=float, default=None)
    rec.add_argument("--r1", type=float, default=None)
    rec.add_argument("--r2", type=float, default=None)
    rec.add_argument("--r3", type=float, default=None)
    rec.add_argument("--beta", type=float, default=None)
    rec.add_argument("--beta2", type=float, default=None)
    rec.add_argument("--epsilon", type=float, default=None)
    rec.add_argument("--max-iters", type=int, default=None)
    rec.add_argument("--tol", type=float, default=None)
    rec.add_argument("--reinit-steps", type=int, default=None)
    rec.add_argument("--seed", type=int, default=0)
    rec.add_argument("--config", default=None,
                     help="key=value file of defaults; flags win")
    rec.add_argument("--in", dest="infile", required=True)
    rec.add_argument("--outdir", required=True)

    ext = sub.add_parser("extract", help="extract the zero level set")
    ext.add_argument("--in", dest="infile", required=True)
    ext.add_argument("--out", required=True)
    ext.add_argument("--reference", default=None,
                     help="point-cloud file; prints the Hausdorff distance")
    return parser


def _cmd_gen(args) -> int:
    if args.shape == "sparse_square":
        cloud = shapes.sparse_square_preset()
        dims = args.grid or shapes.default_dims(2)
    else:
        spec = shapes.ShapeSpec(kind=args.shape, scale=args.scale,
                                center=args.center or (),
                                samples=args.samples, seed=args.seed)
        dims = args.grid or shapes.default_dims(spec.ndim)
        cloud = shapes.generate(spec, dims)
    if args.noise_sigma > 0 or args.keep < 1.0:
        cloud = shapes.perturb(cloud, args.noise_sigma, args.keep,
                               args.seed, dims)
    distance.save_cloud(args.out, cloud)
    print(f"wrote {len(cloud)} points to {args.out}")
    return 0


_OSM_ONLY = ("dt", "gamma", "alpha")
_ALM_ONLY = ("r1", "r2", "r3", "beta", "beta2")


def _gather_config(args, cls, names) -> dict:
    file_vals = _load_config(args.config) if args.config else {}
    values = {}
    for name in names:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
        elif name in file_vals:
            values[name] = type(getattr(cls(), name))(file_vals[name])
    return values


def _cmd_reconstruct(args) -> int:
    cloud = distance.load_cloud(args.infile)
    dims = args.grid or shapes.default_dims(cloud.shape[1])
    conflicts = []
    if args.solver == "alm":
        if len(dims) != 2:
            conflicts.append("ALM supports 2D only")
        if args.s == 2:
            conflicts.append("ALM supports s=1 only")
        for name in _OSM_ONLY:
            if getattr(args, name) is not None:
                conflicts.append(f"--{name} applies to the OSM solver only")
    else:
        for name in _ALM_ONLY:
            if getattr(args, name) is not None:
                conflicts.append(f"--{name} applies to the ALM solver only")
    if conflicts:
        print("error: " + "; ".join(conflicts), file=sys.stderr)
        return 2

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    if args.solver == "osm":
        names = ("s", "eta", "dt", "gamma", "alpha", "epsilon", "max_iters",
                 "tol", "reinit_steps")
        values = _gather_config(args, osm.OsmConfig, names)
        if "dt" not in values and len(dims) == 3:
            values["dt"] = 100.0  # larger stable step for 3D runs
        cfg = osm.OsmConfig(**values)
        report = osm.osm_run(cloud, cfg, dims)
    else:
        names = ("eta", "r1", "r2", "r3", "beta", "beta2", "epsilon",
                 "max_iters", "tol", "reinit_steps")
        values = _gather_config(args, alm.AlmConfig, names)
        cfg = alm.AlmConfig(**values)
        report = alm.alm_run(cloud, cfg, dims)
    duration = time.perf_counter() - start

    report.write_phi(outdir / "phi.txt")
    report.write_energy_csv(outdir / "energy.csv")
    if report.residual_trace is not None:
        report.write_residuals_csv(outdir / "residuals.csv")
    _write_manifest(outdir / "manifest.txt", args, cfg, dims, duration, report)
    print(report.summary_line())
    return 0


def _write_manifest(path, args, cfg, dims, duration, report) -> None:
    lines = [
        "command=" + " ".join(sys.argv),
        f"solver={args.solver}",
        f"grid={'x'.join(str(d) for d in dims)}",
        f"in={args.infile}",
        f"outdir={args.outdir}",
        f"seed={args.seed}",
    ]
    for name, value in sorted(vars(cfg).items()):
        lines.append(f"{name}={value!r}")
    lines.append(f"stop={report.stop}")
    lines.append(f"iters={report.iters}")
    lines.append(f"duration_s={duration:.3f}")
    Path(path).write_text("\n".join(lines) + "\n")


def _cmd_extract(args) -> int:
    phi = grid.read_field(args.infile)
    out = Path(args.out)
    if phi.ndim == 2:
        if out.suffix.lower() == ".obj":
            print("error: 2D field extracts to a contour CSV, not a mesh",
                  file=sys.stderr)
            return 2
        geometry = extract.marching_squares(phi)
        extract.write_contour(out, geometry)
        print(f"wrote {len(geometry)} segments to {out}")
    else:
        if out.suffix.lower() == ".csv":
            print("error: 3D field extracts to an .obj mesh, not a CSV",
                  file=sys.stderr)
            return 2
        verts, faces = extract.marching_cubes(phi)
        extract.write_mesh(out, verts, faces)
        geometry = (verts, faces)
        print(f"wrote {len(verts)} vertices / {len(faces)} triangles to {out}")
    if args.reference:
        reference = distance.load_cloud(args.reference)
        print(f"hausdorff={extract.hausdorff_to_reference(geometry, reference)!r}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command == "reconstruct":
            return _cmd_reconstruct(args)
        return _cmd_extract(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
