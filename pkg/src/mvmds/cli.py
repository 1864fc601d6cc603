"""Command-line front end.

Subcommands: ``embed`` (distance CSV to manifold embedding), ``srgw``
(transport solve between two matrices), ``gh`` (brute-force
Gromov-Hausdorff values), ``synth`` (synthetic distance matrices),
``redistrict`` (plans CSV to circle embedding and arc summaries), and
``plot`` (re-render an embedding CSV as SVG).

Every run is deterministic given its full argument list (seeds included):
numeric console output uses 6 significant digits, files carry full
precision.  Exit codes: 0 ok, 2 input error, 3 capacity guard exceeded,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import fileio
from .datasets import rotated_pattern, sample_manifold
from .embed import EmbeddingProblem, OptimizerConfig, srgw_gd
from .errors import CapacityError, DivergenceError, ParseError
from .gromov import mgh, srgh
from .manifolds import Circle, Euclidean, Sphere, manifold_spec, parse_manifold
from .mmspace import MetricMeasureSpace
from .redistrict import arc_summaries, ensemble_distances
from .srgw import SolverConfig, solve_srgw2

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CAPACITY = 3
EXIT_NUMERIC = 4


def _resolve_threads(value: int | None) -> int:
    if value is None:
        value = int(os.environ.get("MVMDS_THREADS", "1"))
    if value < 1:
        raise ValueError("--threads must be at least 1")
    return value


def _load_space(path, weights_path=None) -> MetricMeasureSpace:
    D, labels = fileio.read_distance_csv(path)
    weights = fileio.read_weights_file(weights_path) if weights_path else None
    return MetricMeasureSpace(D, weights=weights, labels=labels)


def _point_ids(space: MetricMeasureSpace) -> list[str]:
    if space.labels is not None:
        return list(space.labels)
    return [str(i) for i in range(space.n_points)]


def _emit_embedding_files(prefix, ids, result, manifold, meta):
    coords = result.points if result.points.ndim == 2 else result.points[:, None]
    fileio.write_embedding_csv(f"{prefix}.csv", ids, coords, result.scale,
                               circular=result.circular_coords)
    fileio.write_json(f"{prefix}.meta.json", meta)
    if isinstance(manifold, Circle):
        with open(f"{prefix}.svg", "w", encoding="utf-8", newline="") as fh:
            fh.write(fileio.svg_circle_scatter(result.circular_coords))
        fileio.write_histogram_csv(f"{prefix}.hist.csv", result.circular_coords)


def _embedding_meta(args, manifold, result, solve) -> dict:
    return {
        "command": args.command,
        "manifold": manifold_spec(manifold),
        "seed": args.seed,
        "config": {
            "grid_count": args.grid,
            "jitter": args.jitter,
            "learning_rate": args.lr,
            "max_steps": args.max_steps,
            "rel_threshold": args.rel_threshold,
            "learn_scale": bool(getattr(args, "learn_scale", True)),
        },
        "stress": float(result.stress),
        "dis2": float(result.dis2),
        "scale": float(result.scale),
        "stress_trace": [float(v) for v in result.trace],
        "srgw": {
            "distortion": float(solve.distortion),
            "objective_trace": [float(v) for v in solve.objective_trace],
            "monge_map": list(solve.monge_map) if solve.monge_map is not None else None,
        },
    }


def cmd_embed(args) -> int:
    _resolve_threads(args.threads)
    space = _load_space(args.input, args.weights)
    manifold = parse_manifold(args.manifold)
    problem = EmbeddingProblem(space, manifold, learn_scale=args.learn_scale,
                               grid_count=args.grid, jitter=args.jitter, seed=args.seed)
    cfg = OptimizerConfig(learning_rate=args.lr, max_steps=args.max_steps,
                          rel_threshold=args.rel_threshold)
    result, solve = srgw_gd(problem, cfg)
    meta = _embedding_meta(args, manifold, result, solve)
    _emit_embedding_files(args.out, _point_ids(space), result, manifold, meta)
    print(f"stress = {result.stress:.6g}")
    print(f"dis2 = {result.dis2:.6g}")
    print(f"scale = {result.scale:.6g}")
    return EXIT_OK


def cmd_srgw(args) -> int:
    X = _load_space(args.x, args.weights_x)
    D_Y, _ = fileio.read_distance_csv(args.y)
    cfg = SolverConfig(max_iterations=args.max_iterations,
                       rel_tolerance=args.rel_tolerance,
                       init_mode=args.init, seed=args.seed)
    res = solve_srgw2(X, D_Y, cfg)
    print(f"srgw2 distortion = {res.distortion:.6g}")
    if args.out:
        fileio.write_coupling_csv(f"{args.out}.coupling.csv", res.coupling.plan)
        fileio.write_json(f"{args.out}.json", {
            "distortion": float(res.distortion),
            "objective_trace": [float(v) for v in res.objective_trace],
            "monge_map": list(res.monge_map) if res.monge_map is not None else None,
        })
    return EXIT_OK


def cmd_gh(args) -> int:
    D_X, _ = fileio.read_distance_csv(args.x)
    D_Y, _ = fileio.read_distance_csv(args.y)
    forward = srgh(D_X, D_Y)
    backward = srgh(D_Y, D_X)
    value = max(forward, backward)
    print(f"srgh(X,Y) = {forward:.6g}")
    print(f"srgh(Y,X) = {backward:.6g}")
    print(f"mgh = {value:.6g}")
    if args.out:
        fileio.write_json(args.out, {"srgh_xy": forward, "srgh_yx": backward, "mgh": value})
    return EXIT_OK


def cmd_synth(args) -> int:
    if args.kind == "rotated":
        space = rotated_pattern(args.anchors, args.samples, args.seed)
    else:
        if args.kind == "circle":
            manifold = Circle(args.radius)
        elif args.kind == "sphere":
            manifold = Sphere(args.radius)
        else:
            manifold = Euclidean(args.dim)
        _, space = sample_manifold(manifold, args.n, args.noise_sd, args.seed)
    fileio.write_distance_csv(args.out, space.distances, labels=space.labels)
    print(f"wrote {args.out} ({space.n_points} x {space.n_points})")
    return EXIT_OK


def cmd_redistrict(args) -> int:
    threads = _resolve_threads(args.threads)
    ensemble = fileio.read_plans_csv(args.plans)
    space = ensemble_distances(ensemble, threads=threads)
    d_max = float(space.distances.max())
    radius = d_max / math.pi if d_max > 0 else 1.0
    problem = EmbeddingProblem(space, Circle(radius), learn_scale=True,
                               grid_count=args.grid, jitter=args.jitter, seed=args.seed)
    cfg = OptimizerConfig(learning_rate=args.lr, max_steps=args.max_steps,
                          rel_threshold=args.rel_threshold)
    result, solve = srgw_gd(problem, cfg)
    coords = result.circular_coords
    summaries = arc_summaries(coords, ensemble, n_arcs=args.arcs,
                              within_arc_reference=args.align_mode)

    prefix = args.out
    fileio.write_embedding_csv(f"{prefix}.embedding.csv", list(ensemble.plan_ids),
                               result.points[:, None], result.scale, circular=coords)
    with open(f"{prefix}.svg", "w", encoding="utf-8", newline="") as fh:
        fh.write(fileio.svg_circle_scatter(coords))
    fileio.write_histogram_csv(f"{prefix}.hist.csv", coords)
    manifest = {"n_arcs": args.arcs, "align_mode": args.align_mode, "arcs": []}
    for summary in summaries:
        entry = {
            "arc_index": summary.arc_index,
            "start": summary.arc_index / args.arcs,
            "end": (summary.arc_index + 1) / args.arcs,
            "plan_ids": [ensemble.plan_ids[i] for i in summary.plan_indices],
            "file": None,
        }
        if summary.fractions is not None:
            arc_path = f"{prefix}.arc{summary.arc_index}.csv"
            fileio.write_arc_csv(arc_path, ensemble.unit_ids, summary.fractions)
            entry["file"] = os.path.basename(arc_path)
        manifest["arcs"].append(entry)
    fileio.write_json(f"{prefix}.manifest.json", manifest)
    meta = _embedding_meta(args, Circle(radius), result, solve)
    meta["n_plans"] = ensemble.n_plans
    meta["n_units"] = ensemble.n_units
    fileio.write_json(f"{prefix}.meta.json", meta)
    occupied = sum(1 for s in summaries if s.fractions is not None)
    print(f"embedded {ensemble.n_plans} plans; dis2 = {result.dis2:.6g}")
    print(f"occupied arcs = {occupied} of {args.arcs}")
    return EXIT_OK


def cmd_plot(args) -> int:
    ids, coords, circ, _ = fileio.read_embedding_csv(args.embedding)
    manifold = parse_manifold(args.manifold)
    if isinstance(manifold, Circle):
        values = circ if circ is not None else np.mod(coords[:, 0], 2 * math.pi) / (2 * math.pi)
        svg = fileio.svg_circle_scatter(values)
    elif isinstance(manifold, Sphere):
        svg = fileio.svg_sphere_scatter(coords)
    else:
        svg = fileio.svg_plane_scatter(coords)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(svg)
    print(f"wrote {args.out} ({len(ids)} points)")
    return EXIT_OK


def _add_optimizer_arguments(p, default_lr=0.01):
    p.add_argument("--lr", type=float, default=default_lr, help="Adam learning rate")
    p.add_argument("--max-steps", type=int, default=1000, help="Adam step budget")
    p.add_argument("--rel-threshold", type=float, default=1e-3,
                   help="relative stress-change stopping threshold")
    p.add_argument("--jitter", type=float, default=0.1, help="grid jitter fraction")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mvmds",
        description="Manifold-valued multidimensional scaling via semi-relaxed "
                    "Gromov-Wasserstein transport.")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: MVMDS_THREADS or 1); "
                             "outputs do not depend on this")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="embed a distance matrix into a manifold")
    p.add_argument("--input", required=True, help="square distance CSV")
    p.add_argument("--weights", default=None, help="optional weights file (one per line)")
    p.add_argument("--manifold", required=True,
                   help="circle:r=1.0 | sphere:r=6371 | euclidean:d=2")
    p.add_argument("--learn-scale", action="store_true", help="optimize the radius too")
    p.add_argument("--grid", type=int, default=100, help="warm-start grid size")
    _add_optimizer_arguments(p)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("srgw", help="solve the p=2 semi-relaxed transport problem")
    p.add_argument("--x", required=True, help="source distance CSV")
    p.add_argument("--weights-x", default=None, help="source weights file")
    p.add_argument("--y", required=True, help="target distance CSV")
    p.add_argument("--max-iterations", type=int, default=1000)
    p.add_argument("--rel-tolerance", type=float, default=1e-9)
    p.add_argument("--init", choices=("product", "random"), default="product")
    p.add_argument("--seed", type=int, default=None, help="seed for --init random")
    p.add_argument("--out", default=None, help="optional output prefix for the coupling")
    p.set_defaults(func=cmd_srgw)

    p = sub.add_parser("gh", help="brute-force Gromov-Hausdorff values")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--out", default=None, help="optional JSON output path")
    p.set_defaults(func=cmd_gh)

    p = sub.add_parser("synth", help="emit a synthetic distance matrix")
    p.add_argument("--kind", choices=("rotated", "circle", "sphere", "euclidean"),
                   required=True)
    p.add_argument("--anchors", type=int, default=10, help="pattern size (rotated)")
    p.add_argument("--samples", type=int, default=100, help="copy count (rotated)")
    p.add_argument("--n", type=int, default=50, help="sample count (manifold kinds)")
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--noise-sd", type=float, default=0.0)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("redistrict", help="embed a plan ensemble and summarize arcs")
    p.add_argument("--plans", required=True, help="plans CSV (header of unit ids)")
    p.add_argument("--grid", type=int, default=1000, help="warm-start grid size")
    _add_optimizer_arguments(p)
    p.add_argument("--arcs", type=int, default=8)
    p.add_argument("--align-mode", choices=("arc_first", "ensemble_first"),
                   default="arc_first")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(func=cmd_redistrict)

    p = sub.add_parser("plot", help="re-render an embedding CSV as SVG")
    p.add_argument("--embedding", required=True)
    p.add_argument("--manifold", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CapacityError as exc:
        print(f"capacity guard: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except DivergenceError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        print(f"trace: {[float(v) for v in exc.trace]}", file=sys.stderr)
        return EXIT_NUMERIC
    except FloatingPointError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OSError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
