"""Command-line surface: build, verify, spectrum, gen-graph, demo.

Exit codes: 0 success / report passed, 1 usage or I/O error, 2 construction
failure (partial tower written) or failed verification report.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .graphs import FAMILY_KINDS, GraphFamily, GraphParseError, parse_graph, prefix, render_graph
from .iepg import SolverParams
from .spectra import SpectrumSpecError, distance_to_set, parse_spectrum_spec
from .symmetric import MatrixFormatError, eigh_dense
from .tower import (
    StepFailedError,
    TowerFormatError,
    assemble_truncation,
    build_tower,
    load_tower,
    save_tower,
)
from .verify import render_report, verify_tower

SEED_ENV = "SPECTRAL_TOWER_SEED"
REPORT_NAME = "report.tsv"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); keep 2 for build failures
        raise UsageError(message)


def _add_spec_args(p):
    p.add_argument("--spec", help="inline spectrum text, pieces separated by '+' or ';'")
    p.add_argument("--spec-file", help="file with one spectrum piece per line")


def _add_family_args(p):
    p.add_argument("--family", choices=[k for k in FAMILY_KINDS if k != "explicit"],
                   help="built-in graph family")
    p.add_argument("--graph", help="graph file; extended past its last vertex by --tail")
    p.add_argument("--tail", choices=["isolated", "path-continue"], default="isolated",
                   help="how an explicit graph continues (default: isolated)")
    p.add_argument("--edge-probability", type=float, default=0.5,
                   help="edge probability for the random family")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spectower",
                     description="Build and verify towers of pattern-constrained "
                                 "symmetric matrices with prescribed spectra.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a tower and write it to a directory")
    _add_family_args(p)
    _add_spec_args(p)
    p.add_argument("--n", type=int, required=True, help="number of steps")
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--tol-spec", type=float, default=1e-9)
    p.add_argument("--tau-edge", type=float, default=1e-3)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output tower directory")

    p = sub.add_parser("verify", help="re-verify a tower and write a report")
    p.add_argument("tower_dir")
    p.add_argument("--window", type=float, nargs=2, default=[-10.0, 10.0],
                   metavar=("LO", "HI"))
    p.add_argument("--grid-step", type=float, default=None)
    p.add_argument("--out", help="report directory (default: the tower directory)")
    p.add_argument("--no-figures", action="store_true", help="skip figure rendering")

    p = sub.add_parser("spectrum", help="emit truncation eigenvalues as CSV")
    p.add_argument("tower_dir")
    p.add_argument("--k", type=int, default=None,
                   help="truncation order (default: steps + 10)")
    p.add_argument("--out", help="output directory (default: the tower directory)")
    p.add_argument("--no-figures", action="store_true")

    p = sub.add_parser("gen-graph", help="write a finite prefix of a family as a graph file")
    _add_family_args(p)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output file (default: stdout)")

    p = sub.add_parser("demo", help="small end-to-end run: build, verify, spectrum")
    p.add_argument("--out", default="spectower-demo", help="output directory")
    p.add_argument("--seed", type=int, default=0)
    return parser


def _resolve_seed(args) -> int:
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}")
    return getattr(args, "seed", 0)


def _resolve_family(args, seed: int) -> GraphFamily:
    if args.graph:
        base = parse_graph(Path(args.graph).read_text(encoding="utf-8"))
        return GraphFamily(kind="explicit", base=base, tail=args.tail)
    if not args.family:
        raise UsageError("one of --family or --graph is required")
    if args.family == "random":
        return GraphFamily(kind="random", seed=seed,
                           edge_probability=args.edge_probability)
    return GraphFamily(kind=args.family)


def _resolve_spec(args):
    if args.spec and args.spec_file:
        raise UsageError("--spec and --spec-file are mutually exclusive")
    if args.spec:
        return parse_spectrum_spec(args.spec)
    if args.spec_file:
        return parse_spectrum_spec(Path(args.spec_file).read_text(encoding="utf-8"))
    raise UsageError("one of --spec or --spec-file is required")


def _positive(name, value):
    if value <= 0:
        raise UsageError(f"{name} must be positive, got {value}")


def cmd_build(args) -> int:
    seed = _resolve_seed(args)
    _positive("--n", args.n)
    _positive("--epsilon", args.epsilon)
    _positive("--tol-spec", args.tol_spec)
    _positive("--tau-edge", args.tau_edge)
    _positive("--max-iter", args.max_iter)
    family = _resolve_family(args, seed)
    spec = _resolve_spec(args)
    params = SolverParams(tol_spec=args.tol_spec, tau_edge=args.tau_edge,
                          max_iter=args.max_iter, seed=seed)
    try:
        tower = build_tower(family, spec, args.n, args.epsilon, params)
    except StepFailedError as err:
        save_tower(err.partial, args.out)
        print(f"build failed: {err}", file=sys.stderr)
        print(f"partial tower with {err.partial.n_steps} step(s) written to {args.out}",
              file=sys.stderr)
        return 2
    save_tower(tower, args.out)
    print(f"built {tower.n_steps} step(s) into {args.out}")
    return 0


def cmd_verify(args) -> int:
    tower = load_tower(args.tower_dir)
    report = verify_tower(tower, window=tuple(args.window), grid_step=args.grid_step)
    outdir = Path(args.out) if args.out else Path(args.tower_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / REPORT_NAME).write_text(render_report(report), encoding="utf-8")
    if not args.no_figures:
        from .figures import render_tower_figures

        render_tower_figures(tower, report, outdir / "figures")
    for check in report.failures():
        print(f"FAIL {check.name}: measured {check.measured!r} vs bound "
              f"{check.bound!r} ({check.context})", file=sys.stderr)
    total = len(report.checks)
    print(f"report: {'PASS' if report.passed else 'FAIL'} "
          f"({total - report.n_failed}/{total} checks) -> {outdir / REPORT_NAME}")
    return 0 if report.passed else 2


def _spectrum_rows(tower, order):
    rows = []
    for n in range(1, tower.n_steps + 1):
        values = eigh_dense(assemble_truncation(tower, n, order).to_dense()).values
        dists = distance_to_set(tower.spec, values)
        rows.extend(
            (n, order, idx + 1, float(v), float(d))
            for idx, (v, d) in enumerate(zip(values, dists))
        )
    return rows


def cmd_spectrum(args) -> int:
    tower = load_tower(args.tower_dir)
    order = args.k if args.k is not None else tower.n_steps + 10
    if order < tower.n_steps:
        raise UsageError(f"--k must be >= the tower's {tower.n_steps} steps")
    rows = _spectrum_rows(tower, order)
    outdir = Path(args.out) if args.out else Path(args.tower_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    csv_path = outdir / "spectrum.csv"
    lines = ["n,K,index,eigenvalue,distance_to_set"]
    lines.extend(
        f"{n},{k},{idx},{v:.17g},{d:.17g}" for n, k, idx, v, d in rows
    )
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    if not args.no_figures:
        from .figures import render_spectrum_figure

        render_spectrum_figure(tower, rows, outdir / "spectrum.png")
    print(f"wrote {len(rows)} rows -> {csv_path}")
    return 0


def cmd_gen_graph(args) -> int:
    seed = _resolve_seed(args)
    _positive("--size", args.size)
    family = _resolve_family(args, seed)
    text = render_graph(prefix(family, args.size))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_demo(args) -> int:
    seed = _resolve_seed(args)
    out = Path(args.out)
    family = GraphFamily(kind="path")
    spec = parse_spectrum_spec("interval 0 1")
    params = SolverParams(tau_edge=1e-4, seed=seed)
    tower = build_tower(family, spec, 8, 0.5, params)
    tower_dir = save_tower(tower, out / "tower")
    report = verify_tower(tower)
    (tower_dir / REPORT_NAME).write_text(render_report(report), encoding="utf-8")
    from .figures import render_spectrum_figure, render_tower_figures

    render_tower_figures(tower, report, tower_dir / "figures")
    rows = _spectrum_rows(tower, tower.n_steps + 10)
    render_spectrum_figure(tower, rows, tower_dir / "spectrum.png")
    total = len(report.checks)
    print(f"demo tower: {tower.n_steps} steps, report "
          f"{'PASS' if report.passed else 'FAIL'} "
          f"({total - report.n_failed}/{total} checks) -> {tower_dir}")
    return 0 if report.passed else 2


_COMMANDS = {
    "build": cmd_build,
    "verify": cmd_verify,
    "spectrum": cmd_spectrum,
    "gen-graph": cmd_gen_graph,
    "demo": cmd_demo,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (SpectrumSpecError, GraphParseError, MatrixFormatError,
            TowerFormatError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


def console_main() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    console_main()
