"""Command-line front end.

    fpcov solve --method shooting --problem revenue --out traj.csv
    fpcov solve --method analytic --branch lower
    fpcov compare --steps 40 --threshold 1e-2 --perturb 0.05

Exit codes: 0 success, 1 usage error, 2 non-convergence or failed check.
Settings come from flags, then an optional ``--config`` file of
``key=value`` lines, then built-in defaults.
"""

from __future__ import annotations

import argparse
import itertools
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .estimators import AnalyticSolver, ShootingSolver, TranscriptionSolver
from .exceptions import FPCovError
from .io import write_trajectory_csv
from .model import BUILTIN_PROBLEMS

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2
ENGINES = ("shooting", "analytic", "nlp")
SEED_ENV = "FPCOV_SEED"

# key -> (converter, default)
SETTINGS = {
    "method": (str, "shooting"),
    "problem": (str, "revenue"),
    "steps": (int, None),
    "scheme": (str, None),
    "tol": (float, None),
    "p0": (float, 0.0),
    "z0": (float, 0.5),
    "branch": (str, "upper"),
    "perturb": (float, None),
    "samples": (int, 10),
    "threshold": (float, 1e-3),
    "out": (str, None),
    "report": (str, None),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunReport:
    engine: str
    problem: str
    z: float = float("nan")
    J: float = float("nan")
    params: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    iterations: int | None = None
    converged: bool = False
    wall_time: float = 0.0
    notes: list = field(default_factory=list)

    def to_text(self):
        lines = [
            f"engine      : {self.engine}",
            f"problem     : {self.problem}",
            f"converged   : {self.converged}",
            f"z = y(T)    : {self.z:.12g}",
            f"J (max)     : {self.J:.12g}",
        ]
        lines += [f"{k:<12}: {v:.12g}" for k, v in self.params.items()]
        lines += [f"residual {k:<3}: {v:.3e}" for k, v in self.residuals.items()]
        if self.iterations is not None:
            lines.append(f"iterations  : {self.iterations}")
        lines.append(f"wall time   : {self.wall_time:.3f} s")
        lines += self.notes
        return "\n".join(lines)


def _build_parser():
    parser = _Parser(prog="fpcov", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--problem", choices=sorted(BUILTIN_PROBLEMS))
        p.add_argument("--steps", type=int, help="integrator / transcription grid size")
        p.add_argument("--scheme", choices=("euler", "rk4"))
        p.add_argument("--tol", type=float)
        p.add_argument("--p0", type=float, help="shooting guess for the initial costate")
        p.add_argument("--z0", type=float, help="shooting guess for y(T)")
        p.add_argument("--branch", choices=("upper", "lower"))
        p.add_argument("--perturb", type=float, metavar="DELTA")
        p.add_argument("--samples", type=int, help="grid intervals probed by --perturb")
        p.add_argument("--out", metavar="PATH", help="trajectory CSV")
        p.add_argument("--report", metavar="PATH", help="text report")
        p.add_argument("--config", metavar="PATH", help="key=value settings file")

    solve = sub.add_parser("solve", help="run one engine")
    solve.add_argument("--method", choices=ENGINES)
    common(solve)
    compare = sub.add_parser("compare", help="run every engine and cross-check")
    common(compare)
    compare.add_argument("--threshold", type=float, help="max pairwise |dz| and |dJ|")
    return parser


def read_config(path):
    """Parse ``key=value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in SETTINGS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = SETTINGS[key][0](value)
        except ValueError:
            raise UsageError(f"{path}:{lineno}: bad value {value!r} for {key}") from None
    return out


def resolve_settings(args):
    """Merge flags over config file over defaults."""
    config = read_config(args.config) if getattr(args, "config", None) else {}
    opts = {}
    for key, (_, default) in SETTINGS.items():
        flag = getattr(args, key, None)
        opts[key] = flag if flag is not None else config.get(key, default)
    if opts["method"] not in ENGINES:
        raise UsageError(f"method must be one of {ENGINES}")
    if opts["problem"] not in BUILTIN_PROBLEMS:
        raise UsageError(f"unknown problem {opts['problem']!r}")
    if opts["scheme"] not in (None, "euler", "rk4"):
        raise UsageError("scheme must be euler or rk4")
    if opts["branch"] not in ("upper", "lower"):
        raise UsageError("branch must be upper or lower")
    seed = os.environ.get(SEED_ENV)
    if seed is not None:
        try:
            opts["seed"] = int(seed)
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer, got {seed!r}") from None
    return opts


def run_engine(engine, opts, steps=None):
    """Run one engine; returns ``(RunReport, Trajectory or None, solver or None)``.

    ``steps`` overrides the engine's default grid size when given.
    """
    report = RunReport(engine=engine, problem=opts["problem"])
    start = time.perf_counter()
    solver = None
    try:
        if engine == "shooting":
            kw = dict(p0=opts["p0"], z0=opts["z0"], method=opts["scheme"] or "rk4")
            if steps is not None:
                kw["steps"] = steps
            if opts["tol"] is not None:
                kw["tol"] = opts["tol"]
            solver = ShootingSolver(**kw).fit(opts["problem"])
            report.params = {"p0": solver.p0_}
            report.residuals = {"r1": solver.residual_[0], "r2": solver.residual_[1]}
            report.iterations = solver.n_iter_
        elif engine == "analytic":
            kw = dict(branch=opts["branch"])
            if opts["tol"] is not None:
                kw["tol"] = opts["tol"]
            if steps is not None:
                kw["steps"] = steps
            solver = AnalyticSolver(**kw).fit(opts["problem"])
            report.params = {"c": solver.c_}
            report.residuals = {"R1": solver.residual_[0], "R2": solver.residual_[1]}
            report.notes.append(f"branch      : {solver.params_.branch}")
        else:
            steps = steps or 400
            kw = dict(steps=steps, scheme=opts["scheme"] or "euler")
            if opts["tol"] is not None:
                kw["tol"] = opts["tol"]
            solver = TranscriptionSolver(**kw).fit(opts["problem"])
            report.residuals = {"pg": solver.projected_gradient_norm_}
            report.iterations = solver.n_iter_
            report.params = {"steps": float(steps)}
        report.z = solver.z_
        report.J = solver.objective_
        report.converged = bool(getattr(solver, "converged_", True))
    except (FPCovError, ValueError) as exc:
        report.notes.append(f"failure     : {type(exc).__name__}: {exc}")
        solver = None
    report.wall_time = time.perf_counter() - start
    traj = solver.trajectory_ if solver is not None else None
    return report, traj, solver


def _perturb(solver, opts, report):
    rep = solver.perturbation_report(opts["perturb"], opts["samples"])
    report.notes.extend(rep.lines())
    return rep.all_decrease or (opts["perturb"] == 0 and rep.flagged.size == 0)


def _emit(text, path):
    print(text)
    if path:
        Path(path).write_text(text + "\n")


def cmd_solve(opts):
    engine = opts["method"]
    report, traj, solver = run_engine(engine, opts, opts["steps"])
    ok = report.converged
    if ok and opts["perturb"] is not None:
        if engine == "shooting":
            ok = _perturb(solver, opts, report)
        else:
            report.notes.append("perturbation check runs on the shooting engine only; skipped")
    if "seed" in opts:
        report.notes.append(f"seed        : {opts['seed']}")
    if traj is not None and opts["out"]:
        write_trajectory_csv(traj, opts["out"])
    _emit(report.to_text(), opts["report"])
    return EXIT_OK if ok else EXIT_FAIL


def cmd_compare(opts):
    engines = list(ENGINES)
    if opts["problem"] != "revenue":
        engines.remove("analytic")
    # --steps sizes the transcription grid; the other engines keep their defaults
    results = {}
    for eng in engines:
        results[eng] = run_engine(eng, opts, opts["steps"] if eng == "nlp" else None)

    rows = ["engine      converged            z                  J       residual"]
    for eng in engines:
        r = results[eng][0]
        res = max((abs(v) for v in r.residuals.values()), default=float("nan"))
        rows.append(f"{eng:<10}  {str(r.converged):<9} {r.z:>16.10f} {r.J:>18.10f}   {res:.2e}")
    ok = all(results[e][0].converged for e in engines)
    thr = opts["threshold"]
    rows.append("")
    rows.append(f"pairwise differences (threshold {thr:g})")
    for a, b in itertools.combinations(engines, 2):
        ra, rb = results[a][0], results[b][0]
        dz, dJ = abs(ra.z - rb.z), abs(ra.J - rb.J)
        passed = bool(np.isfinite(dz) and np.isfinite(dJ) and dz < thr and dJ < thr)
        ok &= passed
        rows.append(f"  {a:>8} vs {b:<8}  |dz| = {dz:.3e}   |dJ| = {dJ:.3e}   {'ok' if passed else 'FAIL'}")

    if opts["perturb"] is not None:
        solver = results["shooting"][2]
        if solver is None:
            ok = False
        else:
            shoot_report = RunReport("shooting", opts["problem"])
            ok &= _perturb(solver, opts, shoot_report)
            rows.append("")
            rows.extend(shoot_report.notes)

    if opts["out"]:
        stem = Path(opts["out"])
        for eng in engines:
            traj = results[eng][1]
            if traj is not None:
                write_trajectory_csv(traj, stem.with_name(f"{stem.stem}-{eng}{stem.suffix or '.csv'}"))

    details = "\n\n".join(results[e][0].to_text() for e in engines)
    _emit("\n".join(rows) + "\n\n" + details, opts["report"])
    return EXIT_OK if ok else EXIT_FAIL


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        opts = resolve_settings(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"fpcov: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.command == "solve":
        return cmd_solve(opts)
    return cmd_compare(opts)


if __name__ == "__main__":
    sys.exit(main())
