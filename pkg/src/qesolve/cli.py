"""Command-line front-end.

Subcommands:
  solve   run a family solve and emit solution documents (JSON or CSV)
  verify  re-run the full verification stack on stored documents
  sample  tabulate a stored wavefunction on a log grid (CSV)
  scan    sweep one coupling and tabulate solutions per value (CSV)

Exit codes: 0 success, 1 usage or parse error, 2 no solution found,
3 verification failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from .bethe import SolverConfig
from .document import (
    document_to_solution,
    dumps_documents,
    loads_documents,
    solution_to_document,
)
from .errors import DocumentError, QesError
from .families import (
    Case,
    Family,
    FamilyProblem,
    solve_family_detailed,
)
from .oracle import VerifyLevel, verify_solution
from .wavefunction import eval_log_psi, eval_psi_log_derivatives

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NO_SOLUTION = 2
EXIT_VERIFY_FAILED = 3


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _parse_params(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise DocumentError(f"--param expects NAME=VALUE, got {item!r}")
        name, _, val = item.partition("=")
        try:
            out[name.strip()] = float(val)
        except ValueError as exc:
            raise DocumentError(f"--param {name}: {exc}") from exc
    return out


def _build_problem(args) -> FamilyProblem:
    free = _parse_params(args.param)
    return FamilyProblem(
        Family(args.family),
        Case(args.case),
        args.n,
        float(args.ell),
        free,
        bool(getattr(args, "match_ell", False)),
    )


def _config(args) -> SolverConfig:
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get("QES_SEED", "0"))
    return SolverConfig(seed=seed, starts=args.starts)


def _write(text: str, path: str | None):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _solution_rows(solutions, reports):
    rows = []
    for idx, (sol, rep) in enumerate(zip(solutions, reports)):
        row = {"branch": idx, "energy": sol.energy}
        for key in sorted(sol.derived):
            row[key] = sol.derived[key]
        for j, z in enumerate(sol.roots.roots):
            row[f"root{j}_re"] = z.real
            row[f"root{j}_im"] = z.imag
        row["passed"] = "true" if rep.passed else "false"
        rows.append(row)
    return rows


def _rows_to_csv(rows, columns) -> str:
    lines = [",".join(columns)]
    for row in rows:
        cells = []
        for col in columns:
            val = row.get(col, "")
            if isinstance(val, float):
                cells.append(_fmt(val))
            else:
                cells.append(str(val))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def cmd_solve(args) -> int:
    problem = _build_problem(args)
    cfg = _config(args)
    solutions, failures = solve_family_detailed(problem, cfg)
    if not solutions:
        for f in failures:
            print(f"no admissible branch: {f.error}: {f.detail}", file=sys.stderr)
        return EXIT_NO_SOLUTION
    reports = [verify_solution(s, VerifyLevel.FAST) for s in solutions]
    if args.format == "json":
        docs = [solution_to_document(s, r) for s, r in zip(solutions, reports)]
        _write(dumps_documents(docs), args.out)
    else:
        rows = _solution_rows(solutions, reports)
        columns = list(rows[0].keys())
        _write(_rows_to_csv(rows, columns), args.out)
    return EXIT_OK if any(r.passed for r in reports) else EXIT_VERIFY_FAILED


def cmd_verify(args) -> int:
    with open(args.path) as fh:
        docs = loads_documents(fh.read())
    all_passed = True
    outputs = []
    for i, doc in enumerate(docs):
        solution = document_to_solution(doc)
        report = verify_solution(solution, VerifyLevel.FULL)
        all_passed &= report.passed
        print(f"document {i}: {'PASS' if report.passed else 'FAIL'}")
        for line in report.lines():
            print(f"  {line}")
        outputs.append(solution_to_document(solution, report))
    if args.out:
        _write(dumps_documents(outputs), args.out)
    return EXIT_OK if all_passed else EXIT_VERIFY_FAILED


def cmd_sample(args) -> int:
    with open(args.path) as fh:
        docs = loads_documents(fh.read())
    if args.rmin <= 0:
        raise DocumentError("rmin must be positive")
    if not args.rmax > args.rmin:
        raise DocumentError("rmax must exceed rmin")
    solution = document_to_solution(docs[args.index])
    grid = np.geomspace(args.rmin, args.rmax, args.points)
    lines = ["r,log_abs_psi,sign,psi1_over_psi"]
    for r in grid:
        log_mag, sign = eval_log_psi(solution, float(r))
        try:
            psi1, _ = eval_psi_log_derivatives(solution, float(r))
            p1 = _fmt(psi1)
        except QesError:
            p1 = "nan"
        mag = _fmt(log_mag) if math.isfinite(log_mag) else "-inf"
        lines.append(f"{_fmt(float(r))},{mag},{int(sign)},{p1}")
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _parse_sweep(spec: str):
    if "=" not in spec or spec.count(":") != 2:
        raise DocumentError("--sweep expects NAME=START:STOP:STEPS")
    name, _, rng = spec.partition("=")
    start_s, stop_s, steps_s = rng.split(":")
    try:
        start, stop, steps = float(start_s), float(stop_s), int(steps_s)
    except ValueError as exc:
        raise DocumentError(f"--sweep: {exc}") from exc
    if steps < 1:
        raise DocumentError("--sweep needs STEPS >= 1")
    values = [start] if steps == 1 else list(np.linspace(start, stop, steps))
    return name.strip(), values


def cmd_scan(args) -> int:
    name, values = _parse_sweep(args.sweep)
    base = _parse_params(args.param)
    cfg = _config(args)
    rows = []
    derived_keys: list[str] = []
    any_solution = False
    for value in values:
        free = dict(base)
        free[name] = float(value)
        try:
            problem = FamilyProblem(
                Family(args.family),
                Case(args.case),
                args.n,
                float(args.ell),
                free,
                bool(args.match_ell),
            )
            solutions, failures = solve_family_detailed(problem, cfg)
        except QesError as exc:
            rows.append({name: float(value), "error": type(exc).__name__})
            continue
        for idx, sol in enumerate(solutions):
            any_solution = True
            report = verify_solution(sol, VerifyLevel.FAST)
            row = {name: float(value), "branch": idx, "energy": sol.energy}
            for key in sorted(sol.derived):
                row[key] = sol.derived[key]
                if key not in derived_keys:
                    derived_keys.append(key)
            row["passed"] = "true" if report.passed else "false"
            row["error"] = ""
            rows.append(row)
        for failure in failures:
            rows.append({name: float(value), "error": failure.error})
    columns = [name, "branch", "energy", *sorted(derived_keys), "passed", "error"]
    _write(_rows_to_csv(rows, columns), args.out)
    return EXIT_OK if any_solution else EXIT_NO_SOLUTION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qes",
        description="Exact bound states of singular inverse-power potentials.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_problem_flags(p):
        p.add_argument("--family", required=True, choices=[f.value for f in Family])
        p.add_argument("--case", default="harmonic", choices=["harmonic", "coulombic"])
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--ell", type=float, default=0.0)
        p.add_argument("--param", action="append", metavar="NAME=VALUE")
        p.add_argument("--match-ell", dest="match_ell", action="store_true")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--starts", type=int, default=200)
        p.add_argument("--out", default=None)

    p_solve = sub.add_parser("solve", help="solve one family problem")
    add_problem_flags(p_solve)
    p_solve.add_argument("--format", default="json", choices=["json", "csv"])
    p_solve.set_defaults(func=cmd_solve)

    p_verify = sub.add_parser("verify", help="re-verify stored documents")
    p_verify.add_argument("path")
    p_verify.add_argument("--out", default=None)
    p_verify.set_defaults(func=cmd_verify)

    p_sample = sub.add_parser("sample", help="tabulate a stored wavefunction")
    p_sample.add_argument("path")
    p_sample.add_argument("--rmin", type=float, required=True)
    p_sample.add_argument("--rmax", type=float, required=True)
    p_sample.add_argument("--points", type=int, default=100)
    p_sample.add_argument("--index", type=int, default=0)
    p_sample.add_argument("--out", default=None)
    p_sample.set_defaults(func=cmd_sample)

    p_scan = sub.add_parser("scan", help="sweep one coupling")
    add_problem_flags(p_scan)
    p_scan.add_argument("--sweep", required=True, metavar="NAME=START:STOP:STEPS")
    p_scan.set_defaults(func=cmd_scan)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (QesError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
