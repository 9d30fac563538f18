"""Command-line front end: ``hpx constants|solve|search|scan|verify|bounds``.

Every command is deterministic given its flags. JSON output follows
``schemas/output.schema.json``; files are written once, atomically.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from fractions import Fraction
from typing import List, Optional, Sequence

from . import __version__, bounds
from .candidates import CandidateTable, closed_form_table, make_candidate
from .errors import DomainError, HpxError, NoConvergence
from .search import ScanRow, SearchSettings, polynomial_search, scan, structured_search
from .solver import FlipSystem, multistart_summary, solve_multistart
from .verify import SUITES

DEFAULT_SEED = 20240601

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NOCONV = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- parsing

def parse_p(text: str) -> Fraction:
    """'2/3' or '0.5' as an exact rational."""
    try:
        p = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational or decimal number: {text!r}")
    if p <= 0:
        raise argparse.ArgumentTypeError(f"p must be positive, got {text}")
    return p


def parse_p_spec(text: str) -> List[Fraction]:
    """'start:stop:step' (stop included) or a single value, all exact."""
    parts = text.split(":")
    if len(parts) == 1:
        return [parse_p(parts[0])]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"p grid must be start:stop:step, got {text!r}")
    start, stop, step = (parse_p(s) for s in parts)
    if stop < start:
        raise argparse.ArgumentTypeError("p grid stop lies below start")
    n = int((stop - start) / step)
    return [start + i * step for i in range(n + 1)]


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {v}")
    return v


def _common(sp: argparse.ArgumentParser, seed=True, starts=None):
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--out", metavar="PATH", help="write here (atomically) instead of stdout")
    if seed:
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    if starts is not None:
        sp.add_argument("--starts", type=_positive_int, default=starts)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hpx", description="Sharp coefficient constants C(k, p) in H^p.")
    ap.add_argument("--version", action="version", version=f"hpx {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("constants", help="best known value of C(k, p) with its candidate table")
    sp.add_argument("--k", type=_positive_int, required=True)
    sp.add_argument("--p", type=parse_p, required=True)
    _common(sp, starts=64)

    sp = sub.add_parser("bounds", help="monomial, Hardy-Littlewood and dual bounds")
    sp.add_argument("--k", type=_positive_int, required=True)
    sp.add_argument("--kmax", type=_positive_int, help="emit rows for k..kmax")
    sp.add_argument("--p", type=parse_p_spec, required=True, help="value or start:stop:step")
    _common(sp, seed=False)

    sp = sub.add_parser("solve", help="multistart solution of the flip equations")
    sp.add_argument("--k", type=_positive_int, required=True)
    sp.add_argument("--p", type=parse_p, required=True)
    sp.add_argument("--l", type=_nonneg_int, required=True)
    sp.add_argument("--tol", type=float, default=1e-11, help="convergence threshold on the residual")
    _common(sp, starts=200)

    sp = sub.add_parser("search", help="brute-force lower bound for C(k, p)")
    sp.add_argument("--k", type=_positive_int, required=True)
    sp.add_argument("--p", type=parse_p, required=True)
    sp.add_argument("--mode", choices=("structured", "polynomial"), default="structured")
    sp.add_argument("--l", type=_nonneg_int, help="Blaschke count (structured mode; default: all)")
    sp.add_argument("--degree", type=_nonneg_int, help="polynomial degree (polynomial mode)")
    sp.add_argument("--tol", type=float, default=1e-10, help="quadrature tolerance (polynomial mode)")
    _common(sp, starts=64)

    sp = sub.add_parser("scan", help="conjecture probe over a (k, p) grid")
    sp.add_argument("--kmax", "--k", dest="kmax", type=_positive_int, required=True)
    sp.add_argument("--p", type=parse_p_spec, required=True, help="start:stop:step, e.g. 0.1:0.9:0.1")
    sp.add_argument("--tol", type=float, default=1e-7, help="anomaly tolerance")
    sp.add_argument("--max-evals", type=_positive_int, default=6000)
    _common(sp, starts=8)

    sp = sub.add_parser("verify", help="run a verification suite")
    sp.add_argument("--suite", choices=(*SUITES, "all"), default="all")
    sp.add_argument("--budget", choices=("small", "full"), default="small")
    _common(sp, seed=False)
    return ap


# ---------------------------------------------------------------- commands

def _pf(p: Fraction) -> float:
    return float(p)


def _open_interval(p: Fraction, what: str):
    if not 0 < p < 1:
        raise UsageError(f"{what} needs 0 < p < 1, got {p}")


def cmd_bounds(a) -> dict:
    ks = range(a.k, (a.kmax or a.k) + 1)
    return {"rows": [bounds.report(k, p).to_dict() for k in ks for p in a.p]}


def _solver_table(k: int, p: Fraction, starts: int, seed: int) -> CandidateTable:
    entries = []
    for l in range(k + 1):
        for i, rep in enumerate(solve_multistart(FlipSystem(k, _pf(p), l), starts, seed + l)):
            c = rep.candidate
            entries.append(make_candidate(k, _pf(p), l, c.alphas, c.lam, f"l{l}_solver{i}"))
    if not entries or all(c.rejected for c in entries):
        raise NoConvergence(f"no admissible solution of the flip equations at k={k}, p={p}")
    return CandidateTable.build(k, _pf(p), entries)


def cmd_constants(a) -> dict:
    rep = bounds.report(a.k, a.p)
    out = {"k": a.k, "p": _pf(a.p), "p_exact": str(a.p), "bounds": rep.to_dict()}
    if a.p >= 1:
        return {**out, "value": 1.0, "source": "trivial", "table": None}
    table = closed_form_table(a.k, a.p)
    source = "closed_form"
    if table is None or rep.closed_form is None:
        table, source = _solver_table(a.k, a.p, a.starts, a.seed), "solver"
    value = rep.closed_form if rep.closed_form is not None else table.best_candidate.value
    return {**out, "value": value, "source": source, "table": table.to_dict()}


def cmd_solve(a) -> dict:
    _open_interval(a.p, "solve")
    if a.l > a.k:
        raise UsageError(f"--l must lie in 0..{a.k}")
    system = FlipSystem(a.k, _pf(a.p), a.l)
    sols = [r for r in solve_multistart(system, a.starts, a.seed) if r.final_residual <= a.tol]
    if not sols:
        raise NoConvergence(f"none of {a.starts} starts converged")
    summary = multistart_summary(system, a.starts, a.seed)
    return {"k": a.k, "p": _pf(a.p), "l": a.l, "summary": summary, "solutions": [r.to_dict() for r in sols]}


def cmd_search(a) -> dict:
    _open_interval(a.p, "search")
    settings = SearchSettings(starts=a.starts, seed=a.seed, quad_tol=a.tol)
    if a.mode == "polynomial":
        if a.degree is None:
            raise UsageError("polynomial mode needs --degree")
        res = polynomial_search(a.k, a.p, a.degree, a.starts, a.tol, a.seed, settings)
    else:
        ls = range(a.k + 1) if a.l is None else [a.l]
        if a.l is not None and a.l > a.k:
            raise UsageError(f"--l must lie in 0..{a.k}")
        runs = [structured_search(a.k, a.p, l, a.starts, a.seed, settings) for l in ls]
        res = max(runs, key=lambda r: r.objective)
    d = res.to_dict()
    d["closed_form"] = bounds.closed_form_C(a.k, a.p)
    return d


def cmd_scan(a) -> dict:
    if any(not 0 < p < 1 for p in a.p):
        raise UsageError("scan grid must lie inside (0, 1)")
    settings = SearchSettings(starts=a.starts, max_evals=a.max_evals, seed=a.seed)
    return scan(a.kmax, a.p, settings, a.tol).to_dict()


def cmd_verify(a) -> dict:
    names = list(SUITES) if a.suite == "all" else [a.suite]
    checks = [c.to_dict() for n in names for c in SUITES[n](a.budget)]
    return {"suite": a.suite, "budget": a.budget, "passed": all(c["passed"] for c in checks), "checks": checks}


COMMANDS = {"constants": cmd_constants, "bounds": cmd_bounds, "solve": cmd_solve,
            "search": cmd_search, "scan": cmd_scan, "verify": cmd_verify}


# ---------------------------------------------------------------- output

def _csv_rows(command: str, result: dict):
    if command == "scan":
        return list(ScanRow.CSV_COLUMNS), [[r[c] for c in ScanRow.CSV_COLUMNS] for r in result["rows"]]
    if command == "bounds":
        cols = list(result["rows"][0])
        return cols, [[r[c] for c in cols] for r in result["rows"]]
    if command == "constants":
        cols = ["k", "p", "l", "branch_label", "value", "residual", "rejected", "reason"]
        entries = result["table"]["entries"] if result["table"] else []
        rows = [[e[c] for c in cols] for e in entries]
        if not rows:
            rows = [[result["k"], result["p"], "", result["source"], result["value"], "", "", ""]]
        return cols, rows
    if command == "solve":
        cols = ["k", "p", "l", "status", "hits", "value", "residual", "max_imag"]
        return cols, [[result["k"], result["p"], result["l"], s["status"], s["hits"],
                       s["candidate"]["value"], s["candidate"]["residual"], s["max_imag"]]
                      for s in result["solutions"]]
    if command == "search":
        cols = ["k", "p", "mode", "l", "degree", "objective", "closed_form", "starts", "evals", "seed"]
        return cols, [[result[c] for c in cols]]
    cols = ["name", "passed", "detail"]
    return cols, [[c[x] for x in cols] for c in result["checks"]]


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


def render(command: str, result: dict, fmt: str, args: Optional[dict] = None) -> str:
    if fmt == "csv":
        cols, rows = _csv_rows(command, result)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        w.writerows([[_cell(v) for v in r] for r in rows])
        return buf.getvalue()
    doc = {"command": command, "version": __version__, "args": args or {}, "result": result}
    return json.dumps(doc, indent=2, default=_json_default, allow_nan=False) + "\n"


def _json_default(o):
    if isinstance(o, Fraction):
        return str(o)
    if hasattr(o, "item"):
        return o.item()
    raise TypeError(f"cannot serialise {type(o).__name__}")


def write_atomic(path: str, text: str) -> None:
    """Write to a sibling temp file, then rename over the target."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".hpx-", dir=d)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _args_record(a) -> dict:
    out = {}
    for key, v in vars(a).items():
        if key in ("out", "format"):
            continue
        if isinstance(v, list):
            v = [str(x) for x in v]
        elif isinstance(v, Fraction):
            v = str(v)
        out[key] = v
    return out


def _sanitize(o):
    # non-finite floats would make invalid JSON
    if isinstance(o, float) and not math.isfinite(o):
        return None
    if isinstance(o, dict):
        return {k: _sanitize(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_sanitize(v) for v in o]
    return o


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        result = _sanitize(COMMANDS[a.command](a))
    except (UsageError, DomainError) as e:
        print(f"hpx {a.command}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except NoConvergence as e:
        print(f"hpx {a.command}: no convergence: {e}", file=sys.stderr)
        return EXIT_NOCONV
    except HpxError as e:
        print(f"hpx {a.command}: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_VERIFY
    text = render(a.command, result, a.format, _args_record(a))
    if a.out:
        write_atomic(a.out, text)
    else:
        sys.stdout.write(text)
    if a.command == "verify" and not result["passed"]:
        return EXIT_VERIFY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
