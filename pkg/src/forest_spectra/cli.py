"""Command-line front end.

Reads a matrix (JSON or CSV) or a tropical rate file, runs one task and
prints a JSON report.  Vertex labels are 1-based on the command line and in
files; the library underneath is 0-based.

Exit codes: 0 success, 1 input error, 2 computation error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
import time
from fractions import Fraction

from . import forest_calculus as fc
from . import oracles
from .errors import (
    ComputationError,
    DimensionMismatch,
    ForestSpectraError,
    InputError,
    NonRationalInExactMode,
    ParseError,
    TooLarge,
)
from .graph_core import GeneralizedAdjacencyMatrix
from .scalars import format_scalar, to_fraction
from .tropical_asymptotics import (
    ExponentialMarkovInput,
    extreme_forests,
    tropical_char_poly,
    tropical_spectrum,
    validate_asymptotics,
)

TASKS = ("charpoly", "det", "minor", "cofactor", "eigenvector", "kirchhoff-charpoly",
         "tropical-spectrum", "validate", "selftest")
MODES = ("exact", "float", "tropical")
COMPATIBLE = {
    "charpoly": {"exact", "float", "tropical"},
    "det": {"exact", "float"},
    "minor": {"exact", "float"},
    "cofactor": {"exact", "float"},
    "eigenvector": {"exact", "float"},
    "kirchhoff-charpoly": {"exact", "float"},
    "tropical-spectrum": {"tropical"},
    "validate": {"tropical"},
    "selftest": {"exact", "float", "tropical"},
}
DAGGER_NAMES = ("dagger", "†")


# ---------------------------------------------------------------- parsing

def _entry(value, mode, line=None, column=None):
    if mode == "exact":
        try:
            return to_fraction(value)
        except ValueError:
            where = f" at line {line}, column {column}" if line is not None else ""
            raise NonRationalInExactMode(f"entry {value!r}{where} is not a rational") from None
    try:
        if isinstance(value, str) and "/" in value:
            return float(Fraction(value.strip()))
        if isinstance(value, bool):
            raise ValueError
        return float(value)
    except (ValueError, ZeroDivisionError, TypeError):
        raise ParseError(f"entry {value!r} is not a number", line, column) from None


def _matrix_from_json(doc, mode):
    if "entries" not in doc:
        raise ParseError("matrix JSON needs an 'entries' field")
    rows = doc["entries"]
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ParseError("'entries' must be a list of rows")
    n = doc.get("n", len(rows))
    if not isinstance(n, int) or isinstance(n, bool):
        raise ParseError(f"'n' must be an integer, got {n!r}")
    if len(rows) != n or any(len(r) != n for r in rows):
        shape = f"{len(rows)}x{','.join(str(len(r)) for r in rows)}"
        raise DimensionMismatch(f"expected a {n}x{n} matrix, got rows of shape {shape}")
    if n < 1:
        raise DimensionMismatch("matrix must be at least 1x1")
    return GeneralizedAdjacencyMatrix.from_rows(
        [[_entry(x, mode, i + 1, j + 1) for j, x in enumerate(r)] for i, r in enumerate(rows)])


def _matrix_from_csv(text, mode):
    rows = []
    lines = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not c.strip() for c in row):
            continue
        rows.append(row)
        lines.append(lineno)
    n = len(rows)
    if n == 0:
        raise ParseError("empty CSV")
    for row, lineno in zip(rows, lines):
        if len(row) != n:
            raise DimensionMismatch(f"line {lineno} has {len(row)} columns, expected {n}")
    return GeneralizedAdjacencyMatrix.from_rows(
        [[_entry(c.strip(), mode, ln, j + 1) for j, c in enumerate(row)]
         for row, ln in zip(rows, lines)])


def _tropical_from_json(doc):
    try:
        n = int(doc["n"])
        arc_list = doc["arcs"]
    except (KeyError, TypeError, ValueError):
        raise ParseError("tropical JSON needs integer 'n' and an 'arcs' list") from None
    arcs, killing = {}, {}
    for idx, arc in enumerate(arc_list):
        try:
            i = int(arc["from"]) - 1
            to = arc["to"]
            v = to_fraction(arc["V"])
            m = to_fraction(arc["m"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"arc #{idx + 1}: {exc}") from None
        if not 0 <= i < n:
            raise DimensionMismatch(f"arc #{idx + 1}: 'from' outside 1..{n}")
        if to in DAGGER_NAMES:
            if i in killing:
                raise ParseError(f"arc #{idx + 1}: duplicate killing arc for state {i + 1}")
            killing[i] = (v, m)
        else:
            try:
                j = int(to) - 1
            except (TypeError, ValueError):
                raise ParseError(f"arc #{idx + 1}: bad 'to' {to!r}") from None
            if not 0 <= j < n:
                raise DimensionMismatch(f"arc #{idx + 1}: 'to' outside 1..{n}")
            if (i, j) in arcs:
                raise ParseError(f"arc #{idx + 1}: duplicate arc ({i + 1}, {j + 1})")
            arcs[(i, j)] = (v, m)
    return ExponentialMarkovInput(n, arcs, killing)


def parse_matrix_text(text, mode="exact"):
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text, parse_float=str, parse_int=int)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
        if "arcs" in doc:
            if mode != "tropical":
                raise InputError("rate files with 'arcs' need --mode tropical")
            return _tropical_from_json(doc)
        if mode == "tropical":
            raise InputError("--mode tropical needs a rate file with 'arcs'")
        return _matrix_from_json(doc, mode)
    if mode == "tropical":
        raise InputError("--mode tropical needs a JSON rate file")
    return _matrix_from_csv(text, mode)


def parse_matrix_file(path, mode="exact"):
    """Read a JSON matrix, a CSV matrix, or (tropical mode) a JSON rate file."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return parse_matrix_text(text, mode)


def echo_input(obj):
    """Serialize parsed input so that it re-parses to an identical object."""
    if isinstance(obj, ExponentialMarkovInput):
        arcs = [{"from": i + 1, "to": j + 1, "V": str(v), "m": format_scalar(m)}
                for (i, j), (v, m) in sorted(obj.arcs.items())]
        arcs += [{"from": i + 1, "to": "dagger", "V": str(v), "m": format_scalar(m)}
                 for i, (v, m) in sorted(obj.killing.items())]
        return {"n": obj.n, "arcs": arcs}
    return {"n": obj.n, "entries": [[format_scalar(x) for x in row] for row in obj.entries]}


# ---------------------------------------------------------------- tasks

def _label(v, n):
    return "dagger" if v == n else str(v + 1)


def _forest_text(f, n):
    if not f.arcs:
        return "(empty)"
    return ", ".join(f"{_label(i, n)}->{_label(j, n)}" for i, j in f.arcs)


def _index(value, n, flag):
    if value is None:
        raise InputError(f"{flag} is required for this task")
    if not 1 <= value <= n:
        raise InputError(f"{flag} {value} outside 1..{n}")
    return value - 1


def _parse_lambda(text, mode):
    if text is None:
        raise InputError("--lambda is required for this task")
    if mode == "exact":
        try:
            return to_fraction(text)
        except ValueError:
            raise NonRationalInExactMode(f"--lambda {text!r} is not a rational") from None
    try:
        return float(Fraction(text)) if "/" in text else float(text)
    except ValueError:
        try:
            return complex(text.replace(" ", ""))
        except ValueError:
            raise InputError(f"--lambda {text!r} is not a number") from None


def _parse_int_list(text, flag):
    if text is None or not text.strip():
        return []
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"{flag} must be a comma-separated list of integers") from None


def _parse_float_list(text, flag):
    if text is None:
        return []
    try:
        return [float(Fraction(t)) if "/" in t else float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"{flag} must be a comma-separated list of numbers") from None


def _fmt_order(v):
    return "inf" if v == float("inf") else str(v)


def _spectrum_payload(inp, args, notes):
    spectrum = tropical_spectrum(inp)
    witnesses = extreme_forests(inp)
    reference = [to_fraction(t) for t in args.reference_orders.split(",")] \
        if args.reference_orders else None
    if reference is not None and len(reference) != inp.n + 1:
        raise InputError(f"--reference-orders needs {inp.n + 1} values (k = 0..{inp.n})")
    for k, (order, _, forests) in enumerate(witnesses):
        shown = "; ".join(_forest_text(f, inp.n) for f in forests) or "no forest"
        notes.append(f"k={k}: minimum order {_fmt_order(order)} attained by {shown}")
        if reference is not None and reference[k] != order:
            notes.append(f"k={k}: reference order {reference[k]} differs from the computed "
                         f"minimum {_fmt_order(order)}")
    if not spectrum.convexity_ok:
        notes.append("coefficient orders are not convex; eigenvalues reported per hull segment")
    elif not spectrum.eigenvalues:
        notes.append("coincident hull slopes; eigenvalues reported per hull segment")
    poly = spectrum.newton_polygon
    return {
        "coefficient_orders": [{"k": k, "V": _fmt_order(c.order), "m": float(c.prefactor)}
                               for k, c in enumerate(spectrum.coefficient_orders)],
        "newton_polygon": {
            "vertices": [[k, str(v)] for k, v in poly.vertices],
            "exponents": [_fmt_order(e) for e in poly.exponents],
            "segments": [{"exponent": _fmt_order(e), "multiplicity": mult}
                         for e, mult in poly.segments],
        },
        "eigenvalues": [{"k": e.k, "exponent": str(e.exponent), "Lambda": e.Lambda}
                        for e in spectrum.eigenvalues],
        "convexity_ok": spectrum.convexity_ok,
    }


def _random_int_matrix(rng, n, lo=-5, hi=5):
    return GeneralizedAdjacencyMatrix.from_rows(
        [[Fraction(rng.randint(lo, hi)) for _ in range(n)] for _ in range(n)])


def selftest(count=20, seed=0, max_n=5):
    """Compare forest sums with the signed oracles on seeded random matrices."""
    rng = random.Random(seed)
    charpoly_bad = det_bad = 0
    for _ in range(count):
        g = _random_int_matrix(rng, rng.randint(1, max_n))
        cp = fc.char_poly(g)
        if cp != oracles.cycle_cover_char_poly(g) or cp != oracles.perm_expansion_char_poly(g):
            charpoly_bad += 1
        if fc.determinant(g) != oracles.perm_expansion_det(g):
            det_bad += 1
    return {"matrices": count, "seed": seed, "charpoly_mismatches": charpoly_bad,
            "det_mismatches": det_bad, "all_ok": charpoly_bad == 0 and det_bad == 0}


def run_task(args, notes):
    """Execute one request; returns ``(n, result, input_echo)``."""
    task, mode = args.task, args.mode
    if mode not in COMPATIBLE[task]:
        raise InputError(f"task {task} does not support mode {mode}")
    if task == "selftest":
        result = selftest(args.count, args.seed)
        if not result["all_ok"]:
            raise ComputationError("oracle mismatch in selftest")
        return None, result, None
    if args.input is None:
        raise InputError("--input is required for this task")
    obj = parse_matrix_file(args.input, mode)
    n = obj.n
    if n > args.max_n:
        raise TooLarge(
            f"N = {n} exceeds --max-n {args.max_n}: forest enumeration grows roughly like "
            f"(N+1)^(N-1) on dense inputs; raise --max-n explicitly to proceed")
    echo = echo_input(obj)
    opts = {"include_zero_arcs": args.include_zero_arcs}

    if task == "charpoly":
        if mode == "tropical":
            return n, [c.to_json() for c in tropical_char_poly(obj)], echo
        return n, [format_scalar(c) for c in fc.char_poly(obj, **opts).coeffs], echo
    if task == "det":
        return n, format_scalar(fc.determinant(obj, **opts)), echo
    if task == "minor":
        roots = _parse_int_list(args.roots, "--roots")
        removed = [_index(r, n, "--roots") for r in roots]
        return n, format_scalar(fc.diagonal_minor_det(obj, removed, **opts)), echo
    if task == "cofactor":
        i, j = _index(args.n, n, "--n"), _index(args.m, n, "--m")
        return n, format_scalar(fc.cofactor(obj, i, j, **opts)), echo
    if task == "eigenvector":
        pivot = _index(args.n, n, "--n")
        lam = _parse_lambda(args.lam, mode)
        res = fc.eigenvector_components(obj, lam, pivot, args.transpose, **opts)
        target = obj.transpose() if args.transpose else obj
        r = oracles.residual(target, lam, [complex(c) for c in res.components])
        tol = 1e-8 * (1 + oracles.inf_norm(obj))
        warning = r > tol
        if warning:
            notes.append(f"residual {r:.3g} exceeds {tol:.3g}: lambda may not be a simple eigenvalue")
        return n, {"n": pivot + 1, "lambda": format_scalar(lam),
                   "components": [format_scalar(c) for c in res.components],
                   "transpose": args.transpose, "residual": r, "warning": warning}, echo
    if task == "kirchhoff-charpoly":
        return n, [format_scalar(c) for c in fc.kirchhoff_char_poly(obj, **opts).coeffs], echo
    if task == "tropical-spectrum":
        return n, _spectrum_payload(obj, args, notes), echo
    if task == "validate":
        eps = _parse_float_list(args.eps, "--eps") or [0.1, 0.05]
        rows = validate_asymptotics(obj, eps, method=args.eig_method)
        return n, {"eps": eps, "method": args.eig_method, "eigenvalues": [
            {"k": r.k, "predicted_exponent": str(r.predicted_exponent),
             "estimated_exponent": r.estimated_exponent,
             "exponent_rel_error": r.exponent_rel_error,
             "predicted_Lambda": r.predicted_Lambda, "estimated_Lambda": r.estimated_Lambda,
             "prefactor_rel_error": r.prefactor_rel_error} for r in rows]}, echo
    raise InputError(f"unknown task {task}")


def build_parser():
    p = argparse.ArgumentParser(
        prog="forest-spectra",
        description="Determinants, minors, characteristic polynomials, eigenvectors and "
                    "asymptotic spectra as signless sums over rooted spanning forests.")
    p.add_argument("--task", required=True, choices=TASKS)
    p.add_argument("--mode", default="exact", choices=MODES)
    p.add_argument("--input", help="matrix file (JSON or CSV) or tropical rate file (JSON)")
    p.add_argument("--output", help="write the report here instead of stdout")
    p.add_argument("--roots", help="1-based indices struck out for --task minor, e.g. 1,3")
    p.add_argument("--n", type=int, help="1-based row / pivot index")
    p.add_argument("--m", type=int, help="1-based column index")
    p.add_argument("--lambda", dest="lam", help="eigenvalue (rational or float literal)")
    p.add_argument("--eps", help="decreasing eps values for --task validate, e.g. 0.1,0.05")
    p.add_argument("--transpose", action="store_true", help="left eigenvector (of G^T)")
    p.add_argument("--include-zero-arcs", action="store_true",
                   help="enumerate forests through zero-weight arcs too (sums are unchanged)")
    p.add_argument("--max-n", type=int, default=12, help="refuse larger inputs (default 12)")
    p.add_argument("--reference-orders",
                   help="expected coefficient orders k=0..N to compare against (tropical-spectrum)")
    p.add_argument("--eig-method", default="forest", choices=("forest", "dense"),
                   help="eigenvalue route for --task validate")
    p.add_argument("--count", type=int, default=20, help="matrices for --task selftest")
    p.add_argument("--seed", type=int, default=0, help="seed for --task selftest")
    p.add_argument("--no-timing", action="store_true",
                   help="report elapsed_ms as null so repeated runs are byte-identical")
    return p


def _emit(report, path):
    text = json.dumps(report, indent=2, ensure_ascii=False) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    notes = []
    report = {"task": args.task, "mode": args.mode}
    try:
        n, result, echo = run_task(args, notes)
        code = 0
        report.update({"n": n, "result": result})
    except ForestSpectraError as exc:
        code = 1 if isinstance(exc, InputError) else 2
        report["error"] = {"kind": exc.kind, "message": str(exc)}
        echo = None
    except ZeroDivisionError as exc:
        code = 2
        report["error"] = {"kind": "computation_error", "message": str(exc)}
        echo = None
    report["elapsed_ms"] = None if args.no_timing else round((time.perf_counter() - start) * 1e3, 3)
    if echo is not None:
        report["input_echo"] = echo
    if notes:
        report["notes"] = notes
    _emit(report, args.output)
    return code


if __name__ == "__main__":
    sys.exit(main())
