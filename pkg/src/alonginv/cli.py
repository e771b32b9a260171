"""``alonginv`` command line.

Exit codes: 0 success, 1 usage or input error, 2 the inverse along d does
not exist, 3 numerical non-convergence or breakdown, 4 a verified statement
failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Optional

import numpy as np

from . import representations as reps
from . import suite as suite_mod
from . import theorems
from .classical import make_weights
from .corpus import existence_instance
from .errors import (
    AlongInvError,
    BudgetExceeded,
    ConvergenceError,
    InputError,
    NotInvertible,
    NotInvertibleAlong,
    PreconditionViolated,
    SingularResolvent,
)
from .mary import (
    Method,
    definition_check,
    exists_along,
    inverse_along_block,
    inverse_along_spectral,
    inverse_along_spectral_mirror,
    make_problem,
)
from .numeric import DEFAULT_TOL, Tolerance, matrix_from_json, matrix_to_json, op_norm
from .zn import ZnMatrix, zn_exists_along, zn_mary_inverse

EXIT_OK, EXIT_INPUT, EXIT_NONEXISTENT, EXIT_NONCONVERGED, EXIT_FAILED = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


# -- parsing helpers ----------------------------------------------------------


def _clean(obj):
    """Replace non-finite floats by strings so the output is strict JSON."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.ndarray):
        return matrix_to_json(obj)
    return obj


def _dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True)


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc.msg} at line {exc.lineno}") from exc


def _field_of(obj, default: Optional[str] = None) -> str:
    if isinstance(obj, dict):
        if "field" in obj:
            if obj["field"] not in ("complex", "zn"):
                raise InputError("field 'field' must be \"complex\" or \"zn\"")
            return obj["field"]
        if "modulus" in obj:
            return "zn"
    return default or "complex"


def _matrix(obj, name: str, field: str):
    if obj is None:
        raise InputError(f"missing field {name!r}")
    try:
        if _field_of(obj, field) == "zn":
            return ZnMatrix.from_json(obj)
        return matrix_from_json(obj)
    except InputError as exc:
        raise InputError(f"{name}: {exc}") from exc


def _inputs(args, names=("a", "d")) -> tuple:
    """Matrices from ``--input`` (one object holding all of them) or per-name flags."""
    doc = _load_json(args.input) if getattr(args, "input", None) else {}
    if not isinstance(doc, dict):
        raise InputError("input file must hold a JSON object")
    field = _field_of(doc)
    out = {}
    for name in names:
        path = getattr(args, name, None)
        if path:
            out[name] = _matrix(_load_json(path), name, field)
        elif name in doc:
            out[name] = _matrix(doc[name], name, field)
    fields = {"zn" if isinstance(m, ZnMatrix) else "complex" for m in out.values()}
    if len(fields) > 1:
        raise InputError("cannot mix complex and zn matrices")
    return (fields.pop() if fields else field), out, doc


def _tolerance(args) -> Tolerance:
    return Tolerance(args.tol_rank, args.tol_eq, args.tol_conv)


def _parse_sizes(text: str) -> tuple:
    try:
        if ".." in text:
            lo, hi = text.split("..")
            sizes = tuple(range(int(lo), int(hi) + 1))
        else:
            sizes = tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"--n expects 'lo..hi' or a comma list, got {text!r}") from exc
    if not sizes or min(sizes) < 1:
        raise UsageError("--n needs positive sizes")
    return sizes


def _parse_schedule(text: Optional[str]) -> reps.LimitSchedule:
    if not text:
        return reps.LimitSchedule()
    try:
        values = tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"--t-schedule expects comma separated numbers, got {text!r}") from exc
    return reps.LimitSchedule(values)


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise UsageError(f"--t expects a number such as 2, -1 or 2j, got {text!r}") from exc


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- commands -------------------------------------------------------------------


def _compute_complex(args, mats, tol):
    if "a" not in mats or "d" not in mats:
        raise InputError("compute needs matrices a and d")
    prob = make_problem(mats["a"], mats["d"], mats.get("g"), tol)
    method = Method(args.method)
    if method is Method.BLOCK:
        res = inverse_along_block(prob)
    elif method in (Method.SPECTRAL, Method.SPECTRAL_MIRROR):
        t = _parse_complex(args.t) if args.t is not None else 1.0
        route = inverse_along_spectral if method is Method.SPECTRAL else inverse_along_spectral_mirror
        res = route(prob, t)
    elif method in (Method.LIMIT, Method.LIMIT_MIRROR):
        sched = _parse_schedule(args.t_schedule)
        if args.no_extrapolate:
            sched = reps.LimitSchedule(sched.t_values, extrapolate=False)
        route = reps.inverse_along_limit if method is Method.LIMIT else reps.inverse_along_limit_mirror
        res = route(prob, sched)
        if args.history_csv:
            reps.write_history_csv(res.history, args.history_csv)
    elif method is Method.SERIES:
        if args.beta in (None, "auto"):
            beta = reps.auto_beta(prob)[0]
        else:
            try:
                beta = float(args.beta)
            except ValueError as exc:
                raise UsageError(f"--beta expects a number or 'auto', got {args.beta!r}") from exc
        res = reps.inverse_along_series(prob, reps.SeriesParams(beta, conv_tol=tol.conv_tol))
    else:
        params = reps.QuadParams(panels=args.quad_panels)
        route = reps.inverse_along_integral if method is Method.INTEGRAL else reps.inverse_along_integral_mirror
        res = route(prob, params)
    ok = definition_check(prob.a, prob.d, res.b, tol)
    out = {"field": "complex", **res.to_json(), "definition_check": ok}
    if not ok:
        return out, EXIT_NONCONVERGED
    return out, EXIT_OK


def _compute_zn(args, mats):
    if "a" not in mats or "d" not in mats:
        raise InputError("compute needs matrices a and d")
    a, d = mats["a"], mats["d"]
    b = zn_mary_inverse(a, d, budget=args.budget)
    corner = zn_exists_along(a, d, budget=args.budget)
    out = {
        "field": "zn",
        "method": "brute-force",
        "exists": b is not None,
        "matrix": b.to_json() if b is not None else None,
        "corner_exists": corner.exists,
        "corner_matrix": corner.b.to_json() if corner.b is not None else None,
    }
    return out, (EXIT_OK if b is not None else EXIT_NONEXISTENT)


def cmd_compute(args) -> int:
    field, mats, _ = _inputs(args, ("a", "d", "g"))
    if field == "zn":
        out, code = _compute_zn(args, mats)
    else:
        out, code = _compute_complex(args, mats, _tolerance(args))
    _emit(_dumps(out) + "\n", args.out)
    return code


def cmd_exists(args) -> int:
    field, mats, _ = _inputs(args, ("a", "d", "g"))
    if "a" not in mats or "d" not in mats:
        raise InputError("exists needs matrices a and d")
    if field == "zn":
        rep = zn_exists_along(mats["a"], mats["d"], mats.get("g"), budget=args.budget)
        out = {"field": "zn", "exists": rep.exists, "regular": rep.g is not None}
        if rep.exists:
            out["matrix"] = rep.b.to_json()
    else:
        prob = make_problem(mats["a"], mats["d"], mats.get("g"), _tolerance(args))
        rep = exists_along(prob)
        out = {"field": "complex", "exists": rep.exists, "cond_v": rep.cond_v, "v": rep.v}
        if rep.exists:
            out["w"] = rep.w
    _emit(_dumps(out) + "\n", args.out)
    return EXIT_OK if rep.exists else EXIT_NONEXISTENT


_VERIFY_INPUTS = {
    "th28j": ("a", "d", "s", "r"),
    "th28j-unitary": ("a", "d", "s", "r"),
    "mp-similarity": ("a", "s", "r"),
    "thm28k": ("a", "s", "r"),
    "t29": ("a", "d"),
    "lemma-bound": ("a", "d", "b", "e"),
    "cota": ("a", "b"),
    "remark1": ("a", "d"),
    "weighted-mp": ("a", "m", "n", "z"),
}


def cmd_verify(args) -> int:
    tid = args.theorem
    if tid not in _VERIFY_INPUTS:
        raise UsageError(f"verify supports {', '.join(sorted(_VERIFY_INPUTS))}")
    if not args.input:
        raise UsageError("verify needs --input")
    field, mats, _ = _inputs(args, _VERIFY_INPUTS[tid])
    if field != "complex":
        raise InputError("verify works on complex matrices")
    missing = [k for k in _VERIFY_INPUTS[tid] if k not in mats]
    if missing:
        raise InputError(f"missing field {missing[0]!r}")
    tol = _tolerance(args)
    m = mats
    if tid in ("th28j", "th28j-unitary"):
        rep = theorems.verify_transform(m["a"], m["d"], m["s"], m["r"], tol, theorem_id=tid)
    elif tid == "mp-similarity":
        rep = theorems.verify_mp_similarity(m["a"], m["s"], m["r"], tol)
    elif tid == "thm28k":
        rep = theorems.verify_group_similarity(m["a"], m["s"], m["r"], tol)
    elif tid == "t29":
        rep = theorems.verify_hermitian_products(m["a"], m["d"], tol)
    elif tid == "lemma-bound":
        rep = theorems.perturbation_identity(m["a"], m["d"], m["b"], m["e"], tol)
    elif tid == "cota":
        rep = theorems.verify_cota(m["a"], m["b"], tol)
    elif tid == "remark1":
        rep = theorems.verify_involution(m["a"], m["d"], tol)
    else:
        rep = suite_mod.weighted_mp_verdict(m["a"], make_weights(m["m"], m["n"], tol), m["z"], tol)
    out = rep.to_json()
    out["details"] = {k: v for k, v in rep.details.items() if not isinstance(v, list)}
    _emit(_dumps(out) + "\n", args.out)
    return EXIT_OK if rep.holds else EXIT_FAILED


def _experiment_problem(args, tol):
    if args.input:
        field, mats, _ = _inputs(args, ("a", "d", "g"))
        if field != "complex":
            raise InputError("experiments work on complex matrices")
        if "a" not in mats or "d" not in mats:
            raise InputError("experiment needs matrices a and d")
        return make_problem(mats["a"], mats["d"], mats.get("g"), tol)
    sizes = _parse_sizes(args.n)
    family = "positive" if args.kind in ("series", "integral") else "generic"
    a, d = existence_instance(args.seed, sizes[0], family=family)
    return make_problem(a, d, tol=tol)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def cmd_experiment(args) -> int:
    tol = _tolerance(args)
    kind = args.kind
    if kind == "continuity":
        sizes = _parse_sizes(args.n)
        rep = suite_mod.continuity_verdicts(args.seed, sizes[0], tol, rank_drop=False)[0]
        rows = [(k + 1, e, env) for k, (e, env) in enumerate(zip(rep.details["errors"], rep.details["envelope"]))]
        _emit(_csv(("step", "error", "envelope"), rows), args.out)
        return EXIT_OK if rep.holds else EXIT_FAILED
    prob = _experiment_problem(args, tol)
    if not exists_along(prob).exists:
        raise NotInvertibleAlong("a is not invertible along d")
    if kind == "limit":
        sched = _parse_schedule(args.t_schedule)
        res = reps.inverse_along_limit(prob, reps.LimitSchedule(sched.t_values, extrapolate=False))
        rows = [(h["t"], h["error_vs_block"], h["bound"]) for h in res.history]
        _emit(_csv(("t", "error_vs_block", "bound"), rows), args.out)
    elif kind == "series":
        beta = reps.auto_beta(prob)[0] if args.beta in (None, "auto") else float(args.beta)
        q = reps.contraction_factor(prob, beta)
        if q >= 1:
            raise PreconditionViolated(f"||p - beta dap|| = {q:.6g} >= 1")
        ref = inverse_along_block(prob).b
        rows = []
        for n, total, tnorm in reps.series_partial_sums(prob, beta):
            rows.append((n, op_norm(total - ref), tnorm))
            if tnorm < tol.conv_tol * max(1.0, op_norm(total)) or n >= 100_000:
                break
        _emit(_csv(("n", "error_vs_block", "term_norm"), rows), args.out)
    else:
        res = reps.inverse_along_integral(prob, reps.QuadParams(panels=args.quad_panels))
        ref = inverse_along_block(prob).b
        rows = [(h["panels_per_segment"], h["change"]) for h in res.history]
        rows.append(("final_error", op_norm(res.b - ref)))
        _emit(_csv(("panels_per_segment", "change"), rows), args.out)
    return EXIT_OK


def cmd_suite(args) -> int:
    sizes = _parse_sizes(args.n)
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    unknown = [t for t in (args.theorem or []) if t not in suite_mod.THEOREM_IDS]
    if unknown:
        raise UsageError(f"unknown theorem {unknown[0]!r}; choose from {', '.join(suite_mod.THEOREM_IDS)}")
    bad_rings = [r for r in (args.ring or []) if r not in suite_mod.RINGS]
    if bad_rings:
        raise UsageError(f"unknown ring {bad_rings[0]!r}; choose from {', '.join(suite_mod.RINGS)}")
    counts: dict = {}
    lines = []
    for rep in suite_mod.run_suite(args.seed, sizes, args.trials, args.theorem, args.ring, _tolerance(args)):
        held, total = counts.get(rep.theorem_id, (0, 0))
        counts[rep.theorem_id] = (held + int(rep.holds), total + 1)
        lines.append(_dumps(rep.to_json()))
    held = sum(h for h, _ in counts.values())
    total = sum(t for _, t in counts.values())
    summary = {
        "summary": {
            "holds": held,
            "total": total,
            "all_hold": held == total,
            "by_theorem": {k: {"holds": h, "total": t} for k, (h, t) in counts.items()},
        }
    }
    if args.out:
        _emit("\n".join(lines) + "\n", args.out)
        sys.stdout.write(_dumps(summary) + "\n")
    else:
        _emit("\n".join(lines + [_dumps(summary)]) + "\n", None)
    return EXIT_OK if held == total else EXIT_FAILED


# -- argument parser --------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol-rank", type=float, default=DEFAULT_TOL.rank_tol, help="relative singular value cut-off")
    p.add_argument("--tol-eq", type=float, default=DEFAULT_TOL.eq_tol, help="residual comparison tolerance")
    p.add_argument("--tol-conv", type=float, default=DEFAULT_TOL.conv_tol, help="iteration stopping tolerance")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", help="output file (default stdout)")


def _matrix_inputs(p: argparse.ArgumentParser, names=("a", "d", "g")) -> None:
    p.add_argument("--input", help="JSON object holding the matrices (and optionally \"field\")")
    for name in names:
        p.add_argument(f"--{name}", help=f"JSON file with matrix {name}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="alonginv", description="Inverse of a matrix along another matrix.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="compute a||d by one route")
    _matrix_inputs(p)
    p.add_argument("--method", default="block", choices=[m.value for m in Method])
    p.add_argument("--t", help="nonzero shift for the spectral routes (complex allowed, e.g. 2j)")
    p.add_argument("--beta", help="series step, a nonzero number or 'auto'")
    p.add_argument("--t-schedule", help="comma separated decreasing t values for the limit routes")
    p.add_argument("--no-extrapolate", action="store_true", help="disable Richardson extrapolation")
    p.add_argument("--quad-panels", type=int, default=1, help="initial Gauss-Legendre panels per segment")
    p.add_argument("--history-csv", help="write the limit history (t, error_vs_block, bound) here")
    p.add_argument("--budget", type=int, default=10**7, help="enumeration budget over Z_n")
    _common(p)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("exists", help="existence test through v = dap + 1 - p")
    _matrix_inputs(p)
    p.add_argument("--budget", type=int, default=10**7)
    _common(p)
    p.set_defaults(func=cmd_exists)

    p = sub.add_parser("verify", help="check one statement on given matrices")
    p.add_argument("--theorem", required=True)
    _matrix_inputs(p, ("a", "d", "s", "r", "b", "e", "m", "n", "z"))
    _common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("experiment", help="convergence history as CSV")
    p.add_argument("--kind", required=True, choices=("limit", "series", "integral", "continuity"))
    p.add_argument("--input", help="JSON object with a, d (default: seeded random instance)")
    p.add_argument("--n", default="4", help="size of the seeded instance")
    p.add_argument("--t-schedule")
    p.add_argument("--beta")
    p.add_argument("--quad-panels", type=int, default=1)
    _common(p)
    p.set_defaults(func=cmd_experiment, a=None, d=None, g=None)

    p = sub.add_parser("suite", help="run the seeded verification suite (JSONL verdicts)")
    p.add_argument("--n", default="2..6", help="sizes, 'lo..hi' or comma list")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--theorem", action="append", help="restrict to a theorem id (repeatable)")
    p.add_argument("--ring", action="append", help="restrict to exact-ring checks: z2, z3, z6 (repeatable)")
    _common(p)
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, InputError, BudgetExceeded, PreconditionViolated, NotInvertible) as exc:
        print(f"alonginv: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NotInvertibleAlong as exc:
        print(f"alonginv: {exc}", file=sys.stderr)
        return EXIT_NONEXISTENT
    except (ConvergenceError, SingularResolvent) as exc:
        print(f"alonginv: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except AlongInvError as exc:  # pragma: no cover - every subclass is mapped above
        print(f"alonginv: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
