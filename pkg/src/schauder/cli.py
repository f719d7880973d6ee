"""Command-line interface.

Exit codes: 0 success, 1 a verification or bound check failed, 2 bad input
(including an undefined roughness estimate).
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import bounds, constants, matrices
from .estimator import estimate, generation_mass, reconstruct_F, reconstruct_f, roughness_robust, truncate
from .exceptions import UndefinedEstimateError, ValidationError
from .generators import FunctionSpec, TakagiSpec, sample_F
from .io import format_float, read_samples, result_to_csv, result_to_json, rows_to_csv, samples_to_csv

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2

# reference log10 |det Psi_n| values and the tolerance each is held to
REFERENCE_LOG10_DET = {2: (-4.97, 0.02), 3: (-13.4, 0.05), 4: (-33.9, 0.1), 5: (-82.03, 0.3), 6: (-192.81, 0.5)}


def parse_function_spec(text: str) -> FunctionSpec:
    """``sin``, ``cos[:amplitude]``, ``poly:a0,a1,...`` (coefficients of f),
    ``takagi:c0,c1,...`` or ``geometric:ratio[,M]`` (Takagi with ``c_m = ratio^m``)."""
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    try:
        numbers = [float(x) for x in rest.split(",")] if rest.strip() else []
    except ValueError:
        raise ValidationError(f"cannot parse numbers in function spec {text!r}") from None
    if kind == "sin" and not numbers:
        return FunctionSpec.sin_pi()
    if kind == "cos" and len(numbers) <= 1:
        return FunctionSpec.cos_pi(numbers[0] if numbers else 1.0)
    if kind == "poly" and numbers:
        return FunctionSpec.poly(numbers)
    if kind == "takagi" and numbers:
        return FunctionSpec.takagi(numbers)
    if kind == "geometric" and 1 <= len(numbers) <= 2:
        M = int(numbers[1]) if len(numbers) == 2 else 40
        return FunctionSpec("takagi", {"spec": TakagiSpec.geometric(numbers[0], M)})
    raise ValidationError(f"unrecognised function spec {text!r}")


def _emit(text: str, out_path):
    if out_path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _load(args):
    return read_samples(sys.stdin if args.input == "-" else args.input)


def cmd_sample(args):
    spec = parse_function_spec(args.spec)
    _emit(samples_to_csv(sample_F(spec, args.level)), args.out)
    return EXIT_OK


def cmd_estimate(args):
    samples = _load(args)
    if args.n is not None and samples.level != args.n + 1:
        raise ValidationError(f"--n {args.n} needs 2^{args.n + 1} + 1 rows, got {len(samples.values)}")
    result = estimate(samples, args.f0)
    if args.truncate:
        result = truncate(result)
    text = result_to_json(result) if args.format == "json" else result_to_csv(result)
    _emit(text, args.out)
    return EXIT_OK


def cmd_roughness(args):
    samples = _load(args)
    if args.n is not None and samples.level != args.n + 2:
        raise ValidationError(f"--n {args.n} needs 2^{args.n + 2} + 1 rows, got {len(samples.values)}")
    n = samples.level - 2
    try:
        value = roughness_robust(samples, args.f0)
    except UndefinedEstimateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    mass = generation_mass(samples, args.f0)
    _emit(rows_to_csv(["n", "roughness", "generation_l2_norm"], [[n, value, mass]]), args.out)
    return EXIT_OK


def instability_traces(n: int, f0_values, extra_levels: int = 7):
    """Fine-grid traces of ``F``, ``f`` and the reconstructions for ``F = 1 - cos(pi t)``."""
    spec = FunctionSpec.cos_pi()
    level = n + 1 + extra_levels
    t = np.arange(2**level + 1) / 2.0**level
    traces = {"t": t, "F": spec.F(t), "f": spec.f(t)}
    samples = sample_F(spec, n + 1)
    for f0 in f0_values:
        result = estimate(samples, f0)
        label = format_float(f0)
        traces[f"F_hat_f0={label}"] = reconstruct_F(result, samples.values[0])(t)
        traces[f"f_hat_f0={label}"] = reconstruct_f(result)(t)
    return traces


def cmd_demo_instability(args):
    traces = instability_traces(args.n, args.f0)
    header = list(traces)
    text = "".join(
        f"# max|f_hat - f| at f0={format_float(f0)}: {format_float(np.max(np.abs(traces[f'f_hat_f0={format_float(f0)}'] - traces['f'])))}\n"
        for f0 in args.f0
    )
    text += rows_to_csv(header, zip(*(traces[h] for h in header)))
    _emit(text, args.out)
    if args.plot:
        from .plotting import plot_instability

        plot_instability(traces, args.plot)
    return EXIT_OK


def cmd_verify(args):
    if not 1 <= args.n_max <= 8:
        raise ValidationError("--n-max must lie in 1..8")
    rows = []
    for report in matrices.verify_all(args.n_max):
        for check in report.checks:
            rows.append(["identity", report.n, check.name, check.gap, check.tol, "PASS" if check.passed else "FAIL"])
    for n in range(2, min(args.n_max, 6) + 1):
        for m in range(-1, n + 1):
            for p in constants.NORMS:
                rep = matrices.norm_report(n, m, p)
                tol = 1e-8 if p == 2 else 1e-10
                rows.append(["norm", n, f"Rbar_{m} P_n p={p}", rep.relative_gap, tol, "PASS" if rep.relative_gap < tol else "FAIL"])
        lower, upper = constants.l2_final_bracket(n)
        value = matrices.operator_norm(matrices.error_map(n, n), 2)
        inside = lower - 1e-9 <= value <= upper + 1e-9
        rows.append(["bracket", n, "l2 final generation", value, upper - lower, "PASS" if inside else "FAIL"])
    _emit(rows_to_csv(["kind", "n", "check", "gap", "tol", "status"], rows), args.out)
    return EXIT_OK if all(r[-1] == "PASS" for r in rows) else EXIT_FAILED


def dettable_rows(n_values=range(1, 7)):
    rows = []
    for n in n_values:
        value, sign = matrices.log10_det_Psi(n)
        reference, tol = REFERENCE_LOG10_DET.get(n, (None, None))
        status = "" if reference is None else ("PASS" if abs(value - reference) <= tol else "FAIL")
        rows.append({"n": n, "computed": value, "sign": sign, "reference": reference, "tol": tol, "status": status})
    return rows


def cmd_dettable(args):
    rows = dettable_rows()
    table = [[r["n"], r["computed"], r["sign"], "" if r["reference"] is None else r["reference"], "" if r["tol"] is None else r["tol"], r["status"]] for r in rows]
    _emit(rows_to_csv(["n", "log10_abs_det", "sign", "reference", "tol", "status"], table), args.out)
    if args.plot:
        from .plotting import plot_dettable

        plot_dettable(rows, args.plot)
    return EXIT_OK if all(r["status"] != "FAIL" for r in rows) else EXIT_FAILED


def cmd_bounds(args):
    spec = parse_function_spec(args.spec)
    report = bounds.check_upper_bounds(spec, args.n, args.p)
    rows = [
        [r.kind, r.m, "inf" if r.p == math.inf else r.p, r.measured, r.bound, r.slack, "PASS" if r.holds else "FAIL"]
        for r in report.rows
    ]
    _emit(rows_to_csv(["kind", "m", "p", "error", "bound", "slack", "status"], rows), args.out)
    return EXIT_OK if report.passed else EXIT_FAILED


def _p_arg(text):
    try:
        return constants.check_p(text if text.lower().startswith("inf") else int(text))
    except (ValueError, ValidationError):
        raise argparse.ArgumentTypeError(f"p must be 1, 2 or inf, got {text!r}") from None


def build_parser():
    parser = argparse.ArgumentParser(prog="schauder", description="Faber-Schauder coefficients from antiderivative samples.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="write F of a test function on a dyadic grid")
    p.add_argument("--spec", required=True, help="sin | cos[:amp] | poly:a0,a1,... | takagi:c0,c1,... | geometric:r[,M]")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("estimate", help="estimate coefficients from a t,F CSV")
    p.add_argument("input", help="CSV path or - for stdin")
    p.add_argument("--n", type=int)
    p.add_argument("--f0", type=float, default=0.0)
    p.add_argument("--truncate", action="store_true", help="drop the final generation")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("roughness", help="roughness exponent from level n+2 samples")
    p.add_argument("input")
    p.add_argument("--n", type=int)
    p.add_argument("--f0", type=float, default=0.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_roughness)

    p = sub.add_parser("demo-instability", help="traces for F = 1 - cos(pi t) under two choices of f0")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--f0", type=float, nargs="+", default=[0.0, 4.0])
    p.add_argument("--out")
    p.add_argument("--plot", metavar="PNG", help="also render the traces to this file")
    p.set_defaults(func=cmd_demo_instability)

    p = sub.add_parser("verify", help="structural identities and operator norms")
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("dettable", help="log10 |det Psi_n| for n = 1..6")
    p.add_argument("--out")
    p.add_argument("--plot", metavar="PNG")
    p.set_defaults(func=cmd_dettable)

    p = sub.add_parser("bounds", help="coefficient error bounds for a test function")
    p.add_argument("--spec", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=_p_arg, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bounds)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
