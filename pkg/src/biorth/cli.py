"""``biorth`` command line.

Every subcommand writes one report envelope (JSON or CSV) to ``--out`` or
stdout. Exit codes: 0 success, 1 a checked inequality or certification
failed, 2 bad input or usage.
"""

import argparse
import math
import sys
from dataclasses import asdict

import numpy as np

from . import __version__
from .errors import BiorthError, Finding, InputError
from .fileio import matrix_to_json, parse_coefficients, parse_frequencies, read_matrix
from .grid import (
    COROLLARY_KINDS,
    Grid,
    corollary_report,
    default_grid_size,
    dirichlet_audit,
    lebesgue_constant,
    lebesgue_resolution,
    lebesgue_sweep,
    maximal_data,
    salem_bounds,
    salem_pair,
    trig_system,
)
from .linalg import DEFAULT_COND_CAP
from .pairs import DEFAULT_CERT_TOL, certify, check_biorthogonal, dual_basis, inequality_functional, matrix_pair
from .proof import SLACK_TOL, chain_check, menshov_level, random_configuration, random_unitary
from .report import ReportEnvelope, emit_plot, emit_report
from .search import FloorAudit, SearchConfig, constant_table, search, theorem_cap

LEBESGUE_REFERENCE_SLOPE = 4 / math.pi**2
TABLE_COLUMNS = {
    "lebesgue": ["m", "N", "lebesgue"],
    "constants": ["n", "f_best", "ln_n", "c_empirical"],
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(f"{self.prog}: {message}")


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not (value > 0 and math.isfinite(value)):
        raise argparse.ArgumentTypeError(f"expected a positive finite number, got {text}")
    return value


def _pair_payload(pair):
    forward = inequality_functional(pair)
    swapped = inequality_functional(pair.swapped())
    out = forward.as_dict()
    out["residual"] = pair.residual
    out["swapped"] = swapped.as_dict()
    return out


# ---------------------------------------------------------------- subcommands


def cmd_dual(args):
    V = read_matrix(args.file)
    W = dual_basis(V, cond_cap=args.cond_cap)
    check = check_biorthogonal(V, W, args.cert_tol)
    payload = {
        "n": int(V.shape[0]),
        "dim": int(V.shape[1]),
        "residual": check.residual,
        "certified": check.passed,
        "dual": matrix_to_json(W),
    }
    if not check.passed:
        return payload, "violation"
    return payload, "ok"


def cmd_ineq(args):
    V = read_matrix(args.file)
    if args.dual is not None:
        W = read_matrix(args.dual)
        if W.shape != V.shape:
            raise InputError(f"{args.dual}: fields 'rows'/'cols' must match {args.file} ({V.shape[0]} x {V.shape[1]})")
    else:
        W = dual_basis(V, cond_cap=args.cond_cap)
    return _pair_payload(certify(V, W, args.cert_tol)), "ok"


def cmd_matrix(args):
    A = read_matrix(args.file)
    if A.shape[0] != A.shape[1]:
        raise InputError(f"{args.file}: fields 'rows' and 'cols' must be equal for a square matrix")
    return _pair_payload(matrix_pair(A, cond_cap=args.cond_cap, tol=args.cert_tol)), "ok"


def cmd_lebesgue(args):
    ms = args.m if args.m else [2**k for k in range(4, 13)]
    if any(m < 1 for m in ms):
        raise InputError("--m values must be >= 1")
    rows, slope, intercept = lebesgue_sweep(ms, args.factor)
    status = "ok"
    for row in rows:
        if args.richardson:
            fine = lebesgue_constant(row["m"], 2 * row["N"])
            row["lebesgue_2N"] = fine
            row["richardson_rel"] = abs(fine - row["lebesgue"]) / row["lebesgue"]
        if args.audit:
            audit = dirichlet_audit(row["m"])
            row["peak_excess"] = audit.peak_excess
            row["kappa"] = audit.kappa
            if audit.peak_excess > 1e-9 * (2 * row["m"] + 1) or audit.kappa > math.pi * (1 + 1e-12):
                status = "violation"
    payload = {
        "rows": rows,
        "slope": slope,
        "intercept": intercept,
        "reference_slope": LEBESGUE_REFERENCE_SLOPE,
        "slope_rel_error": None if slope is None else abs(slope - LEBESGUE_REFERENCE_SLOPE) / LEBESGUE_REFERENCE_SLOPE,
    }
    if args.plot:
        series = {"lebesgue": ([math.log(r["m"]) for r in rows], [r["lebesgue"] for r in rows])}
        emit_plot(series, args.plot, title="Lebesgue constants", xlabel="ln m", ylabel="||D_m||_1")
    return payload, status


def _system_args(args, default_n=None):
    freqs = parse_frequencies(args.freqs)
    a = parse_coefficients(args.coeffs)
    if freqs is None:
        n = args.n if args.n is not None else (a.size if a is not None else default_n)
        if n is None:
            raise InputError("need --n, --freqs or --coeffs")
        freqs = np.arange(1, n + 1)
    if a is None:
        a = np.ones(freqs.size)
    if a.size != freqs.size:
        raise InputError(f"--coeffs has {a.size} entries but there are {freqs.size} frequencies")
    N = args.grid if args.grid is not None else default_grid_size(int(np.abs(freqs).max()))
    return a, freqs, N


def cmd_maximal(args):
    a, freqs, N = _system_args(args)
    h = trig_system(freqs, Grid(N))
    data = maximal_data(a, h)
    partial_l1 = data.partial_l1()
    payload = {
        "n": int(freqs.size),
        "N": int(N),
        "M_n": data.M,
        "maximal_l1": data.smax_l1,
        "max_partial_l1": float(partial_l1.max()),
        "partial_l1": partial_l1,
    }
    return payload, "ok"


def cmd_salem(args):
    a, freqs, N = _system_args(args)
    h = trig_system(freqs, Grid(N))
    data = maximal_data(a, h)
    pair = salem_pair(a, h, tol=args.cert_tol, data=data)
    bounds = salem_bounds(a, h, data=data, pair=pair)
    rep = inequality_functional(pair)
    payload = rep.as_dict()
    payload.update(bounds)
    payload.update(
        {
            "N": int(N),
            "residual": pair.residual,
            "M_n": data.M,
            "maximal_l1": data.smax_l1,
            "ratio_to_log": rep.product / rep.lhs if rep.lhs > 0 else None,
        }
    )
    ok = min(bounds.values()) >= -SLACK_TOL
    return payload, "ok" if ok else "violation"


def cmd_corollary(args):
    freqs = parse_frequencies(args.freqs)
    a = parse_coefficients(args.coeffs)
    if freqs is None and a is None and args.n is None:
        raise InputError("need --n, --freqs or --coeffs")
    rep = corollary_report(args.kind, a=a, freqs=freqs, n=args.n, N=args.grid)
    return rep.as_dict(), "ok" if rep.holds else "violation"


def cmd_proofchain(args):
    cfg = random_configuration(args.n, args.grid, args.seed)
    rep = chain_check(cfg.F, cfg.pair, cfg.G, cfg.stopping)
    payload = rep.as_dict()
    payload["seed"] = args.seed
    return payload, "ok" if rep.ok() else "violation"


def cmd_menshov(args):
    _, freqs, N = _system_args(args)
    F = trig_system(freqs, Grid(N))
    if args.mix_seed is not None:
        F = F.mixed(random_unitary(F.n, np.random.default_rng(args.mix_seed)))
    return asdict(menshov_level(F)), "ok"


def _search_config(args, n):
    return SearchConfig(
        n=n, restarts=args.restarts, budget=args.budget, seed=args.seed, field=args.field
    ).validate()


def cmd_search(args):
    config = _search_config(args, args.n)
    audit = FloorAudit(theorem_cap()) if args.audit else None
    result = search(config, monitor=audit.monitor("search") if audit else None)
    payload = result.as_dict()
    status = "ok"
    if audit is not None:
        audit.observe(config.n, result.f_best, "best")
        payload["floor_audit"] = audit.summary()
        if audit.n_violations:
            status = "violation"
    return payload, status


def cmd_constants(args):
    for n in args.ns:
        _search_config(args, n)
    rows = constant_table(args.ns, _search_config(args, max(args.ns)))
    return {"rows": rows}, "ok"


# ---------------------------------------------------------------- parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json", help="report format")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--cert-tol", type=_positive_float, default=DEFAULT_CERT_TOL, help="bi-orthogonality tolerance")
    common.add_argument("--cond-cap", type=_positive_float, default=DEFAULT_COND_CAP, help="condition-number cap")

    parser = _Parser(prog="biorth", description="Numerical checks for bi-orthogonal systems and their partial sums.")
    parser.add_argument("--version", action="version", version=f"biorth {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        p.set_defaults(func=func)
        return p

    p = add("dual", cmd_dual, "dual basis of a vector set file")
    p.add_argument("file")

    p = add("ineq", cmd_ineq, "inequality functional for a vector set and its dual")
    p.add_argument("file")
    p.add_argument("--dual", default=None, help="file with the partner vectors (default: dual basis)")

    p = add("matrix", cmd_matrix, "pair built from the columns of A and the rows of A^-1")
    p.add_argument("file")

    p = add("lebesgue", cmd_lebesgue, "Lebesgue constants and their growth against ln m")
    p.add_argument("--m", type=_positive_int, nargs="+", default=None, help="orders (default 16, 32, ..., 4096)")
    p.add_argument("--factor", type=_positive_int, default=64, help="grid points per 2m+1")
    p.add_argument("--richardson", action="store_true", help="recompute on a doubled grid")
    p.add_argument("--audit", action="store_true", help="check the pointwise Dirichlet bounds")
    p.add_argument("--plot", default=None, help="SVG path for the growth plot")

    def system_flags(p):
        p.add_argument("--n", type=_positive_int, default=None, help="use frequencies 1..n")
        p.add_argument("--freqs", default=None, help="JSON array of integer frequencies (or file)")
        p.add_argument("--coeffs", default=None, help="JSON array of coefficients, numbers or [re, im] (or file)")
        p.add_argument("--grid", type=_positive_int, default=None, help="number of grid points")

    system_flags(add("maximal", cmd_maximal, "maximal partial sum of a trigonometric expansion"))
    system_flags(add("salem", cmd_salem, "Salem-type pair built from the maximal function"))

    p = add("corollary", cmd_corollary, "L^1 corollaries of the inequality")
    p.add_argument("--kind", choices=COROLLARY_KINDS, required=True)
    system_flags(p)

    p = add("proofchain", cmd_proofchain, "evaluate every step of the lower-bound argument")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--grid", type=_positive_int, default=4096)
    p.add_argument("--seed", type=int, default=0)

    p = add("menshov", cmd_menshov, "level exceeded by the maximal partial sum on a quarter of the grid")
    system_flags(p)
    p.add_argument("--mix-seed", type=int, default=None, help="mix the system with a random unitary")

    def search_flags(p):
        p.add_argument("--restarts", type=_positive_int, default=4)
        p.add_argument("--budget", type=_positive_int, default=4000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--field", choices=("real", "complex"), default="real")

    p = add("search", cmd_search, "search for matrices with a small product")
    p.add_argument("--n", type=_positive_int, required=True)
    search_flags(p)
    p.add_argument("--audit", action="store_true", help="flag evaluated matrices above the calibrated cap")

    p = add("constants", cmd_constants, "table of empirical constants over n")
    p.add_argument("--ns", type=_positive_int, nargs="+", required=True)
    search_flags(p)
    return parser


def _parameters(args):
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def _write(data, out):
    if out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        with open(out, "wb") as fh:
            fh.write(data)


def run_command(argv=None):
    """Parse ``argv``, run the subcommand and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)

    params = _parameters(args)
    try:
        payload, status = args.func(args)
        code = 1 if status == "violation" else 0
    except Finding as exc:
        payload, status, code = {"error": str(exc)}, "violation", 1
        print(f"finding: {exc}", file=sys.stderr)
    except (BiorthError, ValueError) as exc:
        payload, status, code = {"error": str(exc)}, "error", 2
        print(f"error: {exc}", file=sys.stderr)

    env = ReportEnvelope(args.subcommand, params, payload, status, __version__)
    try:
        _write(emit_report(env, args.format, TABLE_COLUMNS.get(args.subcommand)), args.out)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
        return 2
    return code


def main():
    sys.exit(run_command())


if __name__ == "__main__":
    main()
