"""Command-line interface.

Exit codes: 0 = success and all requested checks passed, 1 = a correctness
check failed (first mismatch is printed), 2 = usage or I/O error.
"""

from __future__ import annotations

import argparse
import io
import sys
from fractions import Fraction

import numpy as np

from . import fileio
from .cg import cg_hs, cglanczos
from .fp import NonFiniteError, RangeError, ShapeError, precision_named
from .harness import (
    SWEEP_ALGORITHMS,
    compare_structured,
    exactness_sweep,
    experiment_fig2,
    experiment_fig3,
    sqrt_square_violations,
    sweep_failures,
)
from .krylov_general import arnoldi, block_lanczos, gmres_structured, golub_kahan, nonsym_lanczos
from .lanczos import lanczos
from .problems import (
    assemble,
    detect_structure,
    prescribe_cg_curves,
    random_block_tridiagonal,
    random_convergence_curves,
    random_hessenberg,
    random_jacobi,
    random_lower_bidiagonal,
    random_nonsym_tridiagonal,
    random_signed_permutation,
    random_structured_problem,
    strakos_spectrum,
)
from .rational import float_of, rational_cg


def _add_precision(p):
    p.add_argument("--precision", choices=["binary64", "binary32"], default="binary64")


def _build_parser():
    ap = argparse.ArgumentParser(prog="krylovexact", description="Krylov recurrences with bit-level exactness checks")
    sub = ap.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate matrices, vectors, and structured problems")
    gen.add_argument("what", choices=["jacobi", "hessenberg", "nonsymtridiag", "lowerbidiag", "blocktridiag", "signedperm", "strakos", "structured"])
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--p", type=int, default=1, help="block size (blocktridiag, structured blocktridiag)")
    gen.add_argument("--spd", action="store_true", help="shift the diagonal to force positive definiteness (jacobi)")
    gen.add_argument("--kind", choices=["jacobi", "hessenberg", "nonsymtridiag", "lowerbidiag", "blocktridiag"], default="jacobi", help="structure kind for `gen structured`")
    gen.add_argument("--lam1", type=float, default=1e-3)
    gen.add_argument("--lamn", type=float, default=1.0)
    gen.add_argument("--rho", type=float, default=0.7)
    _add_precision(gen)
    gen.add_argument("--out", required=True)

    run = sub.add_parser("run", help="run an algorithm on a matrix or problem file")
    run.add_argument("algorithm", choices=["lanczos", "arnoldi", "bilanczos", "gk", "blocklanczos", "cg-hs", "cglanczos", "gmres"])
    run.add_argument("--problem", required=True, help="matrix or problem file")
    start = run.add_mutually_exclusive_group()
    start.add_argument("--e1", action="store_true", help="start from beta1 * e1")
    start.add_argument("--v-file", help="read the starting vector from a file")
    run.add_argument("--beta1", type=float, default=1.0, help="scale for --e1")
    run.add_argument("--w-file", help="left starting vector file (bilanczos on matrix files)")
    run.add_argument("--k", type=int, default=0, help="number of steps (default: full dimension)")
    run.add_argument("--variant", choices=["mgs", "cgs"], default="mgs")
    run.add_argument("--reorth", choices=["none", "full", "double"], default="none")
    run.add_argument("--qr-variant", choices=["mgs", "cgs"], default="mgs")
    run.add_argument("--check-exact", action="store_true", help="compare bitwise against the structured generator")
    run.add_argument("--out", help="CSV output path")

    chk = sub.add_parser("check", help="run a correctness check")
    chk.add_argument("what", choices=["exactness", "lemma31", "bound52", "structure"])
    chk.add_argument("--algorithm", choices=list(SWEEP_ALGORITHMS), default="lanczos")
    chk.add_argument("--sizes", default="2,10,50", help="comma-separated instance sizes")
    chk.add_argument("--seeds", type=int, default=10, help="number of seeds per size")
    chk.add_argument("--p", type=int, default=1)
    chk.add_argument("--variant", choices=["mgs", "cgs"], default="mgs")
    chk.add_argument("--qr-variant", choices=["mgs", "cgs"], default="mgs")
    chk.add_argument("--samples", type=int, default=1000000)
    chk.add_argument("--seed", type=int, default=0)
    chk.add_argument("--problem", help="matrix file for `check structure`")
    chk.add_argument("--e1", action="store_true")
    chk.add_argument("--beta1", type=float, default=1.0)
    chk.add_argument("--v-file")
    _add_precision(chk)

    exp = sub.add_parser("experiment", help="run an experiment and write its CSV")
    exp.add_argument("what", choices=["fig2", "fig3", "prescribed-curves", "exactness-sweep"])
    exp.add_argument("--n", type=int, default=12)
    exp.add_argument("--seed", type=int, default=0)
    exp.add_argument("--seeds", type=int, default=5)
    exp.add_argument("--out", required=True)

    cnv = sub.add_parser("convert", help="matrix/problem file to CSV summary")
    cnv.add_argument("--in", dest="infile", required=True)
    cnv.add_argument("--out", required=True)
    return ap


def _load_input(path):
    """(A, v, prob_or_None, raw_structure)."""
    with open(path) as f:
        text = f.read()
    if "signedperm" in text or "signedblockperm" in text:
        prob = fileio.read_problem(io.StringIO(text))
        return prob.A, prob.v, prob, prob.T
    T = fileio.read_matrix(io.StringIO(text))
    A = T if isinstance(T, np.ndarray) else T.to_dense()
    return A, None, None, T


def _starting_vector(args, A):
    n = A.shape[0]
    if args.v_file:
        with open(args.v_file) as f:
            v = fileio.read_matrix(f)
        if not isinstance(v, np.ndarray) or v.ndim != 1:
            raise fileio.FormatError("--v-file must contain a vector record")
        return v.astype(A.dtype)
    if args.beta1 <= 0:
        raise ValueError("--beta1 must be positive")
    v = np.zeros(n, dtype=A.dtype)
    v[0] = A.dtype.type(args.beta1)
    return v


def _write_series_csv(path, pairs):
    """pairs: iterable of (name, 1d array)."""
    import csv as _csv

    with open(path, "w", newline="") as f:
        w = _csv.writer(f)
        w.writerow(["name", "index", "value", "value_hex"])
        for name, arr in pairs:
            for i, val in enumerate(np.asarray(arr).ravel()):
                w.writerow([name, i, repr(float(val)), float(val).hex()])


def _cmd_gen(args) -> int:
    precision = precision_named(args.precision)
    n, seed = args.n, args.seed
    if args.what == "structured":
        prob = random_structured_problem(args.kind, n, seed, precision, p=args.p, spd=args.spd)
        with open(args.out, "w") as f:
            fileio.write_problem(f, prob)
        return 0
    if args.what == "jacobi":
        T = random_jacobi(n, seed, spd=args.spd, precision=precision)
    elif args.what == "hessenberg":
        T = random_hessenberg(n, seed, precision=precision)
    elif args.what == "nonsymtridiag":
        T = random_nonsym_tridiagonal(n, seed, precision=precision)
    elif args.what == "lowerbidiag":
        T = random_lower_bidiagonal(n, seed, precision=precision)
    elif args.what == "blocktridiag":
        if n % args.p:
            raise ValueError("--n must be a multiple of --p")
        T = random_block_tridiagonal(n // args.p, args.p, seed, precision=precision)
    elif args.what == "strakos":
        T = strakos_spectrum(n, args.lam1, args.lamn, args.rho, precision)
    elif args.what == "signedperm":
        P = random_signed_permutation(n, seed)
        with open(args.out, "w") as f:
            f.write(f"signedperm {n}\n")
            for r, s in zip(P.perm, P.signs):
                f.write(f"{r} {s}\n")
        return 0
    with open(args.out, "w") as f:
        fileio.write_matrix(f, T, precision)
    return 0


def _cmd_run(args) -> int:
    A, v, prob, T = _load_input(args.problem)
    n = A.shape[0]
    k = args.k or n
    if v is None:
        v = _starting_vector(args, A)
    out_pairs = []
    check_ok = None

    alg = args.algorithm
    if args.check_exact and alg in ("cg-hs", "cglanczos", "gmres"):
        raise ValueError("--check-exact applies to basis algorithms only")
    if alg == "lanczos":
        res = lanczos(A, v, k, variant=args.variant, reorth=args.reorth)
        out_pairs = [("alpha", res.alpha), ("beta", res.beta)]
        if args.check_exact:
            check_ok = _check_against_structure(A, v, prob, "lanczos", args)
    elif alg == "arnoldi":
        res = arnoldi(A, v, k)
        out_pairs = [("H", res.H)]
        if args.check_exact:
            check_ok = _check_against_structure(A, v, prob, "arnoldi", args)
    elif alg == "bilanczos":
        if prob is not None and prob.w is not None:
            w = prob.w
        elif args.w_file:
            with open(args.w_file) as f:
                w = fileio.read_matrix(f).astype(A.dtype)
        else:
            w = v.copy()
        res = nonsym_lanczos(A, v, w, k)
        out_pairs = [("alpha", res.alpha), ("beta", res.beta), ("gamma", res.gamma)]
        if args.check_exact:
            check_ok = _check_against_structure(A, v, prob, "bilanczos", args)
    elif alg == "gk":
        res = golub_kahan(A, v, k)
        out_pairs = [("gamma", res.gamma), ("delta", res.delta)]
        if args.check_exact:
            check_ok = _check_against_structure(A, v, prob, "gk", args)
    elif alg == "blocklanczos":
        if prob is None or prob.U1 is None:
            raise ValueError("blocklanczos needs a structured block problem file")
        res = block_lanczos(A, prob.U1, k if args.k else prob.d, qr_variant=args.qr_variant)
        out_pairs = [(f"M{i + 1}", M) for i, M in enumerate(res.M)]
        out_pairs += [(f"B{i + 2}", B) for i, B in enumerate(res.B)]
        if args.check_exact:
            check_ok = _check_against_structure(A, v, prob, "blocklanczos", args)
    elif alg == "cg-hs":
        tr = cg_hs(A, v, kmax=k)
        out_pairs = [("residual_norm", np.array(tr.residual_norms)), ("x", tr.x[-1])]
    elif alg == "cglanczos":
        tr = cglanczos(A, v, kmax=k)
        out_pairs = [("residual_norm", np.array(tr.residual_norms)), ("x", tr.x[-1])]
    elif alg == "gmres":
        res = gmres_structured(A, v, k)
        out_pairs = [("x", res.x), ("y", res.y), ("x_error_norm", np.array([res.x_error_norm])), ("y_error_norm", np.array([res.y_error_norm]))]

    if args.out:
        _write_series_csv(args.out, out_pairs)
    if check_ok is False:
        return 1
    return 0


def _check_against_structure(A, v, prob, algorithm, args) -> bool:
    if prob is None:
        found = detect_structure(A, v)
        if found is None:
            raise ValueError("input is not a structured (P T P^T, beta1 P e1) pair")
        if algorithm != "lanczos":
            raise ValueError("structure detection supports symmetric tridiagonal inputs only")
        P, T, beta1 = found
        prob = assemble(T, P, beta1)
    report = compare_structured(prob, algorithm, variant=args.variant, qr_variant=args.qr_variant)
    if not report.ok:
        print(f"exactness check FAILED: first mismatch at {report.mismatch}", file=sys.stderr)
        return False
    print("exactness check passed: bitwise match")
    return True


def _cmd_check(args) -> int:
    precision = precision_named(args.precision)
    if args.what == "lemma31":
        bad = sqrt_square_violations(args.samples, precision, args.seed)
        print(f"lemma31: {args.samples} samples, {bad} violations ({precision.name})")
        return 0 if bad == 0 else 1
    if args.what == "exactness":
        sizes = [int(s) for s in args.sizes.split(",") if s]
        reports = exactness_sweep(args.algorithm, sizes, range(args.seeds), (precision,), p=args.p, variant=args.variant, qr_variant=args.qr_variant)
        bad = sweep_failures(reports)
        print(f"exactness[{args.algorithm}]: {len(reports)} instances, {len(bad)} mismatches")
        for r in bad[:5]:
            print(f"  mismatch at {r.mismatch} (n={r.n}, seed={r.seed}, {r.precision})", file=sys.stderr)
        return 0 if not bad else 1
    if args.what == "bound52":
        series = experiment_fig3()
        rel = series.max_value("rel_error")
        aorth = series.max_value("a_orth_loss")
        ok = rel <= 5.6e-13 and aorth <= 1e-13
        print(f"bound52: max relative error {rel:.3e} (limit 5.6e-13), max A-orthogonality loss {aorth:.3e} (limit 1e-13)")
        return 0 if ok else 1
    if args.what == "structure":
        if not args.problem:
            raise ValueError("check structure needs --problem")
        A, v, prob, _ = _load_input(args.problem)
        if v is None:
            v = _starting_vector(args, A)
        found = detect_structure(A, v)
        if found is None:
            print("no structure detected", file=sys.stderr)
            return 1
        P, T, beta1 = found
        print(f"structured: n={T.n}, beta1={float(beta1)!r}")
        return 0
    raise ValueError(f"unknown check {args.what!r}")


def _cmd_experiment(args) -> int:
    if args.what == "fig2":
        series = experiment_fig2()
        with open(args.out, "w", newline="") as f:
            fileio.write_metric_csv(f, series)
        print(f"fig2: max loss of orthogonality {series.max_value('hscg_orth_loss'):.3e}")
        return 0
    if args.what == "fig3":
        series = experiment_fig3()
        with open(args.out, "w", newline="") as f:
            fileio.write_metric_csv(f, series)
        print(f"fig3: max A-orthogonality loss {series.max_value('a_orth_loss'):.3e}, max relative error {series.max_value('rel_error'):.3e}")
        return 0
    if args.what == "prescribed-curves":
        curves = random_convergence_curves(args.n, args.seed)
        system = prescribe_cg_curves(curves)
        trace = rational_cg(system.exact_matrix(), system.exact_rhs())
        prescribed = [Fraction(float(x)) ** 2 for x in curves.residual_norms]
        ok = all(trace.rnorm2[j] == prescribed[j] for j in range(args.n))
        _write_series_csv(args.out, [("residual_norm_sq", np.array([float_of(q) for q in trace.rnorm2]))])
        print(f"prescribed-curves: roundtrip {'exact' if ok else 'MISMATCH'} over {args.n} steps")
        return 0 if ok else 1
    if args.what == "exactness-sweep":
        reports = []
        for alg in SWEEP_ALGORITHMS:
            kw = {}
            if alg == "blocklanczos":
                kw["p"] = 2
            reports += exactness_sweep(alg, (4, 12), range(args.seeds), **kw)
        with open(args.out, "w", newline="") as f:
            fileio.write_reports_csv(f, reports)
        bad = sweep_failures(reports)
        print(f"exactness-sweep: {len(reports)} instances, {len(bad)} mismatches")
        return 0 if not bad else 1
    raise ValueError(f"unknown experiment {args.what!r}")


def _cmd_convert(args) -> int:
    with open(args.infile) as f:
        text = f.read()
    if "signedperm" in text or "signedblockperm" in text:
        T = fileio.read_problem(io.StringIO(text)).T
    else:
        T = fileio.read_matrix(io.StringIO(text))
    with open(args.out, "w", newline="") as f:
        fileio.write_matrix_summary_csv(f, T)
    return 0


def main(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "check":
            return _cmd_check(args)
        if args.command == "experiment":
            return _cmd_experiment(args)
        if args.command == "convert":
            return _cmd_convert(args)
    except (ValueError, TypeError, OSError, ShapeError, RangeError, NonFiniteError, fileio.FormatError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
