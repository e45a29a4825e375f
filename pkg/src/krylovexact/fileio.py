"""Bit-exact text serialization.

Matrix files are plain text: a header line naming the structure and its size,
then whitespace-separated hexadecimal float literals (float.hex format), which
round-trip losslessly.  Entry order is diagonals first, then off-diagonals:

    jacobi <n>           alpha (n), beta (n-1)
    hessenberg <n>       main diagonal (n), subdiagonal (n-1),
                         strict upper triangle row-major
    nonsymtridiag <n>    alpha (n), superdiagonal beta (n-1), subdiagonal gamma (n-1)
    lowerbidiag <n>      diagonal gamma (n), subdiagonal delta (n-1)
    blocktridiag <m> <p> diagonal blocks M_1..M_m row-major, then B_2..B_m
    dense <rows> <cols>  row-major
    vector <n>           n entries

Problem files append `signedperm <n>` (or `signedblockperm <m> <p>`) with
index/sign pairs per column, a `beta1` record, and `gamma1` for nonsymmetric
problems.  An optional leading `precision <name>` record selects binary32;
binary64 is the default.  CSV output prints each value twice, as the shortest
round-trip decimal and as a hex literal.
"""

from __future__ import annotations

import csv

import numpy as np

from .fp import BINARY64, Precision, precision_named, precision_of
from .problems import (
    BlockTridiagonal,
    HessenbergMatrix,
    JacobiMatrix,
    LowerBidiagonal,
    NonsymTridiagonal,
    SignedBlockPermutation,
    SignedPermutation,
    StructuredProblem,
    assemble,
)


class FormatError(ValueError):
    pass


def _hex(x) -> str:
    return float(x).hex()


def _fromhex(tok: str, dt):
    try:
        return dt(float.fromhex(tok))
    except ValueError as e:
        raise FormatError(f"bad float literal {tok!r}") from e


def _matrix_payload(T) -> tuple[str, list]:
    if isinstance(T, JacobiMatrix):
        return f"jacobi {T.n}", list(T.alpha) + list(T.beta)
    if isinstance(T, HessenbergMatrix):
        H = T.entries
        n = T.n
        vals = [H[i, i] for i in range(n)]
        vals += [H[i + 1, i] for i in range(n - 1)]
        for i in range(n):
            vals += [H[i, j] for j in range(i + 1, n)]
        return f"hessenberg {n}", vals
    if isinstance(T, NonsymTridiagonal):
        return f"nonsymtridiag {T.n}", list(T.alpha) + list(T.beta) + list(T.gamma)
    if isinstance(T, LowerBidiagonal):
        return f"lowerbidiag {T.n}", list(T.gamma) + list(T.delta)
    if isinstance(T, BlockTridiagonal):
        vals = []
        for M in T.M:
            vals += list(M.ravel())
        for B in T.B:
            vals += list(B.ravel())
        return f"blocktridiag {T.m} {T.p}", vals
    if isinstance(T, np.ndarray):
        if T.ndim == 1:
            return f"vector {len(T)}", list(T)
        if T.ndim == 2:
            return f"dense {T.shape[0]} {T.shape[1]}", list(T.ravel())
    raise TypeError(f"cannot serialize {type(T).__name__}")


def _emit(out, header: str, vals):
    out.write(header + "\n")
    for start in range(0, len(vals), 6):
        out.write(" ".join(_hex(v) for v in vals[start : start + 6]) + "\n")


def write_matrix(out, T, precision: Precision | None = None):
    if precision is None:
        arr = T if isinstance(T, np.ndarray) else getattr(T, "alpha", None)
        if arr is None:
            arr = T.entries if isinstance(T, HessenbergMatrix) else None
        if arr is None and isinstance(T, LowerBidiagonal):
            arr = T.gamma
        if arr is None and isinstance(T, BlockTridiagonal):
            arr = T.M[0]
        precision = precision_of(arr) if arr is not None else BINARY64
    if precision.name != "binary64":
        out.write(f"precision {precision.name}\n")
    header, vals = _matrix_payload(T)
    _emit(out, header, vals)


class _Tokens:
    """Whitespace token stream over a text file."""

    def __init__(self, f):
        self._it = iter(tok for line in f for tok in line.split())
        self._push = []

    def next(self) -> str:
        if self._push:
            return self._push.pop()
        try:
            return next(self._it)
        except StopIteration:
            raise FormatError("unexpected end of file") from None

    def peek(self) -> str | None:
        if not self._push:
            try:
                self._push.append(next(self._it))
            except StopIteration:
                return None
        return self._push[-1]

    def ints(self, k: int) -> list[int]:
        out = []
        for _ in range(k):
            tok = self.next()
            try:
                out.append(int(tok))
            except ValueError:
                raise FormatError(f"expected an integer, got {tok!r}") from None
        return out

    def floats(self, k: int, dt) -> np.ndarray:
        return np.array([_fromhex(self.next(), dt) for _ in range(k)], dtype=dt)


def _read_structure(tk: _Tokens, precision: Precision):
    dt = precision.dtype
    kind = tk.next()
    if kind == "jacobi":
        (n,) = tk.ints(1)
        return JacobiMatrix(tk.floats(n, dt), tk.floats(n - 1, dt))
    if kind == "hessenberg":
        (n,) = tk.ints(1)
        H = np.zeros((n, n), dtype=dt)
        diag = tk.floats(n, dt)
        sub = tk.floats(n - 1, dt)
        for i in range(n):
            H[i, i] = diag[i]
        for i in range(n - 1):
            H[i + 1, i] = sub[i]
        for i in range(n):
            for j in range(i + 1, n):
                H[i, j] = _fromhex(tk.next(), dt)
        return HessenbergMatrix(H)
    if kind == "nonsymtridiag":
        (n,) = tk.ints(1)
        return NonsymTridiagonal(tk.floats(n, dt), tk.floats(n - 1, dt), tk.floats(n - 1, dt))
    if kind == "lowerbidiag":
        (n,) = tk.ints(1)
        return LowerBidiagonal(tk.floats(n, dt), tk.floats(n - 1, dt))
    if kind == "blocktridiag":
        m, p = tk.ints(2)
        M = tuple(tk.floats(p * p, dt).reshape(p, p) for _ in range(m))
        B = tuple(tk.floats(p * p, dt).reshape(p, p) for _ in range(m - 1))
        return BlockTridiagonal(M, B)
    if kind == "dense":
        r, c = tk.ints(2)
        return tk.floats(r * c, dt).reshape(r, c)
    if kind == "vector":
        (n,) = tk.ints(1)
        return tk.floats(n, dt)
    raise FormatError(f"unknown structure kind {kind!r}")


def read_matrix(f):
    tk = _Tokens(f)
    precision = BINARY64
    if tk.peek() == "precision":
        tk.next()
        precision = precision_named(tk.next())
    return _read_structure(tk, precision)


def _read_signedperm(tk: _Tokens):
    kind = tk.next()
    if kind == "signedperm":
        (n,) = tk.ints(1)
        pairs = tk.ints(2 * n)
        return SignedPermutation(np.array(pairs[0::2]), np.array(pairs[1::2]))
    if kind == "signedblockperm":
        m, p = tk.ints(2)
        block_perm = np.array(tk.ints(m))
        blocks = []
        for _ in range(m):
            pairs = tk.ints(2 * p)
            blocks.append(SignedPermutation(np.array(pairs[0::2]), np.array(pairs[1::2])))
        return SignedBlockPermutation(block_perm, tuple(blocks))
    raise FormatError(f"expected a signed permutation record, got {kind!r}")


def write_problem(out, prob: StructuredProblem):
    precision = precision_of(prob.A)
    if precision.name != "binary64":
        out.write(f"precision {precision.name}\n")
    header, vals = _matrix_payload(prob.T)
    _emit(out, header, vals)
    P = prob.P
    if isinstance(P, SignedBlockPermutation):
        out.write(f"signedblockperm {P.m} {P.p}\n")
        out.write(" ".join(str(i) for i in P.block_perm) + "\n")
        for blk in P.blocks:
            out.write(" ".join(f"{r} {s}" for r, s in zip(blk.perm, blk.signs)) + "\n")
    else:
        out.write(f"signedperm {P.n}\n")
        for r, s in zip(P.perm, P.signs):
            out.write(f"{r} {s}\n")
    out.write(f"beta1 {_hex(prob.beta1)}\n")
    if prob.gamma1 is not None:
        out.write(f"gamma1 {_hex(prob.gamma1)}\n")


def read_problem(f) -> StructuredProblem:
    tk = _Tokens(f)
    precision = BINARY64
    if tk.peek() == "precision":
        tk.next()
        precision = precision_named(tk.next())
    T = _read_structure(tk, precision)
    P = _read_signedperm(tk)
    if tk.next() != "beta1":
        raise FormatError("expected a beta1 record")
    beta1 = _fromhex(tk.next(), precision.dtype)
    gamma1 = None
    if tk.peek() == "gamma1":
        tk.next()
        gamma1 = _fromhex(tk.next(), precision.dtype)
    return assemble(T, P, beta1, gamma1=gamma1)


# ---------------------------------------------------------------------------
# CSV


def _decimal(x) -> str:
    return repr(float(x))


def write_metric_csv(out, series):
    w = csv.writer(out)
    w.writerow(["experiment", "k", "metric", "value", "value_hex"])
    for k, name, value, hx in series.rows:
        w.writerow([series.experiment, k, name, _decimal(value), hx])


def write_reports_csv(out, reports):
    w = csv.writer(out)
    w.writerow(["algorithm", "n", "seed", "precision", "projected_match", "basis_match", "breakdown_match", "mismatch"])
    for r in reports:
        w.writerow([r.algorithm, r.n, r.seed, r.precision, int(r.projected_match), int(r.basis_match), int(r.breakdown_match), r.mismatch or ""])


def write_matrix_summary_csv(out, T):
    """CSV summary of a structure: one row per stored entry."""
    header, vals = _matrix_payload(T)
    parts = header.split()
    w = csv.writer(out)
    w.writerow(["kind", "dims", "index", "value", "value_hex"])
    dims = "x".join(parts[1:])
    for i, v in enumerate(vals):
        w.writerow([parts[0], dims, i, _decimal(v), _hex(v)])


def write_vector_csv(out, name: str, x: np.ndarray):
    w = csv.writer(out)
    w.writerow(["name", "index", "value", "value_hex"])
    for i, v in enumerate(x):
        w.writerow([name, i, _decimal(v), _hex(v)])
