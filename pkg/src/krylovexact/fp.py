"""IEEE 754 scalar model, dense containers, and bit-exact comparison utilities.

Vectors and matrices are plain numpy arrays of dtype float64 (binary64) or
float32 (binary32).  Every operation in this module performs one correctly
rounded IEEE 754 operation at a time: no FMA, no extended intermediate
precision, no reassociation.  Sums are strictly sequential left-to-right,
which pins a bitwise-deterministic result for regression testing.

Fast paths below skip terms that are exactly zero.  This is bit-identical
to the naive sequential loop: the accumulator starts at +0, adding a signed
zero to +0 yields +0, and adding a signed zero to a nonzero value leaves it
unchanged.  IEEE addition cannot round a nonzero exact sum to zero, so the
accumulator never becomes -0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class ShapeError(ValueError):
    """Operand dimensions do not agree."""


class NonFiniteError(ValueError):
    """A NaN or infinity reached a public entry point or was produced."""


class RangeError(ValueError):
    """A value violates an exponent-range precondition."""


@dataclass(frozen=True)
class Precision:
    name: str
    dtype: type
    unit_roundoff: float
    # Exponent-range guard for generated off-diagonal coefficients: wide
    # enough that squaring never overflows or hits the subnormal range.
    guard_lo: float
    guard_hi: float

    def scalar(self, x):
        return self.dtype(x)

    def zeros(self, *shape):
        return np.zeros(shape, dtype=self.dtype)

    def in_guard(self, x) -> bool:
        return self.guard_lo <= abs(float(x)) <= self.guard_hi


BINARY64 = Precision("binary64", np.float64, 2.0 ** -53, 2.0 ** -500, 2.0 ** 500)
BINARY32 = Precision("binary32", np.float32, 2.0 ** -24, 2.0 ** -60, 2.0 ** 60)

_BY_DTYPE = {np.dtype(np.float64): BINARY64, np.dtype(np.float32): BINARY32}
_BY_NAME = {"binary64": BINARY64, "binary32": BINARY32}


def precision_named(name: str) -> Precision:
    try:
        return _BY_NAME[name]
    except KeyError:
        raise ValueError(f"unknown precision {name!r}") from None


def precision_of(a) -> Precision:
    dt = np.asarray(a).dtype
    try:
        return _BY_DTYPE[dt]
    except KeyError:
        raise TypeError(f"unsupported dtype {dt}; use float64 or float32") from None


def require_finite(a, what: str = "input"):
    arr = np.asarray(a)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{what} contains a NaN or infinity")
    return arr


def freeze(a: np.ndarray) -> np.ndarray:
    """Mark an array immutable (all containers are read-only after construction)."""
    a.flags.writeable = False
    return a


# ---------------------------------------------------------------------------
# bit-exact comparison


def _bit_view(a: np.ndarray) -> np.ndarray:
    kind = np.uint64 if a.dtype == np.float64 else np.uint32
    return np.ascontiguousarray(a).view(kind)


def first_bit_difference(a, b):
    """Index of the first entry (row-major) where a and b differ bitwise, or None.

    +0 and -0 are distinct; identical NaN payloads compare equal.
    """
    x = np.asarray(a)
    y = np.asarray(b)
    if x.shape != y.shape:
        raise ShapeError(f"shape mismatch: {x.shape} vs {y.shape}")
    if x.dtype != y.dtype:
        raise ShapeError(f"dtype mismatch: {x.dtype} vs {y.dtype}")
    neq = _bit_view(x.ravel()) != _bit_view(y.ravel())
    idx = np.nonzero(neq)[0]
    if idx.size == 0:
        return None
    flat = int(idx[0])
    return np.unravel_index(flat, x.shape) if x.ndim > 0 else ()


def bitwise_equal(a, b) -> bool:
    """True iff every entry of a and b is bit-identical (+0 != -0)."""
    return first_bit_difference(a, b) is None


# ---------------------------------------------------------------------------
# sequential arithmetic kernels


def seq_dot(x: np.ndarray, y: np.ndarray):
    """fl(x^T y) with strictly sequential left-to-right summation.

    Terms with an exactly-zero factor are skipped; see module docstring for
    why this is bit-identical to the naive loop.
    """
    if x.shape != y.shape or x.ndim != 1:
        raise ShapeError(f"dot operands must be equal-length vectors, got {x.shape} and {y.shape}")
    if x.dtype == np.float64:
        acc = 0.0
        for a, b in zip(x.tolist(), y.tolist()):
            if a != 0.0 and b != 0.0:
                acc = acc + a * b
        out = np.float64(acc)
    else:
        acc = np.float32(0.0)
        idx = np.nonzero((x != 0) & (y != 0))[0]
        for i in idx:
            acc = acc + x[i] * y[i]
        out = acc
    if not np.isfinite(out):
        raise NonFiniteError("overflow in dot product")
    return out


def seq_dot_reference(x: np.ndarray, y: np.ndarray):
    """Literal term-by-term fold of fl(sum fl(x_i*y_i)); oracle for seq_dot."""
    p = precision_of(x)
    acc = p.scalar(0.0)
    for i in range(len(x)):
        acc = acc + x[i] * y[i]
    return acc


def norm2(x: np.ndarray):
    """fl(sqrt(fl(sum fl(x_i^2)))) with sequential summation."""
    require_finite(x, "norm2 input")
    if x.dtype == np.float64:
        acc = 0.0
        for a in x.tolist():
            if a != 0.0:
                acc = acc + a * a
        if math.isinf(acc):
            raise NonFiniteError("overflow in sum of squares")
        return np.float64(math.sqrt(acc))
    acc = np.float32(0.0)
    for i in np.nonzero(x)[0]:
        acc = acc + x[i] * x[i]
    if not np.isfinite(acc):
        raise NonFiniteError("overflow in sum of squares")
    return np.sqrt(acc)


def matvec(A: np.ndarray, x: np.ndarray) -> np.ndarray:
    """y_r = fl(sum_c A[r,c] * x[c]), sequential left-to-right per row.

    Columns are accumulated in index order with one elementwise multiply and
    one elementwise add per column, which realizes exactly the per-row
    sequential sum.  A single-nonzero x takes an O(n) shortcut that is
    bit-identical (the trailing `+ 0.0` renormalizes -0 products to +0, as
    accumulation onto the +0 accumulator would).
    """
    if A.ndim != 2 or x.ndim != 1 or A.shape[1] != x.shape[0]:
        raise ShapeError(f"matvec shapes {A.shape} x {x.shape} do not agree")
    require_finite(A, "matrix")
    require_finite(x, "vector")
    dt = A.dtype
    if dt != x.dtype:
        raise ShapeError(f"dtype mismatch: {A.dtype} vs {x.dtype}")
    nz = np.nonzero(x)[0]
    if nz.size == 0:
        return np.zeros(A.shape[0], dtype=dt)
    if nz.size == 1:
        j = nz[0]
        y = A[:, j] * x[j] + dt.type(0.0)
    else:
        y = np.zeros(A.shape[0], dtype=dt)
        for c in nz:
            y = y + A[:, c] * x[c]
    if not np.all(np.isfinite(y)):
        raise NonFiniteError("overflow in matvec")
    return y


def matmat(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Column-by-column matvec product; same sequential-sum semantics."""
    if A.ndim != 2 or B.ndim != 2 or A.shape[1] != B.shape[0]:
        raise ShapeError(f"matmat shapes {A.shape} x {B.shape} do not agree")
    out = np.empty((A.shape[0], B.shape[1]), dtype=A.dtype)
    for j in range(B.shape[1]):
        out[:, j] = matvec(A, B[:, j])
    return out


def frobenius_norm(A: np.ndarray):
    return norm2(np.ascontiguousarray(A).ravel())


# ---------------------------------------------------------------------------
# exact-operation checks


def sqrt_square_roundtrip(alpha, precision: Precision | None = None) -> bool:
    """Whether fl(sqrt(fl(alpha^2))) is bit-identical to |alpha|."""
    if precision is None:
        precision = precision_of(alpha)
    a = precision.scalar(alpha)
    require_finite(a, "alpha")
    with np.errstate(over="ignore"):
        sq = a * a
    if not np.isfinite(sq):
        raise RangeError("alpha^2 overflows")
    if sq != 0 and abs(float(sq)) < _smallest_normal(precision):
        raise RangeError("alpha^2 underflows to the subnormal range")
    back = np.sqrt(sq) if precision is BINARY32 else np.float64(math.sqrt(float(sq)))
    return bitwise_equal(back, abs(a))


def _smallest_normal(p: Precision) -> float:
    return float(np.finfo(p.dtype).smallest_normal)


def exact_op_catalog(alpha, precision: Precision | None = None) -> dict:
    """The five exact identities fl(1*a)=a, fl(-a)=-a, fl(0*a)=0, fl(a-a)=+0, fl(a/a)=1.

    Returns a dict mapping identity name to bool.  fl(a-a) is checked to be
    +0 bitwise; fl(0*a) is checked to be zero-valued (its sign follows the
    sign rule of multiplication).
    """
    if precision is None:
        precision = precision_of(alpha)
    a = precision.scalar(alpha)
    require_finite(a, "alpha")
    one = precision.scalar(1.0)
    zero = precision.scalar(0.0)
    out = {
        "one_times": bitwise_equal(one * a, a),
        "negate": bitwise_equal(-a, precision.scalar(-float(a))),
        "zero_times": (zero * a) == 0,
        "self_minus": bitwise_equal(a - a, zero),
        "self_div": (a / a) == one if a != 0 else True,
    }
    return out
