"""Krylov basis algorithms beyond symmetric Lanczos, with exactness counterparts.

Arnoldi (modified Gram-Schmidt), two-sided nonsymmetric Lanczos, Golub-Kahan
bidiagonalization, block Lanczos with Gram-Schmidt QR, and the GMRES
coordinate-error identity for structured Hessenberg inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fp import ShapeError, matvec, norm2, require_finite, seq_dot
from .problems import LowerBidiagonal, NonsymTridiagonal
from .rational import rat_norm2_sq, rational_lstsq, to_rational_matrix, to_rational_vector


@dataclass(frozen=True)
class ArnoldiResult:
    V: np.ndarray  # n x (k+1), or n x j on breakdown at step j
    H: np.ndarray  # (k+1) x k extended Hessenberg; H[j+1, j] = 0 on breakdown
    breakdown: int | None

    @property
    def k(self) -> int:
        return self.H.shape[1]

    def square(self) -> np.ndarray:
        return self.H[: self.k, :].copy()


def arnoldi(A: np.ndarray, v: np.ndarray, k: int) -> ArnoldiResult:
    """Algorithm: w = A v_j; for i = 1..j: h_{i,j} = v_i^T w, w = w - h_{i,j} v_i;
    h_{j+1,j} = ||w||; stop on exact zero."""
    require_finite(A, "matrix")
    require_finite(v, "starting vector")
    n = A.shape[0]
    if A.shape != (n, n) or len(v) != n:
        raise ShapeError("matrix/vector dimensions do not agree")
    if k > n:
        raise ValueError("k exceeds the dimension")
    nrm = norm2(v)
    if nrm == 0:
        raise ValueError("starting vector is zero")
    V = np.zeros((n, k + 1), dtype=A.dtype)
    H = np.zeros((k + 1, k), dtype=A.dtype)
    V[:, 0] = v / nrm
    breakdown = None
    cols = 1
    for j in range(k):
        w = matvec(A, V[:, j])
        for i in range(j + 1):
            h = seq_dot(V[:, i], w)
            H[i, j] = h
            w = w - h * V[:, i]
        hnext = norm2(w)
        H[j + 1, j] = hnext
        if hnext == 0:
            breakdown = j + 1
            return ArnoldiResult(V[:, : j + 1].copy(), H[: j + 2, : j + 1].copy(), breakdown)
        V[:, j + 1] = w / hnext
        cols = j + 2
    return ArnoldiResult(V[:, :cols].copy(), H, breakdown)


@dataclass(frozen=True)
class NonsymLanczosResult:
    V: np.ndarray
    W: np.ndarray
    alpha: np.ndarray  # alpha_1..alpha_k
    beta: np.ndarray  # beta_2..beta_k (superdiagonal of T_k)
    gamma: np.ndarray  # gamma_2..gamma_k (subdiagonal of T_k)
    gamma1: object  # ||v||
    beta1: object  # w^T v_1
    breakdown: int | None  # step with gamma_{i+1} = 0 (lucky)

    @property
    def k(self) -> int:
        return len(self.alpha)

    def tridiagonal(self) -> NonsymTridiagonal:
        return NonsymTridiagonal(self.alpha.copy(), self.beta.copy(), self.gamma.copy())


class SeriousBreakdownError(RuntimeError):
    """beta_{i+1} = 0 with a nonzero continuation vector: biorthogonalization failed."""


def nonsym_lanczos(A: np.ndarray, v: np.ndarray, w: np.ndarray, k: int) -> NonsymLanczosResult:
    require_finite(A, "matrix")
    require_finite(v, "right starting vector")
    require_finite(w, "left starting vector")
    n = A.shape[0]
    if A.shape != (n, n) or len(v) != n or len(w) != n:
        raise ShapeError("matrix/vector dimensions do not agree")
    if k > n:
        raise ValueError("k exceeds the dimension")
    At = np.ascontiguousarray(A.T)
    gamma1 = norm2(v)
    if gamma1 == 0:
        raise ValueError("right starting vector is zero")
    V = np.zeros((n, k + 1), dtype=A.dtype)
    W = np.zeros((n, k + 1), dtype=A.dtype)
    V[:, 0] = v / gamma1
    beta1 = seq_dot(w, V[:, 0])
    if beta1 == 0:
        raise ValueError("w^T v_1 = 0: the starting pair is biorthogonally degenerate")
    W[:, 0] = w / beta1
    vprev = np.zeros(n, dtype=A.dtype)
    wprev = np.zeros(n, dtype=A.dtype)
    alphas, betas, gammas = [], [], []
    beta_i = beta1
    gamma_i = gamma1
    breakdown = None
    cols = 1
    for i in range(k):
        vi = V[:, i]
        wi = W[:, i]
        Av = matvec(A, vi)
        alpha_i = seq_dot(wi, Av)
        alphas.append(alpha_i)
        vnew = Av - alpha_i * vi
        vnew = vnew - beta_i * vprev
        gamma_next = norm2(vnew)
        if gamma_next == 0:
            breakdown = i + 1
            break
        vnext = vnew / gamma_next
        wnew = matvec(At, wi) - alpha_i * wi
        wnew = wnew - gamma_i * wprev
        beta_next = seq_dot(vnext, wnew)
        if beta_next == 0:
            raise SeriousBreakdownError(f"serious breakdown at step {i + 1}")
        V[:, i + 1] = vnext
        W[:, i + 1] = wnew / beta_next
        gammas.append(gamma_next)
        betas.append(beta_next)
        vprev, wprev = vi, wi
        beta_i, gamma_i = beta_next, gamma_next
        cols = i + 2
    keff = len(alphas)
    return NonsymLanczosResult(
        V=V[:, :cols].copy(),
        W=W[:, :cols].copy(),
        alpha=np.array(alphas, dtype=A.dtype),
        beta=np.array(betas[: keff - 1], dtype=A.dtype),
        gamma=np.array(gammas[: keff - 1], dtype=A.dtype),
        gamma1=gamma1,
        beta1=beta1,
        breakdown=breakdown,
    )


@dataclass(frozen=True)
class GolubKahanResult:
    S: np.ndarray  # left vectors s_1..s_{k+1} (n x cols)
    W: np.ndarray  # right vectors w_1..w_k (m x cols)
    gamma: np.ndarray  # diagonal of L
    delta: np.ndarray  # delta_2.. (subdiagonal of L); delta_1 = ||v|| kept separately
    delta1: object
    breakdown: tuple | None  # ("gamma", i) or ("delta", i) naming the zero coefficient

    @property
    def k(self) -> int:
        return len(self.gamma)

    def bidiagonal(self) -> LowerBidiagonal:
        return LowerBidiagonal(self.gamma.copy(), self.delta.copy())


def golub_kahan(A: np.ndarray, v: np.ndarray, k: int) -> GolubKahanResult:
    """Alternating recurrence gamma_i w_i = A^T s_i - delta_i w_{i-1},
    delta_{i+1} s_{i+1} = A w_i - gamma_i s_i, coefficients by normalization."""
    require_finite(A, "matrix")
    require_finite(v, "starting vector")
    n, m = A.shape
    if len(v) != n:
        raise ShapeError("matrix/vector dimensions do not agree")
    if k > min(n, m):
        raise ValueError("k exceeds the dimension")
    At = np.ascontiguousarray(A.T)
    delta1 = norm2(v)
    if delta1 == 0:
        raise ValueError("starting vector is zero")
    S = np.zeros((n, k + 1), dtype=A.dtype)
    W = np.zeros((m, k), dtype=A.dtype)
    S[:, 0] = v / delta1
    gammas, deltas = [], []
    delta_i = delta1
    breakdown = None
    scols = 1
    wcols = 0
    for i in range(k):
        t = matvec(At, S[:, i])
        if i > 0:
            t = t - delta_i * W[:, i - 1]
        else:
            t = t - delta_i * np.zeros(m, dtype=A.dtype)
        gamma_i = norm2(t)
        if gamma_i == 0:
            breakdown = ("gamma", i + 1)
            break
        W[:, i] = t / gamma_i
        wcols = i + 1
        gammas.append(gamma_i)
        u = matvec(A, W[:, i]) - gamma_i * S[:, i]
        delta_next = norm2(u)
        if delta_next == 0:
            breakdown = ("delta", i + 2)
            break
        deltas.append(delta_next)
        S[:, i + 1] = u / delta_next
        scols = i + 2
        delta_i = delta_next
    kg = len(gammas)
    return GolubKahanResult(
        S=S[:, :scols].copy(),
        W=W[:, :wcols].copy(),
        gamma=np.array(gammas, dtype=A.dtype),
        delta=np.array(deltas[: kg - 1] if kg else [], dtype=A.dtype),
        delta1=delta1,
        breakdown=breakdown,
    )


# ---------------------------------------------------------------------------
# block Lanczos


def gram_schmidt_qr(R: np.ndarray, variant: str = "mgs"):
    """QR of a tall matrix by classical or modified Gram-Schmidt.

    The diagonal of the triangular factor consists of the (nonnegative)
    normalization norms, so the positive-diagonal convention holds without
    sign flips.  A zero pivot signals rank deficiency; the caller treats it
    as breakdown.  Returns (Q, Rfac, zero_pivot_col or None).
    """
    if variant not in ("cgs", "mgs"):
        raise ValueError("variant must be cgs or mgs")
    n, p = R.shape
    Q = np.zeros((n, p), dtype=R.dtype)
    Rf = np.zeros((p, p), dtype=R.dtype)
    for j in range(p):
        w = R[:, j].copy()
        if variant == "cgs":
            coeffs = [seq_dot(Q[:, i], R[:, j]) for i in range(j)]
            for i in range(j):
                Rf[i, j] = coeffs[i]
                w = w - coeffs[i] * Q[:, i]
        else:
            for i in range(j):
                c = seq_dot(Q[:, i], w)
                Rf[i, j] = c
                w = w - c * Q[:, i]
        nrm = norm2(w)
        Rf[j, j] = nrm
        if nrm == 0:
            return Q, Rf, j
        Q[:, j] = w / nrm
    return Q, Rf, None


@dataclass(frozen=True)
class BlockLanczosResult:
    U: tuple  # orthonormal blocks U_1..U_k, each n x p
    M: tuple  # diagonal blocks M_1..M_k
    B: tuple  # subdiagonal blocks B_2..B_k
    breakdown: int | None  # block step whose QR hit a zero pivot

    @property
    def k(self) -> int:
        return len(self.M)


def _block_gemm(A: np.ndarray, X: np.ndarray) -> np.ndarray:
    out = np.empty((A.shape[0], X.shape[1]), dtype=A.dtype)
    for j in range(X.shape[1]):
        out[:, j] = matvec(A, X[:, j])
    return out


def _block_inner(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    out = np.empty((X.shape[1], Y.shape[1]), dtype=X.dtype)
    for i in range(X.shape[1]):
        for j in range(Y.shape[1]):
            out[i, j] = seq_dot(X[:, i], Y[:, j])
    return out


def block_lanczos(A: np.ndarray, U1: np.ndarray, k: int, qr_variant: str = "mgs") -> BlockLanczosResult:
    """Block three-term recurrence R_{i+1} = A U_i - U_i M_i - U_{i-1} B_i^T with
    Gram-Schmidt QR of R_{i+1} and M_{i+1} = U_{i+1}^T A U_{i+1}."""
    require_finite(A, "matrix")
    require_finite(U1, "starting block")
    n, p = U1.shape
    if A.shape != (n, n):
        raise ShapeError("matrix/block dimensions do not agree")
    if n % p:
        raise ValueError("n must be a multiple of the block size")
    if k > n // p:
        raise ValueError("k exceeds the block count")
    Us = [U1.copy()]
    Ms = [_block_inner(U1, _block_gemm(A, U1))]
    Bs = []
    Uprev = U1.copy()
    Bprev = np.zeros((p, p), dtype=A.dtype)  # B_1 = 0, U_0 = U_1 per the recurrence
    breakdown = None
    for i in range(1, k + 1):
        Ui = Us[-1]
        R = _block_gemm(A, Ui) - _block_gemm(Ui, Ms[-1])
        R = R - _block_gemm(Uprev, np.ascontiguousarray(Bprev.T))
        Q, Bi, zero_col = gram_schmidt_qr(R, qr_variant)
        if zero_col is not None:
            breakdown = i  # an invariant block subspace of dimension i*p
            break
        if i == k:
            break
        Us.append(Q)
        Bs.append(Bi)
        Ms.append(_block_inner(Q, _block_gemm(A, Q)))
        Uprev = Ui
        Bprev = Bi
    return BlockLanczosResult(tuple(Us), tuple(Ms), tuple(Bs), breakdown)


# ---------------------------------------------------------------------------
# GMRES on structured inputs


@dataclass(frozen=True)
class GmresResult:
    x: np.ndarray  # computed approximation V_k ybar_k
    y: np.ndarray  # computed coordinates ybar_k
    x_error_norm: float  # ||x_k - xbar_k||, exact coordinates from the rational oracle
    y_error_norm: float  # ||y_k - ybar_k||
    breakdown: int | None


def hessenberg_lstsq(H: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Least squares min ||H y - rhs|| for (m+1) x m Hessenberg H by Givens QR."""
    m = H.shape[1]
    R = H.astype(H.dtype).copy()
    g = rhs.astype(H.dtype).copy()
    dt = H.dtype.type
    for j in range(m):
        a, b = R[j, j], R[j + 1, j]
        if b == 0:
            continue
        t = norm2(np.array([a, b], dtype=H.dtype))
        c = a / t
        s = b / t
        rj = R[j, :].copy()
        rj1 = R[j + 1, :].copy()
        R[j, :] = c * rj + s * rj1
        R[j + 1, :] = c * rj1 - s * rj
        gj = g[j]
        g[j] = c * gj + s * g[j + 1]
        g[j + 1] = c * g[j + 1] - s * gj
    y = np.zeros(m, dtype=H.dtype)
    for i in range(m - 1, -1, -1):
        acc = g[i]
        for j in range(m - 1, i, -1):
            acc = acc - R[i, j] * y[j]
        y[i] = acc / R[i, i]
    return y


def gmres_structured(A: np.ndarray, v: np.ndarray, k: int) -> GmresResult:
    """GMRES iterate x_k = V_k y_k with y_k = argmin ||H_{k+1,k} y - e1|| (x0 = 0,
    ||v|| = 1).  Returns the witness pair (||x_k - xbar_k||, ||y_k - ybar_k||)
    with the exact coordinates computed by a rational least-squares oracle.
    """
    p0 = norm2(v)
    pr = 4 * len(v) * np.finfo(A.dtype).eps / 2
    if abs(float(p0) - 1.0) > pr:
        raise ValueError("starting vector must have unit norm")
    res = arnoldi(A, v, k)
    keff = res.k
    H = res.H  # (keff+1) x keff
    rhs = np.zeros(keff + 1, dtype=A.dtype)
    rhs[0] = A.dtype.type(1.0)
    ybar = hessenberg_lstsq(H, rhs)
    V = res.V[:, :keff]
    xbar = matvec(V, ybar)

    yexact = rational_lstsq(H, rhs)
    dy = [ye - yb for ye, yb in zip(yexact, to_rational_vector(ybar))]
    y_err = float(np.sqrt(float(rat_norm2_sq(dy))))
    Vr = to_rational_matrix(V)
    xexact = [sum(Vr[r][j] * yexact[j] for j in range(keff)) for r in range(len(v))]
    dx = [xe - xb for xe, xb in zip(xexact, to_rational_vector(xbar))]
    x_err = float(np.sqrt(float(rat_norm2_sq(dx))))
    return GmresResult(xbar, ybar, x_err, y_err, res.breakdown)
