"""Symmetric Lanczos tridiagonalization with optional reorthogonalization.

The loop below follows the three-term recurrence literally, one rounded
operation at a time: with structured input (P T P^T, beta1 P e1) every
intermediate quantity is reproduced exactly, so the computed basis equals
the signed identity columns and the computed tridiagonal equals T bitwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fp import ShapeError, bitwise_equal, frobenius_norm, matvec, norm2, require_finite, seq_dot
from .problems import JacobiMatrix

VARIANTS = ("mgs", "cgs")
REORTH = ("none", "full", "double")


@dataclass(frozen=True)
class LanczosResult:
    """Basis V (n x k or n x (k+1)), coefficients, and the breakdown index.

    breakdown is the step i at which fl(||z||) = 0 stopped the loop (beta_{i+1}
    exactly +0), or None if the iteration limit was reached first.
    """

    V: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray  # beta_2 .. beta_{k+1}; the trailing entry is 0 on breakdown
    beta1: object
    breakdown: int | None

    @property
    def k(self) -> int:
        return len(self.alpha)

    def tridiagonal(self) -> JacobiMatrix:
        k = self.k
        off = self.beta[: k - 1] if k > 1 else self.beta[:0]
        return JacobiMatrix(self.alpha.copy(), off.copy())


def _reorthogonalize(z, V, upto, passes):
    for _ in range(passes):
        for j in range(upto):
            c = seq_dot(V[:, j], z)
            z = z - c * V[:, j]
    return z


def lanczos(A: np.ndarray, v: np.ndarray, k: int, variant: str = "mgs", reorth: str = "none") -> LanczosResult:
    """Run k steps; stops early when fl(||z||) = 0 (exact breakdown test).

    variant 'mgs' computes w = Av_i - beta_i v_{i-1}, alpha_i = w^T v_i,
    z = w - alpha_i v_i; 'cgs' computes alpha_i = v_i^T (Av_i) and then
    z = Av_i - alpha_i v_i - beta_i v_{i-1}.  reorth 'full' projects z once
    against all previous basis vectors, 'double' twice; the reorthogonalization
    coefficients are discarded.
    """
    require_finite(A, "matrix")
    require_finite(v, "starting vector")
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    if reorth not in REORTH:
        raise ValueError(f"reorth must be one of {REORTH}")
    n = A.shape[0]
    if A.shape != (n, n):
        raise ShapeError("matrix must be square")
    if not bitwise_equal(A, np.ascontiguousarray(A.T)):
        raise ValueError("matrix is not bitwise symmetric")
    if k > n:
        raise ValueError(f"k = {k} exceeds the dimension {n}")
    dt = A.dtype.type

    beta1 = norm2(v)
    if beta1 == 0:
        raise ValueError("starting vector is zero")
    V = np.zeros((n, k + 1), dtype=A.dtype)
    alphas = []
    betas = []
    vprev = np.zeros(n, dtype=A.dtype)  # v_0 = 0; beta_i * v_0 is evaluated, not skipped
    V[:, 0] = v / beta1
    beta_i = dt(0.0)
    breakdown = None
    cols = 1
    for i in range(k):
        vi = V[:, i]
        av = matvec(A, vi)
        if variant == "mgs":
            w = av - beta_i * vprev
            alpha_i = seq_dot(w, vi)
            z = w - alpha_i * vi
        else:
            alpha_i = seq_dot(vi, av)
            z = av - alpha_i * vi
            z = z - beta_i * vprev
        if reorth != "none":
            z = _reorthogonalize(z, V, i + 1, 1 if reorth == "full" else 2)
        alphas.append(alpha_i)
        beta_next = norm2(z)
        betas.append(beta_next)
        if beta_next == 0:
            breakdown = i + 1
            break
        vprev = vi
        V[:, i + 1] = z / beta_next
        beta_i = beta_next
        cols = i + 2
    return LanczosResult(
        V=V[:, :cols].copy(),
        alpha=np.array(alphas, dtype=A.dtype),
        beta=np.array(betas, dtype=A.dtype),
        beta1=beta1,
        breakdown=breakdown,
    )


def lanczos_residual(A: np.ndarray, result: LanczosResult):
    """||A V_k - V_k T_k - beta_{k+1} v_{k+1} e_k^T||_F in working precision."""
    k = result.k
    if k == 0:
        return A.dtype.type(0.0)
    V = result.V[:, :k]
    R = np.empty_like(V)
    alphas = result.alpha
    betas = result.beta
    for j in range(k):
        col = matvec(A, V[:, j])
        col = col - alphas[j] * V[:, j]
        if j > 0:
            col = col - betas[j - 1] * V[:, j - 1]
        if j < k - 1:
            col = col - betas[j] * V[:, j + 1]
        elif result.breakdown is None and result.V.shape[1] > k:
            col = col - betas[k - 1] * result.V[:, k]
        R[:, j] = col
    return frobenius_norm(R)
