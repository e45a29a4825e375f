"""Metrics and experiment drivers: orthogonality-loss measurements, bitwise
exactness sweeps over structured instances, and the two reference experiments
on the Strakos spectrum."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cg import cg_hs, cglanczos, rational_cg_oracle
from .fp import (
    BINARY64,
    Precision,
    ShapeError,
    first_bit_difference,
    frobenius_norm,
    matvec,
    norm2,
    precision_of,
    require_finite,
    seq_dot,
)
from .krylov_general import arnoldi, block_lanczos, golub_kahan, nonsym_lanczos
from .lanczos import lanczos
from .problems import (
    extend_deficient,
    make_rng,
    random_jacobi,
    random_signed_permutation,
    random_structured_problem,
    strakos_spectrum,
)
from .rational import float_of, rat_norm2_sq, to_rational_vector


@dataclass
class MetricSeries:
    """Per-iteration metric rows (k, metric name, value, hex-float string)."""

    experiment: str
    rows: list = field(default_factory=list)

    def add(self, k: int, name: str, value):
        prev = [r[0] for r in self.rows if r[1] == name]
        if prev and k <= prev[-1]:
            raise ValueError(f"iteration index must increase within series {name!r}")
        v = float(value)
        self.rows.append((int(k), name, v, v.hex()))

    def values(self, name: str) -> list:
        return [(r[0], r[2]) for r in self.rows if r[1] == name]

    def max_value(self, name: str) -> float:
        vals = [r[2] for r in self.rows if r[1] == name]
        if not vals:
            raise KeyError(f"no rows for metric {name!r}")
        return max(vals)


@dataclass(frozen=True)
class ExactnessReport:
    algorithm: str
    n: int
    seed: int
    precision: str
    projected_match: bool
    basis_match: bool
    breakdown_match: bool
    mismatch: str | None = None

    def __post_init__(self):
        clean = self.projected_match and self.basis_match and self.breakdown_match
        if clean != (self.mismatch is None):
            raise ValueError("mismatch location must be recorded iff a check failed")

    @property
    def ok(self) -> bool:
        return self.mismatch is None


# ---------------------------------------------------------------------------
# metrics


def loss_of_orthogonality(V: np.ndarray):
    """||V^T V - I||_F in the working precision of V.

    Columns must already be normalized (checked to 4nu).  On a basis whose
    columns are exactly signed identity columns every dot product below is
    exact and the result is +0 bitwise.
    """
    require_finite(V, "basis")
    if V.ndim != 2:
        raise ShapeError("basis must be a matrix")
    n, k = V.shape
    tol = 4 * n * (np.finfo(V.dtype).eps / 2)
    for j in range(k):
        if abs(float(norm2(V[:, j])) - 1.0) > tol:
            raise ValueError(f"column {j + 1} is not normalized")
    one = V.dtype.type(1.0)
    E = np.empty((k, k), dtype=V.dtype)
    for i in range(k):
        for j in range(k):
            g = seq_dot(V[:, i], V[:, j])
            E[i, j] = g - one if i == j else g
    return frobenius_norm(E)


def a_orthogonality_loss(Pdirs: np.ndarray, A: np.ndarray):
    """||Ptilde^T A Ptilde - I||_F with columns A-normalized internally."""
    require_finite(Pdirs, "directions")
    require_finite(A, "matrix")
    if Pdirs.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] != Pdirs.shape[0]:
        raise ShapeError("matrix/direction dimensions do not agree")
    n, k = Pdirs.shape
    Pt = np.empty_like(Pdirs)
    for j in range(k):
        pap = seq_dot(Pdirs[:, j], matvec(A, Pdirs[:, j]))
        if pap <= 0:
            raise ValueError(f"p^T A p <= 0 for column {j + 1}: matrix is not numerically positive definite")
        Pt[:, j] = Pdirs[:, j] / np.sqrt(pap)
    one = A.dtype.type(1.0)
    E = np.empty((k, k), dtype=A.dtype)
    for i in range(k):
        for j in range(k):
            g = seq_dot(Pt[:, i], matvec(A, Pt[:, j]))
            E[i, j] = g - one if i == j else g
    return frobenius_norm(E)


def sqrt_square_violations(samples: int, precision: Precision = BINARY64, seed: int = 0) -> int:
    """Count violations of fl(sqrt(fl(a^2))) = |a| over guarded random samples."""
    if samples < 1:
        raise ValueError("samples must be positive")
    g = make_rng(seed)
    emax = 499 if precision.name == "binary64" else 59
    mant = g.uniform(1.0, 2.0, samples)
    expo = g.integers(-emax, emax + 1, samples)
    sign = (2 * g.integers(0, 2, samples) - 1).astype(np.float64)
    alpha = (sign * mant * np.exp2(expo.astype(np.float64))).astype(precision.dtype)
    roundtrip = np.sqrt(alpha * alpha)
    kind = np.uint64 if precision.dtype == np.float64 else np.uint32
    bad = roundtrip.view(kind) != np.abs(alpha).view(kind)
    return int(np.count_nonzero(bad))


# ---------------------------------------------------------------------------
# exactness sweeps

SWEEP_ALGORITHMS = ("lanczos", "arnoldi", "bilanczos", "gk", "blocklanczos", "deficient")


def _pair(a, b, what):
    idx = first_bit_difference(a, b)
    return (f"{what}" if idx is None else f"{what}[{idx}]", idx is None)


def exactness_check(algorithm: str, n: int, seed: int, precision: Precision = BINARY64, p: int = 1, variant: str = "mgs", qr_variant: str = "mgs") -> ExactnessReport:
    """Build one structured instance, run the algorithm, compare bitwise."""
    if algorithm == "deficient":
        prob = _deficient_instance(n, seed, precision)
    elif algorithm == "lanczos":
        prob = random_structured_problem("jacobi", n, seed, precision)
    else:
        kinds = {"arnoldi": "hessenberg", "bilanczos": "nonsymtridiag", "gk": "lowerbidiag", "blocklanczos": "blocktridiag"}
        if algorithm not in kinds:
            raise ValueError(f"unknown sweep algorithm {algorithm!r}")
        prob = random_structured_problem(kinds[algorithm], n, seed, precision, p=p)
    return compare_structured(prob, algorithm, seed=seed, variant=variant, qr_variant=qr_variant)


def compare_structured(prob, algorithm: str, seed: int = -1, variant: str = "mgs", qr_variant: str = "mgs") -> ExactnessReport:
    """Run an algorithm on a structured instance and compare bitwise against
    the generating (P, T, grade)."""
    precision = precision_of(prob.A)
    n = len(prob.v)
    if algorithm == "lanczos":
        res = lanczos(prob.A, prob.v, n, variant=variant, reorth="none")
        Pd = prob.P.to_dense(precision.dtype)
        proj = _pair(
            np.concatenate([res.alpha, res.beta[: n - 1]]),
            np.concatenate([prob.T.alpha, prob.T.beta]),
            "T",
        )
        basis = _pair(res.V[:, :n], Pd, "V")
        checks = [proj, basis, ("breakdown", res.breakdown == prob.d)]
    elif algorithm == "deficient":
        d = prob.d
        res = lanczos(prob.A, prob.v, len(prob.v), variant=variant, reorth="none")
        Vexp = np.zeros((len(prob.v), d), dtype=precision.dtype)
        Vexp[:d, :] = prob.P.to_dense(precision.dtype)
        proj = _pair(
            np.concatenate([res.alpha, res.beta[: d - 1]]),
            np.concatenate([prob.T.alpha, prob.T.beta]),
            "T",
        )
        basis = _pair(res.V, Vexp, "V")
        last_beta_pos_zero = res.k == d and res.beta[d - 1] == 0 and not np.signbit(res.beta[d - 1])
        checks = [proj, basis, ("breakdown", res.breakdown == d and last_beta_pos_zero)]
    elif algorithm == "arnoldi":
        res = arnoldi(prob.A, prob.v, n)
        proj = _pair(res.square(), prob.T.entries, "H")
        basis = _pair(res.V, prob.P.to_dense(precision.dtype), "V")
        checks = [proj, basis, ("breakdown", res.breakdown == prob.d)]
    elif algorithm == "bilanczos":
        res = nonsym_lanczos(prob.A, prob.v, prob.w, n)
        Pd = prob.P.to_dense(precision.dtype)
        proj = _pair(
            np.concatenate([res.alpha, res.beta, res.gamma, [res.gamma1, res.beta1]]),
            np.concatenate([prob.T.alpha, prob.T.beta, prob.T.gamma, [prob.gamma1, prob.beta1]]),
            "T",
        )
        basis = _pair(np.concatenate([res.V, res.W], axis=1), np.concatenate([Pd, Pd], axis=1), "VW")
        checks = [proj, basis, ("breakdown", res.breakdown == prob.d)]
    elif algorithm == "gk":
        res = golub_kahan(prob.A, prob.v, n)
        Pd = prob.P.to_dense(precision.dtype)
        proj = _pair(
            np.concatenate([res.gamma, res.delta, [res.delta1]]),
            np.concatenate([prob.T.gamma, prob.T.delta, [prob.beta1]]),
            "L",
        )
        basis = _pair(np.concatenate([res.S, res.W], axis=1), np.concatenate([Pd, Pd], axis=1), "SW")
        checks = [proj, basis, ("breakdown", res.breakdown == ("delta", prob.d + 1))]
    elif algorithm == "blocklanczos":
        m = prob.d
        res = block_lanczos(prob.A, prob.U1, m, qr_variant=qr_variant)
        proj = _pair(
            np.concatenate([M.ravel() for M in res.M] + [B.ravel() for B in res.B]),
            np.concatenate([M.ravel() for M in prob.T.M] + [B.ravel() for B in prob.T.B]),
            "T",
        )
        basis = _pair(np.concatenate(res.U, axis=1), prob.P.to_dense(precision.dtype), "U")
        checks = [proj, basis, ("breakdown", res.breakdown == m)]
    else:
        raise ValueError(f"unknown sweep algorithm {algorithm!r}")
    proj_ok = checks[0][1]
    basis_ok = checks[1][1]
    bd_ok = checks[2][1]
    mismatch = None
    for idx, (label, ok) in enumerate(checks):
        if not ok:
            mismatch = label if idx < 2 else f"breakdown index (seed={seed}, n={n}, {precision.name})"
            break
    return ExactnessReport(algorithm, n, seed, precision.name, proj_ok, basis_ok, bd_ok, mismatch)


def _deficient_instance(n: int, seed: int, precision: Precision = BINARY64):
    """Grade-d instance embedded in dimension n (d = ceil(n/2) at least 1)."""
    d = max(n // 2, 1)
    T = random_jacobi(d, seed, precision=precision)
    P = random_signed_permutation(d, seed + 917)
    g = make_rng(seed + 31)
    m = n - d
    R1 = g.uniform(-1.0, 1.0, (m, m)).astype(precision.dtype)
    W = g.uniform(-1.0, 1.0, (m, m)).astype(precision.dtype)
    R2 = np.triu(W) + np.ascontiguousarray(np.triu(W, 1).T)
    beta1 = precision.dtype(float(g.uniform(0.25, 4.0)))
    return extend_deficient(T, P, R1, R2, beta1)


def exactness_sweep(algorithm: str, sizes, seeds, precisions=(BINARY64,), p: int = 1, variant: str = "mgs", qr_variant: str = "mgs") -> list:
    """Run exactness_check over the grid; reports sorted by (precision, n, seed)."""
    reports = []
    for precision in precisions:
        for n in sizes:
            for seed in seeds:
                reports.append(exactness_check(algorithm, n, seed, precision, p=p, variant=variant, qr_variant=qr_variant))
    reports.sort(key=lambda r: (r.precision, r.n, r.seed))
    return reports


def sweep_failures(reports) -> list:
    return [r for r in reports if not r.ok]


# ---------------------------------------------------------------------------
# figure experiments (Strakos spectrum, n = 24, lam1 = 1e-3, lamn = 1, rho = 0.7)


def _strakos_tridiagonal():
    lam = strakos_spectrum(24, 1e-3, 1.0, 0.7)
    A = np.diag(lam)
    v = np.ones(24, dtype=np.float64)
    res = lanczos(A, v, 24, variant="mgs", reorth="double")
    if res.k < 24:
        raise RuntimeError("unexpected breakdown while building the reference tridiagonal")
    return res.tridiagonal()


def experiment_fig2() -> MetricSeries:
    """Loss of orthogonality of HS-CG's normalized residuals on the Strakos
    instance, against the exact (+0) loss of plain Lanczos on the same pair."""
    T = _strakos_tridiagonal()
    A = T.to_dense()
    n = T.n
    b = np.zeros(n, dtype=np.float64)
    b[0] = 1.0
    tr = cg_hs(A, b)
    series = MetricSeries("fig2")
    steps = len(tr.r) - 1
    Vt = np.empty((n, steps + 1), dtype=np.float64)
    for j in range(steps + 1):
        nrm = tr.residual_norms[j]
        if nrm == 0:
            Vt = Vt[:, :j]
            steps = j - 1
            break
        Vt[:, j] = tr.r[j] / nrm
    for k in range(1, steps + 2):
        series.add(k, "hscg_orth_loss", loss_of_orthogonality(Vt[:, :k]))
    lres = lanczos(A, b, n, variant="mgs", reorth="none")
    for k in range(1, lres.k + 1):
        series.add(k, "lanczos_orth_loss", loss_of_orthogonality(lres.V[:, :k]))
    return series


def experiment_fig3() -> MetricSeries:
    """A-orthogonality of cgLanczos directions and relative error against the
    exact-arithmetic CG oracle on the Strakos instance."""
    T = _strakos_tridiagonal()
    A = T.to_dense()
    n = T.n
    b = np.zeros(n, dtype=np.float64)
    b[0] = 1.0
    tr = cglanczos(A, b)
    oracle = rational_cg_oracle(A, b)
    series = MetricSeries("fig3")
    kmax = len(tr.x) - 1
    for k in range(1, kmax + 1):
        dirs = [p for p in tr.p[:k] if np.any(p != 0)]
        series.add(k, "a_orth_loss", a_orthogonality_loss(np.column_stack(dirs), A))
        if k < len(oracle.x):
            xk = oracle.x[k]
            dx = [xe - xb for xe, xb in zip(xk, to_rational_vector(tr.x[k]))]
            num = float_of(rat_norm2_sq(dx)) ** 0.5
            den = float_of(rat_norm2_sq(xk)) ** 0.5
            series.add(k, "rel_error", num / den if den else 0.0)
        series.add(k, "residual_norm", tr.residual_norms[k])
    return series
