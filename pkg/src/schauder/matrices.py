"""Dense construction of the matrices behind the estimator and their identities.

Notation follows the estimator: data live on the grid of level ``n + 1``,
``Psi_{n+1} = Psi(n, n+1)`` maps coefficients to samples, ``Q^{-1}`` turns
samples into scaled increments, ``A_n = Q^{-1} Psi_{n+1}`` and
``P_n = A_n^{-1}`` is assembled row-block by row-block from the blocks
``C_{-1}, ..., C_n``.  Everything here is a verification path; the estimator
itself never forms these matrices.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import constants
from .exceptions import ConvergenceError, SingularMatrixError, ValidationError
from .faber import eval_psi, generation_size
from .parallel import worker_count

SQRT2 = math.sqrt(2.0)
U_VEC = np.array([SQRT2, -SQRT2])
V_VEC = np.array([3.0 / (2.0 * SQRT2), -1.0 / (2.0 * SQRT2)])


@dataclass
class BlockMatrix:
    role: str
    entries: np.ndarray
    params: dict = field(default_factory=dict)

    @property
    def shape(self):
        return self.entries.shape

    @property
    def rows(self):
        return self.entries.shape[0]

    @property
    def cols(self):
        return self.entries.shape[1]

    def __matmul__(self, other):
        other = other.entries if isinstance(other, BlockMatrix) else other
        return self.entries @ other


@dataclass
class NormReport:
    p: float
    m: int
    computed_norm: float
    closed_form: float
    relative_gap: float = field(init=False)

    def __post_init__(self):
        self.relative_gap = abs(self.computed_norm - self.closed_form) / max(self.closed_form, np.finfo(float).tiny)


def rademacher(size: int, sign: int = +1) -> np.ndarray:
    """``r+`` = (-1, +1, -1, ...) and ``r-`` = (+1, -1, +1, ...) of the given length."""
    r = np.tile([-1.0, 1.0], (size + 1) // 2)[:size]
    return r if sign > 0 else -r


def build_Q(m: int, k: int) -> BlockMatrix:
    """``Q_(m,k)[i, j] = psi_{m,j}(i / 2^k)``, ``i = 1 .. 2^k``."""
    if m < -1 or k < 0:
        raise ValidationError(f"invalid Q index ({m}, {k})")
    t = np.arange(1, 2**k + 1) / 2.0**k
    cols = [eval_psi((m, j), t) for j in range(generation_size(m))]
    return BlockMatrix("Q", np.column_stack(cols), {"m": m, "k": k})


def build_Psi(m: int, k: int) -> BlockMatrix:
    """``[Q_(-1,k), ..., Q_(m,k)]``; ``build_Psi(n, n+1)`` is square."""
    blocks = [build_Q(i, k).entries for i in range(-1, m + 1)]
    return BlockMatrix("Psi", np.hstack(blocks), {"m": m, "k": k})


def build_Q_inverse(n: int) -> BlockMatrix:
    size = 2 ** (n + 1)
    scale = 2.0 ** (1.5 * (n + 1) + 2)
    entries = scale * (np.eye(size) - np.eye(size, k=-1))
    return BlockMatrix("Qinv", entries, {"n": n})


def _w_plus(m: int, n: int) -> np.ndarray:
    length = 2 ** (n - m)
    k = np.arange(1, length + 1)
    return (2 * k - 1) / 2.0 ** ((n - 1 - max(m, 0)) / 2)


def build_A(n: int) -> BlockMatrix:
    """``A_n = Q^{-1}_(n+1,n+1) Psi_{n+1}`` assembled from its block structure."""
    size = 2 ** (n + 1)
    A = np.zeros((size, size))
    A[:, 0] = _w_plus(-1, n)
    for m in range(n + 1):
        w = _w_plus(m, n)
        alpha = np.concatenate([w, w[::-1]])
        height = len(alpha)
        for j in range(2**m):
            A[j * height : (j + 1) * height, 2**m + j] = alpha
    return BlockMatrix("A", A, {"n": n})


def build_C(n: int, m: int) -> BlockMatrix:
    """Row block of ``P_n`` belonging to generation ``m``."""
    if not -1 <= m <= n:
        raise ValidationError(f"generation {m} outside [-1, {n}]")
    size = 2 ** (n + 1)
    if m == -1:
        C = (2.0 ** (-(n + 3) / 2) * rademacher(size, +1))[None, :]
    elif m < n:
        width = 2 ** (n + 1 - m)
        eta = 2.0 ** ((m - n - 3) / 2) * np.concatenate(
            [rademacher(width // 2, +1), rademacher(width // 2, -1)]
        )
        C = np.zeros((2**m, size))
        for i in range(2**m):
            C[i, i * width : (i + 1) * width] = eta
    else:
        rows = 2**n
        C = np.zeros((rows, size))
        for i in range(rows):
            C[i, : 2 * i] = np.tile(U_VEC, i)
            C[i, 2 * i : 2 * i + 2] = V_VEC
    return BlockMatrix("C", C, {"n": n, "m": m})


def build_P(n: int) -> BlockMatrix:
    """``P_n = Psi_{n+1}^{-1} Q_(n+1,n+1)`` stacked from ``C_{-1} .. C_n``."""
    return BlockMatrix("P", np.vstack([build_C(n, m).entries for m in range(-1, n + 1)]), {"n": n})


def build_R(n: int, m: int) -> BlockMatrix:
    """Selects generations ``-1 .. m`` from a level-``n`` coefficient vector."""
    rows = 2 ** (m + 1)
    return BlockMatrix("R", np.eye(rows, 2 ** (n + 1)), {"n": n, "m": m})


def build_Rbar(n: int, m: int) -> BlockMatrix:
    """Selects generation ``m`` alone."""
    rows = generation_size(m)
    start = 0 if m == -1 else 2**m
    return BlockMatrix("Rbar", np.eye(rows, 2 ** (n + 1), k=start), {"n": n, "m": m})


def build_U(m: int, n: int) -> BlockMatrix:
    """``U_(m,n+1)``: maps generation ``m >= n+1`` onto the tail vector ``z_{n+1}``."""
    if m < n + 1:
        raise ValidationError(f"U_(m,n+1) needs m >= n + 1, got m={m}, n={n}")
    rows = 2 ** (n + 1)
    run = 2 ** (m - n - 1)
    entries = 2.0 ** ((3 * n + 3 - 3 * m) / 2) * np.kron(np.eye(rows), np.ones((1, run)))
    return BlockMatrix("U", entries, {"m": m, "n": n})


def apply_tail(generations, n: int) -> np.ndarray:
    """``z_{n+1} = sum_m U_(m,n+1) theta_m`` for a mapping ``{m: theta_m}`` with ``m >= n+1``."""
    z = np.zeros(2 ** (n + 1))
    for m, theta in sorted(generations.items()):
        z += build_U(m, n).entries @ np.asarray(theta, dtype=np.float64)
    return z


def build_D(N: int) -> BlockMatrix:
    """``d_ij = min(i, j) - 1/2``."""
    i = np.arange(1, N + 1)
    return BlockMatrix("D", np.minimum.outer(i, i) - 0.5, {"N": N})


def build_E(N: int) -> BlockMatrix:
    """Tridiagonal inverse of ``D_N``: 3 and 1 in the corners, 2 inside, -1 off-diagonal."""
    if N < 2:
        raise ValidationError("E_N is defined for N >= 2")
    E = 2.0 * np.eye(N) - np.eye(N, k=1) - np.eye(N, k=-1)
    E[0, 0] = 3.0
    E[-1, -1] = 1.0
    return BlockMatrix("E", E, {"N": N})


def build_G(n: int) -> BlockMatrix:
    """``G_n = C_n C_n^T`` from its entrywise closed form."""
    i = np.arange(1, 2**n + 1)
    G = 4.0 * np.minimum.outer(i, i) - 2.0
    G[np.diag_indices_from(G)] = 4.0 * i - 11.0 / 4.0
    return BlockMatrix("G", G, {"n": n})


def _start_vector(size: int) -> np.ndarray:
    return np.ones(size) + 1e-3 * np.sin(np.arange(1, size + 1))


def top_singular(matrix, tol: float = 1e-10, max_iter: int = 100_000):
    """Largest singular value and right singular vector by power iteration on ``M^T M``."""
    M = matrix.entries if isinstance(matrix, BlockMatrix) else np.asarray(matrix, dtype=np.float64)
    gram = M.T @ M
    x = _start_vector(gram.shape[0])
    x /= np.linalg.norm(x)
    lam = 0.0
    gap = math.inf
    for it in range(1, max_iter + 1):
        y = gram @ x
        new = float(x @ y)
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0, x
        x = y / norm
        gap = abs(new - lam)
        lam = new
        if gap <= tol * abs(lam):
            return math.sqrt(max(lam, 0.0)), x
    raise ConvergenceError(
        f"power iteration stalled after {max_iter} steps (eigenvalue gap {gap:.3e})",
        gap=gap,
        iterations=max_iter,
    )


def operator_norm(matrix, p) -> float:
    """l_p-induced norm: max column sum (1), largest singular value (2), max row sum (inf)."""
    p = constants.check_p(p)
    M = matrix.entries if isinstance(matrix, BlockMatrix) else np.asarray(matrix, dtype=np.float64)
    if p == 1:
        return float(np.max(np.sum(np.abs(M), axis=0)))
    if p == math.inf:
        return float(np.max(np.sum(np.abs(M), axis=1)))
    if M.shape[0] < M.shape[1]:
        M = M.T
    return top_singular(M)[0]


def error_map(n: int, m: int, cumulative: bool = False) -> BlockMatrix:
    """``R_m P_n`` (cumulative) or ``Rbar_m P_n``: maps ``z_{n+1}`` to coefficient errors."""
    if cumulative:
        if m > n - 1:
            raise ValidationError("cumulative error maps stop at m = n - 1")
        entries = np.vstack([build_C(n, i).entries for i in range(-1, m + 1)])
        return BlockMatrix("RP", entries, {"n": n, "m": m})
    return BlockMatrix("RbarP", build_C(n, m).entries, {"n": n, "m": m})


def norm_report(n: int, m: int, p, cumulative: bool = False) -> NormReport:
    """Compare a computed error-map norm with its closed form.

    For ``p = 2, m = n`` the closed form is the lower end of the bracket,
    which is attained because ``G_n`` is a shifted positive-definite matrix.
    """
    p = constants.check_p(p)
    computed = operator_norm(error_map(n, m, cumulative), p)
    if cumulative:
        closed = constants.cumulative_norm(p, m, n)
    elif p == 2 and m == n:
        closed = constants.l2_final_bracket(n)[0]
    else:
        closed = constants.generation_norm(p, m, n)
    return NormReport(p, m, computed, closed)


@dataclass
class Check:
    name: str
    gap: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.gap < self.tol)


@dataclass
class IdentityReport:
    n: int
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]


def _max_abs(a) -> float:
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


def _cmk_checks(n: int, tol: float):
    blocks = {m: build_C(n, m).entries for m in range(-1, n)}
    out = []
    for m in range(-1, n):
        for k in range(-1, n):
            prod = blocks[m] @ blocks[k].T
            target = 0.25 * np.eye(prod.shape[0]) if m == k else 0.0
            out.append(Check(f"C[{m}] C[{k}]^T", _max_abs(prod - target), tol))
    return out


def verify_identities(n: int, tol: float = 1e-10) -> IdentityReport:
    """Check the structural identities at level ``n`` (``1 <= n <= 8``)."""
    if not 1 <= n <= 8:
        raise ValidationError(f"identity checks run for 1 <= n <= 8, got {n}")
    size = 2 ** (n + 1)
    eye = np.eye(size)
    P = build_P(n).entries
    A = build_A(n).entries
    Q = build_Q(n + 1, n + 1).entries
    Qinv = build_Q_inverse(n).entries
    checks = [
        Check("P_n A_n = I", _max_abs(P @ A - eye), tol),
        Check("Qinv Q = I", _max_abs(Qinv @ Q - eye), tol),
    ]
    if n <= 6:
        psi = build_Psi(n, n + 1).entries
        direct = Qinv @ psi
        checks.append(Check("A_n = Qinv Psi (relative)", _max_abs(A - direct) / _max_abs(direct), 1e-9))
    checks.extend(_cmk_checks(n, tol))

    C_n = build_C(n, n).entries
    checks.append(Check("C_n C_n^T = G_n", _max_abs(C_n @ C_n.T - build_G(n).entries), tol))
    N = 2**n
    if N >= 2:
        D = build_D(N).entries
        E = build_E(N).entries
        checks.append(Check(f"D_{N} E_{N} = I", _max_abs(D @ E - np.eye(N)), tol))
        checks.append(Check(f"G_n = 4 D_{N} - 3/4 I", _max_abs(build_G(n).entries - (4 * D - 0.75 * np.eye(N))), tol))
        eig = np.sort(np.linalg.eigvalsh(E))
        j = np.arange(N)
        checks.append(Check(f"lambda_min(E_{N})", abs(eig[0] - (2 - 2 * math.cos(math.pi / (2 * N)))), tol))
        spectrum = np.sort(2 - 2 * np.cos((2 * j + 1) * math.pi / (2 * N)))
        checks.append(Check(f"spectrum(E_{N})", _max_abs(eig - spectrum), 1e-9))
    return IdentityReport(n, checks)


def verify_all(n_max: int = 8, tol: float = 1e-10):
    """Identity reports for ``n = 1 .. n_max``, computed in parallel, ordered by ``n``."""
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        return list(pool.map(lambda n: verify_identities(n, tol), range(1, n_max + 1)))


def log10_det_Psi(n: int):
    """``(log10 |det Psi_n|, sign)`` for the square ``Psi_n = Psi(n-1, n)``.

    Accumulates pivot logarithms from a partially pivoted LU; the determinant
    itself underflows quickly and is never formed.
    """
    if not 1 <= n <= 10:
        raise ValidationError(f"log-determinant is supported for 1 <= n <= 10, got {n}")
    psi = build_Psi(n - 1, n).entries
    lu, piv = scipy.linalg.lu_factor(psi, check_finite=False)
    diag = np.diag(lu)
    if np.any(diag == 0.0):
        raise SingularMatrixError(f"Psi_{n} has a zero pivot")
    swaps = int(np.sum(piv != np.arange(len(piv))))
    sign = (-1) ** swaps * int(np.prod(np.sign(diag)))
    return float(np.sum(np.log10(np.abs(diag)))), sign
