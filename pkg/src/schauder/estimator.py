"""Closed-form quadratic-spline estimator for Faber-Schauder coefficients.

Given ``F`` on the dyadic grid of level ``n + 1``, the estimator returns the
coefficients ``vartheta^{(n)}`` of the piecewise-linear ``fhat_n`` whose
antiderivative ``Fhat_n`` interpolates ``F`` on that grid, with ``fhat_n(0)``
fixed to a given ``f0_hat``.  Only the last generation ``m = n`` depends on
``f0_hat`` or on data outside the support of its basis function; dropping it
(:func:`truncate`) gives the robust estimator.
"""

from __future__ import annotations

import dataclasses
import logging
import math

import numpy as np
import scipy.linalg

from .exceptions import ConditioningError, UndefinedEstimateError, ValidationError
from .faber import CoeffSet, eval_expansion, generation_slice, grid_level

log = logging.getLogger(__name__)

DEFAULT_MAX_N = 24


@dataclasses.dataclass(frozen=True, eq=False)
class SampleVector:
    """Values ``F(k * 2**-level)`` for ``k = 0 .. 2**level``."""

    level: int
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", values)
        if self.level < 0:
            raise ValidationError(f"level must be non-negative, got {self.level}")
        if values.shape != (2**self.level + 1,):
            raise ValidationError(
                f"a level-{self.level} sample vector needs {2**self.level + 1} values, got {values.shape}"
            )

    @classmethod
    def from_values(cls, values) -> "SampleVector":
        values = np.asarray(values, dtype=np.float64)
        return cls(grid_level(len(values)), values)

    @property
    def grid(self) -> np.ndarray:
        return np.arange(2**self.level + 1) / 2.0**self.level

    def increments(self) -> np.ndarray:
        return np.diff(self.values)


@dataclasses.dataclass(frozen=True)
class EstimateResult:
    n: int
    coeffs: CoeffSet
    f0_hat: float
    truncated: bool = False

    def __post_init__(self):
        expected = self.n - 1 if self.truncated else self.n
        if self.coeffs.max_generation != expected:
            raise ValidationError(
                f"estimate at n={self.n} (truncated={self.truncated}) must carry generations up to {expected}"
            )


class PiecewiseLinearFn:
    """Continuous function that is affine between the points of a dyadic grid."""

    def __init__(self, level: int, values):
        self.level = level
        self.values = np.asarray(values, dtype=np.float64)
        if self.values.shape != (2**level + 1,):
            raise ValidationError("knot count does not match the grid level")

    @property
    def knots(self) -> np.ndarray:
        return np.arange(2**self.level + 1) / 2.0**self.level

    def __call__(self, t):
        return np.interp(t, self.knots, self.values)


class PiecewiseQuadraticFn:
    """C^1 function, quadratic on each cell, given by knot values and knot slopes."""

    def __init__(self, level: int, values, slopes):
        self.level = level
        self.values = np.asarray(values, dtype=np.float64)
        self.slopes = np.asarray(slopes, dtype=np.float64)
        if self.values.shape != (2**level + 1,) or self.slopes.shape != self.values.shape:
            raise ValidationError("knot count does not match the grid level")

    @property
    def knots(self) -> np.ndarray:
        return np.arange(2**self.level + 1) / 2.0**self.level

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        cells = 2**self.level
        h = 1.0 / cells
        j = np.clip(np.floor(t * cells).astype(np.int64), 0, cells - 1)
        s = t - j * h
        f0, f1 = self.slopes[j], self.slopes[j + 1]
        return self.values[j] + f0 * s + (f1 - f0) * s * s / (2 * h)

    def derivative(self) -> PiecewiseLinearFn:
        return PiecewiseLinearFn(self.level, self.slopes)


def _check_samples(samples) -> SampleVector:
    if not isinstance(samples, SampleVector):
        samples = SampleVector.from_values(samples)
    return samples


def _rademacher_pair(half: int) -> np.ndarray:
    # (-1, +1, ..., -1, +1) followed by (+1, -1, ..., +1, -1)
    r_plus = np.tile([-1.0, 1.0], half // 2) if half > 1 else np.array([-1.0])
    return np.concatenate([r_plus, -r_plus])


def estimate(samples, f0_hat: float = 0.0, *, max_n: int = DEFAULT_MAX_N) -> EstimateResult:
    """Coefficients of the quadratic-spline interpolant from samples of ``F``.

    ``samples`` hold ``F`` on the grid of level ``n + 1``.  ``F(0)`` need not
    vanish; only increments enter.
    """
    samples = _check_samples(samples)
    n = samples.level - 1
    if n < 1:
        raise ValidationError(f"need n >= 1, i.e. at least 5 samples; got level {samples.level}")
    if n > max_n:
        raise ValidationError(f"n = {n} exceeds the cap max_n = {max_n}")

    omega = samples.increments()
    out = np.empty(2 ** (n + 1))

    signs = np.tile([-1.0, 1.0], 2**n)
    out[0] = 2.0 ** (n + 2) * np.sum(signs * omega)

    for m in range(n):
        block = 2 ** (n + 1 - m)
        weights = _rademacher_pair(block // 2)
        cells = omega.reshape(2**m, block)
        out[generation_slice(m)] = 2.0 ** (n + m / 2 + 2) * np.sum(cells * weights, axis=1)

    odd = omega[0::2]
    even = omega[1::2]
    # sum_{j <= 2k} (-1)^j omega_j for k = 0 .. 2^n - 1
    prefix = np.concatenate([[0.0], np.cumsum(even - odd)[:-1]])
    scale = 2.0 ** (1.5 * n + 2)
    out[generation_slice(n)] = (
        -(2.0 ** (n / 2 + 2)) * f0_hat - 4.0 * scale * prefix + 3.0 * scale * odd - scale * even
    )
    return EstimateResult(n, CoeffSet(n, out), float(f0_hat))


def estimate_via_linear_solve(samples, n: int | None = None) -> CoeffSet:
    """Solve ``Psi_{n+1} vartheta = y_{n+1}`` by pivoted LU (with ``f0_hat = 0``).

    Independent dense route to the coefficients returned by :func:`estimate`.
    """
    from .matrices import build_Psi

    samples = _check_samples(samples)
    if n is None:
        n = samples.level - 1
    if samples.level != n + 1:
        raise ValidationError(f"n = {n} needs samples of level {n + 1}, got level {samples.level}")
    if not 1 <= n <= 10:
        raise ValidationError(f"the dense solve is limited to 1 <= n <= 10, got {n}")

    psi = build_Psi(n, n + 1).entries
    y = samples.values[1:] - samples.values[0]
    lu, piv = scipy.linalg.lu_factor(psi, check_finite=False)
    anorm = np.linalg.norm(psi, 1)
    rcond, info = scipy.linalg.lapack.dgecon(lu, anorm, norm="1")
    if info != 0 or rcond < np.finfo(np.float64).eps:
        raise ConditioningError(
            f"Psi_{n + 1} is singular to working precision (rcond = {rcond:.3e})",
            condition=math.inf if rcond == 0 else 1.0 / rcond,
        )
    log.debug("Psi_%d reciprocal condition %.3e", n + 1, rcond)
    return CoeffSet(n, scipy.linalg.lu_solve((lu, piv), y, check_finite=False))


def truncate(result: EstimateResult) -> EstimateResult:
    """Drop the final generation, which alone carries the ``f0_hat`` dependence."""
    if result.truncated:
        raise ValidationError("estimate is already truncated")
    return EstimateResult(result.n, result.coeffs.upto(result.n - 1), result.f0_hat, truncated=True)


def reconstruct_f(result: EstimateResult) -> PiecewiseLinearFn:
    """``fhat = f0_hat + sum vartheta_{m,k} e_{m,k}`` as knot values."""
    level = result.coeffs.max_generation + 1
    knots = np.arange(2**level + 1) / 2.0**level
    return PiecewiseLinearFn(level, eval_expansion(result.coeffs, result.f0_hat, knots))


def reconstruct_F(result: EstimateResult, F0: float = 0.0) -> PiecewiseQuadraticFn:
    """``Fhat(t) = F0 + int_0^t fhat``."""
    fhat = reconstruct_f(result)
    h = 1.0 / 2**fhat.level
    steps = 0.5 * h * (fhat.values[:-1] + fhat.values[1:])
    values = F0 + np.concatenate([[0.0], np.cumsum(steps)])
    return PiecewiseQuadraticFn(fhat.level, values, fhat.values)


def _log_mass(generation: np.ndarray, n: int, atol: float) -> float:
    if n < 1:
        raise ValidationError("roughness needs n >= 1")
    mass = float(np.sqrt(np.sum(generation * generation)))
    if not mass > atol:
        raise UndefinedEstimateError(f"generation-{n} coefficients vanish; roughness estimate undefined")
    return 1.0 - math.log2(mass) / n


def roughness_from_true_coeffs(coeffs: CoeffSet, n: int, *, atol: float = 0.0) -> float:
    """``1 - (1/n) log2 sqrt(sum_k theta_{n,k}^2)`` from known coefficients."""
    return _log_mass(coeffs.generation(n), n, atol)


def roughness_robust(samples, f0_hat: float = 0.0, *, atol: float = 0.0) -> float:
    """Roughness from ``F`` on the level ``n + 2`` grid via generation ``n`` of ``vartheta^{(n+1)}``.

    The final generation ``n + 1`` is never used, so the value does not
    depend on ``f0_hat``.
    """
    samples = _check_samples(samples)
    n = samples.level - 2
    if n < 1:
        raise ValidationError(f"need samples of level >= 3, got {samples.level}")
    result = estimate(samples, f0_hat)
    return _log_mass(result.coeffs.generation(n), n, atol)


def generation_mass(samples, f0_hat: float = 0.0) -> float:
    """l2 norm of generation ``n`` of ``vartheta^{(n+1)}`` (the quantity inside the roughness log)."""
    samples = _check_samples(samples)
    n = samples.level - 2
    g = estimate(samples, f0_hat).coeffs.generation(n)
    return float(np.sqrt(np.sum(g * g)))
