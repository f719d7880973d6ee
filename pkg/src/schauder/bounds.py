"""Error analysis of the estimator: tail vectors, bound checks and worst cases.

Every estimation error is driven by the tail vector ``z_{n+1}``: with the
true ``f(0)`` supplied, ``vartheta^{(n)} - theta = P_n z_{n+1}``.  Cell ``i``
of ``z`` aggregates the coefficients beyond generation ``n`` whose support
lies in the ``i``-th cell of the level ``n + 1`` grid, and equals a scaled
trapezoid-rule error of ``f`` on that cell.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import constants
from .estimator import SampleVector, estimate, reconstruct_F, reconstruct_f
from .exceptions import ValidationError
from .faber import CoeffSet, eval_expansion, generation_slice
from .generators import FunctionSpec, TakagiSpec, sample_F
from .matrices import error_map, top_singular
from .parallel import worker_count

QUADRATURE_EXTRA_LEVELS = 12


@dataclass(frozen=True, eq=False)
class TailVector:
    n: int
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", values)
        if values.shape != (2 ** (self.n + 1),):
            raise ValidationError(f"a level-{self.n} tail vector has {2 ** (self.n + 1)} entries, got {values.shape}")

    def norm(self, p) -> float:
        return lp_norm(self.values, p)


def lp_norm(x, p) -> float:
    p = constants.check_p(p)
    x = np.asarray(x, dtype=np.float64)
    if p == math.inf:
        return float(np.max(np.abs(x))) if x.size else 0.0
    return float(np.linalg.norm(x, p))


def compute_tail(coeffs: CoeffSet, n: int) -> TailVector:
    """``z_i = 2^{3(n+1)/2} sum_{m > n} 2^{-3m/2} sum_{k in cell i} theta_{m,k}``."""
    if coeffs.max_generation < n + 1:
        raise ValidationError(f"the tail needs generations beyond n = {n}, got max {coeffs.max_generation}")
    cells = 2 ** (n + 1)
    z = np.zeros(cells)
    for m in range(n + 1, coeffs.max_generation + 1):
        block = coeffs.generation(m).reshape(cells, -1).sum(axis=1)
        z += 2.0 ** (1.5 * (n + 1 - m)) * block
    return TailVector(n, z)


def tail_from_function(spec: FunctionSpec, n: int) -> TailVector:
    """Exact tail from ``F`` and ``f`` on the level ``n + 1`` grid.

    ``z_i = 2^{3(n+1)/2 + 2} (int_cell f - h (f(a) + f(b)) / 2)``: the
    trapezoid error on each cell, which sums all generations beyond ``n``
    without truncation.
    """
    if spec.kind == "takagi":
        # every cell receives the same kappa_{n+1} = 2^{(n+1)/2} sum_{m > n} c_m
        takagi: TakagiSpec = spec.params["spec"]
        kappa = 2.0 ** ((n + 1) / 2) * takagi.tail_sum(n + 1)
        return TailVector(n, np.full(2 ** (n + 1), kappa))
    level = n + 1
    h = 2.0**-level
    F = spec.F_grid(level)
    f = spec.f_grid(level)
    trap = np.diff(F) - 0.5 * h * (f[:-1] + f[1:])
    return TailVector(n, 2.0 ** (1.5 * level + 2) * trap)


@dataclass(frozen=True)
class BoundConstants:
    """Closed-form constants at level ``n``.

    ``generation[p][m]`` is the norm of the error map onto generation ``m``
    (for ``p = 2, m = n`` the upper end of ``l2_bracket``), and
    ``cumulative[p][m]`` the one onto generations ``-1 .. m`` (``m <= n - 1``).
    """

    n: int
    generation: dict
    cumulative: dict
    l2_bracket: tuple
    A: dict
    B: dict
    C: dict
    D: dict
    gamma2: float
    a: dict


def bound_constants(n: int) -> BoundConstants:
    if n < 2:
        raise ValidationError(f"bound constants are defined for n >= 2, got {n}")
    generation = {p: {m: constants.generation_norm(p, m, n) for m in range(-1, n + 1)} for p in constants.NORMS}
    cumulative = {p: {m: constants.cumulative_norm(p, m, n) for m in range(-1, n)} for p in constants.NORMS}
    A, B, C, D = constants.functional_constants(n)
    return BoundConstants(
        n=n,
        generation=generation,
        cumulative=cumulative,
        l2_bracket=constants.l2_final_bracket(n),
        A=A,
        B=B,
        C=C,
        D=D,
        gamma2=constants.gamma2(n),
        a=constants.antiderivative_constants(n),
    )


@dataclass
class BoundRow:
    """One inequality ``measured <= bound``; ``kind`` is generation, cumulative or final."""

    kind: str
    m: int
    p: float
    measured: float
    bound: float
    atol: float = 0.0

    @property
    def holds(self) -> bool:
        return self.measured <= self.bound * (1.0 + 1e-9) + self.atol

    @property
    def slack(self) -> float:
        return self.bound - self.measured


@dataclass
class BoundReport:
    n: int
    rows: list
    tail_norms: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.holds for r in self.rows)

    def violations(self):
        return [r for r in self.rows if not r.holds]


def rounding_floor(samples: SampleVector) -> float:
    """Coefficient error produced by rounding the samples alone.

    The map from samples to the final generation has entries of size
    ``2^{3n/2}`` and ``2^n`` terms per row, so relative sample rounding is
    amplified by about ``2^{5n/2}``.
    """
    n = samples.level - 1
    scale = max(float(np.max(np.abs(samples.values))), np.finfo(float).tiny)
    return 2.0 ** (2.5 * n + 6) * np.finfo(float).eps * scale


def estimation_error(spec: FunctionSpec, n: int) -> np.ndarray:
    """``vartheta^{(n)} - theta`` with the true ``f(0)`` supplied."""
    result = estimate(sample_F(spec, n + 1), spec.f0())
    return result.coeffs.values - spec.true_coeffs(n).values


def check_upper_bounds(spec: FunctionSpec, n: int, p=None) -> BoundReport:
    """Coefficient errors against ``constant * ||z||_p`` for each generation and prefix."""
    if n < 2:
        raise ValidationError("bound checks need n >= 2")
    norms = constants.NORMS if p is None else (constants.check_p(p),)
    err = estimation_error(spec, n)
    z = tail_from_function(spec, n)
    consts = bound_constants(n)
    floor = rounding_floor(sample_F(spec, n + 1))
    rows = []
    for q in norms:
        zq = z.norm(q)
        atol = floor * (2 ** (n + 1) if q == 1 else 2 ** ((n + 1) / 2) if q == 2 else 1)
        for m in range(-1, n + 1):
            kind = "final" if m == n else "generation"
            measured = lp_norm(err[generation_slice(m)], q)
            rows.append(BoundRow(kind, m, q, measured, consts.generation[q][m] * zq, atol))
        for m in range(-1, n):
            measured = lp_norm(err[: 2 ** (m + 1)], q)
            rows.append(BoundRow("cumulative", m, q, measured, consts.cumulative[q][m] * zq, atol))
    return BoundReport(n, rows, {q: z.norm(q) for q in norms})


def worst_case_tail(n: int, m: int, p, cumulative: bool = False) -> TailVector:
    """Tail ``z`` maximizing ``||E z||_p / ||z||_p`` for the error map ``E`` onto generation ``m``.

    Any ``z`` is realized by putting ``theta_{n+1,.} = z`` and all other
    coefficients to zero, so the returned vector doubles as that generation.
    """
    p = constants.check_p(p)
    E = error_map(n, m, cumulative).entries
    if p == math.inf:
        row = int(np.argmax(np.sum(np.abs(E), axis=1)))
        z = np.where(E[row] >= 0, 1.0, -1.0)
    elif p == 1:
        col = int(np.argmax(np.sum(np.abs(E), axis=0)))
        z = np.zeros(E.shape[1])
        z[col] = 1.0
    else:
        _, z = top_singular(E)
    return TailVector(n, z)


def samples_from_tail(z: TailVector) -> SampleVector:
    """``F`` on the level ``n + 1`` grid for ``f = sum_k z_k e_{n+1,k}``."""
    level = z.n + 1
    values = 2.0 ** (-1.5 * level - 2) * np.concatenate([[0.0], np.cumsum(z.values)])
    return SampleVector(level, values)


def achieved_ratio(n: int, m: int, p, cumulative: bool = False) -> float:
    """``||error on generation m||_p / ||z||_p`` for the worst-case tail, run through the estimator."""
    z = worst_case_tail(n, m, p, cumulative)
    err = estimate(samples_from_tail(z)).coeffs.values
    part = err[: 2 ** (m + 1)] if cumulative else err[generation_slice(m)]
    return lp_norm(part, p) / z.norm(p)


@dataclass
class CorollaryReport:
    """Final-generation error against the error of generations ``-1 .. n-1``.

    ``ratio`` is ``None`` when the lower generations are recovered exactly.
    """

    n: int
    p: float
    final_error: float
    lower_error: float
    ratio: float | None
    predicted_ratio: float
    explicit_ratio: float | None

    @property
    def attained(self) -> float | None:
        return None if self.ratio is None else self.ratio / self.predicted_ratio


def corollary_gap_demo(n: int, p, spec: FunctionSpec | None = None) -> CorollaryReport:
    """Blow-up of the final generation, either for ``spec`` or for the worst-case tail."""
    if n < 2:
        raise ValidationError("the blow-up demonstration needs n >= 2")
    p = constants.check_p(p)
    if spec is None:
        z = worst_case_tail(n, n, p)
        err = estimate(samples_from_tail(z)).coeffs.values
    else:
        err = estimation_error(spec, n)
    final = lp_norm(err[generation_slice(n)], p)
    lower = lp_norm(err[: 2**n], p)
    # lower errors below rounding level of the final one count as exact
    exact = lower <= 1e-12 * max(final, 1.0)
    return CorollaryReport(
        n=n,
        p=p,
        final_error=final,
        lower_error=lower,
        ratio=None if exact else final / lower,
        predicted_ratio=constants.final_to_cumulative_ratio(p, n),
        explicit_ratio=constants.corollary_l2_ratio(n) if p == 2 else None,
    )


@dataclass
class DecayReport:
    p: float
    ns: list
    norms: list
    slope: float | None
    expected: float | None

    @property
    def exact_zero(self) -> bool:
        return self.slope is None

    def within(self, margin: float = 0.15) -> bool:
        """One-sided check ``slope <= expected + margin``."""
        return self.exact_zero or self.expected is None or self.slope <= self.expected + margin


EXPECTED_OFFSET = {1: 0.5, 2: 0.0, math.inf: -0.5}


def holder_decay_check(spec: FunctionSpec, n_range, p, alpha: float | None = None) -> DecayReport:
    """Least-squares slope of ``log2 ||z_{n+1}||_p`` against ``n``.

    With a Hoelder exponent ``alpha`` for ``f'`` the upper rate is
    ``-(alpha - 1/2)``, ``-alpha`` and ``-(alpha + 1/2)`` for ``p = 1, 2, inf``.
    """
    p = constants.check_p(p)
    ns = list(n_range)
    norms = [tail_from_function(spec, n).norm(p) for n in ns]
    expected = None if alpha is None else -(alpha - EXPECTED_OFFSET[p])
    if all(v == 0.0 for v in norms) or len(ns) < 2:
        return DecayReport(p, ns, norms, None, expected)
    if any(v == 0.0 for v in norms):
        raise ValidationError("tail norm vanishes at some but not all levels; slope undefined")
    slope = float(np.polyfit(ns, np.log2(norms), 1)[0])
    return DecayReport(p, ns, norms, slope, expected)


def _simpson(values: np.ndarray, h: float) -> float:
    return float(h / 3.0 * (values[0] + values[-1] + 4.0 * values[1:-1:2].sum() + 2.0 * values[2:-1:2].sum()))


def smooth_lp_norm(values: np.ndarray, p, h: float) -> float:
    """``L_p[0, 1]`` norm from values on a uniform grid (Simpson, or grid max for ``inf``)."""
    p = constants.check_p(p)
    if p == math.inf:
        return float(np.max(np.abs(values)))
    return _simpson(np.abs(values) ** p, h) ** (1.0 / p)


def piecewise_linear_lp_norm(knots: np.ndarray, p) -> float:
    """Exact ``L_p[0, 1]`` norm of the broken line through ``knots`` on a uniform grid."""
    p = constants.check_p(p)
    d = np.asarray(knots, dtype=np.float64)
    if p == math.inf:
        return float(np.max(np.abs(d)))
    h = 1.0 / (len(d) - 1)
    a, b = d[:-1], d[1:]
    if p == 2:
        return float(math.sqrt(np.sum(h * (a * a + a * b + b * b) / 3.0)))
    same = a * b >= 0
    aa, ab = np.abs(a), np.abs(b)
    total = aa + ab
    crossing = np.divide(a * a + b * b, 2.0 * total, out=np.zeros_like(total), where=total > 0)
    return float(np.sum(h * np.where(same, 0.5 * total, crossing)))


@dataclass
class FunctionalRow:
    quantity: str
    m: int
    p: float
    measured: float
    bound: float
    atol: float = 0.0

    @property
    def holds(self) -> bool:
        return self.measured <= self.bound * (1.0 + 1e-9) + self.atol


@dataclass
class FunctionalReport:
    n: int
    rows: list
    extremal_ratio: float
    extremal_target: float

    @property
    def passed(self) -> bool:
        return all(r.holds for r in self.rows)

    @property
    def extremal_gap(self) -> float:
        return abs(self.extremal_ratio - self.extremal_target) / self.extremal_target

    def violations(self):
        return [r for r in self.rows if not r.holds]


def extremal_cosine_ratio(n: int, extra_levels: int = QUADRATURE_EXTRA_LEVELS) -> float:
    """``||T f||_2 / ||f||_2`` for ``f = cos(2^{n-1} pi t)`` and ``T`` integration from 0."""
    level = n + extra_levels
    t = np.arange(2**level + 1) / 2.0**level
    freq = 2.0 ** (n - 1) * math.pi
    f = np.cos(freq * t)
    F = np.sin(freq * t) / freq
    h = 2.0**-level
    return smooth_lp_norm(F, 2, h) / smooth_lp_norm(f, 2, h)


def functional_error_check(spec: FunctionSpec, n: int, extra_levels: int = QUADRATURE_EXTRA_LEVELS) -> FunctionalReport:
    """Check the function-level bounds for the partial sums and the antiderivative."""
    if n < 2:
        raise ValidationError("functional bounds need n >= 2")
    f0 = spec.f0()
    samples = sample_F(spec, n + 1)
    result = estimate(samples, f0)
    floor = rounding_floor(samples)
    theta = spec.true_coeffs(n)
    z = tail_from_function(spec, n)
    consts = bound_constants(n)

    level = n + extra_levels
    h = 2.0**-level
    t = np.arange(2**level + 1) * h
    f_err = spec.f_grid(level) - reconstruct_f(result)(t)
    F_err = spec.F_grid(level) - reconstruct_F(result)(t)

    rows = []
    for p in constants.NORMS:
        zp = z.norm(p)
        for m in range(0, n + 1):
            diff = CoeffSet(m, theta.values[: 2 ** (m + 1)] - result.coeffs.values[: 2 ** (m + 1)])
            knots = np.arange(2 ** (m + 1) + 1) / 2.0 ** (m + 1)
            measured = piecewise_linear_lp_norm(eval_expansion(diff, 0.0, knots), p)
            bound = (consts.C[p] if m == n else consts.A[p]) * zp
            rows.append(FunctionalRow("C" if m == n else "A", m, p, measured, bound, floor))
        rows.append(
            FunctionalRow("a", n, p, smooth_lp_norm(F_err, p, h), consts.a[p] * smooth_lp_norm(f_err, p, h), floor)
        )
    target = 2.0 ** (-n + 1) / math.pi
    return FunctionalReport(n, rows, extremal_cosine_ratio(n, extra_levels), target)


def sweep_upper_bounds(specs, ns):
    """``check_upper_bounds`` over every (spec, n) pair, in parallel, in input order."""
    pairs = [(s, n) for s in specs for n in ns]
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        return list(pool.map(lambda sn: check_upper_bounds(*sn), pairs))

