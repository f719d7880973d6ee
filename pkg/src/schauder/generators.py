"""Test functions with exactly known coefficients and antiderivatives.

The Takagi class ``f(t) = sum_m c_m phi(2**m t)``, with ``phi`` the tent map
of period one and peak 1/2, has Faber-Schauder coefficients
``theta_{m,k} = 2**(m/2) c_m`` and no linear term, so it serves as an exact
oracle for the estimator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial

from .estimator import SampleVector
from .exceptions import ValidationError
from .faber import CoeffSet, _psi00, coeffs_from_function, generation_slice, tent

DEFAULT_TRUNCATION = 40


@dataclass(frozen=True)
class TakagiSpec:
    """Coefficients ``c_0 .. c_M`` of a truncated Takagi-class function."""

    c: tuple

    def __post_init__(self):
        c = tuple(float(x) for x in np.atleast_1d(self.c))
        if not c:
            raise ValidationError("a Takagi spec needs at least one coefficient")
        if not all(math.isfinite(x) for x in c):
            raise ValidationError("Takagi coefficients must be finite")
        object.__setattr__(self, "c", c)

    @property
    def M(self) -> int:
        return len(self.c) - 1

    @classmethod
    def geometric(cls, ratio: float, M: int = DEFAULT_TRUNCATION) -> "TakagiSpec":
        return cls(tuple(ratio**m for m in range(M + 1)))

    def tail_sum(self, start: int) -> float:
        return math.fsum(self.c[start:])


def _as_t(t):
    t = np.asarray(t, dtype=np.float64)
    if np.any((t < 0) | (t > 1)):
        raise ValidationError("t must lie in [0, 1]")
    return t


def takagi_f(spec: TakagiSpec, t):
    """``sum_m c_m phi(2**m t)`` with ``phi(s) = dist(s, Z)``."""
    t = _as_t(t)
    out = np.zeros_like(t)
    for m, c in enumerate(spec.c):
        s = 2.0**m * t
        out = out + c * tent(s - np.floor(s))
    return out if out.ndim else float(out)


def takagi_f_schauder(spec: TakagiSpec, t):
    """Same function summed over the Faber-Schauder functions ``e_{m,k}``."""
    t = _as_t(t)
    out = np.zeros_like(t)
    for m, c in enumerate(spec.c):
        size = 2**m
        s = size * np.atleast_1d(t)
        k = np.clip(np.floor(s), 0, size - 1)
        out = out + (2.0 ** (m / 2) * c * 2.0 ** (-m / 2) * tent(s - k)).reshape(t.shape)
    return out if out.ndim else float(out)


def takagi_F(spec: TakagiSpec, t):
    """``int_0^t f``, exact at dyadic points and accurate elsewhere.

    Generation ``m`` contributes ``2**(m/2) c_m sum_k psi_{m,k}(t)``; every
    cell left of ``t`` adds a full ``2**(-3m/2) / 4`` and one cell is partial.
    """
    t = _as_t(t)
    tt = np.atleast_1d(t)
    terms = []
    for m, c in enumerate(spec.c):
        s = 2.0**m * tt
        k0 = np.floor(s)
        terms.append(c * 2.0 ** (-m) * (k0 / 4.0 + _psi00(s - k0)))
    out = np.array([math.fsum(col) for col in np.array(terms).T]).reshape(t.shape)
    return out if out.ndim else float(out)


def takagi_true_coeffs(spec: TakagiSpec, up_to_generation: int) -> CoeffSet:
    coeffs = CoeffSet.zeros(up_to_generation)
    for m in range(min(spec.M, up_to_generation) + 1):
        coeffs.values[generation_slice(m)] = 2.0 ** (m / 2) * spec.c[m]
    return coeffs


def takagi_expected_estimate(spec: TakagiSpec, n: int) -> CoeffSet:
    """Output of the estimator at level ``n`` with ``f0_hat = 0``.

    Generations below ``n`` are recovered exactly; the final generation
    absorbs the whole tail ``2**(n/2) sum_{m >= n} c_m``.
    """
    coeffs = takagi_true_coeffs(spec, n)
    coeffs.values[generation_slice(n)] = 2.0 ** (n / 2) * spec.tail_sum(n)
    return coeffs


KINDS = ("takagi", "cos_pi", "poly", "sampled")


@dataclass(frozen=True)
class FunctionSpec:
    """A test function ``f`` together with its antiderivative ``F`` (``F(0) = 0``).

    ``takagi``: params ``c``.  ``cos_pi``: ``F = amplitude (1 - cos pi t)``.
    ``poly``: ``f`` coefficients in ascending powers.  ``sampled``: values of
    ``F`` on a dyadic grid, with no exact derivative.
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unsupported function kind {self.kind!r}; expected one of {KINDS}")

    @classmethod
    def takagi(cls, c) -> "FunctionSpec":
        return cls("takagi", {"spec": TakagiSpec(tuple(c))})

    @classmethod
    def cos_pi(cls, amplitude: float = 1.0) -> "FunctionSpec":
        return cls("cos_pi", {"amplitude": float(amplitude)})

    @classmethod
    def sin_pi(cls) -> "FunctionSpec":
        """``f(t) = sin(pi t)``."""
        return cls.cos_pi(1.0 / math.pi)

    @classmethod
    def poly(cls, f_coeffs) -> "FunctionSpec":
        return cls("poly", {"f": tuple(float(x) for x in f_coeffs)})

    @classmethod
    def sampled(cls, values) -> "FunctionSpec":
        return cls("sampled", {"samples": SampleVector.from_values(values)})

    @property
    def has_derivative(self) -> bool:
        return self.kind != "sampled"

    def F(self, t):
        t = _as_t(t)
        if self.kind == "takagi":
            return takagi_F(self.params["spec"], t)
        if self.kind == "cos_pi":
            return self.params["amplitude"] * (1.0 - np.cos(np.pi * t))
        if self.kind == "poly":
            return Polynomial(self.params["f"]).integ()(t)
        samples = self.params["samples"]
        return np.interp(t, samples.grid, samples.values)

    def f(self, t):
        t = _as_t(t)
        if self.kind == "takagi":
            return takagi_f(self.params["spec"], t)
        if self.kind == "cos_pi":
            return self.params["amplitude"] * np.pi * np.sin(np.pi * t)
        if self.kind == "poly":
            return Polynomial(self.params["f"])(t)
        raise ValidationError("sampled functions carry no exact derivative")

    def F_grid(self, level: int) -> np.ndarray:
        k = np.arange(2**level + 1)
        if self.kind == "sampled":
            samples = self.params["samples"]
            if level > samples.level:
                raise ValidationError(f"sampled data has level {samples.level}, cannot refine to {level}")
            return samples.values[:: 2 ** (samples.level - level)].copy()
        return np.asarray(self.F(k / 2.0**level), dtype=np.float64)

    def f_grid(self, level: int) -> np.ndarray:
        return np.asarray(self.f(np.arange(2**level + 1) / 2.0**level), dtype=np.float64)

    def f0(self) -> float:
        return float(self.f(0.0)) if self.has_derivative else 0.0

    def true_coeffs(self, up_to_generation: int, *, level: int | None = None) -> CoeffSet:
        """Exact coefficients for Takagi; interpolation coefficients at ``level`` otherwise.

        Coefficients of generation ``m`` are read from values at level
        ``m + 1`` only, so any level above ``up_to_generation`` gives the
        exact ``theta_{m,k}`` for smooth kinds as well.
        """
        if self.kind == "takagi":
            return takagi_true_coeffs(self.params["spec"], up_to_generation)
        level = up_to_generation + 1 if level is None else level
        coeffs, _ = coeffs_from_function(self.f_grid(level))
        return coeffs.upto(up_to_generation) if coeffs.max_generation >= up_to_generation else coeffs.extended(up_to_generation)


def sample_F(spec, level: int) -> SampleVector:
    """``F`` on the level-``level`` grid."""
    if isinstance(spec, TakagiSpec):
        spec = FunctionSpec("takagi", {"spec": spec})
    if not isinstance(spec, FunctionSpec):
        raise ValidationError(f"cannot sample {type(spec).__name__}")
    return SampleVector(level, spec.F_grid(level))
