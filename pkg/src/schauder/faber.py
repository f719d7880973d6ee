"""Faber-Schauder functions, their antiderivatives and interpolation coefficients.

Basis functions are indexed by generation ``m >= -1`` and position ``k``::

    e_{-1,0}(t) = t
    e_{0,0}(t)  = max(min(t, 1 - t), 0)
    e_{m,k}(t)  = 2**(-m/2) * e_{0,0}(2**m * t - k)

and ``psi_{m,k}`` is the antiderivative of ``e_{m,k}`` vanishing at 0.

Coefficient vectors are flattened generation by generation, so generation
``m >= 0`` occupies ``[2**m, 2**(m+1))`` and the linear term sits in slot 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .exceptions import ValidationError

MAX_GENERATION = 62


@dataclass(frozen=True, eq=False)
class DyadicIndex:
    """The grid point ``numerator * 2**-level`` held as exact integers."""

    numerator: int
    level: int

    def __post_init__(self):
        if self.level < 0 or self.numerator < 0:
            raise ValidationError(f"invalid dyadic index {self.numerator}/2^{self.level}")
        if self.numerator > 2**self.level:
            raise ValidationError(f"dyadic index {self.numerator}/2^{self.level} lies outside [0, 1]")

    @property
    def value(self) -> float:
        return self.numerator / 2.0**self.level

    def reduce(self) -> "DyadicIndex":
        k, lev = self.numerator, self.level
        if k == 0:
            return DyadicIndex(0, 0)
        while lev > 0 and k % 2 == 0:
            k //= 2
            lev -= 1
        return DyadicIndex(k, lev)

    def at_level(self, level: int) -> int:
        """Numerator of the same point on the grid of the given level."""
        red = self.reduce()
        if level < red.level:
            raise ValidationError(f"{self} is not a point of the level-{level} grid")
        return red.numerator << (level - red.level)

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, 2**self.level)

    def __eq__(self, other):
        if not isinstance(other, DyadicIndex):
            return NotImplemented
        return self.reduce()._key() == other.reduce()._key()

    def __hash__(self):
        return hash(self.reduce()._key())

    def _key(self):
        return (self.numerator, self.level)

    def __str__(self):
        return f"{self.numerator}/2^{self.level}"


@dataclass(frozen=True)
class BasisIndex:
    m: int
    k: int = 0

    def __post_init__(self):
        if self.m < -1 or self.m > MAX_GENERATION:
            raise ValidationError(f"generation must lie in [-1, {MAX_GENERATION}], got {self.m}")
        if self.m == -1 and self.k != 0:
            raise ValidationError("the linear basis function only has k = 0")
        if self.m >= 0 and not 0 <= self.k < 2**self.m:
            raise ValidationError(f"k must lie in [0, 2^{self.m}), got {self.k}")

    @classmethod
    def coerce(cls, idx) -> "BasisIndex":
        if isinstance(idx, BasisIndex):
            return idx
        m, k = idx
        return cls(int(m), int(k))


def generation_size(m: int) -> int:
    return 2 ** max(m, 0)


def generation_slice(m: int) -> slice:
    if m == -1:
        return slice(0, 1)
    return slice(2**m, 2 ** (m + 1))


class CoeffSet:
    """Faber-Schauder coefficients for generations ``-1 .. max_generation``."""

    def __init__(self, max_generation: int, values):
        if max_generation < -1 or max_generation > MAX_GENERATION:
            raise ValidationError(f"invalid max_generation {max_generation}")
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (2 ** (max_generation + 1),):
            raise ValidationError(
                f"expected {2 ** (max_generation + 1)} coefficients for max_generation "
                f"{max_generation}, got shape {values.shape}"
            )
        self.max_generation = max_generation
        self.values = values

    @classmethod
    def zeros(cls, max_generation: int) -> "CoeffSet":
        return cls(max_generation, np.zeros(2 ** (max_generation + 1)))

    @classmethod
    def from_generations(cls, generations) -> "CoeffSet":
        """Build from a sequence ``[theta_{-1}, theta_0, ..., theta_M]`` of per-generation arrays."""
        parts = [np.atleast_1d(np.asarray(g, dtype=np.float64)) for g in generations]
        for i, part in enumerate(parts):
            m = i - 1
            if part.shape != (generation_size(m),):
                raise ValidationError(f"generation {m} needs {generation_size(m)} values, got {part.shape}")
        return cls(len(parts) - 2, np.concatenate(parts))

    def generation(self, m: int) -> np.ndarray:
        if not -1 <= m <= self.max_generation:
            raise ValidationError(f"generation {m} not present (max {self.max_generation})")
        return self.values[generation_slice(m)]

    def get(self, m: int, k: int = 0) -> float:
        BasisIndex(m, k)
        return float(self.generation(m)[k])

    def upto(self, max_generation: int) -> "CoeffSet":
        if max_generation > self.max_generation:
            raise ValidationError("cannot extend a coefficient set by slicing")
        return CoeffSet(max_generation, self.values[: 2 ** (max_generation + 1)].copy())

    def extended(self, max_generation: int) -> "CoeffSet":
        """Zero-pad up to ``max_generation``."""
        out = np.zeros(2 ** (max_generation + 1))
        n = min(len(self.values), len(out))
        out[:n] = self.values[:n]
        return CoeffSet(max_generation, out)

    def items(self) -> Iterator[tuple[int, int, float]]:
        for m in range(-1, self.max_generation + 1):
            for k, v in enumerate(self.generation(m)):
                yield m, k, float(v)

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        if not isinstance(other, CoeffSet):
            return NotImplemented
        return self.max_generation == other.max_generation and np.array_equal(self.values, other.values)

    def __repr__(self):
        return f"CoeffSet(max_generation={self.max_generation}, values={self.values!r})"


def tent(t):
    """``e_{0,0}``; the hat on [0, 1] with peak 1/2."""
    t = np.asarray(t, dtype=np.float64)
    return np.maximum(np.minimum(t, 1.0 - t), 0.0)


def _psi00(s):
    s = np.asarray(s, dtype=np.float64)
    out = np.where(s < 0.5, 0.5 * s * s, 0.25 - 0.5 * (1.0 - s) ** 2)
    out = np.where(s < 0.0, 0.0, out)
    return np.where(s >= 1.0, 0.25, out)


def eval_e(idx, t):
    """Evaluate the Faber-Schauder function ``e_{m,k}`` at ``t``."""
    idx = BasisIndex.coerce(idx)
    t = np.asarray(t, dtype=np.float64)
    if idx.m == -1:
        out = t.copy()
    else:
        out = 2.0 ** (-idx.m / 2) * tent(2.0**idx.m * t - idx.k)
    return out if out.ndim else float(out)


def eval_psi(idx, t):
    """Evaluate ``psi_{m,k}(t) = int_0^t e_{m,k}(s) ds``."""
    idx = BasisIndex.coerce(idx)
    t = np.asarray(t, dtype=np.float64)
    if idx.m == -1:
        out = 0.5 * t * t
    else:
        out = 2.0 ** (-1.5 * idx.m) * _psi00(2.0**idx.m * t - idx.k)
    return out if out.ndim else float(out)


def grid_level(n_samples: int) -> int:
    """Level ``L`` of a dyadic grid with ``n_samples = 2**L + 1`` points."""
    if n_samples < 2 or (n_samples - 1) & (n_samples - 2):
        raise ValidationError(f"sample count must be 2^L + 1, got {n_samples}")
    return (n_samples - 1).bit_length() - 1


def coeffs_from_function(f_samples, max_generation: int | None = None):
    """Faber-Schauder coefficients of the piecewise-linear interpolant of ``f``.

    ``f_samples`` are the values of ``f`` on the grid ``k * 2**-(M+1)``.
    Returns ``(coeffs, f(0))``.
    """
    f = np.asarray(f_samples, dtype=np.float64)
    level = grid_level(len(f))
    M = level - 1
    if max_generation is not None and max_generation != M:
        raise ValidationError(f"max_generation {max_generation} needs 2^{max_generation + 1} + 1 samples, got {len(f)}")
    values = np.empty(2**level)
    values[0] = f[-1] - f[0]
    for m in range(M + 1):
        stride = 2 ** (level - m)
        left = f[0:-1:stride]
        right = f[stride::stride]
        mid = f[stride // 2 :: stride]
        values[generation_slice(m)] = 2.0 ** (m / 2) * (2.0 * mid - left - right)
    return CoeffSet(M, values), float(f[0])


def eval_expansion(coeffs: CoeffSet, f0: float, t):
    """Evaluate ``f0 + sum theta_{m,k} e_{m,k}(t)``; one active k per generation."""
    t = np.asarray(t, dtype=np.float64)
    tt = np.atleast_1d(t)
    out = f0 + coeffs.values[0] * tt
    for m in range(coeffs.max_generation + 1):
        size = 2**m
        s = size * tt
        k = np.clip(np.floor(s).astype(np.int64), 0, size - 1)
        out = out + coeffs.generation(m)[k] * 2.0 ** (-m / 2) * tent(s - k)
    return out.reshape(t.shape) if t.ndim else float(out[0])


def second_order_modulus(f_samples, j: int) -> float:
    """Grid-restricted second-order modulus of continuity at step ``2**-j``.

    Only pairs of grid points whose midpoint is again a grid point are
    searched, so this is a lower approximation of the continuum supremum.
    """
    f = np.asarray(f_samples, dtype=np.float64)
    level = grid_level(len(f))
    if j < 0 or j > level:
        raise ValidationError(f"step 2^-{j} is not resolved by a level-{level} grid")
    best = 0.0
    for h in range(1, 2 ** (level - j - 1) + 1 if j < level else 1):
        diff = f[: -2 * h] + f[2 * h :] - 2.0 * f[h:-h]
        best = max(best, float(np.max(np.abs(diff))))
    return best
