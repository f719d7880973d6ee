"""Closed-form error-bound constants.

``n`` is the estimator level (data on the grid of level ``n + 1``).  Generation
``m`` runs over ``-1 .. n``.  ``p`` is one of ``1``, ``2`` or ``math.inf``.
"""

from __future__ import annotations

import math

from .exceptions import ValidationError

SQRT2 = math.sqrt(2.0)
NORMS = (1, 2, math.inf)


def check_p(p):
    if p in ("inf", "Inf", "infinity"):
        p = math.inf
    if p not in NORMS:
        raise ValidationError(f"p must be 1, 2 or inf, got {p!r}")
    return math.inf if p == math.inf else int(p)


def _check_m(m, n):
    if not -1 <= m <= n:
        raise ValidationError(f"generation {m} outside [-1, {n}]")


def generation_norm(p, m, n):
    """Exact norm of the error map onto generation ``m`` alone (``Rbar_m P_n``).

    For ``p = 2`` and ``m = n`` only a bracket is known; the upper end is
    returned (see :func:`l2_final_bracket`).
    """
    p = check_p(p)
    _check_m(m, n)
    if m == n:
        if p == 1:
            return 2.0 ** (n + 0.5) - 2.0**-1.5
        if p == math.inf:
            return 2.0 ** (n + 1.5) - SQRT2
        return l2_final_bracket(n)[1]
    mm = max(m, 0)
    if p == 1:
        return 2.0 ** ((mm - n - 3) / 2)
    if p == math.inf:
        return 2.0 ** ((n - 1 - mm) / 2)
    return 0.5


def cumulative_norm(p, m, n):
    """Exact norm of the error map onto generations ``-1 .. m`` (``R_m P_n``), ``m <= n - 1``."""
    p = check_p(p)
    _check_m(m, n)
    if m == n:
        raise ValidationError("the cumulative constant is only defined for m <= n - 1")
    if p == 1:
        tail = (2.0 ** ((m + 1) / 2) - 1.0) / (SQRT2 - 1.0) if m >= 0 else 0.0
        return 2.0 ** (-(n + 3) / 2) * (tail + 1.0)
    if p == math.inf:
        return 2.0 ** ((n - 1) / 2)
    return 0.5


def l2_final_bracket(n):
    """Lower and upper bound on the l2 norm of ``Rbar_n P_n``."""
    base = 2.0 / (1.0 - math.cos(math.pi / 2 ** (n + 1)))
    return math.sqrt(base - 0.75), math.sqrt(base + 0.75)


def final_to_cumulative_ratio(p, n):
    """Blow-up factor of the final generation over generations ``-1 .. n-1``.

    ``p = 1, inf``: exact ratio of the two operator norms.  ``p = 2``: the
    lower-bracket ratio ``sqrt(2/(1 - cos(pi/2^(n+1))) - 3/4) / (1/2)``.
    """
    p = check_p(p)
    if p == 2:
        return l2_final_bracket(n)[0] / 0.5
    return generation_norm(p, n, n) / cumulative_norm(p, n - 1, n)


def corollary_l2_ratio(n):
    """The weaker, explicit l2 blow-up factor ``2 sqrt(2^(2n+2)/pi^2 - 3/4)``."""
    return 2.0 * math.sqrt(2.0 ** (2 * n + 2) / math.pi**2 - 0.75)


def gamma2(n):
    return (1.0 + 2.0 ** (-n - 1) * l2_final_bracket(n)[1]) / math.sqrt(3.0)


def functional_constants(n):
    """The four families ``A_p, B_p, C_p, D_p`` keyed by ``p``."""
    g = gamma2(n)
    A = {1: 2.0 ** (-(n + 3) / 2), 2: 1.0 / math.sqrt(3.0), math.inf: 2.0 ** ((n + 1) / 2)}
    B = {1: 2.0**n, 2: 2.0 ** (n + 1) / math.sqrt(3.0), math.inf: 2.0 ** (n + 1)}
    C = {1: 2.0 ** (-(n + 1) / 2), 2: g, math.inf: 2.0 ** ((n + 3) / 2)}
    D = {1: 2.0 ** (n + 1), 2: 2.0 ** (n + 1) * g, math.inf: 2.0 ** (n + 2)}
    return A, B, C, D


def antiderivative_constants(n):
    """``a_p`` with ``||F - Fhat||_p <= a_p ||f - fhat||_p``."""
    return {1: 2.0 ** (-n - 1), 2: 2.0**-n / math.pi, math.inf: 2.0 ** (-n - 2)}
