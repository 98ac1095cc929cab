"""Special functions needed by the coefficient and bound formulas.

Everything here is evaluated from scratch with running-term recurrences in
double precision; no external special-function library is used.  The menu is
deliberately small because the callers only ever need:

* the regularized Gauss hypergeometric function 2F1(a,b;c;z)/Gamma(c) with
  integer parameters and z = |r|^2 in [0, 1),
* the zero-balanced series 3F2(1,1,1; 3/2,3/2; z) = sum_k (k!)^2 z^k / ((3/2)_k)^2,
* the modified Struve function L0,
* a couple of classical constants.

Gamma factors only ever occur at integer and half-integer arguments, where the
recurrence from Gamma(1) = 1 and Gamma(1/2) = sqrt(pi) is exact; for
nonpositive integer c the reciprocal 1/Gamma(c) vanishes, which is what makes
the regularized 2F1 finite there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, ConfigError, DomainError


@dataclass(frozen=True)
class EvalAccuracy:
    """Accuracy budget for series evaluation."""

    rel_tol: float = 1e-12
    max_terms: int = 10 ** 6

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ConfigError("rel_tol must be positive")
        if self.max_terms < 1:
            raise ConfigError("max_terms must be >= 1")


DEFAULT_ACCURACY = EvalAccuracy()


@dataclass(frozen=True)
class MathConstants:
    """Classical constants used by the integrability bounds (published values)."""

    zeta3: float = 1.2020569031595942854
    catalan: float = 0.9159655941772190151

    @property
    def lorentzian_l1_constant(self) -> float:
        """28*zeta(3)/pi - 8*C, the closed constant of the exponential-kernel bound."""
        return 28.0 * self.zeta3 / math.pi - 8.0 * self.catalan


def math_constants() -> MathConstants:
    return MathConstants()


def _int_gamma(c: int) -> float:
    """Gamma(c) for integer c >= 1 via the factorial recurrence."""
    return float(math.factorial(c - 1))


def gauss_2f1_regularized(a: int, b: int, c: int, z: float,
                          acc: EvalAccuracy = DEFAULT_ACCURACY) -> float:
    """Regularized Gauss hypergeometric function 2F1(a,b;c;z)/Gamma(c).

    Series: sum_m (a)_m (b)_m z^m / (m! Gamma(c+m)).  For b <= 0 the series
    terminates at m = -b (polynomial); for c <= 0 the first 1-c terms vanish
    because 1/Gamma hits a pole, so the result stays finite.

    Parameters are integers by construction of the callers; z must lie in
    [0, 1).  Raises DomainError outside the domain and AccuracyError (carrying
    the partial sum and a tail estimate) if the budget is exhausted.
    """
    if not 0.0 <= z < 1.0:
        raise DomainError(f"gauss_2f1_regularized requires z in [0,1), got {z}")

    m0 = 1 - c if c <= 0 else 0
    if b <= 0 and -b < m0:
        return 0.0  # every surviving Pochhammer term sits on a Gamma pole

    # leading term at m0; note Gamma(c+m0) = Gamma(1) = 1 when m0 = 1-c
    t = 1.0
    for i in range(m0):
        t *= (a + i) * (b + i) / (1.0 + i)
    t *= z ** m0
    if m0 == 0:
        t /= _int_gamma(c)
    s = t

    if b <= 0:
        # terminating: exact finite loop
        for m in range(m0, -b):
            t *= (a + m) * (b + m) * z / ((m + 1.0) * (c + m))
            s += t
        return s

    m = m0
    m_safe = 2 * (abs(a) + abs(b) + abs(c)) + 8
    while m - m0 < acc.max_terms:
        ratio = (a + m) * (b + m) * z / ((m + 1.0) * (c + m))
        t *= ratio
        m += 1
        s += t
        if m > m_safe:
            q = max(abs(ratio), z)
            if q < 1.0:
                tail = abs(t) * q / (1.0 - q)
                if tail <= acc.rel_tol * abs(s):
                    return s
    tail = abs(t) * z / max(1.0 - z, 1e-300)
    raise AccuracyError(
        f"2F1reg({a},{b};{c};{z}) did not converge in {acc.max_terms} terms",
        partial_value=s, tail_estimate=tail)


def gauss_2f1_regularized_grid(a: int, b: int, c: int, z: np.ndarray,
                               acc: EvalAccuracy = DEFAULT_ACCURACY) -> np.ndarray:
    """Vector form of :func:`gauss_2f1_regularized` over an array of z values.

    Identical series and stopping logic, iterated until the geometric tail
    bound clears rel_tol on every lane.  Used by the coefficient table builder
    where one (a,b,c) triple is swept over a whole lag grid.
    """
    z = np.asarray(z, dtype=float)
    if z.size and (z.min() < 0.0 or z.max() >= 1.0):
        raise DomainError("gauss_2f1_regularized_grid requires z in [0,1)")

    m0 = 1 - c if c <= 0 else 0
    out_zero = b <= 0 and -b < m0
    if out_zero:
        return np.zeros_like(z)

    t = np.ones_like(z)
    lead = 1.0
    for i in range(m0):
        lead *= (a + i) * (b + i) / (1.0 + i)
    t *= lead * z ** m0
    if m0 == 0:
        t /= _int_gamma(c)
    s = t.copy()

    if b <= 0:
        for m in range(m0, -b):
            t = t * ((a + m) * (b + m) * z / ((m + 1.0) * (c + m)))
            s += t
        return s

    m = m0
    m_safe = 2 * (abs(a) + abs(b) + abs(c)) + 8
    zmax = float(z.max()) if z.size else 0.0
    while m - m0 < acc.max_terms:
        ratio = (a + m) * (b + m) / ((m + 1.0) * (c + m))
        t = t * (ratio * z)
        m += 1
        s += t
        if m > m_safe:
            q = max(abs(ratio) * zmax, zmax)
            if q < 1.0 and np.all(np.abs(t) * q / (1.0 - q) <= acc.rel_tol * np.abs(s) + 1e-300):
                return s
    raise AccuracyError(
        f"2F1reg grid ({a},{b};{c}) did not converge in {acc.max_terms} terms",
        partial_value=s, tail_estimate=float(np.max(np.abs(t))) * zmax / max(1 - zmax, 1e-300))


def hyp3f2_zero_balanced(z: float, acc: EvalAccuracy = DEFAULT_ACCURACY) -> float:
    """3F2(1,1,1; 3/2,3/2; z) = sum_k (k!)^2 z^k / ((3/2)_k)^2 for z in [0,1).

    The series is zero-balanced: it diverges logarithmically as z -> 1, so the
    domain boundary is excluded.  Successive term ratios ((k+1)/(k+3/2))^2 z
    increase toward z from below, which gives a clean geometric tail majorant
    |t| z/(1-z).
    """
    if not 0.0 <= z < 1.0:
        raise DomainError(f"hyp3f2_zero_balanced requires z in [0,1), got {z}")
    geo = z / (1.0 - z)
    s = 1.0
    t = 1.0
    k = 0
    chunk = 1 << 16
    while k < acc.max_terms:
        n = min(chunk, acc.max_terms - k)
        idx = np.arange(k, k + n, dtype=float)
        terms = t * np.cumprod(((idx + 1.0) / (idx + 1.5)) ** 2 * z)
        s += float(np.sum(terms))
        t = float(terms[-1])
        k += n
        if t * geo <= acc.rel_tol * s:
            return s
    raise AccuracyError(
        f"hyp3f2_zero_balanced({z}) did not converge in {acc.max_terms} terms",
        partial_value=s, tail_estimate=t * geo)


def struve_l0(x: float, acc: EvalAccuracy = DEFAULT_ACCURACY) -> float:
    """Modified Struve function L0(x) = sum_k (x/2)^(2k+1) / Gamma(k+3/2)^2, x >= 0.

    All terms are positive; L0 is zero at the origin (odd series), increasing,
    with leading behaviour 2x/pi from the first term (Gamma(3/2)^2 = pi/4).
    """
    if x < 0:
        raise DomainError(f"struve_l0 requires x >= 0, got {x}")
    if x == 0.0:
        return 0.0
    t = (x / 2.0) * 4.0 / math.pi  # (x/2) / Gamma(3/2)^2
    s = t
    k = 0
    while k < acc.max_terms:
        ratio = (x / 2.0) ** 2 / (k + 1.5) ** 2
        t *= ratio
        s += t
        k += 1
        if ratio < 1.0 and t * ratio / (1.0 - ratio) <= acc.rel_tol * s:
            return s
    raise AccuracyError(
        f"struve_l0({x}) did not converge in {acc.max_terms} terms",
        partial_value=s, tail_estimate=t)
