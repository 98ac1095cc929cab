"""Series coefficients of the reciprocal-process autocorrelation expansion.

The autocorrelation of s(t) = 1/(w(t)+w0) expands in even powers of the
mean-to-sigma ratio with lag-dependent coefficients.  Each even-order
coefficient is a finite double sum over regularized Gauss hypergeometric
values,

    Omega_n = (-1)^(n/2) * sum_{k=0..n} sum_{j=0..min(k,n/2)}
              (-1)^k n! / ((n/2-j)! (k-j)!)
              * 2F1reg(1+j, 1+j-k+n/2; 2+2j-k; |r|^2) * conj(r)^(2j-k+1),

with terms j > n/2 dropped because the (n/2-j)! factor sits on a negative
integer factorial pole.  Odd orders vanish identically.  Low even orders have
elementary closed forms for real r which this module also provides as an
independent cross-check path.

Numerical note: the double sum cancels increasingly violently as |r| -> 1 and
n grows; in double precision the relative accuracy of Omega_n degrades past
roughly n = 14 for |r| > 0.95.  The series assembly is insensitive to this
(the noisy orders are divided by n!), and the tests pin accuracy exactly
where the acceptance tolerances demand it.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, UnsupportedOrderError
from .kernels import CorrelationKernel
from .specfun import (DEFAULT_ACCURACY, EvalAccuracy, gauss_2f1_regularized,
                      gauss_2f1_regularized_grid)

#: below this |r| the double sum is replaced by the centered ray expansion
SMALL_R_THRESHOLD = 1e-4


def omega_limit(n: int) -> float:
    """Large-lag limit of Omega_n: 2 (-1)^(n/2+1) (2^(n/2)-1) n! / (n/2+1)!.

    Evaluated in exact integer arithmetic before the final float conversion.
    Zero for n = 0 and for all odd n.
    """
    if n < 0:
        raise DomainError("order must be nonnegative")
    if n % 2 == 1:
        return 0.0
    m = n // 2
    num = 2 * (2 ** m - 1) * math.factorial(n)
    return float((-1) ** (m + 1) * num // math.factorial(m + 1))


def omega_bound(n: int, abs_r: float) -> float:
    """Magnitude majorant for Omega_n: 2^(3n/2-1) n pi Gamma(n/2) (1-|r|)^(-1-n/2).

    Valid for even n >= 2 and |r| < 1.  Loose by design; used as an inequality
    gate and as the term majorant behind series tail estimates.
    """
    if n < 2 or n % 2 == 1:
        raise DomainError("bound defined for even n >= 2")
    if not 0.0 <= abs_r < 1.0:
        raise DomainError(f"bound requires |r| < 1, got {abs_r}")
    return (2.0 ** (1.5 * n - 1) * n * math.pi * math.factorial(n // 2 - 1)
            / (1.0 - abs_r) ** (1.0 + n / 2.0))


def _omega_general_direct(n: int, r: complex, acc: EvalAccuracy) -> complex:
    """The literal double sum; assumes |r| in [SMALL_R_THRESHOLD, 1)."""
    z = abs(r) ** 2
    rs = r.conjugate()
    total = 0.0 + 0.0j
    for k in range(n + 1):
        for j in range(min(k, n // 2) + 1):
            comb = ((-1) ** k * math.factorial(n)
                    / (math.factorial(n // 2 - j) * math.factorial(k - j)))
            f = gauss_2f1_regularized(1 + j, 1 + j - k + n // 2, 2 + 2 * j - k, z, acc)
            total += comb * f * rs ** (2 * j - k + 1)
    return (-1) ** (n // 2) * total


_RAY_CACHE: dict = {}


def _ray_coefficients(n: int, u: complex, acc: EvalAccuracy):
    """Quadratic expansion of Omega_n along the ray r = t*u, fitted at t = 1e-2.

    Richardson elimination from evaluations at h and h/2 pins the linear and
    quadratic coefficients around the exact limit value, avoiding the 0/0
    cancellations of the direct sum at tiny |r|.
    """
    key = (n, complex(u))
    hit = _RAY_CACHE.get(key)
    if hit is not None:
        return hit
    h = 1e-2
    lim = omega_limit(n)
    fh = _omega_general_direct(n, u * h, acc)
    fh2 = _omega_general_direct(n, u * (h / 2), acc)
    a1 = (4.0 * fh2 - fh - 3.0 * lim) / h
    a2 = (fh - lim - a1 * h) / h ** 2
    _RAY_CACHE[key] = (lim, a1, a2)
    return lim, a1, a2


def omega_n_general(n: int, r: complex, acc: EvalAccuracy = DEFAULT_ACCURACY) -> complex:
    """Omega_n for arbitrary complex r with |r| < 1.

    Odd n returns exactly 0. For |r| below SMALL_R_THRESHOLD the value comes
    from the centered ray expansion (limit + linear + quadratic), never from
    the raw sum, so r -> 0 is well-defined including r = 0 itself.
    """
    if n < 0:
        raise DomainError("order must be nonnegative")
    if n % 2 == 1:
        return 0.0 + 0.0j
    r = complex(r)
    mag = abs(r)
    if mag >= 1.0:
        raise DomainError(f"omega_n_general requires |r| < 1, got |r| = {mag}")
    if mag < SMALL_R_THRESHOLD:
        if mag == 0.0:
            return complex(omega_limit(n))
        lim, a1, a2 = _ray_coefficients(n, r / mag, acc)
        return lim + a1 * mag + a2 * mag * mag
    return _omega_general_direct(n, r, acc)


def omega_n_closed_real(n: int, r: float) -> float:
    """Closed forms of Omega_n for real r, orders 0, 2, 4, 6 only.

    These are rational-plus-logarithm expressions; they cancel catastrophically
    as r -> 0, so the same small-|r| guard applies as for the general path.
    """
    if n not in (0, 2, 4, 6):
        raise UnsupportedOrderError(
            f"no closed form for order {n}; use omega_n_general")
    if not abs(r) < 1.0:
        raise DomainError(f"closed forms require |r| < 1, got {r}")
    if abs(r) < SMALL_R_THRESHOLD:
        return complex(omega_n_general(n, complex(r))).real
    ln = math.log(1.0 - r * r)
    if n == 0:
        return -ln / r
    if n == 2:
        return 4.0 / (1.0 + r) + 2.0 * ln / r ** 2
    if n == 4:
        return -12.0 / r - 24.0 / (1.0 + r) ** 2 - 12.0 * ln / r ** 3
    return (120.0 / r ** 2 + 320.0 / (1.0 + r) ** 3 + 80.0 / (1.0 + r) ** 2
            + 80.0 / (1.0 + r) + 120.0 * ln / r ** 4)


def omega0_closed(r: complex) -> complex:
    """Omega_0 = -ln(1-|r|^2)/r for complex r (cross-check helper)."""
    r = complex(r)
    if not 0 < abs(r) < 1:
        raise DomainError("omega0_closed requires 0 < |r| < 1")
    return -math.log(1.0 - abs(r) ** 2) / r


def omega2_closed(r: complex) -> complex:
    """Omega_2 closed form for complex r (cross-check helper)."""
    r = complex(r)
    if not 0 < abs(r) < 1:
        raise DomainError("omega2_closed requires 0 < |r| < 1")
    z = abs(r) ** 2
    rs = r.conjugate()
    return 2.0 * (1.0 - 2.0 * rs + rs / r) / (1.0 - z) + 2.0 * math.log(1.0 - z) / r ** 2


def omega_prime(n: int, r: complex, acc: EvalAccuracy = DEFAULT_ACCURACY) -> complex:
    """Centered coefficient Omega'_n = Omega_n - lim_{tau->inf} Omega_n."""
    return omega_n_general(n, r, acc) - omega_limit(n)


# ---------------------------------------------------------------------------
# batch evaluation over a lag grid
# ---------------------------------------------------------------------------

def _omega_general_grid(n: int, r: np.ndarray, acc: EvalAccuracy) -> np.ndarray:
    """Vectorized double sum over an array of r values (|r| >= threshold)."""
    z = np.abs(r) ** 2
    rs = np.conj(r)
    total = np.zeros_like(rs, dtype=complex)
    for k in range(n + 1):
        for j in range(min(k, n // 2) + 1):
            comb = ((-1) ** k * math.factorial(n)
                    / (math.factorial(n // 2 - j) * math.factorial(k - j)))
            f = gauss_2f1_regularized_grid(1 + j, 1 + j - k + n // 2, 2 + 2 * j - k, z, acc)
            total += comb * f * rs ** (2 * j - k + 1)
    return (-1) ** (n // 2) * total


def omega_n_over_grid(n: int, r: np.ndarray, acc: EvalAccuracy = DEFAULT_ACCURACY) -> np.ndarray:
    """Omega_n evaluated over an array of correlation values.

    Splits the grid into the direct-sum region and the small-|r| expansion
    region; results are identical to per-point :func:`omega_n_general`.
    """
    r = np.asarray(r, dtype=complex)
    mag = np.abs(r)
    if mag.size and mag.max() >= 1.0:
        raise DomainError("omega_n_over_grid requires |r| < 1 everywhere")
    out = np.empty(r.shape, dtype=complex)
    if n % 2 == 1:
        out[:] = 0.0
        return out
    small = mag < SMALL_R_THRESHOLD
    if np.any(~small):
        out[~small] = _omega_general_grid(n, r[~small], acc)
    if np.any(small):
        idx = np.nonzero(small)[0]
        lim = omega_limit(n)
        re_all = np.isrealobj(r) or np.all(r[idx].imag == 0.0)
        if re_all:
            # two rays at most; vectorize per sign
            for sgn in (1.0, -1.0):
                m = idx[(np.sign(r[idx].real) == sgn)]
                if m.size:
                    l0, a1, a2 = _ray_coefficients(n, complex(sgn), acc)
                    t = mag[m]
                    out[m] = l0 + a1 * t + a2 * t * t
            zer = idx[r[idx] == 0.0]
            out[zer] = lim
        else:
            for i in idx:
                out[i] = omega_n_general(n, complex(r[i]), acc)
    return out


@dataclass
class CoefficientTable:
    """Omega_n and centered Omega'_n over a lag grid.

    values[i, k] holds order ``orders[i]`` at lag ``lags[k]``; ``centered`` is
    values minus the per-order limit; ``limit_values`` are those limits.
    """

    orders: list
    lags: np.ndarray
    values: np.ndarray
    centered: np.ndarray
    limit_values: np.ndarray
    kernel_info: dict = field(default_factory=dict)

    def order_index(self, n: int) -> int:
        return self.orders.index(n)

    def to_csv(self, path) -> None:
        """Write rows (tau, n, re_omega, im_omega, re_omega_prime, im_omega_prime)."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["tau", "n", "re_omega", "im_omega",
                        "re_omega_prime", "im_omega_prime"])
            for k, tau in enumerate(self.lags):
                for i, n in enumerate(self.orders):
                    v = self.values[i, k]
                    c = self.centered[i, k]
                    w.writerow([repr(float(tau)), n,
                                repr(float(v.real)), repr(float(v.imag)),
                                repr(float(c.real)), repr(float(c.imag))])


def build_table(kernel: CorrelationKernel, lags, max_order: int,
                acc: EvalAccuracy = DEFAULT_ACCURACY) -> CoefficientTable:
    """Evaluate all even orders up to max_order over a lag grid.

    The grid must not contain tau = 0, where |r| = 1 and every coefficient
    diverges; midpoint grids (tau = (k+1/2) dtau) are the intended callers.
    """
    if max_order % 2 == 1 or max_order < 0:
        raise DomainError("max_order must be even and nonnegative")
    lags = np.asarray(lags, dtype=float)
    if np.any(lags == 0.0):
        raise DomainError(
            "lag grid contains tau = 0 (|r| = 1 singularity); "
            "use a midpoint grid that excludes the origin")
    r = np.asarray(kernel.eval(lags), dtype=complex)
    if np.abs(r).max() >= 1.0:
        raise DomainError("kernel reaches |r| = 1 on this grid")
    orders = list(range(0, max_order + 1, 2))
    values = np.empty((len(orders), len(lags)), dtype=complex)
    for i, n in enumerate(orders):
        values[i] = omega_n_over_grid(n, r, acc)
    limits = np.array([omega_limit(n) for n in orders])
    centered = values - limits[:, None]
    _check_bounds(orders, np.abs(r), values)
    return CoefficientTable(orders=orders, lags=lags, values=values,
                            centered=centered, limit_values=limits,
                            kernel_info=kernel.describe())


def _check_bounds(orders, mag, values) -> None:
    for i, n in enumerate(orders):
        if n < 2:
            continue
        bnd = np.array([omega_bound(n, m) for m in mag])
        if np.any(np.abs(values[i]) >= bnd):
            k = int(np.argmax(np.abs(values[i]) / bnd))
            raise DomainError(
                f"coefficient magnitude bound violated at n={n}, "
                f"|r|={mag[k]:.6f}: {abs(values[i][k]):.3e} >= {bnd[k]:.3e}")
