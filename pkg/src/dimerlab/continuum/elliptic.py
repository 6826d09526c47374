"""Complete elliptic integrals by the arithmetic-geometric mean.

Everything that would lose digits near ``k = 1`` is written in terms of the
complementary modulus ``k'`` instead, so callers that know ``k'`` exactly
(e.g. from :func:`k_from_L`) keep full relative precision on both sides.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mpf

from ..errors import ConvergenceFailure, DomainError
from ..spectral import DEFAULT_PRECISION


def agm(a, b):
    a, b = mpf(a), mpf(b)
    if a == 0 or b == 0:
        return mpf(0)
    eps = mpf(2) ** (4 - mpmath.mp.prec)
    for _ in range(mpmath.mp.prec + 200):
        if abs(a - b) <= eps * abs(a):
            return (a + b) / 2
        a, b = (a + b) / 2, mpmath.sqrt(a * b)
    raise ConvergenceFailure(f"AGM did not settle for a={a}, b={b}")


def _complement(k):
    return mpmath.sqrt((1 - k) * (1 + k))


def _K(kp):
    """K as a function of the complementary modulus."""
    return mpmath.pi / (2 * agm(1, kp))


def elliptic_K(k, precision: int = DEFAULT_PRECISION):
    with mpmath.workprec(precision):
        k = mpf(k)
        if k < 0 or k >= 1:
            raise DomainError(f"K(k) needs 0 <= k < 1, got {k}")
        return _K(_complement(k))


def elliptic_Kp(k, precision: int = DEFAULT_PRECISION):
    """K'(k) = K(sqrt(1 - k^2))."""
    with mpmath.workprec(precision):
        k = mpf(k)
        if k <= 0 or k > 1:
            raise DomainError(f"K'(k) needs 0 < k <= 1, got {k}")
        return _K(k)


def _E(k, kp):
    a, b, c = mpf(1), kp, k
    acc = c * c / 2
    weight = mpf(1) / 2
    eps = mpf(2) ** (4 - mpmath.mp.prec)
    for _ in range(mpmath.mp.prec + 200):
        if abs(a - b) <= eps * abs(a):
            break
        a, b, c = (a + b) / 2, mpmath.sqrt(a * b), (a - b) / 2
        weight *= 2
        acc += weight * c * c
    else:
        raise ConvergenceFailure(f"AGM for E did not settle at k={k}")
    K = mpmath.pi / (a + b)
    return K * (1 - acc)


def elliptic_E(k, precision: int = DEFAULT_PRECISION):
    """Complete elliptic integral of the second kind, E(1) = 1."""
    with mpmath.workprec(precision):
        k = mpf(k)
        if k < 0 or k > 1:
            raise DomainError(f"E(k) needs 0 <= k <= 1, got {k}")
        if k == 1:
            return mpf(1)
        return _E(k, _complement(k))


def _xi(k, kp):
    """Conformal modulus K'(k)/K(k)."""
    return agm(1, kp) / agm(1, k)


@dataclass(frozen=True)
class Modulus:
    """Elliptic modulus with the derived quantities used by the hook-up formula.

    ``k1 = 2 sqrt(k)/(1+k)`` and ``k2 = (1-k)/(1+k)`` are complementary to
    each other; ``x = k2**2`` is the cross-ratio of the four marked points.
    """

    k: mpf
    kp: mpf
    k1: mpf
    k2: mpf
    x: mpf

    @classmethod
    def from_pair(cls, k, kp) -> "Modulus":
        k1 = 2 * mpmath.sqrt(k) / (1 + k)
        # 1 - k = kp^2 / (1 + k), without cancellation near k = 1
        k2 = kp * kp / ((1 + k) * (1 + k))
        return cls(k, kp, k1, k2, k2 * k2)

    @classmethod
    def from_k(cls, k, precision: int = DEFAULT_PRECISION) -> "Modulus":
        with mpmath.workprec(precision):
            k = mpf(k)
            if not 0 < k < 1:
                raise DomainError(f"modulus must lie in (0, 1), got {k}")
            return cls.from_pair(k, _complement(k))

    @property
    def K(self):
        return _K(self.kp)

    @property
    def Kp(self):
        return _K(self.k)


def L_from_k(k, precision: int = DEFAULT_PRECISION):
    """Aspect ratio K'(k) / (2 K(k)) of the rectangle matching modulus ``k``."""
    with mpmath.workprec(precision):
        k = mpf(k)
        if not 0 < k < 1:
            raise DomainError(f"modulus must lie in (0, 1), got {k}")
        return _xi(k, _complement(k)) / 2


def _solve_small_modulus(L, precision: int):
    """Smallest-side modulus s with K'(s)/(2K(s)) = L, for L >= 1/2.

    Bisection in log s.  Since s = 4 sqrt(q) prod((1+q^2n)/(1+q^(2n-1)))^4
    with nome q = exp(-2 pi L) <= exp(-pi), s lies in [sqrt(q), 4 sqrt(q)];
    for large L it sits at the upper end, so the bracket is widened to 8 sqrt(q).
    """
    q_half = mpmath.exp(-mpmath.pi * L)
    lo = mpmath.log(q_half)
    hi = mpmath.log(min(8 * q_half, mpf("0.999")))

    def excess(u):
        s = mpmath.exp(u)
        return _xi(s, _complement(s)) / 2 - L

    if excess(lo) < 0 or excess(hi) > 0:
        raise ConvergenceFailure(f"bisection bracket does not straddle L={L}")
    tol = mpf(10) ** (-int(0.28 * precision))
    for _ in range(20 * precision):
        # relative in u once |u| > 1: the bracket cannot shrink below one ulp of u
        if hi - lo <= tol * max(1, abs(lo)):
            return mpmath.exp((lo + hi) / 2)
        mid = (lo + hi) / 2
        if excess(mid) > 0:
            lo = mid
        else:
            hi = mid
    raise ConvergenceFailure(f"bisection for L={L} exceeded its iteration cap")


def k_from_L(L, precision: int = DEFAULT_PRECISION) -> Modulus:
    """Modulus ``k`` with K'(k)/(2K(k)) = L, by bisection.

    For L >= 1/2 the search runs over k itself; below that it runs over the
    complementary modulus, whose aspect ratio is 1/(4L), so that both k and
    k' come out to full relative precision.
    """
    with mpmath.workprec(precision):
        L = mpf(L)
        if L <= 0:
            raise DomainError(f"aspect ratio must be positive, got {L}")
        if L >= mpf(1) / 2:
            k = _solve_small_modulus(L, precision)
            kp = _complement(k)
        else:
            kp = _solve_small_modulus(1 / (4 * L), precision)
            k = _complement(kp)
        return Modulus.from_pair(k, kp)


@dataclass(frozen=True)
class LandenCheck:
    direct: mpf
    ascending: mpf
    descending: mpf

    @property
    def deviation(self):
        vals = (self.direct, self.ascending, self.descending)
        return max(abs(a - b) / abs(a) for a in vals for b in vals)


def landen_check(k, precision: int = DEFAULT_PRECISION) -> LandenCheck:
    """K'/K at k, twice K'/K at 2 sqrt(k)/(1+k), half K'/K at (1-k')/(1+k')."""
    with mpmath.workprec(precision):
        k = mpf(k)
        if not 0 < k < 1:
            raise DomainError(f"modulus must lie in (0, 1), got {k}")
        kp = _complement(k)
        up, up_c = 2 * mpmath.sqrt(k) / (1 + k), (1 - k) / (1 + k)
        down, down_c = k * k / ((1 + kp) * (1 + kp)), 2 * mpmath.sqrt(kp) / (1 + kp)
        return LandenCheck(_xi(k, kp), 2 * _xi(up, up_c), _xi(down, down_c) / 2)
