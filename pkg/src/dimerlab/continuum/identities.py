"""Closed forms and series identities tying Y(L) to elliptic integrals.

Identity checks return :class:`IdentityCheck` records holding both sides and
their relative deviation.  The Poisson-type sums run over all integers; their
tails are bounded with the same exponential majorants as the series module.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mpf

from ..errors import DomainError
from ..spectral import DEFAULT_PRECISION
from .elliptic import Modulus, _K, k_from_L
from .series import (
    DEFAULT_POLICY,
    TruncationPolicy,
    certified_sum,
    exp_tail,
    series_Y_alt,
    series_ZI,
    sinh_factor,
)

# Y(L) as the series 4L sum 8(2k-1)/sinh(...) equals this multiple of
# k1^2 K(k1) K'(k1) / pi^2
Y_CLOSED_PREFACTOR = 16


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    lhs: mpf
    rhs: mpf
    scale: mpf

    @property
    def deviation(self):
        """|lhs - rhs| relative to ``scale`` (for zero-sum identities, the sum of |terms|)."""
        return abs(self.lhs - self.rhs) / self.scale

    def passed(self, tol) -> bool:
        return self.deviation < tol


def _check(name, lhs, rhs, scale=None) -> IdentityCheck:
    if scale is None:
        scale = max(abs(lhs), abs(rhs))
    return IdentityCheck(name, lhs, rhs, scale)


def Y_closed(modulus: Modulus, which: str = "k1", precision: int = DEFAULT_PRECISION):
    """Y(L) (``which`` = "k1" or "k") or Y(1/L) ("k2" or "k_dual") from K and K'.

    With L = K'(k)/(2K(k)):
      "k1":     16 k1^2 K(k1) K'(k1) / pi^2
      "k":      32 k K(k) K'(k) / pi^2
      "k2":     16 k2^2 K(k2) K'(k2) / pi^2
      "k_dual": 8 (1-k)^2 K(k) K'(k) / pi^2
    k1 and k2 are each other's complements, so K(k2) = K'(k1).
    """
    with mpmath.workprec(precision):
        m = modulus
        pi2 = mpmath.pi**2
        c = Y_CLOSED_PREFACTOR
        if which == "k1":
            return c * m.k1**2 * _K(m.k2) * _K(m.k1) / pi2
        if which == "k":
            return c * 2 * m.k * _K(m.kp) * _K(m.k) / pi2
        if which == "k2":
            return c * m.k2**2 * _K(m.k1) * _K(m.k2) / pi2
        if which == "k_dual":
            one_minus_k = m.kp**2 / (1 + m.k)
            return c * one_minus_k**2 * _K(m.kp) * _K(m.k) / (2 * pi2)
        raise ValueError(f"unknown closed form {which!r}")


def _sinh_series(xi, parity: str, policy: TruncationPolicy):
    """sum over n of n/sinh(pi n xi): parity 'all', 'alternating' ((-1)^(n-1)), or 'odd'."""
    a = mpmath.pi * xi
    c = sinh_factor(a)
    tail_all = lambda K: c * exp_tail(K + 1, a, power=1)
    if parity == "all":
        return certified_sum(lambda n: n / mpmath.sinh(a * n), tail_all, policy)
    if parity == "alternating":
        return certified_sum(lambda n: (-1) ** (n - 1) * n / mpmath.sinh(a * n), tail_all, policy)
    if parity == "odd":
        return certified_sum(
            lambda n: (2 * n - 1) / mpmath.sinh(a * (2 * n - 1)),
            lambda K: c * exp_tail(2 * K + 1, a, power=1),
            policy,
        )
    raise ValueError(parity)


def _modulus_checked(k):
    k = mpf(k)
    if not 0 < k < 1:
        raise DomainError(f"modulus must lie in (0, 1), got {k}")
    return Modulus.from_pair(k, mpmath.sqrt((1 - k) * (1 + k)))


def prudnikov_pair(k, policy: TruncationPolicy = DEFAULT_POLICY, precision: int = DEFAULT_PRECISION):
    """sum n/sinh(pi n xi) = K(K-E)/pi^2 and sum (-1)^(n-1) n/sinh(pi n xi) = K(E-k'^2 K)/pi^2."""
    from .elliptic import _E

    with mpmath.workprec(precision):
        m = _modulus_checked(k)
        K, Kp = _K(m.kp), _K(m.k)
        E = _E(m.k, m.kp)
        xi = Kp / K
        pi2 = mpmath.pi**2
        return (
            _check("prudnikov_all", _sinh_series(xi, "all", policy), K * (K - E) / pi2),
            _check(
                "prudnikov_alternating",
                _sinh_series(xi, "alternating", policy),
                K * (E - m.kp**2 * K) / pi2,
            ),
        )


def odd_sinh_identity(k, policy: TruncationPolicy = DEFAULT_POLICY, precision: int = DEFAULT_PRECISION):
    """sum (2n-1)/sinh(pi (2n-1) xi) = k^2 K^2 / (2 pi^2), the half-sum of the Prudnikov pair."""
    with mpmath.workprec(precision):
        m = _modulus_checked(k)
        K = _K(m.kp)
        xi = _K(m.k) / K
        lhs = _sinh_series(xi, "odd", policy)
        return _check("odd_sinh", lhs, m.k**2 * K**2 / (2 * mpmath.pi**2))


def residue_identity(alpha, policy: TruncationPolicy = DEFAULT_POLICY, precision: int = DEFAULT_PRECISION):
    """sum_{k in Z} k(-1)^k/sinh(alpha k) + (2 pi^2/alpha^2) sum_{k>=1} k(-1)^k/sinh(pi^2 k/alpha) = 0.

    Principal-value integral of the odd kernel z/(sin(z) sinh(alpha z/pi)) over
    the real line, evaluated by residues on the axis and in the upper
    half-plane.  The k = 0 term of the first sum is its limit 1/alpha.
    """
    with mpmath.workprec(precision):
        alpha = mpf(alpha)
        if alpha <= 0:
            raise DomainError(f"alpha must be positive, got {alpha}")
        pi2 = mpmath.pi**2
        beta = pi2 / alpha

        def alt(rate):
            c = sinh_factor(rate)
            signed = certified_sum(
                lambda k: k * (-1) ** k / mpmath.sinh(rate * k),
                lambda K: c * exp_tail(K + 1, rate, power=1),
                policy,
            )
            absolute = certified_sum(
                lambda k: k / mpmath.sinh(rate * k),
                lambda K: c * exp_tail(K + 1, rate, power=1),
                policy,
            )
            return signed, absolute

        s1, a1 = alt(alpha)
        s2, a2 = alt(beta)
        first = 1 / alpha + 2 * s1
        second = 2 * pi2 / alpha**2 * s2
        scale = 1 / alpha + 2 * a1 + 2 * pi2 / alpha**2 * a2
        return _check("residue", first + second, mpf(0), scale)


def _two_sided(f, tail, policy):
    """sum_{n in Z} f(n) summed outward from 0; tail(K) bounds sum_{|n|>K} |f(n)|."""
    return certified_sum(lambda j: f(j) + f(-j), tail, policy, offset=f(0))


@dataclass(frozen=True)
class PoissonReport:
    alpha: mpf
    m: int
    checks: tuple[IdentityCheck, ...]

    @property
    def max_deviation(self):
        return max(c.deviation for c in self.checks)

    def passed(self, tol) -> bool:
        return all(c.passed(tol) for c in self.checks)


def cosh_pair_sum(alpha, m, stride: int, shift: int, policy: TruncationPolicy = DEFAULT_POLICY):
    """sum_{n in Z} 1/(cosh(alpha (stride n - shift)) + cosh(alpha m))."""
    cm = mpmath.cosh(alpha * m)
    f = lambda n: 1 / (mpmath.cosh(alpha * (stride * n - shift)) + cm)
    # |stride n - shift| >= stride (K+1) - shift for |n| > K
    tail = lambda K: 4 * mpmath.exp(alpha * shift) * exp_tail(K + 1, stride * alpha)
    return _two_sided(f, tail, policy)


def poisson_identity_suite(alpha, m: int, policy: TruncationPolicy = DEFAULT_POLICY,
                           precision: int = DEFAULT_PRECISION) -> PoissonReport:
    """The four cosh/sinh lattice-sum identities at one (alpha, m).

    odd_shift:     sum 1/(cosh(a(2n-1)) + cosh(a m)) = m/sinh(a m)
    quarter_shift: sum 1/(cosh(a(4n-1)) + cosh(a m)) = (m/2)/sinh(a m)
    full:          sum 1/(cosh(a n) + cosh(a m))     = 2m/sinh(a m)
    m_to_zero:     sum 1/(1 + cosh(a n)) = sum 4 n pi^2/(a^2 sinh(2 pi^2 n/a))
    """
    with mpmath.workprec(precision):
        alpha = mpf(alpha)
        if alpha <= 0:
            raise DomainError(f"alpha must be positive, got {alpha}")
        if m == 0 or int(m) != m:
            raise DomainError(f"m must be a non-zero integer, got {m}")
        m = int(m)
        sm = mpmath.sinh(alpha * m)
        checks = [
            _check("odd_shift", cosh_pair_sum(alpha, m, 2, 1, policy), m / sm),
            _check("quarter_shift", cosh_pair_sum(alpha, m, 4, 1, policy), mpf(m) / 2 / sm),
            _check("full", cosh_pair_sum(alpha, m, 1, 0, policy), 2 * m / sm),
            sinh_dual_identity(alpha, policy),
        ]
        return PoissonReport(alpha, m, tuple(checks))


def sinh_dual_identity(alpha, policy: TruncationPolicy = DEFAULT_POLICY):
    alpha = mpf(alpha)
    lhs = _two_sided(
        lambda n: 1 / (1 + mpmath.cosh(alpha * n)),
        lambda K: 4 * exp_tail(K + 1, alpha),
        policy,
    )
    pi2 = mpmath.pi**2
    b = 2 * pi2 / alpha
    c = sinh_factor(b)
    pref = 4 * pi2 / alpha**2
    rhs = 2 / alpha + 2 * certified_sum(
        lambda n: pref * n / mpmath.sinh(b * n),
        lambda K: pref * c * exp_tail(K + 1, b, power=1),
        policy,
    )
    return _check("m_to_zero", lhs, rhs)


def poisson_fourier_side(alpha, m, policy: TruncationPolicy = DEFAULT_POLICY,
                         precision: int = DEFAULT_PRECISION) -> IdentityCheck:
    """Poisson summation for f(x) = 1/(cosh(alpha x) + cosh(alpha m)) with real m.

    The transform is f^(xi) = (2 pi/alpha) sin(2 pi m xi) / (sinh(alpha m) sinh(2 pi^2 xi/alpha));
    for non-integer m every frequency contributes.
    """
    with mpmath.workprec(precision):
        alpha, m = mpf(alpha), mpf(m)
        if alpha <= 0 or m == 0:
            raise DomainError("need alpha > 0 and m != 0")
        lhs = cosh_pair_sum(alpha, m, 1, 0, policy)
        pi2 = mpmath.pi**2
        b = 2 * pi2 / alpha
        sm = mpmath.sinh(alpha * m)
        pref = 2 * mpmath.pi / (alpha * sm)
        c = sinh_factor(b)
        rhs = 2 * m / sm + 2 * certified_sum(
            lambda j: pref * mpmath.sin(2 * mpmath.pi * m * j) / mpmath.sinh(b * j),
            lambda K: abs(pref) * c * exp_tail(K + 1, b),
            policy,
        )
        return _check("poisson_fourier", lhs, rhs)


@dataclass(frozen=True)
class SymmetryReport:
    L: mpf
    checks: tuple[IdentityCheck, ...]

    @property
    def max_deviation(self):
        return max(c.deviation for c in self.checks)


def symmetry_check(L, policy: TruncationPolicy = DEFAULT_POLICY, precision: int = DEFAULT_PRECISION) -> SymmetryReport:
    """Z_I(L) = Y(1/L), the residue identity at alpha = pi L, and the m -> 0 sum at alpha = 2 pi L."""
    with mpmath.workprec(precision):
        L = mpf(L)
        if L <= 0:
            raise DomainError(f"aspect ratio must be positive, got {L}")
        dual = _check("ZI_vs_Y_dual", series_ZI(L, policy, precision), series_Y_alt(1 / L, policy, precision))
        residue = residue_identity(mpmath.pi * L, policy, precision)
        sinh_dual = sinh_dual_identity(2 * mpmath.pi * L, policy)
        return SymmetryReport(L, (dual, residue, sinh_dual))


def closed_form_check(L, policy: TruncationPolicy = DEFAULT_POLICY, precision: int = DEFAULT_PRECISION):
    """Series Y(L) against the k1- and k-closed forms, with k = k_from_L(L)."""
    with mpmath.workprec(precision):
        m = k_from_L(L, precision)
        y = series_Y_alt(L, policy, precision)
        return (
            _check("Y_k1", y, Y_closed(m, "k1", precision)),
            _check("Y_k", y, Y_closed(m, "k", precision)),
        )
