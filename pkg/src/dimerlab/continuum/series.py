"""Hyperbolic series for the continuum partition functions Z(L), Z_I(L), Y(L).

Each sum is truncated only when the last term is below ``epsilon`` times the
running value *and* an explicit exponential majorant of the remainder is too.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mpf

from ..errors import ConvergenceFailure, DomainError
from ..spectral import DEFAULT_PRECISION


@dataclass(frozen=True)
class TruncationPolicy:
    epsilon: mpf = mpf("1e-30")
    max_terms: int = 100_000

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")


DEFAULT_POLICY = TruncationPolicy()


def exp_tail(start: int, rate, power: int = 0):
    """Upper bound for sum_{j >= start} j**power * exp(-rate * j), power in {0, 1}."""
    r = mpmath.exp(-rate)
    head = r**start
    if power == 0:
        return head / (1 - r)
    return head * (start - (start - 1) * r) / (1 - r) ** 2


def sinh_factor(x):
    """Constant c with 1/sinh(y) <= c exp(-y) for all y >= x > 0."""
    return 2 / (1 - mpmath.exp(-2 * x))


def certified_sum(term, tail, policy: TruncationPolicy = DEFAULT_POLICY, offset=0, start: int = 1):
    """offset + sum_{k >= start} term(k).

    ``tail(K)`` must bound sum_{k > K} |term(k)|.  The stopping test is
    relative to |offset + partial sum|.
    """
    total = mpf(offset)
    k = start
    while True:
        t = term(k)
        total += t
        scale = policy.epsilon * abs(total)
        if abs(t) <= scale and tail(k) <= scale:
            return total
        if k - start + 1 >= policy.max_terms:
            raise ConvergenceFailure(
                f"series did not reach relative tolerance {policy.epsilon} "
                f"within {policy.max_terms} terms"
            )
        k += 1


def _check_L(L):
    L = mpf(L)
    if L <= 0:
        raise DomainError(f"aspect ratio must be positive, got {L}")
    return L


def _cosh_sum(L, sign):
    """sum_k 2 s_k / cosh(L pi k) with s_k = 1 or (-1)^(k+1)."""
    a = L * mpmath.pi

    def term(k):
        s = 1 if sign == 0 or k % 2 else -1
        return 2 * s / mpmath.cosh(a * k)

    return term, (lambda K: 4 * exp_tail(K + 1, a))


def series_Z(L, policy: TruncationPolicy = DEFAULT_POLICY, precision: int = DEFAULT_PRECISION):
    """Z(L) = 4L (sum_k 2/cosh(L pi k) + 1)^2."""
    with mpmath.workprec(precision):
        L = _check_L(L)
        term, tail = _cosh_sum(L, 0)
        inner = certified_sum(term, tail, policy, offset=1)
        return 4 * L * inner**2


def series_ZI(L, policy: TruncationPolicy = DEFAULT_POLICY, precision: int = DEFAULT_PRECISION):
    """Z_I(L) = 4L (sum_k 2(-1)^(k+1)/cosh(L pi k) - 1)^2."""
    with mpmath.workprec(precision):
        L = _check_L(L)
        term, tail = _cosh_sum(L, 1)
        inner = certified_sum(term, tail, policy, offset=-1)
        return 4 * L * inner**2


def series_ZI_alt(L, policy: TruncationPolicy = DEFAULT_POLICY, precision: int = DEFAULT_PRECISION):
    """Z_I(L) = 4L (sum 4(-1)^k k/sinh(L pi k) + sum 4/(1 + cosh(2 L pi k)) + 1)."""
    with mpmath.workprec(precision):
        L = _check_L(L)
        a = L * mpmath.pi
        c = sinh_factor(a)
        # one sum, so the stopping test is relative to the (small) final value
        inner = certified_sum(
            lambda k: 4 * (-1) ** k * k / mpmath.sinh(a * k) + 4 / (1 + mpmath.cosh(2 * a * k)),
            lambda K: 4 * c * exp_tail(K + 1, a, power=1) + 8 * exp_tail(K + 1, 2 * a),
            policy,
            offset=1,
        )
        return 4 * L * inner


def series_Y(L, policy: TruncationPolicy = DEFAULT_POLICY, precision: int = DEFAULT_PRECISION):
    """Y(L) = 4L (sum 4/cosh(L pi (2k-1))) (sum 4/cosh(2 L pi k) + 2)."""
    with mpmath.workprec(precision):
        L = _check_L(L)
        a = L * mpmath.pi
        odd = certified_sum(
            lambda k: 4 / mpmath.cosh(a * (2 * k - 1)),
            lambda K: 8 * exp_tail(2 * K + 1, a),
            policy,
        )
        even = certified_sum(
            lambda k: 4 / mpmath.cosh(2 * a * k),
            lambda K: 8 * exp_tail(K + 1, 2 * a),
            policy,
            offset=2,
        )
        return 4 * L * odd * even


def series_Y_alt(L, policy: TruncationPolicy = DEFAULT_POLICY, precision: int = DEFAULT_PRECISION):
    """Y(L) = 4L sum 8(2k-1)/sinh(L pi (2k-1))."""
    with mpmath.workprec(precision):
        L = _check_L(L)
        a = L * mpmath.pi
        c = sinh_factor(a)
        total = certified_sum(
            lambda k: 8 * (2 * k - 1) / mpmath.sinh(a * (2 * k - 1)),
            # odd indices >= 2K+1 are a subset of all indices >= 2K+1
            lambda K: 8 * c * exp_tail(2 * K + 1, a, power=1),
            policy,
        )
        return 4 * L * total
