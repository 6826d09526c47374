"""Closed-form strip-mode formulas for dimer counts on an M x N rectangle.

The transverse Fourier modes ``q`` decouple the rectangle into strips; each
strip contributes a Chebyshev-type weight ``W_M(x_q)`` with
``x_q = cos(pi q / (N + 1))`` and ``W_M(x) = |U_M(i x)|``.  All arithmetic is
carried out in mpmath at an explicit binary precision; quantities that must
be integers are rounded through :func:`certified_round`, which keeps the
measured rounding gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mpf

from .errors import ParityViolation, PrecisionInsufficient
from .oracle import GridSpec, _as_grid

DEFAULT_PRECISION = 256
ROUNDING_TOLERANCE_LOG2 = -32
# headroom for rounding error accumulated over the products and sums (in bits)
ROUNDING_GUARD_BITS = 24
MAX_ESCALATIONS = 4
# beyond this M * asinh(x) the closed form replaces the recurrence
RECURRENCE_LIMIT = 300


@dataclass(frozen=True)
class RoundedCount:
    value: int
    gap: mpf
    precision: int

    def __int__(self):
        return self.value


def certified_round(x, precision: int) -> RoundedCount:
    """Round ``x`` to the nearest integer, refusing if it is not within 2**-32.

    The gap alone proves nothing once the units digit is below the working
    precision, so the magnitude of ``x`` must leave room for it as well.
    """
    resolved_bits = precision - ROUNDING_GUARD_BITS + ROUNDING_TOLERANCE_LOG2
    if x != 0 and mpmath.mag(x) > resolved_bits:
        raise PrecisionInsufficient(
            f"value of about 2**{mpmath.mag(x)} cannot be resolved to units at {precision} bits",
            gap=None,
            precision=precision,
        )
    nearest = int(mpmath.nint(x))
    gap = abs(x - nearest)
    if gap > mpf(2) ** ROUNDING_TOLERANCE_LOG2:
        raise PrecisionInsufficient(
            f"value {mpmath.nstr(x, 20)} is {mpmath.nstr(gap, 5)} from an integer "
            f"at {precision} bits",
            gap=gap,
            precision=precision,
        )
    return RoundedCount(nearest, gap, precision)


def _escalating(fn, precision: int):
    bits = precision
    for attempt in range(MAX_ESCALATIONS + 1):
        try:
            with mpmath.workprec(bits):
                return fn(bits)
        except PrecisionInsufficient:
            if attempt == MAX_ESCALATIONS:
                raise
            bits *= 2


def mode_x(q: int, N: int):
    return mpmath.cos(mpmath.pi * q / (N + 1))


def chebyshev_U_recurrence(M: int, x):
    """W_M(x) from W_{j+1} = 2 x W_j + W_{j-1}, W_0 = 1, W_1 = 2x."""
    if M == 0:
        return mpf(1)
    prev, cur = mpf(1), 2 * x
    for _ in range(M - 1):
        prev, cur = cur, 2 * x * cur + prev
    return cur


def chebyshev_U_closed(M: int, x):
    """W_M(x) in hyperbolic form, with sinh(t) = x.

    The recurrence has roots e^t and -e^-t, so W_M = cosh((M+1)t)/cosh(t) for
    even M and sinh((M+1)t)/cosh(t) for odd M.
    """
    t = mpmath.asinh(x)
    if M % 2 == 0:
        return mpmath.cosh((M + 1) * t) / mpmath.cosh(t)
    return mpmath.sinh((M + 1) * t) / mpmath.cosh(t)


def chebyshev_U_binomial(M: int, x):
    """W_M(x) as the binomial sum sum_p C(M-p, p) (2x)^(M-2p)."""
    return mpmath.fsum(math.comb(M - p, p) * (2 * x) ** (M - 2 * p) for p in range(M // 2 + 1))


def chebyshev_U(M: int, x, precision: int = DEFAULT_PRECISION):
    """Magnitude |U_M(i x)| of the Chebyshev polynomial of the second kind."""
    if M < 0:
        raise ValueError(f"M must be non-negative, got {M}")
    with mpmath.workprec(precision):
        x = mpf(x)
        if x < 0 or x > 1:
            raise ValueError(f"x must lie in [0, 1], got {x}")
        if M * mpmath.asinh(x) <= RECURRENCE_LIMIT:
            return chebyshev_U_recurrence(M, x)
        return chebyshev_U_closed(M, x)


def _q0_float(M: int, N: int, bits: int):
    if M % 2 and N % 2:
        return mpf(0)
    if N % 2 == 0:
        modes = range(1, N // 2 + 1)
    else:
        modes = range(1, (N - 1) // 2 + 1)
    return mpmath.fprod(chebyshev_U(M, mode_x(q, N), bits) for q in modes)


def q0_partition_certified(grid, precision: int = DEFAULT_PRECISION) -> RoundedCount:
    grid = _as_grid(grid)
    M, N = grid.M, grid.N
    if M % 2 and N % 2:
        return RoundedCount(0, mpf(0), precision)
    return _escalating(lambda bits: certified_round(_q0_float(M, N, bits), bits), precision)


def q0_partition(grid, precision: int = DEFAULT_PRECISION) -> int:
    """Number of close-packed dimer coverings of the M x N rectangle."""
    return q0_partition_certified(grid, precision).value


@dataclass(frozen=True)
class MonomerRatio:
    magnitude: mpf
    signed: mpf  # the bracketed sum with its sign, for diagnostics

    def __float__(self):
        return float(self.magnitude)


def _check_monomer_rows(grid: GridSpec, n1: int, n2: int):
    if grid.M % 2 or grid.N % 2 == 0:
        raise ValueError(f"monomer formula needs M even and N odd, got {grid.M}x{grid.N}")
    for n in (n1, n2):
        if not 1 <= n <= grid.N:
            raise ValueError(f"row {n} outside 1..{grid.N}")
    if (n1 - n2) % 2:
        raise ParityViolation(f"rows {n1} and {n2} differ in parity; the count vanishes")


def _monomer_ratio_raw(M: int, N: int, n1: int, n2: int, bits: int) -> MonomerRatio:
    pi = mpmath.pi
    terms = []
    for q in range(1, (N - 1) // 2 + 1):
        w = chebyshev_U(M, mode_x(q, N), bits)
        terms.append(2 * mpmath.sin(pi * q * n1 / (N + 1)) * mpmath.sin(pi * q * n2 / (N + 1)) / w)
    sign = -1 if ((n1 + n2) // 2) % 2 else 1
    # the q = (N+1)/2 line mode has amplitude sin(pi n / 2): it only reaches odd rows
    line_mode = 1 if n1 % 2 else 0
    signed = mpf(2) / (N + 1) * (sign * mpmath.fsum(terms) - line_mode)
    return MonomerRatio(abs(signed), signed)


def monomer_ratio(grid, n1: int, n2: int, precision: int = DEFAULT_PRECISION) -> MonomerRatio:
    """|Q_{n1,n2}| / Q_0 for monomers at (1, n1) and (M, n2)."""
    grid = _as_grid(grid)
    _check_monomer_rows(grid, n1, n2)
    with mpmath.workprec(precision):
        return _monomer_ratio_raw(grid.M, grid.N, n1, n2, precision)


def monomer_count_certified(grid, n1: int, n2: int, precision: int = DEFAULT_PRECISION) -> RoundedCount:
    grid = _as_grid(grid)
    _check_monomer_rows(grid, n1, n2)

    def attempt(bits):
        q0 = q0_partition_certified(grid, bits).value
        ratio = _monomer_ratio_raw(grid.M, grid.N, n1, n2, bits).magnitude
        return certified_round(ratio * q0, bits)

    return _escalating(attempt, precision)


def monomer_count(grid, n1: int, n2: int, precision: int = DEFAULT_PRECISION) -> int:
    """Matchings with monomers at (1, n1) and (M, n2), from the strip formula."""
    return monomer_count_certified(grid, n1, n2, precision).value


@dataclass(frozen=True)
class PartitionRatios:
    r11: mpf
    r1N: mpf
    Z: mpf
    Z_I: mpf
    P: mpf
    precision: int

    @property
    def Z_dd(self):
        return 4 * self.Z_I + 2 * (self.Z - self.Z_I)


def hookup_discrete(grid, precision: int = DEFAULT_PRECISION) -> PartitionRatios:
    """Normalized double-dimer partition functions and the hook-up probability."""
    grid = _as_grid(grid)
    grid.require_hookup_shape()
    with mpmath.workprec(precision):
        r11 = monomer_ratio(grid, 1, 1, precision).magnitude
        r1N = monomer_ratio(grid, 1, grid.N, precision).magnitude
        Z = r11**2
        Z_I = r1N**2
        P = (Z - Z_I) / (Z + Z_I)
    return PartitionRatios(r11, r1N, Z, Z_I, P, precision)


def hookup_exact(grid, precision: int = DEFAULT_PRECISION) -> Fraction:
    """Hook-up probability as an exact rational, via certified integer counts."""
    grid = _as_grid(grid)
    grid.require_hookup_shape()
    q11 = monomer_count(grid, 1, 1, precision)
    q1N = monomer_count(grid, 1, grid.N, precision)
    return Fraction(q11**2 - q1N**2, q11**2 + q1N**2)
