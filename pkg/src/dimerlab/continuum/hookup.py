"""Continuum hook-up probability H(L) for the [0, L] x [0, 1] rectangle."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import mpmath
from mpmath import mpf

from ..errors import DomainError
from ..spectral import DEFAULT_PRECISION
from .elliptic import _K, k_from_L
from .series import DEFAULT_POLICY, TruncationPolicy, series_Y_alt, series_ZI

# Outside [SMALL_L, LARGE_L] the direct series at L (or 1/L) converge slowly
# and are replaced by their duals under L -> 1/L.
SMALL_L = mpf("0.05")
LARGE_L = mpf(20)

# loop weight of the double-dimer model (O(n) parameter n = 2)
THETA = 2


@dataclass(frozen=True)
class ContinuumPoint:
    L: mpf
    k: mpf
    kp: mpf
    k1: mpf
    k2: mpf
    x: mpf
    K_k: mpf
    Kp_k: mpf
    Z_L: mpf
    ZI_L: mpf
    Y_L: mpf
    Y_inv: mpf
    H: mpf
    H_series: mpf
    H_modulus: mpf
    H_dual: mpf
    H_cross_ratio: mpf

    @property
    def spread(self):
        vals = (self.H_series, self.H_modulus, self.H_dual)
        return max(vals) - min(vals)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["spread"] = self.spread
        return d


def series_values(L, policy: TruncationPolicy = DEFAULT_POLICY, precision: int = DEFAULT_PRECISION):
    """(Z(L), Z_I(L), Y(L), Y(1/L)), switching to dual series at extreme L.

    Uses Z_I(L) = Y(1/L) and Z = Y + Z_I.
    """
    with mpmath.workprec(precision):
        L = mpf(L)
        if L <= 0:
            raise DomainError(f"aspect ratio must be positive, got {L}")
        inv = 1 / L
        if L < SMALL_L:
            Y = series_ZI(inv, policy, precision)
            ZI = series_Y_alt(inv, policy, precision)
            Y_inv = ZI
        else:
            Y = series_Y_alt(L, policy, precision)
            ZI = series_ZI(L, policy, precision)
            Y_inv = ZI if L > LARGE_L else series_Y_alt(inv, policy, precision)
        return Y + ZI, ZI, Y, Y_inv


def hookup_continuum(L, policy: TruncationPolicy = DEFAULT_POLICY,
                     precision: int = DEFAULT_PRECISION) -> ContinuumPoint:
    """Evaluate H(L) three ways: from the series, from 2k/(1+k^2), and from Y(L) vs Y(1/L)."""
    with mpmath.workprec(precision):
        L = mpf(L)
        m = k_from_L(L, precision)
        Z, ZI, Y, Y_inv = series_values(L, policy, precision)
        H_series = (Z - ZI) / (Z + ZI)
        H_modulus = 2 * m.k / (1 + m.k**2)
        H_dual = Y / (Y + THETA * Y_inv)
        H_cross = (1 - m.x) / (1 + m.x)
        return ContinuumPoint(
            L=L,
            k=m.k,
            kp=m.kp,
            k1=m.k1,
            k2=m.k2,
            x=m.x,
            K_k=_K(m.kp),
            Kp_k=_K(m.k),
            Z_L=Z,
            ZI_L=ZI,
            Y_L=Y,
            Y_inv=Y_inv,
            H=H_modulus,
            H_series=H_series,
            H_modulus=H_modulus,
            H_dual=H_dual,
            H_cross_ratio=H_cross,
        )


def hookup_probability(L, precision: int = DEFAULT_PRECISION):
    """H(L) = 2k/(1+k^2) alone, without the series cross-checks."""
    with mpmath.workprec(precision):
        m = k_from_L(L, precision)
        return 2 * m.k / (1 + m.k**2)
