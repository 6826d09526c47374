"""Continuum limit: hyperbolic series, elliptic integrals, and the hook-up formula."""

from .elliptic import (
    LandenCheck,
    Modulus,
    agm,
    elliptic_E,
    elliptic_K,
    elliptic_Kp,
    k_from_L,
    L_from_k,
    landen_check,
)
from .hookup import ContinuumPoint, hookup_continuum, hookup_probability, series_values
from .identities import (
    IdentityCheck,
    PoissonReport,
    SymmetryReport,
    Y_CLOSED_PREFACTOR,
    Y_closed,
    closed_form_check,
    odd_sinh_identity,
    poisson_fourier_side,
    poisson_identity_suite,
    prudnikov_pair,
    residue_identity,
    symmetry_check,
)
from .series import (
    DEFAULT_POLICY,
    TruncationPolicy,
    series_Y,
    series_Y_alt,
    series_Z,
    series_ZI,
    series_ZI_alt,
)
