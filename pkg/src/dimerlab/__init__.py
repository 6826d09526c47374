"""Hook-up probabilities of the double-dimer model on rectangular grids.

Three routes to the same numbers: exact enumeration (:mod:`dimerlab.oracle`),
strip-mode product formulas (:mod:`dimerlab.spectral`), and the continuum
elliptic-function limit (:mod:`dimerlab.continuum`).
"""

__version__ = "0.1.0"
