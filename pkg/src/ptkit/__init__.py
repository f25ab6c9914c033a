"""Toolkit for time-dependent non-Hermitian two-level systems.

Builds 2x2 Hamiltonians from declared modulation functions, applies the
non-unitary gauge transformation to the balanced gain/loss effective frame,
propagates states, evaluates closed-form solutions for the three solvable
effective-potential families, and classifies PT phases via spectra and
Floquet monodromy.
"""

__version__ = "0.1.0"
