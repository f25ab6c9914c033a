"""Internal adaptive quadrature for complex-valued integrands."""

from __future__ import annotations

import warnings
from typing import Callable

from scipy.integrate import IntegrationWarning, quad

from .errors import IntegrationError


def quad_complex(
    f: Callable[[float], complex],
    a: float,
    b: float,
    epsabs: float = 1e-13,
    epsrel: float = 1e-12,
) -> complex:
    """Adaptive quadrature of a complex integrand over [a, b].

    Raises IntegrationError if the estimate fails to reach roughly the
    requested accuracy (e.g. the integrand has a pole inside the interval).
    """
    if a == b:
        return 0.0 + 0j
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            value, err = quad(f, a, b, complex_func=True, epsabs=epsabs, epsrel=epsrel, limit=200)
        except IntegrationWarning as exc:
            raise IntegrationError(f"quadrature failed on [{a}, {b}]: {exc}") from exc
    if abs(err) > 100 * max(epsabs, epsrel * abs(value)):
        raise IntegrationError(
            f"quadrature error estimate {abs(err):.3e} too large on [{a}, {b}]"
        )
    return complex(value)
