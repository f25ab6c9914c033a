"""Complex special functions for the oscillating-drive closed forms.

Provides log-gamma (Lanczos approximation with reflection), the Pochhammer
symbol for complex order, the Kummer confluent hypergeometric function M
(power series with the Kummer transformation for Re z < 0), the Tricomi
function U (connection formula through two M evaluations), and generalized
Laguerre functions of complex degree and order.

U and the generalized power z^m are multi-valued; callers tracking an
analytic continuation along a path can pass their own branch of log z via
``log_z`` instead of the principal one.
"""

from __future__ import annotations

import cmath

from .errors import SpecFunPoleError, SpecFunRangeError

# Lanczos coefficients, g = 7, n = 9 (about 15 significant digits on the
# right half plane).
_LANCZOS_G = 7.0
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_LOG_SQRT_TWO_PI = 0.9189385332046727417803297364056176

SERIES_Z_CAP = 50.0
_SERIES_MAX_TERMS = 10_000
_SERIES_SAFETY_RUN = 10


def _is_nonpositive_integer(z: complex) -> bool:
    z = complex(z)
    return z.imag == 0.0 and z.real <= 0.0 and z.real == round(z.real)


def _sinpi(z: complex) -> complex:
    # sin(pi z) with argument reduction: evaluating sin at pi*z directly
    # loses all precision when z sits within ~1e-6 of an integer, which is
    # exactly where the reflection formula needs it most.
    m = round(z.real)
    r = z - m
    s = cmath.sin(cmath.pi * r)
    return -s if m % 2 else s


def log_gamma(z: complex) -> complex:
    """Lanczos log-gamma; exp(log_gamma(z)) matches Gamma(z) to ~1e-13.

    Reflection formula below Re z = 1/2.  The imaginary part is defined
    modulo 2*pi*i (sufficient for gamma ratios through exp); poles at the
    non-positive integers raise.
    """
    z = complex(z)
    if _is_nonpositive_integer(z):
        raise SpecFunPoleError(f"log_gamma pole at z={z}")
    if z.real < 0.5:
        # log Gamma(z) = log(pi / sin(pi z)) - log Gamma(1 - z)
        return cmath.log(cmath.pi / _sinpi(z)) - log_gamma(1.0 - z)
    w = z - 1.0
    x = complex(_LANCZOS_C[0])
    for k, c in enumerate(_LANCZOS_C[1:], start=1):
        x += c / (w + k)
    t = w + _LANCZOS_G + 0.5
    return _LOG_SQRT_TWO_PI + (w + 0.5) * cmath.log(t) - t + cmath.log(x)


def recip_gamma(z: complex) -> complex:
    """1 / Gamma(z); entire, zero at the non-positive integers."""
    if _is_nonpositive_integer(z):
        return 0.0 + 0j
    return cmath.exp(-log_gamma(z))


def pochhammer(x: complex, n: complex) -> complex:
    """Rising factorial (x)_n = Gamma(x + n) / Gamma(x) for complex n.

    Non-negative integer n uses the exact product; otherwise log-gamma
    differences.  When Gamma(x) has a pole but Gamma(x+n) does not, the
    ratio is 0.
    """
    x, n = complex(x), complex(n)
    if n == 0:
        return 1.0 + 0j
    if n.imag == 0.0 and n.real == round(n.real) and 0 < n.real <= 4096:
        out = 1.0 + 0j
        for k in range(int(n.real)):
            out *= x + k
        return out
    if _is_nonpositive_integer(x + n):
        raise SpecFunPoleError(f"pochhammer pole: Gamma({x + n}) undefined")
    if _is_nonpositive_integer(x):
        return 0.0 + 0j
    return cmath.exp(log_gamma(x + n) - log_gamma(x))


def kummer_m(a: complex, b: complex, z: complex) -> complex:
    """Confluent hypergeometric M(a, b, z) = sum (a)_k / (b)_k z^k / k!.

    Adaptive truncation: the series stops after the running term stays
    below 1e-16 of the partial sum for 10 consecutive terms.  Arguments
    with Re z < 0 go through the Kummer transformation
    M(a,b,z) = e^z M(b-a, b, -z) to avoid cancellation.  |z| beyond 50 is
    out of the supported desk-scale range.
    """
    a, b, z = complex(a), complex(b), complex(z)
    if _is_nonpositive_integer(b):
        raise SpecFunPoleError(f"kummer_m pole at b={b}")
    if abs(z) > SERIES_Z_CAP:
        raise SpecFunRangeError(f"kummer_m series limited to |z| <= {SERIES_Z_CAP}, got {abs(z):.3g}")
    if z.real < 0:
        return cmath.exp(z) * _kummer_series(b - a, b, -z)
    return _kummer_series(a, b, z)


def _kummer_series(a: complex, b: complex, z: complex) -> complex:
    total = 1.0 + 0j
    term = 1.0 + 0j
    quiet = 0
    for k in range(_SERIES_MAX_TERMS):
        term *= (a + k) / (b + k) * z / (k + 1)
        total += term
        if term == 0:  # terminating polynomial (a a non-positive integer)
            return total
        if abs(term) <= 1e-16 * abs(total):
            quiet += 1
            if quiet >= _SERIES_SAFETY_RUN:
                return total
        else:
            quiet = 0
    raise SpecFunRangeError(f"kummer_m series did not converge for a={a}, b={b}, z={z}")


def _power(z: complex, expo: complex, log_z: complex | None) -> complex:
    lz = cmath.log(z) if log_z is None else log_z
    return cmath.exp(expo * lz)


def tricomi_u(a: complex, b: complex, z: complex, log_z: complex | None = None) -> complex:
    """Tricomi confluent hypergeometric U(a, b, z) via the connection formula

        U = Gamma(1-b)/Gamma(a-b+1) M(a,b,z)
          + Gamma(b-1)/Gamma(a) z^(1-b) M(a-b+1, 2-b, z).

    Integer b is a removable limit of the formula: values of b within 1e-8
    of an integer are evaluated at b +- 1e-6 and averaged (documented
    workaround; error ~1e-10).  ``log_z`` selects the branch of z^(1-b)
    (principal by default).
    """
    a, b, z = complex(a), complex(b), complex(z)
    if z == 0:
        raise SpecFunPoleError("tricomi_u: z = 0 is a branch point")
    if abs(b.imag) < 1e-8 and abs(b.real - round(b.real)) < 1e-8:
        eps = 1e-6
        up = _tricomi_u_generic(a, b + eps, z, log_z)
        dn = _tricomi_u_generic(a, b - eps, z, log_z)
        return 0.5 * (up + dn)
    return _tricomi_u_generic(a, b, z, log_z)


def _gamma_ratio(num: complex, den: complex) -> complex:
    # Gamma(num) / Gamma(den); a denominator pole kills the term.
    if _is_nonpositive_integer(den):
        return 0.0 + 0j
    return cmath.exp(log_gamma(num) - log_gamma(den))


# The two connection-formula terms both grow like e^z while U itself can be
# tiny; once they cancel past this depth, double precision cannot hold the
# 1e-8 accuracy budget and the same formula is re-evaluated at 40 digits.
_CANCEL_DEPTH = 3e-3


def _tricomi_u_generic(a: complex, b: complex, z: complex, log_z: complex | None) -> complex:
    first = _gamma_ratio(1.0 - b, a - b + 1.0) * kummer_m(a, b, z)
    second = _gamma_ratio(b - 1.0, a) * _power(z, 1.0 - b, log_z) * kummer_m(a - b + 1.0, 2.0 - b, z)
    total = first + second
    scale = max(abs(first), abs(second))
    if scale > 0 and abs(total) < _CANCEL_DEPTH * scale:
        return _tricomi_u_extended(a, b, z, log_z)
    return total


def _tricomi_u_extended(a: complex, b: complex, z: complex, log_z: complex | None) -> complex:
    import mpmath as mp

    with mp.workdps(40):
        am, bm, zm = mp.mpc(a), mp.mpc(b), mp.mpc(z)
        lz = mp.log(zm) if log_z is None else mp.mpc(log_z)
        first = mp.gamma(1 - bm) / mp.gamma(am - bm + 1) * mp.hyp1f1(am, bm, zm)
        second = (
            mp.gamma(bm - 1) / mp.gamma(am) * mp.exp((1 - bm) * lz) * mp.hyp1f1(am - bm + 1, 2 - bm, zm)
        )
        return complex(first + second)


def tricomi_u_derivative(a: complex, b: complex, z: complex, log_z: complex | None = None) -> complex:
    """dU/dz = -a U(a+1, b+1, z): the standard contiguous-index identity."""
    return -a * tricomi_u(a + 1.0, b + 1.0, z, log_z)


def laguerre_l(n: complex, alpha: complex, z: complex) -> complex:
    """Generalized Laguerre L_n^(alpha)(z) for complex degree and order:

        L_n^(alpha)(z) = (alpha+1)_n / Gamma(n+1) * M(-n, alpha+1, z),

    which reduces to the classical polynomials at non-negative integer n.
    """
    n, alpha = complex(n), complex(alpha)
    return pochhammer(alpha + 1.0, n) * recip_gamma(n + 1.0) * kummer_m(-n, alpha + 1.0, z)


def laguerre_l_derivative(n: complex, alpha: complex, z: complex) -> complex:
    """dL/dz = -L(n-1, alpha+1, z)."""
    return -laguerre_l(n - 1.0, alpha + 1.0, z)
