"""Two-level model family, its gauge transformation and effective frame.

The model is

    H(t) = [[omega1(t),            nu * f1(t)/f2(t)],
            [nu' * f2(t)/f1(t),    omega2(t)       ]]

with constant couplings nu, nu' and nonzero modulations f1, f2.  The
time-dependent invertible map A(t) sends the dynamics to an effective frame
with balanced gain and loss:

    A(t)   = P . exp(-i Int_{t_ref}^t Omega_plus dt') . diag(s(t), 1/s(t)),
    s(t)   = sqrt(f1/f2)   (branch continued from the principal root at t_ref),
    H_eff  = A^-1 H A - i d/dt ln A
           = -i Gamma(t) sigma_z + nu_eff sigma_+ + nu'_eff sigma_-,
    Gamma  = i Omega_minus + (1/2) d/dt ln(f1/f2),

where Omega_pm = (omega1 +- omega2)/2 and P is an optional constant diagonal
prefactor (used by the circuit mapping to balance the couplings).  The
scalar phase must integrate the *mean* potential Omega_plus: that choice
cancels the identity part of the transformed generator for every omega2, so
H_eff is exactly traceless with constant off-diagonals.  (Using the
difference Omega_minus instead leaves a residual omega2 * identity term and
is traceless only when omega2 = 0; the two conventions coincide in that
case.)

Exceptional points sit at Gamma = +-nu_eff.  In the dimensionless
B-coordinates

    B(t)    = Omega_minus / nu_eff          (original frame),
    B_bar(t) = i Gamma / nu_eff             (effective frame),
    b(t)    = d/dt ln(f1/f2) / (2 nu_eff),

the loci are B = +-i and B_bar = +-i, related pointwise by
B_bar = -B + i b(t) (this identity follows directly from the definition of
Gamma; it fixes the sign conventions of the mixing-angle relation
cot g_bar = cot g - i b).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from . import modfn
from ._quad import quad_complex
from .errors import (
    BranchTrackingError,
    IntegrationError,
    ModulationZeroError,
    PtkitError,
)
from .linalg2 import Eig2, eig2, inv2, mat2

Expr = modfn.Expr


def _as_expr(e: Expr | str | float | complex) -> Expr:
    if isinstance(e, Expr):
        return e
    if isinstance(e, str):
        return modfn.parse(e)
    return modfn.constant(complex(e))


@dataclass
class ModelSpec:
    """Declarative description of the two-level model.

    f1, f2 must be nonzero on any simulated interval; omega1, omega2 are
    complex onsite potentials in angular-frequency units.  t_ref is the
    lower limit of the gauge antiderivatives; gauge_prefactor holds the
    diagonal entries of the constant matrix P.
    """

    nu: complex
    nu_prime: complex
    f1: Expr = field(default_factory=lambda: modfn.Num(1.0))
    f2: Expr = field(default_factory=lambda: modfn.Num(1.0))
    omega1: Expr = field(default_factory=lambda: modfn.Num(0.0))
    omega2: Expr = field(default_factory=lambda: modfn.Num(0.0))
    params: Mapping[str, complex] = field(default_factory=dict)
    t_ref: float = 0.0
    gauge_prefactor: tuple[complex, complex] = (1.0 + 0j, 1.0 + 0j)

    def __post_init__(self):
        self.nu = complex(self.nu)
        self.nu_prime = complex(self.nu_prime)
        self.f1 = _as_expr(self.f1)
        self.f2 = _as_expr(self.f2)
        self.omega1 = _as_expr(self.omega1)
        self.omega2 = _as_expr(self.omega2)
        if not (cmath.isfinite(self.nu) and cmath.isfinite(self.nu_prime)):
            raise ValueError("couplings nu, nu' must be finite")
        if abs(self.nu) + abs(self.nu_prime) == 0.0:
            raise ValueError("at least one coupling must be nonzero")
        for e in (self.f1, self.f2, self.omega1, self.omega2):
            modfn.check_bound(e, self.params)

    @property
    def nu_eff(self) -> complex:
        p1, p2 = self.gauge_prefactor
        return self.nu * p2 / p1

    @property
    def nu_prime_eff(self) -> complex:
        p1, p2 = self.gauge_prefactor
        return self.nu_prime * p1 / p2

    def validate_interval(self, t0: float, t1: float, samples: int = 64) -> None:
        """Check f1, f2 stay away from zero on [t0, t1] by sampling."""
        frame = EffectiveFrame(self)
        for t in np.linspace(t0, t1, samples):
            frame.check_modulation(float(t))


class EffectiveFrame:
    """Compiled view of a ModelSpec: Gamma, Omega_pm, A(t) and friends.

    Immutable after construction; all evaluation methods are reentrant.
    """

    def __init__(self, spec: ModelSpec):
        self.spec = spec
        p = spec.params
        self._f1 = modfn.bind(spec.f1, p)
        self._f2 = modfn.bind(spec.f2, p)
        self._df1 = modfn.bind(modfn.diff(spec.f1), p)
        self._df2 = modfn.bind(modfn.diff(spec.f2), p)
        self._w1 = modfn.bind(spec.omega1, p)
        self._w2 = modfn.bind(spec.omega2, p)

    # -- scalar building blocks ------------------------------------------

    def omega_plus(self, t: float) -> complex:
        return 0.5 * (self._w1(t) + self._w2(t))

    def omega_minus(self, t: float) -> complex:
        return 0.5 * (self._w1(t) - self._w2(t))

    def check_modulation(self, t: float) -> tuple[complex, complex]:
        v1, v2 = self._f1(t), self._f2(t)
        scale = 1.0 + abs(v1) + abs(v2)
        if abs(v1) < 1e-12 * scale or abs(v2) < 1e-12 * scale:
            raise ModulationZeroError(f"modulation vanishes at t={t}: f1={v1}, f2={v2}")
        return v1, v2

    def log_ratio_rate(self, t: float) -> complex:
        """d/dt ln(f1/f2) from the symbolic derivatives."""
        v1, v2 = self.check_modulation(t)
        return self._df1(t) / v1 - self._df2(t) / v2

    def gamma(self, t: float) -> complex:
        """Effective onsite potential i*Omega_minus + (1/2) d/dt ln(f1/f2)."""
        return 1j * self.omega_minus(t) + 0.5 * self.log_ratio_rate(t)

    # -- gauge matrix ------------------------------------------------------

    def _phase_integral(self, t: float) -> complex:
        return quad_complex(self.omega_plus, self.spec.t_ref, t)

    def _half_log_ratio(self, t: float) -> complex:
        """(1/2) ln(f1/f2) continued from the principal branch at t_ref.

        Integrating the logarithmic derivative follows the branch along the
        path, which is the physically meaningful square root when f1/f2
        winds around the origin.
        """
        t_ref = self.spec.t_ref
        v1, v2 = self.check_modulation(t_ref)
        seed = cmath.log(v1 / v2)
        try:
            run = quad_complex(self.log_ratio_rate, t_ref, t)
        except (IntegrationError, ModulationZeroError) as exc:
            raise BranchTrackingError(
                f"cannot continue sqrt(f1/f2) from {t_ref} to {t}: {exc}"
            ) from exc
        return 0.5 * (seed + run)

    def a_matrix(self, t: float) -> np.ndarray:
        self.check_modulation(t)
        p1, p2 = self.spec.gauge_prefactor
        c = cmath.exp(-1j * self._phase_integral(t))
        s = cmath.exp(self._half_log_ratio(t))
        return mat2(p1 * c * s, 0.0, 0.0, p2 * c / s)

    def a_inv(self, t: float) -> np.ndarray:
        return inv2(self.a_matrix(t))

    def a_dot(self, t: float) -> np.ndarray:
        """dA/dt from the symbolic diagonal derivatives and the phase rule."""
        p1, p2 = self.spec.gauge_prefactor
        c = cmath.exp(-1j * self._phase_integral(t))
        hl = self._half_log_ratio(t)
        dhl = 0.5 * self.log_ratio_rate(t)
        dphase = -1j * self.omega_plus(t)
        s = cmath.exp(hl)
        return mat2(
            p1 * c * s * (dphase + dhl),
            0.0,
            0.0,
            p2 * (c / s) * (dphase - dhl),
        )

    # -- Hamiltonians ------------------------------------------------------

    def hamiltonian(self, t: float) -> np.ndarray:
        v1, v2 = self.check_modulation(t)
        return mat2(
            self._w1(t),
            self.spec.nu * v1 / v2,
            self.spec.nu_prime * v2 / v1,
            self._w2(t),
        )

    def effective_closed(self, t: float) -> np.ndarray:
        g = self.gamma(t)
        return mat2(-1j * g, self.spec.nu_eff, self.spec.nu_prime_eff, 1j * g)

    def effective_numeric(self, t: float) -> np.ndarray:
        """Literal transform A^-1 H A - i A^-1 dA/dt.

        Independent numerical oracle for effective_closed: the gauge matrix,
        its derivative and the inverse are all built explicitly and
        multiplied out, so the traceless balanced form emerges from
        cancellation rather than by construction.
        """
        a = self.a_matrix(t)
        ai = inv2(a)
        return ai @ self.hamiltonian(t) @ a - 1j * (ai @ self.a_dot(t))

    # -- grid evaluation (single cumulative integration pass) --------------

    def gauge_on_grid(self, ts: Sequence[float]) -> list[np.ndarray]:
        """A(t) on a grid via one adaptive cumulative integration.

        Equivalent to a_matrix at each point (same integrands) but costs a
        single ODE solve instead of one quadrature per sample.
        """
        ts = np.asarray(ts, dtype=float)
        phase, halflog = self._cumulative_integrals(ts)
        p1, p2 = self.spec.gauge_prefactor
        out = []
        for k in range(len(ts)):
            self.check_modulation(float(ts[k]))
            c = cmath.exp(-1j * phase[k])
            s = cmath.exp(halflog[k])
            out.append(mat2(p1 * c * s, 0.0, 0.0, p2 * c / s))
        return out

    def _cumulative_integrals(self, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        t_ref = self.spec.t_ref
        v1, v2 = self.check_modulation(t_ref)
        seed = cmath.log(v1 / v2)

        def rhs(t, _y):
            return [self.omega_plus(t), self.log_ratio_rate(t)]

        phase = np.zeros(len(ts), dtype=complex)
        halflog = np.zeros(len(ts), dtype=complex)

        for sign in (+1, -1):
            sel = ts > t_ref if sign > 0 else ts < t_ref
            if not np.any(sel):
                continue
            t_end = ts[sel].max() if sign > 0 else ts[sel].min()
            sol = solve_ivp(
                rhs,
                (t_ref, float(t_end)),
                np.zeros(2, dtype=complex),
                method="DOP853",
                rtol=1e-12,
                atol=1e-13,
                dense_output=True,
            )
            if not sol.success:
                raise BranchTrackingError(f"cumulative gauge integration failed: {sol.message}")
            vals = sol.sol(ts[sel])
            phase[sel] = vals[0]
            halflog[sel] = vals[1]

        at_ref = np.isclose(ts, t_ref)
        phase[at_ref] = 0.0
        halflog[at_ref] = 0.0
        return phase, 0.5 * (seed + halflog)


def _frame(spec: ModelSpec | EffectiveFrame) -> EffectiveFrame:
    return spec if isinstance(spec, EffectiveFrame) else EffectiveFrame(spec)


# ---------------------------------------------------------------------------
# Module-level operations
# ---------------------------------------------------------------------------


def hamiltonian(spec: ModelSpec | EffectiveFrame, t: float) -> np.ndarray:
    return _frame(spec).hamiltonian(t)


def gauge(spec: ModelSpec | EffectiveFrame, t: float) -> np.ndarray:
    """Gauge matrix A(t); the phase integral is adaptive quadrature."""
    return _frame(spec).a_matrix(t)


def gamma_eff(spec: ModelSpec | EffectiveFrame, t: float) -> complex:
    return _frame(spec).gamma(t)


def effective_closed(spec: ModelSpec | EffectiveFrame, t: float) -> np.ndarray:
    return _frame(spec).effective_closed(t)


def effective_numeric(spec: ModelSpec | EffectiveFrame, t: float) -> np.ndarray:
    return _frame(spec).effective_numeric(t)


@dataclass(frozen=True)
class SpectraResult:
    lambda_orig: tuple[complex, complex]
    lambda_eff: tuple[complex, complex]


def spectra(spec: ModelSpec | EffectiveFrame, t: float) -> SpectraResult:
    """Closed-form eigenvalues of both frames at time t.

    Effective frame: -+sqrt(nu nu' - Gamma^2); original frame:
    Omega_plus -+ sqrt(Omega_minus^2 + nu nu'), principal square roots.
    """
    fr = _frame(spec)
    s = fr.spec
    g = fr.gamma(t)
    prod = s.nu_eff * s.nu_prime_eff
    se = cmath.sqrt(prod - g * g)
    om = fr.omega_minus(t)
    op = fr.omega_plus(t)
    so = cmath.sqrt(om * om + s.nu * s.nu_prime)
    return SpectraResult((op - so, op + so), (-se, +se))


def _arccot(z: complex) -> complex:
    try:
        return cmath.pi / 2 - cmath.atan(z)
    except ValueError:
        # atan poles at z = +-i: the mixing angle is undefined exactly at
        # an exceptional point
        return complex("nan+nanj")


@dataclass(frozen=True)
class EigenbasisResult:
    """Half-angle eigenbases of both frames.

    chi_-+ diagonalize the effective generator with eigenvalues
    -+sqrt(nu nu' - Gamma^2); psi_-+ diagonalize H(t) with eigenvalues
    Omega_plus -+ sqrt(Omega_minus^2 + nu nu').  g_bar satisfies
    cot g_bar = -i Gamma / mu (the sign for which the half-angle vectors
    are genuine eigenvectors; it differs by g_bar -> pi - g_bar from the
    +i Gamma / mu convention) and g satisfies cot g = Omega_minus / mu,
    with mu the geometric mean of the couplings.
    """

    chi_minus: np.ndarray | None
    chi_plus: np.ndarray | None
    psi_minus: np.ndarray | None
    psi_plus: np.ndarray | None
    g: complex
    g_bar: complex
    ep_degenerate: bool
    residuals: tuple[float, float, float, float]


def _half_angle_pair(x: complex, mu: complex) -> tuple[complex, np.ndarray, np.ndarray, complex]:
    """Eigen pair of [[x, mu], [mu, -x]] via the half angle.

    Returns (angle, v_for_-mu/sin, v_for_+mu/sin, mu/sin(angle)); the
    caller matches the +-mu/sin(angle) pair against its own root branch.
    """
    ang = _arccot(x / mu)
    half = ang / 2.0
    v_lo = np.array([-cmath.sin(half), cmath.cos(half)], dtype=complex)
    v_hi = np.array([cmath.cos(half), cmath.sin(half)], dtype=complex)
    return ang, v_lo, v_hi, mu / cmath.sin(ang)


def _residual(h: np.ndarray, lam: complex, v: np.ndarray) -> float:
    return float(np.linalg.norm(h @ v - lam * v) / max(np.linalg.norm(h), 1e-300))


def eigenbasis(spec: ModelSpec | EffectiveFrame, t: float) -> EigenbasisResult:
    """Right eigenvectors of both frames in half-angle form.

    At an exceptional point of the effective frame (eigenvector
    coalescence >= 1 - 1e-8) the degenerate flag is set and the vector
    slots are None.
    """
    fr = _frame(spec)
    s = fr.spec
    if s.nu_eff == 0 or s.nu == 0:
        raise ValueError("eigenbasis requires nonzero coupling nu")

    h_eff = fr.effective_closed(t)
    h_orig = fr.hamiltonian(t)
    lam = spectra(fr, t)

    if eig2(h_eff).defective:
        return EigenbasisResult(
            None, None, None, None, float("nan"), float("nan"), True,
            (float("nan"),) * 4,
        )

    # effective frame: generator -i Gamma sigma_z + couplings
    mu_e = cmath.sqrt(s.nu_eff * s.nu_prime_eff)
    d_e = cmath.sqrt(s.nu_eff / mu_e)
    g_bar, v_lo, v_hi, root = _half_angle_pair(-1j * fr.gamma(t), mu_e)
    scale_e = np.array([d_e, 1.0 / d_e], dtype=complex)
    lo, hi = v_lo * scale_e, v_hi * scale_e
    if abs(-root - lam.lambda_eff[0]) <= abs(-root - lam.lambda_eff[1]):
        chi_minus, chi_plus = lo, hi
    else:
        chi_minus, chi_plus = hi, lo
    chi_minus = chi_minus / np.linalg.norm(chi_minus)
    chi_plus = chi_plus / np.linalg.norm(chi_plus)

    # original frame: the same half angle after pulling out diag(f1, f2)
    mu_o = cmath.sqrt(s.nu * s.nu_prime)
    d_o = cmath.sqrt(s.nu / mu_o)
    v1, v2 = fr.check_modulation(t)
    g_ang, w_lo, w_hi, root_o = _half_angle_pair(fr.omega_minus(t), mu_o)
    scale_o = np.array([d_o * v1, v2 / d_o], dtype=complex)
    lo_o, hi_o = w_lo * scale_o, w_hi * scale_o
    op = fr.omega_plus(t)
    if abs((op - root_o) - lam.lambda_orig[0]) <= abs((op - root_o) - lam.lambda_orig[1]):
        psi_minus, psi_plus = lo_o, hi_o
    else:
        psi_minus, psi_plus = hi_o, lo_o
    psi_minus = psi_minus / np.linalg.norm(psi_minus)
    psi_plus = psi_plus / np.linalg.norm(psi_plus)

    residuals = (
        _residual(h_eff, lam.lambda_eff[0], chi_minus),
        _residual(h_eff, lam.lambda_eff[1], chi_plus),
        _residual(h_orig, lam.lambda_orig[0], psi_minus),
        _residual(h_orig, lam.lambda_orig[1], psi_plus),
    )
    return EigenbasisResult(
        chi_minus, chi_plus, psi_minus, psi_plus, g_ang, g_bar, False, residuals
    )


@dataclass(frozen=True)
class EPReport:
    """Sweep of the dimensionless EP coordinates along a time grid.

    dist_* hold |B -+ i| (original frame) and |B_bar -+ i| (effective
    frame); crossings_* list grid times where the smaller of the two dips
    below tol.  The shift split b = b_r + i b_i satisfies
    B_bar = -B + i b at every sample by construction.
    """

    times: np.ndarray
    B: np.ndarray
    B_bar: np.ndarray
    b: np.ndarray
    dist_orig: tuple[np.ndarray, np.ndarray]
    dist_eff: tuple[np.ndarray, np.ndarray]
    crossings_orig: np.ndarray
    crossings_eff: np.ndarray
    g: np.ndarray
    g_bar: np.ndarray
    k_g: np.ndarray
    k_g_bar: np.ndarray
    tol_ep: float

    @property
    def b_r(self) -> np.ndarray:
        return self.b.real

    @property
    def b_i(self) -> np.ndarray:
        return self.b.imag


def _unwrap_branch(angles: np.ndarray) -> np.ndarray:
    """Integer branch indices k that make Re(angle + k*pi) continuous."""
    k = np.zeros(len(angles), dtype=int)
    for j in range(1, len(angles)):
        if cmath.isnan(angles[j]) or cmath.isnan(angles[j - 1]):
            k[j] = k[j - 1]
            continue
        prev = angles[j - 1] + k[j - 1] * cmath.pi
        best = min(
            (k[j - 1] + d for d in (-1, 0, 1)),
            key=lambda kk: abs((angles[j] + kk * cmath.pi) - prev),
        )
        k[j] = best
    return k


def ep_report(
    spec: ModelSpec | EffectiveFrame,
    t_grid: Sequence[float],
    tol_ep: float = 1e-6,
) -> EPReport:
    """Sample B, B_bar and the EP shift b along t_grid and flag crossings."""
    fr = _frame(spec)
    s = fr.spec
    nu = s.nu_eff
    ts = np.asarray(t_grid, dtype=float)

    B = np.array([fr.omega_minus(t) / nu for t in ts])
    gam = [fr.gamma(t) for t in ts]
    B_bar = np.array([1j * g / nu for g in gam])
    b = np.array([fr.log_ratio_rate(t) / (2 * nu) for t in ts])

    i = 1j
    dist_orig = (np.abs(B - i), np.abs(B + i))
    dist_eff = (np.abs(B_bar - i), np.abs(B_bar + i))
    crossings_orig = ts[np.minimum(*dist_orig) < tol_ep]
    crossings_eff = ts[np.minimum(*dist_eff) < tol_ep]

    mu_o = cmath.sqrt(s.nu * s.nu_prime)
    mu_e = cmath.sqrt(s.nu_eff * s.nu_prime_eff)
    g = np.array([_arccot(fr.omega_minus(t) / mu_o) for t in ts])
    g_bar = np.array([_arccot(-1j * gv / mu_e) for gv in gam])

    return EPReport(
        times=ts,
        B=B,
        B_bar=B_bar,
        b=b,
        dist_orig=dist_orig,
        dist_eff=dist_eff,
        crossings_orig=crossings_orig,
        crossings_eff=crossings_eff,
        g=g,
        g_bar=g_bar,
        k_g=_unwrap_branch(g),
        k_g_bar=_unwrap_branch(g_bar),
        tol_ep=tol_ep,
    )
