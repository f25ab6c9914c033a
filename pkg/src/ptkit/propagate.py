"""Adaptive numerical propagation of the two-level dynamics.

Solves i dpsi/dt = H(t) psi for state vectors and i dU/dt = H(t) U for full
2x2 propagators with an embedded adaptive Runge-Kutta scheme (scipy's
complex-capable DOP853 by default, Dormand-Prince RK45 available via the
config).  Dense output is interpolated onto the requested output grid.

Broken-phase trajectories grow exponentially by design, so a terminal
overflow guard truncates the run once the state norm passes 1e150 and the
partial trajectory is returned with a flag instead of infinities.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from ._quad import quad_complex
from .errors import IntegrationError
from .model import EffectiveFrame, ModelSpec

OVERFLOW_NORM = 1e150

HFun = Callable[[float], np.ndarray]


@dataclass(frozen=True)
class IntegratorConfig:
    rtol: float = 1e-10
    atol: float = 1e-12
    h_init: float | None = None
    h_min: float = 1e-14
    max_steps: int = 10_000_000
    method: str = "DOP853"  # any complex-capable embedded RK pair >= 4(5)

    def __post_init__(self):
        if self.rtol <= 0 or self.atol <= 0 or self.h_min <= 0:
            raise ValueError("tolerances and h_min must be positive")


DEFAULT_CONFIG = IntegratorConfig()


@dataclass
class Trajectory:
    """Time-stamped complex state samples plus derived observables.

    states has shape (n, 2); norm and the per-site densities |psi_1|^2,
    |psi_2|^2 are precomputed; extras holds scenario-specific observables
    (circuit energies).  truncated marks an overflow-guard stop: the
    samples end early but stay finite.
    """

    frame: str
    times: np.ndarray
    states: np.ndarray
    truncated: bool = False
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=complex)
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("trajectory times must be strictly increasing")
        if not np.all(np.isfinite(self.states)):
            raise ValueError("trajectory states must be finite")

    @property
    def norm(self) -> np.ndarray:
        return np.linalg.norm(self.states, axis=1)

    @property
    def density(self) -> np.ndarray:
        """Per-site occupations |psi_k|^2, shape (n, 2)."""
        return np.abs(self.states) ** 2


def _solve(rhs, y0: np.ndarray, t0: float, t1: float, cfg: IntegratorConfig, events=None):
    kwargs = dict(
        method=cfg.method,
        rtol=cfg.rtol,
        atol=cfg.atol,
        dense_output=True,
        events=events,
    )
    if cfg.h_init is not None:
        kwargs["first_step"] = cfg.h_init
    sol = solve_ivp(rhs, (t0, t1), y0, **kwargs)
    if sol.status == -1:
        raise IntegrationError(f"integration failed on [{t0}, {t1}]: {sol.message}")
    if sol.nfev > cfg.max_steps:
        raise IntegrationError(f"step budget exceeded ({sol.nfev} evaluations)")
    return sol


def propagate_state(
    hfun: HFun,
    psi0: Sequence[complex],
    t0: float,
    t1: float,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    out_grid: Sequence[float] | None = None,
    frame: str = "original",
) -> Trajectory:
    """Integrate i dpsi/dt = H(t) psi from t0 to t1 (t1 > t0).

    The trajectory is sampled on out_grid (default: 201 uniform points).
    An overflow guard truncates once ||psi|| exceeds 1e150.
    """
    if not t1 > t0:
        raise ValueError("propagate_state requires t1 > t0")
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (2,):
        raise ValueError("psi0 must be a complex 2-vector")
    grid = np.linspace(t0, t1, 201) if out_grid is None else np.asarray(out_grid, dtype=float)

    def rhs(t, y):
        return -1j * (hfun(t) @ y)

    def overflow(t, y):
        return float(np.linalg.norm(y)) - OVERFLOW_NORM

    overflow.terminal = True
    overflow.direction = 1

    sol = _solve(rhs, psi0, t0, t1, cfg, events=[overflow])
    truncated = sol.status == 1
    t_end = sol.t[-1]
    keep = grid <= t_end + 1e-15
    states = sol.sol(grid[keep]).T
    return Trajectory(frame=frame, times=grid[keep], states=states, truncated=truncated)


def propagate_matrix(
    hfun: HFun,
    t0: float,
    t1: float,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
) -> np.ndarray:
    """Propagator U(t1, t0) of i dU/dt = H(t) U with U(t0) = identity."""

    def rhs(t, y):
        return (-1j * (hfun(t) @ y.reshape(2, 2))).ravel()

    sol = _solve(rhs, np.eye(2, dtype=complex).ravel(), t0, t1, cfg)
    return sol.y[:, -1].reshape(2, 2)


@dataclass(frozen=True)
class RoundtripResult:
    traj_orig: Trajectory
    traj_eff: Trajectory
    max_deviation: float


def gauge_roundtrip(
    spec: ModelSpec | EffectiveFrame,
    psi0: Sequence[complex],
    t0: float,
    t1: float,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    out_grid: Sequence[float] | None = None,
) -> RoundtripResult:
    """Propagate both frames and report the gauge-consistency deviation.

    psi evolves under H(t); chi evolves under the balanced effective
    generator from chi(t0) = A(t0)^-1 psi0.  Returns the largest
    ||psi(t) - A(t) chi(t)|| / (1 + ||psi(t)||) over the output grid.
    """
    fr = spec if isinstance(spec, EffectiveFrame) else EffectiveFrame(spec)
    grid = np.linspace(t0, t1, 101) if out_grid is None else np.asarray(out_grid, dtype=float)

    psi0 = np.asarray(psi0, dtype=complex)
    chi0 = fr.a_inv(t0) @ psi0

    traj_orig = propagate_state(fr.hamiltonian, psi0, t0, t1, cfg, grid, frame="original")
    traj_eff = propagate_state(fr.effective_closed, chi0, t0, t1, cfg, grid, frame="effective")

    n = min(len(traj_orig.times), len(traj_eff.times))
    gauges = fr.gauge_on_grid(traj_orig.times[:n])
    dev = 0.0
    for k in range(n):
        psi = traj_orig.states[k]
        recon = gauges[k] @ traj_eff.states[k]
        dev = max(dev, float(np.linalg.norm(psi - recon) / (1.0 + np.linalg.norm(psi))))
    return RoundtripResult(traj_orig, traj_eff, dev)


def liouville_determinant(hfun: HFun, t0: float, t1: float) -> complex:
    """exp(-i Int tr H dt), the closed-form determinant of U(t1, t0)."""
    tr = quad_complex(lambda t: hfun(t)[0, 0] + hfun(t)[1, 1], t0, t1, epsabs=1e-12)
    return np.exp(-1j * tr)
