import random

import numpy as np
import pytest

from conftest import gen_model_spec
from ptkit.linalg2 import SIGMA_X, SIGMA_Z, det2, mat2
from ptkit.model import ModelSpec
from ptkit.propagate import (
    IntegratorConfig,
    gauge_roundtrip,
    liouville_determinant,
    propagate_matrix,
    propagate_state,
)

TIGHT = IntegratorConfig(rtol=1e-12, atol=1e-14)


class TestState:
    def test_zero_generator(self):
        traj = propagate_state(lambda t: np.zeros((2, 2), complex), [1, 2j], 0, 5)
        assert np.allclose(traj.states, [1, 2j])

    def test_rabi_rotation(self):
        traj = propagate_state(lambda t: SIGMA_X, [1, 0], 0, 10, cfg=TIGHT)
        for t, psi in zip(traj.times, traj.states):
            assert psi[0] == pytest.approx(np.cos(t), abs=1e-10)
            assert psi[1] == pytest.approx(-1j * np.sin(t), abs=1e-10)

    def test_norm_conservation_hermitian_long_run(self):
        h = SIGMA_X + 0.5 * SIGMA_Z
        traj = propagate_state(lambda t: h, [0.6, 0.8j], 0, 100, cfg=TIGHT)
        drift = np.abs(traj.norm - traj.norm[0])
        assert drift.max() <= 1e-9

    def test_overflow_truncation(self):
        # pure gain: psi grows like e^{50 t}; the guard must stop the run
        h = 50j * SIGMA_Z
        traj = propagate_state(lambda t: h, [1, 0], 0, 10, cfg=IntegratorConfig(rtol=1e-8, atol=1e-10))
        assert traj.truncated
        assert traj.times[-1] < 10
        assert np.all(np.isfinite(traj.states))
        assert traj.norm[-1] < 1e150 * 1.01

    def test_out_grid_respected(self):
        grid = np.array([0.0, 0.3, 1.7, 2.0])
        traj = propagate_state(lambda t: SIGMA_X, [1, 0], 0, 2, out_grid=grid)
        assert np.array_equal(traj.times, grid)

    def test_density_observable(self):
        traj = propagate_state(lambda t: SIGMA_X, [1, 0], 0, 1, cfg=TIGHT)
        assert np.allclose(traj.density.sum(axis=1), 1.0, atol=1e-9)


class TestMatrix:
    def test_hermitian_unitary(self):
        h = SIGMA_X + 0.3 * SIGMA_Z
        u = propagate_matrix(lambda t: h, 0, 3, cfg=TIGHT)
        assert np.linalg.norm(u.conj().T @ u - np.eye(2)) <= 1e-10

    def test_static_pt_unbroken_unimodular_eigenvalues(self):
        # balanced gain/loss below threshold: |lambda_1| = |lambda_2| = 1
        h = 0.5j * SIGMA_Z + SIGMA_X  # gamma=0.5 < nu=1
        u = propagate_matrix(lambda t: h, 0, 2 * np.pi, cfg=TIGHT)
        lam = np.linalg.eigvals(u)
        assert np.allclose(np.abs(lam), 1.0, atol=1e-10)

    def test_liouville_formula(self):
        rng = random.Random(5)
        for _ in range(5):
            spec = gen_model_spec(rng)
            from ptkit.model import EffectiveFrame

            fr = EffectiveFrame(spec)
            u = propagate_matrix(fr.hamiltonian, 0, 2.0, cfg=TIGHT)
            expect = liouville_determinant(fr.hamiltonian, 0, 2.0)
            assert det2(u) == pytest.approx(expect, abs=1e-9)

    def test_traceless_unimodular_determinant(self):
        rng = random.Random(6)
        spec = gen_model_spec(rng)
        from ptkit.model import EffectiveFrame

        fr = EffectiveFrame(spec)
        u = propagate_matrix(fr.effective_closed, 0, 3.0, cfg=TIGHT)
        assert det2(u) == pytest.approx(1.0, abs=1e-10)

    def test_composition(self):
        rng = random.Random(7)
        for _ in range(5):
            spec = gen_model_spec(rng)
            from ptkit.model import EffectiveFrame

            fr = EffectiveFrame(spec)
            t_mid = rng.uniform(0.5, 2.5)
            u_full = propagate_matrix(fr.hamiltonian, 0, 3.0, cfg=TIGHT)
            u_a = propagate_matrix(fr.hamiltonian, 0, t_mid, cfg=TIGHT)
            u_b = propagate_matrix(fr.hamiltonian, t_mid, 3.0, cfg=TIGHT)
            assert np.linalg.norm(u_full - u_b @ u_a) <= 5e-10


class TestRoundtrip:
    def test_trivial_gauge(self):
        spec = ModelSpec(nu=1.0, nu_prime=1.0)
        res = gauge_roundtrip(spec, [1, 0], 0, 5)
        assert res.max_deviation <= 1e-10

    def test_random_specs(self):
        rng = random.Random(12)
        for _ in range(4):
            spec = gen_model_spec(rng)
            res = gauge_roundtrip(spec, [0.8, 0.6j], 0, 5.0)
            assert res.max_deviation <= 1e-6

    def test_tolerance_monotonicity(self):
        # halving the tolerances must not make the roundtrip worse
        rng = random.Random(13)
        spec = gen_model_spec(rng)
        loose = gauge_roundtrip(spec, [1, 0], 0, 4, cfg=IntegratorConfig(rtol=1e-6, atol=1e-8))
        tight = gauge_roundtrip(spec, [1, 0], 0, 4, cfg=IntegratorConfig(rtol=1e-11, atol=1e-13))
        assert tight.max_deviation <= loose.max_deviation
