import numpy as np
import pytest

from ptkit.errors import SingularMatrixError
from ptkit.linalg2 import (
    IDENTITY,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_Y,
    SIGMA_Z,
    det2,
    eig2,
    inv2,
    mat2,
    trace2,
)


def random_mat(rng):
    return mat2(*(complex(rng.normal(), rng.normal()) for _ in range(4)))


class TestEig:
    def test_diagonal(self):
        r = eig2(mat2(2, 0, 0, 3))
        assert r.values == (2, 3)
        assert r.coalescence == pytest.approx(0.0, abs=1e-14)
        assert not r.defective

    def test_exceptional_point_matrix(self):
        # balanced gain/loss at Gamma = nu: Jordan block in disguise
        r = eig2(mat2(-1j, 1, 1, 1j))
        assert abs(r.values[0]) < 1e-8 and abs(r.values[1]) < 1e-8
        assert r.coalescence >= 1 - 1e-8
        assert r.defective

    def test_static_gain_loss_spectrum(self):
        # i*gamma*sigma_z + omega0*sigma_y at gamma=0.5, omega0=1:
        # eigenvalues -+sqrt(omega0^2 - gamma^2) = -+0.8660254
        h = 0.5j * SIGMA_Z + SIGMA_Y
        r = eig2(h)
        assert r.values[0] == pytest.approx(-np.sqrt(0.75), abs=1e-12)
        assert r.values[1] == pytest.approx(+np.sqrt(0.75), abs=1e-12)

    def test_sorted_by_real_then_imag(self):
        r = eig2(mat2(1j, 0, 0, -1j))
        assert r.values[0].imag < r.values[1].imag

    def test_zero_matrix(self):
        r = eig2(mat2(0, 0, 0, 0))
        assert r.values == (0, 0)
        assert not r.defective

    def test_residual_and_char_poly_10k_random(self):
        rng = np.random.default_rng(42)
        for _ in range(10_000):
            m = random_mat(rng)
            r = eig2(m)
            tr, dt = trace2(m), det2(m)
            scale = max(abs(tr), abs(dt), 1.0)
            assert abs(r.values[0] + r.values[1] - tr) <= 1e-12 * scale
            assert abs(r.values[0] * r.values[1] - dt) <= 1e-12 * scale
            if r.coalescence < 1 - 1e-8:
                hnorm = np.linalg.norm(m)
                for lam, v in zip(r.values, r.vectors):
                    assert np.linalg.norm(m @ v - lam * v) <= 1e-12 * hnorm

    def test_against_numpy_eig(self):
        rng = np.random.default_rng(3)
        for _ in range(300):
            m = random_mat(rng)
            ours = sorted(eig2(m).values, key=lambda z: (z.real, z.imag))
            theirs = sorted(np.linalg.eigvals(m), key=lambda z: (z.real, z.imag))
            for a, b in zip(ours, theirs):
                assert a == pytest.approx(b, abs=1e-10)


class TestAlgebra:
    def test_inv_identity(self):
        assert np.allclose(inv2(IDENTITY), IDENTITY)

    def test_inv_roundtrip(self):
        rng = np.random.default_rng(11)
        for _ in range(500):
            m = random_mat(rng)
            if abs(det2(m)) < 1e-3:
                continue
            assert np.linalg.norm(inv2(m) @ m - IDENTITY) <= 1e-13 * max(1, np.linalg.norm(m) ** 2)
            assert np.allclose(inv2(inv2(m)), m, rtol=1e-12, atol=1e-12)

    def test_inv_singular(self):
        with pytest.raises(SingularMatrixError):
            inv2(mat2(1, 1, 1, 1))

    def test_balanced_generator_traceless(self):
        nu, nu_p, gamma = 0.7 - 0.2j, 1.1 + 0.4j, 0.3 + 0.9j
        h = nu * SIGMA_PLUS + nu_p * SIGMA_MINUS - 1j * gamma * SIGMA_Z
        assert trace2(h) == 0
