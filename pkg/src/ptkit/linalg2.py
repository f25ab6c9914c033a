"""Closed-form complex 2x2 linear algebra.

Everything here is exact-size: eigenvalues come from the quadratic formula
on the characteristic polynomial, eigenvectors from the null space of
(m - lambda I), and defectiveness is reported as the eigenvector overlap
|<v1, v2>| so exceptional points can be detected quantitatively.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularMatrixError

COALESCENCE_DEFECTIVE = 1.0 - 1e-8

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)


def mat2(m11: complex, m12: complex, m21: complex, m22: complex) -> np.ndarray:
    return np.array([[m11, m12], [m21, m22]], dtype=complex)


def trace2(m: np.ndarray) -> complex:
    return m[0, 0] + m[1, 1]


def det2(m: np.ndarray) -> complex:
    return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]


def mul2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b


def inv2(m: np.ndarray) -> np.ndarray:
    d = det2(m)
    if abs(d) < 1e-300:
        raise SingularMatrixError(f"matrix is singular (|det| = {abs(d):.3e})")
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]], dtype=complex) / d


@dataclass(frozen=True)
class Eig2:
    """Eigen-decomposition of a 2x2 complex matrix.

    values are the two characteristic roots sorted by (real, imag)
    ascending; vectors are unit right eigenvectors; coalescence is the
    overlap |<v1, v2>| under the Euclidean inner product (1 at an
    exceptional point, 0 for an orthogonal pair).
    """

    values: tuple[complex, complex]
    vectors: tuple[np.ndarray, np.ndarray]
    coalescence: float
    defective: bool


def _null_vector(row_a: np.ndarray, row_b: np.ndarray, fallback: np.ndarray) -> np.ndarray:
    # Unit vector annihilated by the numerically larger row of (m - lambda I).
    na, nb = np.abs(row_a).max(), np.abs(row_b).max()
    row = row_a if na >= nb else row_b
    if max(na, nb) == 0.0:
        return fallback
    v = np.array([row[1], -row[0]], dtype=complex)
    return v / np.linalg.norm(v)


def eig2(m: np.ndarray) -> Eig2:
    """Eigenvalues and unit right eigenvectors of a 2x2 complex matrix.

    Never raises: near-defective matrices come back with coalescence near 1
    and the ``defective`` flag set.
    """
    m = np.asarray(m, dtype=complex)
    norm = float(np.linalg.norm(m))
    if norm == 0.0:
        e1 = np.array([1.0, 0.0], dtype=complex)
        e2 = np.array([0.0, 1.0], dtype=complex)
        return Eig2((0.0 + 0j, 0.0 + 0j), (e1, e2), 0.0, False)
    # rescale only at extreme magnitudes so ordinary inputs stay exact
    scale = norm if (norm > 1e100 or norm < 1e-100) else 1.0
    a = m / scale if scale != 1.0 else m

    half_tr = trace2(a) / 2.0
    s = np.sqrt(complex(half_tr * half_tr - det2(a)))
    lam = sorted((half_tr - s, half_tr + s), key=lambda z: (z.real, z.imag))

    vecs = []
    for k, lk in enumerate(lam):
        shifted = a - lk * IDENTITY
        fallback = np.array([1.0, 0.0] if k == 0 else [0.0, 1.0], dtype=complex)
        vecs.append(_null_vector(shifted[0], shifted[1], fallback))

    coalescence = min(1.0, float(abs(np.vdot(vecs[0], vecs[1]))))
    values = (lam[0] * scale, lam[1] * scale) if scale != 1.0 else (lam[0], lam[1])
    return Eig2(
        (complex(values[0]), complex(values[1])),
        (vecs[0], vecs[1]),
        coalescence,
        coalescence >= COALESCENCE_DEFECTIVE,
    )
