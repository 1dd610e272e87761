import numpy as np
import pytest

from gaugewalk.lattice import LatticeSpec
from gaugewalk.operators import build_step, dense_matrix
from gaugewalk.spectrum import (
    NonUnitaryError,
    butterfly_points,
    butterfly_sweep,
    quasienergies,
)


def circular_match(e1, e2):
    """Largest distance between two sorted quasienergy lists, modulo 2 pi."""
    d = np.abs(np.sort(e1) - np.sort(e2))
    return float(np.minimum(d, 2 * np.pi - d).max())


def test_identity():
    s = quasienergies(np.eye(9))
    assert not s.energies.any()


def test_round_trip():
    op = build_step(LatticeSpec(6, 1.1))
    u = dense_matrix(op)
    e = quasienergies(op).energies
    lam = np.linalg.eigvals(u)
    back = np.exp(-1j * e)
    for z in lam:
        assert np.abs(back - z).min() < 1e-8
    for z in back:
        assert np.abs(lam - z).min() < 1e-8


def test_range_and_count():
    s = quasienergies(build_step(LatticeSpec(8, 0.4)))
    assert len(s) == 64
    assert np.all(s.energies > -np.pi) and np.all(s.energies <= np.pi)
    assert np.all(np.diff(s.energies) >= 0)


def test_two_pi_periodicity_exact():
    a = quasienergies(build_step(LatticeSpec(4, 0.0))).energies
    b = quasienergies(build_step(LatticeSpec(4, 2 * np.pi))).energies
    np.testing.assert_array_equal(a, b)
    sw = butterfly_sweep(6, [0.0, 2 * np.pi])
    np.testing.assert_array_equal(sw[0].energies, sw[1].energies)


def test_reflection_symmetry_m20():
    phi = 0.83
    a = quasienergies(build_step(LatticeSpec(20, phi))).energies
    b = quasienergies(build_step(LatticeSpec(20, 2 * np.pi - phi))).energies
    assert circular_match(a, b) < 1e-8


def test_relabeling_invariance(rng):
    u = dense_matrix(build_step(LatticeSpec(6, 0.9)))
    perm = rng.permutation(36)
    p = np.eye(36)[perm]
    a = quasienergies(u).energies
    b = quasienergies(p @ u @ p.T).energies
    assert circular_match(a, b) < 1e-8


def test_non_unitary_rejected():
    with pytest.raises(NonUnitaryError):
        quasienergies(1.01 * np.eye(4))


def test_size_cap():
    with pytest.raises(ValueError):
        quasienergies(build_step(LatticeSpec(8)), cap=32)


def test_points():
    pts = butterfly_points(butterfly_sweep(4, [0.0, 1.0]))
    assert pts.shape == (32, 2)
    assert set(pts[:, 0]) == {0.0, 1.0}


def test_empty_grid():
    with pytest.raises(ValueError):
        butterfly_sweep(4, [])
