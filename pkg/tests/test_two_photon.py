import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaugewalk.lattice import LatticeSpec, site_index
from gaugewalk.operators import build_step, dense_matrix
from gaugewalk.two_photon import (
    ExclusionError,
    TwoPhotonState,
    both_edge_probability,
    correlation_matrix,
    correlation_triples,
    evolve_pair,
    init_pair,
    mean_distance,
)


def propagator_pair(M, phi, a, b, sign, steps):
    """Symmetrized product of single-particle propagator columns."""
    g = np.linalg.matrix_power(dense_matrix(build_step(LatticeSpec(M, phi))), steps)
    ga, gb = g[:, site_index(a, M)], g[:, site_index(b, M)]
    return (np.outer(ga, gb) + sign * np.outer(gb, ga)) / np.sqrt(2)


@pytest.mark.parametrize("sym, sign", [("bosonic", 1), ("fermionic", -1)])
def test_init_pair(sym, sign):
    spec = LatticeSpec(4)
    s = init_pair(spec, (1, 1), (1, 2), sym)
    i, j = site_index((1, 1), 4), site_index((1, 2), 4)
    assert s.amplitudes[i, j] == pytest.approx(np.sqrt(0.5))
    assert s.amplitudes[j, i] == pytest.approx(sign * np.sqrt(0.5))
    assert abs(s.norm2 - 1) < 1e-14


def test_fermions_exclusion():
    with pytest.raises(ExclusionError):
        init_pair(LatticeSpec(4), (2, 2), (2, 2), "fermionic")


@pytest.mark.parametrize("sym, sign", [("bosonic", 1), ("fermionic", -1)])
def test_one_step_m2(sym, sign):
    s = evolve_pair(init_pair(LatticeSpec(2), (1, 1), (1, 2), sym), build_step(LatticeSpec(2)), 1)
    np.testing.assert_allclose(s.amplitudes, propagator_pair(2, 0.0, (1, 1), (1, 2), sign, 1), atol=1e-14)


@settings(max_examples=20, deadline=None)
@given(
    st.sampled_from([2, 4, 6]),
    st.floats(0, 2 * np.pi),
    st.integers(0, 5),
    st.sampled_from(["bosonic", "fermionic"]),
    st.data(),
)
def test_propagator_oracle(M, phi, steps, sym, data):
    sites = st.tuples(st.integers(1, M), st.integers(1, M))
    a = data.draw(sites)
    b = data.draw(sites.filter(lambda s: s != a))
    spec = LatticeSpec(M, phi)
    s = evolve_pair(init_pair(spec, a, b, sym), build_step(spec), steps)
    ref = propagator_pair(M, phi, a, b, 1 if sym == "bosonic" else -1, steps)
    assert np.abs(s.amplitudes - ref).max() < 1e-10


def test_norm_and_symmetry_preserved():
    spec = LatticeSpec(30, np.pi / 5)
    op = build_step(spec)
    for sym in ("bosonic", "fermionic"):
        s = init_pair(spec, (1, 1), (1, 2), sym)
        for _ in range(20):
            s = evolve_pair(s, op, 1)
            assert s.symmetry_error() < 1e-10
            if sym == "fermionic":
                assert np.abs(np.diag(s.amplitudes)).max() < 1e-10
        assert abs(s.norm2 - 1) < 1e-10


def test_initial_observables():
    spec = LatticeSpec(30)
    for sym in ("bosonic", "fermionic"):
        s = init_pair(spec, (1, 1), (1, 2), sym)
        assert mean_distance(s, "euclidean") == pytest.approx(1.0)
        assert mean_distance(s, "manhattan") == pytest.approx(1.0)
        assert both_edge_probability(s) == pytest.approx(1.0)


def test_distance_metrics_differ_on_diagonal_pair():
    s = init_pair(LatticeSpec(6), (1, 1), (2, 2), "bosonic")
    assert mean_distance(s, "euclidean") == pytest.approx(np.sqrt(2))
    assert mean_distance(s, "manhattan") == pytest.approx(2.0)


def test_zero_norm_rejected():
    s = TwoPhotonState(np.zeros((16, 16)), LatticeSpec(4), "bosonic")
    for f in (mean_distance, both_edge_probability, correlation_matrix):
        with pytest.raises(ValueError):
            f(s)


def test_correlation_matrix_initial():
    g = correlation_matrix(init_pair(LatticeSpec(4), (1, 1), (1, 2), "bosonic"))
    np.testing.assert_array_equal(g, g.T)
    assert np.count_nonzero(np.triu(g)) == 1
    assert np.triu(g).sum() == pytest.approx(1.0)


def test_correlation_marginals_match_single_photon():
    M, phi, steps = 6, 0.9, 4
    spec = LatticeSpec(M, phi)
    a, b = (2, 2), (3, 5)
    g = correlation_matrix(evolve_pair(init_pair(spec, a, b, "bosonic"), build_step(spec), steps))
    u = np.linalg.matrix_power(dense_matrix(build_step(spec)), steps)
    # mean occupation: each single photon's distribution, added
    occupation = np.abs(u[:, site_index(a, M)]) ** 2 + np.abs(u[:, site_index(b, M)]) ** 2
    np.testing.assert_allclose(g.sum(axis=1) + np.diag(g), occupation, atol=1e-12)
    assert np.triu(g).sum() == pytest.approx(1.0)


def test_triples():
    g = correlation_matrix(init_pair(LatticeSpec(4), (1, 1), (2, 1), "fermionic"))
    idx, val = correlation_triples(g)
    assert idx.tolist() == [[0, 4]]
    assert val.tolist() == pytest.approx([1.0])


def test_polarized_lattice_rejected():
    with pytest.raises(ValueError):
        init_pair(LatticeSpec(4, 0.0, 0.3), (1, 1), (1, 2))
