import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from conftest import random_state
from gaugewalk.estimators import GaugeFieldWalk, QuasienergyButterfly, TwoPhotonObservables
from gaugewalk.lattice import LatticeError, LatticeSpec
from gaugewalk.operators import build_step, dense_matrix
from gaugewalk.spectrum import quasienergies


def test_get_set_params_and_clone():
    w = GaugeFieldWalk(lattice_size=6, flux=0.3, n_steps=2)
    assert w.get_params()["flux"] == 0.3
    w2 = clone(w).set_params(flux=0.5)
    assert w2.flux == 0.5 and w.flux == 0.3


def test_transform_matches_dense(rng):
    w = GaugeFieldWalk(lattice_size=4, flux=0.7, n_steps=3).fit()
    X = random_state(rng, 16, batch=5).T
    u = np.linalg.matrix_power(dense_matrix(build_step(LatticeSpec(4, 0.7))), 3)
    np.testing.assert_allclose(w.transform(X), (u @ X.T).T, atol=1e-13)


def test_not_fitted():
    with pytest.raises(NotFittedError):
        GaugeFieldWalk().transform(np.zeros((1, 900)))


def test_wrong_width_rejected():
    w = GaugeFieldWalk(lattice_size=4).fit()
    with pytest.raises(ValueError):
        w.transform(np.zeros((2, 15)))
    with pytest.raises(ValueError):
        w.transform(np.full((1, 16), np.nan))


def test_invalid_lattice_at_fit():
    with pytest.raises(LatticeError):
        GaugeFieldWalk(lattice_size=5).fit()


def test_pipeline_composes(rng):
    pipe = make_pipeline(GaugeFieldWalk(lattice_size=4, flux=0.2, n_steps=1), GaugeFieldWalk(lattice_size=4, flux=0.2, n_steps=2))
    X = random_state(rng, 16, batch=2).T
    single = GaugeFieldWalk(lattice_size=4, flux=0.2, n_steps=3).fit()
    np.testing.assert_allclose(pipe.fit_transform(X), single.transform(X), atol=1e-13)


def test_disordered_walk_reproducible():
    a = GaugeFieldWalk(lattice_size=6, disorder_strength=0.2, random_state=3).fit()
    b = GaugeFieldWalk(lattice_size=6, disorder_strength=0.2, random_state=3).fit()
    np.testing.assert_array_equal(dense_matrix(a.step_operator_), dense_matrix(b.step_operator_))


def test_rashba_walk_width():
    w = GaugeFieldWalk(lattice_size=4, rashba_angle=0.4).fit()
    assert w.n_features_in_ == 32


def test_evolve_series():
    w = GaugeFieldWalk(lattice_size=6, n_steps=10).fit()
    s = w.evolve((1, 1), "projector", (6, 6))
    assert abs(s.eta_cum[-1] + s.norm2[-1] - 1) < 1e-12


def test_butterfly_transformer():
    phis = np.array([0.0, 0.4, 1.3])
    e = QuasienergyButterfly(lattice_size=4).fit_transform(phis)
    assert e.shape == (3, 16)
    np.testing.assert_allclose(e[1], quasienergies(build_step(LatticeSpec(4, 0.4))).energies)


def test_two_photon_transformer():
    t = TwoPhotonObservables(lattice_size=4, n_steps=0).fit()
    np.testing.assert_allclose(t.transform([0.0, 1.0]), [[1.0, 1.0], [1.0, 1.0]])
    with pytest.raises(ValueError):
        TwoPhotonObservables(symmetry="anyonic").fit()
