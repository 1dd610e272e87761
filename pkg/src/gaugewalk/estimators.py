"""scikit-learn style front ends.

The walk is a transformer over state vectors, the spectrum and the two-photon
observables are transformers over flux grids. Parameters follow the usual
conventions: set in ``__init__`` untouched, validated in ``fit``, fitted
attributes end in an underscore.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .disorder import DisorderConfig, sample_disorder
from .lattice import LatticeSpec
from .single_photon import AbsorberModel, PhotonState, evolve, make_step
from .spectrum import butterfly_sweep
from .two_photon import METRICS, SYMMETRIES, evolve_pair, init_pair, pair_observables
from .validation import check_fluxes, check_positive_int, check_states


class GaugeFieldWalk(TransformerMixin, BaseEstimator):
    """Discrete-time walk on an ``M x M`` lattice in a synthetic gauge field.

    ``fit`` builds the (possibly disordered) step operator; ``transform``
    evolves each row of ``X`` by ``n_steps`` steps.

    Parameters
    ----------
    lattice_size : int
        Even number of sites per side.
    flux : float
        Abelian flux per plaquette in radians.
    rashba_angle : float or None
        If set, the polarization-resolved Rashba walk is built instead and
        states have ``2 * M * M`` components.
    disorder_strength : float
        Standard deviation of the static coupler phases.
    random_state : int
        Seed of the disorder realization.
    n_steps : int
        Steps applied by ``transform``.
    """

    def __init__(
        self,
        lattice_size=30,
        flux=0.0,
        rashba_angle=None,
        disorder_strength=0.0,
        random_state=0,
        n_steps=1,
    ):
        self.lattice_size = lattice_size
        self.flux = flux
        self.rashba_angle = rashba_angle
        self.disorder_strength = disorder_strength
        self.random_state = random_state
        self.n_steps = n_steps

    def fit(self, X=None, y=None):
        check_positive_int(self.n_steps, "n_steps", minimum=0)
        self.spec_ = LatticeSpec(self.lattice_size, self.flux, self.rashba_angle)
        disorder = None
        if self.disorder_strength:
            cfg = DisorderConfig(self.disorder_strength, self.random_state)
            disorder = sample_disorder(self.spec_, cfg)
        self.disorder_ = disorder
        self.step_operator_ = make_step(self.spec_, disorder)
        self.n_features_in_ = self.spec_.dim
        if X is not None:
            check_states(X, self.n_features_in_)
        return self

    def transform(self, X):
        check_is_fitted(self, "step_operator_")
        X = check_states(X, self.n_features_in_)
        return self.step_operator_.apply(X.T, self.n_steps).T

    def evolve(self, site, absorber="none", target=None, snapshot_stride=0):
        """Observable series of a photon launched at `site`."""
        check_is_fitted(self, "step_operator_")
        psi0 = PhotonState.localized(self.spec_, site)
        return evolve(psi0, self.step_operator_, self.n_steps, AbsorberModel(absorber, target), snapshot_stride)


class QuasienergyButterfly(TransformerMixin, BaseEstimator):
    """Maps flux values to the sorted quasienergies of the step operator."""

    def __init__(self, lattice_size=20, n_jobs=1):
        self.lattice_size = lattice_size
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        LatticeSpec(self.lattice_size)
        phis = check_fluxes(X)
        self.spectra_ = butterfly_sweep(self.lattice_size, phis, self.n_jobs)
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "spectra_")
        phis = check_fluxes(X)
        spectra = butterfly_sweep(self.lattice_size, phis, self.n_jobs)
        return np.stack([s.energies for s in spectra])


class TwoPhotonObservables(TransformerMixin, BaseEstimator):
    """Maps flux values to ``[mean_distance, both_edge_prob]`` after ``n_steps``."""

    def __init__(
        self,
        lattice_size=30,
        n_steps=20,
        start=((1, 1), (1, 2)),
        symmetry="bosonic",
        metric="euclidean",
    ):
        self.lattice_size = lattice_size
        self.n_steps = n_steps
        self.start = start
        self.symmetry = symmetry
        self.metric = metric

    def fit(self, X=None, y=None):
        if self.symmetry not in SYMMETRIES:
            raise ValueError(f"symmetry must be one of {tuple(SYMMETRIES)}")
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}")
        check_positive_int(self.n_steps, "n_steps", minimum=0)
        spec = LatticeSpec(self.lattice_size)
        a, b = self.start
        init_pair(spec, a, b, self.symmetry)
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        rows = []
        a, b = self.start
        for phi in check_fluxes(X):
            spec = LatticeSpec(self.lattice_size, phi)
            state = evolve_pair(init_pair(spec, a, b, self.symmetry), make_step(spec), self.n_steps)
            obs = pair_observables(state, self.metric)
            rows.append([obs["mean_distance"], obs["both_edge_prob"]])
        return np.array(rows)
