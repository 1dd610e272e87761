"""Two indistinguishable photons with bosonic or fermionic exchange symmetry.

The circuit is polarization independent, so the spatial two-photon amplitude
``psi[i1, i2]`` evolves as ``U psi U^T``. Its exchange symmetry is fixed by
how the polarizations are entangled.
"""

from __future__ import annotations

from typing import Dict

import numpy as np

from .lattice import LatticeSpec, coordinate_grids, edge_mask, site_index
from .operators import DimensionError, StepOperator, apply_layers

SYMMETRIES = {"bosonic": 1.0, "fermionic": -1.0}
METRICS = ("euclidean", "manhattan")


class ExclusionError(ValueError):
    """Two fermions placed on the same site."""


class TwoPhotonState:
    """Ordered-pair amplitudes as a ``(M*M, M*M)`` matrix."""

    def __init__(self, amplitudes, spec: LatticeSpec, symmetry: str):
        if symmetry not in SYMMETRIES:
            raise ValueError(f"symmetry must be one of {tuple(SYMMETRIES)}, got {symmetry!r}")
        if spec.polarized:
            raise ValueError("two-photon walks need a polarization-independent lattice")
        amp = np.array(amplitudes, dtype=np.complex128)
        n = spec.n_sites
        if amp.size != n * n:
            raise DimensionError(f"pair state has {amp.size} amplitudes, lattice needs {n * n}")
        self.amplitudes = amp.reshape(n, n)
        self.spec = spec
        self.symmetry = symmetry

    @property
    def sign(self) -> float:
        return SYMMETRIES[self.symmetry]

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def symmetry_error(self) -> float:
        a = self.amplitudes
        return float(np.abs(a.T - self.sign * a).max())

    def probabilities(self) -> np.ndarray:
        """``|psi(r1, r2)|^2`` over ordered pairs."""
        return np.abs(self.amplitudes) ** 2


def init_pair(spec: LatticeSpec, a, b, symmetry: str = "bosonic") -> TwoPhotonState:
    """``(|a, b> +- |b, a>) / sqrt(2)``."""
    ia, ib = site_index(a, spec.M), site_index(b, spec.M)
    if ia == ib:
        if symmetry == "fermionic":
            raise ExclusionError(f"two fermions cannot start on the same site {tuple(a)}")
        amp = np.zeros((spec.n_sites, spec.n_sites), dtype=np.complex128)
        amp[ia, ia] = 1.0
        return TwoPhotonState(amp, spec, symmetry)
    amp = np.zeros((spec.n_sites, spec.n_sites), dtype=np.complex128)
    amp[ia, ib] = np.sqrt(0.5)
    amp[ib, ia] = SYMMETRIES.get(symmetry, 1.0) * np.sqrt(0.5)
    return TwoPhotonState(amp, spec, symmetry)


def evolve_pair(state: TwoPhotonState, op: StepOperator, steps: int = 1) -> TwoPhotonState:
    """Apply ``U (x) U`` `steps` times."""
    spec = op.spec
    if op.spec.polarized:
        raise ValueError("two-photon evolution needs a polarization-independent step operator")
    if state.spec.M != spec.M:
        raise DimensionError(f"state is on M={state.spec.M}, operator on M={spec.M}")
    M, n = spec.M, spec.n_sites
    psi = state.amplitudes.copy()
    for _ in range(steps):
        # first photon: columns of psi are independent states
        apply_layers(psi.reshape(M, M, 1, n), op)
        psi = np.ascontiguousarray(psi.T)
        apply_layers(psi.reshape(M, M, 1, n), op)
        psi = np.ascontiguousarray(psi.T)
    return TwoPhotonState(psi, spec, state.symmetry)


def pair_distances(M: int, metric: str = "euclidean") -> np.ndarray:
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}, got {metric!r}")
    X, Y = coordinate_grids(M)
    x, y = X.ravel().astype(float), Y.ravel().astype(float)
    dx = np.abs(x[:, None] - x[None, :])
    dy = np.abs(y[:, None] - y[None, :])
    return np.hypot(dx, dy) if metric == "euclidean" else dx + dy


def _checked_probs(state: TwoPhotonState):
    p = state.probabilities()
    total = p.sum()
    if not total > 0.0:
        raise ValueError("two-photon state has zero norm")
    return p, total


def mean_distance(state: TwoPhotonState, metric: str = "euclidean") -> float:
    """Expected inter-photon distance in lattice spacings."""
    p, total = _checked_probs(state)
    return float((p * pair_distances(state.spec.M, metric)).sum() / total)


def both_edge_probability(state: TwoPhotonState) -> float:
    """Probability that both photons sit on boundary sites."""
    p, total = _checked_probs(state)
    e = edge_mask(state.spec.M).ravel()
    return float(p[np.ix_(e, e)].sum() / total)


def correlation_matrix(state: TwoPhotonState) -> np.ndarray:
    """Coincidence probabilities over unordered pairs.

    Off the diagonal ``G[i, j] = |psi(i, j)|^2 + |psi(j, i)|^2``; the diagonal is
    ``|psi(i, i)|^2``. ``G`` is symmetric and its upper triangle sums to the norm.
    """
    p, _ = _checked_probs(state)
    g = p + p.T
    np.fill_diagonal(g, np.diag(p))
    return g


def correlation_triples(g: np.ndarray, threshold: float = 0.0):
    """Sparse ``(i1, i2, value)`` rows of the upper triangle with value above `threshold`."""
    i1, i2 = np.nonzero(np.triu(g > threshold))
    return np.column_stack([i1, i2]).astype(int), g[i1, i2]


def pair_observables(state: TwoPhotonState, metric: str = "euclidean") -> Dict[str, float]:
    return {
        "mean_distance": mean_distance(state, metric),
        "both_edge_prob": both_edge_probability(state),
    }
