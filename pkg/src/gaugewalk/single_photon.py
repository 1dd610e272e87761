"""Single-photon evolution, target absorption and observables."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np
from joblib import Parallel, delayed

from .disorder import DisorderConfig, derive_seed, sample_disorder
from .lattice import LatticeError, LatticeSpec, SiteCoord, edge_mask, site_index
from .operators import StepOperator, apply_layers, as_grid, build_step, build_step_nonabelian

ABSORBERS = ("none", "projector", "exponential")
# amplitude factor of exp(-a^+ a) on the one-photon sector
EXPONENTIAL_FACTOR = math.exp(-1.0)

SERIES_COLUMNS = ("step", "variance", "var_x", "var_y", "eta_cum", "edge_prob")


class ContractError(ValueError):
    pass


class PhotonState:
    """Amplitudes of one photon over the lattice (times polarization, if any)."""

    def __init__(self, amplitudes, spec: LatticeSpec):
        amp = np.array(amplitudes, dtype=np.complex128).ravel()
        if amp.shape[0] != spec.dim:
            raise ValueError(f"state has {amp.shape[0]} amplitudes, lattice needs {spec.dim}")
        self.amplitudes = amp
        self.spec = spec
        self._norm2 = float(np.vdot(amp, amp).real)
        if self._norm2 > 1.0 + 1e-12:
            raise ValueError(f"state norm^2 {self._norm2} exceeds 1")

    @classmethod
    def localized(cls, spec: LatticeSpec, site, polarization=None) -> "PhotonState":
        """Photon in a single waveguide; `polarization` is a 2-vector for the Rashba walk."""
        amp = np.zeros(spec.dim, dtype=np.complex128)
        i = site_index(site, spec.M)
        if spec.polarized:
            pol = np.array([1.0, 0.0] if polarization is None else polarization, dtype=np.complex128)
            pol = pol / np.linalg.norm(pol)
            amp[2 * i : 2 * i + 2] = pol
        else:
            amp[i] = 1.0
        return cls(amp, spec)

    @property
    def norm2(self) -> float:
        return self._norm2

    def probabilities(self) -> np.ndarray:
        """Site probabilities as an ``(M, M)`` grid, summed over polarization."""
        M, d = self.spec.M, self.spec.local_dim
        return (np.abs(self.amplitudes) ** 2).reshape(M, M, d).sum(axis=2)


@dataclass(frozen=True)
class AbsorberModel:
    """Drain at `target` applied before every step.

    ``projector`` removes the whole target amplitude; ``exponential`` scales it
    by ``exp(-1)``.
    """

    variant: str = "none"
    target: Optional[SiteCoord] = None

    def __post_init__(self):
        if self.variant not in ABSORBERS:
            raise ValueError(f"absorber must be one of {ABSORBERS}, got {self.variant!r}")
        if self.variant != "none":
            if self.target is None:
                raise ValueError("an absorber needs a target site")
            object.__setattr__(self, "target", SiteCoord(*map(int, self.target)))

    @property
    def active(self) -> bool:
        return self.variant != "none"

    @property
    def factor(self) -> float:
        return 0.0 if self.variant == "projector" else EXPONENTIAL_FACTOR

    def check(self, spec: LatticeSpec) -> None:
        if self.active and not spec.contains(self.target):
            raise LatticeError(f"absorber target {tuple(self.target)} outside 1..{spec.M}")


@dataclass
class ObservableSeries:
    """Per-step observables; row ``t`` is recorded after ``t`` full steps (row 0 is the input)."""

    variance: np.ndarray
    var_x: np.ndarray
    var_y: np.ndarray
    absorbed: np.ndarray
    eta_cum: np.ndarray
    edge_prob: np.ndarray
    norm2: np.ndarray
    absorber: AbsorberModel = field(default_factory=AbsorberModel)
    snapshots: Dict[int, np.ndarray] = field(default_factory=dict)
    final_state: Optional[PhotonState] = None

    @property
    def steps(self) -> np.ndarray:
        return np.arange(len(self.variance))

    def columns(self) -> Dict[str, np.ndarray]:
        return {
            "step": self.steps,
            "variance": self.variance,
            "var_x": self.var_x,
            "var_y": self.var_y,
            "eta_cum": self.eta_cum,
            "edge_prob": self.edge_prob,
        }

    def to_csv(self, path) -> None:
        from .io import write_columns

        write_columns(path, self.columns())


def marginal_variances(prob) -> tuple:
    """``(Var(x), Var(y))`` of a site distribution, renormalized to unit mass."""
    prob = np.asarray(prob, dtype=float)
    total = prob.sum()
    if not total > 0.0:
        raise ValueError("distribution has zero total probability")
    p = prob / total
    r = np.arange(1, p.shape[0] + 1, dtype=float)
    px, py = p.sum(axis=1), p.sum(axis=0)
    mx, my = px @ r, py @ r
    return float(px @ (r - mx) ** 2), float(py @ (r - my) ** 2)


def variance(prob) -> float:
    """Spreading ``Var(x) + Var(y)`` in squared lattice spacings."""
    vx, vy = marginal_variances(prob)
    return vx + vy


def edge_probability(prob) -> float:
    """Fraction of the remaining probability sitting on boundary sites."""
    prob = np.asarray(prob, dtype=float)
    total = prob.sum()
    if not total > 0.0:
        raise ValueError("distribution has zero total probability")
    return float(prob[edge_mask(prob.shape[0])].sum() / total)


def evolve(
    psi0: PhotonState,
    op: StepOperator,
    steps: int,
    absorber: Optional[AbsorberModel] = None,
    snapshot_stride: int = 0,
) -> ObservableSeries:
    """Run `steps` steps of absorb-then-step and record the observables.

    Snapshots of the probability grid are kept every `snapshot_stride` steps
    (0 disables them).
    """
    spec = op.spec
    if psi0.spec.dim != spec.dim or psi0.spec.M != spec.M:
        raise ValueError("initial state and step operator live on different lattices")
    if steps < 0:
        raise ValueError(f"steps must be >= 0, got {steps}")
    if snapshot_stride < 0:
        raise ValueError(f"snapshot_stride must be >= 0, got {snapshot_stride}")
    absorber = absorber or AbsorberModel()
    absorber.check(spec)
    n = steps + 1
    var_x, var_y = np.zeros(n), np.zeros(n)
    edge, norm2 = np.zeros(n), np.zeros(n)
    absorbed = np.zeros(n)
    snaps = {}
    grid = as_grid(psi0.amplitudes, spec).astype(np.complex128, copy=True)
    if absorber.active:
        tx, ty = absorber.target.x - 1, absorber.target.y - 1

    def record(t):
        prob = (np.abs(grid[..., 0]) ** 2).sum(axis=2)
        norm2[t] = prob.sum()
        if norm2[t] > 0.0:
            var_x[t], var_y[t] = marginal_variances(prob)
            edge[t] = edge_probability(prob)
        else:
            var_x[t] = var_y[t] = edge[t] = np.nan
        if snapshot_stride and t % snapshot_stride == 0:
            snaps[t] = prob

    record(0)
    for t in range(1, n):
        if absorber.active:
            amp = grid[tx, ty]
            p = float((np.abs(amp) ** 2).sum())
            absorbed[t] = p * (1.0 - absorber.factor**2)
            amp *= absorber.factor
        apply_layers(grid, op)
        record(t)
    eta = np.cumsum(absorbed)
    return ObservableSeries(
        variance=var_x + var_y,
        var_x=var_x,
        var_y=var_y,
        absorbed=absorbed,
        eta_cum=eta,
        edge_prob=edge,
        norm2=norm2,
        absorber=absorber,
        snapshots=snaps,
        final_state=PhotonState(grid.ravel(), spec),
    )


def transport_efficiency(series: ObservableSeries) -> float:
    """Total probability absorbed at the target over the whole run."""
    if not series.absorber.active:
        raise ContractError("transport efficiency needs a run with an absorber")
    return float(series.eta_cum[-1])


@dataclass
class EnsembleSeries:
    """Per-step mean and standard error over disorder realizations."""

    mean: Dict[str, np.ndarray]
    stderr: Dict[str, np.ndarray]
    realizations: int
    seeds: list
    mean_snapshots: Dict[int, np.ndarray] = field(default_factory=dict)

    @property
    def steps(self) -> np.ndarray:
        return self.mean["step"]

    def columns(self) -> Dict[str, np.ndarray]:
        cols = {"step": self.steps}
        for name in SERIES_COLUMNS[1:] + ("norm2",):
            cols[name] = self.mean[name]
            cols[name + "_se"] = self.stderr[name]
        return cols

    def to_csv(self, path) -> None:
        from .io import write_columns

        write_columns(path, self.columns())


def make_step(spec: LatticeSpec, disorder=None) -> StepOperator:
    return build_step_nonabelian(spec, disorder) if spec.polarized else build_step(spec, disorder)


def _one_realization(spec, delta, seed, start, steps, absorber, snapshot_stride):
    cfg = DisorderConfig(delta=delta, seed=seed)
    op = make_step(spec, sample_disorder(spec, cfg))
    return evolve(PhotonState.localized(spec, start), op, steps, absorber, snapshot_stride)


def ensemble_run(
    spec: LatticeSpec,
    disorder_cfg: DisorderConfig,
    steps: int,
    start,
    absorber: Optional[AbsorberModel] = None,
    realizations: int = 20,
    snapshot_stride: int = 0,
    n_jobs: int = 1,
) -> EnsembleSeries:
    """Average single-photon runs over independent disorder realizations.

    Realization ``r`` uses the seed ``derive_seed(disorder_cfg.seed, r)``, so
    the result does not depend on `n_jobs`.
    """
    if realizations < 1:
        raise ValueError(f"realizations must be >= 1, got {realizations}")
    seeds = [derive_seed(disorder_cfg.seed, r) for r in range(realizations)]
    args = [(spec, disorder_cfg.delta, s, start, steps, absorber, snapshot_stride) for s in seeds]
    if n_jobs == 1:
        runs = [_one_realization(*a) for a in args]
    else:
        runs = Parallel(n_jobs=n_jobs)(delayed(_one_realization)(*a) for a in args)
    mean, se = {"step": runs[0].steps}, {}
    for name in SERIES_COLUMNS[1:] + ("norm2",):
        data = np.stack([getattr(r, name) for r in runs])
        mean[name] = data.mean(axis=0)
        se[name] = data.std(axis=0, ddof=1) / np.sqrt(realizations) if realizations > 1 else np.zeros(data.shape[1])
    snaps = {t: np.mean([r.snapshots[t] for r in runs], axis=0) for t in runs[0].snapshots}
    return EnsembleSeries(mean, se, realizations, seeds, snaps)
