"""Static random phase dressing of the couplers.

Every coupler of every layer gets its own pair of phases ``(eps_a, eps_b)``
drawn from ``N(0, delta**2)``. The realization is fixed once and reused for
every step of the walk.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .lattice import LAYER_AXES, LatticeSpec, coupler_sites, layer_block_shape

#: Recorded in run manifests; numbers are reproducible only with the same sampler.
RNG_IDENTIFIER = f"numpy {np.__version__} Generator(PCG64) via SeedSequence; normal = Generator.normal"

_U64 = (1 << 64) - 1


class DisorderMismatchError(ValueError):
    """A realization was drawn for a different lattice."""


@dataclass(frozen=True)
class DisorderConfig:
    delta: float = 0.0
    seed: int = 0

    def __post_init__(self):
        delta = float(self.delta)
        if not delta >= 0.0:
            raise ValueError(f"delta must be >= 0, got {self.delta}")
        seed = int(self.seed)
        if not 0 <= seed <= _U64:
            raise ValueError(f"seed must fit in an unsigned 64-bit integer, got {seed}")
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "seed", seed)


def derive_seed(base_seed: int, realization: int) -> int:
    """Sub-seed for ensemble member `realization`.

    ``SeedSequence(base_seed, spawn_key=(realization,))`` hashed down to one
    64-bit word, so members are independent streams whatever the order they
    are run in.
    """
    ss = np.random.SeedSequence(int(base_seed), spawn_key=(int(realization),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class DisorderRealization:
    """Coupler phases for one lattice, one array per layer.

    ``phases[k]`` has shape ``layer_block_shape(M, k) + (2,)``; the last axis
    holds the phases of the first and second site of the coupler.
    """

    phases: Tuple[np.ndarray, ...]
    config: DisorderConfig
    M: int
    local_dim: int = 1

    def __post_init__(self):
        if len(self.phases) != 4:
            raise ValueError("a realization needs exactly four layers of phases")
        for k, p in enumerate(self.phases):
            want = layer_block_shape(self.M, k) + (2,)
            if p.shape != want:
                raise ValueError(f"layer {k}: phase array shape {p.shape}, expected {want}")
            p.setflags(write=False)

    @property
    def fingerprint(self) -> dict:
        return {"M": self.M, "local_dim": self.local_dim}

    def check_spec(self, spec: LatticeSpec) -> None:
        if self.M != spec.M or self.local_dim != spec.local_dim:
            raise DisorderMismatchError(
                f"realization drawn for {self.fingerprint}, lattice has "
                f"{{'M': {spec.M}, 'local_dim': {spec.local_dim}}}"
            )

    def all_phases(self) -> np.ndarray:
        return np.concatenate([p.ravel() for p in self.phases])

    def to_dict(self) -> dict:
        couplers = []
        for k, p in enumerate(self.phases):
            for i, j in np.ndindex(p.shape[:2]):
                a, b = coupler_sites(self.M, k, i, j)
                couplers.append(
                    {
                        "layer": k + 1,
                        "axis": LAYER_AXES[k],
                        "a": list(a),
                        "b": list(b),
                        "eps": [float(p[i, j, 0]), float(p[i, j, 1])],
                    }
                )
        return {
            "M": self.M,
            "local_dim": self.local_dim,
            "delta": self.config.delta,
            "seed": self.config.seed,
            "rng": RNG_IDENTIFIER,
            "couplers": couplers,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, doc: dict) -> "DisorderRealization":
        M = int(doc["M"])
        phases = [np.zeros(layer_block_shape(M, k) + (2,)) for k in range(4)]
        seen = [np.zeros(layer_block_shape(M, k), dtype=bool) for k in range(4)]
        for c in doc["couplers"]:
            k = int(c["layer"]) - 1
            (xa, ya), (xb, yb) = c["a"], c["b"]
            if LAYER_AXES[k] == "x":
                i, j = (xa - 1) // 2 if k == 0 else (xa - 2) // 2, ya - 1
            else:
                i, j = xa - 1, (ya - 1) // 2 if k == 2 else (ya - 2) // 2
            if coupler_sites(M, k, i, j) != ((xa, ya), (xb, yb)):
                raise ValueError(f"coupler {c} is not part of layer {k + 1}")
            phases[k][i, j] = c["eps"]
            seen[k][i, j] = True
        if not all(s.all() for s in seen):
            raise ValueError("document does not cover every coupler")
        cfg = DisorderConfig(delta=doc["delta"], seed=doc["seed"])
        return cls(tuple(phases), cfg, M, int(doc.get("local_dim", 1)))

    @classmethod
    def from_json(cls, text: str) -> "DisorderRealization":
        return cls.from_dict(json.loads(text))


def sample_disorder(spec: LatticeSpec, cfg: DisorderConfig) -> DisorderRealization:
    """Draw one realization; a pure function of ``(spec.M, cfg.seed, cfg.delta)``."""
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    phases = []
    for k in range(4):
        shape = layer_block_shape(spec.M, k) + (2,)
        # always draw, so that delta only rescales the same standard normals
        z = rng.normal(0.0, 1.0, size=shape)
        phases.append(cfg.delta * z)
    return DisorderRealization(tuple(phases), cfg, spec.M, spec.local_dim)


def dress(block, eps_i: float, eps_j: float) -> np.ndarray:
    """Left-multiply a coupler by ``diag(exp(i eps_i), exp(i eps_j))``.

    For a 4x4 polarization-resolved block each phase multiplies both
    polarization rows of its site.
    """
    block = np.asarray(block, dtype=np.complex128)
    d = block.shape[0] // 2
    phase = np.repeat(np.exp(1j * np.array([eps_i, eps_j], dtype=float)), d)
    return phase[:, None] * block


def dress_layer(blocks: np.ndarray, phases: np.ndarray) -> np.ndarray:
    """Vectorized :func:`dress` over a layer's ``(..., 2d, 2d)`` coupler array."""
    d = blocks.shape[-1] // 2
    phase = np.repeat(np.exp(1j * phases), d, axis=-1)
    return phase[..., :, None] * blocks
