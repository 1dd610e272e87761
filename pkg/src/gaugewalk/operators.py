"""Coupler layers and the step operator of the gauge-field walk.

One step is ``U4 U3 U2 U1``. ``U1``/``U2`` couple neighbouring sites along x,
``U3``/``U4`` along y, the latter with a phase proportional to the column
``x`` (Landau gauge), which threads a uniform flux through every plaquette.
Each layer is stored as an array of explicit 2x2 (or 4x4 with polarization)
coupler matrices so that every coupler can be dressed independently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import expm

from .disorder import DisorderRealization, dress_layer
from .lattice import (
    LAYER_AXES,
    LatticeError,
    LatticeSpec,
    SiteCoord,
    coupler_sites,
    layer_block_shape,
    layer_slices,
)

SQRT_HALF = 1.0 / np.sqrt(2.0)
DENSE_CAP = 4096

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


class ConfigurationError(ValueError):
    pass


class DimensionError(ValueError):
    pass


class PathError(ValueError):
    pass


def beam_splitter_x() -> np.ndarray:
    """Balanced coupler ``[[1, i], [i, 1]] / sqrt(2)`` in the basis ``(|x>, |x+1>)``."""
    return SQRT_HALF * np.array([[1, 1j], [1j, 1]], dtype=np.complex128)


def beam_splitter_y(theta: float) -> np.ndarray:
    """Phase-shifted coupler in the basis ``(|y>, |y+1>)``.

    Hopping ``y -> y+1`` picks up ``exp(i theta)``, the reverse ``exp(-i theta)``.
    """
    return SQRT_HALF * np.array(
        [[1, 1j * np.exp(-1j * theta)], [1j * np.exp(1j * theta), 1]], dtype=np.complex128
    )


def rashba_link_x(alpha: float) -> np.ndarray:
    return expm(1j * alpha * PAULI_Y)


def rashba_link_y(alpha: float) -> np.ndarray:
    return expm(-1j * alpha * PAULI_X)


def link_coupler(link: np.ndarray) -> np.ndarray:
    """4x4 coupler ``[[I, i U^+], [i U, I]] / sqrt(2)`` for a 2x2 link unitary ``U``.

    Basis order is ``|a,H>, |a,V>, |b,H>, |b,V>``. Unitary whenever ``U`` is.
    """
    eye = np.eye(2, dtype=np.complex128)
    return SQRT_HALF * np.block([[eye, 1j * link.conj().T], [1j * link, eye]])


def wilson_loop(alpha: float) -> np.ndarray:
    """Ordered link product ``Ux Uy Ux^+ Uy^+`` around one plaquette."""
    ux = rashba_link_x(alpha)
    uy = rashba_link_y(alpha)
    return ux @ uy @ ux.conj().T @ uy.conj().T


class CouplerBlock(NamedTuple):
    layer: int
    site_a: SiteCoord
    site_b: SiteCoord
    matrix: np.ndarray


@dataclass(frozen=True)
class Layer:
    """One substep: disjoint couplers along `axis`.

    ``blocks`` has shape ``layer_block_shape(M, index) + (2d, 2d)``; sites
    not covered by any coupler are left untouched.
    """

    index: int
    blocks: np.ndarray

    @property
    def axis(self) -> str:
        return LAYER_AXES[self.index]

    def __len__(self):
        return int(np.prod(self.blocks.shape[:2]))


@dataclass(frozen=True)
class StepOperator:
    """The four layers of one walk step, applied in order U1, U2, U3, U4."""

    layers: Tuple[Layer, Layer, Layer, Layer]
    spec: LatticeSpec
    disorder: Optional[DisorderRealization] = None

    @property
    def mode(self) -> str:
        return "nonabelian" if self.spec.polarized else "abelian"

    @property
    def dim(self) -> int:
        return self.spec.dim

    def blocks(self) -> Iterator[CouplerBlock]:
        M = self.spec.M
        for layer in self.layers:
            for i, j in np.ndindex(layer.blocks.shape[:2]):
                a, b = coupler_sites(M, layer.index, i, j)
                yield CouplerBlock(layer.index + 1, a, b, layer.blocks[i, j])

    def apply(self, state, steps: int = 1) -> np.ndarray:
        return apply_step(state, self, steps)


def _make_layers(spec: LatticeSpec, couplers, disorder) -> Tuple[Layer, ...]:
    layers = []
    for k in range(4):
        blocks = np.array(couplers(k), dtype=np.complex128)
        if disorder is not None:
            blocks = dress_layer(blocks, disorder.phases[k])
        blocks.setflags(write=False)
        layers.append(Layer(k, blocks))
    return tuple(layers)


def build_step(spec: LatticeSpec, disorder: Optional[DisorderRealization] = None) -> StepOperator:
    """Step operator of the magnetic (Abelian) walk.

    The y-couplers in column ``x`` use ``beam_splitter_y(x * flux)``. With
    `disorder`, every coupler is left-multiplied by its diagonal phase pair.
    """
    if spec.polarized:
        raise ConfigurationError("lattice has a Rashba angle; use build_step_nonabelian")
    if disorder is not None:
        disorder.check_spec(spec)
    M = spec.M
    x = np.arange(1, M + 1, dtype=float)
    theta = x * spec.flux
    y_col = np.empty((M, 2, 2), dtype=np.complex128)
    y_col[:, 0, 0] = y_col[:, 1, 1] = SQRT_HALF
    y_col[:, 0, 1] = 1j * SQRT_HALF * np.exp(-1j * theta)
    y_col[:, 1, 0] = 1j * SQRT_HALF * np.exp(1j * theta)

    def couplers(k):
        shape = layer_block_shape(M, k)
        if LAYER_AXES[k] == "x":
            return np.broadcast_to(beam_splitter_x(), shape + (2, 2))
        return np.broadcast_to(y_col[:, None], shape + (2, 2))

    return StepOperator(_make_layers(spec, couplers, disorder), spec, disorder)


def build_step_nonabelian(
    spec: LatticeSpec, disorder: Optional[DisorderRealization] = None
) -> StepOperator:
    """Step operator with polarization-dependent (Rashba) links.

    x-links carry ``exp(i a sigma_y)``, y-links ``exp(-i a sigma_x)``, with no
    position-dependent phase. The flux of `spec` must be zero.
    """
    if spec.rashba_angle is None:
        raise ConfigurationError("non-Abelian walk needs a rashba_angle")
    if spec.flux != 0.0:
        raise ConfigurationError("non-Abelian walk takes no Abelian flux; set flux to 0")
    if disorder is not None:
        disorder.check_spec(spec)
    M = spec.M
    bx = link_coupler(rashba_link_x(spec.rashba_angle))
    by = link_coupler(rashba_link_y(spec.rashba_angle))

    def couplers(k):
        b = bx if LAYER_AXES[k] == "x" else by
        return np.broadcast_to(b, layer_block_shape(M, k) + (4, 4))

    return StepOperator(_make_layers(spec, couplers, disorder), spec, disorder)


def as_grid(state, spec: LatticeSpec) -> np.ndarray:
    """View a flat state (``dim`` or ``(dim, B)``) as a ``(M, M, d, B)`` array."""
    arr = np.asarray(state)
    M, d = spec.M, spec.local_dim
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] != spec.dim:
        raise DimensionError(f"state has shape {np.shape(state)}, expected ({spec.dim},) or ({spec.dim}, B)")
    return arr.reshape(M, M, d, arr.shape[1])


def _apply_layer(grid: np.ndarray, layer: Layer, M: int) -> None:
    if layer.blocks.shape[0] * layer.blocks.shape[1] == 0:
        return
    d = grid.shape[2]
    ia, ib = layer_slices(M, layer.index)
    pair = np.concatenate((grid[ia], grid[ib]), axis=2)
    out = np.matmul(layer.blocks, pair)
    grid[ia] = out[:, :, :d]
    grid[ib] = out[:, :, d:]


def apply_layers(grid: np.ndarray, op: StepOperator, steps: int = 1) -> np.ndarray:
    """In-place evolution of a ``(M, M, d, B)`` grid; returns it."""
    M = op.spec.M
    for _ in range(steps):
        for layer in op.layers:
            _apply_layer(grid, layer, M)
    return grid


def apply_step(state, op: StepOperator, steps: int = 1) -> np.ndarray:
    """Apply `steps` walk steps to a flat state (or a column batch of states).

    Returns a new array of the input's shape; the input is not modified.
    """
    arr = np.asarray(state)
    grid = as_grid(arr, op.spec).astype(np.complex128, copy=True)
    apply_layers(grid, op, steps)
    return grid.reshape(arr.shape)


def dense_matrix(op: StepOperator, cap: int = DENSE_CAP) -> np.ndarray:
    """Full matrix of ``U4 U3 U2 U1``."""
    n = op.dim
    if n > cap:
        raise DimensionError(f"dense matrix of dimension {n} exceeds the cap of {cap} rows")
    return apply_step(np.eye(n, dtype=np.complex128), op)


def layer_matrix(op: StepOperator, layer: int, cap: int = DENSE_CAP) -> np.ndarray:
    """Dense matrix of a single substep (index 0..3)."""
    n = op.dim
    if n > cap:
        raise DimensionError(f"dense matrix of dimension {n} exceeds the cap of {cap} rows")
    grid = as_grid(np.eye(n, dtype=np.complex128), op.spec).copy()
    _apply_layer(grid, op.layers[layer], op.spec.M)
    return grid.reshape(n, n)


def unitarity_error(u: np.ndarray) -> float:
    """Largest absolute entry of ``U^+ U - I``."""
    u = np.asarray(u)
    return float(np.abs(u.conj().T @ u - np.eye(u.shape[0])).max())


def _hop_factor(spec: LatticeSpec, a: SiteCoord, b: SiteCoord) -> complex:
    dx, dy = b.x - a.x, b.y - a.y
    if abs(dx) + abs(dy) != 1:
        raise PathError(f"sites {tuple(a)} and {tuple(b)} are not nearest neighbours")
    if dx:
        v = beam_splitter_x()
        amp = v[1, 0] if dx > 0 else v[0, 1]
    else:
        v = beam_splitter_y(a.x * spec.flux)
        amp = v[1, 0] if dy > 0 else v[0, 1]
    # strip the coupler's bare transmission i/sqrt(2), keep the gauge phase
    return amp / (1j * SQRT_HALF)


def plaquette_holonomy(spec: LatticeSpec, loop: Sequence) -> complex:
    """Product of hop phases around a closed nearest-neighbour path.

    `loop` lists the visited sites; the closing hop back to the first site is
    implied when the last entry differs from the first.
    """
    sites = [SiteCoord(int(x), int(y)) for x, y in loop]
    if len(sites) < 2:
        raise PathError("a loop needs at least two sites")
    for s in sites:
        if not spec.contains(s):
            raise LatticeError(f"site {tuple(s)} outside the lattice")
    if sites[0] != sites[-1]:
        sites.append(sites[0])
    h = 1.0 + 0.0j
    for a, b in zip(sites[:-1], sites[1:]):
        h *= _hop_factor(spec, a, b)
    return h


def rectangle_loop(x0: int, y0: int, width: int, height: int, counterclockwise: bool = True):
    """Sites of the boundary of a ``width x height`` block of cells with lower-left corner ``(x0, y0)``."""
    path = [(x0 + i, y0) for i in range(width)]
    path += [(x0 + width, y0 + j) for j in range(height)]
    path += [(x0 + width - i, y0 + height) for i in range(width)]
    path += [(x0, y0 + height - j) for j in range(height)]
    if not counterclockwise:
        path = [path[0]] + path[:0:-1]
    return path
