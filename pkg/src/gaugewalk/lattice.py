"""Square-lattice geometry and Hilbert-space indexing.

Sites are labelled ``(x, y)`` with both coordinates in ``1..M``. Amplitudes
are stored row-major with ``x`` as the outer index, so an ``M*M`` vector
reshapes to an ``(M, M)`` array whose first axis is ``x - 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

TWO_PI = 2.0 * math.pi


class LatticeError(ValueError):
    """Invalid lattice parameters or out-of-bounds coordinates."""


class SiteCoord(NamedTuple):
    x: int
    y: int


@dataclass(frozen=True)
class LatticeSpec:
    """Open-boundary ``M x M`` lattice with uniform flux per plaquette.

    Parameters
    ----------
    M : int
        Sites per side. Must be even and at least 2 so that the alternating
        coupler layers pair every site.
    flux : float
        Phase per plaquette in radians, stored reduced to ``[0, 2*pi)``.
    rashba_angle : float, optional
        Spin-orbit angle for the polarization-resolved walk.
    """

    M: int
    flux: float = 0.0
    rashba_angle: Optional[float] = None

    def __post_init__(self):
        M = self.M
        if isinstance(M, bool) or not isinstance(M, (int, np.integer)):
            raise LatticeError(f"M must be an integer, got {M!r}")
        if M < 2:
            raise LatticeError(f"M must be >= 2, got {M}")
        if M % 2:
            raise LatticeError(f"M must be even, got {M}")
        object.__setattr__(self, "M", int(M))
        flux = float(self.flux)
        if not math.isfinite(flux):
            raise LatticeError(f"flux must be finite, got {flux}")
        flux = math.fmod(flux, TWO_PI)
        if flux < 0.0:
            flux += TWO_PI
        if flux >= TWO_PI:
            flux = 0.0
        object.__setattr__(self, "flux", flux)
        if self.rashba_angle is not None:
            alpha = float(self.rashba_angle)
            if not math.isfinite(alpha):
                raise LatticeError(f"rashba_angle must be finite, got {alpha}")
            object.__setattr__(self, "rashba_angle", alpha)

    @property
    def n_sites(self) -> int:
        return self.M * self.M

    @property
    def polarized(self) -> bool:
        return self.rashba_angle is not None

    @property
    def local_dim(self) -> int:
        return 2 if self.polarized else 1

    @property
    def dim(self) -> int:
        """Hilbert-space dimension (sites times polarization states)."""
        return self.n_sites * self.local_dim

    def contains(self, c) -> bool:
        x, y = c
        return 1 <= x <= self.M and 1 <= y <= self.M

    def center(self) -> SiteCoord:
        return SiteCoord(self.M // 2, self.M // 2)


def _check(c, M: int) -> SiteCoord:
    x, y = c
    if not (1 <= x <= M and 1 <= y <= M):
        raise LatticeError(f"site ({x}, {y}) outside 1..{M}")
    return SiteCoord(int(x), int(y))


def site_index(c, M: int) -> int:
    """Row-major linear index of site ``c``: ``(x-1)*M + (y-1)``."""
    x, y = _check(c, M)
    return (x - 1) * M + (y - 1)


def site_coord(index: int, M: int) -> SiteCoord:
    """Inverse of :func:`site_index`."""
    if not 0 <= index < M * M:
        raise LatticeError(f"index {index} outside 0..{M * M - 1}")
    x, y = divmod(int(index), M)
    return SiteCoord(x + 1, y + 1)


def is_edge(c, M: int) -> bool:
    x, y = _check(c, M)
    return x in (1, M) or y in (1, M)


def edge_mask(M: int) -> np.ndarray:
    """Boolean ``(M, M)`` array, true on boundary sites."""
    mask = np.zeros((M, M), dtype=bool)
    mask[0, :] = mask[-1, :] = True
    mask[:, 0] = mask[:, -1] = True
    return mask


def coordinate_grids(M: int):
    """Return ``(X, Y)`` integer arrays of shape ``(M, M)`` holding 1-based coordinates."""
    r = np.arange(1, M + 1)
    return np.meshgrid(r, r, indexing="ij")


# Substep layers in application order. Layer k couples zero-based positions
# (offset + 2j, offset + 2j + 1) along `axis`, for every transverse coordinate.
LAYER_AXES = ("x", "x", "y", "y")
LAYER_OFFSETS = (0, 1, 0, 1)


def layer_pair_count(M: int, layer: int) -> int:
    return M // 2 - LAYER_OFFSETS[layer]


def layer_block_shape(M: int, layer: int) -> tuple:
    """Leading shape of the coupler array of `layer`, ordered ``(x, y)`` like the state."""
    n = layer_pair_count(M, layer)
    return (n, M) if LAYER_AXES[layer] == "x" else (M, n)


def layer_slices(M: int, layer: int):
    """Index expressions selecting the first and second site of every coupler."""
    off = LAYER_OFFSETS[layer]
    n = layer_pair_count(M, layer)
    sa = slice(off, off + 2 * n, 2)
    sb = slice(off + 1, off + 2 * n, 2)
    if LAYER_AXES[layer] == "x":
        return (sa, slice(None)), (sb, slice(None))
    return (slice(None), sa), (slice(None), sb)


def coupler_sites(M: int, layer: int, i: int, j: int):
    """Sites ``(a, b)`` of the coupler stored at position ``(i, j)`` of `layer`."""
    off = LAYER_OFFSETS[layer]
    if LAYER_AXES[layer] == "x":
        x = off + 2 * i + 1
        return SiteCoord(x, j + 1), SiteCoord(x + 1, j + 1)
    y = off + 2 * j + 1
    return SiteCoord(i + 1, y), SiteCoord(i + 1, y + 1)
