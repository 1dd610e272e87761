"""Quasienergies of the step operator, ``H_eff = i log U``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
import scipy.linalg
from joblib import Parallel, delayed

from .lattice import LatticeSpec
from .operators import DENSE_CAP, StepOperator, build_step, dense_matrix

UNIT_MODULUS_TOL = 1e-8


class NonUnitaryError(ValueError):
    pass


@dataclass(frozen=True)
class QuasienergySpectrum:
    phi: float
    energies: np.ndarray
    M: int

    def __len__(self):
        return len(self.energies)


def _fold(e: np.ndarray) -> np.ndarray:
    e = np.where(e <= -np.pi, e + 2 * np.pi, e)
    return np.where(e > np.pi, e - 2 * np.pi, e)


def quasienergies(op, cap: int = DENSE_CAP) -> QuasienergySpectrum:
    """Sorted quasienergies in ``(-pi, pi]``.

    An eigenvalue ``exp(i t)`` of the step matrix gives the quasienergy ``-t``.
    `op` is a :class:`StepOperator` or an explicit square matrix.
    """
    if isinstance(op, StepOperator):
        u = dense_matrix(op, cap)
        phi, M = op.spec.flux, op.spec.M
    else:
        u = np.asarray(op, dtype=np.complex128)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {u.shape}")
        if u.shape[0] > cap:
            raise ValueError(f"matrix dimension {u.shape[0]} exceeds the cap of {cap}")
        phi, M = float("nan"), int(round(np.sqrt(u.shape[0])))
    lam = scipy.linalg.eigvals(u, check_finite=True)
    dev = np.abs(np.abs(lam) - 1.0).max()
    if dev > UNIT_MODULUS_TOL:
        raise NonUnitaryError(f"eigenvalue modulus deviates from 1 by {dev:.3e}")
    energies = np.sort(_fold(-np.angle(lam)))
    return QuasienergySpectrum(phi, energies, M)


def _spectrum_at(M: int, phi: float) -> QuasienergySpectrum:
    s = quasienergies(build_step(LatticeSpec(M, phi)))
    return QuasienergySpectrum(float(phi), s.energies, M)


def butterfly_sweep(M: int, phis: Sequence[float], n_jobs: int = 1) -> List[QuasienergySpectrum]:
    """One spectrum per flux value, each computed independently.

    The recorded ``phi`` is the requested value, not its reduction mod ``2 pi``.
    """
    phis = [float(p) for p in phis]
    if not phis:
        raise ValueError("flux grid is empty")
    if n_jobs == 1:
        return [_spectrum_at(M, p) for p in phis]
    return Parallel(n_jobs=n_jobs, prefer="threads")(delayed(_spectrum_at)(M, p) for p in phis)


def butterfly_points(spectra: Sequence[QuasienergySpectrum]) -> np.ndarray:
    """``(n, 2)`` array of ``(phi, energy)`` points for scatter plots."""
    return np.concatenate(
        [np.column_stack([np.full(len(s), s.phi), s.energies]) for s in spectra]
    )
