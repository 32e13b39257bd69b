# Copyright (c) 2024 qslkit developers
# SPDX-License-Identifier: Zlib

"""Qubit state algebra, relative-purity distance and 2x2 matrix norms.

Matrices are plain complex numpy arrays.  Every function taking a matrix
also accepts a stack of them (shape ``(..., 2, 2)``), so trajectories can
be evaluated on a whole quadrature grid at once.
"""

from __future__ import annotations

__all__ = ('EPS_POS', 'EPS_MATRIX', 'BlochState', 'NormTriple',
           'bloch_to_density', 'density_to_bloch', 'purity', 'coherence_l1',
           'overlap', 'relative_purity_ratio', 'relative_purity_angle',
           'singular_values_2x2', 'norms',
           'SIGMA_X', 'SIGMA_Y', 'SIGMA_Z', 'SIGMA_PLUS', 'SIGMA_MINUS')

from typing import NamedTuple
from dataclasses import dataclass
import math

import numpy as np

from ._exceptions import ParameterError

EPS_POS    = 1e-12  # positivity slack on |r| <= 1
EPS_MATRIX = 1e-12  # Hermiticity / trace / eigenvalue slack of density matrices

# Basis ordering is (excited, ground): the top-left entry of a density
# matrix is the excited-state population (1 + rz)/2.
SIGMA_X     = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y     = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z     = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_PLUS  = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)


@dataclass(frozen=True)
class BlochState:
    """Qubit state as a real Bloch vector (rx, ry, rz)."""

    rx: float = 0.0
    ry: float = 0.0
    rz: float = 0.0

    def __post_init__(self):
        for name in ("rx", "ry", "rz"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ParameterError(f"Bloch component {name}={value} is not finite")
            object.__setattr__(self, name, value)
        norm2 = self.rx**2 + self.ry**2 + self.rz**2
        if norm2 > 1.0 + EPS_POS:
            raise ParameterError(f"unphysical state: |r|^2 = {norm2:.17g} > 1 "
                                 f"(requires coherence^2 + sz^2 <= 1)")

    @classmethod
    def from_coherence(cls, coherence: float, sz: float, phase: float = 0.0) -> BlochState:
        """State with l1 coherence C, population <sigma_z> = sz and phase."""
        if coherence < 0.0:
            raise ParameterError(f"coherence must be >= 0, got {coherence}")
        return cls(coherence * math.cos(phase), coherence * math.sin(phase), sz)

    @property
    def coherence(self) -> float:
        return math.hypot(self.rx, self.ry)

    @property
    def sz(self) -> float:
        return self.rz

    @property
    def norm(self) -> float:
        return math.sqrt(self.rx**2 + self.ry**2 + self.rz**2)

    def as_tuple(self):
        return (self.rx, self.ry, self.rz)


class NormTriple(NamedTuple):
    """Operator, Hilbert-Schmidt and trace norm (tr >= hs >= op)."""

    op: float
    hs: float
    tr: float


def bloch_to_density(s: BlochState) -> np.ndarray:
    """½[[1+rz, rx-i·ry], [rx+i·ry, 1-rz]]."""
    if not isinstance(s, BlochState):
        s = BlochState(*s)
    return 0.5 * np.array([[1.0 + s.rz,        s.rx - 1j * s.ry],
                           [s.rx + 1j * s.ry,  1.0 - s.rz]], dtype=complex)


def _check_density(m):
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise ParameterError(f"expected a 2x2 matrix, got shape {m.shape}")
    herm = np.max(np.abs(m - m.conj().T))
    if herm > EPS_MATRIX:
        raise ParameterError(f"matrix is not Hermitian (deviation {herm:.3g})")
    trace = np.trace(m).real
    if abs(trace - 1.0) > EPS_MATRIX:
        raise ParameterError(f"matrix trace {trace:.17g} != 1")
    return m


def density_to_bloch(m) -> BlochState:
    """Inverse of :func:`bloch_to_density`; rejects non-density input."""
    m = _check_density(m)
    return BlochState(rx=2.0 * m[1, 0].real,
                      ry=2.0 * m[1, 0].imag,
                      rz=(m[0, 0] - m[1, 1]).real)


def purity(s: BlochState) -> float:
    """tr[rho^2] = (1 + |r|^2)/2."""
    return 0.5 * (1.0 + s.rx**2 + s.ry**2 + s.rz**2)


def coherence_l1(s: BlochState) -> float:
    """Sum of absolute off-diagonal entries; sqrt(rx^2 + ry^2) for a qubit."""
    return s.coherence


def overlap(rho0, rho_t):
    """Real part of tr[rho0 rho_t]; rho_t may be a stack of matrices."""
    rho_t = np.asarray(rho_t)
    return np.real(np.einsum("ij,...ji->...", np.asarray(rho0), rho_t))


def relative_purity_ratio(s0: BlochState, rho_t):
    """Unclamped ratio tr[rho0 rho_t] / tr[rho0^2]."""
    return overlap(bloch_to_density(s0), rho_t) / purity(s0)


def relative_purity_angle(s0: BlochState, st) -> float:
    """Relative-purity angle in [0, pi/2].

    The ratio under the square root is clamped to [0, 1]; under non-unitary
    evolution of a mixed state it can exceed one.
    """
    rho_t = bloch_to_density(st) if isinstance(st, BlochState) else st
    ratio = np.clip(relative_purity_ratio(s0, rho_t), 0.0, 1.0)
    theta = np.arccos(np.sqrt(ratio))
    return float(theta) if np.ndim(theta) == 0 else theta


def singular_values_2x2(m):
    """Descending singular values of a 2x2 complex matrix (or a stack).

    Closed form from the eigenvalues of h = m^dagger m: with
    disc = sqrt(((h11 - h22)/2)^2 + |h12|^2), sigma_1^2 = tr(h)/2 + disc and
    sigma_2 = |det m|/sigma_1.  disc is a sum of squares, so nearly equal
    singular values keep full precision.
    """
    m = np.asarray(m, dtype=complex)
    a, b = m[..., 0, 0], m[..., 0, 1]
    c, e = m[..., 1, 0], m[..., 1, 1]
    h11 = np.abs(a)**2 + np.abs(c)**2
    h22 = np.abs(b)**2 + np.abs(e)**2
    h12 = np.abs(np.conj(a) * b + np.conj(c) * e)
    disc = 0.5 * np.hypot(h11 - h22, 2.0 * h12)
    s1 = np.sqrt(0.5 * (h11 + h22) + disc)
    d = np.abs(a * e - b * c)
    with np.errstate(divide="ignore", invalid="ignore"):
        s2 = np.where(s1 > 0.0, d / np.where(s1 > 0.0, s1, 1.0), 0.0)
    s2 = np.minimum(s2, s1)
    if np.ndim(s1) == 0:
        return float(s1), float(s2)
    return s1, s2


def norms(m) -> NormTriple:
    """Operator, Hilbert-Schmidt and trace norms from the singular values."""
    s1, s2 = singular_values_2x2(m)
    hs = np.hypot(s1, s2)
    tr = s1 + s2
    if np.ndim(s1) == 0:
        return NormTriple(float(s1), float(hs), float(tr))
    return NormTriple(s1, hs, tr)
