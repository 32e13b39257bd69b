# Copyright (c) 2024 qslkit developers
# SPDX-License-Identifier: Zlib

"""Damped Jaynes-Cummings qubit in a resonant Lorentzian reservoir.

The reduced dynamics is fixed by one real amplitude q_t: populations scale
with q_t^2 and coherences with q_t.  All frequencies are in units of the
transition frequency omega0, which never enters the interaction-picture
dynamics itself.
"""

from __future__ import annotations

__all__ = ('EPS_CRIT', 'POLE_EPS', 'JcParams', 'JcBranchKind', 'JcBranch',
           'JcRegime', 'jc_branch', 'jc_regime', 'q_of_t', 'dq_dt',
           'jc_gamma_t', 'jc_zeros', 'jc_state_at', 'jc_generator_at',
           'jc_trajectory', 'jc_lindblad_rule', 'jc_pseudomode_oracle',
           'jc_closed_form', 'jc_qsl', 'jc_qsl_pure')

from typing import Optional
from dataclasses import dataclass
import enum
import logging
import math

import numpy as np

from ._exceptions import ParameterError, PoleError
from .qubit import (BlochState, bloch_to_density, SIGMA_PLUS, SIGMA_MINUS)
from .engine import (QuadratureConfig, QslResult, Trajectory, simpson_average,
                     trajectory_qsl, evolve_numeric, log_disagreement)

log = logging.getLogger(__name__)

EPS_CRIT = 1e-9   # |lambda^2 - 2 gamma0 lambda| / lambda^2 below this is critical
POLE_EPS = 1e-12  # |q_t| below this is a pole of gamma_t


@dataclass(frozen=True)
class JcParams:
    """Lorentzian reservoir: spectral width ``lam`` and coupling ``gamma0``."""

    lam: float
    gamma0: float
    omega0: float = 1.0

    def __post_init__(self):
        for name in ("lam", "gamma0", "omega0"):
            value = float(getattr(self, name))
            if not (math.isfinite(value) and value > 0.0):
                raise ParameterError(f"JC parameter {name} must be finite and > 0, "
                                     f"got {getattr(self, name)}")
            object.__setattr__(self, name, value)


class JcBranchKind(enum.Enum):
    OVERDAMPED  = "overdamped"   # 2 gamma0 < lambda
    CRITICAL    = "critical"     # 2 gamma0 = lambda
    UNDERDAMPED = "underdamped"  # 2 gamma0 > lambda


class JcRegime(enum.Enum):
    MARKOVIAN     = "Markovian"
    NON_MARKOVIAN = "NonMarkovian"


class JcBranch:

    """Sign of lambda^2 - 2 gamma0 lambda and the magnitude |h| (or Omega)."""

    __slots__ = ('kind', 'magnitude')

    def __init__(self, kind: JcBranchKind, magnitude: float):
        self.kind = kind
        self.magnitude = magnitude

    def __repr__(self):
        return f"JcBranch({self.kind.value}, {self.magnitude!r})"

    def __eq__(self, other):
        return (isinstance(other, JcBranch)
                and (self.kind, self.magnitude) == (other.kind, other.magnitude))

    def __hash__(self):
        return hash((self.kind, self.magnitude))


def jc_branch(p: JcParams) -> JcBranch:
    disc = p.lam**2 - 2.0 * p.gamma0 * p.lam
    if abs(disc) / p.lam**2 < EPS_CRIT:
        return JcBranch(JcBranchKind.CRITICAL, 0.0)
    kind = JcBranchKind.OVERDAMPED if disc > 0.0 else JcBranchKind.UNDERDAMPED
    return JcBranch(kind, math.sqrt(abs(disc)))


def jc_regime(p: JcParams) -> JcRegime:
    """Markovian iff gamma0 < lambda/2; the boundary counts as non-Markovian."""
    return JcRegime.MARKOVIAN if p.gamma0 < p.lam / 2.0 else JcRegime.NON_MARKOVIAN


def _times(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise ParameterError("time must be >= 0")
    return t


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def q_of_t(p: JcParams, t):
    """Amplitude damping factor q_t (q_0 = 1)."""
    t = _times(t)
    lam = p.lam
    branch = jc_branch(p)
    if branch.kind is JcBranchKind.OVERDAMPED:
        h = branch.magnitude
        # e^{-lam t/2} cosh(h t/2) and e^{-lam t/2} sinh(h t/2) without overflow
        up   = np.exp(0.5 * (h - lam) * t)
        down = np.exp(-0.5 * (h + lam) * t)
        q = 0.5 * (up + down) + (lam / h) * 0.5 * (up - down)
    elif branch.kind is JcBranchKind.UNDERDAMPED:
        w = branch.magnitude
        q = np.exp(-0.5 * lam * t) * (np.cos(0.5 * w * t) + (lam / w) * np.sin(0.5 * w * t))
    else:
        q = np.exp(-0.5 * lam * t) * (1.0 + 0.5 * lam * t)
    return _scalar(q)


def dq_dt(p: JcParams, t):
    """Closed-form time derivative of q_t."""
    t = _times(t)
    lam, g0 = p.lam, p.gamma0
    branch = jc_branch(p)
    if branch.kind is JcBranchKind.OVERDAMPED:
        h = branch.magnitude
        sinh_damped = 0.5 * (np.exp(0.5 * (h - lam) * t) - np.exp(-0.5 * (h + lam) * t))
        dq = -(g0 * lam / h) * sinh_damped
    elif branch.kind is JcBranchKind.UNDERDAMPED:
        w = branch.magnitude
        dq = -(g0 * lam / w) * np.exp(-0.5 * lam * t) * np.sin(0.5 * w * t)
    else:
        dq = -g0 * lam * 0.5 * t * np.exp(-0.5 * lam * t)
    return _scalar(dq)


def jc_gamma_t(p: JcParams, t):
    """Time-dependent decay rate; diverges at the zeros of q_t.

    For inspection only: the bounds are built from q_t and dq/dt directly.
    """
    t = _times(t)
    q = q_of_t(p, t)
    if np.any(np.abs(q) < POLE_EPS):
        raise PoleError(f"decay rate has a pole at t={t} (q_t = {q})")
    lam, g0 = p.lam, p.gamma0
    branch = jc_branch(p)
    if branch.kind is JcBranchKind.OVERDAMPED:
        h = branch.magnitude
        th = np.tanh(0.5 * h * t)
        rate = 2.0 * g0 * lam * th / (h + lam * th)
    elif branch.kind is JcBranchKind.UNDERDAMPED:
        w = branch.magnitude
        s, c = np.sin(0.5 * w * t), np.cos(0.5 * w * t)
        rate = 2.0 * g0 * lam * s / (w * c + lam * s)
    else:
        rate = g0 * lam * t / (1.0 + 0.5 * lam * t)
    return _scalar(rate)


def jc_zeros(p: JcParams, tau: float):
    """Times in (0, tau) where q_t or dq/dt vanish (underdamped branch only)."""
    branch = jc_branch(p)
    if branch.kind is not JcBranchKind.UNDERDAMPED:
        return []
    w, lam = branch.magnitude, p.lam
    zeros = []
    k = 1
    while 2.0 * math.pi * k / w < tau:            # dq/dt = 0
        zeros.append(2.0 * math.pi * k / w)
        k += 1
    first = 2.0 * (math.pi - math.atan(w / lam)) / w
    k = 0
    while first + 2.0 * math.pi * k / w < tau:    # q = 0
        zeros.append(first + 2.0 * math.pi * k / w)
        k += 1
    return sorted(zeros)


def jc_state_at(p: JcParams, s0: BlochState, t):
    """Reduced state at time t (a stack of states for an array of times)."""
    q = np.asarray(q_of_t(p, t), dtype=float)
    a = 1.0 + s0.rz
    c = s0.rx + 1j * s0.ry
    rho = np.empty(q.shape + (2, 2), dtype=complex)
    rho[..., 0, 0] = 0.5 * a * q * q
    rho[..., 0, 1] = 0.5 * np.conj(c) * q
    rho[..., 1, 0] = 0.5 * c * q
    rho[..., 1, 1] = 1.0 - 0.5 * a * q * q
    return rho


def jc_generator_at(p: JcParams, s0: BlochState, t):
    """L_t(rho_t) as the analytic time derivative of :func:`jc_state_at`.

    Pole free: built from q_t and dq/dt, never from gamma_t.
    """
    q = np.asarray(q_of_t(p, t), dtype=float)
    dq = np.asarray(dq_dt(p, t), dtype=float)
    a = 1.0 + s0.rz
    c = s0.rx + 1j * s0.ry
    gen = np.empty(q.shape + (2, 2), dtype=complex)
    gen[..., 0, 0] = a * q * dq
    gen[..., 0, 1] = 0.5 * np.conj(c) * dq
    gen[..., 1, 0] = 0.5 * c * dq
    gen[..., 1, 1] = -a * q * dq
    return gen


def jc_trajectory(p: JcParams, s0: BlochState) -> Trajectory:
    return Trajectory(state=lambda t: jc_state_at(p, s0, t),
                      generator=lambda t: jc_generator_at(p, s0, t),
                      breakpoints=lambda tau: jc_zeros(p, tau))


def jc_lindblad_rule(p: JcParams):
    """Time-local master equation with the decay rate gamma_t.

    Only usable where q_t has no zeros (overdamped and critical branches).
    """
    sp, sm = SIGMA_PLUS, SIGMA_MINUS
    spsm = sp @ sm

    def rule(t, rho):
        rate = jc_gamma_t(p, t)
        return 0.5 * rate * (2.0 * sm @ rho @ sp - spsm @ rho - rho @ spsm)
    return rule


def jc_pseudomode_oracle(p: JcParams, s0: BlochState, tau: float,
                         steps: Optional[int] = None) -> np.ndarray:
    """Reduced state from an exact embedding of the reservoir.

    A resonant Lorentzian reservoir acts like one damped mode with coupling
    g^2 = gamma0·lambda/2 and field decay rate 2·lambda.  The qubit plus mode
    (truncated to one photon, exact in the single-excitation sector) obeys a
    time-independent Lindblad equation that has no poles in any branch.
    """
    if steps is None:
        from .__config__ import config
        steps = int(config.get("ORACLE_STEPS", 10000))
    eye = np.eye(2, dtype=complex)
    a = np.array([[0, 1], [0, 0]], dtype=complex)  # mode basis (|0>, |1>)
    g = math.sqrt(0.5 * p.gamma0 * p.lam)
    hamiltonian = g * (np.kron(SIGMA_PLUS, a) + np.kron(SIGMA_MINUS, a.conj().T))
    jump = math.sqrt(2.0 * p.lam) * np.kron(eye, a)
    jdj = jump.conj().T @ jump
    dim = 4
    # row-major vec: vec(A X B) = (A kron B^T) vec(X)
    ident = np.eye(dim)
    superop = (-1j * (np.kron(hamiltonian, ident) - np.kron(ident, hamiltonian.T))
               + np.kron(jump, jump.conj())
               - 0.5 * (np.kron(jdj, ident) + np.kron(ident, jdj.T)))

    def rule(t, rho):
        return (superop @ rho.reshape(-1)).reshape(dim, dim)

    vacuum = np.array([[1, 0], [0, 0]], dtype=complex)
    rho0 = np.kron(bloch_to_density(s0), vacuum)
    rho = evolve_numeric(rule, rho0, tau, steps)
    return np.einsum("ikjk->ij", rho.reshape(2, 2, 2, 2))


def jc_closed_form(p: JcParams, s0: BlochState, tau: float,
                   quad: QuadratureConfig) -> float:
    """Operator-norm bound from the Bloch-vector closed form.

    (1 - q)[C^2 + sz(1 + sz)(1 + q)] over (1/tau)∫|dq/dt|·sqrt(C^2 + 4q^2(1 + sz)^2) dt;
    a negative numerator (clamped relative purity) gives 0.
    """
    c2 = s0.rx**2 + s0.ry**2
    sz = s0.rz
    q_tau = q_of_t(p, tau)
    numerator = (1.0 - q_tau) * (c2 + sz * (1.0 + sz) * (1.0 + q_tau))

    def integrand(t):
        q = q_of_t(p, t)
        return np.abs(dq_dt(p, t)) * np.sqrt(c2 + 4.0 * q * q * (1.0 + sz)**2)
    denominator, _ = simpson_average(integrand, tau, quad, jc_zeros(p, tau))
    denominator = float(denominator)
    if denominator <= 0.0 or numerator <= 0.0:
        return 0.0
    return numerator / denominator


def jc_qsl(p: JcParams, s0: BlochState, tau: float,
           quad: Optional[QuadratureConfig] = None) -> QslResult:
    """Speed-limit bounds from the generic pipeline plus the closed form."""
    if not tau > 0.0:
        raise ParameterError(f"driving time tau must be > 0, got {tau}")
    if quad is None:
        quad = QuadratureConfig.from_config()
    result = trajectory_qsl(jc_trajectory(p, s0), s0, tau, quad)
    closed = 0.0 if result.degenerate else jc_closed_form(p, s0, tau, quad)
    log_disagreement(f"JC bound (lambda={p.lam}, gamma0={p.gamma0}, tau={tau})",
                     closed, result.tau_qsl_op)
    return result.with_closed_form(closed)


def jc_qsl_pure(p: JcParams, alpha: float, tau: float,
                quad: Optional[QuadratureConfig] = None) -> float:
    """Bound for the pure state alpha|1> + sqrt(1 - alpha^2)|0>.

    |alpha|(1 - q)[1 - (1 - 2 alpha^2) q] over
    (1/tau)∫|dq/dt·sqrt(1 - (1 - 4 q^2) alpha^2)| dt.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ParameterError(f"alpha must lie in [0, 1], got {alpha}")
    if not tau > 0.0:
        raise ParameterError(f"driving time tau must be > 0, got {tau}")
    if quad is None:
        quad = QuadratureConfig.from_config()
    if alpha == 0.0:
        return 0.0
    a2 = alpha * alpha
    q_tau = q_of_t(p, tau)
    numerator = alpha * (1.0 - q_tau) * (1.0 - (1.0 - 2.0 * a2) * q_tau)

    def integrand(t):
        q = q_of_t(p, t)
        return np.abs(dq_dt(p, t) * np.sqrt(np.maximum(1.0 - (1.0 - 4.0 * q * q) * a2, 0.0)))
    denominator, _ = simpson_average(integrand, tau, quad, jc_zeros(p, tau))
    denominator = float(denominator)
    if denominator <= 0.0 or numerator <= 0.0:
        return 0.0
    return numerator / denominator
