# Copyright (c) 2024 qslkit developers
# SPDX-License-Identifier: Zlib

"""Model-agnostic quantum speed limit machinery.

A model hands over a :class:`Trajectory` (state and generator as functions
of time); the engine averages the three generator norms over [0, tau] and
turns them into the operator-, Hilbert-Schmidt- and trace-norm bounds.
"""

from __future__ import annotations

__all__ = ('QuadratureConfig', 'QslResult', 'Trajectory',
           'DerivativeBoundReport', 'simpson_average', 'averaged_speeds',
           'unified_qsl', 'trajectory_qsl', 'evolve_numeric',
           'derivative_bound_check', 'check_trajectory', 'log_disagreement')

from typing import Callable, Optional, Sequence, Tuple
from dataclasses import dataclass, field, asdict
import logging
import math

import numpy as np
from scipy.integrate import simpson

from ._exceptions import ParameterError, ConvergenceError, VerificationError
from .qubit import (BlochState, bloch_to_density, purity, overlap, norms,
                    relative_purity_angle)

log = logging.getLogger(__name__)

CLAMP_SLACK = 1e-12  # ratio excursions below this are rounding, not clamping


@dataclass(frozen=True)
class QuadratureConfig:
    """Composite Simpson settings for the time averages."""

    nodes: int = 2001
    rel_tol: float = 1e-8
    max_refinements: int = 4

    def __post_init__(self):
        if int(self.nodes) != self.nodes or self.nodes < 3 or self.nodes % 2 == 0:
            raise ParameterError(f"quadrature nodes must be an odd integer >= 3, "
                                 f"got {self.nodes}")
        if not self.rel_tol > 0.0:
            raise ParameterError(f"quadrature rel_tol must be > 0, got {self.rel_tol}")
        if int(self.max_refinements) != self.max_refinements or self.max_refinements < 1:
            raise ParameterError(f"quadrature max_refinements must be an integer >= 1, "
                                 f"got {self.max_refinements}")
        object.__setattr__(self, "nodes", int(self.nodes))
        object.__setattr__(self, "rel_tol", float(self.rel_tol))
        object.__setattr__(self, "max_refinements", int(self.max_refinements))

    @classmethod
    def from_config(cls, config=None, **overrides) -> QuadratureConfig:
        if config is None:
            from .__config__ import config
        kwargs = dict(nodes=int(config.get("QUAD_NODES", cls.nodes)),
                      rel_tol=float(config.get("QUAD_REL_TOL", cls.rel_tol)),
                      max_refinements=int(config.get("QUAD_MAX_REFINEMENTS",
                                                     cls.max_refinements)))
        kwargs.update({key: val for key, val in overrides.items() if val is not None})
        return cls(**kwargs)

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class QslResult:
    """All quantities of one speed-limit evaluation."""

    theta: float
    purity0: float
    lambda_op: float
    lambda_hs: float
    lambda_tr: float
    tau_qsl_op: float
    tau_qsl_hs: float
    tau_qsl_tr: float
    tau_qsl_unified: float
    clamped: bool
    degenerate: bool
    tau: float
    tau_qsl_closed: Optional[float] = None

    def to_dict(self):
        return asdict(self)

    def with_closed_form(self, value: Optional[float]) -> QslResult:
        from dataclasses import replace
        return replace(self, tau_qsl_closed=value)


def _no_breakpoints(tau):
    return ()


@dataclass(frozen=True)
class Trajectory:
    """State and generator of a non-unitary evolution as functions of time.

    Both callables accept a scalar time (returning a 2x2 matrix) or an array
    of times (returning a stack).  ``breakpoints(tau)`` lists the interior
    times where the generator norm may have a kink (generator zeros); the
    quadrature splits there.
    """

    state: Callable
    generator: Callable
    breakpoints: Callable = field(default=_no_breakpoints)

    def __call__(self, t):
        return self.state(t), self.generator(t)


@dataclass(frozen=True)
class DerivativeBoundReport:
    """Sampled check of 2 cos(Theta) sin(Theta) dTheta/dt tr[rho0^2] <= |tr[rho0 L_t]|."""

    times: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    worst: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.worst <= self.tol

    def check(self):
        if not self.passed:
            raise VerificationError("derivative bound violated", worst=self.worst)
        return self


def _piece_nodes(tau, nodes, breakpoints):
    edges = [0.0] + sorted(float(t) for t in breakpoints if 0.0 < t < tau) + [float(tau)]
    pieces = []
    for a, b in zip(edges[:-1], edges[1:]):
        if b - a <= tau * 1e-14:
            continue
        half = max(1, int(round((nodes - 1) * (b - a) / tau / 2.0)))
        pieces.append((a, b, 2 * half + 1))
    return pieces


def _composite(func, pieces):
    total = 0.0
    for a, b, m in pieces:
        t = np.linspace(a, b, m)
        y = np.asarray(func(t), dtype=float)
        total = total + simpson(y, x=t, axis=-1)
    return np.asarray(total, dtype=float)


def simpson_average(func: Callable, tau: float, quad: QuadratureConfig,
                    breakpoints: Sequence[float] = ()) -> Tuple[np.ndarray, float]:
    """Time average (1/tau)·∫_0^tau func(t) dt by refined composite Simpson.

    ``func`` maps an array of times to an array whose last axis runs over
    the times (several integrands can be averaged together).  The node count
    is doubled until two successive estimates agree to ``quad.rel_tol``; the
    Richardson-extrapolated value and the achieved tolerance are returned.
    """
    if not tau > 0.0:
        raise ParameterError(f"driving time tau must be > 0, got {tau}")
    pieces = _piece_nodes(tau, quad.nodes, breakpoints)
    previous = _composite(func, pieces)
    achieved = math.inf
    for refinement in range(1, quad.max_refinements + 1):
        pieces = [(a, b, 2 * m - 1) for a, b, m in pieces]
        current = _composite(func, pieces)
        extrapolated = current + (current - previous) / 15.0
        error = np.abs(current - previous)
        scale = np.abs(extrapolated)
        floor = quad.rel_tol * 1e-6 * float(np.max(scale, initial=0.0))
        achieved = float(np.max(np.where(scale > 0.0, error / np.where(scale > 0.0, scale, 1.0),
                                         0.0), initial=0.0))
        log.debug("simpson refinement %d: nodes/piece %s, achieved %.3g",
                  refinement, [m for _, _, m in pieces], achieved)
        if np.all((error <= quad.rel_tol * scale) | (error <= floor)):
            return extrapolated / tau, achieved
        previous = current
    raise ConvergenceError(f"time average on [0, {tau}] did not converge after "
                           f"{quad.max_refinements} refinements", achieved=achieved)


def averaged_speeds(traj: Trajectory, tau: float,
                    quad: QuadratureConfig) -> Tuple[float, float, float]:
    """Averages of the operator, Hilbert-Schmidt and trace norms of L_t(rho_t)."""
    def integrand(t):
        return np.stack(norms(traj.generator(t)))
    values, _ = simpson_average(integrand, tau, quad, traj.breakpoints(tau))
    lam_op, lam_hs, lam_tr = (float(v) for v in values)
    # Richardson extrapolation is not order-preserving at rounding level
    lam_hs = max(lam_hs, lam_op)
    lam_tr = max(lam_tr, lam_hs)
    return lam_op, lam_hs, lam_tr


def unified_qsl(s0: BlochState, state_tau, speeds: Sequence[float],
                tau: float) -> QslResult:
    """The three norm bounds sin^2(Theta)·tr[rho0^2]/Lambda and their maximum."""
    if not tau > 0.0:
        raise ParameterError(f"driving time tau must be > 0, got {tau}")
    lam_op, lam_hs, lam_tr = (float(v) for v in speeds)
    if min(lam_op, lam_hs, lam_tr) < 0.0:
        raise ParameterError(f"averaged speeds must be >= 0, got {speeds}")
    rho0 = bloch_to_density(s0)
    purity0 = purity(s0)
    ov = float(overlap(rho0, state_tau))
    ratio = ov / purity0
    clamped = ratio > 1.0 + CLAMP_SLACK or ratio < -CLAMP_SLACK
    if clamped:
        log.info("relative purity ratio %.17g clamped to [0, 1]", ratio)
    theta = math.acos(math.sqrt(min(max(ratio, 0.0), 1.0)))
    # sin^2(Theta)·tr[rho0^2] without the round trip through arccos
    numerator = min(max(purity0 - ov, 0.0), purity0)
    degenerate = lam_op == 0.0 and lam_hs == 0.0 and lam_tr == 0.0
    bounds = [numerator / lam if lam > 0.0 else 0.0 for lam in (lam_op, lam_hs, lam_tr)]
    return QslResult(theta=theta, purity0=purity0,
                     lambda_op=lam_op, lambda_hs=lam_hs, lambda_tr=lam_tr,
                     tau_qsl_op=bounds[0], tau_qsl_hs=bounds[1], tau_qsl_tr=bounds[2],
                     tau_qsl_unified=max(bounds),
                     clamped=clamped, degenerate=degenerate, tau=float(tau))


def trajectory_qsl(traj: Trajectory, s0: BlochState, tau: float,
                   quad: QuadratureConfig) -> QslResult:
    """Generic pipeline: averaged speeds of ``traj`` plus the unified bound."""
    speeds = averaged_speeds(traj, tau, quad)
    return unified_qsl(s0, traj.state(tau), speeds, tau)


def evolve_numeric(generator_rule: Callable, rho0, tau: float, steps: int,
                   check_convergence: bool = False) -> np.ndarray:
    """Classical 4th-order Runge-Kutta solution of d(rho)/dt = rule(t, rho).

    Works for any square density matrix.  Loss of trace, Hermiticity
    (beyond 1e-10) or positivity (beyond 1e-8) means the rule is wrong and
    raises :class:`VerificationError`.
    """
    if int(steps) != steps or steps < 100:
        raise ParameterError(f"Runge-Kutta steps must be an integer >= 100, got {steps}")
    if tau < 0.0:
        raise ParameterError(f"integration time must be >= 0, got {tau}")
    rho0 = np.array(rho0, dtype=complex)
    rho = _rk4(generator_rule, rho0, float(tau), int(steps))

    trace_drift = abs(np.trace(rho) - np.trace(rho0))
    if trace_drift > 1e-10:
        raise VerificationError("generator does not preserve the trace", worst=trace_drift)
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    if herm > 1e-10:
        raise VerificationError("generator does not preserve Hermiticity", worst=herm)
    lowest = float(np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))))
    if lowest < -1e-8:
        raise VerificationError("evolved state lost positivity", worst=-lowest)

    if check_convergence:
        finer = _rk4(generator_rule, rho0, float(tau), 2 * int(steps))
        change = float(np.max(np.abs(finer - rho)))
        if change >= 1e-8:
            raise ConvergenceError(f"Runge-Kutta result changes by {change:.3g} "
                                   f"when halving the step", achieved=change)
    return rho


def _rk4(rule, rho, tau, steps):
    h = tau / steps
    for n in range(steps):
        t = n * h
        k1 = rule(t, rho)
        k2 = rule(t + h / 2, rho + h / 2 * k1)
        k3 = rule(t + h / 2, rho + h / 2 * k2)
        k4 = rule(t + h, rho + h * k3)
        rho = rho + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return rho


def derivative_bound_check(traj: Trajectory, s0: BlochState, tau: float,
                           samples: int = 50, tol: float = 1e-6) -> DerivativeBoundReport:
    """Sample the derivative inequality behind all three bounds on (0, tau].

    dTheta/dt comes from central differences (delta = tau·1e-6); the
    right-hand side |tr[rho0 L_t(rho_t)]| is evaluated exactly.
    """
    if samples < 10:
        raise ParameterError(f"derivative-bound check needs >= 10 samples, got {samples}")
    if not tau > 0.0:
        raise ParameterError(f"driving time tau must be > 0, got {tau}")
    rho0 = bloch_to_density(s0)
    purity0 = purity(s0)
    delta = tau * 1e-6
    times = tau * np.arange(1, samples + 1) / samples
    lhs = np.empty(samples)
    rhs = np.empty(samples)
    for k, t in enumerate(times):
        theta = relative_purity_angle(s0, traj.state(t))
        dtheta = (relative_purity_angle(s0, traj.state(t + delta))
                  - relative_purity_angle(s0, traj.state(t - delta))) / (2 * delta)
        lhs[k] = math.sin(2 * theta) * dtheta * purity0
        rhs[k] = abs(float(overlap(rho0, traj.generator(t))))
    worst = float(np.max(lhs - rhs))
    return DerivativeBoundReport(times=times, lhs=lhs, rhs=rhs,
                                 worst=max(worst, 0.0), tol=tol)


def check_trajectory(traj: Trajectory, tau: float, rng=None, samples: int = 5,
                     tol: float = 1e-6) -> float:
    """Spot-check that the generator is the time derivative of the state."""
    rng = np.random.default_rng(rng)
    delta = 1e-6 * max(tau, 1.0)
    worst = 0.0
    for t in rng.uniform(2 * delta, tau, size=samples):
        fd = (traj.state(t + delta) - traj.state(t - delta)) / (2 * delta)
        gen = traj.generator(t)
        worst = max(worst, float(np.max(np.abs(fd - gen))) / max(1.0, float(np.max(np.abs(gen)))))
    if worst > tol:
        raise VerificationError("generator is not the derivative of the state", worst=worst)
    return worst


def log_disagreement(what: str, closed: float, generic: float, tol: float = 1e-6) -> bool:
    """Warn when a closed-form bound departs from the generic pipeline.

    The generic value stays authoritative; returns True when they agree.
    """
    if abs(closed - generic) > tol * max(abs(closed), abs(generic)) + 1e-14:
        log.warning("%s: closed form %.17g disagrees with the generic pipeline %.17g; "
                    "keeping the generic value", what, closed, generic)
        return False
    return True
