# Copyright (c) 2024 qslkit developers
# SPDX-License-Identifier: Zlib

"""Pure-dephasing qubit coupled to an Ohmic-family bosonic bath.

Populations are frozen and coherences decay as exp(-Gamma_t), with the
dephasing factor Gamma_t set by the spectral density
J(omega) = eta·omega^s·omega_c^(1-s)·exp(-omega/omega_c).  Times enter only
through x = omega_c·t.  At zero temperature Gamma_t has a closed form; at
finite temperature it is a semi-infinite integral.
"""

from __future__ import annotations

__all__ = ('S_MIN', 'SEAM_EPS', 'DephasingParams', 'spectral_density',
           'gamma_function', 'big_gamma_analytic', 'big_gamma_numeric',
           'dephasing_gamma_t', 'dephasing_gamma_t_numeric',
           'dephasing_gamma_t_fd', 'dephasing_zeros', 'negative_rate_intervals',
           'dephasing_state_at', 'dephasing_generator_at', 'dephasing_trajectory',
           'dephasing_lindblad_rule', 'dephasing_closed_form', 'dephasing_qsl',
           'dephasing_qsl_pure')

from typing import List, Optional, Tuple
from dataclasses import dataclass
from functools import lru_cache
import logging
import math

import numpy as np
from scipy import integrate, optimize, special

from ._exceptions import ParameterError, PoleError, ConvergenceError
from .qubit import BlochState, SIGMA_Z
from .engine import (QuadratureConfig, QslResult, Trajectory, simpson_average,
                     trajectory_qsl, log_disagreement)

log = logging.getLogger(__name__)

S_MIN    = 0.05  # smallest accepted ohmicity
SEAM_EPS = 1e-6  # |s - 1| below this uses the Ohmic limit of the closed form

_QUAD_LIMIT  = 1000
_QUAD_EPSABS = 1e-13
_QUAD_EPSREL = 1e-11
_ZERO_SAMPLES = 512  # sign-change search grid for finite-temperature rate zeros


@dataclass(frozen=True)
class DephasingParams:
    """Bath coupling ``eta``, ohmicity ``s``, cutoff ``omega_c`` and temperature.

    ``temperature`` is in energy units (k_B = 1); zero selects the analytic
    dephasing factor.
    """

    eta: float
    s: float
    omega_c: float = 1.0
    temperature: float = 0.0

    def __post_init__(self):
        for name in ("eta", "s", "omega_c", "temperature"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ParameterError(f"dephasing parameter {name}={value} is not finite")
            object.__setattr__(self, name, value)
        if not self.eta > 0.0:
            raise ParameterError(f"coupling eta must be > 0, got {self.eta}")
        if not self.s >= S_MIN:
            raise ParameterError(f"ohmicity s must be >= {S_MIN}, got {self.s}")
        if not self.omega_c > 0.0:
            raise ParameterError(f"cutoff omega_c must be > 0, got {self.omega_c}")
        if self.temperature < 0.0:
            raise ParameterError(f"temperature must be >= 0, got {self.temperature}")

    @property
    def is_zero_temperature(self) -> bool:
        return self.temperature == 0.0


def _times(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise ParameterError("time must be >= 0")
    return t


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def _require_zero_temperature(p: DephasingParams, what: str):
    if not p.is_zero_temperature:
        raise ParameterError(f"{what} is the zero-temperature closed form; "
                             f"got temperature={p.temperature} (use the numeric path)")


def spectral_density(p: DephasingParams, omega):
    """J(omega) = eta·omega^s/omega_c^(s-1)·exp(-omega/omega_c)."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0.0):
        raise ParameterError("frequency must be >= 0")
    u = omega / p.omega_c
    return _scalar(p.eta * p.omega_c * u**p.s * np.exp(-u))


def gamma_function(x: float) -> float:
    """Euler gamma, including negative non-integer arguments."""
    x = float(x)
    if not math.isfinite(x):
        raise ParameterError(f"gamma function argument {x} is not finite")
    if x <= 0.0 and x == math.floor(x):
        raise PoleError(f"gamma function has a pole at {x:g}")
    return float(special.gamma(x))


def big_gamma_analytic(p: DephasingParams, tau):
    """Zero-temperature dephasing factor.

    eta·[1 - cos((s-1)·atan x)/(1 + x^2)^((s-1)/2)]·Gamma(s-1) with
    x = omega_c·tau; the Ohmic seam |s - 1| < 1e-6 uses (eta/2)·ln(1 + x^2).
    """
    _require_zero_temperature(p, "big_gamma_analytic")
    x = p.omega_c * _times(tau)
    if abs(p.s - 1.0) < SEAM_EPS:
        return _scalar(0.5 * p.eta * np.log1p(x * x))
    nu = p.s - 1.0
    a = nu * np.arctan(x)
    b = -0.5 * nu * np.log1p(x * x)
    # 1 - cos(a)·e^b without cancellation for small a and b
    bracket = -np.expm1(b) * np.cos(a) + 2.0 * np.sin(0.5 * a)**2
    return _scalar(p.eta * bracket * gamma_function(nu))


def _coth(y):
    if y < 1e-4:
        return 1.0 / y + y / 3.0
    return 1.0 / math.tanh(y)


def _tail_cutoff(p: DephasingParams, tail_tol: float) -> float:
    """Upper limit U (in units of omega_c) with eta·U^s·exp(-U) below tail_tol."""
    eta = p.eta * (1.0 + 2.0 * p.temperature / p.omega_c)
    lo, hi = max(p.s, 1.0), 2000.0

    def excess(u):
        return math.log(eta) + p.s * math.log(u) - u - math.log(tail_tol)

    if excess(lo) <= 0.0:
        return lo
    if excess(hi) > 0.0:
        raise ConvergenceError(f"spectral tail does not fall below {tail_tol:g} "
                               f"before omega = {hi:g}·omega_c")
    return optimize.brentq(excess, lo, hi, xtol=1e-10)


def _tail_tol():
    from .__config__ import config
    return float(config.get("TAIL_TOL", 1e-12))


def _bath_integral(p: DephasingParams, kernel, x: float, what: str) -> float:
    thermal = not p.is_zero_temperature
    ratio = p.omega_c / (2.0 * p.temperature) if thermal else 0.0

    def integrand(u):
        if u == 0.0:
            return 0.0
        value = kernel(u, x) * math.exp(-u)
        return value * _coth(u * ratio) if thermal else value

    upper = _tail_cutoff(p, _tail_tol())
    value, abserr, *rest = integrate.quad(integrand, 0.0, upper, limit=_QUAD_LIMIT,
                                          epsabs=_QUAD_EPSABS, epsrel=_QUAD_EPSREL,
                                          full_output=1)
    if len(rest) > 1 and abserr > max(1e-10, 1e-8 * abs(value)):
        raise ConvergenceError(f"{what} integral at x={x:g} did not converge: {rest[1]}",
                               achieved=abserr / max(abs(value), 1e-300))
    return value


def big_gamma_numeric(p: DephasingParams, tau):
    """Dephasing factor by quadrature, at any temperature.

    Integrates eta·u^(s-2)·exp(-u)·(1 - cos(u x))·coth(u omega_c/2T) over
    u = omega/omega_c on [0, U]; U is fixed by the tail tolerance.  The
    integrand oscillates with period 2pi/x, so the integral uses adaptive
    QUADPACK subdivision (scipy quad) instead of a fixed Simpson grid, whose
    node count would have to grow with omega_c·tau.
    """
    s = p.s

    def kernel(u, x):
        return p.eta * u**(s - 2.0) * 2.0 * math.sin(0.5 * u * x)**2

    t = _times(tau)
    values = [0.0 if x == 0.0 else _bath_integral(p, kernel, x, "dephasing factor")
              for x in np.ravel(p.omega_c * t)]
    return _scalar(np.reshape(values, t.shape))


def dephasing_gamma_t(p: DephasingParams, t):
    """Zero-temperature dephasing rate omega_c·eta·(1 + x^2)^(-s/2)·Gamma(s)·sin(s·atan x)."""
    _require_zero_temperature(p, "dephasing_gamma_t")
    x = p.omega_c * _times(t)
    rate = (p.omega_c * p.eta * (1.0 + x * x)**(-0.5 * p.s)
            * gamma_function(p.s) * np.sin(p.s * np.arctan(x)))
    return _scalar(rate)


def dephasing_gamma_t_numeric(p: DephasingParams, t):
    """Dephasing rate at any temperature from the time-differentiated integral.

    Used at temperature > 0 in place of the central difference of
    :func:`big_gamma_numeric`: the difference of two quadratures with
    delta = 1e-5·tau keeps only about half of their digits.
    :func:`dephasing_gamma_t_fd` stays available as the cross-check.
    """
    s = p.s

    def kernel(u, x):
        return p.eta * u**(s - 1.0) * math.sin(u * x)

    t = _times(t)
    values = [0.0 if x == 0.0 else _bath_integral(p, kernel, x, "dephasing rate")
              for x in np.ravel(p.omega_c * t)]
    return _scalar(p.omega_c * np.reshape(values, t.shape))


def dephasing_gamma_t_fd(p: DephasingParams, t: float, tau: Optional[float] = None) -> float:
    """Central difference of :func:`big_gamma_numeric` with delta = 1e-5·tau.

    One-sided where t < delta.  ``tau`` defaults to ``t``.
    """
    t = float(t)
    delta = 1e-5 * (t if tau is None else float(tau))
    if delta <= 0.0:
        raise ParameterError("finite-difference step needs tau > 0")
    if t < delta:
        return (big_gamma_numeric(p, t + delta) - big_gamma_numeric(p, t)) / delta
    return (big_gamma_numeric(p, t + delta) - big_gamma_numeric(p, t - delta)) / (2.0 * delta)


def _analytic_zeros(p: DephasingParams, tau: float) -> List[float]:
    zeros = []
    k = 1
    while k * math.pi / p.s < 0.5 * math.pi:
        t = math.tan(k * math.pi / p.s) / p.omega_c
        if t >= tau:
            break
        zeros.append(t)
        k += 1
    return zeros


def _sampled_zeros(rate, tau: float) -> List[float]:
    t = tau * np.arange(1, _ZERO_SAMPLES + 1) / _ZERO_SAMPLES
    values = np.asarray(rate(t), dtype=float)
    zeros = []
    for k in range(len(t) - 1):
        if values[k] == 0.0:
            zeros.append(float(t[k]))
        elif values[k] * values[k + 1] < 0.0:
            zeros.append(optimize.brentq(lambda x: float(rate(x)), t[k], t[k + 1],
                                         xtol=1e-14 * tau))
    return zeros


def dephasing_zeros(p: DephasingParams, tau: float) -> List[float]:
    """Times in (0, tau) where the dephasing rate changes sign.

    At zero temperature omega_c·t = tan(k·pi/s) for k·pi/s < pi/2, so only
    s > 2 has any.  At finite temperature they are located numerically.
    """
    if p.is_zero_temperature:
        return _analytic_zeros(p, tau)
    return _sampled_zeros(_rate_function(p), tau)


def _rate_function(p: DephasingParams):
    if p.is_zero_temperature:
        return lambda t: dephasing_gamma_t(p, t)
    return _cached(lambda x: dephasing_gamma_t_numeric(p, x))


def negative_rate_intervals(p: DephasingParams, tau: float) -> List[Tuple[float, float]]:
    """Sub-intervals of [0, tau] on which gamma_t < 0 (memory effects)."""
    if not tau > 0.0:
        raise ParameterError(f"driving time tau must be > 0, got {tau}")
    rate = _rate_function(p)
    edges = [0.0] + dephasing_zeros(p, tau) + [float(tau)]
    intervals: List[Tuple[float, float]] = []
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a or float(rate(0.5 * (a + b))) >= 0.0:
            continue
        if intervals and intervals[-1][1] == a:
            intervals[-1] = (intervals[-1][0], b)
        else:
            intervals.append((a, b))
    if intervals:
        log.info("dephasing rate is negative on %s (s=%g, eta=%g)", intervals, p.s, p.eta)
    return intervals


def _cached(func):
    """Vectorize a scalar function of time and memoize it per time value."""
    scalar = lru_cache(maxsize=None)(lambda x: float(func(x)))

    def wrapper(t):
        t = np.asarray(t, dtype=float)
        values = np.array([scalar(float(x)) for x in np.ravel(t)], dtype=float)
        return _scalar(values.reshape(t.shape))
    return wrapper


def _factors(p: DephasingParams):
    """(Gamma_t, gamma_t) as functions of time for the given temperature."""
    if p.is_zero_temperature:
        return (lambda t: big_gamma_analytic(p, t)), (lambda t: dephasing_gamma_t(p, t))
    return (_cached(lambda x: big_gamma_numeric(p, x)),
            _cached(lambda x: dephasing_gamma_t_numeric(p, x)))


def _state(s0: BlochState, big_gamma):
    decay = np.exp(-np.asarray(big_gamma, dtype=float))
    c = s0.rx + 1j * s0.ry
    rho = np.empty(decay.shape + (2, 2), dtype=complex)
    rho[..., 0, 0] = 0.5 * (1.0 + s0.rz)
    rho[..., 0, 1] = 0.5 * np.conj(c) * decay
    rho[..., 1, 0] = 0.5 * c * decay
    rho[..., 1, 1] = 0.5 * (1.0 - s0.rz)
    return rho


def _generator(s0: BlochState, big_gamma, rate):
    factor = np.asarray(rate, dtype=float) * np.exp(-np.asarray(big_gamma, dtype=float))
    c = s0.rx + 1j * s0.ry
    gen = np.zeros(factor.shape + (2, 2), dtype=complex)
    gen[..., 0, 1] = -0.5 * np.conj(c) * factor
    gen[..., 1, 0] = -0.5 * c * factor
    return gen


def dephasing_state_at(p: DephasingParams, s0: BlochState, t):
    """Populations stay put; coherences are multiplied by exp(-Gamma_t)."""
    big_gamma, _ = _factors(p)
    return _state(s0, big_gamma(t))


def dephasing_generator_at(p: DephasingParams, s0: BlochState, t):
    """(gamma_t/2)(sigma_z rho_t sigma_z - rho_t): off-diagonal only."""
    big_gamma, rate = _factors(p)
    return _generator(s0, big_gamma(t), rate(t))


def dephasing_trajectory(p: DephasingParams, s0: BlochState) -> Trajectory:
    big_gamma, rate = _factors(p)
    return Trajectory(state=lambda t: _state(s0, big_gamma(t)),
                      generator=lambda t: _generator(s0, big_gamma(t), rate(t)),
                      breakpoints=lambda tau: dephasing_zeros(p, tau))


def dephasing_lindblad_rule(p: DephasingParams):
    """Time-local dephasing master equation as a Runge-Kutta right-hand side."""
    _, rate = _factors(p)
    sz = SIGMA_Z

    def rule(t, rho):
        return 0.5 * float(rate(t)) * (sz @ rho @ sz - rho)
    return rule


def _closed_form_from_coherence(p: DephasingParams, coherence: float, tau: float,
                                quad: QuadratureConfig) -> float:
    if coherence == 0.0:
        return 0.0

    def integrand(t):
        return np.abs(dephasing_gamma_t(p, t)) * np.exp(-big_gamma_analytic(p, t))
    denominator, _ = simpson_average(integrand, tau, quad, dephasing_zeros(p, tau))
    denominator = float(denominator)
    if denominator <= 0.0:
        return 0.0
    return coherence * -math.expm1(-big_gamma_analytic(p, tau)) / denominator


def dephasing_closed_form(p: DephasingParams, s0: BlochState, tau: float,
                          quad: QuadratureConfig) -> float:
    """C·(1 - exp(-Gamma_tau)) over (1/tau)∫|gamma_t exp(-Gamma_t)| dt.

    Linear in the l1 coherence and blind to the population.
    """
    _require_zero_temperature(p, "dephasing_closed_form")
    return _closed_form_from_coherence(p, s0.coherence, tau, quad)


def dephasing_qsl(p: DephasingParams, s0: BlochState, tau: float,
                  quad: Optional[QuadratureConfig] = None) -> QslResult:
    """Speed-limit bounds from the generic pipeline plus the closed form.

    At finite temperature only the generic pipeline runs and
    ``tau_qsl_closed`` is None.
    """
    if not tau > 0.0:
        raise ParameterError(f"driving time tau must be > 0, got {tau}")
    if quad is None:
        quad = QuadratureConfig.from_config()
    result = trajectory_qsl(dephasing_trajectory(p, s0), s0, tau, quad)
    if not p.is_zero_temperature:
        return result
    closed = 0.0 if result.degenerate else dephasing_closed_form(p, s0, tau, quad)
    log_disagreement(f"dephasing bound (eta={p.eta}, s={p.s}, tau={tau})",
                     closed, result.tau_qsl_op)
    return result.with_closed_form(closed)


def dephasing_qsl_pure(p: DephasingParams, beta: float, tau: float,
                       quad: Optional[QuadratureConfig] = None) -> float:
    """Bound for the pure state beta|1> + sqrt(1 - beta^2)|0>.

    Its l1 coherence is C = 2·beta·sqrt(1 - beta^2).
    """
    if not 0.0 <= beta <= 1.0:
        raise ParameterError(f"beta must lie in [0, 1], got {beta}")
    if not tau > 0.0:
        raise ParameterError(f"driving time tau must be > 0, got {tau}")
    _require_zero_temperature(p, "dephasing_qsl_pure")
    if quad is None:
        quad = QuadratureConfig.from_config()
    coherence = 2.0 * beta * math.sqrt(1.0 - beta * beta)
    return _closed_form_from_coherence(p, coherence, tau, quad)
