# Copyright (c) 2024 qslkit developers
# SPDX-License-Identifier: Zlib

"""Cross-module consistency checks.

Every check compares two independent computations (analytic state against
a Runge-Kutta oracle, closed form against the generic pipeline, reduction
formulas against the general ones, ...) and reports the worst deviation.
"""

from __future__ import annotations

__all__ = ('CHECK_NAMES', 'CheckResult', 'VerifyOptions', 'run_checks')

from typing import Callable, Dict, List, Optional, Sequence
from dataclasses import dataclass, field
import io
import logging
import math

import numpy as np

from ._exceptions import QslError, ParameterError
from .qubit import BlochState, bloch_to_density, norms, singular_values_2x2
from .engine import QuadratureConfig, derivative_bound_check, evolve_numeric
from . import jc
from . import dephasing as dp
from .scan import Axis, ScanGrid, ScanModel, run_scan, emit_csv

log = logging.getLogger(__name__)

_JC_GAMMA0 = (1.0, 5.0, 7.5, 20.0, 40.0)
_JC_TAUS   = (0.2, 1.0, 3.0)
_JC_STATES = ((0.6, 0.0, 0.0), (0.6, 0.0, 0.6), (0.0, 0.0, 1.0),
              (0.5, 0.5, -0.3), (0.8, 0.0, -0.6))
_DP_S      = (0.5, 1.0, 1.5, 2.0, 3.0)
_DP_ETA    = (0.5, 1.0)
_DP_TAUS   = (0.5, 1.0, 2.0)
_DP_TIMES  = (0.1, 0.5, 1.0, 2.0, 5.0)
_LAMBDA    = 15.0


@dataclass(frozen=True)
class CheckResult:

    name: str
    passed: bool
    worst: float
    tol: float
    detail: str = ""


@dataclass(frozen=True)
class VerifyOptions:
    """Knobs shared by the checks; ``None`` keeps each check's own default."""

    seed: int = 20190101
    samples: Optional[int] = None
    model: Optional[str] = None
    gamma0: Optional[float] = None
    lam: float = _LAMBDA
    steps: int = 10000
    quad: QuadratureConfig = field(default_factory=QuadratureConfig)

    def wants(self, model: str) -> bool:
        return self.model is None or self.model == model


def _rel(a: float, b: float, floor: float = 1e-12) -> float:
    return abs(a - b) / max(abs(a), abs(b), floor)


def _result(name: str, worst: float, tol: float, detail: str) -> CheckResult:
    return CheckResult(name=name, passed=bool(worst <= tol), worst=float(worst),
                       tol=tol, detail=detail)


def check_oracle_jc(opts: VerifyOptions) -> CheckResult:
    """Analytic JC states against the pseudomode oracle, closed form against the pipeline."""
    worst_state = worst_bound = 0.0
    for gamma0 in _JC_GAMMA0:
        p = jc.JcParams(lam=opts.lam, gamma0=gamma0)
        for tau in _JC_TAUS:
            for rx, ry, rz in _JC_STATES:
                s0 = BlochState(rx, ry, rz)
                oracle = jc.jc_pseudomode_oracle(p, s0, tau, opts.steps)
                exact = jc.jc_state_at(p, s0, tau)
                worst_state = max(worst_state, float(np.max(np.abs(oracle - exact))))
                result = jc.jc_qsl(p, s0, tau, opts.quad)
                worst_bound = max(worst_bound, _rel(result.tau_qsl_closed, result.tau_qsl_op))
    worst = max(worst_state / 1e-7, worst_bound / 1e-6)
    return _result("oracle-jc", worst, 1.0,
                   f"state deviation {worst_state:.3g} (tol 1e-7), "
                   f"closed-form deviation {worst_bound:.3g} (tol 1e-6)")


def check_oracle_dephasing(opts: VerifyOptions) -> CheckResult:
    """Closed-form dephasing factor, rate and bound against quadrature and Runge-Kutta."""
    worst_gamma = worst_rate = worst_bound = worst_state = 0.0
    for s in _DP_S:
        for eta in _DP_ETA:
            p = dp.DephasingParams(eta=eta, s=s)
            for tau in _DP_TAUS:
                analytic = dp.big_gamma_analytic(p, tau)
                numeric = dp.big_gamma_numeric(p, tau)
                worst_gamma = max(worst_gamma, abs(analytic - numeric) / max(1.0, abs(analytic)))
                for s0 in (BlochState(0.8, 0.0, 0.0), BlochState(0.6, 0.0, 0.6)):
                    result = dp.dephasing_qsl(p, s0, tau, opts.quad)
                    worst_bound = max(worst_bound,
                                      _rel(result.tau_qsl_closed, result.tau_qsl_op))
            for t in _DP_TIMES:
                delta = 1e-5 * t
                fd = (dp.big_gamma_analytic(p, t + delta)
                      - dp.big_gamma_analytic(p, t - delta)) / (2.0 * delta)
                rate = dp.dephasing_gamma_t(p, t)
                worst_rate = max(worst_rate, abs(fd - rate) / max(1.0, abs(rate)))
            s0 = BlochState(0.8, 0.0, 0.0)
            rho = evolve_numeric(dp.dephasing_lindblad_rule(p), bloch_to_density(s0),
                                 1.0, opts.steps)
            exact = dp.dephasing_state_at(p, s0, 1.0)
            worst_state = max(worst_state, float(np.max(np.abs(rho - exact))))
    worst = max(worst_gamma / 1e-6, worst_rate / 1e-7,
                worst_bound / 1e-6, worst_state / 1e-8)
    return _result("oracle-dephasing", worst, 1.0,
                   f"Gamma deviation {worst_gamma:.3g} (tol 1e-6), "
                   f"rate deviation {worst_rate:.3g} (tol 1e-7), "
                   f"closed-form deviation {worst_bound:.3g} (tol 1e-6), "
                   f"Runge-Kutta deviation {worst_state:.3g} (tol 1e-8)")


def check_norm_ordering(opts: VerifyOptions) -> CheckResult:
    """tr >= hs >= op on random complex matrices, against an eigenvalue oracle."""
    n = opts.samples or 10000
    rng = np.random.default_rng(opts.seed)
    m = rng.normal(size=(n, 2, 2)) + 1j * rng.normal(size=(n, 2, 2))
    op, hs, tr = norms(m)
    ordering = float(np.max(np.maximum(op - hs, hs - tr) / tr))
    s1, s2 = singular_values_2x2(m)
    eig = np.sqrt(np.clip(np.linalg.eigvalsh(np.conj(np.swapaxes(m, -1, -2)) @ m),
                          0.0, None))[..., ::-1]
    oracle = float(np.max(np.abs(np.stack([s1, s2], axis=-1) - eig)) / np.max(eig[..., 0]))
    # von Neumann trace inequality on a random state and observable
    vn = 0.0
    for _ in range(min(n, 1000)):
        r = rng.normal(size=3)
        r *= rng.uniform() / np.linalg.norm(r)
        rho0 = bloch_to_density(BlochState(*r))
        h = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        h = h + h.conj().T
        p1, p2 = singular_values_2x2(rho0)
        l1, l2 = singular_values_2x2(h)
        lhs = abs(np.trace(rho0 @ h))
        vn = max(vn, lhs - (p1 * l1 + p2 * l2), (p1 * l1 + p2 * l2) - l1)
    worst = max(ordering / 1e-12, oracle / 1e-10, vn / 1e-12, 0.0)
    return _result("norm-ordering", worst, 1.0,
                   f"{n} matrices: ordering slack {ordering:.3g}, "
                   f"eigenvalue-oracle deviation {oracle:.3g}, "
                   f"von Neumann slack {vn:.3g}")


def _bound_slack(result, tau: float) -> float:
    over = result.tau_qsl_unified / tau - 1.0
    order = max(result.tau_qsl_hs - result.tau_qsl_op,
                result.tau_qsl_tr - result.tau_qsl_hs,
                abs(result.tau_qsl_unified - result.tau_qsl_op)) / tau
    return max(over / 1e-6, order / 1e-12, 0.0)


def _random_state(rng) -> BlochState:
    r = rng.normal(size=3)
    r *= rng.uniform() ** (1.0 / 3.0) / np.linalg.norm(r)
    return BlochState(*r)


def check_bound_validity(opts: VerifyOptions) -> CheckResult:
    """tau_qsl <= tau and op >= hs >= tr on the oracle grids and random draws."""
    n = opts.samples or 1000
    rng = np.random.default_rng(opts.seed)
    worst = 0.0
    count = 0
    if opts.wants("jc"):
        for gamma0 in _JC_GAMMA0:
            p = jc.JcParams(lam=opts.lam, gamma0=gamma0)
            for tau in _JC_TAUS:
                for rx, ry, rz in _JC_STATES:
                    worst = max(worst, _bound_slack(jc.jc_qsl(p, BlochState(rx, ry, rz),
                                                              tau, opts.quad), tau))
                    count += 1
    if opts.wants("dephasing"):
        for s in _DP_S:
            for eta in _DP_ETA:
                p = dp.DephasingParams(eta=eta, s=s)
                for tau in _DP_TAUS:
                    result = dp.dephasing_qsl(p, BlochState(0.8, 0.0, 0.0), tau, opts.quad)
                    worst = max(worst, _bound_slack(result, tau))
                    count += 1
    for k in range(n):
        tau = rng.uniform(0.1, 3.0)
        s0 = _random_state(rng)
        use_jc = opts.wants("jc") and (k % 2 == 0 or not opts.wants("dephasing"))
        if use_jc:
            p = jc.JcParams(lam=rng.uniform(1.0, 30.0), gamma0=rng.uniform(0.5, 50.0))
            result = jc.jc_qsl(p, s0, tau, opts.quad)
        else:
            p = dp.DephasingParams(eta=rng.uniform(0.1, 2.0), s=rng.uniform(0.3, 4.0))
            result = dp.dephasing_qsl(p, s0, tau, opts.quad)
        worst = max(worst, _bound_slack(result, tau))
        count += 1
    return _result("bound-validity", worst, 1.0,
                   f"{count} evaluations, worst scaled slack {worst:.3g} "
                   f"(tau_qsl/tau - 1 against 1e-6, ordering against 1e-12)")


def check_derivative_bound(opts: VerifyOptions) -> CheckResult:
    """Sampled derivative inequality along JC and dephasing trajectories."""
    samples = opts.samples or 50
    worst = 0.0
    cases = []
    if opts.wants("jc"):
        for gamma0 in ((opts.gamma0,) if opts.gamma0 is not None else (5.0, 40.0)):
            p = jc.JcParams(lam=opts.lam, gamma0=gamma0)
            cases.append((f"jc gamma0={gamma0:g}", jc.jc_trajectory(p, BlochState(0.6, 0.0, 0.6)),
                          BlochState(0.6, 0.0, 0.6), 1.0))
    if opts.wants("dephasing"):
        p = dp.DephasingParams(eta=1.0, s=1.0)
        s0 = BlochState(1.0, 0.0, 0.0)
        cases.append(("dephasing s=1", dp.dephasing_trajectory(p, s0), s0, 2.0))
    details = []
    for label, traj, s0, tau in cases:
        report = derivative_bound_check(traj, s0, tau, samples=samples)
        worst = max(worst, report.worst)
        details.append(f"{label}: {report.worst:.3g}")
    return _result("derivative-bound", worst, 1e-6,
                   f"{samples} samples per trajectory; " + ", ".join(details))


def check_pure_reductions(opts: VerifyOptions) -> CheckResult:
    """Pure-state bound formulas against the general closed forms."""
    worst = 0.0
    tau = 1.0
    for gamma0 in (5.0, 40.0):
        p = jc.JcParams(lam=opts.lam, gamma0=gamma0)
        for alpha in (0.0, 0.25, 1.0 / math.sqrt(2.0), 1.0):
            coherence = 2.0 * alpha * math.sqrt(1.0 - alpha * alpha)
            s0 = BlochState.from_coherence(coherence, 2.0 * alpha * alpha - 1.0)
            pure = jc.jc_qsl_pure(p, alpha, tau, opts.quad)
            general = jc.jc_closed_form(p, s0, tau, opts.quad)
            worst = max(worst, _rel(pure, general, floor=1e-14))
    p = dp.DephasingParams(eta=1.0, s=2.0)
    for beta in (0.0, 0.5, 1.0 / math.sqrt(2.0), 1.0):
        coherence = 2.0 * beta * math.sqrt(1.0 - beta * beta)
        s0 = BlochState.from_coherence(coherence, 2.0 * beta * beta - 1.0)
        pure = dp.dephasing_qsl_pure(p, beta, tau, opts.quad)
        general = dp.dephasing_closed_form(p, s0, tau, opts.quad)
        worst = max(worst, _rel(pure, general, floor=1e-14))
    return _result("pure-reductions", worst, 1e-10,
                   f"worst relative deviation {worst:.3g}")


def check_factorization(opts: VerifyOptions) -> CheckResult:
    """Dephasing bound is proportional to the coherence and blind to the population."""
    worst_linear = worst_pop = 0.0
    tau = 1.0
    for s in (1.0, 2.0, 3.0):
        p = dp.DephasingParams(eta=1.0, s=s)
        unit = dp.dephasing_qsl(p, BlochState(1.0, 0.0, 0.0), tau, opts.quad).tau_qsl_unified
        for coherence in (0.2, 0.5, 0.8):
            value = dp.dephasing_qsl(p, BlochState(coherence, 0.0, 0.0), tau,
                                     opts.quad).tau_qsl_unified
            worst_linear = max(worst_linear, _rel(value / coherence, unit))
        base = dp.dephasing_qsl(p, BlochState(0.6, 0.0, 0.0), tau, opts.quad).tau_qsl_unified
        for rz in (-0.5, 0.3, 0.6, 0.8):
            value = dp.dephasing_qsl(p, BlochState(0.6, 0.0, rz), tau,
                                     opts.quad).tau_qsl_unified
            worst_pop = max(worst_pop, _rel(value, base))
    worst = max(worst_linear, worst_pop)
    return _result("factorization", worst, 1e-12,
                   f"linearity in C {worst_linear:.3g}, population dependence {worst_pop:.3g}")


def check_special_values(opts: VerifyOptions) -> CheckResult:
    """Known values of the gamma function, the dephasing factor and JC branch seams."""
    checks = []
    checks.append(_rel(dp.gamma_function(1.0), 1.0) / 1e-12)
    checks.append(_rel(dp.gamma_function(0.5), math.sqrt(math.pi)) / 1e-12)
    checks.append(_rel(dp.gamma_function(-0.5), -2.0 * math.sqrt(math.pi)) / 1e-12)
    p2 = dp.DephasingParams(eta=1.0, s=2.0)
    for tau in (0.5, 1.0, 2.0):
        checks.append(abs(dp.big_gamma_analytic(p2, tau) - tau * tau / (1.0 + tau * tau)) / 1e-10)
    seam = dp.big_gamma_analytic(dp.DephasingParams(eta=1.0, s=1.0), 1.0)
    for s in (1.0 - 1e-6, 1.0 + 1e-6, 1.0 - 2e-6, 1.0 + 2e-6):
        checks.append(abs(dp.big_gamma_analytic(dp.DephasingParams(eta=1.0, s=s), 1.0)
                          - seam) / 1e-4)
    critical = jc.JcParams(lam=_LAMBDA, gamma0=_LAMBDA / 2.0)
    s0 = BlochState(0.6, 0.0, 0.6)
    at = jc.jc_qsl(critical, s0, 1.0, opts.quad).tau_qsl_unified
    for factor in (1.0 - 1e-6, 1.0 + 1e-6):
        p = jc.JcParams(lam=_LAMBDA, gamma0=factor * _LAMBDA / 2.0)
        checks.append(abs(jc.jc_qsl(p, s0, 1.0, opts.quad).tau_qsl_unified - at) / 1e-4)
        t = np.linspace(0.0, 1.0, 11)
        checks.append(float(np.max(np.abs(jc.q_of_t(p, t) - jc.q_of_t(critical, t)))) / 1e-4)
    worst = max(checks)
    return _result("special-values", worst, 1.0,
                   f"{len(checks)} values, worst scaled deviation {worst:.3g}")


def check_determinism(opts: VerifyOptions) -> CheckResult:
    """Byte-identical CSV across repeated and differently parallelized scans."""
    grid = ScanGrid(ScanModel.JC, Axis("coherence", 0.0, 1.0, 4), Axis("gamma0", 1.0, 40.0, 3),
                    fixed=dict(sz=0.0, tau=1.0, **{"lambda": opts.lam}))
    outputs = []
    for threads in (1, 1, 2):
        buffer = io.BytesIO()
        emit_csv(run_scan(grid, opts.quad, threads=threads), buffer)
        outputs.append(buffer.getvalue())
    differing = sum(1 for out in outputs[1:] if out != outputs[0])
    return _result("determinism", float(differing), 0.0,
                   f"{len(outputs)} runs, {differing} differing from the first")


_CHECKS: Dict[str, Callable[[VerifyOptions], CheckResult]] = {
    "oracle-jc":        check_oracle_jc,
    "oracle-dephasing": check_oracle_dephasing,
    "norm-ordering":    check_norm_ordering,
    "bound-validity":   check_bound_validity,
    "derivative-bound": check_derivative_bound,
    "pure-reductions":  check_pure_reductions,
    "factorization":    check_factorization,
    "special-values":   check_special_values,
    "determinism":      check_determinism,
}

CHECK_NAMES = tuple(_CHECKS)


def run_checks(names: Optional[Sequence[str]] = None,
               options: Optional[VerifyOptions] = None) -> List[CheckResult]:
    """Run the named checks (all by default); failures are reported, not raised."""
    options = options or VerifyOptions()
    names = list(CHECK_NAMES if not names or "all" in names else names)
    for name in names:
        if name not in _CHECKS:
            raise ParameterError(f"unknown check {name!r} "
                                 f"(choose from all, {', '.join(CHECK_NAMES)})")
    results = []
    for name in names:
        log.info("running check %s (seed %d)", name, options.seed)
        try:
            result = _CHECKS[name](options)
        except QslError as exc:
            worst = getattr(exc, "worst", None) or getattr(exc, "achieved", None)
            result = CheckResult(name=name, passed=False,
                                 worst=math.inf if worst is None else float(worst),
                                 tol=0.0, detail=str(exc))
        if not result.passed:
            log.warning("check %s failed: %s", name, result.detail)
        results.append(result)
    return results
