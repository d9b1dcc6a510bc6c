"""Seeded invariant checks backing ``quasih verify``.

Every check draws its own random inputs from a Philox stream keyed by the
seed and the check's position, so results do not depend on which subset
of checks runs.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import analytics as an
from . import dynamics as dy
from . import dyson as ds
from . import linalg as la
from . import model as md

SUITES = ("all", "linalg", "model", "dynamics", "analytics", "dyson")


@dataclass(frozen=True)
class CheckResult:
    name: str
    group: str
    passed: bool
    residual: float
    tolerance: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Check:
    name: str
    group: str
    tolerance: float
    run: Callable[[np.random.Generator], float]


def random_params(rng: np.random.Generator, diagonal: bool = True) -> md.ModelParams:
    g = rng.uniform(0.5, 2.0)
    kappa = g * rng.uniform(-0.9, 0.9)
    x1 = rng.uniform(0.5, 2.0)
    x2 = x1 if diagonal else rng.uniform(0.5, 2.0)
    return md.ModelParams(rng.uniform(0.5, 2.0), g, kappa, int(rng.integers(1, 5)), x1, x2)


def random_trajectory(rng: np.random.Generator, params: md.ModelParams | None = None,
                      w: md.Unitary2 | None = None) -> dy.Trajectory:
    p = params or random_params(rng)
    if p.diagonal_metric:
        state = dy.StateH1.from_alpha(p, rng.uniform(0.05, 0.95), *rng.uniform(0, 2 * math.pi, 2))
    else:
        amp = rng.normal(size=2) + 1j * rng.normal(size=2)
        state = dy.StateH1.normalized(p, amp[0], amp[1])
    return dy.Trajectory(p, state, w or md.random_unitary2(rng=rng))


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (m + m.conj().T)


def random_positive(rng: np.random.Generator) -> np.ndarray:
    m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    return m @ m.conj().T + 0.1 * np.eye(2)


# --------------------------------------------------------------------------
# linalg


def _eig_reconstruction(rng):
    worst = 0.0
    for n in (2, 2, 4):
        for _ in range(50):
            m = random_hermitian(rng, n)
            vals, vecs = la.herm_eig(m)
            worst = max(worst, la.max_norm(vecs @ np.diag(vals) @ vecs.conj().T - m),
                        la.max_norm(vecs.conj().T @ vecs - np.eye(n)))
    return worst


def _sqrt_square(rng):
    worst = 0.0
    for _ in range(100):
        m = random_positive(rng)
        s = la.psd_sqrt(m)
        worst = max(worst, la.max_norm(s @ s - m) / la.max_norm(m), la.max_norm(s - s.conj().T))
    return worst


def _expm_unitary(rng):
    worst = 0.0
    for _ in range(50):
        a = random_hermitian(rng, 2)
        t, s = rng.uniform(-3, 3, 2)
        u = la.expm_oracle(a, t)
        worst = max(worst, la.max_norm(u @ u.conj().T - np.eye(2)),
                    la.max_norm(la.expm_oracle(a, t + s) - u @ la.expm_oracle(a, s)))
    return worst


# --------------------------------------------------------------------------
# model


def _quasi_hermiticity(rng):
    worst = 0.0
    for _ in range(100):
        p = random_params(rng, diagonal=False)
        eta = md.metric(p).matrix
        worst = max(worst, md.quasi_hermiticity_residual(p, eta) / la.max_norm(eta))
    return worst


def _metric_positive(rng):
    worst = -math.inf
    for _ in range(100):
        vals, _ = la.herm_eig(md.metric(random_params(rng, diagonal=False)).matrix)
        worst = max(worst, -vals[0])
    return worst, worst < 0


def _metric_from_bi_system(rng):
    worst = 0.0
    for _ in range(100):
        p = random_params(rng, diagonal=False)
        worst = max(worst, la.max_norm(md.metric_from_bi_system(p) - md.metric(p).matrix))
    return worst


def _counterpart_spectrum(rng):
    worst = 0.0
    for _ in range(100):
        p = random_params(rng)
        h = md.hermitian_counterpart(p, md.random_unitary2(rng=rng))
        vals, _ = la.herm_eig(0.5 * (h + h.conj().T))
        worst = max(worst, la.max_norm(h - h.conj().T),
                    abs(vals[0] - p.omega_minus), abs(vals[1] - p.omega_plus))
    return worst


# --------------------------------------------------------------------------
# dynamics


def _norm_conservation(rng):
    worst = 0.0
    for _ in range(100):
        traj = random_trajectory(rng, random_params(rng, diagonal=False))
        ts = np.linspace(0.0, 20.0, 200)
        worst = max(worst, float(np.max(np.abs(dy.eta_norm_t(traj, ts) - 1.0))))
    return worst


def _evolution_oracle(rng):
    worst = 0.0
    for _ in range(50):
        traj = random_trajectory(rng)
        h1 = md.build_h1(traj.params)
        for t in rng.uniform(0, 10, 4):
            ref = la.expm_oracle(h1, t) @ np.array([traj.A, traj.B])
            worst = max(worst, la.max_norm(dy.psi(traj, t) - ref))
    return worst


def _population_closed_forms(rng):
    worst = 0.0
    ts = np.linspace(0.0, 10.0, 257)
    for _ in range(100):
        traj = random_trajectory(rng)
        worst = max(worst,
                    float(np.max(np.abs(dy.population_p(traj, ts) - dy.population_p_direct(traj, ts)))),
                    float(np.max(np.abs(dy.population_q(traj, ts) - dy.population_q_direct(traj, ts)))))
    return worst


def _population_bounds(rng):
    worst = 0.0
    ts = np.linspace(0.0, 10.0, 513)
    for _ in range(100):
        traj = random_trajectory(rng)
        for pop in (dy.population_p(traj, ts), dy.population_q(traj, ts)):
            worst = max(worst, float(np.max(-pop)), float(np.max(pop - 1.0)))
    return max(worst, 0.0)


def _time_averages(rng):
    worst = 0.0
    for _ in range(20):
        traj = random_trajectory(rng)
        period = traj.population_period
        for fn, mean in ((dy.population_p, dy.mean_p(traj)), (dy.population_q, dy.mean_q(traj))):
            avg = la.period_average(lambda ts: fn(traj, ts), period)
            worst = max(worst, abs(float(avg) - mean))
    return worst


def _q_limits(rng):
    worst = 0.0
    ts = np.linspace(0.0, 10.0, 129)
    for _ in range(50):
        base = random_trajectory(rng)
        diag = base.with_unitary(md.Unitary2.diagonal(*rng.uniform(0, 2 * math.pi, 2)))
        anti = base.with_unitary(md.Unitary2.antidiagonal(*rng.uniform(0, 2 * math.pi, 2)))
        p = dy.population_p(base, ts)
        worst = max(worst, float(np.max(np.abs(dy.population_q(diag, ts) - p))),
                    float(np.max(np.abs(dy.population_q(anti, ts) - (1 - p)))))
    return worst


# --------------------------------------------------------------------------
# analytics


def _period_doubling(rng):
    # the doubled period must come from the physical q(t), so the closed form is
    # checked against |c gamma + d delta|^2 on the same grid
    worst = 0.0
    for _ in range(20):
        p = random_params(rng)
        w = md.Unitary2.real_cd(rng.uniform(0.1, 0.9))
        traj = random_trajectory(rng, p, w)
        while not dy.period_doubling_expected(traj):
            traj = random_trajectory(rng, p, w)
        nh = an.estimate_period(an.entropy_curve(traj, an.Side.NON_HERMITIAN))
        he = an.estimate_period(an.entropy_curve(traj, an.Side.HERMITIAN))
        ts = an.entropy_curve(traj, an.Side.HERMITIAN).times
        consistency = float(np.max(np.abs(dy.population_q(traj, ts) - dy.population_q_direct(traj, ts))))
        worst = max(worst, abs(he.period / nh.period - 2.0), consistency)
    return worst


def _entropy_equalities(rng):
    worst = 0.0
    for _ in range(30):
        base = random_trajectory(rng)
        for w in (md.Unitary2.diagonal(*rng.uniform(0, 6, 2)), md.Unitary2.antidiagonal(*rng.uniform(0, 6, 2))):
            worst = max(worst, an.max_entropy_gap(base.with_unitary(w), samples=513))
    return worst


def _averaged_state(rng):
    worst = 0.0
    for _ in range(10):
        traj = random_trajectory(rng)
        quad = an.averaged_state_quadrature(traj, panels=512)
        worst = max(worst, la.max_norm(quad - an.averaged_state(traj).matrix))
    return worst


def _concurrence_oracle(rng):
    worst = 0.0
    for _ in range(100):
        avg = an.averaged_state(random_trajectory(rng))
        worst = max(worst, abs(an.concurrence(avg) - an.wootters_concurrence(avg.embedded)))
    return worst


def _splitting_invariance(rng):
    worst = 0.0
    for _ in range(50):
        base = random_trajectory(rng)
        ref = 2.0 * base.params.x * abs(base.ab.real)
        for _ in range(5):
            avg = an.averaged_state(base.with_unitary(md.random_unitary2(rng=rng)))
            worst = max(worst, abs(an.eigenvalue_splitting(avg) - ref), abs(an.footnote_shortcut(avg) - ref))
    return worst


def _disentanglement_roots(rng):
    worst = 0.0
    hits = 0
    for _ in range(50):
        p = random_params(rng)
        # Re(A B*) = 0 makes both amplitudes vanish periodically
        state = dy.StateH1.from_alpha(p, rng.uniform(0.05, 0.95), 0.0, math.pi / 2)
        traj = dy.Trajectory(p, state, md.random_unitary2(rng=rng))
        for side in an.Side:
            dt = an.disentanglement_times(traj, side)
            hits += dt.times.size
            for t in dt.times:
                a, b = an.side_amplitudes(traj, side, t)
                worst = max(worst, abs(a * b))
    return worst, worst <= an.TAU_ENT * 10 and hits > 0


def _disentangling_w(rng):
    worst = 0.0
    for _ in range(50):
        traj = random_trajectory(rng)
        fixed = traj.with_unitary(an.disentangling_W(traj))
        a, b = an.side_amplitudes(fixed, an.Side.HERMITIAN, 0.0)
        worst = max(worst, abs(a))
    return worst


def _metric_factorization(rng):
    worst = 0.0
    for _ in range(50):
        fac = an.factor_metric(md.metric(random_params(rng)))
        worst = max(worst, fac.leakage, fac.restriction_error)
    return worst


# --------------------------------------------------------------------------
# dyson


def _eta_flow_positive(rng):
    worst = -math.inf
    p = random_params(rng)
    for _ in range(100):
        flow = ds.MetricFlow(random_positive(rng), p)
        worst = max(worst, -ds.min_eigenvalue(flow, np.linspace(0.0, 10.0, 21)))
    return worst, worst < 0


def _eta_flow_equation(rng):
    worst = 0.0
    for _ in range(10):
        flow = ds.MetricFlow(random_positive(rng), random_params(rng))
        for t in rng.uniform(0, 5, 3):
            worst = max(worst, ds.flow_residual(flow, t))
    return worst


def _dyson_demo(choice):
    def run(rng):
        rep = ds.dyson_demo(choice, samples=11)
        return max(rep.max_deviation, rep.max_hermiticity_defect)
    return run


def _round_trip(rng):
    flow = ds.MetricFlow(random_positive(rng), random_params(rng))
    path = ds.solve_w_ode(ds.demo_generator, 1.2, 1e-2)
    psi0 = rng.normal(size=2) + 1j * rng.normal(size=2)
    return ds.round_trip_error(flow, path, psi0 / np.linalg.norm(psi0), 1.0)


def _rk4_order(rng):
    ratio = ds.step_halving_ratio(ds.demo_generator, 2.0, 0.1)
    return abs(ratio - 16.0), 12.0 <= ratio <= 20.0


CHECKS: tuple[Check, ...] = (
    Check("eig_reconstruction", "linalg", la.TAU_EIG * 10, _eig_reconstruction),
    Check("sqrt_square", "linalg", la.TAU_EIG * 10, _sqrt_square),
    Check("expm_unitary_group", "linalg", la.TAU_EXP, _expm_unitary),
    Check("quasi_hermiticity", "model", la.TAU_HERM * 10, _quasi_hermiticity),
    Check("metric_positive", "model", 0.0, _metric_positive),
    Check("metric_from_bi_system", "model", la.TAU_EIG * 10, _metric_from_bi_system),
    Check("counterpart_spectrum", "model", la.TAU_EIG * 10, _counterpart_spectrum),
    Check("norm_conservation", "dynamics", dy.TAU_NORM, _norm_conservation),
    Check("evolution_oracle", "dynamics", la.TAU_EXP, _evolution_oracle),
    Check("population_closed_forms", "dynamics", dy.TAU_NORM, _population_closed_forms),
    Check("population_bounds", "dynamics", dy.TAU_NORM, _population_bounds),
    Check("time_averages", "dynamics", dy.TAU_QUAD, _time_averages),
    Check("q_limits", "dynamics", dy.TAU_NORM, _q_limits),
    Check("period_doubling", "analytics", 1e-6, _period_doubling),
    Check("entropy_equalities", "analytics", dy.TAU_NORM, _entropy_equalities),
    Check("averaged_state", "analytics", dy.TAU_QUAD, _averaged_state),
    Check("concurrence_oracle", "analytics", 1e-8, _concurrence_oracle),
    Check("splitting_invariance", "analytics", 1e-10, _splitting_invariance),
    Check("disentanglement_roots", "analytics", an.TAU_ENT * 10, _disentanglement_roots),
    Check("disentangling_w", "analytics", 1e-12, _disentangling_w),
    Check("metric_factorization", "analytics", la.TAU_EIG, _metric_factorization),
    Check("eta_flow_positive", "dyson", 0.0, _eta_flow_positive),
    Check("eta_flow_equation", "dyson", ds.TAU_FD, _eta_flow_equation),
    Check("demo_h_zero", "dyson", 1e-6, _dyson_demo("h_zero")),
    Check("demo_constant_A", "dyson", 1e-6, _dyson_demo("constant_A")),
    Check("demo_time_dep_A", "dyson", 1e-6, _dyson_demo("time_dep_A")),
    Check("round_trip", "dyson", 10 * ds.TAU_ODE, _round_trip),
    Check("rk4_order", "dyson", 4.0, _rk4_order),
)


def run_check(check: Check, seed: int) -> CheckResult:
    index = CHECKS.index(check) if check in CHECKS else 0
    rng = np.random.Generator(np.random.Philox(key=[seed, index]))
    out = check.run(rng)
    if isinstance(out, tuple):
        residual, passed = out
    else:
        residual = out
        passed = residual <= check.tolerance
    return CheckResult(check.name, check.group, bool(passed), float(residual), check.tolerance)


def run_suite(suite: str = "all", seed: int = 0) -> list[CheckResult]:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    return [run_check(c, seed) for c in CHECKS if suite == "all" or c.group == suite]
