"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import math
import time

import numpy as np
import pytest

from quasih import analytics as an
from quasih import dynamics as dy
from quasih import dyson as ds
from quasih import linalg as la
from quasih import model as md
from quasih.verify import random_params, random_positive, random_trajectory


def philox(seed):
    return np.random.Generator(np.random.Philox(key=[seed, 7]))


def period_ratio(traj):
    nh = an.estimate_period(an.entropy_curve(traj, an.Side.NON_HERMITIAN))
    he = an.estimate_period(an.entropy_curve(traj, an.Side.HERMITIAN))
    return he.period / nh.period


def test_criterion_1_period_doubling(acceptance):
    p = md.ModelParams(nu=1.0, g=1.0, kappa=0.6, n_bath=1)
    w = md.Unitary2.real_cd(0.5)
    ratios, times = [], []
    for alpha in (0.15, 0.3, 0.45):
        start = time.perf_counter()
        ratios.append(period_ratio(dy.Trajectory(p, dy.StateH1.from_alpha(p, alpha), w)))
        times.append(time.perf_counter() - start)
    plain = [
        dy.Trajectory(p, dy.StateH1.from_alpha(p, 0.3), md.Unitary2.real_cd(0.0)),
        dy.Trajectory(p, dy.StateH1.from_alpha(p, 0.3, 0.0, math.pi / 2), w),
        dy.Trajectory(p, dy.StateH1.from_alpha(p, 0.0), w),
    ]
    assert not any(dy.period_doubling_expected(t) for t in plain)
    plain_ratios = [period_ratio(t) for t in plain]
    dev2 = max(abs(r / 2 - 1) for r in ratios)
    dev1 = max(abs(r - 1) for r in plain_ratios)
    ok = dev2 <= 1e-4 and dev1 <= 1e-4 and max(times) < 1.0
    assert acceptance(1, ok, f"ratio dev {dev2:.1e}, unit-ratio dev {dev1:.1e}, slowest {max(times):.3f} s")


def test_criterion_2_mean_populations(acceptance):
    rng = philox(2)
    dev_p = dev_q = 0.0
    for _ in range(100):
        traj = random_trajectory(rng)
        period = traj.population_period
        avg_p = la.period_average(lambda ts: dy.population_p_direct(traj, ts), period)
        avg_q = la.period_average(lambda ts: dy.population_q_direct(traj, ts), period)
        q0 = 0.5 + 2 * traj.params.x * traj.ab.real * traj.cd.real
        dev_p = max(dev_p, abs(float(avg_p) - 0.5))
        dev_q = max(dev_q, abs(float(avg_q) - q0))
    assert acceptance(2, dev_p <= 1e-8 and dev_q <= 1e-8, f"p dev {dev_p:.1e}, q dev {dev_q:.1e}")


def _oracle_states(h1, psi0, period, panels):
    # exp(-i t H1) psi0 on a uniform grid, stepping with one matrix exponential
    step = la.expm_oracle(h1, period / panels)
    out = np.empty((panels + 1, 2), dtype=np.complex128)
    out[0] = psi0
    for k in range(panels):
        out[k + 1] = step @ out[k]
    return out


def test_criterion_3_oracle_equivalence(acceptance):
    rng = philox(3)
    start = time.perf_counter()
    worst = dict(amplitudes=0.0, propagator=0.0, rho_hW=0.0, q=0.0, averaged=0.0)
    for _ in range(100):
        traj = random_trajectory(rng)
        p = traj.params
        h1 = md.build_h1(p)
        psi0 = np.array([traj.A, traj.B])
        s = md.dyson_S(p, traj.w)
        for t in rng.uniform(0.0, 10.0, 3):
            u = la.expm_oracle(h1, t)
            phase = np.exp(-1j * p.nu * t)
            at, bt = dy.evolve_amplitudes(traj, t)
            worst["amplitudes"] = max(worst["amplitudes"], la.max_norm(phase * np.array([at, bt]) - u @ psi0))
            worst["propagator"] = max(worst["propagator"], la.max_norm(md.propagator(p, t) - u))
            phi = s @ u @ psi0
            rho = np.outer(phi, phi.conj())
            worst["rho_hW"] = max(worst["rho_hW"], la.max_norm(dy.rho_hW(traj, t) - rho))
            worst["q"] = max(worst["q"], abs(float(dy.population_q(traj, t)) - rho[1, 1].real))
        panels = 2048
        states = _oracle_states(h1, psi0, traj.population_period, panels) @ s.T
        rhos = states[:, :, None] * states[:, None, :].conj()
        quad = la.period_average(lambda _: rhos, traj.population_period, panels)
        worst["averaged"] = max(worst["averaged"], la.max_norm(an.averaged_state(traj).matrix - quad))
    elapsed = time.perf_counter() - start
    ok = max(worst.values()) <= 1e-8 and elapsed < 10.0
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    assert acceptance(3, ok, f"{detail}, {elapsed:.2f} s")


def test_criterion_4_concurrence_invariance(acceptance):
    # stays red: the averaged coherence is (b c* + a d*) x Re(A B*), which depends on W
    p = md.ModelParams(nu=1.0, g=1.0, kappa=0.6)
    base = dy.Trajectory(p, dy.StateH1.from_alpha(p, 0.3, 0.0, 0.4), md.Unitary2.identity())
    expected = 2 * p.x * abs(base.ab.real)
    rng = philox(4)
    values, splits = [], []
    for _ in range(1000):
        avg = an.averaged_state(base.with_unitary(md.random_unitary2(rng=rng)))
        values.append(an.wootters_concurrence(avg.embedded))
        splits.append(an.eigenvalue_splitting(avg))
    values = np.array(values)
    spread = float(np.ptp(values))
    oracle_dev = float(np.max(np.abs(values - expected)))

    # C = 1 needs Im(A B*) = 0 and |A| = r |B|, i.e. alpha = 1/2 with a real relative phase
    maximal = dy.Trajectory(p, dy.StateH1.from_alpha(p, 0.5), md.Unitary2.identity())
    c_max = [an.wootters_concurrence(an.averaged_state(maximal.with_unitary(md.random_unitary2(rng=rng))).embedded)
             for _ in range(100)]
    separable = dy.Trajectory(p, dy.StateH1.from_alpha(p, 0.3, 0.0, math.pi / 2), md.Unitary2.identity())
    c_min = [an.wootters_concurrence(an.averaged_state(separable.with_unitary(md.random_unitary2(rng=rng))).embedded)
             for _ in range(100)]
    dev_one = max(abs(c - 1.0) for c in c_max)
    dev_zero = max(c_min)
    ok = spread <= 1e-12 and oracle_dev <= 1e-10 and dev_one <= 1e-10 and dev_zero <= 1e-10
    detail = (f"spread {spread:.2e}, |C - 2x|Re AB*|| {oracle_dev:.2e}, |C - 1| {dev_one:.2e}, "
              f"C at Re AB* = 0 {dev_zero:.1e}, eigenvalue splitting spread {np.ptp(splits):.1e}")
    assert acceptance(4, ok, detail)


def test_criterion_5_w_classifier(acceptance):
    rng = philox(5)
    ts = np.linspace(0.0, 10.0, 2049)
    diag_dev = anti_dev = anti_ent = 0.0
    for _ in range(100):
        base = random_trajectory(rng)
        diag = base.with_unitary(md.Unitary2.diagonal(*rng.uniform(0, 2 * math.pi, 2)))
        anti = base.with_unitary(md.Unitary2.antidiagonal(*rng.uniform(0, 2 * math.pi, 2)))
        assert an.classify_W(diag.w).variant is an.WVariant.EQUAL_STATES
        assert an.classify_W(anti.w).variant is an.WVariant.EQUAL_ENTROPIES
        p = dy.population_p(base, ts)
        q_anti = dy.population_q(anti, ts)
        diag_dev = max(diag_dev, float(np.max(np.abs(p - dy.population_q(diag, ts)))))
        anti_dev = max(anti_dev, float(np.max(np.abs(p - (1 - q_anti)))))
        anti_ent = max(anti_ent, float(np.max(np.abs(an.entropy(p) - an.entropy(q_anti)))))
    gaps = []
    for _ in range(100):
        traj = random_trajectory(rng)
        assert an.classify_W(traj.w).variant is an.WVariant.GENERIC
        gaps.append(an.max_entropy_gap(traj))
    ok = max(diag_dev, anti_dev, anti_ent) <= 1e-10 and min(gaps) > 1e-3
    detail = (f"diagonal {diag_dev:.1e}, anti-diagonal {anti_dev:.1e}, entropy {anti_ent:.1e}, "
              f"smallest generic gap {min(gaps):.2e}")
    assert acceptance(5, ok, detail)


def test_criterion_6_metric_pathology(acceptance):
    ts = np.linspace(0.0, 20.0, 2001)
    base = md.ModelParams(nu=1.0, g=1.0, kappa=0.6)
    bad = base.with_metric(2.0, 1.0)
    good = base.with_metric(1.5, 1.5)
    a, b = 0.6, 0.8
    bad_imag = dy.complex_spectrum_scan(dy.Trajectory(bad, dy.StateH1.normalized(bad, a, b)), ts).max_imag
    good_traj = dy.Trajectory(good, dy.StateH1.normalized(good, a, b))
    good_imag = dy.complex_spectrum_scan(good_traj, ts).max_imag
    for t in ts[::100]:
        assert isinstance(dy.reduced_rho_H(good_traj, t), dy.Density2)
    ok = bad_imag > 1e-3 and good_imag <= 1e-12
    assert acceptance(6, ok, f"x1 = 2, x2 = 1: {bad_imag:.3e}; x1 = x2: {good_imag:.1e}")


def test_criterion_7_metric_factorization(acceptance):
    rng = philox(7)
    worst = 0.0
    for _ in range(100):
        fac = an.factor_metric(md.metric(random_params(rng)))
        worst = max(worst, fac.leakage, fac.restriction_error)
    rejected = 0
    for _ in range(100):
        p = random_params(rng, diagonal=False)
        if p.x1 == p.x2:
            continue
        eta = md.metric(p)
        with pytest.raises(an.NotDiagonal):
            an.factor_metric(eta)
        rejected += not an.is_product_metric(eta)
    ok = worst <= 1e-12 and rejected == 100
    assert acceptance(7, ok, f"leakage and restriction {worst:.1e}, non-product detected {rejected}/100")


def test_criterion_8_dyson_demos(acceptance):
    devs = {c: ds.dyson_demo(c).max_deviation for c in ("h_zero", "constant_A", "time_dep_A")}
    ratio = ds.step_halving_ratio(ds.demo_generator, 2.0, 0.1)
    rng = philox(8)
    p = md.ModelParams(nu=1.0, g=1.0, kappa=0.6)
    min_eig = min(ds.min_eigenvalue(ds.MetricFlow(random_positive(rng), p), np.linspace(0.0, 10.0, 101))
                  for _ in range(100))
    ok = (devs["h_zero"] <= 1e-6 and devs["constant_A"] <= 1e-6 and devs["time_dep_A"] <= 1e-7
          and 12.0 <= ratio <= 20.0 and min_eig > 0)
    detail = ", ".join(f"{k} {v:.1e}" for k, v in devs.items())
    assert acceptance(8, ok, f"{detail}, step-halving ratio {ratio:.2f}, min eigenvalue {min_eig:.2e}")


def test_criterion_9_entanglement_timing(acceptance):
    rng = philox(9)
    worst_first = worst_second = 0.0
    counted = 0
    classes_ok = True
    min_ab = math.inf
    for _ in range(50):
        p = random_params(rng)
        traj = dy.Trajectory(p, dy.StateH1.from_alpha(p, 0.0), md.random_unitary2(rng=rng))
        dt = an.disentanglement_times(traj, an.Side.NON_HERMITIAN, 4 * math.pi / traj.omega)
        wt1 = dt.first_zero * traj.omega
        wt2 = dt.second_zero * traj.omega - math.pi / 2
        counted += wt1.size
        worst_first = max(worst_first, float(np.max(np.abs(wt1 - math.pi * np.round(wt1 / math.pi)))))
        worst_second = max(worst_second, float(np.max(np.abs(wt2 - math.pi * np.round(wt2 / math.pi)))))

        real = dy.Trajectory(p, dy.StateH1.from_alpha(p, rng.uniform(0.05, 0.95)), traj.w)
        two = 4 * math.pi / real.omega  # two periods of the amplitudes
        dt = an.disentanglement_times(real, an.Side.NON_HERMITIAN, two)
        classes_ok &= dt.classification is an.EntanglementClass.ALWAYS_ENTANGLED
        at, bt = dy.evolve_amplitudes(real, np.linspace(0.0, two, 4001))
        min_ab = min(min_ab, float(np.min(np.abs(at * bt))))
    ok = worst_first <= 1e-8 and worst_second <= 1e-8 and counted >= 250 and classes_ok and min_ab > 1e-3
    detail = (f"A(t) = 0 times off pi Z by {worst_first:.1e} ({counted} roots), "
              f"B(t) = 0 times off pi/2 + pi Z by {worst_second:.1e}, "
              f"always entangled {classes_ok}, min |A(t)B(t)| {min_ab:.3f}")
    assert acceptance(9, ok, detail)
