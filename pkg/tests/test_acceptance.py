"""Acceptance suite: one test per shipped criterion, each printing a
PASS line with the measured figure of merit (run with `pytest -s`)."""

import json
import math

import mpmath as mp
import numpy as np
import pytest

from padelab import (EquilibriumProblem, InterpolationTable, InvSqrt,
                     MarkovArcsine, NikishinSecond, PrecisionCtx,
                     bridge_classL, bridge_prop1, cheb_coeffs,
                     check_contour_orthogonality, check_power_orthogonality,
                     counting_measure, evaluate, find_roots, frobenius_pade,
                     hp_remainder_coeffs, hp_type1, laurent_coeffs,
                     multipoint_pade, pade_at_infinity, potential_discrepancy,
                     probe_circle, solve_scalar, solve_vector,
                     zeros_on_segment)
from padelab.expcli import ExperimentConfig, run_experiment
from padelab.roots import DiscreteMeasure, read_zeros_csv, trimmed_hausdorff

CTX512 = PrecisionCtx(512)
CTX1024 = PrecisionCtx(1024)


def _report(num, text):
    print(f"[criterion {num:2d}] PASS: {text}")


def test_criterion_1_markov_convergence():
    f = MarkovArcsine(2, 3)
    tol_pole = mp.mpf(10) ** -20
    errors = {}
    tail = laurent_coeffs(f, 2 * 24 + 2, CTX512)
    with CTX512.workprec():
        f0 = evaluate(f, 0, CTX512)
    for n in range(4, 25):
        pair = pade_at_infinity(tail, n, CTX512)
        zq = find_roots(pair.q)
        assert len(zq.points) == n
        for z in zq.points:
            assert abs(z.imag) <= tol_pole
            assert 2 - tol_pole <= z.real <= 3 + tol_pole
        with CTX512.workprec():
            errors[n] = abs(f0 - pair(mp.mpf(0)))
    with CTX512.workprec():
        ratios = [errors[n + 1] / errors[n] for n in range(12, 24)]
        spread = float(max(ratios) / min(ratios)) - 1
    assert spread < 0.10
    _report(1, f"poles real in [2,3] for n=4..24; error-ratio spread "
               f"{spread:.2%} < 10%")


def test_criterion_2_power_orthogonality():
    f = MarkovArcsine(2, 3)
    tail = laurent_coeffs(f, 2 * 20 + 2, CTX512)
    worst = mp.mpf(0)
    for n in range(1, 21):
        pair = pade_at_infinity(tail, n, CTX512)
        rep = check_power_orthogonality(pair.q, (2, 3), n, CTX512)
        with CTX512.workprec():
            worst = max(worst, rep.max_abs / rep.scale)
        assert rep.max_abs <= mp.mpf(10) ** -30 * rep.scale
    _report(2, f"max normalized moment {mp.nstr(worst, 3)} <= 1e-30 "
               f"for n <= 20")


def test_criterion_3_hp_defect():
    # scale for the defect bounds: the remainder tail's own magnitude
    # (max |coefficient| over indices 1..3n+2); the raw coefficients decay
    # like exp(-c n) so a fixed data scale would be meaningless
    K = 3 * 15 + 2
    f1 = laurent_coeffs(InvSqrt(), K, CTX512)
    f2 = NikishinSecond(2, 3).moment_tail(K, CTX512)
    worst_zero, worst_sig = mp.mpf(0), mp.mpf("inf")
    for n in range(1, 16):
        trip = hp_type1(f1, f2, n, CTX512)
        rem = hp_remainder_coeffs(trip, f1, f2, min(3 * n + 2, K - n))
        with CTX512.workprec():
            scale = max(abs(c) for c in rem.coeffs[1:])
            head = max(abs(c) for c in rem.coeffs[1: 2 * n + 2])
            lead = abs(rem.coeffs[2 * n + 2])
            assert head <= mp.mpf(10) ** -30 * scale
            assert lead > mp.mpf(10) ** -10 * scale
            worst_zero = max(worst_zero, head / scale)
            worst_sig = min(worst_sig, lead / scale)
        assert trip.defect_order == 2 * n + 2
    _report(3, f"annihilated head <= {mp.nstr(worst_zero, 3)} of scale, "
               f"defect coefficient >= {mp.nstr(worst_sig, 3)} of scale, "
               f"n <= 15")


def test_criterion_4_prop1_bridge():
    bound512 = mp.mpf(2) ** -200
    worst512 = mp.mpf(0)
    for n in range(1, 11):
        rep = bridge_prop1((-1, 1), (2, 3), n, CTX512)
        assert not rep.degenerate
        assert rep.deviation <= bound512
        worst512 = max(worst512, rep.deviation)
    bound1024 = mp.mpf(2) ** -100
    worst1024 = mp.mpf(0)
    for n in range(1, 21):
        rep = bridge_prop1((-1, 1), (2, 3), n, CTX1024)
        assert rep.deviation <= bound1024
        worst1024 = max(worst1024, rep.deviation)
    _report(4, f"deviation <= {mp.nstr(worst512, 3)} (2^-200 budget at 512 "
               f"bits, n <= 10) and <= {mp.nstr(worst1024, 3)} (2^-100 at "
               f"1024 bits, n <= 20)")


def test_criterion_5_classl_identity():
    worst = mp.mpf(0)
    for n in range(0, 11):
        rep = bridge_classL(2, 3, mp.mpf(0.5), n, CTX512)
        assert rep.deviation <= mp.mpf(10) ** -20
        worst = max(worst, rep.deviation)
    _report(5, f"pointwise identity deviation <= {mp.nstr(worst, 3)} "
               f"(1e-20 budget) for n <= 10")


def test_criterion_6_scalar_equilibrium():
    sol = solve_scalar((-1, 1), 1.0, N=400)
    energy_err = abs(sol.energy - math.log(2.0))
    assert energy_err < 1e-2
    assert sol.kkt_residual[0] <= 1e-3
    centers = sol.centers[0]
    density = sol.densities()[0]
    inside = np.abs(centers) <= 1 - 0.05
    exact = 1.0 / (np.pi * np.sqrt(1.0 - centers[inside] ** 2))
    dens_err = float(np.max(np.abs(density[inside] - exact)))
    assert dens_err < 1e-2
    _report(6, f"energy error {energy_err:.2e}, density sup-error "
               f"{dens_err:.2e}, KKT {sol.kkt_residual[0]:.2e}")


def test_criterion_7_prop2_desk_check():
    n = 40
    K = 3 * n + 2
    f1 = laurent_coeffs(InvSqrt(), K, CTX1024)
    f2 = NikishinSecond(2, 3).moment_tail(K, CTX1024)
    trip = hp_type1(f1, f2, n, CTX1024)
    zq2 = find_roots(trip.q2)
    assert len(zq2.points) == n

    spec = MarkovArcsine(2, 3)
    ap = frobenius_pade(cheb_coeffs(spec, 3 * n, CTX1024), n, CTX1024)

    def rem(x):
        with CTX1024.workprec():
            return (ap.q(x) * spec.trace(x, CTX1024) - ap.p(x)).real

    seg = zeros_on_segment(rem, (-1, 1), 700, CTX1024, expected=2 * n + 1)
    assert seg.warning is None

    problem = EquilibriumProblem(supports=((-1, 1), (2, 3)),
                                 masses=(2.0, 1.0), grid_sizes=(400, 400))
    lam = solve_vector(problem)
    probes = probe_circle(5.0, 64)
    d_q2 = potential_discrepancy(counting_measure(zq2.points, 1.0),
                                 lam.component_measure(1), probes,
                                 mass_tol=0.05)
    lam0 = lam.component_measure(0)
    lam0_half = DiscreteMeasure(lam0.points,
                                tuple(w / 2 for w in lam0.weights), 1.0)
    mu_omega = counting_measure([complex(x) for x in seg.zeros],
                                len(seg.zeros) / (2 * n))
    d_om = potential_discrepancy(mu_omega, lam0_half, probes, mass_tol=0.05)
    assert d_q2 <= 5e-2
    assert d_om <= 5e-2
    _report(7, f"potential discrepancies {d_q2:.2e} (denominator zeros vs "
               f"second component) and {d_om:.2e} (interval zeros vs half "
               f"first component), both <= 5e-2 at n = 40")


def test_criterion_8_figure_reproduction(tmp_path):
    out = tmp_path / "fig"
    for which in ("fig-hp", "fig-che"):
        run_experiment(ExperimentConfig(experiment=which, ns=[60],
                                        out_dir=str(out)))
    sets = {}
    for which in ("fig-hp", "fig-che"):
        rows = read_zeros_csv(out / f"{which}_hp-q2_60.csv")
        assert len(rows) == 60
        sets[which] = [complex(float(r), float(i)) for r, i, _, _ in rows]
        conj_err = max(min(abs(z.conjugate() - w) for w in sets[which])
                       for z in sets[which])
        assert conj_err <= 1e-10
    dist = trimmed_hausdorff(sets["fig-hp"], sets["fig-che"], 0.05)
    assert dist <= 0.1
    man = json.loads((out / "fig-che_manifest.json").read_text())
    assert man["diagnostics"]["cross_distance"]["60"] == pytest.approx(dist)
    _report(8, f"trimmed-Hausdorff distance {dist:.3f} <= 0.1 between the "
               f"two tuples' denominator zero sets at n = 60; both sets "
               f"conjugate-symmetric")


def test_criterion_9_multipoint():
    f = MarkovArcsine(2, 3)
    # all nodes at infinity: coefficientwise match with the classical form
    n = 6
    tail = laurent_coeffs(f, 2 * n + 2, CTX512)
    mpp = multipoint_pade(f, InterpolationTable.all_at_infinity(n), n,
                          CTX512, tail=tail)
    cl = pade_at_infinity(tail, n, CTX512)
    with CTX512.workprec():
        s = cl.q.coeffs[-1] / mpp.q.coeffs[-1]
        dev = max(abs(s * a - b) for a, b in zip(mpp.q.coeffs, cl.q.coeffs))
        p_mp = list(mpp.p.coeffs) + [mp.mpc(0)] * (n + 1 - len(mpp.p.coeffs))
        dev = max(dev, max(abs(s * a - b)
                           for a, b in zip(p_mp, cl.p.coeffs)))
    assert dev <= CTX512.tol
    worst_node, worst_orth = mp.mpf(0), mp.mpf(0)
    center = mp.mpf(5) / 2
    for nn in range(1, 11):
        table = InterpolationTable.on_circle(2 * nn, center, 3, CTX512)
        pair = multipoint_pade(f, table, nn, CTX512)
        assert pair.residual <= mp.mpf(10) ** -30
        rep = check_contour_orthogonality(pair.q, f, table, center, 1,
                                          CTX512, n=nn)
        with CTX512.workprec():
            worst_orth = max(worst_orth, rep.max_abs / rep.scale)
        assert rep.max_abs <= mp.mpf(10) ** -25 * rep.scale
        worst_node = max(worst_node, pair.residual)
    _report(9, f"all-at-infinity match <= tol; node residuals <= "
               f"{mp.nstr(worst_node, 3)}, contour moments <= "
               f"{mp.nstr(worst_orth, 3)} of scale for n <= 10")


def test_criterion_10_data_sufficiency():
    n = 4
    ctx = CTX512
    c = cheb_coeffs(MarkovArcsine(2, 3), 3 * n + 1, ctx)
    base = frobenius_pade(c[: 3 * n + 1], n, ctx)
    with ctx.workprec():
        beyond = list(c[: 3 * n + 2])
        beyond[3 * n + 1] += 1
        same = frobenius_pade(beyond, n, ctx)
        assert same.q.coeffs == base.q.coeffs
        assert same.p.coeffs == base.p.coeffs
        inside = list(c[: 3 * n + 1])
        inside[3 * n] += 1
        moved = frobenius_pade(inside, n, ctx)
        delta = max(abs(a - b) for a, b in zip(moved.q.coeffs, base.q.coeffs))
        assert delta > mp.mpf(10) ** -8
    _report(10, "output depends on exactly the first 3n+1 coefficients "
                "(bit-identical under c_{3n+1} change; moves under c_{3n})")
