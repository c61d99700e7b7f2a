import math
import random

import mpmath as mp
import pytest

from padelab.numkernel import CHEBYSHEV, MONOMIAL, BigPolynomial
from padelab.roots import (DiscreteMeasure, counting_measure, find_roots,
                           potential_discrepancy, probe_circle, read_zeros_csv,
                           trimmed_hausdorff, write_zeros_csv,
                           zeros_on_segment)


def test_cubic_with_exact_zero_root(ctx256):
    p = BigPolynomial(MONOMIAL, (0, -3, 0, 4), ctx256)
    zs = find_roots(p)
    with ctx256.workprec():
        expect = sorted([-mp.sqrt(3) / 2, mp.mpf(0), mp.sqrt(3) / 2])
        for z, e in zip(zs.points, expect):
            assert abs(z - e) < ctx256.tol
    assert zs.residual <= mp.sqrt(ctx256.tol)


def test_chebyshev_t20_roots(ctx256):
    coeffs = [mp.mpc(0)] * 21
    coeffs[20] = mp.mpc(1)
    p = BigPolynomial(CHEBYSHEV, tuple(coeffs), ctx256)
    zs = find_roots(p)
    with ctx256.workprec():
        expect = sorted(mp.cos((2 * k - 1) * mp.pi / 40) for k in range(1, 21))
        worst = max(abs(z - e) for z, e in zip(zs.points, expect))
        assert worst < mp.mpf(2) ** (-ctx256.bits // 2)


def test_markov_denominator_roots(ctx512):
    from padelab.functions import MarkovArcsine, laurent_coeffs
    from padelab.pade import pade_at_infinity

    f = MarkovArcsine(2, 3)
    tail = laurent_coeffs(f, 26, ctx512)
    pair = pade_at_infinity(tail, 12, ctx512)
    zs = find_roots(pair.q)
    assert len(zs.points) == 12
    with mp.workprec(2 * ctx512.bits):
        # Sturm-style oracle: sign changes on a fine grid of (2, 3)
        grid = 1200
        xs = [2 + mp.mpf(i) / grid for i in range(grid + 1)]
        vals = [pair.q(x).real for x in xs]
        changes = sum(1 for i in range(grid)
                      if vals[i] != 0 and vals[i] * vals[i + 1] < 0)
        assert changes == 12
    for z in zs.points:
        assert 2 < z.real < 3 and abs(z.imag) < 10 * ctx512.tol


def test_determinism(ctx256):
    rng = random.Random(17)
    coeffs = tuple(mp.mpc(rng.uniform(-1, 1), rng.uniform(-1, 1))
                   for _ in range(21))
    p = BigPolynomial(MONOMIAL, coeffs, ctx256)
    a = find_roots(p)
    b = find_roots(p)
    assert a.points == b.points


def test_conjugate_closure(ctx256):
    rng = random.Random(29)
    coeffs = tuple(mp.mpc(rng.uniform(-1, 1)) for _ in range(16))
    p = BigPolynomial(MONOMIAL, coeffs, ctx256)
    zs = find_roots(p)
    pts = list(zs.points)
    with ctx256.workprec():
        for z in pts:
            if abs(z.imag) > 10 * ctx256.tol:
                match = min(abs(mp.conj(z) - w) for w in pts)
                assert match < 10 * ctx256.tol


# the contract spans degrees {10, 50, 200}; the sample count shrinks with
# the degree to keep the sweep affordable
@pytest.mark.parametrize("deg,count", [(10, 100), (50, 6), (200, 1)])
def test_residual_bound_random(ctx256, deg, count):
    rng = random.Random(1000 + deg)
    for _ in range(count):
        coeffs = tuple(mp.mpc(rng.uniform(-1, 1), rng.uniform(-1, 1))
                       for _ in range(deg + 1))
        p = BigPolynomial(MONOMIAL, coeffs, ctx256)
        zs = find_roots(p)
        assert len(zs.points) == p.degree
        assert zs.residual <= mp.sqrt(ctx256.tol)


def test_zeros_on_segment_t5(ctx256):
    def t5(x):
        return 16 * x ** 5 - 20 * x ** 3 + 5 * x

    res = zeros_on_segment(t5, (-1, 1), 64, ctx256, expected=5)
    assert len(res.zeros) == 5 and res.warning is None
    with ctx256.workprec():
        for z, e in zip(res.zeros,
                        sorted(mp.cos((2 * k - 1) * mp.pi / 10)
                               for k in range(1, 6))):
            assert abs(z - e) < 10 * ctx256.tol


def test_zeros_on_segment_no_change(ctx256):
    res = zeros_on_segment(lambda x: 2 + x * x, (-1, 1), 32, ctx256)
    assert len(res.zeros) == 0


def test_zeros_on_segment_warns_on_count(ctx256):
    res = zeros_on_segment(lambda x: x, (-1, 1), 16, ctx256, expected=3)
    assert res.warning is not None and "denser grid" in res.warning


def test_remainder_zero_count_on_interval(ctx512):
    # Q f - P is orthogonal to all polynomials of degree <= 2n against the
    # arcsine measure, so it changes sign at least 2n + 1 times on
    # (-1, 1); with the geometric coefficient decay the count is exactly
    # 2n + 1 (the leading Chebyshev term dominates)
    from padelab.chebpade import frobenius_pade
    from padelab.functions import MarkovArcsine, cheb_coeffs

    n = 5
    spec = MarkovArcsine(2, 3)
    c = cheb_coeffs(spec, 3 * n, ctx512)
    ap = frobenius_pade(c, n, ctx512)

    def rem(x):
        with ctx512.workprec():
            return (ap.q(x) * spec.trace(x, ctx512) - ap.p(x)).real

    res = zeros_on_segment(rem, (-1, 1), 400, ctx512, expected=2 * n + 1)
    assert res.warning is None
    assert len(res.zeros) == 2 * n + 1
    # count is stable under grid doubling
    res2 = zeros_on_segment(rem, (-1, 1), 800, ctx512)
    assert len(res2.zeros) == 2 * n + 1


def test_trimmed_hausdorff_cases():
    assert trimmed_hausdorff([0], [3, 4], 0.0) == pytest.approx(4.0)
    pts = [complex(1, 2), complex(-1, 0.5), complex(0, 0)]
    assert trimmed_hausdorff(pts, pts, 0.0) == 0.0
    core = [complex(k, 0) for k in range(10)]
    polluted = core + [complex(50, 50)]
    assert trimmed_hausdorff(core, polluted, 1 / 11) == 0.0
    with pytest.raises(ValueError):
        trimmed_hausdorff([], [1], 0.0)
    with pytest.raises(ValueError):
        trimmed_hausdorff([0], [1], 0.7)


def test_potential_discrepancy_split_charge():
    mu = DiscreteMeasure((0j,), (1.0,), 1.0)
    eps = 1e-2
    nu = DiscreteMeasure((complex(eps), complex(-eps)), (0.5, 0.5), 1.0)
    probes = [2 * complex(math.cos(t), math.sin(t))
              for t in [k * math.pi / 8 for k in range(16)]]
    d = potential_discrepancy(mu, nu, probes)
    assert d <= 1e-4


def test_potential_discrepancy_arcsine_sample():
    N = 200
    pts = [complex(math.cos((2 * j + 1) * math.pi / (2 * N))) for j in range(N)]
    mu = counting_measure(pts, 1.0)
    M = 4000
    ref = counting_measure(
        [complex(math.cos((2 * j + 1) * math.pi / (2 * M))) for j in range(M)],
        1.0)
    d = potential_discrepancy(mu, ref, probe_circle(3.0, 64))
    assert d <= 1e-2


def test_potential_discrepancy_contracts():
    mu = DiscreteMeasure((0j,), (1.0,), 1.0)
    nu = DiscreteMeasure((1 + 0j,), (0.5,), 0.5)
    with pytest.raises(ValueError):
        potential_discrepancy(mu, nu, [3 + 0j])
    near = DiscreteMeasure((0.1 + 0j,), (1.0,), 1.0)
    with pytest.raises(ValueError):
        potential_discrepancy(mu, near, [0.2 + 0j])


def test_potential_discrepancy_pseudometric():
    rng = random.Random(31)
    probes = probe_circle(3.0, 32)

    def rand_measure():
        pts = [complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
               for _ in range(6)]
        return counting_measure(pts, 1.0)

    for _ in range(5):
        a, b, c = rand_measure(), rand_measure(), rand_measure()
        dab = potential_discrepancy(a, b, probes)
        dba = potential_discrepancy(b, a, probes)
        assert dab == pytest.approx(dba, rel=1e-12)
        dac = potential_discrepancy(a, c, probes)
        dcb = potential_discrepancy(c, b, probes)
        assert dab <= dac + dcb + 1e-12


def test_zeros_csv_roundtrip(tmp_path, ctx256):
    p = BigPolynomial(MONOMIAL, (0, -3, 0, 4), ctx256)
    zs = find_roots(p)
    path = tmp_path / "unicode-ζ" / "zeros.csv"
    path.parent.mkdir()
    rows = write_zeros_csv(path, zs, "demo", 3, ctx256)
    assert rows == 3
    back = read_zeros_csv(path)
    assert len(back) == 3
    with ctx256.workprec():
        for (re_s, im_s, source, n_s), z in zip(back, zs.points):
            assert source == "demo" and n_s == "3"
            assert abs(mp.mpf(re_s) - z.real) < mp.mpf(10) ** -70
