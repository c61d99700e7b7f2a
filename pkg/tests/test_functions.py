import random
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp
import pytest

from padelab.functions import (ClassL, DomainError, FunctionSpec, InvSqrt,
                               MarkovArcsine, NikishinSecond, Shifted,
                               cheb_coeffs, evaluate, laurent_coeffs,
                               phi_map, spec_from_json, sqrt_z2m1)
from padelab.numkernel import laurent_from_samples


@dataclass(frozen=True)
class _TraceOnly(FunctionSpec):
    """Test helper: a spec defined by an explicit analytic trace."""

    fn: object
    label: str = "trace-only"

    def trace(self, x, ctx):
        with ctx.workprec():
            return self.fn(mp.mpf(x))

    def analytic_on_delta(self):
        return True

    def params_dict(self):
        return {"label": self.label}


def _arcsine_quadrature(g, c, d, N=4000):
    # brute-force arcsine-measure integral on [c, d]
    total = mp.mpf(0)
    for j in range(N):
        t = (c + d) / 2 + (d - c) / 2 * mp.cos((2 * j + 1) * mp.pi / (2 * N))
        total += g(t)
    return total / N


def test_markov_evaluate_against_quadrature_oracle(ctx256):
    f = MarkovArcsine(2, 3)
    with ctx256.workprec():
        direct = evaluate(f, 4, ctx256)
        oracle = _arcsine_quadrature(lambda t: 1 / (4 - t), mp.mpf(2),
                                     mp.mpf(3))
        assert abs(direct - 1 / mp.sqrt(2)) < ctx256.tol
        assert abs(direct - oracle) < mp.mpf(10) ** -30
        # negative side of the branch
        assert abs(evaluate(f, 0, ctx256) + 1 / mp.sqrt(6)) < ctx256.tol


def test_invsqrt_value(ctx256):
    with ctx256.workprec():
        assert abs(evaluate(InvSqrt(), 2, ctx256) - 1 / mp.sqrt(3)) < ctx256.tol


def test_classl_integer_exponents_limit(ctx256):
    spec = ClassL((2, -2), (1, -1))
    with ctx256.workprec():
        far = evaluate(spec, mp.mpf(10) ** 6, ctx256)
        assert abs(far - (-1)) < mp.mpf(10) ** -5
        tail = laurent_coeffs(spec, 4, ctx256)
        assert abs(tail.coeffs[0] - (-1)) < ctx256.tol


def test_classl_admissibility():
    with pytest.raises(ValueError):
        ClassL((2, 3), (Fraction(1, 2), Fraction(1, 2)))  # sum != 0
    with pytest.raises(ValueError):
        ClassL((0.5, 2), (Fraction(1, 2), Fraction(-1, 2)))  # |A| <= 1
    with pytest.raises(ValueError):
        ClassL((-2, 2), (Fraction(1, 2), Fraction(-1, 2)))  # cut hits disk
    ClassL((-2, 2), (1, -1))  # integer exponents are branch-free


def test_branch_policy_identity(ctx256):
    rng = random.Random(1)
    with ctx256.workprec():
        for _ in range(12):
            z = mp.mpc(rng.uniform(-3, 3), rng.uniform(0.1, 3))
            assert abs(phi_map(z) * (z - sqrt_z2m1(z)) - 1) < ctx256.tol
            assert abs(phi_map(z)) > 1


def test_invsqrt_laurent_binomial_oracle(ctx256):
    t = laurent_coeffs(InvSqrt(), 9, ctx256)
    with ctx256.workprec():
        # sum binom(2k, k) 4^-k z^(-2k-1)
        expect = [mp.mpf(0)] * 10
        for k in range(5):
            expect[2 * k + 1] = mp.binomial(2 * k, k) / mp.mpf(4) ** k
        assert max(abs(a - b) for a, b in zip(t.coeffs, expect)) < ctx256.tol


def test_inverse_phi_laurent_oracle(ctx256):
    t = laurent_from_samples(lambda z: 1 / phi_map(z), 5, 4, ctx256)
    expect = [0, mp.mpf(1) / 2, 0, mp.mpf(1) / 8, 0, mp.mpf(1) / 16]
    with ctx256.workprec():
        assert max(abs(a - b) for a, b in zip(t.coeffs, expect)) < ctx256.tol


def test_markov_laurent_series_oracle(ctx256):
    t = laurent_coeffs(MarkovArcsine(2, 3), 2, ctx256)
    with ctx256.workprec():
        expect = [0, 1, mp.mpf(5) / 2]
        assert max(abs(a - b) for a, b in zip(t.coeffs, expect)) < ctx256.tol


def test_cheb_coeffs_polynomial_fixed_point(ctx256):
    t3 = _TraceOnly(lambda x: 4 * x ** 3 - 3 * x)
    c = cheb_coeffs(t3, 6, ctx256)
    with ctx256.workprec():
        assert abs(c[3] - 1) < ctx256.tol
        assert max(abs(c[k]) for k in (0, 1, 2, 4, 5, 6)) < ctx256.tol


def test_cheb_coeffs_simple_pole_closed_form(ctx256):
    # f(x) = 1/(2-x): c_0 = 1/sqrt(3), c_k = 2/(sqrt(3) (2+sqrt(3))^k)
    f = _TraceOnly(lambda x: 1 / (2 - x))
    c = cheb_coeffs(f, 12, ctx256)
    with ctx256.workprec():
        s3 = mp.sqrt(3)
        assert abs(c[0] - 1 / s3) < ctx256.tol
        for k in range(1, 13):
            assert abs(c[k] - 2 / (s3 * (2 + s3) ** k)) < ctx256.tol


def test_markov_cheb_decay_rate(ctx512):
    c = cheb_coeffs(MarkovArcsine(2, 3), 61, ctx512)
    with ctx512.workprec():
        rho = abs(1 / phi_map(mp.mpf(2)))
        for k in range(20, 60):
            ratio = abs(c[k + 1] / c[k])
            assert abs(ratio - rho) / rho < 0.05


def test_branch_consistency_far_field(ctx256):
    specs = [MarkovArcsine(2, 3), InvSqrt(),
             ClassL((complex(0.2, 1.2), complex(0.2, -1.2), 1.5),
                    (Fraction(-1, 3), Fraction(-1, 3), Fraction(2, 3)))]
    with ctx256.workprec():
        z = mp.mpc(1000, 1)
        for spec in specs:
            tail = laurent_coeffs(spec, 20, ctx256)
            err = abs(evaluate(spec, z, ctx256) - tail(z))
            assert err <= tail.remainder_bound(z) + ctx256.tol


def test_conjugate_symmetry(ctx256):
    specs = [MarkovArcsine(2, 3), InvSqrt(), NikishinSecond(2, 3),
             ClassL((complex(0.2, 1.2), complex(0.2, -1.2), 1.5),
                    (Fraction(-1, 3), Fraction(-1, 3), Fraction(2, 3)))]
    rng = random.Random(9)
    with ctx256.workprec():
        for spec in specs:
            for _ in range(4):
                z = mp.mpc(rng.uniform(-2, 2), rng.uniform(0.2, 2))
                a = evaluate(spec, z, ctx256)
                b = evaluate(spec, mp.conj(z), ctx256)
                assert abs(mp.conj(a) - b) < ctx256.tol


def test_chebyshev_reconstruction(ctx256):
    spec = MarkovArcsine(2, 3)
    # decay rate 1/phi(2) ~ 0.268: K for full-precision reconstruction
    K = 150
    c = cheb_coeffs(spec, K, ctx256)
    rng = random.Random(4)
    with ctx256.workprec():
        for _ in range(32):
            x = mp.mpf(rng.uniform(-0.9, 0.9))
            t = mp.acos(x)
            recon = mp.fsum(c[k] * mp.cos(k * t) for k in range(K + 1))
            assert abs(recon - evaluate(spec, x, ctx256)) < 10 * ctx256.tol


def test_classl_trace_reconstruction(ctx512):
    spec = ClassL((2, 3), (Fraction(1, 2), Fraction(-1, 2)))
    K = 400  # decay ratio 1/2 for A = 2
    c = cheb_coeffs(spec, K, ctx512)
    with ctx512.workprec():
        for xv in ("-0.83", "0.11", "0.67"):
            x = mp.mpf(xv)
            t = mp.acos(x)
            recon = mp.fsum(c[k] * mp.cos(k * t) for k in range(K + 1))
            assert abs(recon - spec.trace(x, ctx512)) < 10 * ctx512.tol


def test_nikishin_tail_matches_direct_evaluation(ctx256):
    spec = NikishinSecond(2, 3)
    tail = laurent_coeffs(spec, 60, ctx256)
    with ctx256.workprec():
        z = mp.mpc(6, 2)
        direct = evaluate(spec, z, ctx256)
        assert abs(tail(z) - direct) < mp.mpf(10) ** -40


def test_domain_errors(ctx256):
    with pytest.raises(DomainError):
        evaluate(MarkovArcsine(2, 3), 2.5, ctx256)
    with pytest.raises(DomainError):
        evaluate(InvSqrt(), 0.3, ctx256)
    with pytest.raises(DomainError):
        cheb_coeffs(InvSqrt(), 4, ctx256)
    with pytest.raises(DomainError):
        cheb_coeffs(NikishinSecond(2, 3), 4, ctx256)


def test_constructor_rejections():
    with pytest.raises(ValueError):
        MarkovArcsine(0, 3)  # overlaps [-1, 1]
    with pytest.raises(ValueError):
        MarkovArcsine(3, 2)
    with pytest.raises(ValueError):
        NikishinSecond(-0.5, 3)


def test_shifted_and_json_roundtrip(ctx256):
    base = MarkovArcsine(2, 3)
    spec = Shifted(base, complex(1.5, 0))
    with ctx256.workprec():
        v = evaluate(spec, 4, ctx256)
        assert abs(v - (1 / mp.sqrt(2) + mp.mpf(3) / 2)) < ctx256.tol
        t = laurent_coeffs(spec, 3, ctx256)
        assert abs(t.coeffs[0] - mp.mpf(3) / 2) < ctx256.tol
    for s in (base, spec, InvSqrt(), NikishinSecond(2, 3),
              ClassL((2, 3), (Fraction(1, 2), Fraction(-1, 2)))):
        assert spec_from_json(s.to_json()) == s
