"""Linear Chebyshev rational (Frobenius) approximants from first-kind
coefficient data, the weighted variant, and the bridges connecting them
to the Hermite-Pade construction."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import mpmath as mp

from .functions import (ClassL, FunctionSpec, InvSqrt, MarkovArcsine,
                        NikishinSecond, _chebyshev_nodes, cheb_coeffs,
                        laurent_coeffs, sqrt_z2m1)
from .hermite import hp_type1
from .numkernel import (CHEBYSHEV, MONOMIAL, BigPolynomial, PrecisionCtx,
                        convert_basis, laurent_from_samples,
                        nullspace_vector)


@dataclass(frozen=True)
class ChebApproximant:
    """P/Q in the Chebyshev basis with deg <= n, defined by vanishing
    product coefficients c_k(Q f) for k = n+1 .. 2n, with P the degree-n
    truncation of Q f."""

    p: BigPolynomial
    q: BigPolynomial
    order: int
    defect_max: mp.mpf
    degenerate: bool

    def __call__(self, z):
        with self.p.ctx.workprec():
            return self.p(z) / self.q(z)

    def to_dict(self) -> dict:
        return {
            "p": self.p.coeff_strings(),
            "q": self.q.coeff_strings(),
            "basis": CHEBYSHEV,
            "order": self.order,
            "defect_max": mp.nstr(self.defect_max, 8),
            "degenerate": self.degenerate,
            "precision": self.p.ctx.to_dict(),
        }


def product_coefficient(c, k: int, j: int):
    """Chebyshev coefficient of index k of T_j * f, where c holds the
    first-kind coefficients of f (plain convention, unhalved c_0).

    For j, k >= 1 and j != k this is (c_{k+j} + c_{|k-j|}) / 2; the index-0
    conventions are handled explicitly.
    """
    if j == 0:
        return c[k]
    if k == 0:
        return c[j] / 2
    if k == j:
        return c[0] + c[2 * j] / 2
    return (c[k + j] + c[abs(k - j)]) / 2


def frobenius_pade(c, n: int, ctx: PrecisionCtx) -> ChebApproximant:
    """Order-n linear Chebyshev rational approximant from c_0 .. c_{3n}.

    Q solves the n x (n+1) homogeneous system c_k(Q f) = 0 for
    k = n+1 .. 2n; P collects the coefficients c_k(Q f) for k <= n.
    """
    if n < 0:
        raise ValueError("order must be >= 0")
    if len(c) < 3 * n + 1:
        raise ValueError(f"need at least 3n+1 = {3*n+1} coefficients, "
                         f"got {len(c)}")
    with ctx.workprec():
        c = [x if isinstance(x, mp.mpc) else mp.mpc(x) for x in c]
        if n == 0:
            q = BigPolynomial(CHEBYSHEV, (mp.mpc(1),), ctx)
            p = BigPolynomial(CHEBYSHEV, (c[0],), ctx)
            return ChebApproximant(p, q, 0, mp.mpf(0), False)
        rows = [[product_coefficient(c, k, j) for j in range(n + 1)]
                for k in range(n + 1, 2 * n + 1)]
        sol = nullspace_vector(rows, ctx)
        u = sol.vector
        p = [mp.fsum((u[j] * product_coefficient(c, k, j)
                      for j in range(n + 1)), absolute=False)
             for k in range(n + 1)]
        defect = mp.mpf(0)
        for k in range(n + 1, 2 * n + 1):
            v = mp.fsum((u[j] * product_coefficient(c, k, j)
                         for j in range(n + 1)), absolute=False)
            defect = max(defect, abs(v))
    return ChebApproximant(
        p=BigPolynomial(CHEBYSHEV, tuple(p), ctx),
        q=BigPolynomial(CHEBYSHEV, tuple(u), ctx),
        order=n,
        defect_max=defect,
        degenerate=sol.degenerate,
    )


def weighted_chebpade(f, w: Callable, n: int, ctx: PrecisionCtx,
                      quad_doublings: int = 10) -> ChebApproximant:
    """Weighted linear Chebyshev rational approximant.

    Defining conditions: int over [-1,1] of x^k (Q f - P)(x) w(x)
    / sqrt(1-x^2) dx = 0 for k = 0 .. 2n-1 (both P and Q of degree <= n).
    The 2n conditions leave a two-parameter family; the representative
    returned here additionally annihilates k = 2n, which reproduces the
    unweighted construction when w == 1.  Quadrature: Gauss-Chebyshev
    with node doubling.
    """
    if n < 1:
        raise ValueError("order must be >= 1")
    spec = f if isinstance(f, FunctionSpec) else None
    fx = (lambda x: spec.trace(x, ctx)) if spec is not None else f

    def assemble(N):
        xs, _ = _chebyshev_nodes(N)
        fv = [mp.mpc(fx(x)) for x in xs]
        wv = [mp.mpc(w(x)) for x in xs]
        # T_j(x) at nodes by recurrence
        tj = [[mp.mpf(1)] * N, xs[:]]
        for j in range(2, n + 1):
            tj.append([2 * xs[i] * tj[-1][i] - tj[-2][i] for i in range(N)])
        rows = []
        pw = [mp.mpf(1)] * N
        for k in range(2 * n + 1):
            row = []
            for j in range(n + 1):
                row.append(mp.fsum((pw[i] * tj[j][i] * fv[i] * wv[i]
                                    for i in range(N)), absolute=False) / N)
            for j in range(n + 1):
                row.append(-mp.fsum((pw[i] * tj[j][i] * wv[i]
                                     for i in range(N)), absolute=False) / N)
            rows.append(row)
            if k < 2 * n:
                pw = [pw[i] * xs[i] for i in range(N)]
        return rows

    with ctx.workprec():
        N = 1 << max(7, (8 * n - 1).bit_length())
        prev = assemble(N)
        for _ in range(quad_doublings):
            N *= 2
            cur = assemble(N)
            scale = max(max(abs(x) for row in cur for x in row), mp.mpf(1))
            worst = max(abs(a - b) for ra, rb in zip(prev, cur)
                        for a, b in zip(ra, rb))
            if worst <= ctx.quad_target * scale:
                break
            prev = cur
        else:
            raise ValueError("weighted quadrature did not stabilize")
        sol = nullspace_vector(cur, ctx)
        q = BigPolynomial(CHEBYSHEV, sol.vector[: n + 1], ctx)
        p = BigPolynomial(CHEBYSHEV, sol.vector[n + 1:], ctx)
        # report the residual of the defining k <= 2n-1 conditions
        defect = mp.mpf(0)
        for k in range(2 * n):
            v = mp.fsum((cur[k][j] * sol.vector[j]
                         for j in range(2 * n + 2)), absolute=False)
            defect = max(defect, abs(v))
    return ChebApproximant(p, q, n, defect, sol.degenerate)


# ---------------------------------------------------------------------------
# bridges
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BridgeReport:
    """Deviation between a Chebyshev rational approximant and its
    Hermite-Pade counterpart, after optimal scalar alignment."""

    deviation: mp.mpf
    n: int
    bits: int
    degenerate: bool
    branch: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"deviation": mp.nstr(self.deviation, 8), "n": self.n,
                "bits": self.bits, "degenerate": self.degenerate,
                "branch": dict(self.branch)}


def _pad(coeffs, m):
    return list(coeffs) + [mp.mpc(0)] * (m - len(coeffs))


def _aligned_deviation(u_vecs, v_vecs) -> mp.mpf:
    """min over one complex scalar s of max |s*u - v|, relative to max |v|.

    u_vecs / v_vecs are matching lists of coefficient vectors; a single s
    aligns all of them (least squares over the stacked vector).
    """
    u = [x for vec in u_vecs for x in vec]
    v = [x for vec in v_vecs for x in vec]
    num = mp.fsum((mp.conj(a) * b for a, b in zip(u, v)), absolute=False)
    den = mp.fsum((mp.conj(a) * a for a in u), absolute=False)
    s = num / den
    scale = max(abs(x) for x in v)
    dev = max(abs(s * a - b) for a, b in zip(u, v))
    return dev / scale if scale > 0 else dev


def bridge_prop1(mu_interval, sigma_interval, n: int, ctx: PrecisionCtx,
                 sigma_hp_interval=None) -> BridgeReport:
    """Compare the Chebyshev rational approximant of the arcsine Cauchy
    transform on ``sigma_interval`` with the Hermite-Pade triple of the
    associated pair of Cauchy transforms: P/Q = -Q1/Q2.

    Both sides are computed independently (cosine-transform data on one
    side, Laurent moments on the other).  ``sigma_hp_interval`` lets tests
    mismatch the two sides deliberately as a negative control.
    """
    if tuple(mu_interval) != (-1, 1):
        raise ValueError("the first measure is fixed to arcsine on [-1, 1]")
    if sigma_hp_interval is None:
        sigma_hp_interval = sigma_interval
    f = MarkovArcsine(*sigma_interval)
    c = cheb_coeffs(f, 3 * n, ctx)
    phi = frobenius_pade(c, n, ctx)

    K = 3 * n + 2
    f1 = laurent_coeffs(InvSqrt(), K, ctx)
    f2 = NikishinSecond(*sigma_hp_interval).moment_tail(K, ctx)
    trip = hp_type1(f1, f2, n, ctx)

    with ctx.workprec():
        q_mono = convert_basis(phi.q, MONOMIAL)
        p_mono = convert_basis(phi.p, MONOMIAL)
        m = n + 1
        dev = _aligned_deviation(
            [_pad(q_mono.coeffs, m), _pad(p_mono.coeffs, m)],
            [_pad(trip.q2.coeffs, m),
             [-x for x in _pad(trip.q1.coeffs, m)]])
    return BridgeReport(dev, n, ctx.bits,
                        phi.degenerate or trip.degenerate)


def bridge_classL(a1, a2, alpha, n: int, ctx: PrecisionCtx,
                  probe_radius: float = 2.5,
                  probe_count: int = 16) -> BridgeReport:
    """Check the two-factor product identity Phi_n = Q1/Q2 + 1/sqrt(A1 A2).

    Left side: Chebyshev rational approximant of the product's trace
    coefficients.  Right side: Hermite-Pade triple for the tuple
    [1, 1/sqrt(z^2-1), (1/sqrt(A1 A2) - f(z))/sqrt(z^2-1)] whose jump
    data encodes the same approximation problem.  The constant's square
    root is the principal branch; the report records it so a wrong branch
    shows up as an order-one deviation.
    """
    from .functions import _frac

    alpha = _frac(alpha)
    spec = ClassL((complex(a1), complex(a2)), (alpha, -alpha))
    with ctx.workprec():
        croot = mp.sqrt(mp.mpc(a1) * mp.mpc(a2))
        c_const = 1 / croot
    branch = {"constant": mp.nstr(c_const, 8), "root": "principal"}

    lhs = frobenius_pade(cheb_coeffs(spec, max(3 * n, 1), ctx), n, ctx)
    K = 3 * n + 2
    f1 = laurent_coeffs(InvSqrt(), K, ctx)

    def partner(z):
        return (c_const - spec.evaluate(z, ctx)) / sqrt_z2m1(z)

    f2 = laurent_from_samples(partner, K, 4, ctx, singular_radius=1.0)
    trip = hp_type1(f1, f2, n, ctx)

    with ctx.workprec():
        dev = mp.mpf(0)
        for k in range(probe_count):
            ang = mp.pi * (2 * k + 1) / probe_count
            z = mp.mpf(probe_radius) * mp.e ** (1j * ang)
            rhs = trip.q1(z) / trip.q2(z) + c_const
            dev = max(dev, abs(lhs(z) - rhs))
    return BridgeReport(dev, n, ctx.bits, trip.degenerate or lhs.degenerate,
                        branch)
