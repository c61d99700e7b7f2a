"""Classical diagonal Pade approximants at infinity and multipoint Pade
approximants on a prescribed interpolation table, with orthogonality
diagnostics for the denominators."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import mpmath as mp

from .functions import FunctionSpec, _chebyshev_nodes
from .numkernel import (MONOMIAL, BigPolynomial, LaurentTail, PrecisionCtx,
                        nullspace_vector, unit_roots)


class TableError(Exception):
    """Invalid interpolation table (confluent nodes, node on a cut, ...)."""


@dataclass(frozen=True)
class InterpolationTable:
    """Multiset of interpolation nodes: distinct finite points plus a
    multiplicity at infinity.  Total multiplicity must equal 2n when used
    for an order-n approximant."""

    finite_nodes: tuple
    inf_multiplicity: int = 0

    def __post_init__(self):
        nodes = tuple(mp.mpc(z) for z in self.finite_nodes)
        object.__setattr__(self, "finite_nodes", nodes)
        if self.inf_multiplicity < 0:
            raise TableError("negative multiplicity at infinity")
        for i in range(len(nodes)):
            for j in range(i + 1, len(nodes)):
                if nodes[i] == nodes[j]:
                    raise TableError(
                        f"confluent finite nodes at {nodes[i]} are rejected")

    @property
    def total_multiplicity(self) -> int:
        return len(self.finite_nodes) + self.inf_multiplicity

    @classmethod
    def all_at_infinity(cls, n: int) -> "InterpolationTable":
        return cls((), 2 * n)

    @classmethod
    def on_circle(cls, count: int, center, radius,
                  ctx: PrecisionCtx) -> "InterpolationTable":
        center = mp.mpc(center)
        with ctx.workprec():
            pts = tuple(center + mp.mpf(radius) * w
                        for w in unit_roots(count, ctx))
        return cls(pts, 0)

    def omega(self, ctx: PrecisionCtx) -> BigPolynomial:
        """Monic polynomial with the finite nodes as simple zeros."""
        with ctx.workprec():
            coeffs = [mp.mpc(1)]
            for z in self.finite_nodes:
                nxt = [mp.mpc(0)] * (len(coeffs) + 1)
                for i, c in enumerate(coeffs):
                    nxt[i + 1] += c
                    nxt[i] -= z * c
                coeffs = nxt
        return BigPolynomial(MONOMIAL, tuple(coeffs), ctx)


@dataclass(frozen=True)
class PadePair:
    """Numerator/denominator pair with diagnostics.

    ``lost_count`` is the number of table nodes where P and Q share a
    zero, so the rational function no longer interpolates there.
    """

    p: BigPolynomial
    q: BigPolynomial
    lost_count: int
    degenerate: bool
    residual: mp.mpf

    def __call__(self, z):
        with self.p.ctx.workprec():
            return self.p(z) / self.q(z)

    def to_dict(self) -> dict:
        return {
            "p": self.p.coeff_strings(),
            "q": self.q.coeff_strings(),
            "basis": self.p.basis,
            "lost_count": self.lost_count,
            "degenerate": self.degenerate,
            "residual": mp.nstr(self.residual, 8),
            "precision": self.p.ctx.to_dict(),
        }


def pade_at_infinity(tail: LaurentTail, n: int, ctx: PrecisionCtx) -> PadePair:
    """Order-n diagonal Pade approximant of a series at infinity.

    Solves the Hankel system making the z^-1 .. z^-n coefficients of
    Q f - P vanish (deg P <= n absorbs the polynomial part), so
    Q f - P = O(z^-(n+1)).
    """
    if n < 1:
        raise ValueError("order must be >= 1")
    if tail.order < 2 * n + 1:
        raise ValueError(f"tail order {tail.order} < 2n+1 = {2*n+1}")
    c = tail.coeffs
    with ctx.workprec():
        rows = [[c[k + j] for j in range(n + 1)] for k in range(1, n + 1)]
        sol = nullspace_vector(rows, ctx)
        q = list(sol.vector)
        p = []
        for t in range(n + 1):
            s = mp.mpc(0)
            for j in range(t, n + 1):
                s += q[j] * c[j - t]
            p.append(s)
    return PadePair(
        p=BigPolynomial(MONOMIAL, tuple(p), ctx),
        q=BigPolynomial(MONOMIAL, tuple(q), ctx),
        lost_count=0,
        degenerate=sol.degenerate,
        residual=sol.residual,
    )


def _pow2_row_scale(row):
    mx = max(abs(x) for x in row)
    if mx == 0:
        return row
    e = mp.mag(mx)  # smallest integer with |mx| <= 2**e
    s = mp.mpf(2) ** (-e)
    return [x * s for x in row]


def multipoint_pade(f, table: InterpolationTable, n: int, ctx: PrecisionCtx,
                    tail: Optional[LaurentTail] = None) -> PadePair:
    """Linear interpolation conditions on a table of 2n nodes.

    deg P <= n-1, deg Q <= n; (Q f - P)(zeta) = 0 at each finite node and
    the leading ``inf_multiplicity`` coefficients of Q f - P vanish at
    infinity.  ``f`` is a FunctionSpec or a plain evaluator; a Laurent
    tail must be supplied when the table touches infinity (FunctionSpec
    inputs compute it on demand).

    With the whole table at infinity and f(inf) = 0 this reduces to the
    classical construction and matches :func:`pade_at_infinity` up to the
    normalizing scalar.
    """
    if n < 1:
        raise ValueError("order must be >= 1")
    if table.total_multiplicity != 2 * n:
        raise TableError(
            f"table multiplicity {table.total_multiplicity} != 2n = {2*n}")
    spec = f if isinstance(f, FunctionSpec) else None
    if spec is not None:
        for z in table.finite_nodes:
            spec._check_off_cuts(z, ctx)  # raises DomainError on the cut
        evaluator = lambda z: spec.evaluate(z, ctx)
    else:
        evaluator = f
    m_inf = table.inf_multiplicity
    if m_inf > 0:
        if tail is None and spec is not None:
            from .functions import laurent_coeffs
            tail = laurent_coeffs(spec, max(m_inf, 1), ctx)
        if tail is None or tail.order < m_inf:
            raise ValueError("need a Laurent tail of order >= the "
                             "multiplicity at infinity")
    with ctx.workprec():
        ncols = 2 * n + 1  # q_0..q_n, p_0..p_{n-1}
        rows = []
        for zeta in table.finite_nodes:
            fz = evaluator(zeta)
            row = []
            zp = mp.mpc(1)
            for j in range(n + 1):
                row.append(zp * fz)
                zp *= zeta
            zp = mp.mpc(1)
            for j in range(n):
                row.append(-zp)
                zp *= zeta
            rows.append(_pow2_row_scale(row))
        c = tail.coeffs if tail is not None else ()
        for t in range(n - 1, n - 1 - m_inf, -1):
            row = [mp.mpc(0)] * ncols
            for j in range(n + 1):
                k = j - t
                if 0 <= k <= (tail.order if tail is not None else -1):
                    row[j] = c[k]
            if 0 <= t <= n - 1:
                row[n + 1 + t] -= 1
            rows.append(_pow2_row_scale(row))
        sol = nullspace_vector(rows, ctx)
        q = BigPolynomial(MONOMIAL, sol.vector[: n + 1], ctx)
        p = BigPolynomial(MONOMIAL, sol.vector[n + 1:], ctx)
        # lost interpolation: joint near-zeros of P and Q among the nodes
        lost = 0
        resid = mp.mpf(0)
        for zeta in table.finite_nodes:
            scale_q = q.max_coeff() * max(mp.mpf(1), abs(zeta)) ** q.degree
            scale_p = max(p.max_coeff(), mp.mpf(1)) * max(
                mp.mpf(1), abs(zeta)) ** max(p.degree, 0)
            qz, pz = q(zeta), p(zeta)
            if abs(qz) <= ctx.tol * scale_q and abs(pz) <= ctx.tol * scale_p:
                lost += 1
            node_resid = abs(qz * evaluator(zeta) - pz)
            scale = max(scale_q * abs(evaluator(zeta)), scale_p, mp.mpf(1))
            resid = max(resid, node_resid / scale)
    return PadePair(p=p, q=q, lost_count=lost, degenerate=sol.degenerate,
                    residual=max(resid, sol.residual))


@dataclass(frozen=True)
class OrthogonalityReport:
    max_abs: mp.mpf
    scale: mp.mpf
    values: tuple

    @property
    def normalized(self) -> mp.mpf:
        return self.max_abs / self.scale if self.scale > 0 else self.max_abs

    def to_dict(self) -> dict:
        return {"max_abs": mp.nstr(self.max_abs, 8),
                "scale": mp.nstr(self.scale, 8),
                "normalized": mp.nstr(self.normalized, 8)}


def check_power_orthogonality(q: BigPolynomial, sigma_interval, n: int,
                              ctx: PrecisionCtx) -> OrthogonalityReport:
    """max over k < n of |integral x^k Q(x) dsigma(x)|, sigma the arcsine
    measure on [c, d], by the mapped Gauss-Chebyshev rule (exact for
    polynomial integrands at the node count used)."""
    c, d = (mp.mpf(sigma_interval[0]), mp.mpf(sigma_interval[1]))
    if n == 0:
        return OrthogonalityReport(mp.mpf(0), mp.mpf(1), ())
    with ctx.workprec():
        N = max(2 * n + 2, 32)
        N = 1 << (N - 1).bit_length()
        xs0, _ = _chebyshev_nodes(N)
        xs = [(c + d) / 2 + (d - c) / 2 * x for x in xs0]
        qv = [q(x) for x in xs]
        vals = []
        pw = [mp.mpf(1)] * N
        for k in range(n):
            vals.append(abs(mp.fsum((pw[j] * qv[j] for j in range(N)),
                                    absolute=False) / N))
            if k < n - 1:
                for j in range(N):
                    pw[j] *= xs[j]
        scale = q.max_coeff() * max(abs(c), abs(d)) ** n
    return OrthogonalityReport(max(vals), scale, tuple(vals))


def check_contour_orthogonality(q: BigPolynomial, f, table: InterpolationTable,
                                center, radius, ctx: PrecisionCtx,
                                n: Optional[int] = None,
                                extra_power: int = 0) -> OrthogonalityReport:
    """max over k < n of |(1/2 pi i) * contour integral of
    Q(z) z^k f(z) / Omega(z)| on the circle `center`, `radius`.

    The circle must enclose the relevant cut while all finite table nodes
    stay strictly outside.  ``extra_power`` widens the power range (e.g.
    ``extra_power=1`` includes k = n, the first non-vanishing moment).
    """
    if n is None:
        n = q.degree
    spec = f if isinstance(f, FunctionSpec) else None
    evaluator = (lambda z: spec.evaluate(z, ctx)) if spec is not None else f
    center = mp.mpc(center)
    with ctx.workprec():
        radius = mp.mpf(radius)
        guard = radius * mp.mpf(2) ** -24
        for zeta in table.finite_nodes:
            dist = abs(zeta - center)
            if abs(dist - radius) <= guard:
                raise TableError(f"node {zeta} within guard of the contour")
            if dist < radius:
                raise TableError(f"node {zeta} inside the contour")
        omega = table.omega(ctx)
        kmax = n + extra_power

        def batch(nn):
            ws = unit_roots(nn, ctx)
            zs = [center + radius * w for w in ws]
            base = [q(z) * evaluator(z) / omega(z) * (z - center)
                    for z in zs]
            out = []
            pw = [mp.mpc(1)] * nn
            for k in range(kmax):
                out.append(mp.fsum((base[j] * pw[j] for j in range(nn)),
                                   absolute=False) / nn)
                if k < kmax - 1:
                    for j in range(nn):
                        pw[j] *= zs[j]
            scale_loc = max(abs(b) for b in base) * max(
                mp.mpf(1), (abs(center) + radius)) ** max(kmax - 1, 0)
            return out, scale_loc

        N = 256
        prev, scale = batch(N)
        for _ in range(8):
            N *= 2
            cur, scale = batch(N)
            change = max(abs(a - b) for a, b in zip(prev, cur))
            if change <= ctx.quad_target * max(scale, mp.mpf(1)):
                vals = [abs(v) for v in cur]
                return OrthogonalityReport(max(vals[:n]) if n else mp.mpf(0),
                                           scale, tuple(vals))
            prev = cur
    raise TableError("contour orthogonality quadrature did not stabilize")
