"""Type I Hermite-Pade polynomials for tuples [1, f1, f2] with multiindex
(n-1, n, n), from the Laurent data of f1 and f2 at infinity."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import mpmath as mp

from .numkernel import (MONOMIAL, BigPolynomial, LaurentTail, PrecisionCtx,
                        nullspace_vector)


@dataclass(frozen=True)
class HPTriple:
    """(Q0, Q1, Q2) with Q0 + Q1 f1 + Q2 f2 = O(z^-(2n+2)).

    Q1, Q2 have degree <= n.  Q0 absorbs the polynomial part; its degree
    is <= n-1 when f1(inf) = f2(inf) = 0 and <= n otherwise (the constant
    terms are re-injected into Q0 on output).  ``defect_order`` is the
    first Laurent index where the remainder fails to vanish (None when no
    nonzero coefficient was found up to the inspected order).
    """

    q0: BigPolynomial
    q1: BigPolynomial
    q2: BigPolynomial
    order: int
    defect_order: Optional[int]
    degenerate: bool
    residual: mp.mpf

    def to_dict(self) -> dict:
        return {
            "q0": self.q0.coeff_strings(),
            "q1": self.q1.coeff_strings(),
            "q2": self.q2.coeff_strings(),
            "order": self.order,
            "defect_order": self.defect_order,
            "degenerate": self.degenerate,
            "residual": mp.nstr(self.residual, 8),
            "precision": self.q0.ctx.to_dict(),
        }


def _tail_scale(*tails: LaurentTail) -> mp.mpf:
    return max(max(abs(c) for c in t.coeffs) for t in tails)


def hp_type1(f1: LaurentTail, f2: LaurentTail, n: int,
             ctx: PrecisionCtx) -> HPTriple:
    """Type I Hermite-Pade triple of order n for the tuple [1, f1, f2].

    The constant terms are subtracted internally (g_j = f_j - f_j(inf)),
    which closes the homogeneous system at 2n+1 conditions on the 2n+2
    coefficients of (Q1, Q2); the constants are re-injected into Q0 on
    output.  Normalization: the largest stacked coefficient of (Q1, Q2)
    equals one.  A solution space of dimension > 1 sets ``degenerate``.
    """
    if n < 0:
        raise ValueError("order must be >= 0")
    K = 3 * n + 2
    if f1.order < K or f2.order < K:
        raise ValueError(f"tails must have order >= 3n+2 = {K}")
    with ctx.workprec():
        g1 = (mp.mpc(0),) + f1.coeffs[1:]
        g2 = (mp.mpc(0),) + f2.coeffs[1:]
        rows = []
        for k in range(1, 2 * n + 2):
            rows.append([g1[k + j] for j in range(n + 1)]
                        + [g2[k + j] for j in range(n + 1)])
        sol = nullspace_vector(rows, ctx)
        q1 = sol.vector[: n + 1]
        q2 = sol.vector[n + 1:]
        # polynomial part of Q1 g1 + Q2 g2 (degree <= n-1), then constants
        q0 = []
        for t in range(n):
            s = mp.mpc(0)
            for j in range(t + 1, n + 1):
                s += q1[j] * g1[j - t] + q2[j] * g2[j - t]
            q0.append(-s)
        q0.append(mp.mpc(0))
        c01, c02 = f1.coeffs[0], f2.coeffs[0]
        q0 = [a - c01 * b - c02 * c for a, b, c in zip(q0, q1, q2)]
    probe = HPTriple(
        q0=BigPolynomial(MONOMIAL, tuple(q0), ctx),
        q1=BigPolynomial(MONOMIAL, tuple(q1), ctx),
        q2=BigPolynomial(MONOMIAL, tuple(q2), ctx),
        order=n,
        defect_order=None,
        degenerate=sol.degenerate,
        residual=sol.residual,
    )
    rem = hp_remainder_coeffs(probe, f1, f2, min(2 * n + 4, K - n))
    defect = _first_nonzero(rem, ctx, _tail_scale(f1, f2))
    return HPTriple(probe.q0, probe.q1, probe.q2, n, defect,
                    sol.degenerate, sol.residual)


def _first_nonzero(rem: LaurentTail, ctx: PrecisionCtx, data_scale) -> Optional[int]:
    thresh = ctx.tol * max(data_scale, mp.mpf(1))
    for k in range(1, rem.order + 1):
        if abs(rem.coeffs[k]) > thresh:
            return k
    return None


def hp_remainder_coeffs(t: HPTriple, f1: LaurentTail, f2: LaurentTail,
                        K: int) -> LaurentTail:
    """Laurent tail of Q0 + Q1 f1 + Q2 f2 through z^-K.

    Index 0 holds the constant coefficient (zero up to roundoff by
    construction); positive powers vanish identically.
    """
    n = t.order
    if K > min(f1.order, f2.order) - n:
        raise ValueError("K exceeds what the input tails support")
    ctx = t.q0.ctx
    with ctx.workprec():
        q0 = list(t.q0.coeffs) + [mp.mpc(0)] * (n + 1 - len(t.q0.coeffs))
        q1 = list(t.q1.coeffs) + [mp.mpc(0)] * (n + 1 - len(t.q1.coeffs))
        q2 = list(t.q2.coeffs) + [mp.mpc(0)] * (n + 1 - len(t.q2.coeffs))
        out = []
        for k in range(K + 1):
            s = mp.mpc(q0[0]) if k == 0 else mp.mpc(0)
            for j in range(n + 1):
                if k + j <= f1.order:
                    s += q1[j] * f1.coeffs[k + j]
                if k + j <= f2.order:
                    s += q2[j] * f2.coeffs[k + j]
            out.append(s)
    return LaurentTail(tuple(out), ctx, max(f1.radius, f2.radius))
