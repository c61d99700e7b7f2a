"""Arbitrary-precision numeric substrate: polynomials, Laurent tails,
homogeneous linear solving, and circle quadrature.

All scalars are mpmath binary floats driven by an explicit
:class:`PrecisionCtx`.  Every operation is a pure function of its inputs;
values are immutable after construction and safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import mpmath as mp

MONOMIAL = "monomial"
CHEBYSHEV = "chebyshev"

# Extra working bits used inside kernels so results are correctly rounded
# at the context precision.
GUARD_BITS = 32


class RankDeficiencyError(Exception):
    """Homogeneous system has a solution space of dimension > 1."""


class QuadratureError(Exception):
    """Circle quadrature failed to stabilize under node doubling."""


@dataclass(frozen=True)
class PrecisionCtx:
    """Binary precision policy shared by a computation.

    Parameters
    ----------
    bits : int
        Working precision of all scalars, at least 64.
    tol : mpmath.mpf, optional
        Acceptance threshold for residual checks.  Defaults to
        ``2**(-bits/2)`` and must stay above ``2**(-bits+8)``.
    """

    bits: int
    tol: mp.mpf = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.bits < 64:
            raise ValueError(f"bits must be >= 64, got {self.bits}")
        tol = self.tol
        if tol is None:
            with mp.workprec(64):
                tol = mp.mpf(2) ** (-self.bits // 2)
        tol = mp.mpf(tol)
        if not tol > 0:
            raise ValueError("tol must be positive")
        with mp.workprec(64):
            if tol < mp.mpf(2) ** (-self.bits + 8):
                raise ValueError("tol below what the precision can support")
        object.__setattr__(self, "tol", tol)

    def workprec(self, extra: int = GUARD_BITS):
        return mp.workprec(self.bits + extra)

    @property
    def quad_target(self) -> mp.mpf:
        """Relative stabilization target for adaptive quadratures.

        Much tighter than ``tol``: quadrature results feed exact-identity
        checks, so they are pushed near full precision.
        """
        with mp.workprec(64):
            return mp.mpf(2) ** (-self.bits + 24)

    @property
    def decimal_digits(self) -> int:
        return int(self.bits * 0.30103) + 4

    def to_dict(self) -> dict:
        return {"bits": self.bits, "tol": mp.nstr(self.tol, 8)}


def default_ctx(n: int, per_order: int = 24, floor: int = 256) -> PrecisionCtx:
    """Precision scaled with the approximation order n."""
    return PrecisionCtx(bits=max(floor, per_order * max(n, 1)))


def _as_mpc(x) -> mp.mpc:
    return x if isinstance(x, mp.mpc) else mp.mpc(x)


@dataclass(frozen=True)
class BigPolynomial:
    """Dense polynomial in the monomial or Chebyshev (first kind) basis.

    ``coeffs[k]`` multiplies ``x**k`` or ``T_k(x)`` depending on ``basis``.
    Trailing coefficients below ``tol * max|coeff|`` are trimmed at
    construction, so ``degree`` is the numerically supported degree.
    """

    basis: str
    coeffs: tuple
    ctx: PrecisionCtx

    def __post_init__(self):
        if self.basis not in (MONOMIAL, CHEBYSHEV):
            raise ValueError(f"unknown basis {self.basis!r}")
        cs = [_as_mpc(c) for c in self.coeffs]
        if not cs:
            cs = [mp.mpc(0)]
        mx = max(abs(c) for c in cs)
        if mx == 0:
            cs = [mp.mpc(0)]
        else:
            cut = self.ctx.tol * mx
            last = 0
            for i, c in enumerate(cs):
                if abs(c) > cut:
                    last = i
            cs = cs[: last + 1]
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self) -> int:
        if len(self.coeffs) == 1 and self.coeffs[0] == 0:
            return 0
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0

    def __call__(self, z):
        z = _as_mpc(z)
        with self.ctx.workprec():
            if self.basis == MONOMIAL:
                acc = mp.mpc(0)
                for c in reversed(self.coeffs):
                    acc = acc * z + c
                return acc
            return _clenshaw(self.coeffs, z)

    def scaled(self, s) -> "BigPolynomial":
        with self.ctx.workprec():
            s = _as_mpc(s)
            cs = tuple(c * s for c in self.coeffs)
        return BigPolynomial(self.basis, cs, self.ctx)

    def max_coeff(self) -> mp.mpf:
        return max(abs(c) for c in self.coeffs)

    def derivative(self) -> "BigPolynomial":
        if self.basis != MONOMIAL:
            raise ValueError("derivative only implemented in the monomial basis")
        if self.degree == 0:
            return BigPolynomial(MONOMIAL, (mp.mpc(0),), self.ctx)
        with self.ctx.workprec():
            cs = tuple(k * self.coeffs[k] for k in range(1, len(self.coeffs)))
        return BigPolynomial(MONOMIAL, cs, self.ctx)

    def coeff_strings(self) -> list:
        d = self.ctx.decimal_digits
        return [[mp.nstr(c.real, d), mp.nstr(c.imag, d)] for c in self.coeffs]


def _clenshaw(coeffs: Sequence, z) -> mp.mpc:
    b1 = mp.mpc(0)
    b2 = mp.mpc(0)
    two_z = 2 * z
    for c in reversed(coeffs[1:]):
        b1, b2 = two_z * b1 - b2 + c, b1
    return z * b1 - b2 + coeffs[0]


@dataclass(frozen=True)
class LaurentTail:
    """Truncated expansion sum_k coeffs[k] * z**(-k) around infinity.

    ``radius`` is the modulus bound of the declared singularities; the
    expansion converges for |z| > radius and :meth:`remainder_bound` is
    valid for |z| >= 2 * (1 + radius).
    """

    coeffs: tuple
    ctx: PrecisionCtx
    radius: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(_as_mpc(c) for c in self.coeffs))
        if self.order < 0:
            raise ValueError("tail needs at least the constant coefficient")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        z = _as_mpc(z)
        with self.ctx.workprec():
            w = 1 / z
            acc = mp.mpc(0)
            for c in reversed(self.coeffs):
                acc = acc * w + c
            return acc

    def remainder_bound(self, z) -> mp.mpf:
        q = (1 + self.radius) / abs(_as_mpc(z))
        if q >= 1:
            raise ValueError("evaluation point inside the convergence bound")
        mx = max(abs(c) for c in self.coeffs)
        return mx * q ** (self.order + 1) / (1 - q)

    def shifted_constant(self, delta) -> "LaurentTail":
        cs = list(self.coeffs)
        cs[0] = cs[0] + _as_mpc(delta)
        return LaurentTail(tuple(cs), self.ctx, self.radius)


def convert_basis(p: BigPolynomial, target: str) -> BigPolynomial:
    """Re-express ``p`` in ``target`` basis (monomial <-> Chebyshev).

    The conversion runs at elevated precision; a round trip reproduces the
    coefficients to ``2**(-bits+12)`` relative accuracy for degrees <= 100.
    """
    if target not in (MONOMIAL, CHEBYSHEV):
        raise ValueError(f"unknown basis {target!r}")
    if p.basis == target:
        return p
    n = len(p.coeffs)
    with mp.workprec(p.ctx.bits + GUARD_BITS + 4 * n):
        if target == MONOMIAL:
            # accumulate monomial images of T_k via the three-term recurrence
            out = [mp.mpc(0)] * n
            tkm1 = [mp.mpc(1)]
            out[0] += p.coeffs[0]
            if n > 1:
                tk = [mp.mpc(0), mp.mpc(1)]
                for i, c in enumerate(tk):
                    if c != 0:
                        out[i] += p.coeffs[1] * c
                for k in range(2, n):
                    tkp1 = [mp.mpc(0)] + [2 * c for c in tk]
                    for i, c in enumerate(tkm1):
                        tkp1[i] -= c
                    for i, c in enumerate(tkp1):
                        if c != 0:
                            out[i] += p.coeffs[k] * c
                    tkm1, tk = tk, tkp1
            return BigPolynomial(MONOMIAL, tuple(out), p.ctx)
        # monomial -> Chebyshev: x**k expanded by x*T_j = (T_{j+1}+T_{|j-1|})/2
        out = [mp.mpc(0)] * n
        xk = [mp.mpc(1)]  # Chebyshev coefficients of x**k
        out[0] += p.coeffs[0]
        for k in range(1, n):
            nxt = [mp.mpc(0)] * (len(xk) + 1)
            for j, c in enumerate(xk):
                if c == 0:
                    continue
                if j == 0:
                    nxt[1] += c
                else:
                    nxt[j + 1] += c / 2
                    nxt[abs(j - 1)] += c / 2
            xk = nxt
            for i, c in enumerate(xk):
                if c != 0:
                    out[i] += p.coeffs[k] * c
        return BigPolynomial(CHEBYSHEV, tuple(out), p.ctx)


def cheb_product(j: int, k: int) -> list:
    """Linearization T_j * T_k = sum of (index, weight) pairs.

    Weights are exact dyadic rationals; coincident indices are merged.
    """
    if j < 0 or k < 0:
        raise ValueError("indices must be nonnegative")
    half = mp.mpf(1) / 2
    hi, lo = j + k, abs(j - k)
    if hi == lo:
        return [(hi, mp.mpf(1))]
    return [(hi, half), (lo, half)]


def laurent_mul(a: LaurentTail, b: LaurentTail) -> LaurentTail:
    """Cauchy product of two tails, truncated at min(order_a, order_b)."""
    if a.ctx.bits != b.ctx.bits:
        raise ValueError("tails must share a precision context")
    K = min(a.order, b.order)
    with a.ctx.workprec():
        out = []
        for k in range(K + 1):
            s = mp.mpc(0)
            for i in range(k + 1):
                s += a.coeffs[i] * b.coeffs[k - i]
            out.append(s)
    return LaurentTail(tuple(out), a.ctx, max(a.radius, b.radius))


@dataclass(frozen=True)
class NullspaceResult:
    """Nontrivial solution of a homogeneous m x (m+1) system."""

    vector: tuple
    subspace_dim: int
    residual: mp.mpf

    @property
    def degenerate(self) -> bool:
        return self.subspace_dim > 1


def nullspace_vector(rows: Sequence[Sequence], ctx: PrecisionCtx,
                     rank_tol=None) -> NullspaceResult:
    """Solve M v = 0 for an m x (m+1) matrix by full-pivot elimination.

    Returns a deterministic vector normalized so its largest-modulus entry
    equals one (ties broken by lowest index).  Rank deficiency beyond the
    guaranteed one-dimensional kernel is reported via ``subspace_dim``; the
    returned vector is then the representative with the lexicographically
    first free column set to one and the others zeroed.

    ``rank_tol`` defaults to a few-bits-above-roundoff threshold
    (2**(48-bits)): severely graded but regular systems keep their full
    rank, while structurally repeated data collapses to elimination noise
    and is flagged.  The acceptance tolerance ``ctx.tol`` plays no role
    here; it only scales the residual contract.
    """
    m = len(rows)
    if m < 1:
        raise ValueError("empty system")
    ncols = len(rows[0])
    if ncols != m + 1:
        raise ValueError(f"expected {m}x{m+1} system, got {m}x{ncols}")
    with ctx.workprec():
        A = [[_as_mpc(x) for x in row] for row in rows]
        if any(len(row) != ncols for row in A):
            raise ValueError("ragged matrix")
        norm = max((mp.fsum(abs(x) for x in row) for row in A), default=mp.mpf(0))
        scale = max((abs(x) for row in A for x in row), default=mp.mpf(0))
        if rank_tol is None:
            rank_tol = mp.mpf(2) ** (-max(ctx.bits - 48, 32))
        pivot_cut = rank_tol * scale
        colperm = list(range(ncols))
        rank = m
        for step in range(m):
            best_i, best_j, best = step, step, mp.mpf(-1)
            for i in range(step, m):
                for j in range(step, ncols):
                    v = abs(A[i][j])
                    if v > best:
                        best, best_i, best_j = v, i, j
            if best <= pivot_cut:
                rank = step
                break
            A[step], A[best_i] = A[best_i], A[step]
            if best_j != step:
                for r in range(m):
                    A[r][step], A[r][best_j] = A[r][best_j], A[r][step]
                colperm[step], colperm[best_j] = colperm[best_j], colperm[step]
            piv = A[step][step]
            for i in range(step + 1, m):
                f = A[i][step] / piv
                if f == 0:
                    continue
                A[i][step] = mp.mpc(0)
                for j in range(step + 1, ncols):
                    A[i][j] -= f * A[step][j]
        free_cols = sorted(colperm[rank:])
        x = [mp.mpc(0)] * ncols
        # lexicographically first free column carries the unit entry
        unit_col = free_cols[0]
        for pos in range(rank, ncols):
            x[pos] = mp.mpc(1) if colperm[pos] == unit_col else mp.mpc(0)
        for i in range(rank - 1, -1, -1):
            s = mp.mpc(0)
            for j in range(i + 1, ncols):
                if x[j] != 0:
                    s += A[i][j] * x[j]
            x[i] = -s / A[i][i]
        v = [mp.mpc(0)] * ncols
        for pos in range(ncols):
            v[colperm[pos]] = x[pos]
        big, idx = mp.mpf(-1), 0
        for j, c in enumerate(v):
            a = abs(c)
            if a > big:
                big, idx = a, j
        v = [c / v[idx] for c in v]
        resid = mp.mpf(0)
        for row in rows:
            s = mp.fsum((_as_mpc(row[j]) * v[j] for j in range(ncols)),
                        absolute=False)
            resid = max(resid, abs(s))
        if norm > 0:
            resid = resid / norm
    return NullspaceResult(tuple(v), ncols - rank, resid)


@dataclass(frozen=True)
class ContourResult:
    value: mp.mpc
    converged: bool
    nodes: int
    last_change: mp.mpf


def unit_roots(n: int, ctx: PrecisionCtx) -> list:
    """exp(2*pi*i*j/n) for j in range(n), at context precision."""
    with ctx.workprec():
        return [mp.e ** (2j * mp.pi * mp.mpf(j) / n) for j in range(n)]


def contour_integrate(g: Callable, center, radius, nodes: int,
                      ctx: PrecisionCtx, target=None,
                      max_doublings: int = 12) -> ContourResult:
    """(1/2*pi*i) * integral of g over the circle |z - center| = radius.

    Trapezoid rule, spectrally accurate for g analytic in an annulus
    around the circle.  Nodes are doubled until two successive values
    agree to ``target`` (relative); failure to stabilize raises
    :class:`QuadratureError` unless the caller inspects ``converged``.
    """
    if nodes < 2 or nodes & (nodes - 1):
        raise ValueError("nodes must be a power of two >= 2")
    if target is None:
        target = ctx.quad_target
    center = _as_mpc(center)
    with ctx.workprec():
        radius = mp.mpf(radius)

        def ring_sum(points):
            # sum of g(center + r*w) * r*w over unit-circle samples w
            return mp.fsum((g(center + radius * w) * w for w in points),
                           absolute=False) * radius / len(points)

        pts = unit_roots(nodes, ctx)
        vals = [ring_sum(pts)]
        n_now = nodes
        for _ in range(max_doublings):
            n_now *= 2
            pts = unit_roots(n_now, ctx)
            vals.append(ring_sum(pts))
            change = abs(vals[-1] - vals[-2])
            scale = max(mp.mpf(1), abs(vals[-1]))
            if change <= target * scale:
                return ContourResult(vals[-1], True, n_now, change)
        return ContourResult(vals[-1], False, n_now, abs(vals[-1] - vals[-2]))


def laurent_from_samples(g: Callable, K: int, radius, ctx: PrecisionCtx,
                         start_nodes: int = 256, target=None,
                         max_doublings: int = 10,
                         singular_radius: float = 1.0) -> LaurentTail:
    """Laurent tail of g at infinity from shared circle samples.

    Computes c_k = (1/2*pi*i) * integral g(z) z^{k-1} dz on |z| = radius
    for k = 0..K with one set of samples per refinement level, doubling
    until every coefficient stabilizes relative to the largest one.
    """
    if target is None:
        target = ctx.quad_target

    def batch(n):
        # powers of unit-circle nodes only (no cancellation growth); the
        # R**k rescaling to true coefficients happens after convergence
        with ctx.workprec():
            R = mp.mpf(radius)
            pts = unit_roots(n, ctx)
            vals = [g(R * w) for w in pts]
            out = []
            wpow = [mp.mpc(1)] * n
            for k in range(K + 1):
                s = mp.fsum((vals[j] * wpow[j] for j in range(n)),
                            absolute=False) / n
                out.append(s)
                if k < K:
                    for j in range(n):
                        wpow[j] *= pts[j]
            scale = max(max(abs(v) for v in vals), mp.mpf(1))
            return out, scale

    n_now = start_nodes
    prev, _ = batch(n_now)
    worst = None
    for _ in range(max_doublings):
        n_now *= 2
        cur, scale = batch(n_now)
        with ctx.workprec():
            worst = max(abs(a - b) for a, b in zip(prev, cur))
            if worst <= target * scale:
                R = mp.mpf(radius)
                rk = mp.mpf(1)
                coeffs = []
                for k in range(K + 1):
                    coeffs.append(cur[k] * rk)
                    rk *= R
                return LaurentTail(tuple(coeffs), ctx, singular_radius)
        prev = cur
    raise QuadratureError(
        f"Laurent coefficients did not stabilize at {n_now} nodes "
        f"(last change {mp.nstr(worst, 5)})")
