"""High-precision root extraction, zeros on a segment, counting measures,
and logarithmic-potential comparison of point distributions."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import mpmath as mp

from .numkernel import CHEBYSHEV, MONOMIAL, BigPolynomial, PrecisionCtx, convert_basis


class RootFindingError(Exception):
    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial


@dataclass(frozen=True)
class ZeroSet:
    """Multiset of polynomial zeros with a residual certificate.

    ``residual`` is max over roots of |p(z)| / sum_j |a_j| |z|^j, the
    natural coefficient-relative backward error at the root.
    """

    points: tuple
    source: str
    residual: mp.mpf
    order: Optional[int] = None

    def __len__(self):
        return len(self.points)

    def conjugated(self) -> "ZeroSet":
        return ZeroSet(tuple(mp.conj(z) for z in self.points),
                       self.source, self.residual, self.order)


@dataclass(frozen=True)
class DiscreteMeasure:
    """Nonnegative weights on a finite point set with a declared mass."""

    points: tuple
    weights: tuple
    mass: float

    def __post_init__(self):
        pts = tuple(complex(z) for z in self.points)
        ws = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", ws)
        if len(pts) != len(ws):
            raise ValueError("points and weights must align")
        if any(w < 0 for w in ws):
            raise ValueError("weights must be nonnegative")
        total = sum(ws)
        if abs(total - self.mass) > 1e-9 * max(1.0, abs(self.mass)):
            raise ValueError(f"weights sum to {total}, declared {self.mass}")

    def potential(self, z) -> float:
        z = complex(z)
        return -sum(w * math.log(abs(z - x))
                    for x, w in zip(self.points, self.weights))


def counting_measure(zeros: Sequence, total_mass: float) -> DiscreteMeasure:
    """Equal weights summing to ``total_mass`` on the given points."""
    pts = tuple(complex(z) for z in zeros)
    if not pts:
        raise ValueError("empty point set")
    w = total_mass / len(pts)
    return DiscreteMeasure(pts, tuple(w for _ in pts), total_mass)


def _horner_with_derivative(coeffs, z):
    p = mp.mpc(0)
    dp = mp.mpc(0)
    for a in reversed(coeffs):
        dp = dp * z + p
        p = p * z + a
    return p, dp


def _polygon_start_points(coeffs, d):
    """Aberth starting guesses from the Newton polygon of the coefficients.

    The upper convex hull of (k, log2 |a_k|) groups the roots into annuli
    with radius estimates 2**(slope); guesses are spread on those circles
    with golden-ratio angular offsets per group, which also breaks any
    sign symmetry of the polynomial.  Far better than a single bounding
    circle when the coefficients are severely graded (near degree drops,
    clustered roots).
    """
    mags = []
    for k, c in enumerate(coeffs):
        mags.append(None if c == 0 else float(mp.mag(c)))
    hull = []  # indices of upper-hull vertices
    for k in range(d + 1):
        if mags[k] is None:
            continue
        while len(hull) >= 2:
            i, j = hull[-2], hull[-1]
            # keep the hull upper-convex: drop j if it lies below the
            # chord from i to k
            if (mags[j] - mags[i]) * (k - i) <= (mags[k] - mags[i]) * (j - i):
                hull.pop()
            else:
                break
        hull.append(k)
    out = []
    golden = mp.mpf("0.6180339887498949")
    for g in range(len(hull) - 1):
        k1, k2 = hull[g], hull[g + 1]
        m = k2 - k1
        radius = mp.mpf(2) ** (mp.mpf(mags[k1] - mags[k2]) / m)
        for t in range(m):
            ang = 2 * mp.pi * (mp.mpf(t) / m + g * golden) + mp.mpf("0.437")
            out.append(radius * mp.e ** (1j * ang))
    return out


def find_roots(p: BigPolynomial, max_sweeps: int = 400) -> ZeroSet:
    """All roots of p by the Aberth-Ehrlich simultaneous iteration.

    Deterministic: initial guesses sit on the Cauchy-bound circle at fixed
    angular offsets, and the sweep order is fixed.  Chebyshev-basis input
    is converted to the monomial basis at elevated precision
    (bits + 4 * degree) to absorb the conversion conditioning.
    """
    ctx = p.ctx
    extra = 4 * p.degree if p.basis == CHEBYSHEV else 0
    if p.basis == CHEBYSHEV:
        with mp.workprec(ctx.bits + extra + 64):
            p = convert_basis(p, MONOMIAL)
    deg = p.degree
    if deg < 1:
        raise ValueError("degree must be >= 1")
    lead = abs(p.coeffs[-1])
    if lead <= ctx.tol * p.max_coeff():
        raise ValueError("leading coefficient below the trim threshold")
    wbits = ctx.bits + extra + 64
    with mp.workprec(wbits):
        coeffs = [mp.mpc(c) / p.coeffs[-1] for c in p.coeffs]
        # exact zero constant terms deflate to roots at the origin
        zero_roots = 0
        while len(coeffs) > 1 and coeffs[0] == 0:
            coeffs = coeffs[1:]
            zero_roots += 1
        d = len(coeffs) - 1
        roots = []
        if d > 0 and all(c == 0 for c in coeffs[:-1]):
            roots = [mp.mpc(0)] * d
            d = 0
        if d > 0:
            zs = _polygon_start_points(coeffs, d)
            abs_coeffs = [abs(c) for c in coeffs]
            target = mp.mpf(2) ** (-(ctx.bits + extra + 8))
            # attainable backward error: Horner roundoff grows with degree
            floor = (d + 1) * mp.mpf(2) ** (-(wbits - 8))
            settled = [False] * d
            converged = False
            for _ in range(max_sweeps):
                for k in range(d):
                    if settled[k]:
                        continue
                    pv, dv = _horner_with_derivative(coeffs, zs[k])
                    zb = abs(zs[k])
                    scale = mp.mpf(0)
                    for a in reversed(abs_coeffs):
                        scale = scale * zb + a
                    if abs(pv) <= floor * scale:
                        settled[k] = True
                        continue
                    if dv == 0:
                        zs[k] += target
                        continue
                    nk = pv / dv
                    sk = mp.mpc(0)
                    for j in range(d):
                        if j != k:
                            sk += 1 / (zs[k] - zs[j])
                    denom = 1 - nk * sk
                    wk = nk if denom == 0 else nk / denom
                    zs[k] -= wk
                    if abs(wk) <= target * (1 + abs(zs[k])):
                        settled[k] = True
                if all(settled):
                    converged = True
                    break
            roots = zs
            if not converged:
                partial = _finish(p, roots, zero_roots, ctx)
                raise RootFindingError(
                    f"Aberth iteration did not settle after {max_sweeps} "
                    f"sweeps ({settled.count(False)} roots open)",
                    partial=partial)
        return _finish(p, roots, zero_roots, ctx)


def _finish(p: BigPolynomial, roots, zero_roots: int, ctx) -> ZeroSet:
    with ctx.workprec():
        pts = [mp.mpc(0)] * zero_roots + list(roots)
        pts.sort(key=lambda z: (z.real, z.imag))
        resid = mp.mpf(0)
        for z in pts:
            pv = p(z)
            if pv == 0:
                continue
            denom = mp.fsum(abs(c) * abs(z) ** j
                            for j, c in enumerate(p.coeffs))
            resid = max(resid, abs(pv) / max(denom, p.max_coeff()))
    return ZeroSet(tuple(pts), source="", residual=resid)


@dataclass(frozen=True)
class SegmentZeros:
    zeros: tuple
    expected: Optional[int]
    warning: Optional[str]

    def __len__(self):
        return len(self.zeros)


def zeros_on_segment(r: Callable, segment, budget: int, ctx: PrecisionCtx,
                     expected: Optional[int] = None) -> SegmentZeros:
    """Real zeros of a continuous real function on a segment.

    Sign-change bracketing on a Chebyshev-spaced grid of ``budget``
    points, then bisection until the bracket width drops below tol.
    When ``expected`` is given and the count differs, a refinement hint
    is attached instead of an error.
    """
    a, b = mp.mpf(segment[0]), mp.mpf(segment[1])
    if budget < 2:
        raise ValueError("budget must be >= 2")
    with ctx.workprec():
        mid, half = (a + b) / 2, (b - a) / 2
        xs = [mid - half * mp.cos(mp.pi * i / (budget - 1))
              for i in range(budget)]
        vals = [mp.mpf(r(x)) for x in xs]
        zeros = []
        for i in range(budget - 1):
            va, vb = vals[i], vals[i + 1]
            if va == 0:
                zeros.append(xs[i])
                continue
            if va * vb < 0:
                lo, hi, flo = xs[i], xs[i + 1], va
                while hi - lo > ctx.tol:
                    c = (lo + hi) / 2
                    fc = mp.mpf(r(c))
                    if fc == 0:
                        lo = hi = c
                        break
                    if flo * fc < 0:
                        hi = c
                    else:
                        lo, flo = c, fc
                zeros.append((lo + hi) / 2)
        if vals[-1] == 0:
            zeros.append(xs[-1])
        zeros = sorted(zeros)
    warning = None
    if expected is not None and len(zeros) != expected:
        warning = (f"found {len(zeros)} zeros, expected {expected}; "
                   f"retry with a denser grid (budget > {2 * budget})")
    return SegmentZeros(tuple(zeros), expected, warning)


def trimmed_hausdorff(a: Sequence, b: Sequence, trim: float) -> float:
    """Symmetric Hausdorff distance after discarding, from each set, the
    ceil(trim * size) points farthest from the other set.

    Distances are measured against the full other set, so trim = 0 is the
    classical Hausdorff distance.
    """
    if not (0 <= trim < 0.5):
        raise ValueError("trim must lie in [0, 1/2)")
    pa = [complex(z) for z in a]
    pb = [complex(z) for z in b]
    if not pa or not pb:
        raise ValueError("point sets must be nonempty")

    def directed(src, dst):
        ds = sorted(min(abs(x - y) for y in dst) for x in src)
        drop = math.ceil(trim * len(src)) if trim > 0 else 0
        kept = ds[: len(ds) - drop] if drop else ds
        return kept[-1] if kept else 0.0

    return max(directed(pa, pb), directed(pb, pa))


def potential_discrepancy(mu: DiscreteMeasure, nu: DiscreteMeasure,
                          probes: Sequence, mass_tol: float = 0.0) -> float:
    """sup over probes of |U^mu - U^nu| with U the logarithmic potential.

    Total masses must match within ``mass_tol`` (absolute); probes must
    keep distance >= 1/4 from both supports.
    """
    if abs(mu.mass - nu.mass) > mass_tol + 1e-12:
        raise ValueError(f"mass mismatch: {mu.mass} vs {nu.mass}")
    pts = [complex(z) for z in probes]
    if not pts:
        raise ValueError("need at least one probe")
    for z in pts:
        for m in (mu, nu):
            d = min(abs(z - x) for x in m.points)
            if d < 0.25:
                raise ValueError(f"probe {z} within 1/4 of a support point")
    return max(abs(mu.potential(z) - nu.potential(z)) for z in pts)


def probe_circle(radius: float = 3.0, count: int = 64) -> list:
    """Equispaced probe points on |z| = radius."""
    return [radius * complex(math.cos(2 * math.pi * k / count),
                             math.sin(2 * math.pi * k / count))
            for k in range(count)]


# ---------------------------------------------------------------------------
# CSV contract consumed by the plotting front end
# ---------------------------------------------------------------------------

def write_zeros_csv(path, zeros: ZeroSet, source: str, order: int,
                    ctx: PrecisionCtx) -> int:
    """Write `re,im,source,n` rows with full-precision decimal strings.

    Returns the number of data rows written.
    """
    d = ctx.decimal_digits
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["re", "im", "source", "n"])
        for z in zeros.points:
            w.writerow([mp.nstr(z.real, d), mp.nstr(z.imag, d), source, order])
    return len(zeros.points)


def read_zeros_csv(path) -> list:
    """Rows as (re_string, im_string, source, n_string)."""
    out = []
    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd)
        if header[:4] != ["re", "im", "source", "n"]:
            raise ValueError(f"unexpected zeros CSV header: {header}")
        for row in rd:
            out.append((row[0], row[1], row[2], row[3]))
    return out
