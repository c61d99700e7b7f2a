"""Model functions with fixed branch conventions.

Every variant is a declarative, immutable spec that can be evaluated off
its cut set, expanded at infinity (Laurent tail), and, when it has a
well-defined analytic trace on [-1, 1], expanded in the classical
first-kind Chebyshev basis.

Branch rules
------------
* sqrt(z**2 - 1) = sqrt(z-1) * sqrt(z+1) with principal square roots:
  cut exactly on [-1, 1], asymptotic to z at infinity.
* phi(z) = z + sqrt(z**2 - 1); |phi| > 1 off [-1, 1] and
  phi(z) * (z - sqrt(z**2 - 1)) = 1 identically.
* (A - 1/phi(z))**alpha uses the principal logarithm of the base.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import mpmath as mp

from .numkernel import LaurentTail, PrecisionCtx, laurent_from_samples

DELTA = (Fraction(-1), Fraction(1))


class DomainError(Exception):
    """Evaluation point on a cut or too close to a branch point."""


def _mpf(x):
    """mpf at working precision; exact for Fractions and ints."""
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


def sqrt_z2m1(z):
    """sqrt(z**2 - 1), cut on [-1, 1], ~ z at infinity."""
    z = mp.mpc(z)
    return mp.sqrt(z - 1) * mp.sqrt(z + 1)


def phi_map(z):
    """Inverse Zhukovskii map z + sqrt(z**2 - 1), modulus > 1 off [-1, 1]."""
    return mp.mpc(z) + sqrt_z2m1(z)


def interval_sqrt(z, c, d):
    """sqrt((z-c)(z-d)) with cut on [c, d], ~ z - (c+d)/2 at infinity."""
    c = _mpf(c)
    d = _mpf(d)
    w = (2 * mp.mpc(z) - c - d) / (d - c)
    return (d - c) / 2 * mp.sqrt(w - 1) * mp.sqrt(w + 1)


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**12)
    if isinstance(x, mp.mpf):  # exact dyadic rational
        sign, man, exp, _ = x._mpf_
        man = -man if sign else man
        return Fraction(man) * Fraction(2) ** exp
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def _chebyshev_nodes(N: int):
    # first-kind nodes cos((2j+1) pi / (2N)), plus the angles
    thetas = [(2 * j + 1) * mp.pi / (2 * N) for j in range(N)]
    return [mp.cos(t) for t in thetas], thetas


@lru_cache(maxsize=128)
def _arcsine_sigma_samples(c: Fraction, d: Fraction, N: int, prec: int):
    """Chebyshev nodes on [-1, 1] and sigma_hat values for the arcsine
    measure on [c, d], cached per precision (sigma_hat is reused across
    many evaluation points)."""
    with mp.workprec(prec):
        xs, _ = _chebyshev_nodes(N)
        vals = [1 / interval_sqrt(x, c, d) for x in xs]
    return tuple(xs), tuple(vals)


@dataclass(frozen=True)
class FunctionSpec:
    """Base class; concrete variants implement the evaluation protocol."""

    def variant_name(self) -> str:
        return type(self).__name__

    # -- protocol -------------------------------------------------------
    def evaluate(self, z, ctx: PrecisionCtx):
        raise NotImplementedError

    def trace(self, x, ctx: PrecisionCtx):
        """Value of the analytic trace on (-1, 1); DomainError if singular."""
        raise DomainError(f"{self.variant_name()} is singular on [-1, 1]")

    def singular_radius(self) -> float:
        raise NotImplementedError

    def cut_segments(self) -> list:
        raise NotImplementedError

    def branch_points(self) -> list:
        return []

    def analytic_on_delta(self) -> bool:
        return False

    def params_dict(self) -> dict:
        raise NotImplementedError

    # -- serialization ---------------------------------------------------
    def to_dict(self) -> dict:
        return {"variant": self.variant_name(), "params": self.params_dict()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    # -- shared helpers ---------------------------------------------------
    def _check_off_cuts(self, z, ctx: PrecisionCtx):
        z = mp.mpc(z)
        guard = ctx.tol
        for (a, b) in self.cut_segments():
            a, b = _mpf(a), _mpf(b)
            if abs(z.imag) <= guard and a - guard <= z.real <= b + guard:
                raise DomainError(f"z={z} lies on the cut [{a},{b}]")
        for e in self.branch_points():
            if abs(z - mp.mpc(e)) <= guard:
                raise DomainError(f"z={z} too close to branch point {e}")


@dataclass(frozen=True)
class MarkovArcsine(FunctionSpec):
    """Cauchy transform of the arcsine measure on [c, d]: 1/sqrt((z-c)(z-d)).

    The segment [c, d] must be disjoint from [-1, 1]; the branch behaves
    like 1/z at infinity.
    """

    c: Fraction
    d: Fraction

    def __post_init__(self):
        object.__setattr__(self, "c", _frac(self.c))
        object.__setattr__(self, "d", _frac(self.d))
        if not self.c < self.d:
            raise ValueError("need c < d")
        if not (self.d < -1 or self.c > 1):
            raise ValueError("[c, d] must be disjoint from [-1, 1]")

    def evaluate(self, z, ctx: PrecisionCtx):
        self._check_off_cuts(z, ctx)
        with ctx.workprec():
            return 1 / interval_sqrt(z, self.c, self.d)

    def trace(self, x, ctx: PrecisionCtx):
        with ctx.workprec():
            return 1 / interval_sqrt(mp.mpf(x), self.c, self.d)

    def analytic_on_delta(self) -> bool:
        return True

    def singular_radius(self) -> float:
        return float(max(abs(self.c), abs(self.d)))

    def cut_segments(self) -> list:
        return [(self.c, self.d)]

    def branch_points(self) -> list:
        return [complex(self.c), complex(self.d)]

    def params_dict(self) -> dict:
        return {"c": str(self.c), "d": str(self.d)}


@dataclass(frozen=True)
class InvSqrt(FunctionSpec):
    """1/sqrt(z**2 - 1): the Cauchy transform of the arcsine measure on
    [-1, 1] itself.  Singular on the whole expansion interval."""

    def evaluate(self, z, ctx: PrecisionCtx):
        self._check_off_cuts(z, ctx)
        with ctx.workprec():
            return 1 / sqrt_z2m1(z)

    def singular_radius(self) -> float:
        return 1.0

    def cut_segments(self) -> list:
        return [DELTA]

    def branch_points(self) -> list:
        return [-1.0 + 0j, 1.0 + 0j]

    def params_dict(self) -> dict:
        return {}


@dataclass(frozen=True)
class NikishinSecond(FunctionSpec):
    """Second function of the Nikishin pair on ([-1,1], [c,d]):

        g(z) = integral of sigma_hat(x) dmu(x) / (z - x)

    with mu the normalized arcsine measure on [-1, 1] and sigma the
    arcsine measure on [c, d] (sigma_hat is its Cauchy transform).  The
    double integral collapses to a single Gauss-Chebyshev quadrature of
    the closed-form sigma_hat.
    """

    c: Fraction
    d: Fraction
    mu_interval: tuple = DELTA

    def __post_init__(self):
        object.__setattr__(self, "c", _frac(self.c))
        object.__setattr__(self, "d", _frac(self.d))
        mu = (_frac(self.mu_interval[0]), _frac(self.mu_interval[1]))
        object.__setattr__(self, "mu_interval", mu)
        if mu != DELTA:
            raise ValueError("mu is fixed to the arcsine measure on [-1, 1]")
        if not self.c < self.d:
            raise ValueError("need c < d")
        if not (self.d < -1 or self.c > 1):
            raise ValueError("[c, d] must be disjoint from [-1, 1]")

    def _sigma_hat(self, x):
        return 1 / interval_sqrt(x, self.c, self.d)

    def evaluate(self, z, ctx: PrecisionCtx):
        self._check_off_cuts(z, ctx)
        with ctx.workprec():
            z = mp.mpc(z)
            target = ctx.quad_target
            N = 64
            prev = None
            for _ in range(14):
                xs, vals = _arcsine_sigma_samples(self.c, self.d, N, mp.mp.prec)
                val = mp.fsum((vals[j] / (z - xs[j]) for j in range(N)),
                              absolute=False) / N
                if prev is not None and abs(val - prev) <= target * max(
                        mp.mpf(1), abs(val)):
                    return val
                prev = val
                N *= 2
            raise DomainError(f"quadrature for {self} did not stabilize at z={z}")

    def moment_tail(self, K: int, ctx: PrecisionCtx) -> LaurentTail:
        """Laurent tail at infinity: coefficient of z^-(k+1) is the k-th
        mu-moment of sigma_hat."""
        with ctx.workprec():
            target = ctx.quad_target
            N = max(128, 2 * K)
            N = 1 << (N - 1).bit_length()
            prev = None
            for _ in range(12):
                xs, vals = _arcsine_sigma_samples(self.c, self.d, N, mp.mp.prec)
                mom = []
                pw = [mp.mpf(1)] * N
                for k in range(K):
                    mom.append(mp.fsum((pw[j] * vals[j] for j in range(N)),
                                       absolute=False) / N)
                    if k < K - 1:
                        for j in range(N):
                            pw[j] *= xs[j]
                if prev is not None:
                    scale = max(max(abs(m) for m in mom), mp.mpf(1))
                    if max(abs(a - b) for a, b in zip(prev, mom)) <= target * scale:
                        coeffs = [mp.mpc(0)] + mom
                        return LaurentTail(tuple(coeffs), ctx, 1.0)
                prev = mom
                N *= 2
        raise DomainError("moment quadrature did not stabilize")

    def singular_radius(self) -> float:
        return 1.0

    def cut_segments(self) -> list:
        return [DELTA]

    def branch_points(self) -> list:
        return [-1.0 + 0j, 1.0 + 0j]

    def params_dict(self) -> dict:
        return {"c": str(self.c), "d": str(self.d)}


@dataclass(frozen=True)
class ClassL(FunctionSpec):
    """Product prod_j (A_j - 1/phi(z))**alpha_j with |A_j| > 1 and
    sum(alpha_j) = 0, single-valued and holomorphic off [-1, 1].

    Powers use the principal logarithm of the base.  For the principal
    branch to stay holomorphic off [-1, 1], the ray A_j + [0, inf) must
    avoid the closed unit disk, i.e. Re A_j >= 0 or |Im A_j| > 1.

    The trace on [-1, 1] is the mean of the two boundary values,
    (F(e^{i t}) + F(e^{-i t})) / 2 with x = cos t; it is the unique
    function holomorphic on a neighborhood of [-1, 1] carrying the
    product's Chebyshev coefficient data.
    """

    a_points: tuple
    exponents: tuple

    def __post_init__(self):
        As = tuple(complex(a) for a in self.a_points)
        ex = tuple(_frac(a) for a in self.exponents)
        object.__setattr__(self, "a_points", As)
        object.__setattr__(self, "exponents", ex)
        if len(As) != len(ex) or len(As) < 2:
            raise ValueError("need matching A/alpha lists with m >= 2")
        if sum(ex) != 0:
            raise ValueError("exponents must sum to zero")
        for A, al in zip(As, ex):
            if abs(A) <= 1:
                raise ValueError(f"|A| must exceed 1, got {A}")
            # integer exponents are branch-free; otherwise the principal
            # cut A + [0, inf) of the factor must avoid the unit disk
            if al.denominator != 1 and A.real < 0 and abs(A.imag) <= 1:
                raise ValueError(
                    f"principal-branch cut of factor A={A} would cross the "
                    f"unit circle; require Re A >= 0 or |Im A| > 1")

    def _factor_base(self, A, u):
        # A - u with A at working precision
        return mp.mpc(A) - u

    def _product_of_w(self, w):
        """F(w) = prod (A_j - 1/w)**alpha_j via principal logs."""
        u = 1 / w
        acc = mp.mpc(0)
        for A, al in zip(self.a_points, self.exponents):
            base = self._factor_base(A, u)
            acc += mp.mpf(al.numerator) / al.denominator * mp.log(base)
        return mp.exp(acc)

    def evaluate(self, z, ctx: PrecisionCtx):
        self._check_off_cuts(z, ctx)
        with ctx.workprec():
            return self._product_of_w(phi_map(z))

    def trace(self, x, ctx: PrecisionCtx):
        with ctx.workprec():
            x = mp.mpf(x)
            t = mp.acos(x)
            w = mp.e ** (1j * t)
            return (self._product_of_w(w) + self._product_of_w(1 / w)) / 2

    def analytic_on_delta(self) -> bool:
        # the trace is analytic; the product itself jumps across (-1, 1)
        return True

    def value_at_infinity(self, ctx: PrecisionCtx):
        with ctx.workprec():
            acc = mp.mpc(0)
            for A, al in zip(self.a_points, self.exponents):
                acc += mp.mpf(al.numerator) / al.denominator * mp.log(mp.mpc(A))
            return mp.exp(acc)

    def singular_radius(self) -> float:
        return 1.0

    def cut_segments(self) -> list:
        return [DELTA]

    def branch_points(self) -> list:
        # Zhukovskii images of the A_j live on the other sheet; the only
        # branch points of this branch are the endpoints of the cut
        return [-1.0 + 0j, 1.0 + 0j]

    def second_sheet_points(self) -> list:
        return [(A + 1 / A) / 2 for A in self.a_points]

    def params_dict(self) -> dict:
        return {
            "a_points": [[a.real, a.imag] for a in self.a_points],
            "exponents": [str(e) for e in self.exponents],
            "branch": "principal-log",
        }


@dataclass(frozen=True)
class Shifted(FunctionSpec):
    """base(z) + constant."""

    base: FunctionSpec
    constant: complex

    def __post_init__(self):
        object.__setattr__(self, "constant", complex(self.constant))

    def evaluate(self, z, ctx: PrecisionCtx):
        with ctx.workprec():
            return self.base.evaluate(z, ctx) + mp.mpc(self.constant)

    def trace(self, x, ctx: PrecisionCtx):
        with ctx.workprec():
            return self.base.trace(x, ctx) + mp.mpc(self.constant)

    def analytic_on_delta(self) -> bool:
        return self.base.analytic_on_delta()

    def singular_radius(self) -> float:
        return self.base.singular_radius()

    def cut_segments(self) -> list:
        return self.base.cut_segments()

    def branch_points(self) -> list:
        return self.base.branch_points()

    def params_dict(self) -> dict:
        return {"base": self.base.to_dict(),
                "constant": [self.constant.real, self.constant.imag]}


_VARIANTS = {}
for _cls in (MarkovArcsine, InvSqrt, NikishinSecond, ClassL, Shifted):
    _VARIANTS[_cls.__name__] = _cls


def spec_from_dict(d: dict) -> FunctionSpec:
    name = d["variant"]
    params = dict(d["params"])
    if name not in _VARIANTS:
        raise ValueError(f"unknown variant {name!r}")
    if name == "Shifted":
        base = spec_from_dict(params["base"])
        re, im = params["constant"]
        return Shifted(base, complex(re, im))
    if name == "ClassL":
        As = [complex(re, im) for re, im in params["a_points"]]
        return ClassL(tuple(As), tuple(params["exponents"]))
    return _VARIANTS[name](**params)


def spec_from_json(s: str) -> FunctionSpec:
    return spec_from_dict(json.loads(s))


# ---------------------------------------------------------------------------
# module-level operations
# ---------------------------------------------------------------------------

def evaluate(spec: FunctionSpec, z, ctx: PrecisionCtx):
    """Single-valued branch value of ``spec`` at z (off cuts)."""
    return spec.evaluate(z, ctx)


def laurent_coeffs(spec: FunctionSpec, K: int, ctx: PrecisionCtx) -> LaurentTail:
    """Laurent tail at infinity through z**(-K).

    Generic route: batched trapezoid quadrature on |z| = 2 + 2 * (largest
    singularity modulus), nodes doubled to stability.  NikishinSecond uses
    its moment representation (the same integrals after collapsing the
    contour onto the cut), which avoids nested quadrature.
    """
    if K < 0:
        raise ValueError("K must be >= 0")
    if isinstance(spec, NikishinSecond):
        tail = spec.moment_tail(K, ctx)
        return LaurentTail(tail.coeffs[: K + 1], ctx, tail.radius)
    if isinstance(spec, Shifted):
        tail = laurent_coeffs(spec.base, K, ctx)
        return tail.shifted_constant(spec.constant)
    rho = spec.singular_radius()
    radius = 2 + 2 * rho

    def g(z):
        return spec.evaluate(z, ctx)

    return laurent_from_samples(g, K, radius, ctx, singular_radius=rho)


def cheb_coeffs(spec: FunctionSpec, K: int, ctx: PrecisionCtx) -> list:
    """Classical first-kind Chebyshev coefficients c_0..c_K of the trace.

    c_0 = (1/pi) * int f / sqrt(1-x^2), c_k = (2/pi) * int f T_k / sqrt(1-x^2),
    computed by a cosine transform at first-kind Chebyshev nodes (node
    count >= 4K, doubled until stable).  Raises DomainError when the spec
    has no analytic trace on [-1, 1].
    """
    if not spec.analytic_on_delta():
        raise DomainError(f"{spec.variant_name()} is singular on [-1, 1]")
    with ctx.workprec():
        target = ctx.quad_target
        N = 1 << max(6, (4 * max(K, 1) - 1).bit_length())
        prev = None
        for _ in range(10):
            _, thetas = _chebyshev_nodes(N)
            vals = [spec.trace(mp.cos(t), ctx) for t in thetas]
            cos1 = [mp.cos(t) for t in thetas]
            ck_now = [mp.mpf(1)] * N  # cos(k * theta_j), k = 0
            ck_nxt = cos1[:]
            out = []
            for k in range(K + 1):
                s = mp.fsum((vals[j] * ck_now[j] for j in range(N)),
                            absolute=False) / N
                out.append(mp.mpc(s if k == 0 else 2 * s))
                ck_now, ck_nxt = ck_nxt, [
                    2 * cos1[j] * ck_nxt[j] - ck_now[j] for j in range(N)]
            if prev is not None:
                scale = max(max(abs(c) for c in out), mp.mpf(1))
                if max(abs(a - b) for a, b in zip(prev, out)) <= target * scale:
                    return out
            prev = out
            N *= 2
    raise DomainError("Chebyshev coefficients did not stabilize under "
                      "node doubling")
