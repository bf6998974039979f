"""Rational functions, rational maps and Moebius transformations on the Riemann sphere.

Points of the sphere are Python complex numbers or the tagged value :data:`INF`.
Two charts cover the sphere: chart 0 is the identity on ``|z| <= 1``, chart 1 is
``w = 1/z`` on ``|z| >= 1`` (including ``INF``, which is ``w = 0``).
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import InputError
from .poly import EPS, Polynomial, roots


class _Infinity:
    __slots__ = ()
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def is_inf(z) -> bool:
    return z is INF


def chordal(z, w) -> float:
    """Chordal distance on the sphere (diameter 2)."""
    if z is INF and w is INF:
        return 0.0
    if z is INF:
        z, w = w, z
    if w is INF:
        return 2.0 / math.sqrt(1.0 + abs(z) ** 2)
    return 2.0 * abs(z - w) / math.sqrt((1.0 + abs(z) ** 2) * (1.0 + abs(w) ** 2))


def chart_of(z) -> int:
    return 1 if z is INF or abs(z) > 1.0 else 0


def to_chart(z, chart: int) -> complex:
    if chart == 0:
        if z is INF:
            raise InputError("INF has no coordinate in chart 0")
        return complex(z)
    if z is INF:
        return 0j
    if z == 0:
        raise InputError("0 has no coordinate in chart 1")
    return 1.0 / complex(z)


def from_chart(u: complex, chart: int):
    if chart == 0:
        return complex(u)
    return INF if u == 0 else 1.0 / complex(u)


def point_label(z):
    """JSON-friendly representation of a sphere point."""
    if z is INF:
        return "inf"
    return [float(z.real), float(z.imag)]


def _horner(coeffs, z):
    acc = 0j
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


# ---------------------------------------------------------------------------


class RationalFunction:
    """Quotient ``num/den`` of polynomials with a monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=(1.0,), reduce: bool = False, tol: float = 1e-10):
        num = num if isinstance(num, Polynomial) else Polynomial(num)
        den = den if isinstance(den, Polynomial) else Polynomial(den)
        if den.is_zero():
            raise InputError("zero denominator")
        if num.is_zero():
            den = Polynomial([1.0])
        else:
            lead = den.lead
            num, den = Polynomial(num.coeffs / lead), Polynomial(den.coeffs / lead)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        if reduce:
            r = self.reduced(tol)
            object.__setattr__(self, "num", r.num)
            object.__setattr__(self, "den", r.den)

    def __setattr__(self, name, value):
        raise AttributeError("RationalFunction is immutable")

    @classmethod
    def poly(cls, coeffs) -> "RationalFunction":
        return cls(coeffs, [1.0])

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __call__(self, z):
        return self.num(z) / self.den(z)

    def reduced(self, tol: float = 1e-10) -> "RationalFunction":
        """Cancel common roots of numerator and denominator.

        For every root ``r`` of the denominator the numerator's vanishing order at
        ``r`` is read from its Taylor coefficients (relative tolerance ``tol``)
        and the common power of ``(z - r)`` is divided out of both.
        """
        num, den = self.num, self.den
        if num.is_zero() or den.degree < 1:
            return RationalFunction(num, den)
        for r, m in roots(den):
            t = np.abs(num.taylor(r, m - 1))
            s = num.taylor_scale(r, m - 1)
            k = 0
            while k < m and k < len(t) and t[k] <= tol * max(s[k], 1e-300):
                k += 1
            if k:
                num, den = num.deflate(r, k), den.deflate(r, k)
        return RationalFunction(num, den)

    def poles(self):
        """Finite poles with orders of the reduced function."""
        r = self.reduced()
        return roots(r.den) if r.den.degree >= 1 else []

    def order_at_infinity(self) -> int:
        """``deg num - deg den``: pole order at infinity when positive."""
        if self.is_zero():
            return -(10**9)
        return self.num.degree - self.den.degree

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        other = _as_rf(other)
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den,
                                self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-_as_rf(other))

    def __rsub__(self, other):
        return _as_rf(other) - self

    def __mul__(self, other):
        if np.isscalar(other):
            return RationalFunction(self.num * other, self.den)
        other = _as_rf(other)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if np.isscalar(other):
            return RationalFunction(self.num * (1.0 / other), self.den)
        other = _as_rf(other)
        return RationalFunction(self.num * other.den, self.den * other.num)

    def deriv(self) -> "RationalFunction":
        n, d = self.num, self.den
        return RationalFunction(n.deriv() * d - n * d.deriv(), d * d, reduce=True)

    def allclose(self, other, rtol: float = 1e-10) -> bool:
        a, b = self.reduced(), _as_rf(other).reduced()
        return a.num.allclose(b.num, rtol) and a.den.allclose(b.den, rtol)

    def __repr__(self):
        return f"RationalFunction(num={self.num.coeffs!r}, den={self.den.coeffs!r})"


def _as_rf(x) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, Polynomial):
        return RationalFunction(x)
    if np.isscalar(x):
        return RationalFunction([x])
    raise TypeError(f"cannot interpret {type(x).__name__} as a rational function")


# ---------------------------------------------------------------------------


class RationalMap:
    """Reduced rational self-map of the sphere of degree ``d >= 1``.

    ``check=False`` skips the common-root test (for internally composed maps
    whose reducedness is guaranteed algebraically).
    """

    __slots__ = ("num", "den", "degree", "_nc", "_dc", "_charts")

    def __init__(self, num, den=(1.0,), check: bool = True, tol: float = 1e-10):
        num = num if isinstance(num, Polynomial) else Polynomial(num)
        den = den if isinstance(den, Polynomial) else Polynomial(den)
        if den.is_zero():
            raise InputError("denominator is the zero polynomial")
        if num.is_zero():
            raise InputError("numerator is the zero polynomial (constant map)")
        # leading coefficients below roundoff of the joint scale are noise, not degree
        s = max(num.scale(), den.scale())
        num, den = num.trimmed(EPS * s / num.scale()), den.trimmed(EPS * s / den.scale())
        lead = den.lead
        num, den = Polynomial(num.coeffs / lead), Polynomial(den.coeffs / lead)
        d = max(num.degree, den.degree)
        if d < 1:
            raise InputError("constant map has degree 0")
        if check:
            _check_reduced(num, den, tol)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "degree", d)
        object.__setattr__(self, "_nc", tuple(complex(c) for c in num.coeffs))
        object.__setattr__(self, "_dc", tuple(complex(c) for c in den.coeffs))
        object.__setattr__(self, "_charts", None)

    def __setattr__(self, name, value):
        raise AttributeError("RationalMap is immutable")

    @classmethod
    def polynomial(cls, coeffs) -> "RationalMap":
        return cls(coeffs, [1.0])

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def __call__(self, z):
        """Evaluate at a sphere point (complex or :data:`INF`).

        Points with ``|z| > 1`` go through the ``w = 1/z`` chart so that large
        orbits never overflow.
        """
        if z is INF:
            dn, dd = self.num.degree, self.den.degree
            if dn > dd:
                return INF
            if dn == dd:
                return self.num.lead / self.den.lead
            return 0j
        if abs(z) > 1.0:
            return self.eval_chart(z)
        return self.eval_direct(z)

    def eval_direct(self, z):
        """Evaluate in the standard chart."""
        q = _horner(self._dc, z)
        if q == 0:
            return INF
        v = _horner(self._nc, z) / q
        return v if cmath.isfinite(v) else INF

    def eval_chart(self, z):
        """Evaluate through the ``w = 1/z`` chart (for chart-consistency checks)."""
        if z is INF or z == 0:
            return self(z)
        w = 1.0 / z
        n, dn, _, _ = self.charts()[(1, 0)]
        pd = _horner(dn.coeffs, w)
        if pd == 0:
            return INF
        v = _horner(n.coeffs, w) / pd
        return v if cmath.isfinite(v) else INF

    def evaluate(self, z):
        """Vectorised evaluation at finite points (poles give complex infinity)."""
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.num(z) / self.den(z)

    def as_function(self) -> RationalFunction:
        return RationalFunction(self.num, self.den)

    def wronskian(self) -> Polynomial:
        """``num' den - num den'``; its roots are the finite critical points."""
        return self.num.deriv() * self.den - self.num * self.den.deriv()

    def charts(self):
        """Local expressions ``chart_b o f o chart_a^{-1}`` keyed by ``(a, b)``."""
        if self._charts is None:
            d = self.degree
            rn, rd = self.num.reversed(d), self.den.reversed(d)
            out = {
                (0, 0): (self.num, self.den),
                (0, 1): (self.den, self.num),
                (1, 0): (rn, rd),
                (1, 1): (rd, rn),
            }
            out = {k: (n, dn, n.deriv(), dn.deriv()) for k, (n, dn) in out.items()}
            object.__setattr__(self, "_charts", out)
        return self._charts

    def local_derivative(self, z, target=None):
        """Derivative of ``f`` at ``z`` in the natural charts of ``z`` and ``f(z)``."""
        fz = self(z) if target is None else target
        a, b = chart_of(z), chart_of(fz)
        n, dn, n1, dn1 = self.charts()[(a, b)]
        u = to_chart(z, a)
        q = dn(u)
        return (n1(u) * q - n(u) * dn1(u)) / (q * q)

    def local_map(self, a: int, b: int):
        n, dn, n1, dn1 = self.charts()[(a, b)]
        return n, dn

    def allclose(self, other: "RationalMap", rtol: float = 1e-10) -> bool:
        return (self.degree == other.degree and self.num.allclose(other.num, rtol)
                and self.den.allclose(other.den, rtol))

    def __repr__(self):
        return f"RationalMap(num={self.num.coeffs!r}, den={self.den.coeffs!r})"


def _check_reduced(num: Polynomial, den: Polynomial, tol: float) -> None:
    a, b = (num, den) if num.degree <= den.degree else (den, num)
    if a.degree < 1:
        return
    for r, _ in roots(a):
        if abs(b(r)) <= tol * max(b.magnitude(r), 1e-300):
            raise InputError(f"numerator and denominator share the root {r:.6g}")


def compose(f: RationalMap, g: RationalMap) -> RationalMap:
    """``f o g`` as a rational map of degree ``deg f * deg g``."""
    d = f.degree
    A, B = g.num, g.den
    powA = [Polynomial([1.0])]
    powB = [Polynomial([1.0])]
    for _ in range(d):
        powA.append(powA[-1] * A)
        powB.append(powB[-1] * B)
    num = Polynomial()
    den = Polynomial()
    P, Q = f.num.padded(d + 1), f.den.padded(d + 1)
    for i in range(d + 1):
        term = powA[i] * powB[d - i]
        if P[i] != 0:
            num = num + term * P[i]
        if Q[i] != 0:
            den = den + term * Q[i]
    return RationalMap(num, den, check=False)


def iterate(f: RationalMap, n: int) -> RationalMap:
    out = f
    for _ in range(n - 1):
        out = compose(f, out)
    return out


def derivative(f: RationalMap) -> RationalFunction:
    """``f'`` as a reduced rational function."""
    q = f.den
    return RationalFunction(f.wronskian(), q * q, reduce=True)


class MoebiusTransform:
    """``z -> (a z + b) / (c z + d)`` with ``ad - bc != 0``."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        a, b, c, d = complex(a), complex(b), complex(c), complex(d)
        det = a * d - b * c
        if not abs(det) > 1e-14 * max(abs(a), abs(b), abs(c), abs(d)) ** 2:
            raise InputError("singular Moebius transformation")
        for k, v in zip("abcd", (a, b, c, d)):
            object.__setattr__(self, k, v)

    def __setattr__(self, name, value):
        raise AttributeError("MoebiusTransform is immutable")

    @classmethod
    def identity(cls):
        return cls(1, 0, 0, 1)

    @classmethod
    def random(cls, rng: np.random.Generator, spread: float = 1.0):
        while True:
            a, b, c, d = (rng.normal(size=4) + 1j * rng.normal(size=4)) * spread
            if abs(a * d - b * c) > 0.1 * spread**2:
                return cls(a, b, c, d)

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def __call__(self, z):
        a, b, c, d = self.a, self.b, self.c, self.d
        if z is INF:
            return INF if c == 0 else a / c
        den = c * z + d
        if den == 0:
            return INF
        return (a * z + b) / den

    def inverse(self) -> "MoebiusTransform":
        return MoebiusTransform(self.d, -self.b, -self.c, self.a)

    def __matmul__(self, other: "MoebiusTransform") -> "MoebiusTransform":
        a, b, c, d = self.a, self.b, self.c, self.d
        e, f, g, h = other.a, other.b, other.c, other.d
        return MoebiusTransform(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def as_map(self) -> RationalMap:
        return RationalMap([self.b, self.a], [self.d, self.c], check=False)

    def __repr__(self):
        return f"MoebiusTransform({self.a}, {self.b}, {self.c}, {self.d})"


def conjugate(M: MoebiusTransform, f: RationalMap) -> RationalMap:
    """``M o f o M^{-1}``."""
    inner = compose(f, M.inverse().as_map())
    return compose(M.as_map(), inner)


def random_sphere_points(rng: np.random.Generator, n: int, spread: float = 2.0):
    r = spread * np.sqrt(rng.uniform(size=n)) * 2
    t = rng.uniform(0, 2 * np.pi, size=n)
    return [complex(cmath.rect(ri, ti)) for ri, ti in zip(r, t)]
