"""Rational vector fields, the operator ``Delta_f = id - f^*`` and the dimension formula.

Vector fields are written ``v(z) d/dz`` in the standard chart; near infinity
the coefficient in the chart ``w = 1/z`` is ``-w^2 v(1/w)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .dynamics import (Annotations, DynamicalPortrait, DynamicsConfig,
                       critical_points, portrait)
from .errors import ConsistencyError, InputError, PreconditionError
from .poly import Polynomial
from .sphere import INF, MoebiusTransform, RationalFunction, RationalMap, conjugate

REDUCE_TOL = 1e-10
POLE_TOL = 1e-10
MEMBERSHIP_TOL = 1e-8
RANK_TOL = 1e-8


@dataclass(frozen=True)
class RationalVectorField:
    v: RationalFunction

    @classmethod
    def poly(cls, coeffs) -> "RationalVectorField":
        return cls(RationalFunction.poly(coeffs))

    @classmethod
    def of(cls, num, den=(1.0,)) -> "RationalVectorField":
        return cls(RationalFunction(num, den))

    def __call__(self, z):
        return self.v(z)

    def __add__(self, other):
        return RationalVectorField((self.v + other.v).reduced(REDUCE_TOL))

    def __sub__(self, other):
        return RationalVectorField((self.v - other.v).reduced(REDUCE_TOL))

    def __neg__(self):
        return RationalVectorField(-self.v)

    def __mul__(self, c):
        return RationalVectorField(self.v * complex(c))

    __rmul__ = __mul__

    def is_zero(self, tol: float = 1e-12) -> bool:
        return self.v.num.is_zero() or self.v.num.scale() <= tol * max(self.v.den.scale(), 1.0)

    def pole_order_at_infinity(self) -> int:
        """Pole order of ``-w^2 v(1/w)`` at ``w = 0`` (nonpositive means holomorphic)."""
        v = self.v.reduced(REDUCE_TOL)
        if v.is_zero():
            return -(10**9)
        return v.num.trimmed(1e-14).degree - v.den.degree - 2

    def poles(self):
        """Poles as ``(point, order)`` pairs, including infinity."""
        out = list(self.v.poles())
        k = self.pole_order_at_infinity()
        if k > 0:
            out.append((INF, k))
        return out

    def allclose(self, other, rtol: float = 1e-10) -> bool:
        return self.v.allclose(other.v, rtol)

    def to_dict(self):
        v = self.v.reduced(REDUCE_TOL)
        return {
            "numerator": [[c.real, c.imag] for c in v.num.coeffs],
            "denominator": [[c.real, c.imag] for c in v.den.coeffs],
        }

    def __repr__(self):
        return f"RationalVectorField({self.v!r})"


AUT_BASIS = (
    RationalVectorField.poly([1.0]),
    RationalVectorField.poly([0.0, 1.0]),
    RationalVectorField.poly([0.0, 0.0, 1.0]),
)


@dataclass(frozen=True)
class TfBasis:
    """Basis ``z^j / C(z)``, ``j = 0..2d``, of ``T(f)``.

    ``C`` is the product of ``(z - c)^m`` over the finite critical points; the
    degree bound ``2d`` encodes the allowed pole order at infinity.
    """

    map: RationalMap
    critical: tuple
    C: Polynomial
    basis: tuple
    aut_basis: tuple = AUT_BASIS

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coordinates(self, xi: RationalVectorField):
        """Coordinates of ``xi`` in the basis and the relative residual of the fit.

        ``xi * C`` must be a polynomial of degree at most ``2d``; the residual
        collects the division remainder and the coefficients above degree ``2d``.
        """
        d = self.map.degree
        v = xi.v
        if v.is_zero():
            return np.zeros(2 * d + 1, dtype=complex), 0.0
        top = v.num * self.C
        q, r = top.divmod(v.den)
        scale = max(top.scale(), q.scale(), 1e-300)
        coords = q.padded(max(q.degree + 1, 2 * d + 1))
        excess = np.abs(coords[2 * d + 1:]).max(initial=0.0)
        residual = max(r.scale(), excess) / scale
        return coords[: 2 * d + 1], residual

    def element(self, coords) -> RationalVectorField:
        return RationalVectorField(RationalFunction(Polynomial(coords), self.C))


def tf_basis(f: RationalMap) -> TfBasis:
    crit = critical_points(f)
    C = Polynomial([1.0])
    for c in crit:
        if c.location is not INF:
            C = C * Polynomial.from_roots([c.location] * c.multiplicity)
    basis = tuple(
        RationalVectorField(RationalFunction(Polynomial.monomial(j), C))
        for j in range(2 * f.degree + 1)
    )
    return TfBasis(f, tuple(crit), C, basis)


def _compose_rf(xi: RationalFunction, f: RationalMap):
    """``xi o f`` as an unreduced pair of polynomials."""
    P, Q = f.num, f.den
    A, B = xi.num, xi.den
    k = max(A.degree, B.degree, 0)
    powP = [Polynomial([1.0])]
    powQ = [Polynomial([1.0])]
    for _ in range(k):
        powP.append(powP[-1] * P)
        powQ.append(powQ[-1] * Q)

    def homog(coeffs):
        out = Polynomial()
        for i, a in enumerate(coeffs):
            if a != 0:
                out = out + powP[i] * powQ[k - i] * complex(a)
        return out

    return homog(A.coeffs), homog(B.coeffs)


def pullback_vf(f: RationalMap, xi: RationalVectorField) -> RationalVectorField:
    """``f^* xi = (xi o f) / f'``, composed exactly and reduced."""
    num, den = _compose_rf(xi.v, f)
    W = f.wronskian()
    if W.is_zero():
        raise InputError("f' vanishes identically")
    Q2 = f.den * f.den
    return RationalVectorField(RationalFunction(num * Q2, den * W, reduce=True, tol=REDUCE_TOL))


def delta_f(f: RationalMap, xi: RationalVectorField) -> RationalVectorField:
    """``Delta_f xi = xi - f^* xi``."""
    return xi - pullback_vf(f, xi)


def dpsi_at_zero(f: RationalMap, xi: RationalVectorField) -> RationalVectorField:
    """Tangent vector in ``T(f)`` of the deformation direction ``dbar xi``: ``-Delta_f xi``."""
    return -delta_f(f, xi)


def in_tf(f: RationalMap, eta: RationalVectorField, tol: float = POLE_TOL,
          basis: TfBasis | None = None):
    """Whether ``eta`` satisfies the pole bound of ``T(f)``; returns ``(ok, residual)``."""
    tb = basis or tf_basis(f)
    _, res = tb.coordinates(eta)
    return res < tol, res


def _series_quotient(n, d, order):
    """Taylor coefficients of ``n/d`` up to ``order`` given those of ``n`` and ``d``."""
    s = np.zeros(order + 1, dtype=complex)
    for j in range(order + 1):
        acc = n[j] if j < len(n) else 0
        for i in range(1, j + 1):
            if i < len(d):
                acc -= d[i] * s[j - i]
        s[j] = acc / d[0]
    return s


def _pad(a, n):
    out = np.zeros(n, dtype=complex)
    out[: min(n, len(a))] = a[:n]
    return out


def local_jet(xi: RationalVectorField, point, order: int, tol: float = 1e-10):
    """Taylor coefficients ``0..order`` of ``xi`` at ``point`` in the local chart.

    Returns ``None`` when ``xi`` has a pole there.
    """
    v = xi.v.reduced(REDUCE_TOL)
    if point is INF:
        if v.num.is_zero():
            return np.zeros(order + 1, dtype=complex)
        # -w^2 v(1/w) = -w^2 rev_K(N)(w) / rev_K(D)(w) with K = max(deg N, deg D)
        K = max(v.num.degree, v.den.degree)
        num = np.concatenate([[0.0, 0.0], -v.num.reversed(K).padded(K + 1)])
        den = v.den.reversed(K).padded(K + 1)
        small = np.abs(den) <= tol * np.abs(den).max()
        s = int(np.argmin(small))
        lead_num = np.flatnonzero(np.abs(num) > tol * np.abs(num).max())
        if lead_num.size and lead_num[0] < s:
            return None
        return _series_quotient(_pad(num[s:], order + 1), _pad(den[s:], order + 1), order)
    nt = _pad(v.num.taylor(point, order), order + 1)
    dt = _pad(v.den.taylor(point, max(order, v.den.degree)), max(order, v.den.degree) + 1)
    if abs(dt[0]) <= tol * v.den.taylor_scale(point, 0)[0]:
        return None
    return _series_quotient(nt, dt, order)


def _leading_zeros(coeffs, scale, tol):
    small = np.abs(coeffs) <= tol * scale
    return int(np.argmin(small)) if not small.all() else len(coeffs)


def pole_order_at(xi: RationalVectorField, point, tol: float = 1e-10) -> int:
    """Pole order of ``xi`` at ``point`` in the local chart (nonpositive if regular)."""
    v = xi.v.reduced(REDUCE_TOL)
    if v.num.is_zero():
        return -(10**9)
    if point is INF:
        return xi.pole_order_at_infinity()
    n = max(v.num.degree, v.den.degree) + 1
    nt = _pad(v.num.taylor(point, n), n + 1)
    dt = _pad(v.den.taylor(point, n), n + 1)
    kn = _leading_zeros(nt, v.num.taylor_scale(point, 0)[0], tol)
    kd = _leading_zeros(dt, v.den.taylor_scale(point, 0)[0], tol)
    return kd - kn


def critical_pole_bound(f: RationalMap, eta: RationalVectorField, tol: float = 1e-10):
    """Pole orders of ``eta`` at the critical points against their multiplicities.

    Returns ``(ok, [(point, order, multiplicity), ...])``; only the local bound
    at ``Crit(f)`` is checked, not the absence of other poles.
    """
    rows = []
    for c in critical_points(f):
        rows.append((c.location, pole_order_at(eta, c.location, tol), c.multiplicity))
    return all(o <= m for _, o, m in rows), rows


def _aut_jet(point, order: int) -> np.ndarray:
    """Jets of ``1, z, z^2`` (columns) at ``point`` in the local chart."""
    M = np.zeros((order + 1, 3), dtype=complex)
    if point is INF:
        # -w^2 h(1/w) for h = a + b z + c z^2 is -(c + b w + a w^2)
        for j, col in ((0, 2), (1, 1), (2, 0)):
            if j <= order:
                M[j, col] = -1.0
        return M
    c = complex(point)
    M[0] = (1.0, c, c * c)
    if order >= 1:
        M[1] = (0.0, 1.0, 2 * c)
    if order >= 2:
        M[2] = (0.0, 0.0, 1.0)
    return M


def vanishing_multiplicity_test(f: RationalMap, xi: RationalVectorField,
                                tol: float = MEMBERSHIP_TOL):
    """Whether some ``h`` in ``aut`` makes ``xi - h`` vanish on ``Crit(f)`` with multiplicity.

    Solves the linear system on Taylor coefficients; returns ``(ok, h_coeffs)``.
    A pole of ``xi`` at a critical point makes the test false.
    """
    rows, rhs = [], []
    for c in critical_points(f):
        jet = local_jet(xi, c.location, c.multiplicity - 1)
        if jet is None:
            return False, None
        rows.append(_aut_jet(c.location, c.multiplicity - 1))
        rhs.append(jet)
    A = np.vstack(rows)
    b = np.concatenate(rhs)
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    res = np.linalg.norm(A @ x - b)
    scale = max(np.linalg.norm(b), np.linalg.norm(A, 2) * np.linalg.norm(x), 1e-300)
    ok = res <= tol * scale or np.linalg.norm(b) == 0
    return bool(ok), (x if ok else None)


def aut_images(f: RationalMap, basis: TfBasis | None = None):
    tb = basis or tf_basis(f)
    cols = []
    for h in AUT_BASIS:
        coords, res = tb.coordinates(delta_f(f, h))
        if res > POLE_TOL:
            raise ConsistencyError(f"Delta_f of an aut field left T(f) (residual {res:.3g})")
        cols.append(coords)
    return np.array(cols).T


def aut_rank(f: RationalMap, tol: float = RANK_TOL) -> int:
    """Rank of ``Delta_f`` on the three holomorphic fields ``1, z, z^2``."""
    A = aut_images(f)
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def in_tangent_orbit(f: RationalMap, eta: RationalVectorField, tol: float = MEMBERSHIP_TOL,
                     basis: TfBasis | None = None) -> bool:
    """Whether ``eta`` lies in ``Delta_f(aut)``.

    Fields outside ``T(f)`` cannot lie in that span, so they give ``False``.
    """
    tb = basis or tf_basis(f)
    b, res = tb.coordinates(eta)
    if res > POLE_TOL:
        return False
    A = aut_images(f, tb)
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    resid = np.linalg.norm(A @ x - b)
    scale = max(np.linalg.norm(b), np.linalg.norm(A, axis=0).max(), 1e-300)
    return bool(resid <= tol * scale)


def teich_dim(p: DynamicalPortrait) -> int:
    """``n_f + n_H + n_J - n_p``, checked against ``0 <= dim <= 2d - 2``."""
    dim = p.n_f + p.n_H + p.n_J - p.n_p
    if not 0 <= dim <= 2 * p.degree - 2:
        raise ConsistencyError(
            f"dimension {dim} outside [0, {2 * p.degree - 2}]",
            dump=json.dumps(p.to_dict(), sort_keys=True),
        )
    return dim


def rank_invariance_check(f: RationalMap, M: MoebiusTransform,
                          cfg: DynamicsConfig = DynamicsConfig(),
                          annotations: Annotations | None = None):
    """Compare the dimension of ``f`` and ``M o f o M^{-1}``; returns ``(equal, dim_f, dim_g)``."""
    g = conjugate(M, f)
    a = teich_dim(portrait(f, cfg, annotations))
    b = teich_dim(portrait(g, cfg, annotations))
    return a == b, a, b


def random_aut_field(rng: np.random.Generator, scale: float = 1.0) -> RationalVectorField:
    c = (rng.normal(size=3) + 1j * rng.normal(size=3)) * scale
    return RationalVectorField.poly(c)


__all__ = [
    "AUT_BASIS", "RationalVectorField", "TfBasis", "tf_basis", "pullback_vf", "delta_f",
    "dpsi_at_zero", "in_tf", "local_jet", "pole_order_at", "critical_pole_bound", "vanishing_multiplicity_test", "aut_rank",
    "aut_images", "in_tangent_orbit", "teich_dim", "rank_invariance_check",
    "random_aut_field", "PreconditionError",
]
