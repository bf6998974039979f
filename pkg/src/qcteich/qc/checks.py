"""Quadrature verifiers for the vector-field calculus on model domains."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline

from ..errors import InputError, PreconditionError
from .domains import DomainKind, ModelDomain
from .fields import (GridField, boundary_integral, dbar_numeric, fsum_complex, integrate_11,
                     sup_hyperbolic_norm)

BOUNDARY_TOL = 1e-8
INEQ_SLACK = 1e-2
QUAD_TOL = 1e-4
SYM_TOL = 1e-8
MODE_TOL = 1e-6
FD_TOL = 1e-3
POLE_CLEARANCE_CELLS = 4


def _cplx(z: complex):
    return [float(z.real), float(z.imag)]


@dataclass
class Report:
    """Base for check reports; ``passed`` is the verdict."""

    passed: bool

    def to_dict(self):
        out = {}
        for k, v in asdict(self).items():
            if isinstance(v, complex):
                v = _cplx(v)
            elif isinstance(v, np.generic):
                v = v.item()
            out[k] = v
        return out


@dataclass
class TheoremAReport(Report):
    lhs: float
    rhs: float
    ratio: float
    spacing: float
    boundary_max: float


@dataclass
class IdentityReport(Report):
    lhs: complex
    rhs: complex
    defect: float
    tol: float
    terms: dict = field(default_factory=dict)


def _require_source(f: GridField, what: str):
    if f.source is None:
        raise InputError(f"{what} needs the field's closed-form source for boundary values")


def theorem_a_check(domain: ModelDomain, xi: GridField, boundary_tol: float = BOUNDARY_TOL,
                    slack: float = INEQ_SLACK) -> TheoremAReport:
    """Compare ``sup rho |xi|`` with ``4 sup |dbar xi|`` for ``xi`` vanishing on the boundary."""
    if not domain.hyperbolic:
        raise InputError("the hyperbolic-norm inequality needs a hyperbolic domain")
    if xi.tensor_type != (-1, 0):
        raise InputError("expected a vector field")
    scale = max(np.abs(xi.samples).max(), 1e-300)
    bmax = max(float(np.abs(xi.boundary_values(r)).max()) for r, _ in domain.boundary_radii)
    if bmax > boundary_tol * max(scale, 1.0):
        raise PreconditionError(f"field does not vanish on the boundary (max {bmax:.3g})")
    lhs = sup_hyperbolic_norm(domain, xi)
    rhs = 4.0 * dbar_numeric(xi).sup()
    ratio = lhs.value / rhs if rhs > 0 else (0.0 if lhs.value == 0 else math.inf)
    passed = lhs.value <= rhs * (1 + slack)
    return TheoremAReport(bool(passed), lhs.value, rhs, ratio, lhs.spacing, bmax)


def stokes_check(domain: ModelDomain, q: GridField, xi: GridField, tol: float = QUAD_TOL) -> IdentityReport:
    """``int q dbar xi + int xi dbar q`` against ``oint q xi dz``.

    With ``dz ^ dzbar = -2i dx dy`` the two sides are negatives of each other,
    so the reported defect is ``|lhs + boundary|``.
    """
    if q.tensor_type != (2, 0) or xi.tensor_type != (-1, 0):
        raise InputError("expected a (2,0) field and a (-1,0) field")
    if domain.kind is DomainKind.SPHERE:
        raise InputError("Stokes check runs on a disk or annulus")
    _require_source(q, "stokes_check")
    _require_source(xi, "stokes_check")
    a1 = integrate_11(domain, q.samples * dbar_numeric(xi).samples)
    a2 = integrate_11(domain, xi.samples * dbar_numeric(q).samples)
    bd = boundary_integral(domain, lambda r: q.boundary_values(r) * xi.boundary_values(r))
    lhs = a1 + a2
    defect = abs(lhs + bd)
    scale = max(abs(a1), abs(a2), abs(bd), 1.0)
    return IdentityReport(bool(defect <= tol * scale), lhs, -bd, defect, tol,
                          {"area_q_dbar_xi": _cplx(a1), "area_xi_dbar_q": _cplx(a2), "boundary": _cplx(bd)})


def cauchy_pompeiu_check(xi: GridField, tol: float = 1e-6) -> IdentityReport:
    """``2 pi i xi(0)`` against ``int (dbar xi / z) dz ^ dzbar + oint (xi / z) dz`` on the unit disk."""
    d = xi.domain
    if d.kind is not DomainKind.UNIT_DISK or xi.tensor_type != (-1, 0):
        raise InputError("Cauchy-Pompeiu check needs a vector field on the unit disk")
    _require_source(xi, "cauchy_pompeiu_check")
    z = d.nodes
    area = integrate_11(d, (dbar_numeric(xi).samples[0] / z)[None])
    bd = boundary_integral(d, lambda r: xi.boundary_values(r) / (r * np.exp(1j * d.angles)))
    xi0 = complex(np.asarray(xi.source(np.array([0j])))[0])
    lhs = 2j * np.pi * xi0
    rhs = area + bd
    defect = abs(lhs - rhs)
    return IdentityReport(bool(defect <= tol * max(abs(lhs), 1.0)), lhs, rhs, defect, tol,
                          {"area": _cplx(area), "boundary": _cplx(bd), "xi0": _cplx(xi0)})


def _dbar_point(fn: Callable, a: complex, h: float = 1e-5) -> complex:
    pts = np.array([a + h, a - h, a + 1j * h, a - 1j * h])
    v = np.asarray(fn(pts), dtype=complex)
    return complex(((v[0] - v[1]) + 1j * (v[2] - v[3])) / (4 * h))


def _cauchy_area(domain: ModelDomain, a: complex) -> complex:
    """``int dx dy / (z - a)`` over the domain in closed form."""
    out = -np.pi * np.conj(a)
    if domain.kind is DomainKind.ANNULUS:
        out += np.pi * domain.r_inner**2 / a
    return complex(out)


def _conj_cauchy_area(domain: ModelDomain, a: complex) -> complex:
    """``int (zbar - abar) / (z - a) dx dy`` over the domain in closed form."""
    ab = np.conj(a)
    out = 0.5 * np.pi * ab * ab
    if domain.kind is DomainKind.ANNULUS:
        r2 = domain.r_inner**2
        out -= -0.5 * np.pi * r2 * r2 / (a * a) + ab * np.pi * r2 / a
    return complex(out)


def residue_check(domain: ModelDomain, holo: Callable, poles, xi: GridField,
                  tol: float = QUAD_TOL) -> IdentityReport:
    """``int q dbar xi = 2 pi i sum res(q xi) - oint q xi dz`` for ``q = holo + sum b/(z - a)``.

    ``poles`` lists ``(a, b)`` pairs.  Near each pole the area integrand is
    split as ``b (g(a) + g_zbar(a) (zbar - abar)) / (z - a)`` plus a regular
    remainder, with ``g = dbar xi``; the split-off part is integrated exactly.
    """
    if domain.kind not in (DomainKind.UNIT_DISK, DomainKind.ANNULUS):
        raise InputError("residue check runs on the unit disk or an annulus")
    _require_source(xi, "residue_check")
    poles = [(complex(a), complex(b)) for a, b in poles]
    for a, _ in poles:
        clear = float(domain.clearance(a))
        r = abs(a)
        cell = domain.dr * (r if domain.log_radial else 1.0)
        if not domain.contains(a) or clear < POLE_CLEARANCE_CELLS * max(cell, r * domain.dt):
            raise InputError(f"pole {a} is closer than {POLE_CLEARANCE_CELLS} cells to the boundary")
    z = domain.nodes
    dxi = dbar_numeric(xi).samples[0]
    with np.errstate(all="ignore"):
        dens = np.asarray(holo(z), dtype=complex) * np.ones(z.shape) * dxi
        corr = 0j
        for a, b in poles:
            da = _dbar_point(xi.source, a)
            dda = _dbar_point(lambda w: np.array([_dbar_point(xi.source, x) for x in w]), a, 1e-3)
            dens = dens + b * (dxi - da - dda * np.conj(z - a)) / (z - a)
            corr += b * (da * _cauchy_area(domain, a) + dda * _conj_cauchy_area(domain, a)) * (-2j)
    area = integrate_11(domain, dens[None]) + corr

    def q_on(zz):
        out = np.asarray(holo(zz), dtype=complex) * np.ones(np.shape(zz))
        for a, b in poles:
            out = out + b / (zz - a)
        return out

    t = domain.angles
    bd = boundary_integral(domain, lambda r: q_on(r * np.exp(1j * t)) * xi.boundary_values(r))
    res = 0j
    if poles:
        vals = np.asarray(xi.source(np.array([a for a, _ in poles])), dtype=complex)
        res = complex(sum(b * v for (_, b), v in zip(poles, vals)))
    rhs = 2j * np.pi * res - bd
    defect = abs(area - rhs)
    scale = max(abs(area), abs(rhs), 1.0)
    return IdentityReport(bool(defect <= tol * scale), area, rhs, defect, tol,
                          {"residue_sum": _cplx(res), "boundary": _cplx(bd)})


@dataclass(frozen=True)
class RadialProfile:
    """Radial coefficient ``c`` of the rotation-invariant Beltrami ``c(r) e^{2it} dzbar/dz``."""

    r_inner: float
    c: Callable

    @classmethod
    def from_samples(cls, r_inner: float, radii, values) -> "RadialProfile":
        radii = np.asarray(radii, dtype=float)
        values = np.asarray(values, dtype=complex)
        spline = CubicSpline(radii, values, extrapolate=True)
        return cls(float(r_inner), spline)

    def __call__(self, r):
        return np.asarray(self.c(np.asarray(r, dtype=float)), dtype=complex)

    def beltrami(self, domain: ModelDomain) -> GridField:
        prof = self
        return GridField.sample(domain, lambda z: prof(np.abs(z)) * np.exp(2j * np.angle(z)), -1, 1)


NAMED_PROFILES = {
    "zero": lambda r: np.zeros_like(r),
    "constant": lambda r: np.ones_like(r),
    "linear": lambda r: r,
    "quadratic": lambda r: r * r,
}


def named_profile(name: str, r_inner: float) -> RadialProfile:
    try:
        return RadialProfile(r_inner, NAMED_PROFILES[name])
    except KeyError:
        raise InputError(f"unknown profile {name!r}; choose from {sorted(NAMED_PROFILES)}") from None


def _quad_c(profile: RadialProfile, a: float, b: float) -> complex:
    f_re = lambda u: float(profile(u).real) / u  # noqa: E731
    f_im = lambda u: float(profile(u).imag) / u  # noqa: E731
    re, _ = integrate.quad(f_re, a, b, epsabs=1e-14, epsrel=1e-13, limit=200)
    im, _ = integrate.quad(f_im, a, b, epsabs=1e-14, epsrel=1e-13, limit=200)
    return complex(re, im)


def primitive(profile: RadialProfile, radii) -> np.ndarray:
    """``int_1^r c(u)/u du`` at each radius, accumulated between sorted radii."""
    radii = np.asarray(radii, dtype=float)
    order = np.argsort(-radii)
    out = np.empty(len(radii), dtype=complex)
    acc, prev = 0j, 1.0
    for i in order:
        acc += _quad_c(profile, prev, radii[i])
        prev = radii[i]
        out[i] = acc
    return out


def radial_solve(profile: RadialProfile, domain: ModelDomain | None = None) -> GridField:
    """Vector field ``xi = r h(r) e^{it}`` with ``dbar xi = c(r) e^{2it}``.

    ``h(r) = 2 int_1^r c(u)/u du``: the factor 2 comes from ``dbar r = z / (2r)``.
    """
    if domain is None:
        domain = (ModelDomain.annulus(profile.r_inner, 512, 512) if profile.r_inner > 0
                  else ModelDomain.disk(512, 512))
    r, _, z = domain.mesh()
    h = 2 * primitive(profile, domain.radii)

    def source(zz):
        zz = np.asarray(zz, dtype=complex)
        return zz * (2 * primitive(profile, np.abs(zz).ravel())).reshape(zz.shape)

    return GridField(domain, -1, 0, (z * h[:, None])[None], source=source)


def radial_roundtrip_error(profile: RadialProfile, domain: ModelDomain | None = None) -> float:
    """Max ``|dbar xi - c e^{2it}|`` for ``xi = radial_solve(profile)``."""
    xi = radial_solve(profile, domain)
    r, t, _ = xi.domain.mesh()
    target = profile(r) * np.exp(2j * t)
    return float(np.abs(dbar_numeric(xi).samples[0] - target).max())


def annulus_triviality_form(profile: RadialProfile, r0: float | None = None) -> complex:
    """``h(r0) = int_1^{r0} c(u)/u du``; zero exactly on the trivial deformations."""
    r0 = profile.r_inner if r0 is None else r0
    if not 0.0 < r0 < 1.0:
        raise InputError(f"inner radius {r0} not in (0, 1)")
    return _quad_c(profile, 1.0, r0)


@dataclass
class RotationReport(Report):
    symmetry: str
    invariance_defect: float
    max_mode_ratio: float
    mode2_max: float
    profile: RadialProfile | None = field(default=None, repr=False)

    def to_dict(self):
        d = super().to_dict()
        d.pop("profile", None)
        return d


def _rotate(u: np.ndarray, alpha: float) -> np.ndarray:
    """Fourier resampling ``u(r, t + 2 pi alpha)`` ring by ring."""
    n_t = u.shape[1]
    k = np.fft.fftfreq(n_t, 1.0 / n_t)
    return np.fft.ifft(np.fft.fft(u, axis=1) * np.exp(2j * np.pi * k * alpha), axis=1)


def _power_pullback(u: np.ndarray, domain: ModelDomain, k: int) -> np.ndarray:
    """``mu(z^k) conj(f')/f'`` for ``f = z^k``, resampled spectrally in ``t`` and by splines in ``r``."""
    r, t, _ = domain.mesh()
    n_t = domain.n_t
    coeffs = np.fft.fft(u, axis=1) / n_t
    spline = CubicSpline(domain.radii, coeffs, axis=0, extrapolate=True)
    ck = spline(domain.radii**k)
    m = np.fft.fftfreq(n_t, 1.0 / n_t)
    vals = np.einsum("rm,rtm->rt", ck, np.exp(1j * m[None, None, :] * (k * t)[:, :, None]))
    return vals * np.exp(-2j * (k - 1) * t)


def rotation_fourier_check(mu: GridField, symmetry: str = "rotation", alpha: float | None = None,
                           k: int | None = None, sym_tol: float = SYM_TOL,
                           mode_tol: float = MODE_TOL) -> RotationReport:
    """Angular Fourier analysis of a Beltrami differential invariant under a symmetry.

    ``symmetry`` is ``"rotation"`` (by ``2 pi alpha``) or ``"power"`` (``z^k``).
    Invariance is checked first; then every angular mode other than ``e^{2it}``
    must be below ``mode_tol`` relative to the mode-2 profile.
    """
    d = mu.domain
    if mu.tensor_type != (-1, 1) or d.kind not in (DomainKind.UNIT_DISK, DomainKind.ANNULUS):
        raise InputError("rotation check needs a Beltrami differential on the disk or an annulus")
    u = mu.samples[0]
    scale = max(np.abs(u).max(), 1e-300)
    if symmetry == "rotation":
        if alpha is None:
            raise InputError("rotation symmetry needs alpha")
        pulled = _rotate(u, alpha) * np.exp(-4j * np.pi * alpha)
        label = f"rotation({alpha})"
    elif symmetry == "power":
        if k is None or k < 2:
            raise InputError("power symmetry needs k >= 2")
        if d.kind is not DomainKind.UNIT_DISK:
            raise InputError("power-map symmetry only preserves the unit disk")
        pulled = _power_pullback(u, d, k)
        label = f"power({k})"
    else:
        raise InputError(f"unknown symmetry {symmetry!r}")
    inv = float(np.abs(pulled - u).max() / scale)
    if inv > sym_tol:
        raise PreconditionError(f"field is not invariant under {label} (defect {inv:.3g})")
    modes = np.fft.fft(u, axis=1) / d.n_t
    c2 = modes[:, 2].copy()
    m2 = float(np.abs(c2).max())
    modes[:, 2] = 0
    other = float(np.abs(modes).max())
    ratio = other / m2 if m2 > 0 else (0.0 if other == 0 else math.inf)
    profile = RadialProfile.from_samples(d.r_inner, d.radii, c2)
    return RotationReport(bool(ratio < mode_tol), label, inv, ratio, m2, profile)


def rotation_average(mu: GridField, n: int = 64) -> GridField:
    """Average of the pullbacks of ``mu`` by the rotations ``z -> e^{2 pi i j/n} z``."""
    u = mu.samples[0]
    acc = np.zeros_like(u)
    for j in range(n):
        a = j / n
        acc += _rotate(u, a) * np.exp(-4j * np.pi * a)
    return GridField(mu.domain, -1, 1, (acc / n)[None])


def random_band_limited(domain: ModelDomain, rng: np.random.Generator, max_mode: int = 20,
                        radial_degree: int = 3, p: int = -1, q: int = 1) -> GridField:
    """Random field ``sum_m a_m(r) e^{imt}`` with polynomial ``a_m`` and ``|m| <= max_mode``."""
    r, t, _ = domain.mesh()
    out = np.zeros(r.shape, dtype=complex)
    for m in range(-max_mode, max_mode + 1):
        c = rng.normal(size=radial_degree + 1) + 1j * rng.normal(size=radial_degree + 1)
        out += np.polynomial.polynomial.polyval(r, c) * np.exp(1j * m * t)
    return GridField(domain, p, q, out[None])


def _random_poly_zzbar(rng: np.random.Generator, degree: int):
    """Random polynomial in ``z`` and ``zbar`` of total degree ``degree``."""
    terms = [(j, k) for j in range(degree + 1) for k in range(degree + 1 - j)]
    coef = (rng.normal(size=len(terms)) + 1j * rng.normal(size=len(terms))) / len(terms)
    return lambda z: sum(c * z**j * np.conj(z) ** k for c, (j, k) in zip(coef, terms))


def random_vanishing_field(domain: ModelDomain, rng: np.random.Generator, degree: int = 3) -> GridField:
    """Smooth random vector field vanishing on the boundary of a disk or annulus."""
    P = _random_poly_zzbar(rng, degree)
    if domain.kind is DomainKind.ANNULUS:
        r0 = domain.r_inner
        cut = lambda z: (np.abs(z) - r0) * (1 - np.abs(z))  # noqa: E731
    else:
        cut = lambda z: 1 - np.abs(z) ** 2  # noqa: E731
    return GridField.sample(domain, lambda z: cut(z) * P(z), -1, 0)


def random_smooth_field(domain: ModelDomain, rng: np.random.Generator, p: int, degree: int = 3) -> GridField:
    """Smooth random ``(p, 0)`` field, a polynomial in ``z`` and ``zbar`` times ``exp(a zbar)``."""
    P = _random_poly_zzbar(rng, degree)
    a = complex(rng.normal(), rng.normal()) * 0.5
    return GridField.sample(domain, lambda z: P(z) * np.exp(a * np.conj(z)), p, 0)


__all__ = [
    "random_vanishing_field", "random_smooth_field",
    "theorem_a_check", "stokes_check", "cauchy_pompeiu_check", "residue_check",
    "rotation_fourier_check", "rotation_average", "random_band_limited", "RadialProfile",
    "named_profile", "radial_solve", "radial_roundtrip_error", "annulus_triviality_form",
    "primitive", "TheoremAReport", "IdentityReport", "RotationReport", "fsum_complex",
]
