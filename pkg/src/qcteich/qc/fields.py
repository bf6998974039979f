"""Sampled ``(p, q)`` tensor fields on model domains.

A field stores the coefficient ``u`` of ``u dz^p dzbar^q`` at every grid node,
one array per chart.  Vector fields are ``(-1, 0)``, Beltrami differentials
``(-1, 1)``, quadratic differentials ``(2, 0)`` and their ``dbar`` ``(2, 1)``.

Throughout, ``dbar = (d/dx + i d/dy) / 2`` and integrals of ``(1, 1)`` forms
use ``dz ^ dzbar = -2i dx ^ dy``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from ..errors import InputError
from .domains import DomainKind, ModelDomain

TENSOR_NAMES = {
    (-1, 0): "vector field",
    (-1, 1): "Beltrami differential",
    (2, 0): "quadratic differential",
    (2, 1): "dbar of a quadratic differential",
}

OVERLAP_TOL = 1e-6


def chart_factor(w, p: int, q: int):
    """Factor ``phi'(w)^p conj(phi'(w))^q`` for ``phi(w) = 1/w``."""
    d = -1.0 / (w * w)
    return d**p * np.conj(d) ** q


@dataclass(frozen=True, eq=False)
class GridField:
    domain: ModelDomain
    p: int
    q: int
    samples: np.ndarray
    source: Callable | None = field(default=None, repr=False)
    flags: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if (self.p, self.q) not in TENSOR_NAMES:
            raise InputError(f"unsupported tensor type ({self.p}, {self.q})")
        s = np.asarray(self.samples, dtype=complex)
        shape = (self.domain.n_charts, self.domain.n_r, self.domain.n_t)
        if s.shape == shape[1:] and shape[0] == 1:
            s = s[None]
        if s.shape != shape:
            raise InputError(f"samples have shape {s.shape}, expected {shape}")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @classmethod
    def sample(cls, domain: ModelDomain, fn: Callable, p: int, q: int,
               chart1: Callable | None = None) -> "GridField":
        """Sample ``fn`` (the standard-chart coefficient) at the grid nodes.

        On the sphere the second chart is filled from ``chart1(w)`` if given,
        otherwise from ``fn(1/w)`` by the transformation rule.
        """
        z = domain.nodes
        with np.errstate(all="ignore"):
            charts = [np.asarray(fn(z), dtype=complex) * np.ones(z.shape)]
            if domain.kind is DomainKind.SPHERE:
                if chart1 is not None:
                    charts.append(np.asarray(chart1(z), dtype=complex) * np.ones(z.shape))
                else:
                    charts.append(np.asarray(fn(1.0 / z), dtype=complex) * chart_factor(z, p, q))
        return cls(domain, p, q, np.stack(charts), source=fn)

    @classmethod
    def zeros(cls, domain: ModelDomain, p: int, q: int) -> "GridField":
        shape = (domain.n_charts, domain.n_r, domain.n_t)
        return cls(domain, p, q, np.zeros(shape, dtype=complex), source=lambda z: np.zeros_like(z))

    @property
    def tensor_type(self):
        return (self.p, self.q)

    @property
    def name(self) -> str:
        return TENSOR_NAMES[self.tensor_type]

    def _like(self, samples, source=None, p=None, q=None):
        return GridField(self.domain, self.p if p is None else p, self.q if q is None else q,
                         samples, source=source)

    def __add__(self, other: "GridField") -> "GridField":
        self._check_compatible(other)
        src = None
        if self.source is not None and other.source is not None:
            a, b = self.source, other.source
            src = lambda z: a(z) + b(z)  # noqa: E731
        return self._like(self.samples + other.samples, src)

    def __sub__(self, other: "GridField") -> "GridField":
        return self + other * -1.0

    def __mul__(self, c) -> "GridField":
        c = complex(c)
        src = None
        if self.source is not None:
            a = self.source
            src = lambda z: c * a(z)  # noqa: E731
        return self._like(self.samples * c, src)

    __rmul__ = __mul__

    def _check_compatible(self, other: "GridField"):
        if other.domain != self.domain or other.tensor_type != self.tensor_type:
            raise InputError("fields live on different grids or have different tensor types")

    def sup(self) -> float:
        """Grid maximum of ``|u|`` over unflagged nodes."""
        a = np.abs(self.samples)
        if self.flags is not None:
            a = np.where(self.flags, 0.0, a)
        return float(a.max())

    @property
    def is_beltrami_form(self) -> bool:
        return self.tensor_type == (-1, 1) and self.sup() < 1.0

    def boundary_values(self, radius: float, chart: int = 0) -> np.ndarray:
        """Values on the circle ``|z| = radius`` at the grid angles.

        Uses the exact source when present, otherwise quadratic extrapolation
        from the three nearest rings.
        """
        if self.source is not None and chart == 0:
            z = radius * np.exp(1j * self.domain.angles)
            return np.asarray(self.source(z), dtype=complex) * np.ones(z.shape)
        return ring_extrapolate(self.samples[chart], self.domain, radius)

    def overlap_defect(self) -> float:
        """Relative mismatch of the two sphere charts along ``|z| = 1``."""
        if self.domain.kind is not DomainKind.SPHERE:
            raise InputError("overlap consistency only applies to the sphere")
        u0 = ring_extrapolate(self.samples[0], self.domain, 1.0)
        u1 = ring_extrapolate(self.samples[1], self.domain, 1.0)
        t = self.domain.angles
        # the point e^{it} of chart 0 is w = e^{-it} in chart 1
        idx = (-np.arange(self.domain.n_t)) % self.domain.n_t
        w = np.exp(-1j * t)
        expected = u0 * chart_factor(w, self.p, self.q)
        scale = max(np.abs(u0).max(), np.abs(u1).max(), 1e-300)
        return float(np.abs(u1[idx] - expected).max() / scale)


def ring_extrapolate(samples: np.ndarray, domain: ModelDomain, radius: float) -> np.ndarray:
    """Lagrange extrapolation in the radial grid coordinate to ``radius``."""
    r = domain.radii
    x = np.log(r) if domain.log_radial else r
    x0 = math.log(radius) if domain.log_radial else radius
    idx = np.argsort(np.abs(x - x0))[:3]
    out = np.zeros(samples.shape[1], dtype=complex)
    for i in idx:
        li = 1.0
        for j in idx:
            if j != i:
                li *= (x0 - x[j]) / (x[i] - x[j])
        out += li * samples[i]
    return out


def _radial_derivative(u: np.ndarray, domain: ModelDomain, reflect: bool) -> np.ndarray:
    """``du/dr`` on one chart, second order throughout.

    Disk charts get a ghost ring at ``-dr/2`` by reflection through the origin.
    """
    h = domain.dr
    n_r, n_t = u.shape
    out = np.empty_like(u)
    out[1:-1] = (u[2:] - u[:-2]) / (2 * h)
    out[-1] = (3 * u[-1] - 4 * u[-2] + u[-3]) / (2 * h)
    if reflect:
        ghost = np.roll(u[0], -n_t // 2)
        out[0] = (u[1] - ghost) / (2 * h)
    else:
        out[0] = (-3 * u[0] + 4 * u[1] - u[2]) / (2 * h)
    if domain.log_radial:
        out /= domain.radii[:, None]
    return out


def _angular_derivative(u: np.ndarray) -> np.ndarray:
    """Spectral ``du/dt`` along each ring."""
    n_t = u.shape[1]
    k = np.fft.fftfreq(n_t, 1.0 / n_t)
    k[n_t // 2] = 0.0
    return np.fft.ifft(1j * k * np.fft.fft(u, axis=1), axis=1)


def dbar_grid(u: np.ndarray, domain: ModelDomain, reflect: bool) -> np.ndarray:
    r, t, _ = domain.mesh()
    return 0.5 * np.exp(1j * t) * (_radial_derivative(u, domain, reflect) + 1j * _angular_derivative(u) / r)


def dbar_numeric(xi: GridField) -> GridField:
    """``dbar`` of a ``(p, 0)`` field by finite differences in each chart."""
    if xi.q != 0:
        raise InputError(f"dbar expects a (p, 0) field, got {xi.tensor_type}")
    reflect = xi.domain.kind is not DomainKind.ANNULUS
    out = np.stack([dbar_grid(u, xi.domain, reflect) for u in xi.samples])
    return GridField(xi.domain, xi.p, 1, out)


class SupEstimate(NamedTuple):
    value: float
    spacing: float
    argmax: complex


def sup_hyperbolic_norm(domain: ModelDomain, xi: GridField) -> SupEstimate:
    """Grid maximum of ``rho |xi|``, reported with the grid spacing."""
    if xi.tensor_type != (-1, 0):
        raise InputError("hyperbolic norm expects a vector field")
    z = domain.nodes
    vals = domain.hyperbolic_density(z) * np.abs(xi.samples[0])
    i = np.unravel_index(np.argmax(vals), vals.shape)
    return SupEstimate(float(vals[i]), domain.spacing, complex(z[i]))


def fsum_complex(values: np.ndarray) -> complex:
    """Compensated sum in row-major order."""
    v = np.ravel(values)
    return complex(math.fsum(v.real.tolist()), math.fsum(v.imag.tolist()))


def integrate_11(domain: ModelDomain, density: np.ndarray, mask=None) -> complex:
    """``int u dz ^ dzbar`` for a ``(1, 1)`` coefficient sampled per chart."""
    w = domain.weights
    total = []
    for c in range(domain.n_charts):
        vals = density[c] * w * (-2j)
        if mask is not None:
            vals = np.where(mask[c], 0.0, vals)
        total.append(fsum_complex(vals))
    return complex(math.fsum([t.real for t in total]), math.fsum([t.imag for t in total]))


def pair(a: GridField, b: GridField) -> complex:
    """``int a . b`` for fields whose product is a ``(1, 1)`` form."""
    if a.domain != b.domain:
        raise InputError("fields live on different grids")
    if (a.p + b.p, a.q + b.q) != (1, 1):
        raise InputError(f"cannot pair {a.tensor_type} with {b.tensor_type}")
    mask = None
    if a.flags is not None or b.flags is not None:
        fa = a.flags if a.flags is not None else False
        fb = b.flags if b.flags is not None else False
        mask = np.logical_or(fa, fb)
    return integrate_11(a.domain, a.samples * b.samples, mask)


def pair_qd_beltrami(q: GridField, mu: GridField) -> complex:
    """``int q . mu`` for a quadratic differential and a Beltrami differential."""
    if q.tensor_type != (2, 0) or mu.tensor_type != (-1, 1):
        raise InputError(f"expected (2,0) and (-1,1) fields, got {q.tensor_type} and {mu.tensor_type}")
    return pair(q, mu)


def boundary_integral(domain: ModelDomain, values_on) -> complex:
    """``oint_{boundary} u dz`` by the trapezoid rule, boundary positively oriented.

    ``values_on(radius)`` returns the integrand samples at the grid angles.
    """
    t = domain.angles
    total = 0j
    for radius, sign in domain.boundary_radii:
        dz = 1j * radius * np.exp(1j * t) * domain.dt
        total += sign * fsum_complex(values_on(radius) * dz)
    return total
