"""Model domains with cell-centred polar grids and their hyperbolic densities."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ..errors import InputError

MIN_NODES = 8


class DomainKind(str, enum.Enum):
    UNIT_DISK = "unit_disk"
    PUNCTURED_DISK = "punctured_disk"
    ANNULUS = "annulus"
    SPHERE = "sphere"


@dataclass(frozen=True)
class ModelDomain:
    """A model domain with an ``n_r x n_t`` polar grid.

    Disks use radii uniform in ``r``; the annulus uses radii uniform in
    ``log r``.  Nodes sit at cell centres, so no node lies on the boundary or
    at the origin.  ``SPHERE`` is two unit-disk charts ``z`` and ``w = 1/z``.
    """

    kind: DomainKind
    n_r: int
    n_t: int
    r_inner: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", DomainKind(self.kind))
        if self.n_r < MIN_NODES or self.n_t < MIN_NODES:
            raise InputError(f"grid {self.n_r}x{self.n_t} too coarse (need >= {MIN_NODES} per dimension)")
        if self.n_t % 2:
            raise InputError("n_t must be even")
        if self.kind is DomainKind.ANNULUS:
            if not 0.0 < self.r_inner < 1.0:
                raise InputError(f"annulus inner radius {self.r_inner} not in (0, 1)")
        elif self.r_inner != 0.0:
            raise InputError("r_inner is only meaningful for an annulus")

    # constructors
    @classmethod
    def disk(cls, n_r=256, n_t=256):
        return cls(DomainKind.UNIT_DISK, n_r, n_t)

    @classmethod
    def punctured_disk(cls, n_r=256, n_t=256):
        return cls(DomainKind.PUNCTURED_DISK, n_r, n_t)

    @classmethod
    def annulus(cls, r_inner, n_r=256, n_t=256):
        return cls(DomainKind.ANNULUS, n_r, n_t, float(r_inner))

    @classmethod
    def sphere(cls, n_r=256, n_t=256):
        return cls(DomainKind.SPHERE, n_r, n_t)

    @property
    def n_charts(self) -> int:
        return 2 if self.kind is DomainKind.SPHERE else 1

    @property
    def hyperbolic(self) -> bool:
        return self.kind is not DomainKind.SPHERE

    @property
    def log_radial(self) -> bool:
        return self.kind is DomainKind.ANNULUS

    # grid geometry
    @property
    def radii(self) -> np.ndarray:
        n = self.n_r
        if self.log_radial:
            s0 = math.log(self.r_inner)
            return np.exp(s0 + (np.arange(n) + 0.5) * (-s0 / n))
        return (np.arange(n) + 0.5) / n

    @property
    def angles(self) -> np.ndarray:
        return np.arange(self.n_t) * (2 * np.pi / self.n_t)

    @property
    def dr(self) -> float:
        """Radial step: in ``r`` for disks, in ``log r`` for the annulus."""
        if self.log_radial:
            return -math.log(self.r_inner) / self.n_r
        return 1.0 / self.n_r

    @property
    def dt(self) -> float:
        return 2 * np.pi / self.n_t

    @property
    def spacing(self) -> float:
        """Largest Euclidean cell diameter, reported next to grid sup estimates."""
        return float(max(self.dr, self.dt))

    def mesh(self):
        """``(r, t, z)`` arrays of shape ``(n_r, n_t)``."""
        r, t = np.meshgrid(self.radii, self.angles, indexing="ij")
        return r, t, r * np.exp(1j * t)

    @property
    def nodes(self) -> np.ndarray:
        return self.mesh()[2]

    @property
    def weights(self) -> np.ndarray:
        """Exact areas of the polar cells, shape ``(n_r, n_t)``."""
        if self.log_radial:
            s0 = math.log(self.r_inner)
            edges = np.exp(s0 + np.arange(self.n_r + 1) * self.dr)
        else:
            edges = np.arange(self.n_r + 1) * self.dr
        w = 0.5 * np.diff(edges * edges) * self.dt
        return np.repeat(w[:, None], self.n_t, axis=1)

    @property
    def boundary_radii(self):
        """Boundary circles as ``(radius, orientation)``; ``+1`` is counterclockwise."""
        if self.kind is DomainKind.ANNULUS:
            return [(1.0, 1), (self.r_inner, -1)]
        return [(1.0, 1)]

    def contains(self, z) -> np.ndarray:
        a = np.abs(np.asarray(z))
        if self.kind is DomainKind.UNIT_DISK:
            return a < 1
        if self.kind is DomainKind.PUNCTURED_DISK:
            return (a > 0) & (a < 1)
        if self.kind is DomainKind.ANNULUS:
            return (a > self.r_inner) & (a < 1)
        return np.ones(a.shape, dtype=bool)

    # hyperbolic structure
    def hyperbolic_density(self, z):
        """Curvature ``-1`` density ``rho`` with ``rho |dz|`` the hyperbolic metric."""
        if not self.hyperbolic:
            raise InputError("the sphere carries no hyperbolic metric")
        z = np.asarray(z, dtype=complex)
        if not np.all(self.contains(z)):
            raise InputError("point outside the domain")
        a = np.abs(z)
        if self.kind is DomainKind.UNIT_DISK:
            out = 2.0 / (1.0 - a * a)
        elif self.kind is DomainKind.PUNCTURED_DISK:
            out = 1.0 / (a * np.log(1.0 / a))
        else:
            L = -math.log(self.r_inner)
            out = np.pi / (L * a * np.sin(np.pi * np.log(a / self.r_inner) / L))
        return out if out.ndim else float(out)

    def curvature(self, z, h: float | None = None):
        """Gaussian curvature ``-Laplacian(log rho) / rho^2`` by a 5-point stencil."""
        z = np.asarray(z, dtype=complex)
        if h is None:
            h = 1e-3 * np.minimum(self.clearance(z), 1.0)
        lr = lambda w: np.log(self.hyperbolic_density(w))  # noqa: E731
        lap = (lr(z + h) + lr(z - h) + lr(z + 1j * h) + lr(z - 1j * h) - 4 * lr(z)) / (h * h)
        return -lap / self.hyperbolic_density(z) ** 2

    def clearance(self, z):
        """Euclidean distance from ``z`` to the boundary."""
        a = np.abs(np.asarray(z))
        out = 1.0 - a
        if self.kind is DomainKind.ANNULUS:
            out = np.minimum(out, a - self.r_inner)
        elif self.kind is DomainKind.PUNCTURED_DISK:
            out = np.minimum(out, a)
        return out

    def random_points(self, rng: np.random.Generator, n: int, margin: float = 0.05):
        lo = self.r_inner + margin if self.kind is not DomainKind.UNIT_DISK else 0.0
        lo = max(lo, margin) if self.kind is DomainKind.PUNCTURED_DISK else lo
        r = rng.uniform(lo, 1.0 - margin, size=n)
        t = rng.uniform(0, 2 * np.pi, size=n)
        return r * np.exp(1j * t)

    def to_dict(self):
        return {"kind": self.kind.value, "n_r": self.n_r, "n_t": self.n_t, "r_inner": self.r_inner}


def hyperbolic_density(domain: ModelDomain, z):
    return domain.hyperbolic_density(z)
