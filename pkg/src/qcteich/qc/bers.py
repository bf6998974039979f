"""Approximating a quadratic differential by simple-pole differentials with poles on the unit circle.

Approximants are ``sum_j c_j dz^2 / (z - a_j)`` with ``a_j`` the ``n``-th roots
of unity.  The three moment conditions ``sum_j c_j a_j^k = 0`` (``k = 0, 1, 2``)
remove the triple pole every such term has at infinity, which is the common
normalisation; under them the coefficient in ``u = 1/z`` is
``sum_j c_j a_j^3 / (1 - a_j u)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space

from ..errors import InputError
from ..sphere import RationalFunction
from .domains import ModelDomain

IRLS_EPS = 1e-9
IRLS_ITERS = 200
IRLS_RTOL = 1e-10
# relative errors below this are roundoff; trend and stagnation checks ignore them
NOISE_FLOOR = 1e-12


class CauchyTarget:
    """``q(z) = (1/2pi) int g(t) dt / (z - e^{it})`` for ``g = sum gamma_m e^{imt}``.

    Inside the disk ``q = -sum_{m>=1} gamma_m z^{m-1}``; outside it is
    ``sum_{m<=-3} gamma_m z^{m-1}``.  Modes ``0, -1, -2`` are excluded because
    they would give a non-integrable pole at infinity.
    """

    def __init__(self, gammas: dict):
        bad = sorted(m for m in gammas if m in (0, -1, -2))
        if bad:
            raise InputError(f"modes {bad} give a non-integrable pole at infinity")
        self.gammas = {int(m): complex(g) for m, g in gammas.items()}

    @classmethod
    def smooth(cls, max_mode: int = 6):
        """Fixed deterministic target with geometrically decaying modes."""
        g = {}
        for m in list(range(1, max_mode + 1)) + list(range(-max_mode, -2)):
            g[m] = math.exp(-0.5 * abs(m)) * complex(math.cos(1.3 * m), math.sin(0.7 * m))
        return cls(g)

    def chart(self, c: int, u: np.ndarray) -> np.ndarray:
        """Coefficient in chart ``c`` at nodes ``u`` of the unit disk."""
        out = np.zeros(u.shape, dtype=complex)
        for m, g in self.gammas.items():
            if c == 0 and m >= 1:
                out -= g * u ** (m - 1)
            elif c == 1 and m <= -3:
                out += g * u ** (-3 - m)
        return out


class RationalTarget:
    """A rational quadratic differential given by its standard-chart coefficient."""

    def __init__(self, q: RationalFunction):
        if q.num.degree - q.den.degree > -3:
            raise InputError("target must be integrable at infinity")
        self.q = q

    def chart(self, c: int, u: np.ndarray) -> np.ndarray:
        if c == 0:
            return self.q(u)
        return self.q(1.0 / u) / u**4


def _design(a: np.ndarray, nodes: np.ndarray):
    """Basis values in both charts, stacked chart 0 over chart 1."""
    z = nodes.ravel()
    A0 = 1.0 / (z[:, None] - a[None, :])
    A1 = a[None, :] ** 3 / (1.0 - a[None, :] * z[:, None])
    return np.vstack([A0, A1])


@dataclass
class BersResult:
    pole_counts: list
    errors: list
    iterations: list
    stagnated: list
    coefficients: list = field(default_factory=list, repr=False)

    @property
    def non_increasing(self) -> bool:
        return all(b <= max(a * 1.05, NOISE_FLOOR) for a, b in zip(self.errors, self.errors[1:]))

    def to_dict(self):
        return {"pole_counts": self.pole_counts, "errors": self.errors,
                "iterations": self.iterations, "stagnated": self.stagnated,
                "non_increasing": self.non_increasing}


def _l1(weights, resid):
    return math.fsum((weights * np.abs(resid)).tolist())


def irls_l1(A: np.ndarray, b: np.ndarray, w: np.ndarray, eps: float = IRLS_EPS,
            iters: int = IRLS_ITERS, rtol: float = IRLS_RTOL):
    """Minimise ``sum_i w_i |A y - b|_i`` by iteratively reweighted least squares."""
    sw = np.sqrt(w)
    y = np.linalg.lstsq(A * sw[:, None], b * sw, rcond=None)[0]
    best = _l1(w, A @ y - b)
    it, stalled = 0, False
    for it in range(1, iters + 1):
        r = A @ y - b
        s = np.sqrt(w / np.maximum(np.abs(r), eps))
        y_new = np.linalg.lstsq(A * s[:, None], b * s, rcond=None)[0]
        cur = _l1(w, A @ y_new - b)
        if cur > best * (1 + 1e-12):
            stalled = best > NOISE_FLOOR * max(_l1(w, b), 1e-300)
            break
        done = best - cur <= rtol * best
        y, best = y_new, cur
        if done:
            break
    return y, best, it, stalled


def bers_density_experiment(target, pole_counts=(4, 8, 16, 32), n_r: int = 48, n_t: int = 256,
                            eps: float = IRLS_EPS) -> BersResult:
    """Relative sampled ``L^1`` error of the best approximant for each pole count.

    Samples cover both sphere charts on cell-centred polar grids, so no node
    lies on the circle that carries the poles.
    """
    if any(n < 4 for n in pole_counts):
        raise InputError("at least four poles are needed to satisfy the three moment conditions")
    dom = ModelDomain.sphere(n_r, n_t)
    nodes = dom.nodes
    b = np.concatenate([target.chart(0, nodes).ravel(), target.chart(1, nodes).ravel()])
    w = np.concatenate([dom.weights.ravel(), dom.weights.ravel()])
    mass = _l1(w, b)
    if not mass > 0:
        raise InputError("target has zero mass")
    out = BersResult(list(pole_counts), [], [], [])
    for n in pole_counts:
        a = np.exp(2j * np.pi * np.arange(n) / n)
        M = np.vstack([a**k for k in range(3)])
        N = null_space(M)
        A = _design(a, nodes) @ N
        y, err, it, stalled = irls_l1(A, b, w, eps)
        out.errors.append(err / mass)
        out.iterations.append(it)
        out.stagnated.append(stalled)
        out.coefficients.append(N @ y)
    return out


def residual_field(target, a: np.ndarray, c: np.ndarray, domain: ModelDomain):
    """Per-chart residual samples of an approximant, for diagnostics."""
    nodes = domain.nodes
    D = _design(a, nodes) @ c
    k = nodes.size
    return [target.chart(0, nodes) - D[:k].reshape(nodes.shape),
            target.chart(1, nodes) - D[k:].reshape(nodes.shape)]


__all__ = ["CauchyTarget", "RationalTarget", "bers_density_experiment", "BersResult", "irls_l1"]
