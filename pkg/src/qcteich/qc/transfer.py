"""Pullback of Beltrami differentials and pushforward of quadratic differentials on the sphere.

Both operators work chart by chart on the two-disk sphere grid: a node in
chart ``a`` with coordinate ``u`` maps to chart ``b`` chosen so that the image
coordinate has modulus at most one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InputError
from ..poly import batch_roots
from ..sphere import INF, RationalFunction, RationalMap
from .domains import DomainKind, ModelDomain
from .fields import GridField, chart_factor, pair

CRIT_TOL = 1e-12
VALUE_CLEARANCE = 1e-3


def _require_sphere(domain: ModelDomain):
    if domain.kind is not DomainKind.SPHERE:
        raise InputError("transfer operators act on the two-chart sphere grid")


def _local_image(f: RationalMap, a: int, u: np.ndarray):
    """Image chart, image coordinate and local derivative for nodes ``u`` of chart ``a``."""
    ch = f.charts()
    n, dn, n1, dn1 = ch[(a, 0)]
    N, D = n(u), dn(u)
    b = np.where(np.abs(N) <= np.abs(D), 0, 1)
    with np.errstate(all="ignore"):
        v = np.where(b == 0, N / D, D / N)
        deriv = np.empty_like(u)
        for bb in (0, 1):
            n, dn, n1, dn1 = ch[(a, bb)]
            P, Q = n(u), dn(u)
            val = (n1(u) * Q - P * dn1(u)) / (Q * Q)
            deriv = np.where(b == bb, val, deriv)
    return b, v, deriv


def _chart_value(field: GridField, chart: int, v: np.ndarray) -> np.ndarray:
    """Evaluate ``field`` in ``chart`` at local coordinates ``v``."""
    if field.source is not None:
        with np.errstate(all="ignore"):
            if chart == 0:
                return np.asarray(field.source(v), dtype=complex) * np.ones(v.shape)
            return np.asarray(field.source(1.0 / v), dtype=complex) * chart_factor(v, field.p, field.q)
    return bilinear(field.samples[chart], field.domain, v)


def bilinear(samples: np.ndarray, domain: ModelDomain, v: np.ndarray) -> np.ndarray:
    """Bilinear interpolation in ``(r, t)`` on one disk chart of the grid."""
    n_r, n_t = samples.shape
    r = np.abs(v)
    t = np.mod(np.angle(v), 2 * np.pi)
    x = r / domain.dr - 0.5
    y = t / domain.dt
    # below the first ring, reflect through the origin (ghost ring at -dr/2)
    ghost = np.roll(samples[0], -n_t // 2)
    ext = np.vstack([ghost[None], samples])
    x = np.clip(x + 1.0, 0.0, n_r)
    i0 = np.minimum(np.floor(x).astype(int), n_r - 1)
    fx = x - i0
    j0 = np.floor(y).astype(int) % n_t
    fy = y - np.floor(y)
    j1 = (j0 + 1) % n_t
    return ((1 - fx) * (1 - fy) * ext[i0, j0] + (1 - fx) * fy * ext[i0, j1]
            + fx * (1 - fy) * ext[i0 + 1, j0] + fx * fy * ext[i0 + 1, j1])


def pullback_beltrami(f: RationalMap, mu: GridField) -> GridField:
    """``f^* mu = mu(f) conj(f') / f'`` at every node of both charts.

    Nodes where ``f'`` vanishes to working precision are flagged and get the
    unimodular factor 1.
    """
    _require_sphere(mu.domain)
    if mu.tensor_type != (-1, 1):
        raise InputError("pullback_beltrami expects a Beltrami differential")
    d = mu.domain
    z = d.nodes
    out, flags = [], []
    for a in (0, 1):
        b, v, deriv = _local_image(f, a, z)
        vals = np.zeros(z.shape, dtype=complex)
        for bb in (0, 1):
            m = b == bb
            if m.any():
                vals[m] = _chart_value(mu, bb, v[m])
        crit = ~np.isfinite(deriv) | (np.abs(deriv) < CRIT_TOL)
        with np.errstate(all="ignore"):
            factor = np.where(crit, 1.0, np.conj(deriv) / deriv)
        out.append(vals * factor)
        flags.append(crit)

    source = None
    if mu.source is not None:
        src = mu.source
        fr = f.as_function()
        fd = fr.deriv()

        def source(zz):
            zz = np.asarray(zz, dtype=complex)
            with np.errstate(all="ignore"):
                g = fd(zz)
                return src(fr(zz)) * np.conj(g) / g

    res = GridField(d, -1, 1, np.stack(out), source=source)
    object.__setattr__(res, "flags", np.stack(flags))
    return res


def _chart_coefficient(q: RationalFunction, chart: int, u: np.ndarray) -> np.ndarray:
    with np.errstate(all="ignore"):
        if chart == 0:
            return q(u)
        return q(1.0 / u) / u**4


def _preimages(f: RationalMap, b: int, v: np.ndarray):
    """Preimages of chart-``b`` coordinates ``v`` as ``(chart, coordinate)`` arrays of shape ``(N, d)``.

    Roots are taken from chart 0 where they have modulus at most one and from
    chart 1 otherwise, so no root is computed near infinity.
    """
    d = f.degree
    ch = f.charts()
    polys = {}
    for a in (0, 1):
        n, dn, _, _ = ch[(a, b)]
        C = n.padded(d + 1)[None, :] - v[:, None] * dn.padded(d + 1)[None, :]
        scale = np.abs(C).max(axis=1, keepdims=True)
        lead = C[:, -1]
        tiny = np.abs(lead) < 1e-14 * scale[:, 0]
        C[tiny, -1] = 1e-14 * scale[tiny, 0]
        polys[a] = batch_roots(C)
    r0, r1 = polys[0], polys[1]
    with np.errstate(all="ignore"):
        m0 = np.where(np.isfinite(r0), np.abs(r0), np.inf)
        m1 = np.where(np.isfinite(r1), np.abs(r1), np.inf)
    o0 = np.argsort(m0, axis=1)
    o1 = np.argsort(m1, axis=1)
    r0 = np.take_along_axis(r0, o0, axis=1)
    r1 = np.take_along_axis(r1, o1, axis=1)
    k0 = (np.take_along_axis(m0, o0, axis=1) <= 1.0).sum(axis=1)
    charts = np.zeros((len(v), d), dtype=int)
    coords = np.zeros((len(v), d), dtype=complex)
    cols = np.arange(d)[None, :]
    use0 = cols < k0[:, None]
    charts[~use0] = 1
    coords[use0] = r0[use0]
    # the d - k0 smallest chart-1 roots fill the remaining slots
    idx1 = np.clip(cols - k0[:, None], 0, d - 1)
    coords[~use0] = np.take_along_axis(r1, idx1, axis=1)[~use0]
    return charts, coords


def critical_values(f: RationalMap):
    from ..dynamics import critical_points

    return [f(c.location) for c in critical_points(f)] if f.degree >= 2 else []


def _near_points(domain_chart: int, v: np.ndarray, points, radius: float) -> np.ndarray:
    """Nodes whose chordal distance to any of ``points`` is below ``radius``."""
    mask = np.zeros(v.shape, dtype=bool)
    if not points:
        return mask
    z = v if domain_chart == 0 else np.where(v == 0, np.inf, 1.0 / np.where(v == 0, 1, v))
    for p in points:
        if p is INF:
            dist = 2.0 / np.sqrt(1.0 + np.abs(z) ** 2)
        else:
            dist = 2.0 * np.abs(z - p) / np.sqrt((1 + np.abs(z) ** 2) * (1 + abs(p) ** 2))
        mask |= dist < radius
    return mask


def pushforward_quadratic(f: RationalMap, q: RationalFunction, domain: ModelDomain,
                          clearance: float = VALUE_CLEARANCE) -> GridField:
    """``(f_* q)(w) = sum over f(z) = w of q(z) / f'(z)^2``, sampled on the sphere grid.

    ``q`` is the standard-chart coefficient of ``q(z) dz^2``.  Nodes within
    chordal distance ``clearance`` of a critical value, or with a preimage that
    close to a pole of ``q``, are flagged.
    """
    _require_sphere(domain)
    q = q if isinstance(q, RationalFunction) else RationalFunction(q)
    crit_vals = critical_values(f)
    q_poles = [p for p, _ in q.poles()]
    # q(1/u) / u^4 has a pole at u = 0 unless q decays like z^-4
    if not q.is_zero() and q.num.degree - q.den.degree > -4:
        q_poles.append(INF)
    z = domain.nodes.ravel()
    out, flags = [], []
    for b in (0, 1):
        charts, coords = _preimages(f, b, z)
        total = np.zeros(z.shape, dtype=complex)
        bad = _near_points(b, z, crit_vals, clearance)
        for j in range(f.degree):
            for a in (0, 1):
                m = charts[:, j] == a
                if not m.any():
                    continue
                u = coords[m, j]
                n, dn, n1, dn1 = f.charts()[(a, b)]
                with np.errstate(all="ignore"):
                    Q = dn(u)
                    deriv = (n1(u) * Q - n(u) * dn1(u)) / (Q * Q)
                    total[m] += _chart_coefficient(q, a, u) / (deriv * deriv)
                bad[m] |= _near_points(a, u, q_poles, clearance)
        bad |= ~np.isfinite(total)
        total = np.where(np.isfinite(total), total, 0.0)
        out.append(total.reshape(domain.nodes.shape))
        flags.append(bad.reshape(domain.nodes.shape))
    res = GridField(domain, 2, 0, np.stack(out))
    object.__setattr__(res, "flags", np.stack(flags))
    return res


def sample_quadratic(q: RationalFunction, domain: ModelDomain) -> GridField:
    q = q if isinstance(q, RationalFunction) else RationalFunction(q)
    return GridField.sample(domain, q, 2, 0)


def nabla_f(f: RationalMap, q: RationalFunction, domain: ModelDomain,
            clearance: float = VALUE_CLEARANCE) -> GridField:
    """``q - f_* q`` on the sphere grid; flags are inherited from the pushforward."""
    push = pushforward_quadratic(f, q, domain, clearance)
    base = sample_quadratic(q, domain)
    res = GridField(domain, 2, 0, base.samples - push.samples)
    flags = push.flags | ~np.isfinite(base.samples)
    object.__setattr__(res, "flags", flags)
    return res


@dataclass
class AdjointReport:
    push_pairing: complex
    pull_pairing: complex
    defect: float
    tol: float
    passed: bool

    def to_dict(self):
        c = lambda z: [z.real, z.imag]  # noqa: E731
        return {"push_pairing": c(self.push_pairing), "pull_pairing": c(self.pull_pairing),
                "defect": self.defect, "tol": self.tol, "passed": self.passed}


def adjointness_check(f: RationalMap, q: RationalFunction, mu: GridField, tol: float = 1e-4) -> AdjointReport:
    """Compare ``int (f_* q) mu`` with ``int q (f^* mu)``."""
    d = mu.domain
    lhs = pair(pushforward_quadratic(f, q, d), mu)
    rhs = pair(sample_quadratic(q, d), pullback_beltrami(f, mu))
    defect = abs(lhs - rhs)
    return AdjointReport(lhs, rhs, defect, tol, bool(defect < tol * (1 + abs(lhs))))


__all__ = [
    "pullback_beltrami", "pushforward_quadratic", "nabla_f", "sample_quadratic",
    "adjointness_check", "critical_values", "bilinear", "AdjointReport",
]
