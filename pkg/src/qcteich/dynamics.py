"""Critical points, periodic cycles, critical fates and the dynamical portrait."""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field, asdict
from fractions import Fraction

import mpmath
import numpy as np

from .errors import ClassificationIndeterminate, DegreeCapError, InputError
from .poly import Polynomial, roots
from .sphere import (INF, RationalMap, chart_of, chordal, from_chart, iterate,
                     point_label, to_chart)


@dataclass(frozen=True)
class DynamicsConfig:
    max_period: int = 4
    degree_cap: int = 4096
    orbit_tol: float = 1e-9
    land_margin: float = 1e-6
    max_iter: int = 20000
    superattracting_tol: float = 1e-10
    indifferent_tol: float = 1e-6
    unity_tol: float = 1e-6
    max_parabolic_q: int = 64
    brjuno_depth: int = 30
    brjuno_threshold: float = 12.0
    brjuno_tail_tol: float = 1e-3
    brjuno_qmax: float = 1e7
    trap_confirm: int = 20
    parabolic_radius: float = 0.05
    level_tol: float = 1e-6
    siegel_level_tol: float = 1e-2
    capture_margin: float = 1e-2
    capture_recurrence: float = 0.05
    merge_window: int = 200
    precise_degree: int = 256
    precise_dps: int = 60
    merge_radius: float = 1e-6


class Kind(str, enum.Enum):
    SUPERATTRACTING = "superattracting"
    ATTRACTING = "attracting"
    PARABOLIC = "parabolic"
    SIEGEL = "siegel"
    REPELLING = "repelling"
    UNCLASSIFIED = "indifferent_unclassified"
    CREMER = "cremer"  # only via annotation


class FateKind(str, enum.Enum):
    PREPERIODIC = "preperiodic"
    ATTRACTED = "attracted"
    CAPTURED = "captured"
    JULIA = "julia"  # acyclic in the Julia set; only via annotation
    UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class CriticalPoint:
    location: object
    multiplicity: int

    def to_dict(self):
        return {"location": point_label(self.location), "multiplicity": self.multiplicity}


@dataclass(frozen=True)
class Cycle:
    points: tuple
    period: int
    multiplier: complex
    kind: Kind
    parabolic_q: int | None = None
    annotated: bool = False

    def to_dict(self):
        return {
            "points": [point_label(z) for z in self.points],
            "period": self.period,
            "multiplier": [self.multiplier.real, self.multiplier.imag],
            "kind": self.kind.value,
            "parabolic_q": self.parabolic_q,
            "annotated": self.annotated,
        }


@dataclass(frozen=True)
class CriticalFate:
    critical_point: CriticalPoint
    fate: FateKind
    cycle: int | None = None
    preperiod: int | None = None
    level: float | None = None
    entry: object = None  # orbit point inside the trap of cycle.points[0]
    margin: float = math.inf
    annotated: bool = False

    @property
    def acyclic(self) -> bool:
        return self.fate is not FateKind.PREPERIODIC

    @property
    def in_fatou(self) -> bool:
        return self.fate in (FateKind.ATTRACTED, FateKind.CAPTURED)

    def to_dict(self):
        return {
            "critical_point": self.critical_point.to_dict(),
            "fate": self.fate.value,
            "cycle": self.cycle,
            "preperiod": self.preperiod,
            "level": self.level,
            "margin": None if math.isinf(self.margin) else self.margin,
            "annotated": self.annotated,
        }


@dataclass
class Annotations:
    n_H: int = 0
    n_J: int = 0
    fate_overrides: dict = field(default_factory=dict)  # crit index -> dict
    cycle_hints: dict = field(default_factory=dict)  # cycle index -> "siegel" | "cremer"


@dataclass
class DynamicalPortrait:
    map: RationalMap
    critical_points: list
    cycles: list
    fates: list
    classes: list
    n_f: int
    n_H: int
    n_J: int
    n_p: int
    annotations_used: dict
    warnings: list

    @property
    def degree(self) -> int:
        return self.map.degree

    def to_dict(self):
        return {
            "degree": self.degree,
            "critical_points": [c.to_dict() for c in self.critical_points],
            "cycles": [c.to_dict() for c in self.cycles],
            "fates": [f.to_dict() for f in self.fates],
            "classes": [list(b) for b in self.classes],
            "n_f": self.n_f,
            "n_H": self.n_H,
            "n_J": self.n_J,
            "n_p": self.n_p,
            "annotations_used": self.annotations_used,
            "warnings": list(self.warnings),
        }


# ---------------------------------------------------------------------------
# critical points


def _low_order(p: Polynomial, rel_tol: float = 1e-12) -> int:
    s = p.scale()
    k = 0
    for c in p.coeffs:
        if abs(c) > rel_tol * s:
            break
        k += 1
    return k


def critical_points(f: RationalMap) -> list:
    """Critical points with multiplicities; they sum to ``2d - 2``."""
    d = f.degree
    if d < 2:
        raise InputError("critical points need degree >= 2")
    b = chart_of(f(INF))
    n, dn, n1, dn1 = f.charts()[(1, b)]
    m_inf = _low_order(n1 * dn - n * dn1)
    W = f.wronskian()
    deg_w = 2 * d - 2 - m_inf
    W = Polynomial(W.coeffs[: deg_w + 1])
    out = []
    if deg_w >= 1:
        out = [CriticalPoint(complex(r), m) for r, m in roots(W)]
    if m_inf:
        out.append(CriticalPoint(INF, m_inf))
    total = sum(c.multiplicity for c in out)
    if total != 2 * d - 2:
        raise InputError(f"critical multiplicities sum to {total}, expected {2 * d - 2}")
    return out


def local_degree(crit: list, z, tol: float = 1e-8) -> int:
    for c in crit:
        if chordal(c.location, z) < tol:
            return c.multiplicity + 1
    return 1


# ---------------------------------------------------------------------------
# cycles


def orbit(f: RationalMap, z, n: int) -> list:
    out = [z]
    for _ in range(n):
        z = f(z)
        out.append(z)
    return out


def cycle_multiplier(f: RationalMap, points) -> complex:
    lam = 1 + 0j
    p = len(points)
    for i, z in enumerate(points):
        lam *= f.local_derivative(z, target=points[(i + 1) % p])
    return lam


def _fixed_points_in_chart(F: RationalMap, chart: int):
    n, dn, _, _ = F.charts()[(chart, chart)]
    g = n - dn * Polynomial([0, 1])
    if g.is_zero():
        raise InputError("the iterate is the identity")
    return roots(g)


def _mp_mul(a, b):
    out = [mpmath.mpc(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _mp_axpy(acc, c, t):
    if len(acc) < len(t):
        acc = acc + [mpmath.mpc(0)] * (len(t) - len(acc))
    return [x + c * y for x, y in zip(acc, t)] + acc[len(t):]


def _fixed_points_precise(f: RationalMap, p: int, dps: int):
    """Fixed points of ``f^p`` from the exactly composed iterate at ``dps`` digits.

    Expanding ``f^p`` in double precision loses most of its digits for
    conjugated maps, so the homogeneous composition and the root solve both
    run in multiprecision; the roots are returned as doubles (``INF`` when the
    degree drops).
    """
    d = f.degree
    with mpmath.workdps(dps):
        P = [mpmath.mpc(c) for c in f.num.coeffs]
        Q = [mpmath.mpc(c) for c in f.den.coeffs]
        A, B = [mpmath.mpc(0), mpmath.mpc(1)], [mpmath.mpc(1)]
        for _ in range(p):
            pa, pb = [[mpmath.mpc(1)]], [[mpmath.mpc(1)]]
            for _ in range(d):
                pa.append(_mp_mul(pa[-1], A))
                pb.append(_mp_mul(pb[-1], B))
            num, den = [mpmath.mpc(0)], [mpmath.mpc(0)]
            for i in range(d + 1):
                t = _mp_mul(pa[i], pb[d - i])
                if i < len(P):
                    num = _mp_axpy(num, P[i], t)
                if i < len(Q):
                    den = _mp_axpy(den, Q[i], t)
            A, B = num, den
        G = _mp_axpy(A, mpmath.mpc(-1), [mpmath.mpc(0)] + B)
        scale = max(abs(c) for c in G)
        while G and abs(G[-1]) <= scale * mpmath.mpf(10) ** (-dps + 5):
            G.pop()
        k0 = 0
        while k0 < len(G) and G[k0] == 0:
            k0 += 1
        out = [0j] * k0
        core = G[k0:]
        if len(core) > 1:
            # roots only need double accuracy; the extra working precision
            # lets clustered (parabolic) roots converge to that target
            with mpmath.workdps(20):
                rs = mpmath.polyroots(core[::-1], maxsteps=100 + 20 * len(core),
                                      extraprec=4 * dps)
            out += [complex(r) for r in rs]
        n_inf = d**p + 1 - (len(G) - 1)
        out += [INF] * n_inf
    return out


def _merge_close(points, radius):
    """Single-linkage merge of sphere points; returns ``(point, multiplicity)``."""
    groups = []
    for z in points:
        for g in groups:
            if any(chordal(z, w) < radius for w in g):
                g.append(z)
                break
        else:
            groups.append([z])
    out = []
    for g in groups:
        if any(w is INF for w in g):
            out.append((INF, len(g)))
        else:
            out.append((complex(np.mean(g)), len(g)))
    return out


def _polish(f: RationalMap, z, p: int, steps: int = 30):
    """Newton polish of a fixed point of ``f^p`` computed by iteration."""
    a = chart_of(z)
    best, best_res = z, chordal(_iter(f, z, p), z)
    u = to_chart(z, a)
    for _ in range(steps):
        w = from_chart(u, a)
        fz = _iter(f, w, p)
        if chart_of(fz) != a:
            break
        lam = cycle_like_derivative(f, w, p)
        denom = lam - 1
        if denom == 0:
            break
        u = u - (to_chart(fz, a) - u) / denom
        w = from_chart(u, a)
        res = chordal(_iter(f, w, p), w)
        if res < best_res:
            best, best_res = w, res
    return best


def _iter(f, z, p):
    for _ in range(p):
        z = f(z)
    return z


def cycle_like_derivative(f: RationalMap, z, p: int) -> complex:
    """Derivative of ``f^p`` at a near-fixed point ``z``, in the chart of ``z``."""
    lam = 1 + 0j
    w = z
    for i in range(p):
        nxt = f(w)
        lam *= f.local_derivative(w, target=nxt if i < p - 1 else z)
        w = nxt
    return lam


def brjuno_partial(theta: float, depth: int, qmax: float):
    """Partial Brjuno sum of ``theta`` and its last term.

    Uses the exact continued fraction of the double ``theta`` and stops once
    the convergent denominators exceed ``qmax`` (beyond that the double no
    longer determines the expansion).
    """
    x = Fraction(theta % 1.0)
    if x == 0:
        return math.inf, math.inf, 0
    q_prev, q = 0, 1  # q_{-1}, q_0
    total, last = 0.0, math.inf
    x = 1 / x
    n = 0
    while n < depth:
        a = math.floor(x)
        q_next = a * q + q_prev
        last = math.log(q_next) / q
        total += last
        n += 1
        frac = x - a
        if frac == 0 or q_next > qmax:
            if frac == 0:
                return math.inf, math.inf, n  # rational
            break
        x = 1 / frac
        q_prev, q = q, q_next
    return total, last, n


def classify_cycle(lam: complex, cfg: DynamicsConfig = DynamicsConfig()):
    """Kind of a cycle with multiplier ``lam``; returns ``(Kind, q)``."""
    a = abs(lam)
    if a < cfg.superattracting_tol:
        return Kind.SUPERATTRACTING, None
    if a < 1 - cfg.indifferent_tol:
        return Kind.ATTRACTING, None
    if a > 1 + cfg.indifferent_tol:
        return Kind.REPELLING, None
    for q in range(1, cfg.max_parabolic_q + 1):
        if abs(lam**q - 1) < cfg.unity_tol:
            return Kind.PARABOLIC, q
    theta = cmath.phase(lam) / (2 * math.pi)
    total, last, _ = brjuno_partial(theta, cfg.brjuno_depth, cfg.brjuno_qmax)
    if total <= cfg.brjuno_threshold and last <= cfg.brjuno_tail_tol:
        return Kind.SIEGEL, None
    return Kind.UNCLASSIFIED, None


def find_cycles(f: RationalMap, max_period: int = 4, cfg: DynamicsConfig = DynamicsConfig()):
    """All cycles of least period ``<= max_period``.

    Fixed points of ``f^p`` are found in both charts from the exactly composed
    iterate; points whose least period is a proper divisor of ``p`` are dropped.
    """
    d = f.degree
    if d**max_period > cfg.degree_cap:
        raise DegreeCapError(
            f"deg f^{max_period} = {d**max_period} exceeds the cap {cfg.degree_cap}; "
            "use a smaller max_period"
        )
    cycles = []
    for p in range(1, max_period + 1):
        if d**p <= cfg.precise_degree:
            raw = _fixed_points_precise(f, p, cfg.precise_dps)
            pts = [z for z, _ in _merge_close(raw, cfg.merge_radius)]
        else:
            F = iterate(f, p)
            found = []
            for z, m in _fixed_points_in_chart(F, 0):
                if abs(z) <= 1.0:
                    found.append((complex(z), m))
            for u, m in _fixed_points_in_chart(F, 1):
                if abs(u) < 1.0:
                    found.append((INF if u == 0 else 1.0 / complex(u), m))
            pts = []
            for z, m in found:
                if m == 1:
                    z = _polish(f, z, p)
                if any(chordal(z, w) < cfg.merge_radius for w in pts):
                    continue
                pts.append(z)
        tol = 1e-6
        candidates = []
        for z in pts:
            least = True
            for q in range(1, p):
                if p % q == 0 and chordal(_iter(f, z, q), z) < tol:
                    least = False
                    break
            if least:
                candidates.append(z)
        # one step of f permutes the candidates; follow nearest images
        succ = []
        for z in candidates:
            w = f(z)
            succ.append(min(range(len(candidates)), key=lambda j: chordal(w, candidates[j])))
        used = [False] * len(candidates)
        for i in range(len(candidates)):
            if used[i]:
                continue
            idx, j = [], i
            while not used[j]:
                used[j] = True
                idx.append(j)
                j = succ[j]
            if len(idx) != p or j != i:
                continue  # not a clean p-cycle under matching; discarded as spurious
            snapped = [candidates[k] for k in idx]
            lam = cycle_multiplier(f, snapped)
            kind, q = classify_cycle(lam, cfg)
            cycles.append(Cycle(tuple(snapped), p, lam, kind, q))
    cycles.sort(key=lambda c: (c.period, _point_key(c.points[0])))
    return cycles


def _point_key(z):
    if z is INF:
        return (1, 0.0, 0.0)
    return (0, round(z.real, 8), round(z.imag, 8))


# ---------------------------------------------------------------------------
# local coordinates near cycles


def _return_map(f, y, p):
    a = chart_of(y)
    u0 = to_chart(y, a)

    def G(u):
        w = _iter(f, from_chart(u0 + u, a), p)
        if w is INF and a == 0 or (w == 0 and a == 1):
            return complex("inf")
        return to_chart(w, a) - u0

    return a, u0, G


def trap_radius(f: RationalMap, cycle: Cycle, k: int = 0, samples: int = 16) -> float:
    """Radius (chart coordinates) of a disk around ``cycle.points[k]`` mapped into itself.

    With ``M`` the sampled maximum of ``|G(u) - lam u| / |u|^2`` on a circle of
    radius ``s`` the disk of radius ``(1 - |lam|) / (2M)`` is contracted by the
    return map; ``s`` shrinks until the estimate is self-consistent.
    """
    lam = cycle.multiplier
    a, u0, G = _return_map(f, cycle.points[k], cycle.period)
    s = 0.1
    r = s
    ang = np.exp(2j * np.pi * (np.arange(samples) + 0.5) / samples)
    for _ in range(60):
        M = 0.0
        for e in ang:
            u = s * e
            g = G(u)
            M = max(M, abs(g - lam * u) / abs(u) ** 2) if cmath.isfinite(g) else math.inf
        r = (1 - abs(lam)) / (2 * max(M, 1e-12))
        if r >= s:
            return s
        s = r
    return r


def in_trap(z, y, radius) -> bool:
    a = chart_of(y)
    try:
        u = to_chart(z, a)
    except InputError:
        return False
    return abs(u - to_chart(y, a)) < radius


def _leading_coefficient(G, k: int, delta: float = 1e-4) -> complex:
    e = np.exp(2j * np.pi * np.arange(8) / 8)
    return complex(np.mean([G(delta * x) / (delta * x) ** k for x in e]))


def koenigs_value(f: RationalMap, cycle: Cycle, w, stop: float = 1e-9, max_steps: int = 100000):
    """Koenigs linearising coordinate of ``w`` at ``cycle.points[0]`` (attracting case)."""
    lam = cycle.multiplier
    a, u0, G = _return_map(f, cycle.points[0], cycle.period)
    u = to_chart(w, a) - u0
    acc = 1 + 0j
    for _ in range(max_steps):
        if abs(u) < stop:
            break
        u = G(u)
        acc *= lam
    return u / acc


def bottcher_level(f: RationalMap, cycle: Cycle, crit: list, w, max_steps: int = 200) -> float:
    """Green-type level ``G(w) = -log|phi(w)|`` at ``cycle.points[0]`` (superattracting case).

    ``phi`` is the Boettcher coordinate normalised by the leading coefficient of
    the return map, so the level converges after a few iterations.
    """
    k = 1
    for y in cycle.points:
        k *= local_degree(crit, y)
    a, u0, G = _return_map(f, cycle.points[0], cycle.period)
    lead = _leading_coefficient(G, k)
    shift = math.log(abs(lead)) / (k - 1)
    u = to_chart(w, a) - u0
    level = None
    for n in range(max_steps):
        if u == 0 or abs(u) < 1e-250:
            break
        level = -(math.log(abs(u)) + shift) / k**n
        if abs(u) < 1e-30:
            break
        u = G(u)
    return level


def siegel_level(f: RationalMap, cycle: Cycle, orb: list, start: int):
    """Birkhoff estimate of the linearising radius of an orbit near a Siegel cycle.

    Returns ``(level, relative change between half and full averages)``.
    """
    p = cycle.period
    lam = cycle.multiplier
    y0 = cycle.points[0]
    a = chart_of(y0)
    u0 = to_chart(y0, a)
    tail = orb[start:]
    best_off, best_d = 0, math.inf
    for off in range(p):
        sub = tail[off::p]
        dist = np.mean([chordal(z, y0) for z in sub[len(sub) // 2:]]) if sub else math.inf
        if dist < best_d:
            best_off, best_d = off, dist
    sub = tail[best_off::p]
    v = []
    for z in sub:
        try:
            v.append(to_chart(z, a) - u0)
        except InputError:
            return None, math.inf
    v = np.array(v)
    N = len(v)
    if N < 16:
        return None, math.inf
    weights = lam ** (-np.arange(N, dtype=float))
    A_full = np.mean(weights * v)
    A_half = np.mean(weights[: N // 2] * v[: N // 2])
    level = abs(A_full)
    if level < 1e-12:
        return None, math.inf
    return level, abs(A_full - A_half) / level


# ---------------------------------------------------------------------------
# critical fates


@dataclass
class _CycleData:
    index: int
    cycle: Cycle
    traps: list  # per point radius or None


def _prepare(f, cycles):
    out = []
    for i, c in enumerate(cycles):
        traps = None
        if c.kind in (Kind.ATTRACTING, Kind.SUPERATTRACTING):
            traps = [trap_radius(f, c, k) for k in range(c.period)]
        out.append(_CycleData(i, c, traps))
    return out


def critical_fate(f: RationalMap, c: CriticalPoint, cycles: list, max_iter: int | None = None,
                  tol: float | None = None, cfg: DynamicsConfig = DynamicsConfig(),
                  crit: list | None = None, _prepared=None) -> CriticalFate:
    """Decide where the orbit of a critical point goes."""
    max_iter = cfg.max_iter if max_iter is None else max_iter
    tol = cfg.orbit_tol if tol is None else tol
    data = _prepared if _prepared is not None else _prepare(f, cycles)
    counters = {cd.index: 0 for cd in data}
    par_hist = {cd.index: [] for cd in data if cd.cycle.kind is Kind.PARABOLIC}
    z = c.location
    orb = [z]
    prev = None
    for n in range(max_iter + 1):
        # exact landing on a cycle
        for cd in data:
            pts = cd.cycle.points
            for k, y in enumerate(pts):
                if chordal(z, y) < tol:
                    if n == 0:
                        return CriticalFate(c, FateKind.PREPERIODIC, cd.index, 0,
                                            margin=math.inf)
                    gap = chordal(prev, pts[(k - 1) % len(pts)])
                    if gap > cfg.land_margin:
                        return CriticalFate(c, FateKind.PREPERIODIC, cd.index, n,
                                            margin=gap / cfg.land_margin)
        # sustained containment in an attracting trap
        for cd in data:
            if cd.traps is not None:
                inside = any(in_trap(z, y, r) for y, r in zip(cd.cycle.points, cd.traps))
                counters[cd.index] = counters[cd.index] + 1 if inside else 0
                if counters[cd.index] >= cfg.trap_confirm:
                    entry = _entry_point(orb, cd)
                    return CriticalFate(c, FateKind.ATTRACTED, cd.index, entry=entry,
                                        margin=math.inf)
        # monotone approach to a parabolic cycle along its return subsequence
        for idx, hist in par_hist.items():
            cyc = data[idx].cycle
            dmin = min(chordal(z, y) for y in cyc.points)
            hist.append(dmin)
            P = cyc.period * (cyc.parabolic_q or 1)
            if (len(hist) > P and dmin < cfg.parabolic_radius and dmin < hist[-1 - P]):
                counters[idx] += 1
            else:
                counters[idx] = 0
            if counters[idx] >= cfg.trap_confirm * P:
                return CriticalFate(c, FateKind.ATTRACTED, idx, margin=math.inf)
        if n == max_iter:
            break
        prev = z
        z = f(z)
        orb.append(z)
    # bounded non-convergent orbit: rotation-domain capture
    crit = crit or []
    start = len(orb) // 10
    for cd in data:
        if cd.cycle.kind is not Kind.SIEGEL:
            continue
        level, drift = siegel_level(f, cd.cycle, orb, start)
        if level is None or drift > cfg.siegel_level_tol:
            continue
        mid = (start + len(orb)) // 2
        near_early = min((chordal(w, cc.location) for w in orb[start:mid] for cc in crit),
                         default=math.inf)
        near = min((chordal(w, cc.location) for w in orb[mid:] for cc in crit), default=math.inf)
        if near < cfg.capture_margin:
            continue
        # an invariant circle keeps a fixed distance from Crit; a boundary orbit keeps closing in
        if near < near_early * (1 - cfg.capture_recurrence):
            continue
        return CriticalFate(c, FateKind.CAPTURED, cd.index, level=level,
                            margin=near / cfg.capture_margin)
    return CriticalFate(c, FateKind.UNRESOLVED)


def _entry_point(orb, cd):
    y0 = cd.cycle.points[0]
    r0 = cd.traps[0]
    for w in orb:
        if in_trap(w, y0, r0):
            return w
    return orb[-1]


# ---------------------------------------------------------------------------
# foliated classes


def _sphere_xyz(zs):
    out = np.empty((len(zs), 3))
    for i, z in enumerate(zs):
        if z is INF:
            out[i] = (0.0, 0.0, 1.0)
        else:
            s = 1.0 + abs(z) ** 2
            out[i] = (2 * z.real / s, 2 * z.imag / s, (abs(z) ** 2 - 1) / s)
    return out


def _orbit_merge(f, c1, c2, window, tol, exclude):
    o1 = [w for w in orbit(f, c1, window) if not exclude(w)]
    o2 = [w for w in orbit(f, c2, window) if not exclude(w)]
    if not o1 or not o2:
        return False
    a, b = _sphere_xyz(o1), _sphere_xyz(o2)
    d = np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(-1))
    return bool(d.min() < tol)


class _UnionFind:
    def __init__(self, items):
        self.parent = {i: i for i in items}

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i, j):
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[max(ri, rj)] = min(ri, rj)


def _integer_power_relation(x1: float, x2: float, k: int, tol: float) -> bool:
    if x1 <= 0 or x2 <= 0:
        return False
    m = math.log(x2 / x1) / math.log(k)
    return abs(m - round(m)) * math.log(k) < tol


def _koenigs_relation(k1: complex, k2: complex, lam: complex, tol: float) -> bool:
    if k1 == 0 or k2 == 0:
        return False
    m0 = round(math.log(abs(k2 / k1)) / math.log(abs(lam)))
    return any(abs(k2 - lam**m * k1) <= tol * abs(k2) for m in (m0 - 1, m0, m0 + 1))


def foliated_classes(fates: list, f: RationalMap, cycles: list, tol: float | None = None,
                     cfg: DynamicsConfig = DynamicsConfig(), crit: list | None = None,
                     _prepared=None) -> list:
    """Partition of the acyclic critical points (indices into ``fates``)."""
    tol = cfg.orbit_tol if tol is None else tol
    if any(fa.fate is FateKind.UNRESOLVED for fa in fates):
        raise ClassificationIndeterminate("foliated classes need every fate resolved")
    crit = crit if crit is not None else [fa.critical_point for fa in fates]
    data = _prepared if _prepared is not None else _prepare(f, cycles)
    acyclic = [i for i, fa in enumerate(fates) if fa.acyclic]
    uf = _UnionFind(acyclic)

    def exclude(w):
        for cd in data:
            cyc = cd.cycle
            if cd.traps is not None and any(in_trap(w, y, r) for y, r in zip(cyc.points, cd.traps)):
                return True
            if cyc.kind is Kind.PARABOLIC and min(chordal(w, y) for y in cyc.points) < 1e-6:
                return True
        return False

    invariants = {}
    for i in acyclic:
        fa = fates[i]
        if fa.fate is FateKind.ATTRACTED and fa.cycle is not None and fa.entry is not None:
            cyc = cycles[fa.cycle]
            if cyc.kind is Kind.SUPERATTRACTING:
                invariants[i] = ("bottcher", bottcher_level(f, cyc, crit, fa.entry))
            elif cyc.kind is Kind.ATTRACTING:
                invariants[i] = ("koenigs", koenigs_value(f, cyc, fa.entry))
        elif fa.level is not None:
            invariants[i] = ("level", fa.level)

    for x, i in enumerate(acyclic):
        for j in acyclic[x + 1:]:
            fi, fj = fates[i], fates[j]
            same = False
            if fi.fate is fj.fate and fi.cycle == fj.cycle and fi.cycle is not None:
                ki, kj = invariants.get(i), invariants.get(j)
                if ki and kj and ki[0] == kj[0]:
                    cyc = cycles[fi.cycle]
                    if ki[0] == "bottcher":
                        k = 1
                        for y in cyc.points:
                            k *= local_degree(crit, y)
                        same = _integer_power_relation(ki[1], kj[1], k, cfg.level_tol)
                    elif ki[0] == "koenigs":
                        same = _koenigs_relation(ki[1], kj[1], cyc.multiplier, cfg.level_tol)
                    else:
                        t = cfg.siegel_level_tol if fi.fate is FateKind.CAPTURED else cfg.level_tol
                        same = abs(ki[1] - kj[1]) <= t * max(abs(ki[1]), abs(kj[1]))
            if not same and fi.critical_point.location is not None:
                same = _orbit_merge(f, fi.critical_point.location, fj.critical_point.location,
                                    cfg.merge_window, tol, exclude)
            if same:
                uf.union(i, j)
    blocks = {}
    for i in acyclic:
        blocks.setdefault(uf.find(i), []).append(i)
    return sorted(blocks.values())


# ---------------------------------------------------------------------------
# portrait


def _apply_cycle_hints(cycles, hints):
    out = []
    for i, c in enumerate(cycles):
        h = hints.get(i)
        if h is not None:
            kind = {"siegel": Kind.SIEGEL, "cremer": Kind.CREMER}[h]
            c = Cycle(c.points, c.period, c.multiplier, kind, c.parabolic_q, annotated=True)
        out.append(c)
    return out


def _override_fate(c, override):
    kind = FateKind(override["fate"])
    return CriticalFate(c, kind, override.get("cycle"), override.get("preperiod"),
                        level=override.get("level"), annotated=True)


def portrait(f: RationalMap, cfg: DynamicsConfig = DynamicsConfig(),
             annotations: Annotations | None = None) -> DynamicalPortrait:
    """Assemble cycles, critical fates, foliated classes and the four counters."""
    ann = annotations or Annotations()
    if f.degree < 2:
        raise InputError("dynamical portrait needs degree >= 2")
    crit = critical_points(f)
    cycles = find_cycles(f, cfg.max_period, cfg)
    for i in ann.cycle_hints:
        if not 0 <= i < len(cycles):
            raise InputError(f"cycle hint refers to unknown cycle {i}")
    for i in ann.fate_overrides:
        if not 0 <= i < len(crit):
            raise InputError(f"fate override refers to unknown critical point {i}")
    cycles = _apply_cycle_hints(cycles, ann.cycle_hints)
    unclassified = [i for i, c in enumerate(cycles) if c.kind is Kind.UNCLASSIFIED]
    if unclassified:
        raise ClassificationIndeterminate(
            f"irrationally indifferent cycles {unclassified} need a siegel/cremer cycle hint",
        )
    data = _prepare(f, cycles)
    fates = []
    for i, c in enumerate(crit):
        if i in ann.fate_overrides:
            fates.append(_override_fate(c, ann.fate_overrides[i]))
        else:
            fates.append(critical_fate(f, c, cycles, cfg=cfg, crit=crit, _prepared=data))
    unresolved = [i for i, fa in enumerate(fates) if fa.fate is FateKind.UNRESOLVED]
    if unresolved:
        raise ClassificationIndeterminate(
            f"critical points {unresolved} have unresolved fates; supply fate_overrides"
        )
    classes = foliated_classes(fates, f, cycles, cfg=cfg, crit=crit, _prepared=data)
    n_f = sum(1 for b in classes if fates[b[0]].in_fatou)
    n_p = sum(1 for c in cycles if c.kind is Kind.PARABOLIC)

    warnings = []
    for i, fa in enumerate(fates):
        if fa.margin < 10:
            warnings.append(f"fragile classification of critical point {i} (margin {fa.margin:.3g})")
    for i, c in enumerate(cycles):
        if c.kind in (Kind.ATTRACTING, Kind.PARABOLIC):
            if not any(fa.cycle == i and fa.fate in (FateKind.ATTRACTED, FateKind.PREPERIODIC)
                       for fa in fates):
                warnings.append(f"{c.kind.value} cycle {i} captures no critical point; a fate was missed")
        if c.kind is Kind.CREMER:
            warnings.append(f"cycle {i} annotated as Cremer; it contributes nothing to the dimension")
    used = {
        "n_H": ann.n_H,
        "n_J": ann.n_J,
        "n_H_default": not ann.n_H,
        "n_J_default": not ann.n_J,
        "fate_overrides": sorted(ann.fate_overrides),
        "cycle_hints": {str(k): v for k, v in sorted(ann.cycle_hints.items())},
    }
    return DynamicalPortrait(f, crit, cycles, fates, classes, n_f, ann.n_H, ann.n_J, n_p,
                             used, warnings)
