"""Dense complex polynomials and a simultaneous-iteration root finder.

Coefficients are stored in ascending order, ``p(z) = sum(c[k] * z**k)``.
The zero polynomial has an empty coefficient array.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import CoefficientOverflowError, InputError, RootFindingError

EPS = np.finfo(float).eps

#: coefficients beyond this magnitude are treated as an overflow
COEFF_MAX = 1e150


def _as_coeffs(coeffs) -> np.ndarray:
    c = np.atleast_1d(np.asarray(coeffs, dtype=complex)).copy()
    if c.ndim != 1:
        raise InputError("polynomial coefficients must be a flat sequence")
    if not np.all(np.isfinite(c)):
        raise CoefficientOverflowError("non-finite polynomial coefficient")
    nz = np.flatnonzero(c)
    c = c[: nz[-1] + 1] if nz.size else c[:0]
    c.setflags(write=False)
    return c


class Polynomial:
    """Immutable polynomial with complex coefficients in ascending order."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        object.__setattr__(self, "coeffs", _as_coeffs(coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def monomial(cls, k: int, c: complex = 1.0) -> "Polynomial":
        a = np.zeros(k + 1, dtype=complex)
        a[k] = c
        return cls(a)

    @classmethod
    def from_roots(cls, roots, lead: complex = 1.0) -> "Polynomial":
        p = cls([lead])
        for r in roots:
            p = p * cls([-r, 1.0])
        return p

    # -- basic structure -------------------------------------------------
    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    @property
    def lead(self) -> complex:
        return complex(self.coeffs[-1]) if len(self.coeffs) else 0j

    def scale(self) -> float:
        """Largest coefficient modulus (the coefficient magnitude scale)."""
        return float(np.max(np.abs(self.coeffs))) if len(self.coeffs) else 0.0

    def trimmed(self, rel_tol: float) -> "Polynomial":
        """Drop leading coefficients below ``rel_tol`` times the scale."""
        c = self.coeffs
        s = self.scale()
        n = len(c)
        while n and abs(c[n - 1]) <= rel_tol * s:
            n -= 1
        return Polynomial(c[:n])

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        return Polynomial(self.coeffs / self.coeffs[-1])

    def padded(self, n: int) -> np.ndarray:
        out = np.zeros(n, dtype=complex)
        out[: len(self.coeffs)] = self.coeffs
        return out

    def reversed(self, n: int | None = None) -> "Polynomial":
        """``z**n * p(1/z)``; ``n`` defaults to the degree."""
        n = self.degree if n is None else n
        if n < self.degree:
            raise InputError("reversal length below degree")
        return Polynomial(self.padded(n + 1)[::-1])

    def low_order(self) -> int:
        """Order of vanishing at 0 (number of exactly zero low coefficients)."""
        nz = np.flatnonzero(self.coeffs)
        return int(nz[0]) if nz.size else -1

    # -- evaluation ------------------------------------------------------
    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for c in self.coeffs[::-1]:
            out = out * z + c
        return out if out.ndim else complex(out)

    def magnitude(self, z):
        """``sum |c_k| |z|**k``, the natural scale for the residual ``|p(z)|``."""
        z = np.abs(np.asarray(z, dtype=complex))
        out = np.zeros_like(z, dtype=float)
        for c in np.abs(self.coeffs[::-1]):
            out = out * z + c
        return out if out.ndim else float(out)

    # -- arithmetic ------------------------------------------------------
    def _check(self) -> "Polynomial":
        if len(self.coeffs) and self.scale() > COEFF_MAX:
            raise CoefficientOverflowError(
                f"coefficient magnitude {self.scale():.3g} exceeds {COEFF_MAX:.1g}"
            )
        return self

    def __add__(self, other):
        other = _coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(self.padded(n) + other.padded(n))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-self.coeffs)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        if np.isscalar(other):
            return Polynomial(self.coeffs * other)._check()
        other = _coerce(other)
        if self.is_zero() or other.is_zero():
            return Polynomial()
        return Polynomial(np.convolve(self.coeffs, other.coeffs))._check()

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Polynomial([1.0])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def allclose(self, other, rtol: float = 1e-10) -> bool:
        other = _coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a, b = self.padded(n), other.padded(n)
        s = max(self.scale(), other.scale(), 1e-300)
        return bool(np.max(np.abs(a - b), initial=0.0) <= rtol * s)

    def deriv(self) -> "Polynomial":
        if self.degree < 1:
            return Polynomial()
        return Polynomial(self.coeffs[1:] * np.arange(1, len(self.coeffs)))

    def compose(self, inner: "Polynomial") -> "Polynomial":
        """``self(inner(z))`` by Horner's scheme."""
        out = Polynomial()
        for c in self.coeffs[::-1]:
            out = out * inner + c
        return out._check()

    def divmod(self, other: "Polynomial"):
        """Long division ``self = q * other + r`` with ``deg r < deg other``."""
        other = _coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        n, m = self.degree, other.degree
        if n < m:
            return Polynomial(), self
        r = self.coeffs.astype(complex).copy()
        q = np.zeros(n - m + 1, dtype=complex)
        lead = other.coeffs[-1]
        b = other.coeffs
        for k in range(n - m, -1, -1):
            qk = r[k + m] / lead
            q[k] = qk
            r[k : k + m + 1] -= qk * b
            r[k + m] = 0.0
        return Polynomial(q), Polynomial(r[:m])

    def taylor(self, c: complex, order: int | None = None) -> np.ndarray:
        """Coefficients of ``p(c + u)`` in ``u`` (ascending), up to ``order``."""
        a = self.coeffs.astype(complex).copy()
        n = len(a)
        out = np.zeros(n, dtype=complex)
        for k in range(n):
            # one synthetic division by (z - c): remainder is the k-th Taylor coefficient
            acc = 0j
            for i in range(n - 1 - k, -1, -1):
                acc = acc * c + a[i]
                a[i] = acc
            out[k] = a[0]
            a = a[1:]
            if order is not None and k >= order:
                break
        if order is not None:
            return out[: order + 1] if n else np.zeros(order + 1, complex)
        return out

    def taylor_scale(self, c: complex, order: int) -> np.ndarray:
        """Magnitude scale ``sum_i |a_i| binom(i, j) |c|**(i-j)`` per Taylor order j."""
        a = np.abs(self.coeffs)
        rc = abs(c)
        out = np.zeros(order + 1)
        for j in range(order + 1):
            s = 0.0
            for i in range(j, len(a)):
                s += a[i] * math.comb(i, j) * rc ** (i - j)
            out[j] = s
        return out

    def deflate(self, r: complex, k: int = 1) -> "Polynomial":
        """Divide by ``(z - r)**k`` discarding the remainders."""
        a = self.coeffs
        for _ in range(k):
            if len(a) <= 1:
                return Polynomial()
            q = np.zeros(len(a) - 1, dtype=complex)
            acc = 0j
            for i in range(len(a) - 1, 0, -1):
                acc = acc * r + a[i]
                q[i - 1] = acc
            a = q
        return Polynomial(a)

    def __repr__(self):
        return f"Polynomial({np.array2string(self.coeffs, precision=6)})"


def _coerce(x) -> Polynomial:
    if isinstance(x, Polynomial):
        return x
    if np.isscalar(x):
        return Polynomial([x])
    return Polynomial(x)


# ---------------------------------------------------------------------------
# root finding


def _initial_points(a: np.ndarray) -> np.ndarray:
    n = len(a) - 1
    radius = abs(a[0] / a[-1]) ** (1.0 / n)
    k = np.arange(n)
    return radius * np.exp(1j * (2 * np.pi * k / n + 0.4))


def aberth(a: np.ndarray, max_iter: int = 500) -> np.ndarray:
    """All roots of the polynomial with ascending coefficients ``a`` (``a[0] != 0``).

    Ehrlich-Aberth iteration with a deterministic start on a circle.
    """
    n = len(a) - 1
    if n == 1:
        return np.array([-a[0] / a[1]])
    a = a / a[-1]
    z = _initial_points(a)
    da = a[1:] * np.arange(1, n + 1)
    absa = np.abs(a)
    done = np.zeros(n, dtype=bool)
    for _ in range(max_iter):
        p = np.polyval(a[::-1], z)
        dp = np.polyval(da[::-1], z)
        mag = np.polyval(absa[::-1], np.abs(z))
        done = np.abs(p) <= 8 * n * EPS * mag
        if done.all():
            return z
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            s = inv.sum(axis=1)
            w = p / dp
            corr = w / (1.0 - w * s)
        bad = ~np.isfinite(corr)
        if bad.any():
            corr[bad] = 1e-3 * (1 + np.abs(z[bad])) * np.exp(0.7j)
        corr[done] = 0.0
        z = z - corr
    raise RootFindingError(
        f"Aberth iteration did not converge in {max_iter} steps "
        f"(degree {n}, {int((~done).sum())} roots unconverged)"
    )


def _taylor_certifies(p: Polynomial, c: complex, m: int, tol: float) -> bool:
    t = np.abs(p.taylor(c, m - 1))
    s = p.taylor_scale(c, m - 1)
    return bool(np.all(t <= tol * np.maximum(s, 1e-300)))


def cluster_roots(p: Polynomial, z: np.ndarray, radius: float = 1e-8,
                  wide_radius: float = 1e-4, cert_tol: float = 1e-9):
    """Group approximate roots into ``(center, multiplicity)`` pairs.

    Roots closer than ``radius * max(1, |z|)`` merge unconditionally.  Pairs of
    clusters closer than ``wide_radius * max(1, |z|)`` merge only when the low
    order Taylor coefficients of ``p`` at the merged centroid vanish to
    ``cert_tol`` relative accuracy, i.e. when ``p`` numerically has a root of
    the merged multiplicity there.
    """
    clusters = [[complex(v), 1] for v in z]

    def merge(i, j):
        ci, mi = clusters[i]
        cj, mj = clusters[j]
        return (ci * mi + cj * mj) / (mi + mj), mi + mj

    while True:
        candidates = []
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                d = abs(clusters[i][0] - clusters[j][0])
                s = max(1.0, abs(clusters[i][0]))
                if d <= radius * s:
                    candidates.append((0, d, i, j))
                elif d <= wide_radius * s:
                    candidates.append((1, d, i, j))
        candidates.sort()
        for tier, _, i, j in candidates:
            c, m = merge(i, j)
            if tier == 0 or _taylor_certifies(p, c, m, cert_tol):
                clusters[i] = [c, m]
                del clusters[j]
                break
        else:
            break
    clusters.sort(key=lambda cm: (round(cm[0].real, 9), round(cm[0].imag, 9)))
    return [(c, m) for c, m in clusters]


def roots(p: Polynomial, radius: float = 1e-8, max_iter: int = 500,
          precise: bool = False, dps: int = 50):
    """Roots of ``p`` with multiplicities, as a list of ``(root, multiplicity)``.

    Exact zero low-order coefficients give an exact root at 0.  ``precise``
    switches to ``mpmath.polyroots`` at ``dps`` digits for ill-conditioned input.
    """
    if p.is_zero():
        raise InputError("roots of the zero polynomial are undefined")
    k0 = p.low_order()
    q = Polynomial(p.coeffs[k0:])
    out = []
    if q.degree >= 1:
        if precise:
            import mpmath

            with mpmath.workdps(dps):
                rs = mpmath.polyroots([mpmath.mpc(c) for c in q.coeffs[::-1]],
                                      maxsteps=200, extraprec=4 * dps)
            z = np.array([complex(r) for r in rs])
        else:
            z = aberth(q.coeffs, max_iter=max_iter)
        out = cluster_roots(q, z, radius=radius)
    if k0 > 0:
        out = [(0j, k0)] + out
    return out


def batch_roots(coeffs: np.ndarray) -> np.ndarray:
    """Roots of many polynomials of equal degree at once.

    ``coeffs`` has shape ``(N, n+1)`` ascending with nonzero leading column;
    returns ``(N, n)`` roots via batched companion eigenvalues.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    N, n1 = coeffs.shape
    n = n1 - 1
    if n == 1:
        return (-coeffs[:, 0] / coeffs[:, 1])[:, None]
    if n == 2:
        a, b, c = coeffs[:, 2], coeffs[:, 1], coeffs[:, 0]
        disc = np.sqrt(b * b - 4 * a * c)
        sgn = np.where((np.conj(b) * disc).real >= 0, 1.0, -1.0)
        q = -0.5 * (b + sgn * disc)
        with np.errstate(divide="ignore", invalid="ignore"):
            r1 = q / a
            r2 = np.where(q != 0, c / q, 0.0)
        return np.stack([r1, r2], axis=1)
    comp = np.zeros((N, n, n), dtype=complex)
    comp[:, 1:, :-1] = np.eye(n - 1)
    comp[:, :, -1] = -coeffs[:, :n] / coeffs[:, n : n + 1]
    return np.linalg.eigvals(comp)
