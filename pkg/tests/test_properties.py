import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from qcteich.deformation import RationalVectorField, delta_f
from qcteich.qc import annulus_triviality_form
from qcteich.qc.checks import RadialProfile
from qcteich.sphere import (INF, MoebiusTransform, RationalMap, chart_of, chordal, conjugate, from_chart,
                            to_chart)

small = st.floats(-2, 2, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, small, small)
coeffs3 = st.lists(cplx, min_size=3, max_size=3)


def _moebius(a, b, c, d):
    return MoebiusTransform(a, b, c, d) if abs(a * d - b * c) > 0.1 else None


@settings(max_examples=40, deadline=None)
@given(cplx, cplx, cplx, cplx, cplx)
def test_conjugation_round_trip(a, b, c, d, z):
    M = _moebius(1 + a, b, c, 1 + d)
    if M is None:
        return
    f = RationalMap.polynomial([0.3 - 0.1j, 0, 1])
    g = conjugate(M, f)
    back = conjugate(M.inverse(), g)
    w = back(z)
    ref = f(z)
    assert chordal(w, ref) < 1e-6


@settings(max_examples=60, deadline=None)
@given(cplx)
def test_chart_consistency(z):
    c = chart_of(z)
    assert abs(from_chart(to_chart(z, c), c) - z) <= 1e-12 * max(1, abs(z))
    assert abs(to_chart(z, c)) <= 1
    assert from_chart(0j, 1) is INF


@settings(max_examples=30, deadline=None)
@given(coeffs3, coeffs3, cplx)
def test_delta_is_linear(a, b, s):
    f = RationalMap.polynomial([0.1, 0, 1])
    xa, xb = RationalVectorField.poly(a), RationalVectorField.poly(b)
    lhs = delta_f(f, xa + xb * s)
    rhs = delta_f(f, xa) + delta_f(f, xb) * s
    for z in (0.3 + 0.2j, -1.1 + 0.5j):
        assert abs(lhs(z) - rhs(z)) <= 1e-9 * max(1, abs(rhs(z)))


@settings(max_examples=30, deadline=None)
@given(cplx, cplx, st.floats(0.1, 0.9))
def test_annulus_form_is_linear(a, b, r0):
    p1 = RadialProfile(r0, lambda r: r * r)
    p2 = RadialProfile(r0, np.sin)
    comb = RadialProfile(r0, lambda r: a * p1(r) + b * p2(r))
    lhs = annulus_triviality_form(comb)
    rhs = a * annulus_triviality_form(p1) + b * annulus_triviality_form(p2)
    assert abs(lhs - rhs) <= 1e-12 * max(1, abs(a) + abs(b))
