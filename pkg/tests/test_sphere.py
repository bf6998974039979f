import pickle

import numpy as np
import pytest

from qcteich.errors import InputError
from qcteich.sphere import (INF, MoebiusTransform, RationalFunction, RationalMap, chordal, compose,
                            conjugate, derivative, from_chart, iterate, to_chart)


def test_infinity_is_singleton():
    assert pickle.loads(pickle.dumps(INF)) is INF
    assert repr(INF) == "INF"


def test_chordal_distance():
    assert chordal(0, INF) == pytest.approx(2.0)
    assert chordal(1, -1) == pytest.approx(2.0)
    assert chordal(INF, INF) == 0.0
    assert chordal(1j, 1j) == 0.0


def test_chart_round_trip():
    for z, c in ((0.3 + 0.2j, 0), (0.3 + 0.2j, 1), (5 - 7j, 1), (INF, 1), (0j, 0)):
        w = from_chart(to_chart(z, c), c)
        assert w is z if z is INF else abs(w - z) < 1e-12


def test_map_at_infinity():
    f = RationalMap.polynomial([0, 0, 1])
    assert f(INF) is INF
    g = RationalMap([1], [0, 1])
    assert g(0) is INF
    assert g(INF) == 0
    h = RationalMap([1, 2], [3, 4])
    assert h(INF) == pytest.approx(0.5)


def test_common_factor_rejected():
    with pytest.raises(InputError):
        RationalMap([-1, 0, 1], [-1, 1])


def test_compose_and_iterate():
    f = RationalMap.polynomial([0.1, 0, 1])
    g = RationalMap([1, 1], [0, 2])
    fg = compose(f, g)
    z = 0.4 - 0.3j
    assert fg(z) == pytest.approx(f(g(z)))
    f3 = iterate(f, 3)
    assert f3.degree == 8
    assert f3(z) == pytest.approx(f(f(f(z))))


def test_derivative_closed_form():
    f = RationalMap([1, 0, 1], [0, 1])  # z + 1/z
    d = derivative(f)
    z = 1.3 + 0.4j
    assert d(z) == pytest.approx(1 - 1 / z**2)


def test_moebius_group_laws(rng):
    M = MoebiusTransform.random(rng)
    N = MoebiusTransform.random(rng)
    z = 0.2 + 0.9j
    assert (M @ N)(z) == pytest.approx(M(N(z)))
    assert M.inverse()(M(z)) == pytest.approx(z)
    assert MoebiusTransform.identity()(INF) is INF


def test_conjugate_preserves_multipliers(rng):
    f = RationalMap.polynomial([0.1, 0, 1])
    M = MoebiusTransform.random(rng)
    g = conjugate(M, f)
    a = (1 - np.sqrt(0.6)) / 2
    b = M(a)
    assert abs(g(b) - b) < 1e-9
    lam = derivative(g)(b)
    assert lam == pytest.approx(2 * a, abs=1e-8)


def test_rational_function_algebra():
    p = RationalFunction([1], [0, 1])
    q = RationalFunction([0, 1])
    assert (p * q).reduced().allclose(RationalFunction([1]))
    z = 0.7j
    assert (p + q)(z) == pytest.approx(1 / z + z)
    assert (p / q)(z) == pytest.approx(1 / z**2)
