import cmath
import math

import numpy as np
import pytest

from qcteich.dynamics import (Annotations, DynamicsConfig, FateKind, Kind, brjuno_partial, classify_cycle,
                              critical_points, cycle_multiplier, find_cycles, portrait)
from qcteich.deformation import teich_dim
from qcteich.errors import ClassificationIndeterminate, DegreeCapError
from qcteich.sphere import INF, RationalMap

GOLDEN = (math.sqrt(5) - 1) / 2


def poly(*c):
    return RationalMap.polynomial(list(c))


def test_critical_points_polynomial():
    crit = critical_points(poly(0, 0, 0, 1))
    locs = {("inf" if c.location is INF else complex(c.location)): c.multiplicity for c in crit}
    assert locs == {0j: 2, "inf": 2}


def test_critical_points_count_rational():
    f = RationalMap([1, 0, 0, 1], [0, 0, 3])  # (z^3 + 1) / 3z^2
    assert sum(c.multiplicity for c in critical_points(f)) == 2 * f.degree - 2


def test_classify_cycle():
    assert classify_cycle(0.5)[0] is Kind.ATTRACTING
    assert classify_cycle(0)[0] is Kind.SUPERATTRACTING
    assert classify_cycle(1.5j)[0] is Kind.REPELLING
    k, q = classify_cycle(cmath.exp(2j * math.pi / 3))
    assert k is Kind.PARABOLIC and q == 3
    assert classify_cycle(cmath.exp(2j * math.pi * GOLDEN))[0] is Kind.SIEGEL


def test_brjuno_sum_golden_bounded():
    total, tail, depth = brjuno_partial(GOLDEN, 30, 1e7)
    assert total < 12 and tail < 1e-3


def test_attracting_fixed_point_oracle():
    # fixed points of z^2 + c are (1 +- sqrt(1 - 4c)) / 2 with multiplier 2z
    c = 0.1
    alpha = (1 - math.sqrt(1 - 4 * c)) / 2
    cycles = find_cycles(poly(c, 0, 1), max_period=2)
    att = [cy for cy in cycles if cy.kind is Kind.ATTRACTING]
    assert len(att) == 1
    assert abs(att[0].points[0] - alpha) < 1e-10
    assert abs(att[0].multiplier - 2 * alpha) < 1e-10


def test_period_two_superattracting_basilica():
    cycles = find_cycles(poly(-1, 0, 1), max_period=2)
    two = [cy for cy in cycles if cy.period == 2 and cy.kind is Kind.SUPERATTRACTING]
    assert len(two) == 1
    assert {round(abs(z)) for z in two[0].points} == {0, 1}


def test_cycle_count_by_period():
    # a degree-d map has d + 1 fixed points and (d^2 + 1) - (d + 1) = 2 points of exact period 2
    cycles = find_cycles(poly(0.3j, 0, 1), max_period=2)
    assert sum(1 for c in cycles if c.period == 1) == 3
    assert sum(1 for c in cycles if c.period == 2) == 1


def test_multiplier_of_cycle():
    f = poly(-1, 0, 1)
    assert abs(cycle_multiplier(f, [0, -1])) < 1e-14


@pytest.mark.parametrize("c,dim,n_f,n_p", [
    (0.0, 0, 0, 0), (-1.0, 0, 0, 0), (0.1, 1, 1, 0), (0.25, 0, 1, 1), (-0.75, 0, 1, 1),
])
def test_quadratic_portraits(c, dim, n_f, n_p):
    p = portrait(poly(c, 0, 1))
    assert (teich_dim(p), p.n_f, p.n_p) == (dim, n_f, n_p)


def test_fates_of_z2_plus_01():
    p = portrait(poly(0.1, 0, 1))
    fates = {("inf" if f.critical_point.location is INF else 0): f for f in p.fates}
    assert fates[0].fate is FateKind.ATTRACTED
    assert fates["inf"].fate is FateKind.PREPERIODIC


def test_cubic_two_free_critical_points():
    # both finite critical points +-a of z^3 - 3a^2 z + b are attracted, in different grand orbits
    f = poly(0.05, -0.03, 0, 1)
    p = portrait(f)
    assert p.n_f + p.n_H + p.n_J - p.n_p == teich_dim(p) <= 4


def test_siegel_requires_annotation():
    lam = cmath.exp(2j * math.pi * GOLDEN)
    f = poly(0, lam, 1)
    with pytest.raises(ClassificationIndeterminate):
        portrait(f, DynamicsConfig(max_iter=2000))
    ann = Annotations(fate_overrides={0: {"fate": "julia"}})
    p = portrait(f, DynamicsConfig(max_iter=2000), ann)
    assert p.n_J == 0 and teich_dim(p) >= 0


def test_degree_cap():
    with pytest.raises(DegreeCapError):
        find_cycles(poly(0.1, 0, 0, 0, 1), max_period=7, cfg=DynamicsConfig(degree_cap=1000))


def test_portrait_dict_is_serialisable():
    import json

    json.dumps(portrait(poly(0.1, 0, 1)).to_dict())
