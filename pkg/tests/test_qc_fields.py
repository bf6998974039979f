import math

import numpy as np
import pytest

from qcteich.errors import InputError
from qcteich.qc import GridField, ModelDomain, dbar_numeric, pair, sup_hyperbolic_norm
from qcteich.qc.fields import boundary_integral, integrate_11


def test_shape_and_type_validation():
    d = ModelDomain.disk(16, 16)
    with pytest.raises(InputError):
        GridField(d, 3, 0, np.zeros((1, 16, 16)))
    with pytest.raises(InputError):
        GridField(d, -1, 0, np.zeros((1, 8, 16)))


def test_dbar_of_holomorphic_is_small():
    d = ModelDomain.disk(128, 128)
    xi = GridField.sample(d, lambda z: z**3 + 2 * z, -1, 0)
    assert dbar_numeric(xi).sup() < 1e-3


def test_dbar_of_zbar_is_one():
    d = ModelDomain.disk(64, 64)
    assert np.allclose(dbar_numeric(GridField.sample(d, np.conj, -1, 0)).samples, 1.0, atol=1e-10)
    # differences in log r are second order, not exact
    a = ModelDomain.annulus(0.3, 64, 64)
    assert np.allclose(dbar_numeric(GridField.sample(a, np.conj, -1, 0)).samples, 1.0, atol=1e-3)


def test_dbar_radial_example():
    # xi = r h(r) e^{it} with h = r^2 gives dbar xi = (r h'/2) e^{2it} = r^2 e^{2it}
    d = ModelDomain.disk(256, 128)
    xi = GridField.sample(d, lambda z: z * np.abs(z) ** 2, -1, 0)
    r, t, _ = d.mesh()
    err = np.abs(dbar_numeric(xi).samples[0] - r**2 * np.exp(2j * t)).max()
    assert err < 1e-3


def test_dbar_second_order(rng):
    errs = []
    for n in (64, 128, 256):
        d = ModelDomain.disk(n, n)
        xi = GridField.sample(d, lambda z: np.conj(z) ** 2 * z, -1, 0)
        r, t, z = d.mesh()
        errs.append(np.abs(dbar_numeric(xi).samples[0] - 2 * np.conj(z) * z).max())
    assert errs[0] / errs[1] > 3 and errs[1] / errs[2] > 3


def test_integrate_area_form():
    d = ModelDomain.disk(32, 32)
    # int dz ^ dzbar = -2i * area
    assert integrate_11(d, np.ones((1, 32, 32))) == pytest.approx(-2j * math.pi)


def test_boundary_integral_of_one_over_z():
    d = ModelDomain.annulus(0.4, 16, 64)
    # outer circle minus inner circle, each 2 pi i
    assert boundary_integral(d, lambda r: 1 / (r * np.exp(1j * d.angles))) == pytest.approx(0, abs=1e-12)
    disk = ModelDomain.disk(16, 64)
    val = boundary_integral(disk, lambda r: 1 / (r * np.exp(1j * disk.angles)))
    assert val == pytest.approx(2j * math.pi)


def test_pair_type_checks():
    d = ModelDomain.disk(16, 16)
    q = GridField.sample(d, lambda z: z, 2, 0)
    mu = GridField.sample(d, lambda z: 0.1 * z, -1, 1)
    pair(q, mu)
    with pytest.raises(InputError):
        pair(q, q)


def test_sphere_overlap_consistency():
    d = ModelDomain.sphere(64, 64)
    q = GridField.sample(d, lambda z: 1 / (z - 0.5) / (z + 3) ** 3, 2, 0)
    assert q.overlap_defect() < 1e-3


def test_hyperbolic_sup_reports_spacing():
    d = ModelDomain.disk(64, 64)
    xi = GridField.sample(d, lambda z: 1 - np.abs(z) ** 2, -1, 0)
    est = sup_hyperbolic_norm(d, xi)
    assert est.value == pytest.approx(2.0, rel=1e-12)
    assert est.spacing == d.spacing


def test_beltrami_form():
    d = ModelDomain.disk(16, 16)
    assert GridField.sample(d, lambda z: 0.5 * z, -1, 1).is_beltrami_form
    assert not GridField.sample(d, lambda z: 2 + 0 * z, -1, 1).is_beltrami_form
