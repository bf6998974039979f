import numpy as np
import pytest

from qcteich.errors import InputError, PreconditionError
from qcteich.qc import (GridField, ModelDomain, annulus_triviality_form, cauchy_pompeiu_check,
                        named_profile, radial_roundtrip_error, residue_check, rotation_average,
                        rotation_fourier_check, stokes_check, theorem_a_check)
from qcteich.qc.checks import (RadialProfile, random_band_limited, random_smooth_field,
                               random_vanishing_field)


@pytest.mark.parametrize("dom", [ModelDomain.disk(256, 256), ModelDomain.annulus(0.3, 256, 256)])
def test_theorem_a(dom, rng):
    for _ in range(3):
        rep = theorem_a_check(dom, random_vanishing_field(dom, rng))
        assert rep.passed and rep.ratio < 1


def test_theorem_a_needs_vanishing_boundary():
    d = ModelDomain.disk(64, 64)
    with pytest.raises(PreconditionError):
        theorem_a_check(d, GridField.sample(d, lambda z: 1 + 0 * z, -1, 0))


def test_theorem_a_rejects_sphere():
    d = ModelDomain.sphere(16, 16)
    with pytest.raises(InputError):
        theorem_a_check(d, GridField.zeros(d, -1, 0))


@pytest.mark.parametrize("dom", [ModelDomain.disk(256, 256), ModelDomain.annulus(0.3, 256, 256)])
def test_stokes(dom, rng):
    for _ in range(3):
        q = random_smooth_field(dom, rng, 2)
        xi = random_smooth_field(dom, rng, -1)
        assert stokes_check(dom, q, xi).passed


def test_stokes_sign():
    # q = 1, xi = zbar on the disk: int dbar xi dz^dzbar = -2 pi i and oint zbar dz = 2 pi i
    d = ModelDomain.disk(64, 64)
    rep = stokes_check(d, GridField.sample(d, lambda z: 1 + 0 * z, 2, 0), GridField.sample(d, np.conj, -1, 0))
    assert rep.lhs == pytest.approx(-2j * np.pi, rel=1e-10)
    assert rep.terms["boundary"] == pytest.approx([0, 2 * np.pi], rel=1e-10)


def test_cauchy_pompeiu_exact_for_zbar_plus_one():
    d = ModelDomain.disk(128, 128)
    rep = cauchy_pompeiu_check(GridField.sample(d, lambda z: np.conj(z) + 1, -1, 0))
    assert rep.passed and rep.defect < 1e-12


@pytest.mark.parametrize("seed", [None, 1, 2])
def test_cauchy_pompeiu_second_order(seed):
    # |z|^3 is not smooth at the origin; the random fields are, but are not reproduced exactly
    defects = []
    for n in (64, 128, 256):
        d = ModelDomain.disk(n, n)
        xi = (GridField.sample(d, lambda z: np.abs(z) ** 3 + 0j, -1, 0) if seed is None
              else random_smooth_field(d, np.random.default_rng(seed), -1))
        defects.append(cauchy_pompeiu_check(xi).defect)
    assert 3 < defects[0] / defects[1] < 5 and 3 < defects[1] / defects[2] < 5


@pytest.mark.parametrize("dom", [ModelDomain.disk(256, 256), ModelDomain.annulus(0.3, 256, 256)])
def test_residue_formula(dom, rng):
    xi = random_smooth_field(dom, rng, -1)
    poles = [(0.55 * np.exp(1j), 1.0 - 0.5j), (0.45 * np.exp(-2j), 0.3j)]
    assert residue_check(dom, lambda z: 2 * z, poles, xi).passed


def test_residue_pole_near_boundary_rejected(rng):
    d = ModelDomain.disk(64, 64)
    with pytest.raises(InputError):
        residue_check(d, lambda z: z, [(0.999, 1.0)], random_smooth_field(d, rng, -1))


def test_annulus_form_values():
    assert annulus_triviality_form(named_profile("linear", 0.5)) == pytest.approx(-0.5, abs=1e-12)
    assert annulus_triviality_form(named_profile("zero", 0.5)) == 0
    assert annulus_triviality_form(named_profile("constant", 0.5)) == pytest.approx(np.log(0.5))


def test_annulus_form_rejects_bad_radius():
    with pytest.raises(InputError):
        annulus_triviality_form(named_profile("linear", 0.5), r0=1.5)


def test_unknown_profile():
    with pytest.raises(InputError):
        named_profile("cubic", 0.5)


def test_radial_roundtrip():
    assert radial_roundtrip_error(named_profile("quadratic", 0.3), ModelDomain.annulus(0.3, 512, 256)) < 1e-3
    assert radial_roundtrip_error(RadialProfile(0.0, lambda r: r), ModelDomain.disk(512, 256)) < 1e-3


def test_rotation_average_is_invariant(rng):
    d = ModelDomain.annulus(0.3, 32, 128)
    avg = rotation_average(random_band_limited(d, rng), 64)
    rep = rotation_fourier_check(avg, "rotation", alpha=1 / 64)
    assert rep.passed and rep.max_mode_ratio < 1e-10


def test_rotation_check_needs_invariance(rng):
    d = ModelDomain.annulus(0.3, 32, 128)
    with pytest.raises(PreconditionError):
        rotation_fourier_check(random_band_limited(d, rng), "rotation", alpha=1 / 64)


def test_power_symmetry():
    d = ModelDomain.disk(128, 128)
    mu = GridField.sample(d, lambda z: 0.5 * z / np.conj(z), -1, 1)
    rep = rotation_fourier_check(mu, "power", k=2, sym_tol=1e-6)
    assert rep.passed
