import json
import math

import numpy as np
import pytest

from resonancelab.errors import FitError, TruncationError, ValidationError
from resonancelab.paths import truncation_radius
from resonancelab.potential import (Gaussian, GaussianSum, SquareWell, SuperGaussian, Tabulated,
                                    evaluate, fit_growth, fourier_derivatives, fourier_transform,
                                    fourier_values, hypothesis_check, load_spec,
                                    max_modulus_profile, save_spec, spec_from_dict, sqrt_split)

SQRT_PI = math.sqrt(math.pi)


def test_gaussian_values(gauss):
    assert evaluate(gauss, 0.0) == 1.0
    assert evaluate(gauss, 1.0) == pytest.approx(0.3678794, abs=1e-7)


def test_square_well_inside(well):
    assert evaluate(well, 0.5) == -2.0
    assert evaluate(well, 1.5) == 0.0


@pytest.mark.parametrize("v, expected", [(-4.0, (-2.0, 2.0)), (0.0, (0.0, 0.0)), (9.0, (3.0, 3.0))])
def test_sqrt_split_values(v, expected):
    assert sqrt_split(v) == expected


def test_sqrt_split_factorises(two_gauss):
    x = np.linspace(-6, 6, 301)
    s, a = sqrt_split(two_gauss, x)
    np.testing.assert_allclose(s * a, two_gauss.value(x), atol=1e-15)
    np.testing.assert_allclose(np.abs(s), a)


def test_fourier_closed_forms(gauss):
    assert fourier_transform(gauss, 0).value == pytest.approx(SQRT_PI, abs=1e-12)
    assert fourier_transform(gauss, 2).value == pytest.approx(0.6520493, abs=1e-7)
    assert fourier_transform(gauss, 2).method == "closed_form"


def test_tabulated_fourier_matches_closed_form():
    x = np.arange(-8.0, 8.0 + 5e-4, 1e-3)
    tab = Tabulated.from_function(lambda t: np.exp(-t * t), x)
    fv = fourier_transform(tab, 1.0)
    assert fv.method == "quadrature"
    assert abs(fv.value - SQRT_PI * math.exp(-0.25)) < 1e-8


def test_quadrature_route_matches_closed_form():
    # power 2 super-gaussian has no closed form path but equals the gaussian
    sg = SuperGaussian(1.0, 1.0, power=2)
    for z in (0.3, 2.0, 1 - 0.5j):
        assert fourier_transform(sg, z).value == pytest.approx(fourier_values(Gaussian(1.0), z), abs=1e-12)


def test_real_axis_conjugate_symmetry(two_gauss, well):
    xi = np.linspace(-7, 7, 57)
    for spec in (two_gauss, well):
        a = fourier_values(spec, -xi + 0j)
        b = np.conj(fourier_values(spec, xi + 0j))
        np.testing.assert_allclose(a, b, atol=1e-12)


def test_fourier_derivatives_by_difference(two_gauss):
    z, h = 0.7 - 0.4j, 1e-5
    v0, v1, v2 = fourier_derivatives(two_gauss, z)
    fd1 = (fourier_values(two_gauss, z + h) - fourier_values(two_gauss, z - h)) / (2 * h)
    assert abs(v1 - fd1) < 1e-8
    fd2 = (fourier_values(two_gauss, z + h) - 2 * v0 + fourier_values(two_gauss, z - h)) / h**2
    assert abs(v2 - fd2) < 1e-4


@pytest.mark.parametrize("n", [1, 5, 10])
def test_super_exponential_decay(gauss, two_gauss, n):
    # |V(x)| e^{N|x|} shrinks towards the truncation radius chosen for
    # growth rate N and is negligible there (window maxima, since a sum
    # of mixed sign may cross zero)
    for spec in (gauss, two_gauss):
        L = truncation_radius(spec, 1e-12, n / 2)
        x = np.linspace(L / 2, L, 41)
        for side in (1, -1):
            vals = np.abs(spec.value(side * x)) * np.exp(n * x)
            assert vals[20:].max() < vals[:20].max()
            assert vals[-1] < 1e-12


def test_reflection(two_gauss):
    x = np.linspace(-5, 5, 41)
    np.testing.assert_allclose(two_gauss.reflected().value(x), two_gauss.value(-x))


def test_validation_errors():
    with pytest.raises(ValidationError):
        Gaussian(1.0, width=0.0)
    with pytest.raises(ValidationError):
        SquareWell(-1.0, half_width=-1.0)
    with pytest.raises(ValidationError):
        Tabulated((0.0, 0.0, 1.0), (1.0, 2.0, 3.0))
    with pytest.raises(ValidationError):
        spec_from_dict({"family": "lorentzian"})
    with pytest.raises(ValidationError):
        spec_from_dict({"family": "gaussian", "amplitude": 1.0, "wdth": 2.0})


def test_spec_round_trip(tmp_path, two_gauss, well):
    for spec in (two_gauss, well, Gaussian(0.5, 2.0, 1.0, label="g")):
        p = tmp_path / "s.json"
        save_spec(spec, p)
        assert load_spec(p) == spec
        assert json.loads(p.read_text())["family"] == spec.family


def test_truncation_error_for_short_table():
    x = np.linspace(-1, 1, 201)
    tab = Tabulated.from_function(lambda t: np.exp(-t * t), x)
    with pytest.raises(TruncationError):
        fourier_transform(tab, 3.0j)


def test_gaussian_order_and_type(gauss):
    radii = np.geomspace(2, 30, 16)
    rho, sigma, _, _ = fit_growth(radii, max_modulus_profile(gauss, radii))
    assert abs(rho - 2) < 0.025 * 2
    assert abs(sigma - 0.25) < 0.1 * 0.25


def test_fit_rejects_non_increasing():
    with pytest.raises(FitError):
        fit_growth([1, 2, 3, 4], [1.0, 0.5, 2.0, 3.0])


def test_hypothesis_check_gaussian(gauss):
    rep = hypothesis_check(gauss)
    assert 1.95 <= rep.order_estimate <= 2.05
    assert 0.23 <= rep.type_estimate <= 0.27
    assert rep.h4_zero_halfplane == "zero_free"
    assert 0.0 <= rep.h3_sampled_fraction <= 1.0
    assert rep.h2_bound_margin >= 0
    assert rep.order_exceeds_one


def test_hypothesis_check_square_well(well):
    rep = hypothesis_check(well)
    assert 0.95 <= rep.order_estimate <= 1.05
    assert not rep.order_exceeds_one
    assert "order_not_above_one" in rep.flags
    # sin(z)/z vanishes on the real axis only
    assert any(f.startswith("real_axis_zeros") for f in rep.flags)


def test_hypothesis_check_rejects_zero(zero):
    with pytest.raises(ValidationError):
        hypothesis_check(zero)


def test_hypothesis_check_is_seeded(gauss):
    a = hypothesis_check(gauss, sample_count=50, seed=3, jost_constant=0.87)
    b = hypothesis_check(gauss, sample_count=50, seed=3, jost_constant=0.87)
    assert a == b


def test_gaussian_sum_terms_from_dict():
    s = spec_from_dict({"family": "gaussian_sum", "terms": [{"amplitude": 1.0}, {"amplitude": -0.5, "center": 1.0}]})
    assert isinstance(s, GaussianSum)
    assert s.value(0.0) == pytest.approx(1.0 - 0.5 * math.exp(-1.0))
