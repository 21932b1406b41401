import math

import numpy as np
import pytest

from resonancelab import asymptotics as asy
from resonancelab.errors import ValidationError
from resonancelab.potential import Gaussian, fourier_values

LADDER = np.linspace(10.0, 30.0, 11)


# -- indicators ---------------------------------------------------------------

def test_indicator_of_exponential():
    f = lambda z: np.exp(-1j * z)
    assert asy.indicator(f, math.pi / 2, 1.0, LADDER) == pytest.approx(1.0, abs=1e-12)
    assert asy.indicator(f, -math.pi / 2, 1.0, LADDER) == pytest.approx(-1.0, abs=1e-12)
    assert asy.indicator(f, 0.0, 1.0, LADDER) == pytest.approx(0.0, abs=1e-12)


def test_indicator_product_additivity(gauss):
    f = lambda z: complex(fourier_values(gauss, z))
    g = lambda z: np.exp(z * z / 10)
    th = -math.pi / 3
    a = asy.indicator(f, th, 2.0, LADDER)
    b = asy.indicator(g, th, 2.0, LADDER)
    ab = asy.indicator(lambda z: f(z) * g(z), th, 2.0, LADDER)
    assert ab == pytest.approx(a + b, abs=1e-9)


def test_gaussian_fourier_indicator(gauss):
    # Vhat = sqrt(pi) exp(-z^2/4): h(theta) = -cos(2 theta)/4
    for th in (math.pi / 2, -math.pi / 2, 0.0, math.pi / 4):
        assert asy.fourier_indicator(gauss, th, 2.0) == pytest.approx(-math.cos(2 * th) / 4, abs=1e-10)


def test_max_indicator_matches_type(gauss):
    rho, sigma = asy.estimate_order(gauss)
    hs = [asy.fourier_indicator(gauss, th, rho) for th in np.linspace(-math.pi, math.pi, 25)]
    assert max(hs) == pytest.approx(sigma, rel=0.1)


def test_indicator_ladder_validation():
    with pytest.raises(ValidationError):
        asy.indicator(lambda z: 1.0, 0.0, 1.0, [1, 2, 3])
    with pytest.raises(ValidationError):
        asy.indicator(lambda z: 1.0, 0.0, 1.0, [1, 2, 3, 5, 4])


def test_underflow_is_flagged():
    fit = asy.indicator_fit(lambda z: np.exp(-z * z), 0.0, 2.0, np.linspace(5, 40, 8))
    assert fit.flagged and len(fit.radii) < 8
    assert fit.h == pytest.approx(-1.0, abs=1e-9)


def test_gamma_minus_geometry():
    assert asy.in_gamma_minus(-math.pi / 2, 2.0)
    assert asy.in_gamma_minus(-math.pi / 4, 2.0)
    assert not asy.in_gamma_minus(0.1, 2.0)
    assert asy.predicted_indicator_of_D(0.3, 2.0, 0.25, 0.25) == 0.0
    assert asy.predicted_indicator_of_D(-math.pi / 2, 2.0, 0.25, 0.25) == pytest.approx(2.0)


def test_indicator_of_D_gaussian(gauss):
    est = asy.indicator_of_D(gauss)
    h_down, h_real, h_up = est.h_values
    assert h_down == pytest.approx(est.predicted[0], rel=0.02)
    assert abs(h_real) < 1e-2 and abs(h_up) < 1e-2
    assert est.predicted[1:] == (0.0, 0.0)


def test_indicator_csv(tmp_path, gauss):
    est = asy.indicator_of_D(gauss, thetas=(-math.pi / 2,), radius_ladder=np.linspace(3, 6, 5))
    p = tmp_path / "h.csv"
    asy.write_indicator_csv(est, p)
    lines = p.read_text().splitlines()
    assert lines[0] == "theta,h,predicted,fit_residual" and len(lines) == 2


# -- counting law --------------------------------------------------------------

def test_counting_trivial_potential(zero):
    rep = asy.counting_law_compare(zero, [6, 9, 12])
    assert rep.measured_n == (0, 0, 0)
    assert "trivial_potential" in rep.flags


def test_square_well_counting_exponent(well, tmp_path):
    rep = asy.counting_law_compare(well, [10, 20, 40])
    assert "order_not_above_one" in rep.flags
    assert 0.9 <= rep.fitted_exponent <= 1.1
    assert list(rep.measured_n) == sorted(rep.measured_n)
    p = tmp_path / "n.csv"
    asy.write_counting_csv(rep, p)
    assert p.read_text().splitlines()[0] == "r,n,predicted"


def test_predicted_constant_gaussian(gauss):
    rep = asy.counting_law_compare(gauss, [2, 3], rho=2.0)
    assert rep.predicted_constant == pytest.approx(1 / math.pi, rel=1e-6)


# -- Born zero curves ---------------------------------------------------------

def test_born_condition_zero_potential(zero):
    assert asy.born_condition(zero)(2 - 1j) == 4 * (2 - 1j) ** 2
    cmp = asy.born_zero_compare(zero, (-4, 4, -4, -1))
    assert cmp.pairs == () and cmp.injective


def test_born_compare_needs_lower_region(gauss):
    with pytest.raises(ValidationError):
        asy.born_zero_compare(gauss, (0, 4, -0.5, 0.5))


def test_born_pairs_gaussian(gauss):
    cmp = asy.born_zero_compare(gauss, (0, 6, -6, -1))
    assert cmp.injective and len(cmp.pairs) > 0
    # the pairing is asymptotic: distances shrink with |k|
    assert cmp.band_mean(4, 9) < cmp.band_mean(1, 4)
    assert max(p[2] for p in cmp.pairs if abs(p[0]) > 4) < 0.05
    g = asy.born_condition(gauss)
    assert all(abs(g(b)) < 1e-8 * max(1, abs(b) ** 2) for b in cmp.born_zeros)


def test_scatter_svg():
    svg = asy.scatter_svg([1 - 1j, 2 - 2j], [1.01 - 1j])
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert svg.count("<circle") == 2


# -- sigma(t) ------------------------------------------------------------------

def test_sigma_zero_t(gauss):
    assert asy.sigma_integral(gauss, 0.0) == 0.0


def test_sigma_gaussian(gauss):
    # int_0^2 ln(sqrt(pi) e^{-x^2/4}) dx = 2 ln sqrt(pi) - 2/3
    exact = 2 * math.log(math.sqrt(math.pi)) - 2 / 3
    assert asy.sigma_integral(gauss, 2.0) == pytest.approx(exact, abs=1e-8)


def test_sigma_additive(two_gauss):
    s1 = asy.sigma_integral(two_gauss, 1.0)
    s2 = asy.sigma_integral(two_gauss, 2.5)
    # sigma(2.5) - sigma(1) computed directly as the integral over [1, 2.5]
    def piece(y):
        return asy._sigma_at(two_gauss, 2.5, y) - asy._sigma_at(two_gauss, 1.0, y)

    direct = 2 * piece(5e-5) - piece(1e-4)
    assert s2 - s1 == pytest.approx(direct, abs=1e-10)


def test_sigma_reflection_invariant(two_gauss):
    for t in (0.5, 1.7, 3.0):
        assert abs(asy.sigma_integral(two_gauss, t) - asy.sigma_integral(two_gauss.reflected(), t)) < 1e-10


def test_sigma_rejects_zero_potential(zero):
    with pytest.raises(ValidationError):
        asy.sigma_integral(zero, 1.0)


# -- uniqueness -----------------------------------------------------------------

def test_set_distance():
    assert asy.set_distance([1, 2j], [2j + 1e-3, 1]) == pytest.approx(1e-3)
    assert asy.set_distance([1], [1, 2]) == math.inf
    assert asy.set_distance([], []) == 0.0


def test_standard_k_test_set_is_seeded():
    a, b = asy.standard_k_test_set(seed=4), asy.standard_k_test_set(seed=4)
    assert np.array_equal(a, b)
    low = a[a.imag < 0]
    assert np.all((np.abs(low) >= 1) & (np.abs(low) <= 6) & (low.imag <= -0.2) & (low.imag >= -4))


def test_uniqueness_self(gauss):
    rep = asy.uniqueness_compare(gauss, gauss, region=(0, 4, -3, -0.05))
    assert all(v == 0 for v in rep.differences().values())


def test_uniqueness_different_potentials(gauss):
    other = Gaussian(1.5, 0.8)
    rep = asy.uniqueness_compare(gauss, other, region=(0, 4, -3, -0.05), t_values=[1.0, 2.0])
    assert rep.sup_D_difference > 1e-3
    assert rep.sup_absFT_difference > 1e-2
    assert rep.sigma_difference > 1e-2
