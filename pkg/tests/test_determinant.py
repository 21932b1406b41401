import math

import numpy as np
import pytest

from resonancelab import determinant as dm
from resonancelab.errors import DivisionError, PoleProximityError, ValidationError
from resonancelab.jost import e_det_2x2, jost_march
from resonancelab.paths import choose_path, truncation_radius
from resonancelab.quadrature import build_rule, gauss_legendre, volterra_matrices

# D of the unit gaussian from the transfer march (frozen; the Nystrom route
# is checked against these)
REFERENCE = {
    2 - 0.5j: 0.8056456989487568 + 0.3697598007868869j,
    3 - 1j: 0.8784652948566058 + 0.2418417274084931j,
    6 - 4j: 0.9288473246384443 + 0.0952333235393792j,
    12 - 1j: 0.991206242158226 + 0.07291561568097521j,
    3 + 2j: 1.1260896948034853 + 0.23260992679431253j,
}
WELL_RESONANCE = 2.296262500975161 - 1.5802016159520726j


# -- quadrature ------------------------------------------------------------

def test_rule_weights_sum():
    r = build_rule(1.0, 16)
    assert abs(r.weights.sum() - 2.0) < 1e-14
    assert np.all(np.abs(r.nodes) <= 1.0)
    assert len(r.nodes) == len(r.weights) == 16


def test_rule_polynomial_exactness():
    r = build_rule(1.0, 16)
    assert abs(r.integrate(r.nodes ** 2) - 2 / 3) < 1e-13


def test_rule_gaussian_integral():
    for n in (64, 128):
        r = build_rule(8.0, n)
        assert abs(r.integrate(np.exp(-r.nodes ** 2)) - math.sqrt(math.pi)) < 1e-12


def test_clenshaw_curtis_rule():
    r = build_rule(2.0, 33, kind="clenshaw_curtis")
    assert abs(r.weights.sum() - 4.0) < 1e-13
    assert abs(r.integrate(np.cos(r.nodes)) - 2 * math.sin(2.0)) < 1e-12


def test_refine_and_coarsen():
    r = build_rule(3.0, 64)
    assert r.refined().size == 128
    assert r.refined().coarsened().size == 64


def test_volterra_matrices_integrate_exactly():
    t, _ = gauss_legendre(8)
    right, left = volterra_matrices(8)
    f = 3 * t ** 2 + 1           # antiderivative t^3 + t
    np.testing.assert_allclose(right @ f, 2 - (t ** 3 + t), atol=1e-14)
    np.testing.assert_allclose(left @ f, (t ** 3 + t) + 2, atol=1e-14)


# -- truncation and paths ---------------------------------------------------

def test_truncation_radius_gaussian(gauss):
    L = truncation_radius(gauss, 1e-12, 0.0)
    assert L == pytest.approx(5.3)
    assert math.exp(-L * L) < 1e-12
    L4 = truncation_radius(gauss, 1e-12, 4.0)
    assert L4 > L and math.exp(-L4 * L4 + 8 * L4) < 1e-12


def test_truncation_radius_compact(well):
    for eps, m in ((1e-6, 0.0), (1e-14, 3.0)):
        assert truncation_radius(well, eps, m) == 1.0


def test_pole_exclusion(gauss):
    with pytest.raises(PoleProximityError):
        dm.determinant(gauss, 5e-4)
    with pytest.raises(ValidationError):
        dm.determinant(gauss, 1 - 1j, tol=0.0)


def test_square_well_uses_real_axis(well):
    assert choose_path(well, 3 - 2j).theta == 0.0


# -- kernel -----------------------------------------------------------------

def test_zero_potential_kernel(zero):
    km = dm.assemble_kernel(zero, build_rule(5.0, 64), 2 - 1j)
    assert not np.any(km.entries)
    assert dm.fredholm_det(km).D == 1.0


def test_kernel_diagonal_entry(gauss):
    rule = build_rule(6.0, 64)
    km = dm.assemble_kernel(gauss, rule, 1j)
    i = int(np.argmin(np.abs(rule.nodes)))
    x, w = rule.nodes[i], rule.weights[i]
    # G0(x, x; i) = 1/2 and V(x) = exp(-x^2)
    assert km.entries[i, i] == pytest.approx(w / 2 * math.exp(-x * x), rel=1e-14)


def test_kernel_symmetry_sign_definite(well):
    km = dm.assemble_kernel(well, build_rule(1.0, 64), 2 - 1j)
    assert np.abs(km.entries - km.entries.T).max() == 0.0


def test_kernel_finite(two_gauss):
    km = dm.assemble_kernel(two_gauss, build_rule(7.0, 128), 1.5 - 0.7j)
    assert np.all(np.isfinite(km.entries))


# -- determinant ------------------------------------------------------------

@pytest.mark.parametrize("k", list(REFERENCE))
def test_nystrom_matches_reference(gauss, k):
    v = dm.determinant(gauss, k, tol=1e-10)
    assert abs(v.D - REFERENCE[k]) < 1e-8
    assert v.method == "nystrom"


@pytest.mark.parametrize("k", list(REFERENCE))
def test_jost_route_matches_reference(gauss, k):
    v = dm.determinant(gauss, k, tol=1e-10, method="jost")
    assert abs(v.D - REFERENCE[k]) < 1e-13
    assert v.converged


def test_refinement_converges(gauss):
    v = dm.determinant(gauss, 2 - 0.5j, tol=1e-8)
    assert v.grid_size >= 256
    assert v.refinement_delta < 1e-8
    assert v.converged


def test_refinement_delta_decreases(gauss):
    # Romberg estimates after each doubling approach the reference
    errs = []
    for n_max in (480, 960, 1920):
        errs.append(abs(dm.determinant(gauss, 3 - 1j, tol=1e-15, n_max=n_max).D - REFERENCE[3 - 1j]))
    assert errs[0] > errs[1] > errs[2]


def test_unconverged_is_flagged(gauss):
    v = dm.determinant(gauss, 6 - 4j, tol=1e-14, n_max=256)
    assert not v.converged
    assert math.isfinite(v.refinement_delta)


def test_log_scale_deep_point(gauss):
    # far beyond the double range of the Nystrom matrix entries
    v = dm.determinant(gauss, -12j, method="jost")
    assert v.log_abs == pytest.approx(282.862, abs=1e-3)
    assert v.D.real < 0


def test_square_well_resonance_is_zero(well):
    assert abs(dm.determinant(well, WELL_RESONANCE, tol=1e-12).D) < 1e-6


def test_zero_potential_grid(zero):
    g = dm.det_grid(zero, (-5, 5, -5, -0.1), (7, 5))
    assert np.all(g.array() == 1.0)


def test_grid_masks_pole(gauss):
    g = dm.det_grid(gauss, (-1, 1, -1, 1), (3, 3), method="jost")
    assert g.mask[1, 1] and g.mask.sum() == 1


def test_upper_half_plane_decay(gauss):
    g = dm.det_grid(gauss, (-4, 4, 0.5, 3), (9, 6), tol=1e-8)
    dev = np.abs(g.array() - 1)
    assert np.all(np.diff(dev, axis=0) < 0)


def test_grid_conjugation_symmetry(two_gauss):
    g = dm.det_grid(two_gauss, (-3, 3, -2, 1.5), (7, 5), tol=1e-12, method="jost")
    a = g.array()
    ok = ~g.mask
    diff = np.abs(a - np.conj(a[:, ::-1]))[ok]
    assert diff.max() < 1e-10


@pytest.mark.parametrize("theta", [math.pi / 6, math.pi / 2, 5 * math.pi / 6])
def test_upper_half_plane_limit(gauss, theta):
    near = abs(dm.determinant(gauss, 10 * np.exp(1j * theta)).D - 1)
    far = abs(dm.determinant(gauss, 40 * np.exp(1j * theta)).D - 1)
    assert far < near


def test_scattering_det(gauss, zero):
    assert dm.scattering_det(zero, 2 - 1j) == 1.0
    e = dm.scattering_det(gauss, 2 - 1j)
    assert abs(e * dm.scattering_det(gauss, -2 + 1j) - 1) < 1e-12
    assert abs(dm.scattering_det(gauss, 3 - 1j) - e_det_2x2(gauss, 3 - 1j)) < 1e-6


def test_scattering_det_division(well):
    with pytest.raises(DivisionError):
        dm.scattering_det(well, -WELL_RESONANCE)


def test_grid_csv(tmp_path, gauss):
    g = dm.det_grid(gauss, (0, 1, -1, -0.5), (2, 2), method="jost")
    p = tmp_path / "g.csv"
    dm.write_grid_csv(g, p)
    lines = p.read_text().splitlines()
    assert lines[0] == "re_k,im_k,re_D,im_D,abs_D,converged"
    assert len(lines) == 5
    re_d = float(lines[1].split(",")[2])
    assert re_d == jost_march(gauss, -1j)[0].real
