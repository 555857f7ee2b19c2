"""Reference laws: densities, transforms, quadrature, moment metric."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from betaspectra.equilibria import (
    ARCSINE_01,
    ARCSINE_SYM,
    SC,
    ChebGrid,
    EquilibriumLaw,
    Family,
    MomentVector,
    density,
    law_grid,
    moment,
    moment_distance,
    mp_edges,
    sigma_pm,
    stieltjes,
    u_pm,
)
from betaspectra.errors import DomainError, ParameterError

ALL_LAWS = [
    SC,
    ARCSINE_SYM,
    ARCSINE_01,
    EquilibriumLaw(Family.MARCHENKO_PASTUR, tau=1.0),
    EquilibriumLaw(Family.MARCHENKO_PASTUR, tau=0.35),
    EquilibriumLaw(Family.KESTEN_MCKAY, u_minus=0.25, u_plus=0.75),
    EquilibriumLaw(Family.KESTEN_MCKAY, u_minus=0.1, u_plus=0.95),
]


def test_density_point_values():
    assert density(SC, 0.0) == pytest.approx(1.0 / math.pi, abs=1e-14)
    assert density(SC, 3.0) == 0.0
    mp1 = EquilibriumLaw(Family.MARCHENKO_PASTUR, tau=1.0)
    assert density(mp1, 4.0) == pytest.approx(0.0, abs=1e-15)
    assert density(mp1, 2.0) == pytest.approx(1.0 / (2.0 * math.pi), abs=1e-14)
    kmk01 = EquilibriumLaw(Family.KESTEN_MCKAY, u_minus=0.0, u_plus=1.0)
    assert density(kmk01, 0.5) == pytest.approx(2.0 / math.pi, rel=1e-12)
    # the KMK(0,1) special case coincides with arcsine on [0,1]
    xs = np.linspace(0.05, 0.95, 19)
    assert np.allclose(density(kmk01, xs), density(ARCSINE_01, xs), rtol=1e-12)


def test_invalid_parameters():
    with pytest.raises(ParameterError):
        EquilibriumLaw(Family.MARCHENKO_PASTUR, tau=1.5)
    with pytest.raises(ParameterError):
        EquilibriumLaw(Family.KESTEN_MCKAY, u_minus=0.8, u_plus=0.3)


@pytest.mark.parametrize("law", ALL_LAWS)
def test_density_integrates_to_one(law):
    grid = law_grid(law, 2048)
    total = float(np.dot(grid.weights, density(law, grid.nodes)))
    assert total == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("law", ALL_LAWS)
def test_density_nonnegative(law):
    lo, hi = law.support
    xs = np.linspace(lo + 1e-9 * (hi - lo), hi - 1e-9 * (hi - lo), 501)
    assert np.all(density(law, xs) >= 0.0)


def test_stieltjes_sc_closed_form():
    assert stieltjes(SC, 3.0) == pytest.approx((-3.0 + math.sqrt(5.0)) / 2.0, abs=1e-14)
    # fixed point m = 1/(-z - m) off the support
    rng = np.random.default_rng(11)
    for _ in range(50):
        z = complex(rng.uniform(-4, 4), rng.uniform(0.2, 3.0))
        m = stieltjes(SC, z)
        assert abs(m - 1.0 / (-z - m)) < 1e-12


def test_stieltjes_asymptotics_and_branch():
    for law in ALL_LAWS:
        y = 1e5
        assert abs(stieltjes(law, 1j * y) - (-1.0 / (1j * y))) < 1e-8
        z = complex(0.3, 0.8)
        assert stieltjes(law, z).imag > 0.0


@pytest.mark.parametrize("law", ALL_LAWS)
def test_stieltjes_matches_quadrature(law):
    lo, hi = law.support
    for z in (hi + 0.5, lo - 0.7, hi + 3.0):
        direct, _ = quad(lambda x: density(law, x) / (x - z), lo, hi, limit=200)
        assert stieltjes(law, z) == pytest.approx(direct, abs=1e-8)


def test_stieltjes_inside_support_rejected():
    with pytest.raises(DomainError):
        stieltjes(SC, 0.5)


def test_stieltjes_boundary_imag_matches_density():
    for law in ALL_LAWS:
        lo, hi = law.support
        xs = np.linspace(lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo), 7)
        for x in xs:
            m = stieltjes(law, complex(x, 1e-9))
            assert m.imag / math.pi == pytest.approx(density(law, x), rel=1e-5, abs=1e-8)


def test_sigma_u_inversion():
    assert u_pm(0.5, 0.5) == pytest.approx((0.0, 1.0), abs=1e-14)
    b, c = 0.2, 0.7
    x, y = sigma_pm(b, c)
    assert u_pm(x, y) == pytest.approx((b, c), abs=1e-12)
    grid = np.linspace(0.05, 0.95, 20)
    for xx in grid:
        for yy in grid:
            um, up = u_pm(xx, yy)
            expand = (
                (math.sqrt((1 - xx) * (1 - yy)) - math.sqrt(xx * yy)) ** 2,
                (math.sqrt((1 - xx) * (1 - yy)) + math.sqrt(xx * yy)) ** 2,
            )
            assert (um, up) == pytest.approx(expand, abs=1e-14)
    with pytest.raises(ParameterError):
        u_pm(0.0, 0.5)


def test_moments_catalan():
    catalan = [1, 1]
    for k in range(1, 10):
        catalan.append(sum(catalan[i] * catalan[k - i] for i in range(k + 1)))
    for k in range(1, 9):
        assert moment(SC, 2 * k) == pytest.approx(catalan[k], abs=1e-9)
        assert moment(SC, 2 * k - 1) == 0.0


def test_chebgrid_polynomial_exactness():
    grid = ChebGrid.for_interval(-2.0, 2.0, 16)
    # exact for polynomial degree < 2n against the intrinsic Chebyshev weight
    for deg in (0, 5, 12, 21, 31):
        # odd powers vanish; even 2k give pi * C(2k, k) after x = 2 cos(theta)
        exact = math.pi * math.comb(deg, deg // 2) if deg % 2 == 0 else 0.0
        got = grid.integrate_chebyshev(lambda x: x**deg)
        scale = grid.intrinsic_weight * float(np.sum(np.abs(grid.nodes) ** deg))
        assert got == pytest.approx(exact, abs=1e-12 * max(1.0, scale))
    # the Lebesgue weights integrate the arcsine density to exactly 1
    dens = 1.0 / (math.pi * np.sqrt(4.0 - grid.nodes**2))
    assert float(np.dot(grid.weights, dens)) == pytest.approx(1.0, abs=1e-14)


def test_moment_distance_metric():
    mu = MomentVector.of_law(SC, 32)
    assert moment_distance(mu, mu).value == 0.0
    # delta_0 vs delta_1: every |Delta_k| = 1
    d0 = MomentVector.of_atoms([0.0], [1.0], 32)
    d1 = MomentVector.of_atoms([1.0], [1.0], 32)
    md = moment_distance(d0, d1)
    assert md.value == pytest.approx(0.5, abs=1e-9)
    assert md.remainder_bound <= 2.0**-32
    rng = np.random.default_rng(4)
    vecs = [MomentVector(rng.uniform(-1, 1, 16)) for _ in range(3)]
    a, b, c = vecs
    dab = moment_distance(a, b).value
    dba = moment_distance(b, a).value
    assert dab == pytest.approx(dba, abs=1e-15)
    assert dab <= moment_distance(a, c).value + moment_distance(c, b).value + 1e-15


def test_moment_vector_hankel_psd():
    mv = MomentVector.of_law(SC, 12)
    assert mv.is_nonnegative_definite()


def test_law_json_round_trip():
    for law in ALL_LAWS:
        back = EquilibriumLaw.from_json(law.to_json())
        assert back == law
