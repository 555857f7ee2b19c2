"""Constant-tail Jacobi models: transform, spectral decomposition,
sum-rule identity and the conjectured analogues."""

import math

import numpy as np
import pytest

from betaspectra.errors import DomainError, ParameterError
from betaspectra.jacobi import JacobiCoeffs, spectral_decompose
from betaspectra.rates import big_g, rate_fg
from betaspectra.sumrule import (
    TailJacobiModel,
    ac_density,
    conjecture_probe_jacobi,
    conjecture_probe_laguerre,
    decompose,
    jacobi_limit_alphas,
    m_function,
    measure_side_rate,
    outliers,
    sumrule_verify,
)

FREE = TailJacobiModel()


def head(b, a):
    return TailJacobiModel(head=JacobiCoeffs(np.asarray(b, float), np.asarray(a, float)))


def test_model_basics():
    model = head([0.5], [])
    assert model.bulk == (-2.0, 2.0)
    assert model.b_at(0) == 0.5
    assert model.b_at(3) == 0.0
    assert model.a_at(0) == 1.0
    trunc = model.coefficients(4)
    assert trunc.b == pytest.approx([0.5, 0.0, 0.0, 0.0])
    assert trunc.a == pytest.approx([1.0, 1.0, 1.0])
    with pytest.raises(ParameterError):
        TailJacobiModel(a_inf=0.0)
    back = TailJacobiModel.from_json(model.to_json())
    assert back.bulk == model.bulk
    assert np.array_equal(back.head.b, model.head.b)


def test_m_function_free_closed_form():
    z = complex(0.4, 1.3)
    m = m_function(FREE, z)
    # fixed point of the free recursion
    assert abs(m - 1.0 / (-z - m)) < 1e-13
    assert m.imag > 0.0
    x = 3.0
    assert m_function(FREE, x) == pytest.approx((-3.0 + math.sqrt(5.0)) / 2.0, abs=1e-14)
    with pytest.raises(DomainError):
        m_function(FREE, 1.5)


def test_m_function_matches_truncation():
    rng = np.random.default_rng(14)
    model = head(rng.uniform(-0.5, 0.5, 3), rng.uniform(0.6, 1.4, 2))
    big = model.coefficients(4000)
    diag = big.b
    off = big.a
    for z in (complex(0.3, 0.9), complex(-1.0, 0.4), 2.7, -2.5):
        zc = complex(z)
        # resolvent (1,1) entry by the same continued fraction on the
        # truncated matrix, run from the far end
        m = 0.0
        for bj, aj in zip(diag[::-1], np.concatenate([[0.0], off[::-1]])):
            m = 1.0 / (bj - zc - aj**2 * m)
        got = m_function(model, z)
        assert abs(complex(got) - m) < 1e-8


def test_ac_density_free_is_semicircle():
    xs = np.linspace(-1.9, 1.9, 21)
    expect = np.sqrt(4.0 - xs * xs) / (2.0 * math.pi)
    assert ac_density(FREE, xs) == pytest.approx(expect, abs=1e-13)
    with pytest.raises(DomainError):
        ac_density(FREE, 2.5)


def test_outlier_single_diagonal_bump():
    # head b_0 = t > 1 creates one eigenvalue at t + 1/t with mass 1 - 1/t^2
    for t in (1.25, 2.0, 5.0):
        model = head([t], [])
        outs = outliers(model)
        assert len(outs) == 1
        e, mass = outs[0]
        assert e == pytest.approx(t + 1.0 / t, abs=1e-10)
        assert mass == pytest.approx(1.0 - 1.0 / t**2, rel=1e-7)


def test_outlier_single_offdiagonal_bump():
    # head a_0 = s > sqrt(2) creates a symmetric pair at +-s^2/sqrt(s^2-1)
    model = head([], [1.6])
    outs = outliers(model)
    assert len(outs) == 2
    expect = 1.6**2 / math.sqrt(1.6**2 - 1.0)
    assert outs[0][0] == pytest.approx(-expect, abs=1e-10)
    assert outs[1][0] == pytest.approx(expect, abs=1e-10)
    assert outs[0][1] == pytest.approx(outs[1][1], abs=1e-9)
    # below the threshold there are none
    assert outliers(head([], [1.2])) == []


def test_outliers_match_truncation_eigenvalues():
    rng = np.random.default_rng(15)
    model = head(rng.uniform(-1.2, 1.2, 4), rng.uniform(0.5, 1.8, 3))
    outs = outliers(model)
    trunc = spectral_decompose(model.coefficients(2000))
    delta = 1e-3
    lam_out = trunc.locations[(trunc.locations > 2.0 + delta) | (trunc.locations < -2.0 - delta)]
    mine = [e for e, _ in outs if abs(e) > 2.0 + delta]
    assert len(mine) == len(lam_out)
    for e, le in zip(sorted(mine), np.sort(lam_out)):
        assert e == pytest.approx(le, abs=1e-5)


def test_decompose_total_mass():
    rng = np.random.default_rng(16)
    for _ in range(5):
        model = head(rng.uniform(-1.0, 1.0, 3), rng.uniform(0.5, 1.6, 3))
        dec = decompose(model)
        assert dec.total_mass() == pytest.approx(1.0, abs=1e-8)
        assert dec.n_plus == len(dec.outliers_above)
        assert dec.n_minus == len(dec.outliers_below)


def test_sumrule_examples():
    # single diagonal entry 0.3: both sides equal 0.3^2/2 = 0.045
    report = sumrule_verify(head([0.3], []))
    assert report.jacobi_side == pytest.approx(0.045, abs=1e-15)
    assert report.measure_side == pytest.approx(0.045, abs=1e-8)
    assert abs(report.gap) < 1e-8
    assert report.outlier_list == []

    # b_0 = 1.25: coefficient side 0.78125, one outlier at 2.05 with mass 0.36
    report = sumrule_verify(head([1.25], []))
    assert report.jacobi_side == pytest.approx(0.78125, abs=1e-15)
    assert abs(report.gap) < 1e-8
    (e, mass), = report.outlier_list
    assert e == pytest.approx(2.05, abs=1e-10)
    assert mass == pytest.approx(0.36, rel=1e-7)

    # a_0 = sqrt(2): no outliers, both sides equal 1 - log 2
    report = sumrule_verify(head([], [math.sqrt(2.0)]))
    assert report.jacobi_side == pytest.approx(1.0 - math.log(2.0), abs=1e-14)
    assert abs(report.gap) < 1e-7
    assert report.outlier_list == []


def test_sumrule_random_heads():
    rng = np.random.default_rng(17)
    for _ in range(10):
        model = head(rng.uniform(-1.0, 1.0, 3), rng.uniform(0.5, 1.7, 2))
        report = sumrule_verify(model)
        assert abs(report.gap) < 1e-6 * (1.0 + abs(report.jacobi_side))


def test_sumrule_requires_free_tail():
    with pytest.raises(ParameterError):
        sumrule_verify(TailJacobiModel(a_inf=0.5))


def test_measure_side_support_mismatch():
    from betaspectra.equilibria import EquilibriumLaw, Family

    mp = EquilibriumLaw(Family.MARCHENKO_PASTUR, tau=0.5)
    with pytest.raises(ParameterError):
        measure_side_rate(FREE, mp)


def test_conjecture_probe_laguerre_at_minimizer():
    # the Jacobi matrix of MP(tau) itself (b_0 = 1, then 1 + tau, a = sqrt(tau))
    # has zero cost on both sides
    tau = 0.7
    model = TailJacobiModel(
        a_inf=math.sqrt(tau), b_inf=1.0 + tau,
        head=JacobiCoeffs(np.array([1.0]), np.empty(0)),
    )
    report = conjecture_probe_laguerre(model, tau)
    assert report.label == "CONJECTURE"
    assert report.coefficient_side.value == pytest.approx(0.0, abs=1e-8)
    assert abs(report.gap) < 1e-8


def test_conjecture_probe_laguerre_perturbed():
    # tau = 1 with d_1 = 1.2: coefficient side is G(1.2) and the gap is small
    tau = 1.0
    d1 = 1.2
    model = TailJacobiModel(
        a_inf=1.0, b_inf=2.0,
        head=JacobiCoeffs(np.array([d1**2]), np.array([d1])),
    )
    report = conjecture_probe_laguerre(model, tau)
    assert report.coefficient_side.value == pytest.approx(big_g(d1), abs=1e-9)
    assert abs(report.gap) < 1e-6
    assert report.label == "CONJECTURE"


def test_conjecture_probe_laguerre_wrong_tail():
    with pytest.raises(ParameterError):
        conjecture_probe_laguerre(FREE, 0.5)


def test_jacobi_limit_alphas():
    assert jacobi_limit_alphas(0.0, 0.0) == (0.0, 0.0)
    e, o = jacobi_limit_alphas(1.0, 0.0)
    assert e == pytest.approx(1.0 / 3.0)
    assert o == pytest.approx(-1.0 / 3.0)
    e, o = jacobi_limit_alphas(0.7, 1.3)
    assert e == pytest.approx(-0.6 / 4.0)
    assert o == pytest.approx(-2.0 / 4.0)


def test_conjecture_probe_jacobi_at_minimizer():
    for k1, k2 in ((0.0, 0.0), (1.0, 0.0), (0.7, 1.3)):
        report = conjecture_probe_jacobi(np.empty(0), k1, k2)
        assert report.label == "CONJECTURE"
        assert report.coefficient_side.value == pytest.approx(0.0, abs=1e-10)
        assert abs(report.gap) < 1e-8


def test_conjecture_probe_jacobi_perturbed_head():
    report = conjecture_probe_jacobi(np.array([0.4, -0.1]), 0.5, 0.25)
    assert report.coefficient_side.value > 0.0
    assert math.isfinite(report.measure_side.value)
    # sides agree to modest accuracy at a perturbed point as well
    assert abs(report.gap) < 1e-4 * (1.0 + report.coefficient_side.value)
