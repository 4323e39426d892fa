"""Tests for the exact ring spectra and modified inner products."""

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import brentq

from pointlike.errors import DomainError
from pointlike.regulated import Kind
from pointlike.spectrum import (
    ConnectionMatrix,
    PointlikeModel,
    alpha,
    duality_residual,
    eigenfunction,
    energy_functional,
    gram_matrix,
    inner_product,
    mode_function,
    quantization_residual,
    solve_modes,
    standard_product,
    two_particle_reduce,
)


def bmodel(c=1.0, nu=1.0, L=2.0):
    return PointlikeModel(kind=Kind.BOSON_DELTA, c=c, nu=nu, L=L)


def fmodel(c=1.0, nu=1.0, L=2.0):
    return PointlikeModel(kind=Kind.FERMION_ETA, c=c, nu=nu, L=L)


def test_model_validation():
    with pytest.raises(ValueError):
        bmodel(L=0.0)
    with pytest.raises(ValueError):
        bmodel(c=-1.0)
    with pytest.raises(ValueError):
        PointlikeModel(kind=Kind.FERMION_ETA, c=0.0, nu=0.0, L=1.0)


def test_alpha_domain():
    with pytest.raises(DomainError):
        alpha(bmodel(), 0.0)
    assert alpha(bmodel(c=2.0, nu=1.0), 1.0) == pytest.approx(0.5)


@pytest.mark.parametrize("model", [bmodel(), bmodel(c=3.0, nu=0.5),
                                   fmodel(), fmodel(c=0.4, nu=2.0)])
def test_first_root_against_tangent_oracle(model):
    # independent oracle: solve the pole form tan(kL/2) = alpha(k) (bosonic)
    # or tan(kL/2) = -1/alpha(k) (fermionic) by brentq on a narrowed bracket
    if model.kind is Kind.BOSON_DELTA:
        h = lambda k: math.tan(k * model.L / 2.0) - alpha(model, k)
    else:
        h = lambda k: math.tan(k * model.L / 2.0) + 1.0 / alpha(model, k) \
            if alpha(model, k) != 0 else math.tan(k * model.L / 2.0)
    k1 = solve_modes(model, 1)[0].k
    # bracket the oracle root around the solver's answer but refine blind
    lo, hi = 0.9 * k1, 1.1 * k1
    assert h(lo) * h(hi) < 0
    k_oracle = brentq(h, lo, hi, xtol=1e-13)
    assert k1 == pytest.approx(k_oracle, abs=1e-10)


def test_roots_annihilate_residual():
    for model in (bmodel(), fmodel(c=2.0, nu=0.3)):
        for m in solve_modes(model, 6):
            assert abs(quantization_residual(model, m.k)) < 1e-9 * (1 + m.k**2)


def test_free_sector_is_exact_lattice():
    model = bmodel()
    ks = [m.k for m in solve_modes(model, 4, sector="free")]
    expected = [2 * math.pi * n / model.L for n in (1, 2, 3, 4)]
    assert np.allclose(ks, expected, atol=1e-10)


def test_constant_mode_for_c0_boson():
    model = bmodel(c=0.0, nu=0.8)
    m0 = solve_modes(model, 1)[0]
    assert m0.k == 0.0 and m0.E == 0.0
    assert m0.Z**2 == pytest.approx(model.L + model.nu**2, rel=1e-14)
    # normalized under the modified product
    rf = mode_function(model, m0)
    assert inner_product(model, rf, rf).real == pytest.approx(1.0, abs=1e-10)


def test_normalization_by_direct_quadrature():
    # Z^2 closed form vs direct integral of |psi|^2 plus the point term
    for model in (bmodel(), fmodel(c=2.0, nu=0.7)):
        for m in solve_modes(model, 3):
            rf = mode_function(model, m)
            assert inner_product(model, rf, rf).real == pytest.approx(
                1.0, abs=1e-9)


def test_gram_modified_is_identity():
    for model in (bmodel(), fmodel()):
        modes = solve_modes(model, 10)
        G = gram_matrix(model, modes, modified=True)
        assert np.max(np.abs(G - np.eye(len(modes)))) < 1e-9


def test_gram_standard_is_not_identity():
    model = bmodel()
    modes = solve_modes(model, 6)
    G = gram_matrix(model, modes, modified=False)
    off = G - np.diag(np.diag(G))
    assert np.max(np.abs(off)) > 1e-3


def test_mixed_sectors_orthogonal():
    model = bmodel()
    mi = solve_modes(model, 3)
    mf = solve_modes(model, 3, sector="free")
    for a in mi:
        for b in mf:
            ip = inner_product(model, mode_function(model, a),
                               mode_function(model, b))
            assert abs(ip) < 1e-9


def test_energy_functional_matches_eigenvalue():
    for model in (bmodel(), fmodel(c=2.0, nu=0.5)):
        for m in solve_modes(model, 3):
            rf = mode_function(model, m)
            norm = inner_product(model, rf, rf).real
            assert energy_functional(model, rf) / norm == pytest.approx(
                m.E, rel=1e-8, abs=1e-8)


def test_energy_functional_point_term():
    # plain quadrature oracle on a hand-built smooth trial function
    model = bmodel(c=2.0, nu=0.0, L=2.0)
    from pointlike.spectrum import RingFunction
    f = RingFunction(f=lambda x: np.cos(math.pi * x / 2.0),
                     plus0=1.0, minus0=1.0,
                     df=lambda x: -math.pi / 2.0 * np.sin(math.pi * x / 2.0),
                     dplus0=0.0, dminus0=0.0)
    kin = quad(lambda x: (math.pi / 2.0 * math.sin(math.pi * x / 2.0))**2,
               -1.0, 1.0)[0]
    assert energy_functional(model, f) == pytest.approx(kin + 2.0, rel=1e-10)


def test_standard_product_free_cosines():
    model = bmodel(c=0.0, nu=0.0, L=2.0)
    k = 2 * math.pi / model.L
    val = standard_product(model, lambda x: np.cos(k * x),
                           lambda x: np.cos(k * x))
    assert val.real == pytest.approx(model.L / 2.0, rel=1e-10)


def test_connection_matrix():
    mb, mf = bmodel(c=1.5, nu=0.5), fmodel(c=1.5, nu=0.5)
    for model, sign in ((mb, 1.0), (mf, -1.0)):
        M = ConnectionMatrix(model)(4.0)
        assert np.linalg.det(M) == pytest.approx(1.0, rel=1e-12)
        assert M[1, 0] == pytest.approx(sign * (1.5 - 4.0 * 0.25))
        assert M[0, 0] == sign


def test_two_particle_reduce():
    model = bmodel(c=2.0, nu=1.0)
    red = two_particle_reduce(model, total_momentum=1.0, E_total=5.0)
    assert red.E_rel == pytest.approx(4.0)
    assert red.jump_coefficient == pytest.approx(2.0 - 4.0)


def test_duality_residual_small():
    model = bmodel(c=1.3, nu=0.8, L=2.0)
    for m in solve_modes(model, 5):
        assert duality_residual(model, m) < 1e-12


def test_duality_rejects_wrong_inputs():
    model = bmodel()
    free = solve_modes(model, 1, sector="free")[0]
    with pytest.raises(ValueError):
        duality_residual(model, free)
    with pytest.raises(ValueError):
        duality_residual(fmodel(), solve_modes(fmodel(), 1)[0])


def test_solve_modes_validation():
    with pytest.raises(ValueError):
        solve_modes(bmodel(), 0)
