"""Tests for the regulated potential profiles and zero-energy solutions."""

import math

import numpy as np
import pytest

from pointlike.errors import DomainError
from pointlike.regulated import (
    Kind,
    RegulatedPotentialSpec,
    ShapeFunctions,
    eval_potential,
    eval_v,
    eval_v_derivatives,
    eval_w,
    fundamental_solutions,
    tanh_shapes,
    zero_energy_residual,
)


def boson(c=1.0, nu=1.0, a=0.01, **kw):
    return RegulatedPotentialSpec(kind=Kind.BOSON_DELTA, c=c, nu=nu, a=a, **kw)


def fermion(c=1.0, nu=1.0, a=0.01, **kw):
    return RegulatedPotentialSpec(kind=Kind.FERMION_ETA, c=c, nu=nu, a=a, **kw)


def test_spec_validation():
    with pytest.raises(ValueError):
        boson(c=-1.0)
    with pytest.raises(ValueError):
        boson(nu=-0.5)
    with pytest.raises(ValueError):
        boson(a=0.0)
    with pytest.raises(ValueError):
        fermion(c=0.0)  # fermionic construction needs c > 0


def test_boson_v_closed_form_at_zero():
    # v(0) = 1 + nu * sqrt(delta(0)/a) = 1 + nu / sqrt(2 a)
    for a in (0.01, 0.003):
        spec = boson(a=a)
        assert eval_v(spec, np.array([0.0]))[0] == pytest.approx(
            1.0 + 1.0 / math.sqrt(2 * a), rel=1e-12)


def test_parity():
    xs = np.linspace(0.001, 0.3, 57)
    vb = eval_v(boson(), np.concatenate([-xs[::-1], xs]))
    assert np.allclose(vb, vb[::-1], rtol=0, atol=1e-13)
    vf = eval_v(fermion(), np.concatenate([-xs[::-1], xs]))
    assert np.allclose(vf, -vf[::-1], rtol=0, atol=1e-13)


@pytest.mark.parametrize("spec", [boson(), fermion(), boson(nu=0.0),
                                  fermion(nu=0.0), boson(c=0.0, nu=0.7)])
def test_analytic_derivatives_match_finite_differences(spec):
    xs = np.array([-0.05, -0.02, -0.007, 0.004, 0.013, 0.06])
    v, dv, d2v = eval_v_derivatives(spec, xs)
    h = 1e-6
    fd1 = (eval_v(spec, xs + h) - eval_v(spec, xs - h)) / (2 * h)
    fd2 = (eval_v(spec, xs + h) - 2 * v + eval_v(spec, xs - h)) / h**2
    assert np.allclose(dv, fd1, rtol=1e-6, atol=1e-6)
    assert np.allclose(d2v, fd2, rtol=1e-4, atol=1e-2 * np.max(np.abs(d2v)))


def test_generic_shape_fallback_matches_analytic():
    # the same tanh pair fed through the finite-difference path
    generic = ShapeFunctions(name="tanh-fd", sigma=np.tanh,
                             delta=tanh_shapes().delta, analytic=False,
                             sigma2delta_mass=1.0 / 3.0)
    xs = np.linspace(-0.06, 0.06, 41)
    for make in (boson, fermion):
        sa, sg = make(), make(shapes=generic)
        va, dva, d2va = eval_v_derivatives(sa, xs)
        vg, dvg, d2vg = eval_v_derivatives(sg, xs)
        assert np.allclose(va, vg, rtol=1e-12)
        assert np.allclose(dva, dvg, rtol=1e-6, atol=1e-6)
        assert np.allclose(d2va, d2vg, rtol=1e-4, atol=1e-4 * np.max(np.abs(d2va)))


def test_wronskians():
    xs = np.linspace(-0.4, 0.4, 201)
    v, dv, w, dw = fundamental_solutions(boson(), xs)
    assert np.max(np.abs(v * dw - dv * w - 1.0)) < 1e-9
    # fermionic w needs v' != 0 on the path, which restricts nu here
    fspec = fermion(nu=0.0)
    xs_f = xs[np.abs(xs) >= fspec.guard]
    v, dv, w, dw = fundamental_solutions(fspec, xs_f)
    assert np.max(np.abs(v * dw - dv * w + 1.0)) < 1e-9


def test_fermion_w_undefined_when_dv_changes_sign():
    # for nu > 0 and small a the spike drives v' negative away from the node
    from pointlike.errors import QuadratureError
    with pytest.raises(QuadratureError):
        fundamental_solutions(fermion(nu=1.0, a=1e-3),
                              np.linspace(0.01, 0.2, 20))


def test_eval_w_matches_fundamental_solutions():
    # pointwise adaptive quadrature vs the cumulative panel scheme
    for spec in (boson(), fermion(c=2.0, nu=0.0)):
        xs = np.array([-0.15, -0.04, 0.03, 0.2])
        _, _, w, _ = fundamental_solutions(spec, xs)
        for x, wx in zip(xs, w):
            assert eval_w(spec, x) == pytest.approx(wx, rel=1e-8, abs=1e-10)


def test_zero_range_limits():
    # boson: v -> 1 + c|x|/2, w -> x; fermion: v -> x + (2/c) sgn x,
    # w -> -(c/2)|x| (fixed by evenness and the Wronskian -1)
    x = 0.1
    prev_b = prev_f = None
    for a in (3e-3, 1e-3, 3e-4):
        vb, _, wb, _ = fundamental_solutions(boson(a=a), np.array([x]))
        vf, _, wf, _ = fundamental_solutions(fermion(c=3.0, nu=0.0, a=a),
                                             np.array([x]))
        err_b = abs(vb[0] - (1 + 0.5 * x)) + abs(wb[0] - x)
        err_f = abs(vf[0] - (x + 2.0 / 3.0)) + abs(wf[0] - (-1.5 * x))
        if prev_b is not None:
            assert err_b < prev_b
            assert err_f < prev_f
        prev_b, prev_f = err_b, err_f
    assert prev_b < 0.01
    assert prev_f < 0.01


def test_zero_energy_residual_small():
    xs = np.linspace(-0.3, 0.3, 25)
    assert zero_energy_residual(boson(), xs) < 1e-6
    xs_f = xs[np.abs(xs) > 0.02]
    assert zero_energy_residual(fermion(nu=0.0), xs_f) < 1e-6


def test_fermion_guard_band():
    spec = fermion()
    with pytest.raises(DomainError):
        eval_potential(spec, np.array([0.5 * spec.guard]))
    # just outside is fine and finite
    val = eval_potential(spec, np.array([1.5 * spec.guard]))
    assert np.isfinite(val).all()


def test_potential_scale_matches_profile():
    # the bosonic well depth at the origin is v''(0)/v(0), large and negative
    spec = boson(a=0.01)
    V0 = eval_potential(spec, np.array([0.0]))[0]
    assert V0 == pytest.approx(-8748.6, rel=1e-3)


def test_potential_vanishes_at_fixed_x_as_a_shrinks():
    x = np.array([0.05])
    vals = [abs(eval_potential(boson(a=a), x)[0]) for a in (1e-2, 3e-3, 1e-3)]
    assert vals[0] > vals[1] > vals[2]
    assert vals[-1] < 1e-6
