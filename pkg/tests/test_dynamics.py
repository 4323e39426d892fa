"""Tests for capture dynamics: finite-ring expansion and the infinite line."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from pointlike.errors import FitError, ModelMismatch, NoPointMass
from pointlike.regulated import Kind
from pointlike.dynamics import (
    captured_at_origin,
    completeness_check,
    decay_exponent,
    evolve_finite,
    evolve_infinite,
    finite_capture_curve,
    infinite_capture_curve,
    modes_for_completeness,
    overlaps,
)
from pointlike.spectrum import PointlikeModel, mode_function, solve_modes


def bmodel(c=1.0, nu=1.0, L=10.0):
    return PointlikeModel(kind=Kind.BOSON_DELTA, c=c, nu=nu, L=L)


def test_completeness_partial_plus_tail():
    res = completeness_check(bmodel(), 200)
    assert res.total == pytest.approx(1.0, abs=1e-3)
    assert res.tail_estimate > 0


def test_completeness_no_point_mass_flag():
    res = completeness_check(bmodel(nu=0.0), 10)
    assert res.no_point_mass and res.total == 0.0


def test_modes_for_completeness_hits_target():
    model = bmodel()
    modes = modes_for_completeness(model, target=1e-2)
    total = sum(model.nu**2 / m.Z**2 for m in modes)
    assert 1.0 - total < 1e-2


def test_captured_overlaps_are_nu_over_Z():
    model = bmodel()
    modes = solve_modes(model, 8)
    ov = overlaps(model, captured_at_origin(), modes)
    for m, a in zip(modes, ov):
        assert a == pytest.approx(model.nu / m.Z, rel=1e-12)


def test_captured_overlap_vanishes_on_free_sector():
    model = bmodel()
    modes = solve_modes(model, 4, sector="free")
    assert np.all(overlaps(model, captured_at_origin(), modes) == 0.0)


def test_eigenmode_initial_state_is_delta():
    # feeding mode 1 back in (smooth part + its own point-mass amplitude)
    # must produce the Kronecker overlap vector
    model = bmodel(L=4.0)
    modes = solve_modes(model, 5)
    rf1 = mode_function(model, modes[1])
    from pointlike.dynamics import InitialState
    state = InitialState(kind="function", func=rf1,
                         point_amplitude=model.nu * rf1.mid0)
    ov = overlaps(model, state, modes)
    expect = np.zeros(5)
    expect[1] = 1.0
    assert np.allclose(ov, expect, atol=1e-9)


def test_evolve_finite_stationary_mode():
    model = bmodel(L=4.0)
    modes = solve_modes(model, 4)
    rf2 = mode_function(model, modes[2])
    from pointlike.dynamics import InitialState
    state = InitialState(kind="function", func=rf2,
                         point_amplitude=model.nu * rf2.mid0)
    _, p0 = evolve_finite(model, state, modes, 0.0)
    _, pt = evolve_finite(model, state, modes, 0.7)
    # a stationary state only picks up a phase: p is t-independent
    assert pt == pytest.approx(p0, rel=1e-10)
    assert p0 == pytest.approx(model.nu**2 * abs(rf2.mid0) ** 2, rel=1e-10)


def test_captured_p0_approaches_one():
    model = bmodel()
    modes = modes_for_completeness(model, target=2.5e-3)
    res = finite_capture_curve(model, captured_at_origin(), modes,
                               np.array([0.0]))
    assert res.p[0] == pytest.approx(1.0, abs=5e-3)
    assert res.truncation_error < 2.5e-3


def test_no_point_mass_raises():
    model = bmodel(nu=0.0)
    with pytest.raises(NoPointMass):
        overlaps(model, captured_at_origin(), solve_modes(model, 3))
    with pytest.raises(NoPointMass):
        modes_for_completeness(model)


def test_model_mismatch_detected():
    model = bmodel(c=1.0)
    other = solve_modes(bmodel(c=2.0), 3)
    with pytest.raises(ModelMismatch):
        overlaps(model, captured_at_origin(), other)


def test_evolve_infinite_t0_is_unit_capture():
    for c, nu in ((1.0, 1.0), (2.0, 0.5)):
        psi0 = evolve_infinite(c, nu, 0.0)
        assert nu**2 * abs(psi0) ** 2 == pytest.approx(1.0, rel=1e-8)


@pytest.mark.parametrize("t", [0.5, 2.0])
def test_evolve_infinite_against_weighted_quadrature(t):
    # independent oracle: substitute u = k^2 and hand the e^{-i t u} phase to
    # QUADPACK's weighted cos/sin rules on a long finite window
    c, nu = 1.0, 1.0

    def g(u):
        if u == 0.0:
            return 0.0  # 1/(1 + alpha^2) ~ 4u/c^2 beats the 1/(2 sqrt(u))
        k = math.sqrt(u)
        al = c / (2.0 * k) - k * nu**2 / 2.0
        return 1.0 / ((1.0 + al * al) * 2.0 * k)

    U = 2000.0
    re = quad(g, 0.0, U, weight="cos", wvar=t, limit=2000)[0]
    im = -quad(g, 0.0, U, weight="sin", wvar=t, limit=2000)[0]
    oracle = nu / math.pi * complex(re, im)
    val = evolve_infinite(c, nu, t)
    assert val.real == pytest.approx(oracle.real, abs=2e-4)
    assert val.imag == pytest.approx(oracle.imag, abs=2e-4)


def test_evolve_infinite_validation():
    with pytest.raises(ValueError):
        evolve_infinite(1.0, 1.0, -0.1)
    with pytest.raises(ValueError):
        evolve_infinite(0.0, 0.0, 1.0)


def test_finite_matches_infinite_at_short_times():
    model = bmodel(L=30.0)
    modes = modes_for_completeness(model, target=1e-2, max_modes=4096)
    times = np.linspace(0.0, 0.05, 6)
    finite = finite_capture_curve(model, captured_at_origin(), modes, times)
    infinite = infinite_capture_curve(model.c, model.nu, times)
    rel = np.abs(finite.p - infinite) / infinite
    assert np.max(rel) < 0.05


def test_decay_exponent_is_minus_three():
    times = np.geomspace(10.0, 100.0, 8)
    p = infinite_capture_curve(1.0, 1.0, times)
    assert decay_exponent(times, p) == pytest.approx(-3.0, abs=0.2)


def test_decay_exponent_validation():
    with pytest.raises(FitError):
        decay_exponent([1, 2, 3], [1, 1, 1])
    with pytest.raises(FitError):
        decay_exponent(np.arange(1, 9), np.array([1, 1, 1, 0, 1, 1, 1, 1.0]))
