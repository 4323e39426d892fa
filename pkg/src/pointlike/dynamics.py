"""Capture dynamics of a particle at the energy-dependent pointlike well.

Finite-L evolution expands the initial state over the solved ring modes; the
L = infinity limit is a single oscillatory k-integral, evaluated on the
rotated contour k = e^{-i theta} s where the phase factor e^{-i t k^2}
becomes a Gaussian damp.  The observable of interest is the capture
probability p(t) = nu^2 |psi(0, t)|^2, which decays as t^-3 at large t.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.special import polygamma

from .errors import FitError, ModelMismatch, NoPointMass, TruncationError
from .regulated import Kind
from .spectrum import (
    EigenMode,
    PointlikeModel,
    RingFunction,
    eigenfunction,
    inner_product,
    mode_function,
    quantization_residual,
    solve_modes,
)

__all__ = [
    "InitialState",
    "captured_at_origin",
    "EvolutionResult",
    "CompletenessResult",
    "overlaps",
    "evolve_finite",
    "finite_capture_curve",
    "modes_for_completeness",
    "completeness_check",
    "evolve_infinite",
    "infinite_capture_curve",
    "decay_exponent",
]

MODE_BUDGET = 10_000
COMPLETENESS_TARGET = 1e-3


@dataclass(frozen=True)
class InitialState:
    """Initial data: either the unit point mass at 0 or a user function.

    A user function carries a uniformly-converging part (``func``, overlapped
    with the standard product) and a declared point-mass amplitude mu whose
    overlap couples through the modified product as nu * psi_k(0) * mu.
    """

    kind: str  # "captured" or "function"
    func: RingFunction | Callable | None = None
    point_amplitude: complex = 0.0


def captured_at_origin() -> InitialState:
    """The particle located exactly at the interaction point at t = 0."""
    return InitialState(kind="captured", point_amplitude=1.0)


@dataclass
class EvolutionResult:
    times: np.ndarray
    p: np.ndarray
    truncation: int
    truncation_error: float


@dataclass
class CompletenessResult:
    partial: float
    tail_estimate: float
    no_point_mass: bool = False

    @property
    def total(self) -> float:
        return self.partial + self.tail_estimate


def _check_modes(model: PointlikeModel, modes: Sequence[EigenMode]):
    for m in modes:
        if m.k == 0.0:
            continue
        sector = "interacting" if m.interacting else "free"
        if abs(quantization_residual(model, m.k, sector)) > 1e-6 * (1 + m.k):
            raise ModelMismatch(
                f"mode k={m.k:g} does not satisfy this model's quantization")


def overlaps(model: PointlikeModel, state: InitialState,
             modes: Sequence[EigenMode]) -> np.ndarray:
    """Overlap coefficients [psi_k | psi_ini] per mode."""
    _check_modes(model, modes)
    if state.kind == "captured":
        if model.nu == 0.0:
            raise NoPointMass(
                "a point-mass initial state needs nu > 0 to be normalizable")
        out = np.array([
            model.nu / m.Z
            if (m.interacting and m.parity == model.interacting_parity())
            else 0.0
            for m in modes], dtype=complex)
        return out
    rf = state.func
    out = np.empty(len(modes), dtype=complex)
    for i, m in enumerate(modes):
        mf = mode_function(model, m)
        base = complex(inner_product(model, mf, rf)) if rf is not None else 0.0
        # subtract the modified product's own point term and add the declared
        # point-mass coupling instead: the smooth part overlaps with the
        # standard product, the point mass with nu * psi_k(0) * mu
        if rf is not None:
            rf_ring = rf if isinstance(rf, RingFunction) else None
            if model.kind is Kind.BOSON_DELTA:
                f0 = rf_ring.mid0 if rf_ring is not None else rf(1e-9 * model.L)
                base -= model.nu**2 * np.conj(mf.mid0) * f0
            else:
                fj = rf_ring.jump if rf_ring is not None else 0.0
                base -= model.nu**2 / 4.0 * np.conj(mf.jump) * fj
        point = model.nu * np.conj(mf.mid0) * state.point_amplitude
        out[i] = base + point
    return out


def modes_for_completeness(model: PointlikeModel,
                           target: float = COMPLETENESS_TARGET,
                           max_modes: int = MODE_BUDGET) -> list[EigenMode]:
    """Grow the interacting-mode list until the completeness deficit < target."""
    if model.nu == 0.0:
        raise NoPointMass("completeness of the point channel needs nu > 0")
    count = 64
    while True:
        modes = solve_modes(model, count)
        total = sum(model.nu**2 / m.Z**2 for m in modes)
        if 1.0 - total < target:
            return modes
        if count >= max_modes:
            raise TruncationError(
                f"completeness deficit {1.0 - total:g} > {target:g} "
                f"after {count} modes")
        count = min(2 * count, max_modes)


def evolve_finite(model: PointlikeModel, state: InitialState,
                  modes: Sequence[EigenMode], t: float):
    """Truncated eigenbasis propagation: returns (psi(., t) handle, p(t))."""
    ov = overlaps(model, state, modes)
    phases = ov * np.exp(-1j * np.array([m.E for m in modes]) * t)

    def psi(x):
        x = np.asarray(x, dtype=float)
        acc = np.zeros(x.shape, dtype=complex)
        for coeff, m in zip(phases, modes):
            if coeff != 0.0:
                acc = acc + coeff * eigenfunction(m, model, x)
        return acc if acc.ndim else complex(acc)

    at0 = sum(coeff * mode_function(model, m).mid0
              for coeff, m in zip(phases, modes))
    p = model.nu**2 * abs(at0) ** 2
    return psi, float(p)


def finite_capture_curve(model: PointlikeModel, state: InitialState,
                         modes: Sequence[EigenMode],
                         times: np.ndarray) -> EvolutionResult:
    """p(t) on a time grid; phases are the only t-dependence, so vectorize."""
    times = np.asarray(times, dtype=float)
    ov = overlaps(model, state, modes)
    at0 = np.array([mode_function(model, m).mid0 for m in modes], dtype=complex)
    energies = np.array([m.E for m in modes])
    amp = (ov * at0)[None, :] * np.exp(-1j * np.outer(times, energies))
    p = model.nu**2 * np.abs(amp.sum(axis=1)) ** 2
    deficit = abs(1.0 - float(np.sum(np.abs(ov) ** 2))) if state.kind == "captured" else 0.0
    return EvolutionResult(times=times, p=p, truncation=len(modes),
                           truncation_error=deficit)


def completeness_check(model: PointlikeModel, M: int,
                       tail_terms: int = 100_000) -> CompletenessResult:
    """Sum_k nu^2 / Z_k^2 over the first M interacting modes plus a tail estimate.

    The tail continues the series with the asymptotic root positions
    k_n ~ 2 pi (n + 1/2) / L and closes the remainder with the trigamma
    function of the asymptotic 1/(n + 1/2)^2 term law.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    if model.nu == 0.0:
        return CompletenessResult(partial=0.0, tail_estimate=0.0,
                                  no_point_mass=True)
    modes = solve_modes(model, M)
    partial = float(sum(model.nu**2 / m.Z**2 for m in modes))
    n0 = M  # asymptotic index of the first tail mode (even branch)
    n = np.arange(n0, n0 + tail_terms, dtype=float)
    k = 2.0 * math.pi * (n + 0.5) / model.L
    al = model.c / (2 * k) - k * model.nu**2 / 2.0
    Z2 = model.L / 2.0 * (1 + al**2) + al / k + model.nu**2
    tail = float(np.sum(model.nu**2 / Z2))
    coeff = 2.0 * model.L / (math.pi**2 * model.nu**2)
    tail += coeff * float(polygamma(1, n0 + tail_terms + 0.5))
    return CompletenessResult(partial=partial, tail_estimate=tail)


def _contour_angle(c: float, nu: float) -> float:
    """Rotation angle avoiding the poles of 1/(1 + alpha(k)^2).

    The poles sit at (-i +- sqrt(nu^2 c - 1)) / nu^2 in the lower half plane
    (for nu > 0); pick the candidate angle farthest from their arguments.
    """
    candidates = [math.pi / 4, math.pi / 6, math.pi / 3, math.pi / 8]
    if nu == 0.0:
        return candidates[0]
    disc = nu**2 * c - 1.0
    if disc <= 0.0:
        pole_args = [math.pi / 2]  # on the negative imaginary axis
    else:
        pole_args = [math.atan2(1.0 / nu**2, math.sqrt(disc) / nu**2)]
    best = max(candidates,
               key=lambda th: min(abs(th - pa) for pa in pole_args))
    return best


def evolve_infinite(c: float, nu: float, t: float, x: float = 0.0) -> complex:
    """psi(x, t) of the captured state on the infinite line.

    Evaluates (nu/pi) int_0^inf e^{-i t k^2} (cos kx + alpha sin k|x|)
    / (1 + alpha(k)^2) dk on a rotated contour for t > 0 (the integrand is
    then smooth and Gaussian-damped); t = 0 falls back to the real axis.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    if c <= 0 and nu <= 0:
        raise ValueError("need c > 0 or nu > 0 for a decaying integrand")

    def amplitude(k):
        al = c / (2.0 * k) - k * nu**2 / 2.0
        wave = (cmath.cos(k * x) + al * cmath.sin(k * abs(x))) if x else 1.0
        return wave / (1.0 + al * al)

    if t == 0.0:
        val, err = quad(lambda k: (amplitude(k)).real, 0.0, np.inf,
                        epsabs=1e-12, epsrel=1e-11, limit=800)
        if x:
            vali, _ = quad(lambda k: (amplitude(k)).imag, 0.0, np.inf,
                           epsabs=1e-12, epsrel=1e-11, limit=800)
            return nu / math.pi * complex(val, vali)
        return nu / math.pi * complex(val)

    theta = _contour_angle(c, nu)
    rot = cmath.exp(-1j * theta)
    damp = math.sin(2.0 * theta)
    s_max = math.sqrt(80.0 / (t * damp)) + 5.0

    def integrand(s):
        k = rot * s
        return rot * cmath.exp(-1j * t * k * k) * amplitude(k)

    re, re_err = quad(lambda s: integrand(s).real, 0.0, s_max,
                      epsabs=1e-13, epsrel=1e-10, limit=800)
    im, im_err = quad(lambda s: integrand(s).imag, 0.0, s_max,
                      epsabs=1e-13, epsrel=1e-10, limit=800)
    return nu / math.pi * complex(re, im)


def infinite_capture_curve(c: float, nu: float, times) -> np.ndarray:
    """p(t) = nu^2 |psi(0, t)|^2 on the infinite line."""
    return np.array([nu**2 * abs(evolve_infinite(c, nu, t)) ** 2
                     for t in np.asarray(times, dtype=float)])


def decay_exponent(times, p) -> float:
    """Least-squares slope of log p against log t."""
    times = np.asarray(times, dtype=float)
    p = np.asarray(p, dtype=float)
    if len(times) < 5:
        raise FitError("need at least 5 samples in the asymptotic window")
    if np.any(p <= 0):
        raise FitError("capture probabilities must be positive for a log fit")
    slope, _ = np.polyfit(np.log(times), np.log(p), 1)
    return float(slope)
