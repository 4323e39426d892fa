"""Finite-range regulated potentials and their zero-energy fundamental solutions.

Two constructions are supported.  The bosonic one builds an even node-free
profile

    v(x) = 1 + (c/2) x sigma(x/a) + nu sqrt(delta(x/a) / a)

and the fermionic one an odd profile

    v(x) = x + (2/c) sigma(x/a) + nu kappa sigma(x/a) sqrt(delta(x/a) / a)

with the normalization kappa = (2/c) / sqrt(int sigma^2 delta), chosen so the
spike's effective weight in the zero-range connection condition is exactly
nu^2 (the E nu^2 term enters through the mean derivative with weight
(c/2)^2 int sigma^2 delta relative to the bosonic case).

from which the potential V(x) = v''(x) / v(x) and the second fundamental
solution w(x) (with -f'' + V f = 0 for f in {v, w}) are derived.  The default
shape pair is sigma = tanh, delta = tanh'/2, for which all derivatives are
coded in closed form.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, QuadratureError

# tanh-derived factors are saturated beyond this |x|/a to avoid cosh overflow
SATURATION = 40.0
# relative width (in units of a) of the guard band around the fermionic node
FERMION_GUARD = 1e-3
# finite-difference step, in units of a, for generic (non-analytic) shapes
GENERIC_FD_STEP = 1e-4

__all__ = [
    "Kind",
    "ShapeFunctions",
    "RegulatedPotentialSpec",
    "tanh_shapes",
    "eval_v",
    "eval_v_derivatives",
    "eval_potential",
    "eval_w",
    "fundamental_solutions",
    "zero_energy_residual",
]


class Kind(enum.Enum):
    BOSON_DELTA = "boson-delta"
    FERMION_ETA = "fermion-eta"


@dataclass(frozen=True)
class ShapeFunctions:
    """A (sigma, delta) shape pair; sigma odd increasing to 1, delta even, unit mass.

    ``analytic`` marks the built-in tanh pair whose derivatives are evaluated in
    closed form; user-supplied pairs fall back to finite differences.
    """

    name: str
    sigma: Callable[[np.ndarray], np.ndarray]
    delta: Callable[[np.ndarray], np.ndarray]
    analytic: bool = False
    # int over R of sigma(u)^2 delta(u) du; None means compute by quadrature
    sigma2delta_mass: float | None = None

    def spike_mass(self) -> float:
        if self.sigma2delta_mass is not None:
            return self.sigma2delta_mass
        val, _ = quad(lambda u: float(self.sigma(u)) ** 2 * float(self.delta(u)),
                      -np.inf, np.inf)
        object.__setattr__(self, "sigma2delta_mass", val)
        return val


def tanh_shapes() -> ShapeFunctions:
    """The default pair sigma = tanh, delta = tanh'/2 = 1/(2 cosh^2)."""

    def delta(u):
        uc = np.clip(u, -SATURATION, SATURATION)
        return 0.5 / np.cosh(uc) ** 2

    # int tanh^2 * sech^2 / 2 = [tanh^3 / 6] = 1/3
    return ShapeFunctions(name="tanh", sigma=np.tanh, delta=delta,
                          analytic=True, sigma2delta_mass=1.0 / 3.0)


@dataclass(frozen=True)
class RegulatedPotentialSpec:
    """Parameters (kind, c, nu, a, shapes) defining one regulated potential."""

    kind: Kind
    c: float
    nu: float
    a: float
    shapes: ShapeFunctions = field(default_factory=tanh_shapes)

    def __post_init__(self):
        if self.c < 0:
            raise ValueError(f"coupling c must be >= 0, got {self.c}")
        if self.nu < 0:
            raise ValueError(f"nu must be >= 0, got {self.nu}")
        if self.a <= 0:
            raise ValueError(f"range a must be > 0, got {self.a}")
        if self.kind is Kind.FERMION_ETA and self.c <= 0:
            raise ValueError("fermionic construction requires c > 0")

    @property
    def guard(self) -> float:
        """Half-width of the node guard band (fermionic kind only)."""
        return FERMION_GUARD * self.a

    @property
    def spike_scale(self) -> float:
        """Coefficient of the nu spike: 1 (bosonic) or kappa (fermionic)."""
        if self.kind is Kind.BOSON_DELTA:
            return 1.0
        return (2.0 / self.c) / math.sqrt(self.shapes.spike_mass())


def _tanh_factors(u):
    """tanh-pair building blocks t, t', t'', r = sqrt(delta), r', r'' at u = x/a."""
    t = np.tanh(u)
    uc = np.clip(u, -SATURATION, SATURATION)
    s2 = 1.0 / np.cosh(uc) ** 2  # sech^2, saturates to 0
    r = math.sqrt(0.5) / np.cosh(uc)
    t1 = s2
    t2 = -2.0 * t * s2
    r1 = -t * r
    r2 = r * (2.0 * t * t - 1.0)
    return t, t1, t2, r, r1, r2


def _v012_tanh(spec: RegulatedPotentialSpec, x):
    """(v, v', v'') for the analytic tanh shape pair."""
    a, c, nu = spec.a, spec.c, spec.nu
    u = np.asarray(x, dtype=float) / a
    t, t1, t2, r, r1, r2 = _tanh_factors(u)
    sa = nu * spec.spike_scale / math.sqrt(a)
    if spec.kind is Kind.BOSON_DELTA:
        v = 1.0 + 0.5 * c * a * u * t + sa * r
        dv = 0.5 * c * (t + u * t1) + (sa / a) * r1
        d2v = (0.5 * c / a) * (2.0 * t1 + u * t2) + (sa / a**2) * r2
    else:
        q = t * r
        q1 = r * (1.0 - 2.0 * t * t)
        q2 = r * t * (6.0 * t * t - 5.0)
        v = a * u + (2.0 / c) * t + sa * q
        dv = 1.0 + (2.0 / (c * a)) * t1 + (sa / a) * q1
        d2v = (2.0 / (c * a**2)) * t2 + (sa / a**2) * q2
    return v, dv, d2v


def _v_generic(spec: RegulatedPotentialSpec, x):
    a, c, nu = spec.a, spec.c, spec.nu
    x = np.asarray(x, dtype=float)
    u = x / a
    sig = spec.shapes.sigma(u)
    sq = np.sqrt(spec.shapes.delta(u) / a)
    if spec.kind is Kind.BOSON_DELTA:
        return 1.0 + 0.5 * c * x * sig + nu * sq
    return x + (2.0 / c) * sig + nu * spec.spike_scale * sig * sq


def _v012_generic(spec: RegulatedPotentialSpec, x):
    """(v, v', v'') by 5-point central differences on eval_v."""
    h = GENERIC_FD_STEP * spec.a
    x = np.asarray(x, dtype=float)
    f = [_v_generic(spec, x + k * h) for k in (-2, -1, 0, 1, 2)]
    v = f[2]
    dv = (f[0] - 8.0 * f[1] + 8.0 * f[3] - f[4]) / (12.0 * h)
    d2v = (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h**2)
    return v, dv, d2v


def eval_v_derivatives(spec: RegulatedPotentialSpec, x):
    """Return (v, v', v'') at x (scalar or array)."""
    if spec.shapes.analytic:
        return _v012_tanh(spec, x)
    return _v012_generic(spec, x)


def eval_v(spec: RegulatedPotentialSpec, x):
    """The node-carrying fundamental solution v(x) of the zero-energy equation."""
    if spec.shapes.analytic:
        return eval_v_derivatives(spec, x)[0]
    return _v_generic(spec, x)


def eval_potential(spec: RegulatedPotentialSpec, x):
    """V(x) = v''(x) / v(x).

    For the fermionic kind, x inside the guard band |x| < 1e-3 a around the
    node raises DomainError; use the solver's matching machinery there.
    """
    x = np.asarray(x, dtype=float)
    if spec.kind is Kind.FERMION_ETA and np.any(np.abs(x) < spec.guard):
        raise DomainError(
            f"fermionic potential evaluated inside guard band |x| < {spec.guard:g}"
        )
    v, _, d2v = eval_v_derivatives(spec, x)
    out = d2v / v
    return out if out.ndim else float(out)


def potential_for_ode(spec: RegulatedPotentialSpec, x: float) -> float:
    """Potential evaluation used by ODE right-hand sides.

    Identical to eval_potential away from the fermionic node; inside the guard
    band the potential is frozen at its guard-edge value (V is even and varies
    on scale a, so the error across the 2e-3 a band is negligible).
    """
    if spec.kind is Kind.FERMION_ETA and abs(x) < spec.guard:
        x = spec.guard
    v, _, d2v = eval_v_derivatives(spec, x)
    return float(d2v) / float(v)


def _w_integrand(spec: RegulatedPotentialSpec):
    if spec.kind is Kind.BOSON_DELTA:
        def g(t):
            return 1.0 / eval_v(spec, t) ** 2
        return g

    def g(t):
        if t == 0.0:
            t = spec.guard  # 0/0 limit; integrand is continuous at the node
        v, dv, d2v = eval_v_derivatives(spec, t)
        return float(d2v) / (float(v) * float(dv) ** 2)

    return g


def _check_dv_nonzero(spec: RegulatedPotentialSpec, x: float):
    """Fermionic eval_w requires v' != 0 on the integration path."""
    ts = np.linspace(spec.guard, abs(x), 400) * np.sign(x)
    _, dv, _ = eval_v_derivatives(spec, ts)
    if np.any(dv <= 0) if dv[0] > 0 else np.any(dv >= 0):
        raise QuadratureError(
            "v'(t) changes sign on the integration path; the closed-form "
            "second solution is not valid for these parameters"
        )


def eval_w(spec: RegulatedPotentialSpec, x) -> float:
    """The second zero-energy fundamental solution w(x), by adaptive quadrature.

    Bosonic: w = v(x) * int_0^x dt / v(t)^2 (odd, Wronskian v w' - v' w = 1).
    Fermionic: w = 1/v'(x) + v(x) * int_0^x v''/(v v'^2) (even, Wronskian -1).
    """
    x = float(x)
    if x == 0.0:
        if spec.kind is Kind.BOSON_DELTA:
            return 0.0
        _, dv, _ = eval_v_derivatives(spec, 0.0)
        return 1.0 / float(dv)
    if spec.kind is Kind.FERMION_ETA:
        _check_dv_nonzero(spec, x)
    g = _w_integrand(spec)
    pts = [s for s in (spec.a, 3 * spec.a, 10 * spec.a) if s < abs(x)]
    pts = sorted(math.copysign(s, x) for s in pts)
    val, err = quad(g, 0.0, x, points=pts or None, epsrel=1e-11, epsabs=1e-14,
                    limit=300)
    if err > max(1e-10 * abs(val), 1e-12):
        raise QuadratureError(f"w quadrature error estimate {err:g} too large")
    v = float(eval_v(spec, x))
    if spec.kind is Kind.BOSON_DELTA:
        return v * val
    _, dv, _ = eval_v_derivatives(spec, x)
    return 1.0 / float(dv) + v * val


def _cumulative_from_zero(g, grid: np.ndarray, scale: float, order: int = 12):
    """Cumulative integral of g from 0 along a sorted grid containing 0.

    Per-interval Gauss-Legendre with subdivision so no panel is wider than
    scale/4; the integrand is assumed smooth on that scale.
    """
    nodes, weights = np.polynomial.legendre.leggauss(order)
    vals = np.zeros_like(grid)
    i0 = int(np.argmin(np.abs(grid)))
    seg = np.zeros(len(grid) - 1)
    for i in range(len(grid) - 1):
        lo, hi = grid[i], grid[i + 1]
        nsub = max(1, int(math.ceil((hi - lo) / (scale / 4.0))))
        edges = np.linspace(lo, hi, nsub + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        pts = mid[:, None] + half[:, None] * nodes[None, :]
        seg[i] = float(np.sum(half[:, None] * weights[None, :] * g(pts)))
    cum = np.concatenate(([0.0], np.cumsum(seg)))
    return cum - cum[i0]


def fundamental_solutions(spec: RegulatedPotentialSpec, grid: np.ndarray):
    """(v, v', w, w') on a sorted grid, with w by cumulative quadrature.

    The grid need not contain 0; it is inserted internally as the anchor of
    the cumulative integral.
    """
    grid = np.asarray(grid, dtype=float)
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    inserted = 0.0 not in grid
    work = np.sort(np.append(grid, 0.0)) if inserted else grid
    v, dv, _ = eval_v_derivatives(spec, work)
    if spec.kind is Kind.BOSON_DELTA:
        integ = _cumulative_from_zero(
            lambda t: 1.0 / eval_v(spec, t) ** 2, work, spec.a)
        w = v * integ
        dw = dv * integ + 1.0 / v
    else:
        if np.any(dv <= 0):
            raise QuadratureError(
                "v' changes sign on the grid; fermionic w is not defined here")
        def g(t):
            t = np.where(np.abs(t) < spec.guard,
                         np.copysign(spec.guard, np.where(t == 0, 1.0, t)), t)
            vv, dvv, d2vv = eval_v_derivatives(spec, t)
            return d2vv / (vv * dvv**2)
        integ = _cumulative_from_zero(g, work, spec.a)
        w = 1.0 / dv + v * integ
        dw = dv * integ
    if inserted:
        keep = work != 0.0
        return v[keep], dv[keep], w[keep], dw[keep]
    return v, dv, w, dw


def zero_energy_residual(spec: RegulatedPotentialSpec, x_grid: np.ndarray) -> float:
    """Max normalized residual of -f'' + V f = 0 over the grid, f in {v, w}.

    f'' is taken by 5-point finite differences of the evaluators themselves,
    so this is an end-to-end self-test of the closed forms and the quadrature.
    The residual is normalized per function by max(1, max |f''|).
    """
    x_grid = np.asarray(x_grid, dtype=float)
    if spec.kind is Kind.FERMION_ETA and np.any(np.abs(x_grid) < spec.guard):
        raise DomainError("grid enters the fermionic guard band")
    h = 2e-3 * spec.a
    V = eval_potential(spec, x_grid)
    worst = 0.0
    stencil = np.concatenate([x_grid + k * h for k in (-2, -1, 0, 1, 2)])
    order = np.argsort(stencil)
    v_all, _, w_all, _ = fundamental_solutions(spec, np.unique(stencil[order]))
    uniq = np.unique(stencil[order])
    pos = {x: i for i, x in enumerate(uniq)}
    for f_all in (v_all, w_all):
        fk = [np.array([f_all[pos[x + k * h]] for x in x_grid])
              for k in (-2, -1, 0, 1, 2)]
        d2 = (-fk[0] + 16 * fk[1] - 30 * fk[2] + 16 * fk[3] - fk[4]) / (12 * h**2)
        resid = np.max(np.abs(-d2 + V * fk[2]))
        worst = max(worst, resid / max(1.0, np.max(np.abs(d2))))
    return worst
