"""Exact idealized ring models: eigenmodes, quantization, modified inner products.

The ring [-L/2, L/2] carries a single pointlike interaction at x = 0 with an
energy-dependent connection matrix.  Each kind splits into an interacting
symmetry sector (bosonic even / fermionic odd) and a free one (bosonic odd /
fermionic even).  Quantization conditions are solved in their pole-free
polynomial-in-trig form by bracketing plus bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

from .errors import BracketError, DomainError, QuadratureError
from .regulated import Kind

__all__ = [
    "PointlikeModel",
    "EigenMode",
    "RingFunction",
    "ConnectionMatrix",
    "alpha",
    "quantization_residual",
    "solve_modes",
    "eigenfunction",
    "mode_function",
    "inner_product",
    "standard_product",
    "gram_matrix",
    "energy_functional",
    "two_particle_reduce",
    "TwoParticleReduction",
    "duality_residual",
]

SCAN_STEP_FRACTION = 10  # scan step pi / (SCAN_STEP_FRACTION * L)
BISECT_TOL = 1e-13
DEGENERACY_SLOPE = 1e-8  # |G'(k)| < this * k * L flags a near-double root


@dataclass(frozen=True)
class PointlikeModel:
    """Idealized ring model (kind, c, nu, L) with connection matrix +-[[1,0],[c-E nu^2,1]]."""

    kind: Kind
    c: float
    nu: float
    L: float

    def __post_init__(self):
        if self.L <= 0:
            raise ValueError("ring circumference L must be positive")
        if self.c < 0 or self.nu < 0:
            raise ValueError("c and nu must be nonnegative")
        if self.kind is Kind.FERMION_ETA and self.c == 0 and self.nu == 0:
            raise ValueError("fermionic model with c = nu = 0 has no interaction")

    def interacting_parity(self) -> str:
        return "even" if self.kind is Kind.BOSON_DELTA else "odd"


@dataclass(frozen=True)
class EigenMode:
    """One quantized mode: wavenumber k, parity, alpha(k), normalization, E = k^2."""

    k: float
    parity: str
    alpha: float
    Z: float
    E: float
    interacting: bool
    degenerate: bool = False


class ConnectionMatrix:
    """The 2x2 energy-dependent connection matrix of the model (det = 1)."""

    def __init__(self, model: PointlikeModel):
        self.model = model
        self.sign = 1.0 if model.kind is Kind.BOSON_DELTA else -1.0

    def __call__(self, E: float) -> np.ndarray:
        m = self.model
        return self.sign * np.array([[1.0, 0.0],
                                     [m.c - E * m.nu**2, 1.0]])


def alpha(model: PointlikeModel, k: float) -> float:
    """alpha(k) = c/(2k) - k nu^2 / 2."""
    if k <= 0:
        raise DomainError(f"alpha requires k > 0, got {k}")
    return model.c / (2.0 * k) - k * model.nu**2 / 2.0


def quantization_residual(model: PointlikeModel, k, sector: str = "interacting"):
    """Pole-free quantization function G(k); modes are its positive roots.

    Interacting sectors: bosonic G = 2k sin(kL/2) - (c - k^2 nu^2) cos(kL/2),
    fermionic G = (c - k^2 nu^2) sin(kL/2) + 2k cos(kL/2).  Free sectors:
    sin(kL/2) (bosonic odd) and cos(kL/2) (fermionic even).
    """
    k = np.asarray(k, dtype=float)
    half = k * model.L / 2.0
    if sector == "free":
        out = np.sin(half) if model.kind is Kind.BOSON_DELTA else np.cos(half)
    elif sector == "interacting":
        coeff = model.c - k**2 * model.nu**2
        if model.kind is Kind.BOSON_DELTA:
            out = 2.0 * k * np.sin(half) - coeff * np.cos(half)
        else:
            out = coeff * np.sin(half) + 2.0 * k * np.cos(half)
    else:
        raise ValueError(f"unknown sector {sector!r}")
    return out if out.ndim else float(out)


def _bisect(f, lo, hi, tol=BISECT_TOL):
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo < tol:
            return mid
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (flo < 0) != (fm < 0):
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def _mode_from_k(model: PointlikeModel, k: float, interacting: bool,
                 degenerate: bool = False) -> EigenMode:
    if interacting:
        par = model.interacting_parity()
        al = alpha(model, k)
        Z2 = model.L / 2.0 * (1.0 + al**2) + al / k + model.nu**2
    else:
        par = "odd" if model.kind is Kind.BOSON_DELTA else "even"
        al = 0.0
        Z2 = model.L / 2.0
    return EigenMode(k=k, parity=par, alpha=al, Z=math.sqrt(Z2), E=k * k,
                     interacting=interacting, degenerate=degenerate)


def solve_modes(model: PointlikeModel, count: int,
                sector: str = "interacting") -> list[EigenMode]:
    """First `count` modes of a sector, by sign-change scan plus bisection."""
    if count < 1:
        raise ValueError("count must be >= 1")
    interacting = sector == "interacting"
    modes: list[EigenMode] = []
    if (interacting and model.kind is Kind.BOSON_DELTA and model.c == 0.0
            and model.nu > 0.0):
        # k -> 0 limit of the even interacting branch: the constant mode
        modes.append(EigenMode(k=0.0, parity="even", alpha=0.0,
                               Z=math.sqrt(model.L + model.nu**2), E=0.0,
                               interacting=True))
    g = lambda k: quantization_residual(model, k, sector)
    step = math.pi / (SCAN_STEP_FRACTION * model.L)
    k_max = 2.0 * math.pi * (count + 10) / model.L * 4.0
    k_lo = step * 1e-6
    f_lo = g(k_lo)
    k = k_lo
    while len(modes) < count:
        k_next = k + step
        if k_next > k_max:
            raise BracketError(
                f"scan ceiling {k_max:g} reached with {len(modes)} of {count} roots")
        f_next = g(k_next)
        if f_lo == 0.0 or (f_lo < 0) != (f_next < 0):
            root = _bisect(g, k, k_next)
            h = 1e-7 * max(root, 1.0)
            slope = (g(root + h) - g(root - h)) / (2 * h)
            degenerate = abs(slope) < DEGENERACY_SLOPE * root * model.L
            modes.append(_mode_from_k(model, root, interacting, degenerate))
        k, f_lo = k_next, f_next
    return modes[:count]


def eigenfunction(mode: EigenMode, model: PointlikeModel, x):
    """Normalized eigenfunction of the mode on [-L/2, L/2]."""
    x = np.asarray(x, dtype=float)
    k, al, Z = mode.k, mode.alpha, mode.Z
    if mode.interacting:
        if model.kind is Kind.BOSON_DELTA:
            if k == 0.0:
                out = np.ones_like(x) / Z
            else:
                out = (np.cos(k * x) + al * np.sin(k * np.abs(x))) / Z
        else:
            out = (np.sign(x) * np.cos(k * x) + al * np.sin(k * x)) / Z
    else:
        if model.kind is Kind.BOSON_DELTA:
            out = np.sin(k * x) / Z
        else:
            out = np.sin(k * np.abs(x)) / Z
    return out if out.ndim else float(out)


def eigenfunction_derivative(mode: EigenMode, model: PointlikeModel, x):
    x = np.asarray(x, dtype=float)
    k, al, Z = mode.k, mode.alpha, mode.Z
    if mode.interacting:
        if model.kind is Kind.BOSON_DELTA:
            if k == 0.0:
                out = np.zeros_like(x)
            else:
                out = k * (-np.sin(k * x) + al * np.sign(x) * np.cos(k * x)) / Z
        else:
            out = k * (-np.sign(x) * np.sin(k * x) + al * np.cos(k * x)) / Z
    else:
        if model.kind is Kind.BOSON_DELTA:
            out = k * np.cos(k * x) / Z
        else:
            out = k * np.sign(x) * np.cos(k * x) / Z
    return out if out.ndim else float(out)


@dataclass
class RingFunction:
    """A function on the ring with explicit one-sided data at 0.

    values/derivatives at 0+ and 0- are exact, not limits of samples; the
    modified inner products and the energy functional are built from them.
    """

    f: Callable
    plus0: complex
    minus0: complex
    df: Callable | None = None
    dplus0: complex | None = None
    dminus0: complex | None = None

    def __call__(self, x):
        return self.f(x)

    @property
    def jump(self) -> complex:
        return self.plus0 - self.minus0

    @property
    def mid0(self) -> complex:
        return 0.5 * (self.plus0 + self.minus0)


def mode_function(model: PointlikeModel, mode: EigenMode) -> RingFunction:
    """Wrap an eigenmode as a RingFunction with exact one-sided data."""
    k, al, Z = mode.k, mode.alpha, mode.Z
    if mode.interacting:
        if model.kind is Kind.BOSON_DELTA:
            plus0 = minus0 = 1.0 / Z
            dplus0, dminus0 = ((al * k / Z, -al * k / Z) if k else (0.0, 0.0))
        else:
            plus0, minus0 = 1.0 / Z, -1.0 / Z
            dplus0 = dminus0 = al * k / Z
    else:
        plus0 = minus0 = 0.0
        if model.kind is Kind.BOSON_DELTA:
            dplus0 = dminus0 = k / Z
        else:
            dplus0, dminus0 = k / Z, -k / Z
    return RingFunction(
        f=lambda x: eigenfunction(mode, model, x),
        plus0=plus0, minus0=minus0,
        df=lambda x: eigenfunction_derivative(mode, model, x),
        dplus0=dplus0, dminus0=dminus0)


def _as_ring_function(f, L: float) -> RingFunction:
    if isinstance(f, RingFunction):
        return f
    eps = 1e-9 * L
    return RingFunction(f=f, plus0=complex(f(eps)), minus0=complex(f(-eps)))


def _quad_complex(func, a, b, tol):
    re, re_err = quad(lambda x: np.real(func(x)), a, b, epsabs=tol,
                      epsrel=1e-11, limit=400)
    im, im_err = quad(lambda x: np.imag(func(x)), a, b, epsabs=tol,
                      epsrel=1e-11, limit=400)
    if max(re_err, im_err) > 100 * max(tol, 1e-14 * (abs(re) + abs(im))):
        raise QuadratureError(
            f"inner-product quadrature error {max(re_err, im_err):g} too large")
    return re + 1j * im


def standard_product(model: PointlikeModel, f, g, tol: float = 1e-12) -> complex:
    """The plain L2 product int conj(f) g over the ring."""
    rf, rg = _as_ring_function(f, model.L), _as_ring_function(g, model.L)
    func = lambda x: np.conj(rf(x)) * rg(x)
    half = model.L / 2.0
    return (_quad_complex(func, -half, 0.0, tol)
            + _quad_complex(func, 0.0, half, tol))


def inner_product(model: PointlikeModel, f, g, tol: float = 1e-12) -> complex:
    """The modified inner product under which eigenmodes are orthonormal.

    Bosonic: standard product + nu^2 conj(f(0)) g(0).
    Fermionic: standard product + (nu^2/4) conj(jump f) (jump g).
    """
    rf, rg = _as_ring_function(f, model.L), _as_ring_function(g, model.L)
    base = standard_product(model, rf, rg, tol)
    if model.kind is Kind.BOSON_DELTA:
        point = model.nu**2 * np.conj(rf.mid0) * rg.mid0
    else:
        point = model.nu**2 / 4.0 * np.conj(rf.jump) * rg.jump
    return base + point


def gram_matrix(model: PointlikeModel, modes: Sequence[EigenMode],
                modified: bool = True) -> np.ndarray:
    """Gram matrix of eigenmodes, vectorized over shared Gauss-Legendre panels.

    With modified=True this uses the model's inner product (expected to give
    the identity); with modified=False the standard product, whose off-diagonal
    entries are the signature of the unusual inner-product structure.
    """
    k_max = max(m.k for m in modes) or 1.0
    panel = min(model.L / 8.0, math.pi / (4.0 * k_max))
    half = model.L / 2.0
    nodes, weights = np.polynomial.legendre.leggauss(16)
    xs, ws = [], []
    for lo, hi in ((-half, 0.0), (0.0, half)):
        n = int(math.ceil((hi - lo) / panel))
        edges = np.linspace(lo, hi, n + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        h = 0.5 * (edges[1:] - edges[:-1])
        xs.append((mid[:, None] + h[:, None] * nodes[None, :]).ravel())
        ws.append((h[:, None] * weights[None, :]).ravel())
    x = np.concatenate(xs)
    w = np.concatenate(ws)
    vals = np.array([eigenfunction(m, model, x) for m in modes])
    gram = (vals * w) @ vals.T
    if modified:
        rfs = [mode_function(model, m) for m in modes]
        if model.kind is Kind.BOSON_DELTA:
            p = np.array([rf.mid0 for rf in rfs])
            gram = gram + model.nu**2 * np.outer(np.conj(p), p)
        else:
            j = np.array([rf.jump for rf in rfs])
            gram = gram + model.nu**2 / 4.0 * np.outer(np.conj(j), j)
    return gram


def energy_functional(model: PointlikeModel, f, tol: float = 1e-11) -> float:
    """H(f) = int |f'|^2 + c |f(0)|^2 (bosonic) or + (c/4)|jump f|^2 (fermionic)."""
    rf = _as_ring_function(f, model.L)
    if rf.df is None:
        raise ValueError("energy_functional needs a RingFunction with derivative")
    func = lambda x: np.abs(rf.df(x)) ** 2
    half = model.L / 2.0
    kin = (quad(func, -half, 0.0, epsabs=tol, epsrel=1e-12, limit=500)[0]
           + quad(func, 0.0, half, epsabs=tol, epsrel=1e-12, limit=500)[0])
    if model.kind is Kind.BOSON_DELTA:
        point = model.c * abs(rf.mid0) ** 2
    else:
        point = model.c / 4.0 * abs(rf.jump) ** 2
    return kin + point


@dataclass(frozen=True)
class TwoParticleReduction:
    """Relative-coordinate problem of the two-particle system.

    The center-of-mass wavenumber k carries energy k^2; the relative problem
    sees E_rel = E_total - k^2 and an effective jump coefficient
    c - nu^2 E_rel.  In the two-particle inner product the point term becomes
    the diagonal integral nu^2 int conj(phi)(x, x) psi(x, x) dx.
    """

    model: PointlikeModel
    E_rel: float
    jump_coefficient: float


def two_particle_reduce(model: PointlikeModel, total_momentum: float,
                        E_total: float) -> TwoParticleReduction:
    E_rel = E_total - total_momentum**2
    return TwoParticleReduction(model=model, E_rel=E_rel,
                                jump_coefficient=model.c - model.nu**2 * E_rel)


def duality_residual(boson_model: PointlikeModel, mode: EigenMode) -> float:
    """Violation of the fermionic connection conditions by sgn(x) * psi(x).

    For any even interacting mode of the bosonic model the mapped function
    must satisfy the fermionic matrix -[[1,0],[c - E nu^2, 1]] exactly.
    """
    if boson_model.kind is not Kind.BOSON_DELTA:
        raise ValueError("duality_residual expects a bosonic model")
    if not (mode.interacting and mode.parity == "even"):
        raise ValueError("duality_residual expects an even interacting mode")
    rf = mode_function(boson_model, mode)
    # phi = sgn(x) psi: one-sided data of the mapped function
    phi_p, phi_m = rf.plus0, -rf.minus0
    dphi_p, dphi_m = rf.dplus0, -rf.dminus0
    coeff = boson_model.c - mode.E * boson_model.nu**2
    m = -np.array([[1.0, 0.0], [coeff, 1.0]])
    left = np.array([phi_p, dphi_p])
    right = m @ np.array([phi_m, dphi_m])
    scale = max(1.0, float(np.max(np.abs(right))))
    return float(np.max(np.abs(left - right))) / scale
