"""Chains of energy-dependent pointlike interactions and their continuum limit.

An envelope potential on the ring is discretized into N sites; each site
carries a jump matrix [[1, 0], [c_n - E nu_n^2, 1]] and free propagation in
between, so the periodic spectrum is encoded in the trace of the ordered
transfer-matrix product.  With midpoint site placement the spectrum
converges at second order in 1/N to the nonlinear eigenproblem
-psi'' + V(x)(1 - E nu^2) psi = E psi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq, minimize_scalar

from .errors import BracketError

__all__ = [
    "ChainSpec",
    "free_propagation",
    "jump_matrix",
    "ring_trace",
    "solve_chain_spectrum",
    "solve_continuum",
    "convergence_table",
    "periodic_eigenvalues",
]

TOUCH_TOL = 1e-7          # |trace - 2| below this at a local max counts double
MATRIX_OVERFLOW = 1e300


@dataclass(frozen=True)
class ChainSpec:
    """N-site discretization of an envelope potential on the ring.

    Sites x_n = -L/2 + (n - 1/2) L/N carry couplings c_n = (L/N) V(x_n) and
    nu_n^2 = (L/N) nu^2 V(x_n).
    """

    N: int
    envelope: Callable[[np.ndarray], np.ndarray]
    nu: float
    L: float
    sites: np.ndarray = field(init=False, repr=False)
    couplings: np.ndarray = field(init=False, repr=False)
    nu2: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if self.L <= 0 or self.nu < 0:
            raise ValueError("need L > 0 and nu >= 0")
        n = np.arange(1, self.N + 1)
        x = -self.L / 2.0 + (n - 0.5) * self.L / self.N
        env = np.asarray(self.envelope(x), dtype=float)
        if np.any(env < 0):
            raise ValueError("envelope must be nonnegative at all sites")
        object.__setattr__(self, "sites", x)
        object.__setattr__(self, "couplings", self.L / self.N * env)
        object.__setattr__(self, "nu2", self.L / self.N * self.nu**2 * env)


def free_propagation(E: float, d: float) -> np.ndarray:
    """Unimodular map of (psi, psi') across a potential-free segment."""
    if E > 1e-12:
        k = math.sqrt(E)
        return np.array([[math.cos(k * d), math.sin(k * d) / k],
                         [-k * math.sin(k * d), math.cos(k * d)]])
    if E < -1e-12:
        q = math.sqrt(-E)
        return np.array([[math.cosh(q * d), math.sinh(q * d) / q],
                         [q * math.sinh(q * d), math.cosh(q * d)]])
    return np.array([[1.0, d], [0.0, 1.0]])


def jump_matrix(coefficient: float) -> np.ndarray:
    return np.array([[1.0, 0.0], [coefficient, 1.0]])


def ring_trace(chain: ChainSpec, E: float) -> float:
    """Trace of the ordered product of N (jump * propagate) matrices.

    The trace is cyclic, so the starting site is irrelevant; periodic
    eigenvalues are the roots of trace(E) - 2.
    """
    d = chain.L / chain.N
    prop = free_propagation(E, d)
    T = np.eye(2)
    with np.errstate(over="ignore"):
        for cn, n2 in zip(chain.couplings, chain.nu2):
            T = jump_matrix(cn - E * n2) @ prop @ T
            if not np.all(np.abs(T) < MATRIX_OVERFLOW):
                raise OverflowError(
                    "transfer-matrix product overflow (deep forbidden E)")
    return float(np.trace(T))


def periodic_eigenvalues(trace_fn: Callable[[float], float], e_min: float,
                         e_max: float, count: int, scan_step: float,
                         touch_tol: float = TOUCH_TOL) -> list[float]:
    """Roots of trace(E) = 2 on [e_min, e_max], degenerate touches counted twice.

    Sign changes of f = trace - 2 are refined by bisection; local maxima of f
    are refined and classified: f* > touch_tol yields two transversal roots,
    |f*| <= touch_tol a doubly degenerate eigenvalue.
    """
    cache: dict[int, float] = {}

    def f(E):
        return trace_fn(E) - 2.0

    n = max(8, int(math.ceil((e_max - e_min) / scan_step)))
    grid = np.linspace(e_min, e_max, n + 1)

    def fval(i):
        if i not in cache:
            cache[i] = f(grid[i])
        return cache[i]

    roots: list[float] = []

    def bisect(lo, hi, flo):
        # Brent refinement; flo is kept for signature compatibility with the
        # scan loop (the bracket sign change is already established)
        return float(brentq(f, lo, hi, xtol=1e-12))

    i = 0
    while i < len(grid) - 1 and len(roots) < count:
        a, b = grid[i], grid[i + 1]
        fa, fb = fval(i), fval(i + 1)
        if fa == 0.0:
            roots.append(a)
        elif (fa < 0) != (fb < 0):
            roots.append(bisect(a, b, fa))
        elif (0 < i < len(grid) - 2 and fa < 0 and fb < 0
              and fval(i - 1) < fa and fval(i + 2) < fb
              and max(fa, fb) > -0.5):
            # interior local maximum close to zero: touch or unresolved pair
            res = minimize_scalar(lambda E: -f(E), bounds=(grid[i - 1], grid[i + 2]),
                                  method="bounded",
                                  options={"xatol": 1e-12 * max(1.0, abs(b))})
            e_star, f_star = float(res.x), -float(res.fun)
            if f_star > touch_tol:
                roots.append(bisect(grid[i - 1], e_star, f(grid[i - 1])))
                roots.append(bisect(e_star, grid[i + 2], f_star))
            elif f_star > -touch_tol:
                roots.extend([e_star, e_star])
            i += 2
            continue
        i += 1
    if len(roots) < count:
        raise BracketError(
            f"found {len(roots)} of {count} periodic eigenvalues in "
            f"[{e_min:g}, {e_max:g}]")
    return sorted(roots)[:count]


def _scan_window(L: float, count: int):
    e_min = -10.0 / L**2
    e_max = (2.0 * math.pi * (count + 5) / L) ** 2
    step = 0.5 * (math.pi / L) ** 2
    return e_min, e_max, step


def solve_chain_spectrum(chain: ChainSpec, count: int,
                         e_min: float | None = None,
                         e_max: float | None = None) -> list[float]:
    """First `count` periodic eigenvalues of the N-site chain."""
    if count < 1:
        raise ValueError("count must be >= 1")
    lo, hi, step = _scan_window(chain.L, count)
    if e_min is not None:
        lo = e_min
    if e_max is not None:
        hi = e_max
    return periodic_eigenvalues(lambda E: ring_trace(chain, E), lo, hi,
                                count, step)


def _monodromy_trace(envelope, nu: float, L: float, E: float) -> float:
    """Trace of the monodromy of -psi'' + V(x)(1 - E nu^2) psi = E psi."""
    factor = 1.0 - E * nu**2

    def rhs(x, y):
        v = float(envelope(x))
        return [y[1], (v * factor - E) * y[0],
                y[3], (v * factor - E) * y[2]]

    sol = solve_ivp(rhs, (-L / 2.0, L / 2.0), [1.0, 0.0, 0.0, 1.0],
                    method="RK45", rtol=1e-9, atol=1e-11)
    if not sol.success:
        raise RuntimeError(f"monodromy integration failed: {sol.message}")
    y = sol.y[:, -1]
    return float(y[0] + y[3])


def solve_continuum(envelope, nu: float, L: float, count: int) -> list[float]:
    """First `count` eigenvalues of the nonlinear continuum eigenproblem.

    E enters the coupling through (1 - E nu^2); for nu > 0 the effective
    potential flips sign at E = 1/nu^2, which is scanned across without
    special treatment (the trace stays analytic in E).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    lo, hi, step = _scan_window(L, count)
    return periodic_eigenvalues(
        lambda E: _monodromy_trace(envelope, nu, L, E), lo, hi, count, step)


@dataclass
class ConvergenceEntry:
    N: int
    eigenvalues: list[float]
    max_error: float
    order: float | None  # log2 of successive error ratio (needs N-doubling)


def convergence_table(envelope, nu: float, L: float, N_list: Sequence[int],
                      count: int) -> list[ConvergenceEntry]:
    """Worst-case eigenvalue error of the N-site chain against the continuum."""
    if list(N_list) != sorted(N_list):
        raise ValueError("N_list must be increasing")
    reference = np.array(solve_continuum(envelope, nu, L, count))
    rows: list[ConvergenceEntry] = []
    prev_err = None
    for N in N_list:
        chain = ChainSpec(N=N, envelope=envelope, nu=nu, L=L)
        ev = np.array(solve_chain_spectrum(chain, count))
        err = float(np.max(np.abs(ev - reference)))
        order = (math.log2(prev_err / err)
                 if prev_err is not None and err > 0 else None)
        rows.append(ConvergenceEntry(N=N, eigenvalues=list(ev),
                                     max_error=err, order=order))
        prev_err = err
    return rows
