"""Chebyshev-Lobatto collocation of the singular ODE on [-1, 1].

The grid keeps both endpoints as explicit rows so the regular-limit
boundary conditions occupy the first and last equations; the factor
(1 - t^2) multiplying the second derivative vanishes there, which is
exactly the degeneration the endpoint rows resolve.  Weighted inner
products of node vectors are evaluated by barycentric interpolation onto
a Gauss-Jacobi rule for the weight (1 - t^2)^((n-2)/2).

Grids and systems are immutable after construction and safe to share
across threads; all assembly routines are pure functions of their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gegenbauer import gauss_jacobi_rule, gegenbauer_eval
from .model import ModelParams, PositivityError, reduction_factor

__all__ = [
    "SpectralGrid",
    "DiscreteSystem",
    "SolutionPoint",
    "build_grid",
    "interpolation_matrix",
    "interpolate",
    "assemble_residual",
    "assemble_jacobian",
    "dresidual_dlambda",
    "linear_operator",
    "linear_spectrum",
    "nodal_count",
    "sigma_min",
    "solution_point",
]


@dataclass(frozen=True)
class SpectralGrid:
    """Chebyshev-Lobatto nodes cos(j pi / N), decreasing from +1 to -1.

    ``d1`` and ``d2`` are dense differentiation operators, exact on
    polynomials of degree <= N; their rows annihilate constants.
    """

    N: int
    nodes: np.ndarray
    d1: np.ndarray
    d2: np.ndarray

    def __post_init__(self):
        for a in (self.nodes, self.d1, self.d2):
            a.setflags(write=False)


def build_grid(N: int) -> SpectralGrid:
    """Build the Lobatto grid and differentiation operators of degree N."""
    if N < 2:
        raise ValueError(f"polynomial degree must be >= 2, got {N}")
    j = np.arange(N + 1)
    x = np.cos(np.pi * j / N)
    c = np.hstack([2.0, np.ones(N - 1), 2.0]) * (-1.0) ** j
    dx = x[:, None] - x[None, :]
    D = np.outer(c, 1.0 / c) / (dx + np.eye(N + 1))
    # negative-sum trick: constants must differentiate to zero exactly
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    D2 = D @ D
    np.fill_diagonal(D2, 0.0)
    np.fill_diagonal(D2, -D2.sum(axis=1))
    return SpectralGrid(N=N, nodes=x, d1=D, d2=D2)


def _bary_weights(grid: SpectralGrid) -> np.ndarray:
    w = (-1.0) ** np.arange(grid.N + 1)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def interpolation_matrix(grid: SpectralGrid, targets) -> np.ndarray:
    """Matrix mapping node values to interpolant values at the targets."""
    t = np.atleast_1d(np.asarray(targets, dtype=float))
    if np.any(np.abs(t) > 1 + 1e-12):
        raise ValueError("interpolation targets must lie in [-1, 1]")
    t = np.clip(t, -1.0, 1.0)
    w = _bary_weights(grid)
    diff = t[:, None] - grid.nodes[None, :]
    hit = np.abs(diff) < 1e-14
    diff[hit] = 1.0
    M = w[None, :] / diff
    M /= M.sum(axis=1)[:, None]
    rows = np.any(hit, axis=1)
    M[rows] = 0.0
    M[np.where(hit)] = 1.0
    return M


def interpolate(grid: SpectralGrid, phi: np.ndarray, t):
    """Barycentric interpolant of node values phi at t (scalar or array)."""
    scalar = np.ndim(t) == 0
    vals = interpolation_matrix(grid, t) @ np.asarray(phi, dtype=float)
    return float(vals[0]) if scalar else vals


@dataclass(frozen=True)
class DiscreteSystem:
    """Grid plus parameters, with the quadrature machinery precomputed.

    Residual rows follow the reduced ODE at interior nodes and its regular
    limit at the two endpoint nodes.
    """

    grid: SpectralGrid
    params: ModelParams
    quad_points: int | None = None
    _qnodes: np.ndarray = field(init=False, repr=False)
    _qweights: np.ndarray = field(init=False, repr=False)
    _interp: np.ndarray = field(init=False, repr=False)
    _basis: dict = field(init=False, repr=False, default_factory=dict)

    def __post_init__(self):
        m = self.quad_points if self.quad_points else self.grid.N + 1
        rule = gauss_jacobi_rule(m, self.params.n)
        E = interpolation_matrix(self.grid, rule.nodes)
        E.setflags(write=False)
        object.__setattr__(self, "_qnodes", rule.nodes)
        object.__setattr__(self, "_qweights", rule.weights)
        object.__setattr__(self, "_interp", E)

    def inner(self, u: np.ndarray, v: np.ndarray) -> float:
        """Weighted inner product of two node-value vectors."""
        return float(np.dot(self._qweights, (self._interp @ u) * (self._interp @ v)))

    def norm(self, u: np.ndarray) -> float:
        return np.sqrt(max(self.inner(u, u), 0.0))

    def basis(self, k: int) -> np.ndarray:
        """Samples of P_{k,n} on the grid (cached)."""
        if k not in self._basis:
            v = gegenbauer_eval(k, self.params.n, self.grid.nodes)
            v.setflags(write=False)
            self._basis[k] = v
        return self._basis[k]

    def inner_gradient(self, v: np.ndarray) -> np.ndarray:
        """Row vector r with r @ u == inner(u, v) for every u."""
        return self._qweights @ (self._interp * (self._interp @ v)[:, None])


def _check_phi(phi, grid):
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (grid.N + 1,):
        raise ValueError(f"profile must have {grid.N + 1} entries, got {phi.shape}")
    u = phi + 1.0
    if np.any(u <= 0):
        bad = int(np.argmin(u))
        raise PositivityError(
            f"u = phi + 1 is not positive at node {bad} (t = {grid.nodes[bad]:.6f})"
        )
    return phi, u


def assemble_residual(phi, lam: float, sys: DiscreteSystem) -> np.ndarray:
    """Residual vector: ODE at interior nodes, regular limit at t = +/-1."""
    grid, params = sys.grid, sys.params
    phi, u = _check_phi(phi, grid)
    mu = reduction_factor(lam, params)
    x = grid.nodes
    dphi = grid.d1 @ phi
    bracket = u ** (params.q - 1) - u
    r = (1 - x**2) * (grid.d2 @ phi) - params.n * x * dphi + mu * bracket
    r[0] = -params.n * dphi[0] + mu * bracket[0]
    r[-1] = params.n * dphi[-1] + mu * bracket[-1]
    return r


def assemble_jacobian(phi, lam: float, sys: DiscreteSystem) -> np.ndarray:
    """Analytic derivative of assemble_residual in phi."""
    grid, params = sys.grid, sys.params
    phi, u = _check_phi(phi, grid)
    mu = reduction_factor(lam, params)
    x = grid.nodes
    dz = mu * ((params.q - 1) * u ** (params.q - 2) - 1.0)
    J = (1 - x**2)[:, None] * grid.d2 - params.n * x[:, None] * grid.d1
    J[0] = -params.n * grid.d1[0]
    J[-1] = params.n * grid.d1[-1]
    J[np.arange(grid.N + 1), np.arange(grid.N + 1)] += dz
    return J


def dresidual_dlambda(phi, lam: float, sys: DiscreteSystem) -> np.ndarray:
    """Derivative of the residual in lambda (the bracket over 1 + 1/delta)."""
    phi, u = _check_phi(phi, sys.grid)
    return (u ** (sys.params.q - 1) - u) / (1 + 1 / sys.params.delta)


def linear_operator(sys: DiscreteSystem) -> np.ndarray:
    """Rows of (1-t^2) d^2 - n t d with regular-limit endpoint rows."""
    grid, n = sys.grid, sys.params.n
    x = grid.nodes
    L = (1 - x**2)[:, None] * grid.d2 - n * x[:, None] * grid.d1
    L[0] = -n * grid.d1[0]
    L[-1] = n * grid.d1[-1]
    return L


def linear_spectrum(sys: DiscreteSystem, count: int) -> np.ndarray:
    """Smallest ``count`` eigenvalues of -[(1-t^2) v'' - n t v'].

    The exact values are j(j + n - 1); the discrete operator reproduces
    them to rounding because the eigenfunctions are polynomials of degree
    j <= N.
    """
    if count > sys.grid.N - 1:
        raise ValueError(f"count must be <= N - 1 = {sys.grid.N - 1}")
    ev = np.linalg.eigvals(-linear_operator(sys))
    # the operator is similar to a self-adjoint one; discard rounding noise
    ev = np.real(ev[np.abs(ev.imag) <= 1e-6 * (1 + np.abs(ev.real))])
    ev.sort()
    return ev[:count]


def sigma_min(J: np.ndarray) -> float:
    """Smallest-magnitude eigenvalue of J, with its sign.

    J is similar to a self-adjoint operator in the weighted product, so
    its spectrum is real up to rounding.
    """
    J = np.asarray(J, dtype=float)
    if J.ndim != 2 or J.shape[0] != J.shape[1]:
        raise ValueError("J must be a square matrix")
    ev = np.linalg.eigvals(J)
    return float(ev[np.argmin(np.abs(ev))].real)


def nodal_count(grid: SpectralGrid, phi) -> int:
    """Sign-change zeros of the interpolant of phi on (-1, 1).

    Scans a refinement grid of 8N points, ignores values inside the dead
    band 1e-9 * max|phi| (tangential touches do not count), and confirms
    each candidate sign change by bisection.
    """
    phi = np.asarray(phi, dtype=float)
    scale = np.max(np.abs(phi))
    if scale == 0.0:
        return 0
    tau = 1e-9 * scale
    fine = np.linspace(-1.0, 1.0, 8 * grid.N + 1)[1:-1]
    vals = interpolation_matrix(grid, fine) @ phi
    live = np.abs(vals) > tau
    idx = np.where(live)[0]
    if idx.size < 2:
        return 0
    signs = np.sign(vals[idx])
    changes = np.where(signs[1:] * signs[:-1] < 0)[0]
    count = 0
    for c in changes:
        lo, hi = fine[idx[c]], fine[idx[c + 1]]
        flo = vals[idx[c]]
        while hi - lo > 1e-14:
            mid = 0.5 * (lo + hi)
            fm = interpolate(grid, phi, mid)
            if abs(fm) <= tau:
                break
            if (fm > 0) == (flo > 0):
                lo, flo = mid, fm
            else:
                hi = mid
        count += 1
    return count


def solution_point(sys: DiscreteSystem, phi, lam, k=None, J=None) -> "SolutionPoint":
    """Assemble the standard diagnostics for a converged profile."""
    phi = np.asarray(phi, dtype=float)
    if J is None:
        J = assemble_jacobian(phi, lam, sys)
    if k is None:
        s = float("nan")
    else:
        p = sys.basis(k)
        s = sys.inner(phi, p) / sys.inner(p, p)
    return SolutionPoint(
        phi=phi,
        lam=float(lam),
        s_coord=s,
        nodal_count=nodal_count(sys.grid, phi),
        sigma_min=sigma_min(J),
        u_min=float(1.0 + phi.min()),
    )


@dataclass(frozen=True)
class SolutionPoint:
    """One discretized solution: profile, lambda, and diagnostics."""

    phi: np.ndarray
    lam: float
    s_coord: float
    nodal_count: int
    sigma_min: float
    u_min: float

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=float)
        phi.setflags(write=False)
        object.__setattr__(self, "phi", phi)
