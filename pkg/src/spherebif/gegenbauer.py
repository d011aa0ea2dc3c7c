"""Zonal ultraspherical (Gegenbauer) polynomial machinery.

The polynomials P_{k,n} used throughout are the Jacobi family with
alpha = beta = (n-2)/2, rescaled so that P_{k,n}(1) = 1.  They are the
degree-k zonal spherical harmonics on S^n in the variable t = cos(theta)
and are orthogonal against the weight (1 - t^2)^((n-2)/2) on [-1, 1].

Evaluation uses the three-term recurrence

    (k + n - 1) P_{k+1} = (2k + n - 1) t P_k - k P_{k-1},

which preserves the unit normalization at t = 1 exactly.  Explicitly
P_{0,n} = 1, P_{1,n} = t, P_{2,n} = ((n+1) t^2 - 1) / n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.linalg import eigh_tridiagonal

__all__ = [
    "JacobiParams",
    "QuadratureRule",
    "CoeffExpansion",
    "GasperDiagnostics",
    "gauss_jacobi_rule",
    "gegenbauer_eval",
    "gegenbauer_deriv",
    "gegenbauer_zeros",
    "weighted_inner",
    "gegenbauer_norm2",
    "cube_integral",
    "linearization_coeffs",
    "gasper_recurrence_report",
]

# tolerance for accepting |t| marginally above 1 (rounding in inner products
# of unit vectors); larger excursions are rejected as domain errors
_T_SLACK = 1e-12


@dataclass(frozen=True)
class JacobiParams:
    """Exponent pair of the Jacobi weight (1-t)^alpha (1+t)^beta."""

    alpha: float
    beta: float

    def __post_init__(self):
        if self.alpha <= -1 or self.beta <= -1:
            raise ValueError("Jacobi exponents must exceed -1")

    @classmethod
    def ultraspherical(cls, n: int) -> "JacobiParams":
        """Exponents for the zonal weight on S^n: alpha = beta = (n-2)/2."""
        if n < 2:
            raise ValueError(f"sphere dimension must be >= 2, got {n}")
        a = (n - 2) / 2.0
        return cls(a, a)


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss rule: nodes interior to (-1, 1), weights positive."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise ValueError("nodes and weights must be 1-d arrays of equal length")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("quadrature nodes must be strictly increasing")
        if nodes[0] <= -1 or nodes[-1] >= 1:
            raise ValueError("quadrature nodes must lie inside (-1, 1)")
        if np.any(weights <= 0):
            raise ValueError("quadrature weights must be positive")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def integrate(self, f) -> float:
        """Apply the rule to a callable f(t)."""
        return float(np.dot(self.weights, f(self.nodes)))


def _weight_mass(n: int) -> float:
    # integral of (1-t^2)^((n-2)/2) over [-1, 1]
    return math.sqrt(math.pi) * math.gamma(n / 2.0) / math.gamma((n + 1) / 2.0)


def gauss_jacobi_rule(m: int, n: int) -> QuadratureRule:
    """m-point Gauss rule for the weight (1-t^2)^((n-2)/2) on [-1, 1].

    Golub-Welsch: the nodes are eigenvalues of the symmetric tridiagonal
    matrix built from the three-term recurrence, the weights come from the
    first eigenvector components.  Exact for polynomials of degree
    <= 2m - 1 against the weight.
    """
    if m < 1:
        raise ValueError(f"point count must be >= 1, got {m}")
    if n < 2:
        raise ValueError(f"sphere dimension must be >= 2, got {n}")
    j = np.arange(1, m, dtype=float)
    # monic recurrence p_{j+1} = t p_j - b_j p_{j-1} for the zonal weight
    b = j * (j + n - 2) / ((2 * j + n - 1) * (2 * j + n - 3))
    nodes, vecs = eigh_tridiagonal(np.zeros(m), np.sqrt(b))
    weights = _weight_mass(n) * vecs[0] ** 2
    # enforce the exact symmetry of the rule about t = 0
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    return QuadratureRule(nodes, weights)


def _check_t(t):
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1 + _T_SLACK):
        raise ValueError("evaluation point outside [-1, 1]")
    return np.clip(t, -1.0, 1.0)


def _check_mode(k: int, n: int):
    if k < 0:
        raise ValueError(f"mode index must be >= 0, got {k}")
    if n < 2:
        raise ValueError(f"sphere dimension must be >= 2, got {n}")


def gegenbauer_eval(k: int, n: int, t):
    """Evaluate P_{k,n}(t), normalized so P_{k,n}(1) = 1.

    Accepts scalar or array t with |t| <= 1.
    """
    _check_mode(k, n)
    t = _check_t(t)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    prev = np.ones_like(t)
    if k == 0:
        return float(prev[0]) if scalar else prev
    cur = t.copy()
    for j in range(1, k):
        prev, cur = cur, ((2 * j + n - 1) * t * cur - j * prev) / (j + n - 1)
    return float(cur[0]) if scalar else cur


def gegenbauer_deriv(k: int, n: int, t):
    """Derivative of P_{k,n} in t, by differentiating the recurrence."""
    _check_mode(k, n)
    t = _check_t(t)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    p_prev, p_cur = np.ones_like(t), t.copy()
    d_prev, d_cur = np.zeros_like(t), np.ones_like(t)
    if k == 0:
        return float(d_prev[0]) if scalar else d_prev
    for j in range(1, k):
        c1, c2 = 2 * j + n - 1, j + n - 1
        p_next = (c1 * t * p_cur - j * p_prev) / c2
        d_next = (c1 * (p_cur + t * d_cur) - j * d_prev) / c2
        p_prev, p_cur = p_cur, p_next
        d_prev, d_cur = d_cur, d_next
    return float(d_cur[0]) if scalar else d_cur


def gegenbauer_zeros(k: int, n: int) -> np.ndarray:
    """All k zeros of P_{k,n}, sorted, inside (-1, 1).

    The zeros of consecutive modes interlace, so the zeros of mode j - 1
    together with the endpoints bracket exactly one zero of mode j each.
    Newton refinement runs inside each bracket with bisection as fallback.
    """
    _check_mode(k, n)
    if k < 1:
        raise ValueError("mode index must be >= 1 for zeros")
    zeros = np.array([0.0])
    for j in range(2, k + 1):
        lo = np.concatenate([[-1.0], zeros])
        hi = np.concatenate([zeros, [1.0]])
        zeros = _refine_zeros(j, n, lo, hi)
    # zeros come in +/- pairs; symmetrize to kill rounding drift
    zeros = 0.5 * (zeros - zeros[::-1])
    return zeros


def _eval_and_deriv(k, n, t):
    p_prev, p_cur = np.ones_like(t), t.copy()
    d_prev, d_cur = np.zeros_like(t), np.ones_like(t)
    for j in range(1, k):
        c1, c2 = 2 * j + n - 1, j + n - 1
        p_next = (c1 * t * p_cur - j * p_prev) / c2
        d_next = (c1 * (p_cur + t * d_cur) - j * d_prev) / c2
        p_prev, p_cur = p_cur, p_next
        d_prev, d_cur = d_cur, d_next
    return p_cur, d_cur


def _refine_zeros(k, n, lo, hi):
    """Bracketed Newton on every zero of mode k at once."""
    lo, hi = lo.copy(), hi.copy()
    flo, _ = _eval_and_deriv(k, n, lo)
    flo[lo == -1.0] = (-1.0) ** k
    x = 0.5 * (lo + hi)
    for _ in range(100):
        f, df = _eval_and_deriv(k, n, x)
        same = (f > 0) == (flo > 0)
        lo = np.where(same, x, lo)
        flo = np.where(same, f, flo)
        hi = np.where(same, hi, x)
        step = f / np.where(df == 0, 1.0, df)
        x_new = x - step
        outside = (x_new <= lo) | (x_new >= hi) | (df == 0)
        x_new = np.where(outside, 0.5 * (lo + hi), x_new)
        if np.max(np.abs(x_new - x)) < 1e-15:
            return x_new
        x = x_new
    return x


def weighted_inner(f, g, n: int, m: int) -> float:
    """Inner product int f g (1-t^2)^((n-2)/2) dt by m-point quadrature.

    f and g are callables on [-1, 1].  Exact when f*g is a polynomial of
    degree <= 2m - 1.
    """
    rule = gauss_jacobi_rule(m, n)
    return float(np.dot(rule.weights, f(rule.nodes) * g(rule.nodes)))


def gegenbauer_norm2(k: int, n: int) -> float:
    """Squared weighted norm of P_{k,n} (quadrature-exact)."""
    rule = gauss_jacobi_rule(k + 1, n)
    v = gegenbauer_eval(k, n, rule.nodes)
    return float(np.dot(rule.weights, v * v))


def cube_integral(k: int, n: int) -> float:
    """int P_{k,n}^3 (1-t^2)^((n-2)/2) dt.

    Vanishes for odd k by parity and is strictly positive for even k.
    """
    _check_mode(k, n)
    if k < 1:
        raise ValueError("mode index must be >= 1")
    rule = gauss_jacobi_rule(3 * k // 2 + 2, n)
    v = gegenbauer_eval(k, n, rule.nodes)
    return float(np.dot(rule.weights, v**3))


@dataclass(frozen=True)
class CoeffExpansion:
    """Coefficients G_j of P_{k,n}^2 = sum_j G_j P_{j,n}, j = 0..2k."""

    k: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != (2 * self.k + 1,):
            raise ValueError("need 2k + 1 coefficients")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)


def linearization_coeffs(k: int, n: int) -> CoeffExpansion:
    """Expand P_{k,n}^2 over {P_{j,n}} by weighted projection.

    G_j = <P_k^2, P_j>_w / <P_j, P_j>_w.  The coefficients sum to 1
    (evaluate at t = 1) and vanish for odd j by parity.
    """
    _check_mode(k, n)
    if k < 1:
        raise ValueError("mode index must be >= 1")
    rule = gauss_jacobi_rule(2 * k + 2, n)
    sq = gegenbauer_eval(k, n, rule.nodes) ** 2
    coeffs = np.empty(2 * k + 1)
    for j in range(2 * k + 1):
        pj = gegenbauer_eval(j, n, rule.nodes)
        coeffs[j] = np.dot(rule.weights, sq * pj) / np.dot(rule.weights, pj * pj)
    return CoeffExpansion(k, coeffs)


@dataclass(frozen=True)
class GasperDiagnostics:
    """Outcome of running the auxiliary positivity recurrence.

    ``d`` holds the sequence produced by A_j d_{j+1} = B_j d_j - C_j d_{j-1}
    from unit seeds d_0 = d_1 = 1; ``q_sign_changes`` counts sign changes of
    the quartic Q(J) on (0, infinity).  ``projection`` carries the
    ground-truth square-expansion coefficients for comparison, and
    ``consistent_with_projection`` records whether the recurrence's
    positivity pattern agrees with theirs.  Diagnostic only: disagreement
    is reported, never raised, and the projection route always wins.
    """

    k: int
    n: int
    d: np.ndarray
    all_d_positive: bool
    q_sign_changes: int
    projection: CoeffExpansion
    projection_positive: bool
    consistent_with_projection: bool


def _gasper_abc(k, n, j):
    a = (j + 1) * (2 * j + n) * (2 * k + j + 2 * (n - 1)) * (2 * k - j)
    b = j * (2 * k + j - 1 + 2 * (n - 1)) * (2 * k - j + 1) * (2 * j)
    c = (
        (j + n - 2)
        * (2 * j + n - 2)
        * (2 * j + n - 1)
        * (2 * k + j - 1 + 2 * (n - 1))
        * (2 * k - j + 1)
    )
    return float(a), float(b), float(c)


def _q_poly_coeffs(k, n):
    # Q(J) = (J+2)^2 (J+2k+2n-1)(2k-J-1)(2J+n) - (J+1)^2 (J+2k+2n-2)(2k-J)(2J+n+2)
    def prod(*factors):
        out = np.array([1.0])
        for f in factors:
            out = npoly.polymul(out, np.asarray(f, dtype=float))
        return out

    first = prod([2, 1], [2, 1], [2 * k + 2 * n - 1, 1], [2 * k - 1, -1], [n, 2])
    second = prod([1, 1], [1, 1], [2 * k + 2 * n - 2, 1], [2 * k, -1], [n + 2, 2])
    return npoly.polysub(first, second)


def gasper_recurrence_report(k: int, n: int) -> GasperDiagnostics:
    """Run the auxiliary d_j recurrence and the Q(J) sign analysis.

    Reports (a) the sign pattern of the d_j generated from unit seeds,
    (b) the number of sign changes of Q(J) on (0, infinity), and (c)
    agreement with the projection-based square-expansion coefficients.
    """
    _check_mode(k, n)
    if k < 1:
        raise ValueError("mode index must be >= 1")
    d = np.empty(2 * k + 1)
    d[0] = d[1] = 1.0
    for j in range(1, 2 * k):
        a, b, c = _gasper_abc(k, n, j)
        d[j + 1] = (b * d[j] - c * d[j - 1]) / a
    all_pos = bool(np.all(d > 0))

    coeffs = _q_poly_coeffs(k, n)
    # Cauchy bound on root magnitudes, then dense sign sampling
    lead = coeffs[-1]
    bound = 1.0 + np.max(np.abs(coeffs[:-1])) / abs(lead)
    grid = np.linspace(1e-9, bound, 200_001)
    vals = npoly.polyval(grid, coeffs)
    signs = np.sign(vals[np.abs(vals) > 0])
    q_changes = int(np.sum(signs[1:] * signs[:-1] < 0))

    proj = linearization_coeffs(k, n)
    g = proj.coeffs
    proj_pos = bool(
        g[0] > 0
        and np.all(g[::2] > -1e-12)
        and np.all(np.abs(g[1::2]) < 1e-10)
    )
    return GasperDiagnostics(
        k=k,
        n=n,
        d=d,
        all_d_positive=all_pos,
        q_sign_changes=q_changes,
        projection=proj,
        projection_positive=proj_pos,
        consistent_with_projection=all_pos == proj_pos,
    )
