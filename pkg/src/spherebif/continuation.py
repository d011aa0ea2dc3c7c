"""Branch tracing and degenerate-solution location.

Nontrivial solution branches leave the trivial family (0, lambda) at each
lambda_k; the kernel direction P_{k,n} and the closed-form slope
dlambda/ds(0) seed the first corrector, and pseudo-arclength continuation
follows the branch through folds.  A solution is degenerate where the
linearization acquires a kernel, i.e. where the smallest-magnitude
eigenvalue of the Jacobian crosses zero; along even-k branches this
happens at the fold in lambda, and bisection in arclength pins it down.

Branch traces are strictly sequential; distinct branches share only
immutable grids and may run concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .collocation import (
    DiscreteSystem,
    SolutionPoint,
    assemble_jacobian,
    assemble_residual,
    dresidual_dlambda,
    sigma_min,
    solution_point,
)
from .model import PositivityError, dlambda_ds0, lambda_k

__all__ = [
    "ConvergenceError",
    "StepRejected",
    "Branch",
    "DegeneracyReport",
    "newton_solve",
    "branch_seed",
    "solve_at_s",
    "arclength_step",
    "trace_branch",
    "locate_degenerate",
    "psi_smallness_check",
]

NEWTON_TOL = 1e-10
MAX_ITER = 30
DS_INIT = 1e-2
DS_MIN = 1e-6
DS_MAX = 0.1
SIGMA_TOL = 1e-6
SEED_AMPLITUDE = 1e-2
# damped-Newton backtracking when an iterate loses positivity
MAX_BACKTRACK = 20


class ConvergenceError(RuntimeError):
    """Newton or corrector iteration failed to converge."""


class StepRejected(RuntimeError):
    """A continuation step was rejected; ``reason`` names the event kind."""

    def __init__(self, reason: str, message: str = ""):
        super().__init__(message or reason)
        self.reason = reason


@dataclass
class Branch:
    """Ordered solution points of one connected branch off (0, lambda_k).

    ``direction`` is the sign of the seed parameter s.  ``events`` holds
    (point index, kind) pairs with kind in {fold, sigma-zero,
    positivity-loss, lambda-floor, step-failure}, plus ``nodal-change``
    markers for rejected steps (a persistent one terminates the branch as
    a step failure).
    """

    k: int
    direction: int
    lambda_origin: float
    points: list = field(default_factory=list)
    events: list = field(default_factory=list)


@dataclass(frozen=True)
class DegeneracyReport:
    """A located degenerate pair (phi*, lambda*) with diagnostics.

    ``s_bracket`` is the final bisection bracket in the projection
    coordinate s; ``branch_lambda_min`` is the running minimum of lambda
    over the traced points, so the relation between the eigenvalue
    crossing and the minimal-lambda point stays observable.
    ``endpoint_derivs`` reports phi'(+1), phi'(-1) of the profile.
    """

    lambda_star: float
    phi_star: np.ndarray
    sigma_at_star: float
    nodal_count: int
    u_min: float
    s_bracket: tuple
    residual_norm: float
    branch_lambda_min: float
    crossing_index: int
    endpoint_derivs: tuple


def _apply_update(phi, lam, dphi, dlam):
    """Damped update: halve the step while positivity fails."""
    step = 1.0
    for _ in range(MAX_BACKTRACK):
        trial_phi = phi + step * dphi
        if np.all(trial_phi > -1.0):
            return trial_phi, lam + step * dlam
        step *= 0.5
    raise ConvergenceError("iterate lost positivity and backtracking failed")


def newton_solve(
    phi0,
    lam: float,
    sys: DiscreteSystem,
    tol: float = NEWTON_TOL,
    max_iter: int = MAX_ITER,
    k: int | None = None,
) -> SolutionPoint:
    """Newton iteration at fixed lambda from the initial profile phi0.

    Returns a SolutionPoint with diagnostics populated; raises
    ConvergenceError after max_iter iterations without meeting the
    residual max-norm tolerance.
    """
    phi = np.asarray(phi0, dtype=float).copy()
    for _ in range(max_iter):
        F = assemble_residual(phi, lam, sys)
        if np.max(np.abs(F)) < tol:
            return solution_point(sys, phi, lam, k=k)
        J = assemble_jacobian(phi, lam, sys)
        try:
            dphi = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(f"singular Jacobian: {exc}") from exc
        phi, lam = _apply_update(phi, lam, dphi, 0.0)
    raise ConvergenceError(
        f"no convergence after {max_iter} iterations at lambda = {lam}"
    )


def branch_seed(k: int, s0: float, sys: DiscreteSystem) -> SolutionPoint:
    """Tangent predictor at parameter s0 for the branch at (0, lambda_k).

    phi = s0 P_{k,n} and lambda = lambda_k + s0 * dlambda/ds(0); feed it to
    the s-normalized corrector (solve_at_s) to land on the branch.
    """
    if s0 == 0:
        raise ValueError("seed parameter s0 must be nonzero")
    phi = s0 * sys.basis(k)
    lam = lambda_k(k, sys.params) + s0 * dlambda_ds0(k, sys.params)
    return solution_point(sys, phi, lam, k=k)


def _bordered_solve(J, flam, wrow, wlam, rtop, rbot):
    m = J.shape[0]
    A = np.zeros((m + 1, m + 1))
    A[:m, :m] = J
    A[:m, -1] = flam
    A[-1, :m] = wrow
    A[-1, -1] = wlam
    rhs = np.empty(m + 1)
    rhs[:m] = rtop
    rhs[-1] = rbot
    try:
        z = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"singular bordered system: {exc}") from exc
    return z[:m], z[-1]


def solve_at_s(
    k: int,
    s: float,
    sys: DiscreteSystem,
    guess: tuple | None = None,
    tol: float = NEWTON_TOL,
    max_iter: int = MAX_ITER,
) -> SolutionPoint:
    """Solve on the branch at projection coordinate s.

    Unknowns are (phi, lambda); the extra equation is the normalization
    <phi, P_{k,n}>_w = s <P_{k,n}, P_{k,n}>_w, which pins the on-branch
    parametrization w(s) = s P_{k,n} + (remainder orthogonal to P_{k,n}).
    """
    p = sys.basis(k)
    p2 = sys.inner(p, p)
    wrow = sys.inner_gradient(p)
    if guess is None:
        phi = s * p
        lam = lambda_k(k, sys.params) + s * dlambda_ds0(k, sys.params)
    else:
        phi = np.asarray(guess[0], dtype=float).copy()
        lam = float(guess[1])
    for _ in range(max_iter):
        F = assemble_residual(phi, lam, sys)
        g = sys.inner(phi, p) - s * p2
        if max(np.max(np.abs(F)), abs(g)) < tol:
            pt = solution_point(sys, phi, lam, k=k)
            return pt
        J = assemble_jacobian(phi, lam, sys)
        flam = dresidual_dlambda(phi, lam, sys)
        dphi, dlam = _bordered_solve(J, flam, wrow, 0.0, -F, -g)
        phi, lam = _apply_update(phi, lam, dphi, dlam)
    raise ConvergenceError(f"no convergence at s = {s}")


def _tangent(sys, phi, lam, ref_phi, ref_lam, J=None):
    """Unit tangent (in the weighted norm) oriented along the reference."""
    if J is None:
        J = assemble_jacobian(phi, lam, sys)
    flam = dresidual_dlambda(phi, lam, sys)
    wrow = sys.inner_gradient(ref_phi)
    tphi, tlam = _bordered_solve(J, flam, wrow, ref_lam, np.zeros(len(phi)), 1.0)
    nrm = np.sqrt(sys.inner(tphi, tphi) + tlam**2)
    tphi, tlam = tphi / nrm, tlam / nrm
    if sys.inner(tphi, ref_phi) + tlam * ref_lam < 0:
        tphi, tlam = -tphi, -tlam
    return tphi, tlam


def arclength_step(
    current: SolutionPoint,
    tangent: tuple,
    ds: float,
    sys: DiscreteSystem,
    k: int | None = None,
    tol: float = NEWTON_TOL,
    max_iter: int = MAX_ITER,
) -> SolutionPoint:
    """One pseudo-arclength step of length ds from a converged point.

    The corrector solves F(phi, lambda) = 0 together with the affine
    constraint <phi - phi_0, t_phi>_w + (lambda - lambda_0) t_lambda = ds.
    The new point is accepted only if its nodal count matches the current
    one and u stays positive; otherwise StepRejected carries the reason.
    """
    tphi, tlam = tangent
    phi0, lam0 = current.phi, current.lam
    phi = phi0 + ds * tphi
    lam = lam0 + ds * tlam
    wrow = sys.inner_gradient(tphi)
    for _ in range(max_iter):
        try:
            F = assemble_residual(phi, lam, sys)
        except PositivityError as exc:
            raise StepRejected("step-failure", str(exc)) from exc
        g = sys.inner(phi - phi0, tphi) + (lam - lam0) * tlam - ds
        if max(np.max(np.abs(F)), abs(g)) < tol:
            J = assemble_jacobian(phi, lam, sys)
            pt = solution_point(sys, phi, lam, k=k, J=J)
            if pt.u_min <= 0:
                raise StepRejected("positivity-loss", f"u_min = {pt.u_min}")
            if pt.nodal_count != current.nodal_count:
                raise StepRejected(
                    "nodal-change",
                    f"nodal count {pt.nodal_count} != {current.nodal_count}",
                )
            return pt
        J = assemble_jacobian(phi, lam, sys)
        flam = dresidual_dlambda(phi, lam, sys)
        try:
            dphi, dlam = _bordered_solve(J, flam, wrow, tlam, -F, -g)
            phi, lam = _apply_update(phi, lam, dphi, dlam)
        except ConvergenceError as exc:
            raise StepRejected("step-failure", str(exc)) from exc
    raise StepRejected("step-failure", f"corrector stalled at ds = {ds}")


def trace_branch(
    k: int,
    direction: int,
    sys: DiscreteSystem,
    lambda_floor: float | None = None,
    max_points: int = 400,
    s_max: float | None = None,
    s0: float = SEED_AMPLITUDE,
    ds_init: float = DS_INIT,
    ds_min: float = DS_MIN,
    ds_max: float = DS_MAX,
    tol: float = NEWTON_TOL,
    max_iter: int = MAX_ITER,
) -> Branch:
    """Trace the branch D_k^+ (direction=+1) or D_k^- (direction=-1).

    Stops on the lambda floor, the point budget, |s| > s_max, loss of
    positivity, or a terminal step failure; every recorded point carries
    the full diagnostics and the branch keeps a constant nodal count.
    """
    if k < 1:
        raise ValueError(f"mode index must be >= 1, got {k}")
    if direction not in (-1, 1):
        raise ValueError(f"direction must be -1 or +1, got {direction}")
    lam_k = lambda_k(k, sys.params)
    if lambda_floor is None:
        lambda_floor = 1e-3 * lambda_k(1, sys.params)
    branch = Branch(k=k, direction=direction, lambda_origin=lam_k)

    seed = branch_seed(k, direction * s0, sys)
    first = solve_at_s(k, direction * s0, sys, guess=(seed.phi, seed.lam),
                       tol=tol, max_iter=max_iter)
    branch.points.append(first)

    # reference direction: the secant back to the bifurcation point
    tphi, tlam = _tangent(sys, first.phi, first.lam, first.phi,
                          first.lam - lam_k)
    ds = ds_init
    prev_dlam = first.lam - lam_k
    while len(branch.points) < max_points:
        current = branch.points[-1]
        try:
            nxt = arclength_step(current, (tphi, tlam), ds, sys, k=k,
                                 tol=tol, max_iter=max_iter)
        except StepRejected as exc:
            idx = len(branch.points) - 1
            if exc.reason == "positivity-loss":
                branch.events.append((idx, "positivity-loss"))
                break
            if exc.reason == "nodal-change":
                branch.events.append((idx, "nodal-change"))
            ds *= 0.5
            if ds < ds_min:
                branch.events.append((idx, "step-failure"))
                break
            continue
        branch.points.append(nxt)
        idx = len(branch.points) - 1
        dlam = nxt.lam - current.lam
        if prev_dlam != 0 and dlam != 0 and np.sign(dlam) != np.sign(prev_dlam):
            branch.events.append((idx, "fold"))
        prev_dlam = dlam
        if current.sigma_min != 0 and np.sign(nxt.sigma_min) != np.sign(current.sigma_min):
            branch.events.append((idx, "sigma-zero"))
        if nxt.lam < lambda_floor:
            branch.events.append((idx, "lambda-floor"))
            break
        if s_max is not None and abs(nxt.s_coord) >= s_max:
            break
        tphi, tlam = _tangent(sys, nxt.phi, nxt.lam, tphi, tlam)
        ds = min(ds * 1.3, ds_max)
    return branch


def locate_degenerate(
    branch: Branch,
    sigma_tol: float,
    sys: DiscreteSystem,
    tol: float = NEWTON_TOL,
    max_bisect: int = 80,
) -> DegeneracyReport | None:
    """Find a degenerate point along a traced branch, or None.

    Candidates are consecutive point pairs where sigma_min changes sign or
    where dlambda/ds flips (a fold); bisection by half-steps in arclength
    then drives |sigma_min| below sigma_tol (an absolute target, stricter
    than any operator rescaling since the spectral scale exceeds one).  A
    candidate whose bracket collapses without the eigenvalue vanishing (a
    min-magnitude eigenvalue swap, not a crossing) is skipped.
    """
    pts = branch.points
    if len(pts) < 3:
        return None
    lam_min = min(p.lam for p in pts)
    candidates = []
    for i in range(len(pts) - 1):
        if np.sign(pts[i].sigma_min) != np.sign(pts[i + 1].sigma_min):
            candidates.append(i)
        elif 0 < i and np.sign(pts[i + 1].lam - pts[i].lam) != np.sign(
            pts[i].lam - pts[i - 1].lam
        ):
            candidates.append(i)
    for i in candidates:
        report = _bisect_candidate(
            branch, i, sigma_tol, sys, tol, max_bisect, lam_min
        )
        if report is not None:
            return report
    return None


def _bisect_candidate(branch, i, sigma_tol, sys, tol, max_bisect, lam_min):
    k = branch.k
    a, b = branch.points[i], branch.points[i + 1]
    dphi = b.phi - a.phi
    dlam = b.lam - a.lam
    gap = np.sqrt(sys.inner(dphi, dphi) + dlam**2)
    ref_phi, ref_lam = dphi / gap, dlam / gap
    sig_a = a.sigma_min
    for _ in range(max_bisect):
        try:
            tphi, tlam = _tangent(sys, a.phi, a.lam, ref_phi, ref_lam)
            mid = arclength_step(a, (tphi, tlam), gap / 2, sys, k=k, tol=tol)
        except (StepRejected, ConvergenceError):
            return None
        if abs(mid.sigma_min) < sigma_tol:
            F = assemble_residual(mid.phi, mid.lam, sys)
            d1 = sys.grid.d1
            return DegeneracyReport(
                lambda_star=mid.lam,
                phi_star=mid.phi,
                sigma_at_star=mid.sigma_min,
                nodal_count=mid.nodal_count,
                u_min=mid.u_min,
                s_bracket=(a.s_coord, b.s_coord),
                residual_norm=float(np.max(np.abs(F))),
                branch_lambda_min=min(lam_min, mid.lam),
                crossing_index=i,
                endpoint_derivs=(
                    float((d1 @ mid.phi)[0]),
                    float((d1 @ mid.phi)[-1]),
                ),
            )
        if np.sign(mid.sigma_min) == np.sign(sig_a):
            a, sig_a = mid, mid.sigma_min
            ref_phi = (b.phi - a.phi)
            ref_lam = b.lam - a.lam
            nrm = np.sqrt(sys.inner(ref_phi, ref_phi) + ref_lam**2)
            if nrm == 0:
                return None
            ref_phi, ref_lam = ref_phi / nrm, ref_lam / nrm
        else:
            b = mid
        gap /= 2
        if gap < 1e-13 * (1 + abs(a.lam)):
            return None
    return None


def psi_smallness_check(k: int, s_list, sys: DiscreteSystem) -> list:
    """Ratios ||w(s) - s P_{k,n}||_w / |s| for each s in s_list.

    The remainder of the branch parametrization is quadratically small at
    the bifurcation point, so the ratios decay linearly in s.
    """
    p = sys.basis(k)
    out = []
    for s in s_list:
        pt = solve_at_s(k, s, sys)
        out.append(sys.norm(pt.phi - s * p) / abs(s))
    return out
