# Locating a degenerate solution: a point on the branch where the
# linearized operator acquires a kernel.
#
# Along the even-mode branch the smallest-magnitude eigenvalue of the
# Jacobian changes sign at the fold in lambda; bisection in arclength
# drives it to zero.  The resulting pair (u = phi + 1, lambda*) is a
# positive solution with exactly k sign changes that depends on both
# sphere factors.

import numpy as np

from spherebif import (
    DiscreteSystem,
    ModelParams,
    assemble_jacobian,
    build_grid,
    lambda_k,
    locate_degenerate,
    trace_branch,
)

params = ModelParams(n=2, delta=1.0, q=3.0)
system = DiscreteSystem(build_grid(64), params)

k = 2
branch = trace_branch(k, 1, system, max_points=60)
report = locate_degenerate(branch, sigma_tol=1e-6, sys=system)

print(f"mode k = {k}: lambda_k = {lambda_k(k, params)}")
print(f"  lambda*        = {report.lambda_star:.9f}")
print(f"  sigma at star  = {report.sigma_at_star:.3e}")
print(f"  nodal count    = {report.nodal_count}")
print(f"  min of u       = {report.u_min:.6f}  (stays positive)")
print(f"  residual norm  = {report.residual_norm:.3e}")
print(f"  s bracket      = ({report.s_bracket[0]:.6f}, {report.s_bracket[1]:.6f})")
print(f"  branch lambda-min = {report.branch_lambda_min:.9f}")

# independent confirmation: fresh Jacobian, dense eigenvalues
J = assemble_jacobian(report.phi_star, report.lambda_star, system)
closest = np.min(np.abs(np.linalg.eigvals(J)))
print(f"\nindependent eigendecomposition: min |eigenvalue| = {closest:.3e}")
