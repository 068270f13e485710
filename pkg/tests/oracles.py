"""Independent numerical oracles used to pin down the manifold maps.

The geodesic and parallel-transport equations on the Stiefel representative
of G(n, 2) are integrated with a generic ODE solver; none of the closed-form
SVD identities under test appear here.

    geodesic:   X'' + X (X'.T X') = 0
    transport:  V'   = -X (X'.T V)   along the geodesic X(t)
"""

import numpy as np
from scipy.integrate import solve_ivp


def integrate_geodesic(x0, d0, t=1.0):
    """Integrate the Grassmann geodesic ODE; returns X(t) (not re-orthonormalized)."""
    n = x0.shape[0]

    def rhs(_, y):
        x = y[: 2 * n].reshape(n, 2)
        xd = y[2 * n :].reshape(n, 2)
        xdd = -x @ (xd.T @ xd)
        return np.concatenate([xd.ravel(), xdd.ravel()])

    y0 = np.concatenate([x0.ravel(), d0.ravel()])
    sol = solve_ivp(rhs, (0.0, t), y0, rtol=1e-11, atol=1e-12, dense_output=False)
    return sol.y[: 2 * n, -1].reshape(n, 2)


def integrate_transport(x0, d0, v0, t=1.0):
    """Jointly integrate geodesic + parallel transport; returns V(t)."""
    n = x0.shape[0]

    def rhs(_, y):
        x = y[: 2 * n].reshape(n, 2)
        xd = y[2 * n : 4 * n].reshape(n, 2)
        v = y[4 * n :].reshape(n, 2)
        xdd = -x @ (xd.T @ xd)
        vd = -x @ (xd.T @ v)
        return np.concatenate([xd.ravel(), xdd.ravel(), vd.ravel()])

    y0 = np.concatenate([x0.ravel(), d0.ravel(), v0.ravel()])
    sol = solve_ivp(rhs, (0.0, t), y0, rtol=1e-11, atol=1e-12, dense_output=False)
    return sol.y[4 * n :, -1].reshape(n, 2)


def subspace_gap(a, b):
    """Sine of the largest principal angle between the column spans of a, b.

    Computed from the projection residual, so it resolves gaps all the way
    down to machine precision (an arccos of cosines bottoms out near 1e-8).
    """
    qa, _ = np.linalg.qr(a)
    qb, _ = np.linalg.qr(b)
    r = qb - qa @ (qa.T @ qb)
    return float(np.linalg.svd(r, compute_uv=False).max())
