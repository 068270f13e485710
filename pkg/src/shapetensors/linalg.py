"""Small dense linear-algebra kernels shared by the manifold modules.

Everything here operates on plain ndarrays.  Two conventions are enforced
globally so that downstream results are reproducible bit-for-bit:

* singular values are returned in descending order (LAPACK already does
  this), and
* the sign of each left singular vector is fixed so that its first
  component of magnitude above ``SIGN_TOL`` is positive, with the matching
  right singular vector flipped in tandem.

The 2x2 symmetric eigendecomposition and the matrix functions built on it
(sqrt, inverse sqrt, exp, log) are closed form rather than iterative: at
this fixed size the arithmetic is exact up to rounding and considerably
faster than a general-purpose routine.
"""

import numpy as np

# Components smaller than this are treated as zero when picking the sign
# anchor of a singular vector.
SIGN_TOL = 1e-12


def fix_svd_signs(u, vt):
    """Apply the first-nonzero-positive sign convention in place.

    Flips column i of ``u`` and row i of ``vt`` together, so the product
    u @ diag(s) @ vt is unchanged.  Works for stacked inputs
    (``u``: (..., m, k), ``vt``: (..., k, n)).
    """
    au = np.abs(u)
    anchor = (au > SIGN_TOL).argmax(axis=-2)  # first index above tolerance
    anchored = np.take_along_axis(u, anchor[..., None, :], axis=-2)[..., 0, :]
    flip = np.where(anchored < 0.0, -1.0, 1.0)
    u *= flip[..., None, :]
    vt *= flip[..., :, None]
    return u, vt


def thin_svd(a):
    """Thin SVD with the deterministic sign convention.

    Returns (u, s, vt) with s descending and each left singular vector's
    first non-negligible component positive.  Accepts stacked matrices.
    """
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    fix_svd_signs(u, vt)
    return u, s, vt


def eigh2(a):
    """Eigendecomposition of a symmetric 2x2 matrix, closed form.

    Returns (w, q) with eigenvalues w descending and q orthogonal,
    a = q @ diag(w) @ q.T.  The decomposition is deterministic: the first
    eigenvector is chosen with a fixed orientation and the second is its
    90-degree rotation.
    """
    p, b = a[0, 0], 0.5 * (a[0, 1] + a[1, 0])
    c = a[1, 1]
    mid = 0.5 * (p + c)
    h = np.hypot(0.5 * (p - c), b)
    w = np.array([mid + h, mid - h])
    if h <= SIGN_TOL * max(1.0, abs(mid)):
        return w, np.eye(2)
    # (a - w1) v = 0; pick the residual column with the larger magnitude
    if p - c >= 0.0:
        v1 = np.array([w[0] - c, b])
    else:
        v1 = np.array([b, w[0] - p])
    v1 /= np.hypot(v1[0], v1[1])
    if v1[0] < 0.0 or (v1[0] == 0.0 and v1[1] < 0.0):
        v1 = -v1
    q = np.array([[v1[0], -v1[1]], [v1[1], v1[0]]])
    return w, q


def sym2_apply(fn, a):
    """Apply a scalar function to a symmetric 2x2 matrix via eigh2."""
    w, q = eigh2(a)
    return (q * fn(w)) @ q.T


def sym2_sqrt(a):
    return sym2_apply(np.sqrt, a)


def sym2_inv_sqrt(a):
    return sym2_apply(lambda w: 1.0 / np.sqrt(w), a)


def sym2_exp(a):
    return sym2_apply(np.exp, a)


def sym2_log(a):
    return sym2_apply(np.log, a)


def inv2(a):
    """Inverse of a 2x2 matrix by the adjugate formula."""
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    return np.array([[a[1, 1], -a[0, 1]], [-a[1, 0], a[0, 0]]]) / det


def cond2(a):
    """2-norm condition number of a 2x2 matrix (inf if singular)."""
    s = np.linalg.svd(a, compute_uv=False)
    if s[-1] == 0.0:
        return np.inf
    return s[0] / s[-1]


def polar_orthonormalize(y):
    """One polar-projection step: the closest matrix with orthonormal columns.

    For an (n, 2) matrix y with nearly orthonormal columns this returns
    y @ (y.T y)^(-1/2), removing O(eps) drift without changing the span.
    """
    g = y.T @ y
    return y @ sym2_inv_sqrt(0.5 * (g + g.T))


def rotation2(theta):
    """Clockwise-convention rotation [[cos, sin], [-sin, cos]]."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]])
