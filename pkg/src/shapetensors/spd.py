"""The manifold of symmetric positive-definite 2x2 matrices.

All operations use the affine-invariant metric <A, B>_P = tr(P^-1 A P^-1 B),
under which the manifold is complete with everywhere-defined Exp and Log:

    Exp_P(S) = P^(1/2) exp(P^(-1/2) S P^(-1/2)) P^(1/2)
    Log_P(D) = P^(1/2) log(P^(-1/2) D P^(-1/2)) P^(1/2)
    d(P, D)  = || log(P^(-1/2) D P^(-1/2)) ||_F

Parallel transport along the geodesic from P to D is the congruence
S -> E S E.T with E = (D P^-1)^(1/2), evaluated here in the numerically
symmetric form E = P^(1/2) (P^(-1/2) D P^(-1/2))^(1/2) P^(-1/2).

Distances and transports are invariant under congruence by any invertible
A (P -> A P A.T), which is the property the tests pin down.
"""

import numpy as np

from .errors import ContractError
from .linalg import sym2_exp, sym2_inv_sqrt, sym2_log, sym2_sqrt

SYMMETRY_TOL = 1e-14


class SpdMatrix:
    """A symmetric positive-definite 2x2 matrix."""

    __slots__ = ("mat",)

    def __init__(self, mat):
        mat = np.asarray(mat, dtype=float)
        if mat.shape != (2, 2):
            raise ContractError(f"SPD matrix must be 2x2, got {mat.shape}")
        if not np.all(np.isfinite(mat)):
            raise ContractError("SPD matrix has non-finite entries")
        if abs(mat[0, 1] - mat[1, 0]) > SYMMETRY_TOL * max(
            1.0, np.max(np.abs(mat))
        ):
            raise ContractError("matrix is not symmetric")
        mat = 0.5 * (mat + mat.T)
        det = mat[0, 0] * mat[1, 1] - mat[0, 1] * mat[1, 0]
        if det <= 0.0 or mat[0, 0] + mat[1, 1] <= 0.0:
            raise ContractError("matrix is not positive definite")
        self.mat = mat

    def __repr__(self):
        m = self.mat
        return f"SpdMatrix([[{m[0,0]:g}, {m[0,1]:g}], [{m[1,0]:g}, {m[1,1]:g}]])"


class SpdTangent:
    """A symmetric 2x2 matrix, viewed as a tangent vector."""

    __slots__ = ("sym",)

    def __init__(self, sym):
        sym = np.asarray(sym, dtype=float)
        if sym.shape != (2, 2):
            raise ContractError(f"SPD tangent must be 2x2, got {sym.shape}")
        if not np.all(np.isfinite(sym)):
            raise ContractError("SPD tangent has non-finite entries")
        if abs(sym[0, 1] - sym[1, 0]) > SYMMETRY_TOL * max(
            1.0, np.max(np.abs(sym))
        ):
            raise ContractError("tangent is not symmetric")
        self.sym = 0.5 * (sym + sym.T)

    def norm(self):
        return float(np.linalg.norm(self.sym))

    def __repr__(self):
        return f"SpdTangent(norm={self.norm():.3e})"


def _exp_raw(p, s):
    rp = sym2_sqrt(p)
    rpi = sym2_inv_sqrt(p)
    out = rp @ sym2_exp(rpi @ s @ rpi) @ rp
    return 0.5 * (out + out.T)


def _log_raw(p, d):
    rp = sym2_sqrt(p)
    rpi = sym2_inv_sqrt(p)
    out = rp @ sym2_log(rpi @ d @ rpi) @ rp
    return 0.5 * (out + out.T)


def spd_exp(p, s):
    """Exponential map at p; defined for every symmetric s."""
    return SpdMatrix(_exp_raw(p.mat, s.sym))


def spd_log(p, d):
    """Logarithm at p; defined for every SPD d (the manifold has no cut
    locus under this metric)."""
    return SpdTangent(_log_raw(p.mat, d.mat))


def spd_distance(p, d):
    """Affine-invariant geodesic distance."""
    rpi = sym2_inv_sqrt(p.mat)
    mid = rpi @ d.mat @ rpi
    return float(np.linalg.norm(sym2_log(0.5 * (mid + mid.T))))


def _transport_factor(p, d):
    rp = sym2_sqrt(p)
    rpi = sym2_inv_sqrt(p)
    mid = rpi @ d @ rpi
    return rp @ sym2_sqrt(0.5 * (mid + mid.T)) @ rpi


def spd_transport(p, d, s):
    """Parallel transport of s from T_p to T_d along the geodesic.

    An isometry of the affine-invariant metric:
    tr(D^-1 T D^-1 T) = tr(P^-1 S P^-1 S) for T the transported tangent.
    """
    e = _transport_factor(p.mat, d.mat)
    out = e @ s.sym @ e.T
    return SpdTangent(0.5 * (out + out.T))
