"""Riemannian statistics over the shape manifolds.

The Karcher mean is the fixed point of p <- Exp_p(mean_k Log_p(p_k)),
iterated from the first sample until the mean tangent drops below
epsilon in Frobenius norm.  Principal geodesic analysis then works in
the tangent space at the mean: the logs are vectorized isometrically
(Grassmann lifts stack their columns; SPD tangents keep their three
unique entries with the off-diagonal weighted by sqrt(2)), scaled by
1/sqrt(N-1), and decomposed by a thin SVD.  Squared singular values are
the per-direction variances; the stored per-sample coordinates are the
unscaled projections t_k = U_r^T vec(Log_mean(p_k)), so embedding a
training point returns its row of ``coords`` and generating from that
row returns the point.

All decompositions use the deterministic SVD sign convention, making a
fit a pure function of its input bytes.
"""

import numpy as np

from .errors import ContractError, ConvergenceError, DegenerateGeometryError
from .grassmann import GrassmannPoint, _exp_raw, _log_many, _log_raw
from .linalg import thin_svd
from .product import ProductPoint
from .shapes import AffineFactor
from .spd import SpdMatrix
from .spd import _exp_raw as _spd_exp_raw
from .spd import _log_raw as _spd_log_raw

KARCHER_MAX_ITER = 200
KARCHER_EPSILON = 1e-8
# Largest singular value of the scaled data matrix below which the
# ensemble is treated as having no variance at all.
ZERO_VARIANCE_TOL = 1e-13

_SQRT2 = np.sqrt(2.0)


class _GrassmannOps:
    kind = "grassmann"

    @staticmethod
    def check(points):
        n = points[0].n
        if any(p.n != n for p in points):
            raise ContractError("all Grassmann points must share the same n")

    @staticmethod
    def log_many(base, points):
        return _log_many(base.rep, np.stack([p.rep for p in points]))

    @staticmethod
    def log(base, point):
        return _log_raw(base.rep, point.rep)

    @staticmethod
    def exp(base, raw):
        return GrassmannPoint(_exp_raw(base.rep, raw))

    @staticmethod
    def mean(raws):
        return raws.mean(axis=0)

    @staticmethod
    def norm(raw):
        return float(np.linalg.norm(raw))

    @staticmethod
    def vec_many(raws):
        # stack columns: (N, n, 2) -> (N, 2n) with column-major order
        return raws.transpose(0, 2, 1).reshape(raws.shape[0], -1)

    @staticmethod
    def unvec(v, base):
        n = base.n
        return v.reshape(2, n).T

    @staticmethod
    def intrinsic_dim(base):
        return 2 * (base.n - 2)


class _SpdOps:
    kind = "spd"

    @staticmethod
    def check(points):
        pass

    @staticmethod
    def log_many(base, points):
        return np.stack([_spd_log_raw(base.mat, p.mat) for p in points])

    @staticmethod
    def log(base, point):
        return _spd_log_raw(base.mat, point.mat)

    @staticmethod
    def exp(base, raw):
        return SpdMatrix(_spd_exp_raw(base.mat, raw))

    @staticmethod
    def mean(raws):
        return raws.mean(axis=0)

    @staticmethod
    def norm(raw):
        return float(np.linalg.norm(raw))

    @staticmethod
    def vec_many(raws):
        return np.column_stack(
            [raws[:, 0, 0], _SQRT2 * raws[:, 0, 1], raws[:, 1, 1]]
        )

    @staticmethod
    def unvec(v, base):
        off = v[1] / _SQRT2
        return np.array([[v[0], off], [off, v[2]]])

    @staticmethod
    def intrinsic_dim(base):
        return 3


class _ProductOps:
    kind = "product"

    @staticmethod
    def check(points):
        _GrassmannOps.check([p.grass for p in points])

    @staticmethod
    def log_many(base, points):
        g = _GrassmannOps.log_many(base.grass, [p.grass for p in points])
        s = _SpdOps.log_many(base.scale, [p.scale for p in points])
        return g, s

    @staticmethod
    def log(base, point):
        return (
            _GrassmannOps.log(base.grass, point.grass),
            _SpdOps.log(base.scale, point.scale),
        )

    @staticmethod
    def exp(base, raw):
        return ProductPoint(
            _GrassmannOps.exp(base.grass, raw[0]),
            _SpdOps.exp(base.scale, raw[1]),
        )

    @staticmethod
    def mean(raws):
        return raws[0].mean(axis=0), raws[1].mean(axis=0)

    @staticmethod
    def norm(raw):
        return float(np.hypot(np.linalg.norm(raw[0]), np.linalg.norm(raw[1])))

    @staticmethod
    def vec_many(raws):
        return np.hstack(
            [_GrassmannOps.vec_many(raws[0]), _SpdOps.vec_many(raws[1])]
        )

    @staticmethod
    def unvec(v, base):
        cut = 2 * base.grass.n
        return (
            _GrassmannOps.unvec(v[:cut], base.grass),
            _SpdOps.unvec(v[cut:], base.scale),
        )

    @staticmethod
    def intrinsic_dim(base):
        return 2 * (base.grass.n - 2) + 3

    @staticmethod
    def take(raws, k):
        return raws[0][k], raws[1][k]


def _ops_for(point):
    if isinstance(point, GrassmannPoint):
        return _GrassmannOps
    if isinstance(point, SpdMatrix):
        return _SpdOps
    if isinstance(point, ProductPoint):
        return _ProductOps
    raise ContractError(f"unsupported manifold point type {type(point).__name__}")


def karcher_mean(points, epsilon=KARCHER_EPSILON, max_iter=KARCHER_MAX_ITER):
    """Iterative Karcher (Frechet) mean of a list of manifold points.

    Initialized at points[0]; each sweep averages the logarithms at the
    current iterate and follows the mean tangent.  Returns the first
    iterate whose mean tangent has Frobenius norm below epsilon, so the
    fixed-point residual of the result is certified < epsilon.  Raises
    ConvergenceError (carrying the last gradient norm) if max_iter
    sweeps do not get there.
    """
    if not points:
        raise ContractError("karcher_mean needs at least one point")
    if epsilon <= 0.0:
        raise ContractError("epsilon must be positive")
    ops = _ops_for(points[0])
    ops.check(points)
    p = points[0]
    gnorm = None
    for _ in range(max_iter):
        raws = ops.log_many(p, points)
        v = ops.mean(raws)
        gnorm = ops.norm(v)
        if gnorm < epsilon:
            return p
        p = ops.exp(p, v)
    raise ConvergenceError(
        f"Karcher mean did not converge in {max_iter} iterations "
        f"(last gradient norm {gnorm:.3e})",
        gradient_norm=gnorm,
    )


class PgaModel:
    """Principal geodesic analysis of an ensemble around its Karcher mean."""

    __slots__ = (
        "kind",
        "mean",
        "basis",
        "eigenvalues",
        "coords",
        "epsilon",
        "mean_scale",
        "domain",
    )

    def __init__(self, kind, mean, basis, eigenvalues, coords, epsilon,
                 mean_scale=None, domain=None):
        self.kind = kind
        self.mean = mean
        self.basis = np.asarray(basis, dtype=float)
        self.eigenvalues = np.asarray(eigenvalues, dtype=float)
        self.coords = np.asarray(coords, dtype=float)
        self.epsilon = float(epsilon)
        self.mean_scale = mean_scale
        self.domain = domain

    @property
    def r(self):
        return self.basis.shape[1]

    @property
    def n_samples(self):
        return self.coords.shape[0]

    def __repr__(self):
        return (
            f"PgaModel(kind={self.kind!r}, r={self.r}, N={self.n_samples})"
        )


class MeanScale:
    """An averaged 2x2 scale matrix and the averaging rule that made it."""

    __slots__ = ("m", "kind")

    def __init__(self, m, kind):
        m = np.asarray(m, dtype=float)
        if m.shape != (2, 2):
            raise ContractError("mean scale must be 2x2")
        self.m = m
        self.kind = kind


class SampleDomain:
    """Per-axis bounding box and enclosing origin-centered ball of the
    training coordinates."""

    __slots__ = ("lo", "hi", "radius")

    def __init__(self, lo, hi, radius):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        self.radius = float(radius)


def pga_fit(points, r, epsilon=KARCHER_EPSILON):
    """Fit a PgaModel of rank r to an ensemble of manifold points.

    The basis columns are unit tangent directions at the mean (in
    vectorized form), eigenvalues are the sample variances captured per
    direction, and coords[k] are the normal coordinates of sample k.
    """
    if len(points) < 2:
        raise ContractError("PGA needs at least two points")
    ops = _ops_for(points[0])
    ops.check(points)
    n = len(points)
    mean = karcher_mean(points, epsilon=epsilon)
    limit = min(n - 1, ops.intrinsic_dim(points[0]))
    if int(r) != r or not 1 <= r <= limit:
        raise ContractError(
            f"rank r={r} must be an integer in [1, {limit}] "
            f"(N-1 and the manifold dimension both cap it)"
        )
    raws = ops.log_many(mean, points)
    data = ops.vec_many(raws)  # (N, ambient)
    scaled = data.T / np.sqrt(n - 1.0)  # columns are samples
    u, s, _ = thin_svd(scaled)
    if s[0] <= ZERO_VARIANCE_TOL:
        raise DegenerateGeometryError(
            "ensemble has zero variance: all points coincide with the mean"
        )
    basis = u[:, :r]
    eigenvalues = s[:r] ** 2
    coords = data @ basis
    return PgaModel(ops.kind, mean, basis, eigenvalues, coords, epsilon)


def embed(model, point):
    """Normal coordinates of a point in the model's tangent frame."""
    ops = _ops_for(model.mean)
    raw = ops.log(model.mean, point)
    v = ops.vec_many(_stack_one(ops, raw))[0]
    return model.basis.T @ v


def generate(model, coeffs):
    """Map normal coordinates back to a manifold point via Exp at the mean."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (model.r,):
        raise ContractError(
            f"coefficient vector must have length r={model.r}, got {coeffs.shape}"
        )
    ops = _ops_for(model.mean)
    raw = ops.unvec(model.basis @ coeffs, model.mean)
    return ops.exp(model.mean, raw)


def _stack_one(ops, raw):
    if ops.kind == "product":
        return raw[0][None], raw[1][None]
    return raw[None]


def mean_scale(factors, kind="extrinsic"):
    """Average the 2x2 scale factors of an ensemble.

    kind="extrinsic" is the entrywise average of the gl2 factors (errors
    if the average degenerates); kind="intrinsic" is the Karcher mean of
    polar-variant SPD factors under the affine-invariant metric.
    """
    if not factors:
        raise ContractError("mean_scale needs at least one factor")
    mats = [f.m if isinstance(f, AffineFactor) else np.asarray(f, float) for f in factors]
    if kind == "extrinsic":
        avg = np.mean(mats, axis=0)
        s = np.linalg.svd(avg, compute_uv=False)
        if s[1] <= 1e-12 * s[0]:
            raise DegenerateGeometryError("the entrywise average scale is singular")
        return MeanScale(avg, kind)
    if kind == "intrinsic":
        spd_points = [SpdMatrix(m) for m in mats]  # raises unless SPD
        mean = karcher_mean(spd_points)
        return MeanScale(mean.mat, kind)
    raise ContractError(f"unknown mean-scale kind {kind!r}")


def sample_domain(model):
    """Bounding box and enclosing centered ball of the training coords."""
    coords = model.coords
    radius = float(np.linalg.norm(coords, axis=1).max())
    return SampleDomain(coords.min(axis=0), coords.max(axis=0), radius)
