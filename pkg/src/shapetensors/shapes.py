"""Discrete planar curves and their separable factorization.

A shape is an ordered polyline of landmarks (n, 2).  Standardization
splits it into the part that survives affine changes of frame -- an
element of G(n, 2) called the undulation component -- and the affine
part (a 2x2 scale and a translation):

    X = rep @ m + 1 b^T,   rep^T rep = I,   1^T rep = 0.

Two variants of the split are supported.  "gl2" keeps the full thin-SVD
factor m = S Z^T; "polar" rotates the representative by the right
singular vectors so m becomes the symmetric positive definite factor
Z S Z^T, which is the form the product-manifold statistics operate on.

Refinement re-samples a shape at a target landmark count by splining its
coordinates over the normalized cumulative chord length (the standard
discrete arc-length surrogate).
"""

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator

from .errors import ContractError, DegenerateGeometryError
from .grassmann import GrassmannPoint, gr_distance
from .linalg import rotation2, thin_svd
from .textio import atomic_write_text, data_lines, fmt_row

# Smallest acceptable sigma_2 / sigma_1 of the centered landmark matrix.
RANK_TOL = 1e-10

SPLINE_KINDS = ("cubic-natural", "pchip")
SAMPLING_KINDS = ("uniform-arclength", "cosine")


class LandmarkShape:
    """An ordered polyline of n >= 3 planar landmarks.

    ``closed`` records whether the polyline is a closed traversal; closed
    shapes conventionally repeat their first landmark at the end, and the
    file reader flags them by that coincidence.
    """

    __slots__ = ("x", "closed", "name")

    def __init__(self, x, closed=False, name=None):
        x = np.asarray(x, dtype=float)
        if x.ndim != 2 or x.shape[1] != 2:
            raise ContractError(f"landmarks must be (n, 2), got {x.shape}")
        if x.shape[0] < 3:
            raise ContractError(f"need at least 3 landmarks, got {x.shape[0]}")
        if not np.all(np.isfinite(x)):
            raise ContractError("landmarks contain non-finite values")
        self.x = x
        self.closed = bool(closed)
        self.name = name

    @property
    def n(self):
        return self.x.shape[0]

    def __repr__(self):
        return f"LandmarkShape(n={self.n}, closed={self.closed})"


class AffineFactor:
    """The affine part of a standardized shape: x -> x m + b."""

    __slots__ = ("m", "b")

    def __init__(self, m, b):
        m = np.asarray(m, dtype=float)
        b = np.asarray(b, dtype=float)
        if m.shape != (2, 2) or b.shape != (2,):
            raise ContractError("affine factor needs a 2x2 m and a 2-vector b")
        if not (np.all(np.isfinite(m)) and np.all(np.isfinite(b))):
            raise ContractError("affine factor has non-finite entries")
        if m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0] == 0.0:
            raise DegenerateGeometryError("affine scale matrix is singular")
        self.m = m
        self.b = b


class SeparableShape:
    """A shape factored into Grassmannian and affine components."""

    __slots__ = ("grass", "affine", "variant", "closed", "name")

    def __init__(self, grass, affine, variant, closed=False, name=None):
        if variant not in ("gl2", "polar"):
            raise ContractError(f"unknown standardization variant {variant!r}")
        self.grass = grass
        self.affine = affine
        self.variant = variant
        self.closed = bool(closed)
        self.name = name


class PreprocessConfig:
    """Refinement settings: landmark count, spline family, sampling law."""

    __slots__ = ("n", "spline", "sampling")

    def __init__(self, n=401, spline="cubic-natural", sampling="uniform-arclength"):
        if int(n) != n or n < 3:
            raise ContractError(f"refinement count must be an integer >= 3, got {n}")
        if spline not in SPLINE_KINDS:
            raise ContractError(f"spline must be one of {SPLINE_KINDS}, got {spline!r}")
        if sampling not in SAMPLING_KINDS:
            raise ContractError(
                f"sampling must be one of {SAMPLING_KINDS}, got {sampling!r}"
            )
        self.n = int(n)
        self.spline = spline
        self.sampling = sampling


def _as_points(shape):
    if isinstance(shape, LandmarkShape):
        return shape.x
    pts = np.asarray(shape, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ContractError(f"expected (n, 2) points, got {pts.shape}")
    return pts


def cumulative_lengths(shape):
    """Normalized cumulative chord lengths s_1 = 0 <= ... <= s_n = 1.

    Strictly increasing for a polyline without repeated consecutive
    landmarks; a zero-length segment raises DegenerateGeometryError.
    """
    pts = _as_points(shape)
    if pts.shape[0] < 2:
        raise ContractError("cumulative lengths need at least 2 landmarks")
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    if np.any(seg == 0.0):
        k = int(np.flatnonzero(seg == 0.0)[0])
        raise DegenerateGeometryError(
            f"repeated consecutive landmarks at index {k}: zero-length segment"
        )
    s = np.empty(pts.shape[0])
    s[0] = 0.0
    np.cumsum(seg, out=s[1:])
    s /= s[-1]
    return s


def landmark_gauge(shape):
    """The gauge h_n: the largest Euclidean gap between consecutive landmarks."""
    pts = _as_points(shape)
    return float(np.linalg.norm(np.diff(pts, axis=0), axis=1).max())


def fit_path(shape, spline="cubic-natural"):
    """Interpolate a shape's coordinates over its cumulative lengths.

    Returns a callable c(s) defined on [0, 1].  Closed shapes get a
    periodic cubic; open shapes a natural cubic; "pchip" is the
    shape-preserving alternative for either.
    """
    pts = _as_points(shape)
    closed = isinstance(shape, LandmarkShape) and shape.closed
    if closed and not np.array_equal(pts[0], pts[-1]):
        pts = np.vstack([pts, pts[0]])
    s = cumulative_lengths(pts)
    if spline == "cubic-natural":
        if closed:
            pts = pts.copy()
            pts[-1] = pts[0]  # periodic bc demands exact equality
            return CubicSpline(s, pts, axis=0, bc_type="periodic")
        return CubicSpline(s, pts, axis=0, bc_type="natural")
    if spline == "pchip":
        return PchipInterpolator(s, pts, axis=0)
    raise ContractError(f"spline must be one of {SPLINE_KINDS}, got {spline!r}")


def sampling_positions(n, sampling="uniform-arclength"):
    """Parameter values in [0, 1] at which a refined shape is sampled."""
    if sampling == "uniform-arclength":
        return np.linspace(0.0, 1.0, n)
    if sampling == "cosine":
        return 0.5 * (1.0 - np.cos(np.pi * np.linspace(0.0, 1.0, n)))
    raise ContractError(f"sampling must be one of {SAMPLING_KINDS}, got {sampling!r}")


def refine(shape, cfg=None):
    """Re-sample a shape at cfg.n landmarks along its fitted path."""
    cfg = cfg or PreprocessConfig()
    path = fit_path(shape, spline=cfg.spline)
    xi = sampling_positions(cfg.n, cfg.sampling)
    return LandmarkShape(path(xi), closed=shape.closed, name=shape.name)


def la_standardize(shape, variant="gl2"):
    """Factor a shape into its Grassmannian and affine components.

    Centers the landmarks, takes the deterministic thin SVD
    X - 1 b^T = W diag(s) Z^T and returns

        gl2:    rep = W,        m = diag(s) Z^T
        polar:  rep = W Z^T,    m = Z diag(s) Z^T  (SPD)

    The representative has orthonormal, zero-mean columns; scaling or
    translating the input changes only the affine factor.
    """
    pts = _as_points(shape)
    if pts.shape[0] < 3:
        raise ContractError("standardization needs at least 3 landmarks")
    b = pts.mean(axis=0)
    centered = pts - b
    w, s, zt = thin_svd(centered)
    if s[1] <= RANK_TOL * s[0]:
        raise DegenerateGeometryError(
            "landmarks are collinear after centering: "
            f"sigma_2/sigma_1 = {s[1] / s[0] if s[0] else 0.0:.3e}"
        )
    if variant == "gl2":
        rep = w
        m = s[:, None] * zt
    elif variant == "polar":
        rep = w @ zt
        m = zt.T @ (s[:, None] * zt)
        m = 0.5 * (m + m.T)
    else:
        raise ContractError(f"unknown standardization variant {variant!r}")
    closed = shape.closed if isinstance(shape, LandmarkShape) else False
    name = shape.name if isinstance(shape, LandmarkShape) else None
    return SeparableShape(
        GrassmannPoint(rep), AffineFactor(m, b), variant, closed=closed, name=name
    )


def reconstruct(sep):
    """Invert the factorization: rep @ m + b recovers the landmarks."""
    pts = sep.grass.rep @ sep.affine.m + sep.affine.b
    return LandmarkShape(pts, closed=sep.closed, name=sep.name)


def l4_matrix(l):
    """The four-parameter affine family l1 * diag(l2, l3) * R(l4).

    R is the [[cos, sin], [-sin, cos]] convention, so l = (1, 1, 1, pi/2)
    gives [[0, 1], [-1, 0]].  A zero in l1*l2*l3 would collapse the
    frame and raises a degeneracy error.
    """
    l = np.asarray(l, dtype=float)
    if l.shape != (4,):
        raise ContractError(f"l4 parameter must be a 4-vector, got shape {l.shape}")
    if not np.all(np.isfinite(l)):
        raise ContractError("l4 parameter has non-finite entries")
    if l[0] * l[1] * l[2] == 0.0:
        raise DegenerateGeometryError(
            "l1*l2*l3 = 0 makes the affine family singular"
        )
    return l[0] * np.diag([l[1], l[2]]) @ rotation2(l[3])


def idempotence_check(shape, variant="gl2", tol=1e-10):
    """Does standardizing a standardized representative reproduce it?

    True when the Grassmann distance between pi(X) and pi(pi(X)) is below
    tol; rank-deficient input raises through la_standardize.
    """
    first = la_standardize(shape, variant=variant)
    again = la_standardize(
        LandmarkShape(first.grass.rep, closed=shape.closed), variant=variant
    )
    return gr_distance(first.grass, again.grass) <= tol


# ----------------------------------------------------------------- files

def read_landmarks(path):
    """Read a landmark file: 'x y' lines, '#' comments, optional leading
    name line.  A shape whose first and last landmarks coincide is
    flagged closed."""
    name = None
    rows = []
    for lineno, line in data_lines(path):
        parts = line.split()
        if len(parts) == 2:
            try:
                rows.append((float(parts[0]), float(parts[1])))
                continue
            except ValueError:
                pass
        if name is None and not rows:
            name = line
            continue
        raise ContractError(
            f"{path}:{lineno}: expected 'x y', got {line!r}"
        )
    if len(rows) < 3:
        raise ContractError(f"{path}: need at least 3 landmarks, found {len(rows)}")
    pts = np.array(rows)
    closed = bool(np.all(pts[0] == pts[-1]))
    return LandmarkShape(pts, closed=closed, name=name)


def write_landmarks(path, shape, header=None):
    """Write a landmark file (atomically); inverse of read_landmarks."""
    lines = []
    if header:
        lines.append(f"# {header}")
    if shape.name:
        lines.append(str(shape.name))
    lines.extend(fmt_row(row) for row in shape.x)
    atomic_write_text(path, "\n".join(lines) + "\n")
