"""Spanwise blade construction from cross-section shapes.

A blade is an ordered set of stations (eta_k, shape_k) along the span.
Each section is standardized; the representatives are then aligned by
sequential Procrustes rotations (tip to root by default).  Alignment is
what makes the piecewise-geodesic evaluation seamless: after it, every
adjacent cross-Gram X_k^T X_{k+1} is symmetric positive definite, so the
interval geodesic Exp_{X_k}(t Log_{X_k}(X_{k+1})) lands exactly on the
next representative at t = 1 instead of on a rotated copy of it.

Undulation travel along the span is parametrized by the cumulative
Grassmann distance t_k; a monotone PCHIP phi maps eta to t, and the six
affine entries (or the SPD factor, rotation angle and offset in the
product variant) follow their own splines.  Evaluation composes the
two:  X(eta) = rep(phi(eta)) @ m(eta) + b(eta).
"""

import warnings

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator

from .errors import (
    ContractError,
    DegenerateGeometryError,
    ExtrapolationError,
    NormalNeighborhoodError,
)
from .grassmann import GrassmannPoint, _exp_raw, _log_raw, _transport_raw, principal_angles
from .linalg import rotation2, sym2_inv_sqrt, sym2_log, sym2_sqrt, thin_svd
from .shapes import LandmarkShape, la_standardize
from .spd import _exp_raw as _spd_exp_raw
from .spd import _log_raw as _spd_log_raw
from .stats import MeanScale

VARIANTS = ("gl2-schedule", "product-spd")
# Adjacent undulation distances below this are treated as a flat interval.
FLAT_INTERVAL = 1e-15


def procrustes_rotation(a, b, allow_reflection=True):
    """The orthogonal R minimizing ||a - b R||_F, from the SVD of b^T a.

    With allow_reflection=False the solution is constrained to SO(2) by
    flipping the smallest singular direction when det would be -1.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    u, _, vt = thin_svd(b.T @ a)
    r = u @ vt
    if not allow_reflection and np.linalg.det(r) < 0.0:
        r = (u * np.array([1.0, -1.0])) @ vt
    return r


def cluster_representatives(reps, direction="tip-to-root", allow_reflection=True):
    """Sequentially align a chain of representatives by Procrustes.

    Returns (aligned, rotations).  tip-to-root sweeps k = N..2 aligning
    station k-1 to the already-aligned station k; root-to-tip is the
    mirror image.  rotations[k] is the total rotation applied to station
    k (identity at the anchor).
    """
    mats = [r.rep if isinstance(r, GrassmannPoint) else np.asarray(r, float)
            for r in reps]
    n = len(mats)
    rotations = [np.eye(2) for _ in range(n)]
    if direction == "tip-to-root":
        order = range(n - 1, 0, -1)
        pair = lambda k: (k, k - 1)
    elif direction == "root-to-tip":
        order = range(0, n - 1)
        pair = lambda k: (k, k + 1)
    else:
        raise ContractError(f"unknown clustering direction {direction!r}")
    for k in order:
        anchor, movable = pair(k)
        r = procrustes_rotation(mats[anchor], mats[movable], allow_reflection)
        mats[movable] = mats[movable] @ r
        rotations[movable] = rotations[movable] @ r
    return [GrassmannPoint(m) for m in mats], rotations


def _spanwise_spline(etas, values):
    """Cubic spline of per-station values; natural ends with a
    not-a-knot fallback when only 2-3 stations exist."""
    bc = "natural" if len(etas) >= 4 else "not-a-knot"
    return CubicSpline(etas, values, axis=0, bc_type=bc)


class BladeModel:
    """A built blade: aligned representatives plus spanwise schedules."""

    __slots__ = (
        "variant", "etas", "reps", "ts", "affine_m", "affine_b",
        "spd_p", "angles", "closed", "has_reflection", "span_length",
        "bend", "_phi", "_psi", "_gr_logs", "_spd_logs", "_m_spline",
        "_b_spline", "_angle_spline", "ell",
    )

    def __init__(self, variant, etas, reps, affine_m, affine_b, spd_p=None,
                 angles=None, closed=False, has_reflection=False,
                 span_length=1.0, bend=None):
        if variant not in VARIANTS:
            raise ContractError(f"variant must be one of {VARIANTS}")
        etas = np.asarray(etas, dtype=float)
        if etas.size < 2:
            raise ContractError("a blade needs at least two stations")
        if np.any(np.diff(etas) <= 0.0):
            raise ContractError("station etas must be strictly increasing")
        self.variant = variant
        self.etas = etas
        self.reps = np.asarray(reps, dtype=float)  # (N, n, 2), aligned
        self.affine_m = np.asarray(affine_m, dtype=float)  # (N, 2, 2)
        self.affine_b = np.asarray(affine_b, dtype=float)  # (N, 2)
        self.spd_p = None if spd_p is None else np.asarray(spd_p, dtype=float)
        self.angles = None if angles is None else np.asarray(angles, dtype=float)
        self.closed = bool(closed)
        self.has_reflection = bool(has_reflection)
        self.span_length = float(span_length)
        self.bend = None if bend is None else np.asarray(bend, dtype=float)
        self._rebuild()

    @property
    def n_stations(self):
        return self.etas.size

    @property
    def n(self):
        return self.reps.shape[1]

    def _rebuild(self):
        """Derive schedules and per-interval geodesic caches."""
        reps = self.reps
        n_st = reps.shape[0]
        gaps = np.empty(n_st - 1)
        self._gr_logs = np.empty((n_st - 1,) + reps.shape[1:])
        for k in range(n_st - 1):
            self._gr_logs[k] = _log_raw(reps[k], reps[k + 1])
            gaps[k] = np.sqrt(
                np.sum(principal_angles(reps[k], reps[k + 1]) ** 2)
            )
        self.ts = np.concatenate([[0.0], np.cumsum(gaps)])
        self._phi = PchipInterpolator(self.etas, self.ts)
        if self.variant == "gl2-schedule":
            self._m_spline = _spanwise_spline(self.etas, self.affine_m)
            self._spd_logs = None
            self._psi = None
            self._angle_spline = None
            self.ell = None
        else:
            spd_gaps = np.empty(n_st - 1)
            self._spd_logs = np.empty((n_st - 1, 2, 2))
            for k in range(n_st - 1):
                self._spd_logs[k] = _spd_log_raw(self.spd_p[k], self.spd_p[k + 1])
                rpi = sym2_inv_sqrt(self.spd_p[k])
                mid = rpi @ self.spd_p[k + 1] @ rpi
                spd_gaps[k] = np.linalg.norm(sym2_log(0.5 * (mid + mid.T)))
            self.ell = np.concatenate([[0.0], np.cumsum(spd_gaps)])
            self._psi = PchipInterpolator(self.etas, self.ell)
            self._m_spline = None
            self._angle_spline = _spanwise_spline(
                self.etas, np.unwrap(self.angles)
            )
        self._b_spline = _spanwise_spline(self.etas, self.affine_b)

    def _interval(self, eta):
        etas = self.etas
        if eta < etas[0] or eta > etas[-1]:
            raise ExtrapolationError(
                f"eta={eta:g} outside the blade span [{etas[0]:g}, {etas[-1]:g}]"
            )
        k = int(np.searchsorted(etas, eta, side="right")) - 1
        return min(max(k, 0), etas.size - 2)

    def _rep_at(self, eta, k):
        t = float(self._phi(eta))
        dt = self.ts[k + 1] - self.ts[k]
        tt = 0.0 if dt < FLAT_INTERVAL else np.clip((t - self.ts[k]) / dt, 0.0, 1.0)
        return _exp_raw(self.reps[k], tt * self._gr_logs[k])

    def _scale_at(self, eta, k):
        if self.variant == "gl2-schedule":
            return self._m_spline(eta)
        s = float(self._psi(eta))
        dl = self.ell[k + 1] - self.ell[k]
        ss = 0.0 if dl < FLAT_INTERVAL else np.clip((s - self.ell[k]) / dl, 0.0, 1.0)
        p = _spd_exp_raw(self.spd_p[k], ss * self._spd_logs[k])
        return p @ rotation2(float(self._angle_spline(eta)))


def evaluate_blade(model, eta):
    """The cross-section at spanwise position eta (interpolation only)."""
    k = model._interval(float(eta))
    rep = model._rep_at(float(eta), k)
    m = model._scale_at(float(eta), k)
    pts = rep @ m + model._b_spline(float(eta))
    return LandmarkShape(pts, closed=model.closed)


def evaluate_representative(model, eta):
    """The undulation component alone at eta, before scale and offset."""
    k = model._interval(float(eta))
    return GrassmannPoint(model._rep_at(float(eta), k))


def build_blade(stations, variant="gl2-schedule", direction="tip-to-root",
                span_length=1.0, bend=None, affine_overrides=None):
    """Assemble a BladeModel from (eta, LandmarkShape) stations.

    Shapes must share a landmark count (preprocess first if they do not).
    ``affine_overrides``, when given, replaces the standardized scale and
    offset of every station with explicit (m, b) pairs -- the usual way
    a design defines chord, twist and stacking along the span.
    """
    if len(stations) < 2:
        raise ContractError("a blade needs at least two stations")
    etas = np.array([float(e) for e, _ in stations])
    if np.any(np.diff(etas) <= 0.0):
        raise ContractError("station etas must be strictly increasing")
    shapes = [s for _, s in stations]
    ns = {s.n for s in shapes}
    if len(ns) != 1:
        raise ContractError(
            f"stations must share a landmark count, got {sorted(ns)}; "
            "preprocess the sections to a common n first"
        )
    closed = shapes[0].closed
    std_variant = "gl2" if variant == "gl2-schedule" else "polar"
    seps = [la_standardize(s, variant=std_variant) for s in shapes]
    reps = [sep.grass for sep in seps]
    if affine_overrides is not None:
        if len(affine_overrides) != len(stations):
            raise ContractError("need one affine override per station")
        ms = [np.asarray(m, dtype=float) for m, _ in affine_overrides]
        bs = [np.asarray(b, dtype=float) for _, b in affine_overrides]
    else:
        ms = [sep.affine.m for sep in seps]
        bs = [sep.affine.b for sep in seps]
    return _assemble(variant, etas, reps, ms, bs, closed, direction,
                     span_length, bend)


def _assemble(variant, etas, reps, ms, bs, closed, direction,
              span_length=1.0, bend=None):
    allow_reflection = variant == "gl2-schedule"
    aligned, rotations = cluster_representatives(
        reps, direction=direction, allow_reflection=allow_reflection
    )
    has_reflection = any(np.linalg.det(r) < 0.0 for r in rotations)
    # the rotation moved into the representative comes out of the scale:
    # (X R)(R^T m) reproduces X m
    ms = [rotations[k].T @ ms[k] for k in range(len(ms))]
    rep_stack = np.stack([p.rep for p in aligned])
    if variant == "gl2-schedule":
        return BladeModel(
            variant, etas, rep_stack, np.stack(ms), np.stack(bs),
            closed=closed, has_reflection=has_reflection,
            span_length=span_length, bend=bend,
        )
    # product-spd: split each rotated factor into SPD part and rotation
    # angle; clustering was restricted to SO(2) so angles are well defined
    spd_p = np.empty((len(ms), 2, 2))
    angles = np.empty(len(ms))
    for k, m in enumerate(ms):
        sym = 0.5 * (m @ m.T + (m @ m.T).T)
        # m = P R with P SPD, R in SO(2): P = (m m^T)^(1/2), R = P^-1 m
        p = sym2_sqrt(sym)
        r = sym2_inv_sqrt(sym) @ m
        if np.linalg.det(r) < 0.0:
            raise DegenerateGeometryError(
                f"station {k}: scale factor contains a reflection; the "
                "product-spd schedule needs proper rotations"
            )
        spd_p[k] = p
        # rotation2 convention: R = [[c, s], [-s, c]]
        angles[k] = float(np.arctan2(r[0, 1], r[0, 0]))
    return BladeModel(
        variant, etas, rep_stack, np.stack(ms), np.stack(bs),
        spd_p=spd_p, angles=angles, closed=closed,
        has_reflection=has_reflection, span_length=span_length, bend=bend,
    )


def consistent_deform(model, pga, coeffs, scale=None):
    """Apply one tangent deformation consistently at every station.

    The PGA coefficient vector defines a tangent at the ensemble mean;
    it is parallel-transported along the geodesic from the mean to each
    station's undulation representative, re-expressed in that station's
    frame, and followed by Exp there.  The blade is then re-assembled.
    coeffs = 0 reproduces the input blade exactly (up to roundoff).

    ``scale``, when a MeanScale, replaces the spanwise scale schedule by
    that constant matrix (gl2-schedule blades only).
    """
    if pga.kind != "grassmann":
        raise ContractError(
            "consistent deformation needs a Grassmann PGA model"
        )
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (pga.r,):
        raise ContractError(
            f"coefficient vector must have length r={pga.r}, got {coeffs.shape}"
        )
    if pga.domain is not None:
        radius = float(np.linalg.norm(coeffs))
        if radius > pga.domain.radius:
            warnings.warn(
                f"deformation magnitude {radius:.3g} exceeds the training "
                f"radius {pga.domain.radius:.3g}; extrapolating the model",
                stacklevel=2,
            )
    mean_rep = pga.mean.rep
    if mean_rep.shape != model.reps.shape[1:]:
        raise ContractError(
            "PGA model and blade stations live on different Grassmannians"
        )
    delta = (pga.basis @ coeffs).reshape(2, -1).T  # unvec at the mean
    new_reps = []
    for k in range(model.n_stations):
        rep = model.reps[k]
        try:
            d_k = _log_raw(mean_rep, rep)
        except NormalNeighborhoodError as err:
            raise NormalNeighborhoodError(
                f"station {k} (eta={model.etas[k]:g}): {err}"
            ) from err
        moved = _transport_raw(mean_rep, d_k, 1.0, delta)
        arrival = _exp_raw(mean_rep, d_k)
        # re-express the transported lift at the station's own
        # representative (arrival spans the station subspace but may be
        # rotated relative to it)
        g = procrustes_rotation(rep, arrival)
        new_reps.append(GrassmannPoint(_exp_raw(rep, moved @ g)))
    if scale is None:
        ms = list(model.affine_m)
    elif isinstance(scale, MeanScale):
        if model.variant != "gl2-schedule":
            raise ContractError(
                "constant mean scale replacement needs a gl2-schedule blade"
            )
        ms = [scale.m.copy() for _ in range(model.n_stations)]
    else:
        raise ContractError("scale must be None or a MeanScale")
    return _assemble(
        model.variant, model.etas, new_reps, ms, list(model.affine_b),
        model.closed, "tip-to-root", model.span_length, model.bend,
    )
