"""Blade definition files, blade artifacts, and wireframe output.

A blade definition is a small text file listing the cross-section files
along the span, plus optional placement data::

    # hub-to-tip test blade
    span 60.0
    bend 0.0   0.0 0.0 0.0
    bend 1.0   0.0 4.0 60.0
    station 0.0  sections/root.txt
    station 0.5  sections/mid.txt
    station 1.0  sections/tip.txt  m 1.2 0.0 0.0 1.2  b 0.25 0.0

Station paths are resolved relative to the definition file.  ``m``/``b``
override the standardized scale and offset (chord/twist/stacking data);
they must be given for every station or for none.  ``bend`` rows are
(eta, x, y, z) knots of a spanwise stacking curve; without them the
sections stack along the z axis at z = eta * span.
"""

import os

import numpy as np
from scipy.interpolate import CubicSpline

from .blade import BladeModel, build_blade, evaluate_blade
from .errors import ContractError
from .model_io import _matrix_block, _Reader
from .shapes import PreprocessConfig, read_landmarks, refine, write_landmarks
from .textio import atomic_write_text, data_lines, fmt, fmt_row

_BLADE_MAGIC = "shapetensors blade 1"


class BladeDefinition:
    """Parsed blade definition: stations plus placement metadata."""

    __slots__ = ("stations", "span_length", "bend", "base_dir")

    def __init__(self, stations, span_length=1.0, bend=None, base_dir="."):
        if len(stations) < 2:
            raise ContractError("a blade definition needs at least two stations")
        self.stations = stations  # list of (eta, path, m-or-None, b-or-None)
        self.span_length = float(span_length)
        self.bend = bend
        self.base_dir = base_dir


def read_blade_definition(path):
    stations = []
    span_length = 1.0
    bend_rows = []
    base_dir = os.path.dirname(os.path.abspath(path))
    for lineno, line in data_lines(path):
        tokens = line.split()
        word = tokens[0]
        try:
            if word == "span":
                span_length = float(tokens[1])
            elif word == "bend":
                if len(tokens) != 5:
                    raise ContractError("bend rows are `bend eta x y z`")
                bend_rows.append([float(t) for t in tokens[1:]])
            elif word == "station":
                eta = float(tokens[1])
                rel = tokens[2]
                m = b = None
                rest = tokens[3:]
                while rest:
                    key = rest[0]
                    if key == "m":
                        m = np.array([float(t) for t in rest[1:5]]).reshape(2, 2)
                        rest = rest[5:]
                    elif key == "b":
                        b = np.array([float(t) for t in rest[1:3]])
                        rest = rest[3:]
                    else:
                        raise ContractError(f"unknown station field {key!r}")
                stations.append((eta, os.path.join(base_dir, rel), m, b))
            else:
                raise ContractError(f"unknown directive {word!r}")
        except (IndexError, ValueError) as err:
            raise ContractError(f"{path}:{lineno}: {err}") from err
    bend = None
    if bend_rows:
        bend = np.array(bend_rows)
        if bend.shape[0] < 2:
            raise ContractError(f"{path}: a bend curve needs at least two knots")
        if np.any(np.diff(bend[:, 0]) <= 0.0):
            raise ContractError(f"{path}: bend etas must be strictly increasing")
    return BladeDefinition(stations, span_length, bend, base_dir)


def build_blade_from_definition(defn, variant="gl2-schedule", n=None,
                                spline="cubic-natural",
                                sampling="uniform-arclength",
                                direction="tip-to-root"):
    """Read the station files, resample to a common landmark count, and
    assemble the blade.  ``n=None`` keeps the largest station count."""
    shapes = [read_landmarks(p) for _, p, _, _ in defn.stations]
    target = max(s.n for s in shapes) if n is None else int(n)
    cfg = PreprocessConfig(n=target, spline=spline, sampling=sampling)
    shapes = [s if s.n == target else refine(s, cfg) for s in shapes]
    has_m = [m is not None for _, _, m, _ in defn.stations]
    if any(has_m) and not all(has_m):
        raise ContractError(
            "explicit affine data must be given for every station or none"
        )
    overrides = None
    if all(has_m):
        overrides = []
        for _, _, m, b in defn.stations:
            overrides.append((m, np.zeros(2) if b is None else b))
    stations = [(e, s) for (e, _, _, _), s in zip(defn.stations, shapes)]
    return build_blade(
        stations, variant=variant, direction=direction,
        span_length=defn.span_length, bend=defn.bend,
        affine_overrides=overrides,
    )


def save_blade(path, model):
    lines = [_BLADE_MAGIC, f"variant {model.variant}"]
    lines.append(f"closed {int(model.closed)}")
    lines.append(f"has-reflection {int(model.has_reflection)}")
    lines.append(f"span-length {fmt(model.span_length)}")
    lines.append(f"etas {model.etas.size}")
    lines.append(fmt_row(model.etas))
    lines.extend(_matrix_block("reps", model.reps.reshape(-1, 2)))
    lines.extend(_matrix_block("affine-m", model.affine_m.reshape(-1, 4)))
    lines.extend(_matrix_block("affine-b", model.affine_b))
    if model.variant == "product-spd":
        lines.extend(_matrix_block("spd-p", model.spd_p.reshape(-1, 4)))
        lines.append(f"angles {model.angles.size}")
        lines.append(fmt_row(model.angles))
    if model.bend is None:
        lines.append("bend none")
    else:
        lines.extend(_matrix_block("bend", model.bend))
    lines.append("end")
    atomic_write_text(path, "\n".join(lines) + "\n")


def load_blade(path):
    r = _Reader(path)
    if r.next() != _BLADE_MAGIC:
        raise ContractError(f"{path}: not a shapetensors blade file")
    variant = r.next().split()[1]
    closed = bool(int(r.next().split()[1]))
    has_reflection = bool(int(r.next().split()[1]))
    span_length = float(r.next().split()[1])
    n_st = int(r.next().split()[1])
    etas = np.array([float(t) for t in r.next().split()])
    if etas.size != n_st:
        raise ContractError(f"{path}: eta row does not match station count")
    reps = r.block("reps").reshape(n_st, -1, 2)
    affine_m = r.block("affine-m").reshape(n_st, 2, 2)
    affine_b = r.block("affine-b")
    spd_p = angles = None
    if variant == "product-spd":
        spd_p = r.block("spd-p").reshape(n_st, 2, 2)
        head = r.next().split()
        if head[0] != "angles":
            raise ContractError(f"{path}: expected angles block")
        angles = np.array([float(t) for t in r.next().split()])
    head = r.next().split()
    bend = None
    if head[0] == "bend" and head[1] != "none":
        rows = int(head[1])
        bend = np.array(
            [[float(t) for t in r.next().split()] for _ in range(rows)]
        )
    if r.next() != "end":
        raise ContractError(f"{path}: missing end marker")
    return BladeModel(
        variant, etas, reps, affine_m, affine_b, spd_p=spd_p, angles=angles,
        closed=closed, has_reflection=has_reflection,
        span_length=span_length, bend=bend,
    )


def _axis_frame(tangent):
    """Rotation taking the z axis onto ``tangent`` (unit 3-vector)."""
    z = np.array([0.0, 0.0, 1.0])
    c = np.cross(z, tangent)
    s = np.linalg.norm(c)
    d = float(np.dot(z, tangent))
    if s < 1e-12:
        if d > 0.0:
            return np.eye(3)
        return np.diag([1.0, -1.0, -1.0])  # half turn about x
    axis = c / s
    k = np.array([
        [0.0, -axis[2], axis[1]],
        [axis[2], 0.0, -axis[0]],
        [-axis[1], axis[0], 0.0],
    ])
    angle = np.arctan2(s, d)
    return np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)


def wireframe_sections(model, etas=None, count=25):
    """Evaluate the blade at the given spanwise positions and place each
    section in 3-space along the stacking axis.

    Returns a list of (eta, points3d) with points3d of shape (n, 3).
    Straight blades stack along z at z = eta * span_length; a bend curve
    positions each section at the curve point with the section plane
    normal to the curve tangent.
    """
    if etas is None:
        etas = np.linspace(model.etas[0], model.etas[-1], count)
    etas = np.asarray(etas, dtype=float)
    if model.bend is not None:
        bc = "natural" if model.bend.shape[0] >= 4 else "not-a-knot"
        curve = CubicSpline(model.bend[:, 0], model.bend[:, 1:4], bc_type=bc)
        velocity = curve.derivative()
    out = []
    for eta in etas:
        sec = evaluate_blade(model, float(eta))
        flat = np.column_stack([sec.x, np.zeros(sec.n)])
        if model.bend is None:
            pts = flat + np.array([0.0, 0.0, float(eta) * model.span_length])
        else:
            tan = velocity(float(eta))
            norm = np.linalg.norm(tan)
            if norm < 1e-12:
                raise ContractError(
                    f"bend curve has a vanishing tangent at eta={eta:g}"
                )
            frame = _axis_frame(tan / norm)
            pts = flat @ frame.T + curve(float(eta))
        out.append((float(eta), pts))
    return out


def write_wireframe(out_dir, model, etas=None, count=25, prefix="section"):
    """Write per-section landmark files, an index manifest, and a lofted
    OBJ surface under ``out_dir``.  Returns the manifest path."""
    os.makedirs(out_dir, exist_ok=True)
    placed = wireframe_sections(model, etas=etas, count=count)
    manifest_lines = ["# file,eta"]
    for i, (eta, _) in enumerate(placed):
        sec = evaluate_blade(model, eta)
        fname = f"{prefix}_{i:03d}.txt"
        write_landmarks(
            os.path.join(out_dir, fname), sec,
            header=f"blade section at eta {fmt(eta)}",
        )
        manifest_lines.append(f"{fname},{fmt(eta)}")
    manifest_path = os.path.join(out_dir, "manifest.txt")
    atomic_write_text(manifest_path, "\n".join(manifest_lines) + "\n")
    write_obj(os.path.join(out_dir, "blade.obj"), [p for _, p in placed])
    return manifest_path


def write_obj(path, sections3d):
    """Loft the placed sections into a quad-mesh Wavefront OBJ file."""
    counts = {s.shape[0] for s in sections3d}
    if len(sections3d) < 2 or len(counts) != 1:
        raise ContractError(
            "an OBJ loft needs at least two sections of equal size"
        )
    n = counts.pop()
    lines = []
    for pts in sections3d:
        for p in pts:
            lines.append(f"v {fmt(p[0])} {fmt(p[1])} {fmt(p[2])}")
    for j in range(len(sections3d) - 1):
        base = j * n
        for i in range(n - 1):
            a = base + i + 1  # OBJ indices are 1-based
            b = base + i + 2
            c = base + n + i + 2
            d = base + n + i + 1
            lines.append(f"f {a} {b} {c} {d}")
    atomic_write_text(path, "\n".join(lines) + "\n")
