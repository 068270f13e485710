"""Refinement convergence experiment.

For a family of random CST airfoils, measure how far a coarse sampling
(after spline refinement back to a dense common landmark count) sits
from the densely sampled truth, both as a max landmark deviation and as
a Grassmann angle-sum distance between the standardized undulation
components.  Against the landmark gauge of the coarse polygon the
errors should shrink at roughly second order: the trailing-edge corner
limits the interior O(h^4) spline rate.
"""

import numpy as np

from .cst import cst_airfoil, random_coefficients
from .errors import DegenerateGeometryError
from .grassmann import gr_distance
from .shapes import PreprocessConfig, landmark_gauge, la_standardize, refine
from .textio import atomic_write_text, fmt

DEFAULT_NC = (20, 40, 80, 160, 320)


class ConvergenceRow:
    """Aggregates for one coarse landmark count."""

    __slots__ = (
        "n_c", "gauge_mean", "gauge_max",
        "euclidean_mean", "euclidean_median", "euclidean_max",
        "grassmann_mean", "grassmann_median", "grassmann_max",
    )

    def __init__(self, n_c, gauges, euclid, grass):
        self.n_c = int(n_c)
        self.gauge_mean = float(np.mean(gauges))
        self.gauge_max = float(np.max(gauges))
        self.euclidean_mean = float(np.mean(euclid))
        self.euclidean_median = float(np.median(euclid))
        self.euclidean_max = float(np.max(euclid))
        self.grassmann_mean = float(np.mean(grass))
        self.grassmann_median = float(np.median(grass))
        self.grassmann_max = float(np.max(grass))


class ConvergenceReport:
    __slots__ = ("rows", "n_trials", "n_ref", "seed", "slopes", "skipped")

    def __init__(self, rows, n_trials, n_ref, seed, skipped=0):
        self.rows = rows
        self.n_trials = int(n_trials)
        self.n_ref = int(n_ref)
        self.seed = int(seed)
        self.skipped = int(skipped)
        gauge_mean = np.array([r.gauge_mean for r in rows])
        gauge_max = np.array([r.gauge_max for r in rows])
        self.slopes = {
            "grassmann-mean": fit_loglog_slope(
                gauge_mean, [r.grassmann_mean for r in rows]
            ),
            "grassmann-max": fit_loglog_slope(
                gauge_max, [r.grassmann_max for r in rows]
            ),
            "euclidean-mean": fit_loglog_slope(
                gauge_mean, [r.euclidean_mean for r in rows]
            ),
            "euclidean-max": fit_loglog_slope(
                gauge_max, [r.euclidean_max for r in rows]
            ),
        }


def fit_loglog_slope(x, y):
    """Least-squares slope of log(y) against log(x)."""
    return float(np.polyfit(np.log(np.asarray(x, float)),
                            np.log(np.asarray(y, float)), 1)[0])


def run_convergence(n_trials=100, n_ref=2000, nc_list=DEFAULT_NC, seed=0,
                    sampling="cosine"):
    """Run the experiment and return a ConvergenceReport.

    Every trial draws one coefficient pair, takes the n_ref-point
    sampling as truth, and for each coarse count refines the coarse
    polygon back to n_ref landmarks at uniform arclength.  Refining the
    truth through the same resampler keeps the landmark correspondence
    honest: both sides are compared at matched arclength fractions.
    """
    nc_list = tuple(int(n) for n in nc_list)
    if len(nc_list) < 2:
        raise ValueError("need at least two coarse landmark counts")
    rng = np.random.default_rng(seed)
    cfg = PreprocessConfig(n=n_ref, sampling="uniform-arclength")
    gauges = {n: [] for n in nc_list}
    euclid = {n: [] for n in nc_list}
    grass = {n: [] for n in nc_list}
    skipped = 0
    for _ in range(n_trials):
        upper, lower = random_coefficients(rng)
        try:
            truth = refine(
                cst_airfoil(upper, lower, n_c=n_ref, sampling=sampling), cfg
            )
            truth_grass = la_standardize(truth).grass
            trial_rows = []
            for n_c in nc_list:
                coarse = cst_airfoil(upper, lower, n_c=n_c, sampling=sampling)
                refined = refine(coarse, cfg)
                trial_rows.append((
                    landmark_gauge(coarse),
                    float(np.linalg.norm(refined.x - truth.x, axis=1).max()),
                    gr_distance(la_standardize(refined).grass, truth_grass,
                                metric="angle-sum"),
                ))
        except DegenerateGeometryError:
            skipped += 1
            continue
        for n_c, (g, e, d) in zip(nc_list, trial_rows):
            gauges[n_c].append(g)
            euclid[n_c].append(e)
            grass[n_c].append(d)
    if not gauges[nc_list[0]]:
        raise DegenerateGeometryError("every convergence trial was degenerate")
    rows = [ConvergenceRow(n, gauges[n], euclid[n], grass[n]) for n in nc_list]
    return ConvergenceReport(rows, n_trials, n_ref, seed, skipped=skipped)


CSV_COLUMNS = (
    "n_c,gauge_mean,gauge_max,"
    "euclidean_mean,euclidean_median,euclidean_max,"
    "grassmann_mean,grassmann_median,grassmann_max"
)


def write_convergence_csv(path, report):
    """One row per coarse count; fitted slopes in '#' footer lines."""
    lines = [CSV_COLUMNS]
    for r in report.rows:
        lines.append(",".join([str(r.n_c)] + [
            fmt(v) for v in (
                r.gauge_mean, r.gauge_max,
                r.euclidean_mean, r.euclidean_median, r.euclidean_max,
                r.grassmann_mean, r.grassmann_median, r.grassmann_max,
            )
        ]))
    lines.append(f"# trials {report.n_trials} n_ref {report.n_ref} "
                 f"seed {report.seed} skipped {report.skipped}")
    for key in sorted(report.slopes):
        lines.append(f"# slope {key} {fmt(report.slopes[key])}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def _log_ticks(lo, hi):
    start = int(np.floor(np.log10(lo)))
    stop = int(np.ceil(np.log10(hi)))
    return [10.0 ** e for e in range(start, stop + 1)]


def write_convergence_svg(path, report, width=640, height=480):
    """Log-log error-vs-gauge plot as a small standalone SVG.

    Hand-assembled so the output is a pure function of the report
    (plotting libraries tend to embed run metadata).
    """
    rows = report.rows
    xs = [r.gauge_mean for r in rows]
    series = [
        ("grassmann mean", "#1f77b4", [r.grassmann_mean for r in rows]),
        ("grassmann max", "#17becf", [r.grassmann_max for r in rows]),
        ("euclidean mean", "#d62728", [r.euclidean_mean for r in rows]),
    ]
    all_y = [v for _, _, ys in series for v in ys]
    x_ticks = _log_ticks(min(xs), max(xs))
    y_ticks = _log_ticks(min(all_y), max(all_y))
    x0, x1 = np.log10(x_ticks[0]), np.log10(x_ticks[-1])
    y0, y1 = np.log10(y_ticks[0]), np.log10(y_ticks[-1])
    left, right, top, bottom = 70, 20, 20, 50

    def px(v):
        return left + (np.log10(v) - x0) / (x1 - x0) * (width - left - right)

    def py(v):
        return height - bottom - (np.log10(v) - y0) / (y1 - y0) * (
            height - top - bottom
        )

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="{left}" y="{top}" width="{width - left - right}" '
        f'height="{height - top - bottom}" fill="none" stroke="black"/>',
    ]
    for t in x_ticks:
        x = fmt(px(t))
        parts.append(
            f'<line x1="{x}" y1="{height - bottom}" x2="{x}" '
            f'y2="{top}" stroke="#dddddd"/>'
        )
        parts.append(
            f'<text x="{x}" y="{height - bottom + 18}" font-size="12" '
            f'text-anchor="middle">{t:g}</text>'
        )
    for t in y_ticks:
        y = fmt(py(t))
        parts.append(
            f'<line x1="{left}" y1="{y}" x2="{width - right}" '
            f'y2="{y}" stroke="#dddddd"/>'
        )
        parts.append(
            f'<text x="{left - 6}" y="{y}" font-size="12" '
            f'text-anchor="end">{t:g}</text>'
        )
    for i, (label, color, ys) in enumerate(series):
        pts = " ".join(f"{fmt(px(x))},{fmt(py(y))}" for x, y in zip(xs, ys))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="1.5"/>'
        )
        for x, y in zip(xs, ys):
            parts.append(
                f'<circle cx="{fmt(px(x))}" cy="{fmt(py(y))}" r="3" '
                f'fill="{color}"/>'
            )
        parts.append(
            f'<text x="{left + 10}" y="{top + 16 + 14 * i}" font-size="12" '
            f'fill="{color}">{label} (slope '
            f'{report.slopes.get(label.replace(" ", "-"), 0.0):.2f})</text>'
        )
    # slope-2 guide anchored at the coarsest grassmann-mean point
    gx, gy = xs[0], series[0][2][0]
    guide = [(gx, gy), (xs[-1], gy * (xs[-1] / gx) ** 2)]
    parts.append(
        '<polyline points="'
        + " ".join(f"{fmt(px(x))},{fmt(py(y))}" for x, y in guide)
        + '" fill="none" stroke="#888888" stroke-dasharray="4 3"/>'
    )
    parts.append(
        f'<text x="{width / 2:g}" y="{height - 12}" font-size="13" '
        f'text-anchor="middle">landmark gauge (coarse polygon)</text>'
    )
    parts.append("</svg>")
    atomic_write_text(path, "\n".join(parts) + "\n")
