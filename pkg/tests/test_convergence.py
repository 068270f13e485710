import numpy as np
import pytest

from shapetensors.convergence import (
    fit_loglog_slope,
    run_convergence,
    write_convergence_csv,
    write_convergence_svg,
)


@pytest.fixture(scope="module")
def small_report():
    return run_convergence(n_trials=15, seed=0)


def test_slope_on_exact_power_law():
    x = np.array([1.0, 2.0, 4.0, 8.0])
    assert abs(fit_loglog_slope(x, 3.0 * x**2) - 2.0) < 1e-12
    assert abs(fit_loglog_slope(x, 0.5 * x**0.5) - 0.5) < 1e-12


def test_grassmann_slope_is_roughly_quadratic(small_report):
    assert 1.5 <= small_report.slopes["grassmann-mean"] <= 2.5


def test_medians_monotone_nonincreasing(small_report):
    for attr in ("grassmann_median", "euclidean_median"):
        values = [getattr(r, attr) for r in small_report.rows]
        assert all(b <= a for a, b in zip(values, values[1:]))


def test_rows_track_nc_and_positivity(small_report):
    ncs = [r.n_c for r in small_report.rows]
    assert ncs == sorted(ncs)
    for r in small_report.rows:
        assert r.gauge_mean > 0.0
        assert 0.0 < r.grassmann_mean <= r.grassmann_max
        assert 0.0 < r.euclidean_mean <= r.euclidean_max


def test_gauge_shrinks_with_nc(small_report):
    gauges = [r.gauge_mean for r in small_report.rows]
    assert all(b < a for a, b in zip(gauges, gauges[1:]))


def test_needs_two_levels():
    with pytest.raises(ValueError):
        run_convergence(n_trials=2, nc_list=(40,))


def test_csv_round_trip(tmp_path, small_report):
    path = tmp_path / "report.csv"
    write_convergence_csv(path, small_report)
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    assert header[0] == "n_c"
    body = [l for l in lines[1:] if not l.startswith("#")]
    assert len(body) == len(small_report.rows)
    first = body[0].split(",")
    assert int(first[0]) == small_report.rows[0].n_c
    # repr floats parse back exactly
    assert float(first[1]) == small_report.rows[0].gauge_mean
    footers = [l for l in lines if l.startswith("# slope")]
    assert len(footers) == 4


def test_outputs_deterministic(tmp_path):
    a = run_convergence(n_trials=5, seed=11)
    b = run_convergence(n_trials=5, seed=11)
    for name, writer in (("csv", write_convergence_csv),
                         ("svg", write_convergence_svg)):
        pa, pb = tmp_path / f"a.{name}", tmp_path / f"b.{name}"
        writer(pa, a)
        writer(pb, b)
        assert pa.read_bytes() == pb.read_bytes()


def test_svg_is_selfcontained(tmp_path, small_report):
    path = tmp_path / "plot.svg"
    write_convergence_svg(path, small_report)
    text = path.read_text()
    assert text.startswith("<svg")
    assert text.rstrip().endswith("</svg>")
    assert "polyline" in text and "circle" in text
