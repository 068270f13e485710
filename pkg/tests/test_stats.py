import numpy as np
import pytest

from shapetensors.errors import ContractError, ConvergenceError, DegenerateGeometryError
from shapetensors.grassmann import GrassmannPoint, GrassmannTangent, gr_distance, gr_exp
from shapetensors.model_io import load_model, save_model
from shapetensors.product import ProductPoint
from shapetensors.shapes import AffineFactor
from shapetensors.spd import SpdMatrix, spd_distance
from shapetensors.stats import (
    MeanScale,
    SampleDomain,
    embed,
    generate,
    karcher_mean,
    mean_scale,
    pga_fit,
    sample_domain,
)

from conftest import random_grassmann_point, random_horizontal, random_spd


def _cloud(rng, n=12, count=15, spread=0.15):
    """Points scattered around a random center along random geodesics."""
    center = random_grassmann_point(rng, n=n)
    return [
        gr_exp(center, random_horizontal(rng, center, scale=spread * rng.uniform(0.3, 1.0)))
        for _ in range(count)
    ], center


# --------------------------------------------------------------- karcher

def test_karcher_single_point_is_that_point(rng):
    p = random_grassmann_point(rng)
    assert karcher_mean([p]) is p


def test_karcher_two_point_midpoint(rng):
    a = random_grassmann_point(rng, n=10)
    tan = random_horizontal(rng, a, scale=0.6)
    b = gr_exp(a, tan)
    mid = karcher_mean([a, b], epsilon=1e-12)
    want = gr_exp(a, GrassmannTangent(0.5 * tan.delta, a))
    assert gr_distance(mid, want) < 1e-9


def test_karcher_fixed_point_certificate(rng):
    pts, _ = _cloud(rng)
    mean = karcher_mean(pts, epsilon=1e-10)
    from shapetensors.stats import _GrassmannOps

    v = _GrassmannOps.mean(_GrassmannOps.log_many(mean, pts))
    assert np.linalg.norm(v) < 1e-10


def test_karcher_permutation_invariance(rng):
    pts, _ = _cloud(rng)
    a = karcher_mean(pts, epsilon=1e-12)
    b = karcher_mean(pts[::-1], epsilon=1e-12)
    assert gr_distance(a, b) < 1e-8


def test_karcher_spd_two_point_midpoint(rng):
    p = random_spd(rng)
    d = random_spd(rng)
    mid = karcher_mean([p, d], epsilon=1e-12)
    assert abs(spd_distance(p, mid) - spd_distance(mid, d)) < 1e-9
    assert abs(spd_distance(p, mid) + spd_distance(mid, d) - spd_distance(p, d)) < 1e-9


def test_karcher_nonconvergence_reports_gradient():
    # antipodal-ish spread on SPD with a absurdly tight epsilon and
    # one iteration cannot converge
    pts = [SpdMatrix(np.diag([1e6, 1.0])), SpdMatrix(np.diag([1e-6, 1.0]))]
    with pytest.raises(ConvergenceError) as err:
        karcher_mean(pts, epsilon=1e-30, max_iter=1)
    assert err.value.gradient_norm is not None


def test_karcher_rejects_empty():
    with pytest.raises(ContractError):
        karcher_mean([])


# ------------------------------------------------------------------- pga

def test_pga_single_geodesic_has_one_mode(rng):
    base = random_grassmann_point(rng, n=10)
    tan = random_horizontal(rng, base, scale=1.0)
    ts = np.linspace(-0.4, 0.4, 9)
    pts = [gr_exp(base, GrassmannTangent(t * tan.delta, base)) for t in ts]
    model = pga_fit(pts, r=2, epsilon=1e-10)
    assert model.eigenvalues[1] / model.eigenvalues[0] <= 1e-12


def test_pga_embed_of_training_points_matches_coords(rng):
    pts, _ = _cloud(rng, count=10)
    model = pga_fit(pts, r=9, epsilon=1e-10)
    for k, p in enumerate(pts):
        np.testing.assert_allclose(embed(model, p), model.coords[k], atol=1e-10)


def test_pga_generate_recovers_training_points(rng):
    pts, _ = _cloud(rng, count=8)
    model = pga_fit(pts, r=7, epsilon=1e-10)
    for k, p in enumerate(pts):
        back = generate(model, model.coords[k])
        assert gr_distance(back, p) < 1e-8


def test_pga_embed_generate_identity(rng):
    pts, _ = _cloud(rng, count=12)
    model = pga_fit(pts, r=5, epsilon=1e-10)
    t = np.array([0.05, -0.02, 0.01, 0.0, 0.03])
    np.testing.assert_allclose(embed(model, generate(model, t)), t, atol=1e-9)


def test_pga_coords_nearly_centered(rng):
    pts, _ = _cloud(rng, count=20)
    model = pga_fit(pts, r=4, epsilon=1e-9)
    assert np.linalg.norm(model.coords.mean(axis=0)) <= 1e-9 * np.sqrt(len(pts))


def test_pga_eigenvalue_sum_matches_log_energy(rng):
    pts, _ = _cloud(rng, count=10)
    full = min(len(pts) - 1, 2 * (pts[0].n - 2))
    model = pga_fit(pts, r=full, epsilon=1e-10)
    from shapetensors.stats import _GrassmannOps

    raws = _GrassmannOps.log_many(model.mean, pts)
    energy = sum(np.linalg.norm(raws[k]) ** 2 for k in range(len(pts)))
    want = energy / (len(pts) - 1)
    assert np.sum(model.eigenvalues) == pytest.approx(want, rel=1e-9)


def test_pga_basis_columns_orthonormal_and_horizontal(rng):
    pts, _ = _cloud(rng, count=9)
    model = pga_fit(pts, r=4, epsilon=1e-10)
    np.testing.assert_allclose(model.basis.T @ model.basis, np.eye(4), atol=1e-12)
    n = model.mean.n
    for i in range(model.r):
        lift = model.basis[:, i].reshape(2, n).T
        assert np.linalg.norm(model.mean.rep.T @ lift) < 1e-10


def test_pga_zero_variance_error(rng):
    p = random_grassmann_point(rng)
    with pytest.raises(DegenerateGeometryError):
        pga_fit([p, GrassmannPoint(p.rep.copy()), GrassmannPoint(p.rep.copy())], r=1)


def test_pga_rank_validation(rng):
    pts, _ = _cloud(rng, count=5)
    with pytest.raises(ContractError):
        pga_fit(pts, r=0)
    with pytest.raises(ContractError):
        pga_fit(pts, r=5)  # N-1 = 4 caps it


def test_pga_spd_full_rank_is_three(rng):
    pts = [random_spd(rng) for _ in range(12)]
    model = pga_fit(pts, r=3, epsilon=1e-10)
    assert model.kind == "spd"
    for k, p in enumerate(pts):
        back = generate(model, model.coords[k])
        assert spd_distance(back, p) < 1e-8


def test_pga_product_round_trip(rng):
    pts = [
        ProductPoint(random_grassmann_point(rng, n=8), random_spd(rng))
        for _ in range(10)
    ]
    model = pga_fit(pts, r=9, epsilon=1e-10)
    assert model.kind == "product"
    k = 3
    back = generate(model, model.coords[k])
    assert gr_distance(back.grass, pts[k].grass) < 1e-8
    assert spd_distance(back.scale, pts[k].scale) < 1e-8


def test_pga_deterministic(rng):
    pts, _ = _cloud(rng, count=10)
    a = pga_fit(pts, r=3, epsilon=1e-10)
    b = pga_fit(list(pts), r=3, epsilon=1e-10)
    assert np.array_equal(a.basis, b.basis)
    assert np.array_equal(a.coords, b.coords)


# ------------------------------------------------------------ mean scale

def test_mean_scale_extrinsic_average():
    f1 = AffineFactor(np.array([[2.0, 0.0], [0.0, 1.0]]), np.zeros(2))
    f2 = AffineFactor(np.array([[4.0, 0.0], [0.0, 3.0]]), np.zeros(2))
    ms = mean_scale([f1, f2], kind="extrinsic")
    np.testing.assert_allclose(ms.m, [[3.0, 0.0], [0.0, 2.0]])


def test_mean_scale_extrinsic_degenerate():
    f1 = AffineFactor(np.array([[1.0, 0.0], [0.0, 1.0]]), np.zeros(2))
    f2 = AffineFactor(np.array([[-1.0, 0.0], [0.0, -1.0]]), np.zeros(2))
    with pytest.raises(DegenerateGeometryError):
        mean_scale([f1, f2], kind="extrinsic")


def test_mean_scale_intrinsic_geodesic_midpoint(rng):
    p = np.diag([4.0, 1.0])
    q = np.diag([1.0, 4.0])
    ms = mean_scale([p, q], kind="intrinsic")
    np.testing.assert_allclose(ms.m, np.diag([2.0, 2.0]), atol=1e-7)


def test_mean_scale_intrinsic_rejects_asymmetric():
    with pytest.raises(ContractError):
        mean_scale([np.array([[1.0, 0.5], [0.0, 1.0]])], kind="intrinsic")


# ---------------------------------------------------------------- domain

def test_sample_domain_box_and_ball(rng):
    pts, _ = _cloud(rng, count=10)
    model = pga_fit(pts, r=3, epsilon=1e-10)
    dom = sample_domain(model)
    assert np.all(dom.lo <= model.coords.min(axis=0))
    assert np.all(dom.hi >= model.coords.max(axis=0))
    assert dom.radius == pytest.approx(np.linalg.norm(model.coords, axis=1).max())


# ------------------------------------------------------------------- io

def test_model_save_load_bit_identical(tmp_path, rng):
    pts, _ = _cloud(rng, count=8)
    model = pga_fit(pts, r=3, epsilon=1e-10)
    model.mean_scale = MeanScale(np.array([[1.5, 0.1], [0.1, 0.9]]), "extrinsic")
    model.domain = sample_domain(model)
    p1 = tmp_path / "m1.model"
    p2 = tmp_path / "m2.model"
    save_model(p1, model)
    back = load_model(p1)
    save_model(p2, back)
    assert p1.read_bytes() == p2.read_bytes()
    assert np.array_equal(back.basis, model.basis)
    assert np.array_equal(back.coords, model.coords)
    assert np.array_equal(back.mean.rep, model.mean.rep)
    assert back.mean_scale.kind == "extrinsic"
    assert back.domain.radius == model.domain.radius


def test_model_save_load_product(tmp_path, rng):
    pts = [
        ProductPoint(random_grassmann_point(rng, n=6), random_spd(rng))
        for _ in range(6)
    ]
    model = pga_fit(pts, r=4, epsilon=1e-10)
    path = tmp_path / "prod.model"
    save_model(path, model)
    back = load_model(path)
    assert back.kind == "product"
    assert np.array_equal(back.mean.grass.rep, model.mean.grass.rep)
    assert np.array_equal(back.mean.scale.mat, model.mean.scale.mat)


def test_model_load_rejects_garbage(tmp_path):
    path = tmp_path / "bad.model"
    path.write_text("not a model\n")
    with pytest.raises(ContractError):
        load_model(path)
