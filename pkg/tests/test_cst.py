import numpy as np
import pytest

from shapetensors.cst import (
    cst_airfoil,
    generate_airfoils,
    is_valid_airfoil,
    perturb_coefficients,
    random_coefficients,
)
from shapetensors.errors import ContractError, DegenerateGeometryError
from shapetensors.intersect import self_intersects


def test_traversal_and_te_closure():
    shape = cst_airfoil(np.full(9, 0.25), np.full(9, 0.25), n_c=201)
    assert shape.closed
    np.testing.assert_allclose(shape.x[0], [1.0, 0.0])
    np.testing.assert_allclose(shape.x[-1], [1.0, 0.0])
    mid = shape.x[100]  # odd count puts the leading edge at the middle
    np.testing.assert_allclose(mid, [0.0, 0.0], atol=1e-12)
    # upper surface first (positive y), lower second
    assert np.all(shape.x[1:100, 1] > 0)
    assert np.all(shape.x[101:-1, 1] < 0)


def test_all_quarter_coefficients_is_valid():
    shape = cst_airfoil(np.full(9, 0.25), np.full(9, 0.25), n_c=201)
    assert is_valid_airfoil(shape)
    assert not self_intersects(shape)


def test_equal_coefficients_symmetric_about_chord():
    # equal thickness vectors: upper surface is the mirror of the lower
    shape = cst_airfoil(np.full(9, 0.2), np.full(9, 0.2), n_c=201)
    np.testing.assert_allclose(shape.x[:, 0], shape.x[::-1, 0], atol=1e-12)
    np.testing.assert_allclose(shape.x[:, 1], -shape.x[::-1, 1], atol=1e-12)


def test_zero_coefficients_degenerate():
    with pytest.raises(DegenerateGeometryError):
        cst_airfoil(np.zeros(9), np.zeros(9))


def test_random_draws_mostly_valid():
    rng = np.random.default_rng(77)
    valid = 0
    for _ in range(100):
        u, l = random_coefficients(rng)
        if is_valid_airfoil(cst_airfoil(u, l, n_c=201)):
            valid += 1
    assert valid >= 99


def test_uniform_sampling_variant():
    shape = cst_airfoil(np.full(9, 0.3), np.full(9, 0.15), n_c=101, sampling="uniform")
    x = shape.x[:, 0]
    steps = np.abs(np.diff(x[1:51]))
    np.testing.assert_allclose(steps, steps[0], atol=1e-12)


def test_unknown_sampling_rejected():
    with pytest.raises(ContractError):
        cst_airfoil(np.full(9, 0.2), np.full(9, 0.2), sampling="chebyshev")


def test_perturb_zero_percent_is_identity():
    rng = np.random.default_rng(3)
    u = np.linspace(0.1, 0.4, 9)
    l = np.linspace(0.05, 0.3, 9)
    pu, pl = perturb_coefficients(rng, u, l, percent=0.0)
    np.testing.assert_allclose(pu, u, atol=1e-15)
    np.testing.assert_allclose(pl, l, atol=1e-15)


def test_perturb_stays_in_box():
    rng = np.random.default_rng(4)
    u = np.full(9, 0.2)
    l = np.full(9, 0.3)
    for _ in range(50):
        pu, pl = perturb_coefficients(rng, u, l, percent=20.0)
        assert np.all(pu >= 0.8 * u) and np.all(pu <= 1.2 * u)
        assert np.all(pl >= 0.8 * l) and np.all(pl <= 1.2 * l)


def test_generator_reports_resamples():
    rng = np.random.default_rng(11)
    shapes, rows, rejected = generate_airfoils(rng, 10, n_c=201)
    assert len(shapes) == 10
    assert rows.shape == (10, 18)
    assert rejected >= 0
    assert all(s.closed for s in shapes)
