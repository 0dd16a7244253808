"""Grids, star bodies, radial arithmetic, and serialization."""

import math

import numpy as np
import pytest

from dualquermass import (
    Ball,
    Dilate,
    GridTable,
    RadialSum,
    SmoothAxial,
    TrigFamily,
    Zonal,
    ZonalBump,
    ZonalExp,
    ball_volume,
    body_from_dict,
    body_from_json,
    build_grid,
    default_grid,
    radial_sum,
    ratio_range,
    sphere_surface,
    volume,
)
from dualquermass.starbody import (
    DimensionMismatchError,
    InvariantViolationError,
    one_sided_cap,
)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_grid_nodes_are_unit(n):
    grid = default_grid(n) if n > 1 else build_grid(1, 1)
    norms = np.linalg.norm(grid.nodes, axis=1)
    assert np.max(np.abs(norms - 1.0)) <= 1e-12
    assert np.all(grid.weights > 0)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_grid_weights_sum_to_sphere_surface(n):
    grid = default_grid(n)
    total = float(np.sum(grid.weights))
    assert abs(total - sphere_surface(n)) <= 1e-10 * sphere_surface(n)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_ball_volume_by_quadrature(n):
    grid = default_grid(n)
    vol = volume(Ball(n, 1.0), grid)
    assert abs(vol - ball_volume(n)) <= 1e-10 * ball_volume(n)


def test_dilate_radial_scales():
    K = TrigFamily(2.0, (1.0,))
    D = Dilate(K, 2.5)
    u = np.array([[1.0, 0.0], [0.0, 1.0]])
    assert np.allclose(D.radial(u), 2.5 * K.radial(u))


def test_radial_sum_is_linear_on_radials():
    grid = default_grid(2)
    K = TrigFamily(2.0, (1.0,))
    L = Ball(2, 1.5)
    M = radial_sum(K, L, 0.7, 1.3)
    expected = 0.7 * K.radial_on_grid(grid) + 1.3 * L.radial_on_grid(grid)
    assert np.allclose(M.radial_on_grid(grid), expected, rtol=0, atol=1e-14)


def test_radial_sum_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        radial_sum(Ball(2), Ball(3), 1.0, 1.0)


def test_trig_family_positivity_checked_on_evaluation():
    body = TrigFamily(1.0, (2.0,))  # min rho = -1 < 0
    with pytest.raises(InvariantViolationError):
        body.radial_on_grid(default_grid(2))


def test_ball_requires_positive_radius():
    with pytest.raises(ValueError):
        Ball(2, 0.0)


def test_zonal_profile_interpolates():
    ts = np.linspace(0.0, 1.0, 11)
    rhos = 1.0 + ts
    Z = Zonal(3, ts, rhos)
    u = np.array([0.25, math.sqrt(1 - 0.25 ** 2), 0.0])
    assert abs(Z.radial(u) - 1.25) <= 1e-12


def test_zonal_exp_radial_formula():
    body = ZonalExp(3, (0.2, -0.4, 0.1))
    u = np.array([0.5, math.sqrt(0.75), 0.0])
    t = 0.5
    cheb = 0.2 - 0.4 * t + 0.1 * (2 * t * t - 1)
    assert abs(body.radial(u) - math.exp(cheb)) <= 1e-14


def test_zonal_bump_radial_formula():
    body = ZonalBump(2, 1.0, 3.0, 5.0, pole=-1)
    assert abs(body.radial(np.array([-1.0, 0.0])) - 4.0) <= 1e-14
    north = body.radial(np.array([1.0, 0.0]))
    assert abs(north - (1.0 + 3.0 * math.exp(-10.0))) <= 1e-14


def test_one_sided_cap_basics():
    assert abs(one_sided_cap(3, 0.0) - 0.5) <= 1e-14
    assert one_sided_cap(3, 1.0) <= 1e-14
    assert abs(one_sided_cap(3, -1.0) - 1.0) <= 1e-14
    t = np.linspace(-0.99, 0.99, 101)
    vals = one_sided_cap(3, t)
    assert np.all(np.diff(vals) < 0)


def test_one_sided_cap_matches_quadrature():
    grid = default_grid(3)
    for s in (0.3, -0.4, 0.75):
        indic = (grid.nodes[:, 0] >= s).astype(float)
        frac = grid.integrate(indic) / sphere_surface(3)
        # the indicator is discontinuous, so the product rule is only
        # first-order accurate here
        assert abs(frac - float(one_sided_cap(3, s))) <= 2e-2


def test_ratio_range_dilate_pair_degenerates():
    grid = default_grid(2)
    K = TrigFamily(2.0, (1.0,))
    a, b = ratio_range(K, Dilate(K, 3.0), grid)
    assert a == b == pytest.approx(3.0, rel=1e-12)


@pytest.mark.parametrize("body", [
    Ball(3, 1.25),
    Dilate(Ball(2, 1.0), 0.5),
    TrigFamily(2.0, (1.0,), (0.3,)),
    Zonal(3, np.linspace(0, 1, 5), np.linspace(1, 2, 5)),
    ZonalExp(3, (0.1, -0.2)),
    ZonalBump(2, 1.0, 2.0, 8.0, pole=1),
])
def test_serialization_roundtrip(body):
    clone = body_from_json(body.to_json())
    grid = default_grid(body.dim)
    assert np.allclose(clone.radial_on_grid(grid), body.radial_on_grid(grid),
                       rtol=0, atol=1e-14)


def test_grid_table_serialization_roundtrip():
    grid = default_grid(2)
    values = 1.0 + 0.1 * grid.nodes[:, 0] ** 2
    body = GridTable(grid, values)
    clone = body_from_dict(body.to_dict())
    assert np.allclose(clone.radial_on_grid(grid), values)


def test_radial_sum_serialization_roundtrip():
    M = RadialSum(Ball(2, 1.0), TrigFamily(2.0, (1.0,)), 0.5, 0.5)
    clone = body_from_dict(M.to_dict())
    grid = default_grid(2)
    assert np.allclose(clone.radial_on_grid(grid), M.radial_on_grid(grid))


def test_smooth_axial_mass_and_positivity():
    # flat density: floor only on [1, 2]
    knots = np.concatenate([[1.0] * 4, [1.5], [2.0] * 4])
    body = SmoothAxial(3, knots, np.zeros(5), floor=1.0)
    assert body.total_mass() == pytest.approx(1.0, rel=1e-12)
    grid = default_grid(3)
    rho = body.radial_on_grid(grid)
    assert np.all(rho >= 1.0 - 1e-9)
    assert np.all(rho <= 2.0 + 1e-9)
