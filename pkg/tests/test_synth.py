"""Witness synthesis: measure fitting, layer-cake bodies, realization."""

import math

import numpy as np
import pytest

from dualquermass import (
    Ball,
    Interval,
    NotRealizableError,
    QuermassTuple,
    SmoothAxial,
    body_from_measure,
    cap_fraction,
    fit_smooth_density,
    measure_from_moments,
    quermass_tuple,
    realize_pair,
    zonal_exp_body,
    ball_volume,
    default_grid,
)
from dualquermass.moment import GEOMETRIC_RAY, IntervalMeasure
from dualquermass.synth import smooth_fit_moment

PI = math.pi


def test_measure_from_moments_reproduces_moments():
    vol = ball_volume(2)
    tup = QuermassTuple(2, (0, 1, 2), (vol, 2 * vol, 4.5 * vol))
    measure = measure_from_moments(tup, Interval(0.5, 4.0))
    assert measure.floor > 0
    for i, w in zip(tup.indices, tup.values):
        assert abs(measure.moment(i) / w - 1.0) <= 1e-8


def test_body_from_measure_pushes_measure_forward():
    vol = ball_volume(3)
    iv = Interval(1.0, 2.0)
    measure = IntervalMeasure(iv, (), vol / iv.length)
    L = body_from_measure(measure, 3)
    grid = default_grid(3)
    tup = quermass_tuple(Ball(3), L, (0, 1, 2, 3), grid)
    for i, w in zip(tup.indices, tup.values):
        assert abs(w / measure.moment(i) - 1.0) <= 1e-4


def test_realize_pair_roundtrip_n2():
    tup = QuermassTuple(2, (0, 1, 2), (PI, 2 * PI, 4.5 * PI))
    K, L, verdict = realize_pair(tup)
    out = quermass_tuple(K, L, tup.indices, default_grid(2))
    dev = max(abs(a / b - 1.0) for a, b in zip(out.values, tup.values))
    assert dev <= 1e-6


def test_realize_pair_roundtrip_n3():
    vol = ball_volume(3)
    measure = IntervalMeasure(Interval(0.8, 2.0), ((1.2, 0.3),), 0.5)
    measure = measure.scaled(vol / measure.total_mass())
    values = tuple(measure.moment(i) for i in range(4))
    tup = QuermassTuple(3, (0, 1, 2, 3), values)
    K, L, _ = realize_pair(tup)
    out = quermass_tuple(K, L, tup.indices, default_grid(3))
    dev = max(abs(a / b - 1.0) for a, b in zip(out.values, tup.values))
    assert dev <= 1e-6


def test_realize_pair_geometric_ray_gives_dilates():
    tup = QuermassTuple(2, (0, 1, 2), (PI, 2 * PI, 4 * PI))
    K, L, verdict = realize_pair(tup)
    assert verdict.status == GEOMETRIC_RAY
    grid = default_grid(2)
    ratio = L.radial_on_grid(grid) / K.radial_on_grid(grid)
    assert np.allclose(ratio, 2.0, rtol=1e-10)


def test_realize_pair_refuses_infeasible_tuple():
    tup = QuermassTuple(2, (0, 1, 2), (1.0, 2.0, 3.0))
    with pytest.raises(NotRealizableError):
        realize_pair(tup)


def test_zonal_exp_body_matches_target_moments():
    vol = ball_volume(3)
    values = (vol, 0.9 * vol, 0.95 * vol, 1.2 * vol)
    body, dev = zonal_exp_body((0, 1, 2, 3), values, 3)
    assert body is not None and dev <= 1e-8
    out = quermass_tuple(Ball(3), body, (0, 1, 2, 3), default_grid(3))
    for got, want in zip(out.values, values):
        assert abs(got / want - 1.0) <= 1e-8


def test_fit_smooth_density_moments():
    iv = Interval(0.5, 3.0)
    measure = IntervalMeasure(iv, ((1.0, 0.7), (2.0, 0.4)), 0.3)
    indices = (0.0, 1.0, 2.0)
    values = tuple(measure.moment(i) for i in indices)
    fit = fit_smooth_density(indices, values, iv)
    assert fit is not None
    for i, w in zip(indices, values):
        assert abs(smooth_fit_moment(fit, i) / w - 1.0) <= 1e-8
    knots, coeffs, floor = fit
    assert floor > 0 and np.all(coeffs >= 0)


def test_smooth_axial_pushforward_identity():
    iv = Interval(0.5, 3.0)
    measure = IntervalMeasure(iv, ((1.0, 0.7), (2.0, 0.4)), 0.3)
    indices = (0.0, 1.0, 2.0, 3.0)
    vol = ball_volume(3)
    values = tuple(vol / measure.total_mass() * measure.moment(i)
                   for i in indices)
    fit = fit_smooth_density(indices, values, iv)
    assert fit is not None
    body = SmoothAxial(3, *fit)
    out = quermass_tuple(Ball(3), body, indices, default_grid(3))
    for i, w in zip(indices, values):
        assert abs(out.value(i) / w - 1.0) <= 1e-6


def test_cap_fraction_endpoints():
    assert cap_fraction(3, 0.0) == pytest.approx(1.0)
    assert cap_fraction(3, 1.0) <= 1e-12
    s = np.linspace(0.0, 1.0, 51)
    vals = np.asarray(cap_fraction(3, s))
    assert np.all(np.diff(vals) <= 0)
