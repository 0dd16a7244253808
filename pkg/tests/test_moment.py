"""Moment-cone feasibility: parity-split Hankel criteria and interval search."""

import math

import numpy as np
import pytest
from scipy.optimize import linprog

from dualquermass import (
    Interval,
    QuermassTuple,
    cone_interior_check,
    hankel_split,
    hausdorff_feasible,
    interval_search,
    positivity_cross_check,
)
from dualquermass.moment import (
    BOUNDARY,
    GEOMETRIC_RAY,
    INFEASIBLE,
    INTERIOR,
    OUTSIDE,
    STRICTLY_FEASIBLE,
    IntervalMeasure,
    geometric_ray_lambda,
    sample_nonneg_polynomial,
    split_min_margin,
)

PI = math.pi


def brute_force_feasible(values, interval, n_atoms=400):
    """Independent oracle: atomic measure matching the moments by LP."""
    t = np.linspace(interval.a, interval.b, n_atoms)
    A_eq = np.stack([t ** i for i in range(len(values))])
    res = linprog(np.zeros(n_atoms), A_eq=A_eq, b_eq=list(values),
                  bounds=[(0, None)] * n_atoms, method="highs")
    return bool(res.success)


def test_two_atom_moments_classified_boundary():
    # unit masses at 1 and 3: (2, 4, 10), rank-deficient on [1, 3]
    values = (2.0, 4.0, 10.0)
    iv = Interval(1.0, 3.0)
    assert hausdorff_feasible(values, iv) == BOUNDARY
    # eigenvalue oracle: the odd-part matrices are singular by construction
    A, B = hankel_split(values, iv)
    eigs = np.concatenate([np.linalg.eigvalsh(A), np.linalg.eigvalsh(B)])
    assert np.min(np.abs(eigs)) <= 1e-10 * max(1.0, np.max(np.abs(eigs)))
    assert brute_force_feasible(values, iv)


def test_lebesgue_moments_strictly_feasible():
    # Lebesgue measure on [1, 3]: moments (2, 4, 26/3)
    values = (2.0, 4.0, 26.0 / 3.0)
    iv = Interval(1.0, 3.0)
    assert hausdorff_feasible(values, iv) == STRICTLY_FEASIBLE
    A, B = hankel_split(values, iv)
    assert np.linalg.eigvalsh(A)[0] > 1e-10
    assert np.linalg.eigvalsh(B)[0] > 1e-10
    assert brute_force_feasible(values, iv)


def test_arithmetic_sequence_infeasible():
    values = (1.0, 2.0, 3.0)
    iv = Interval(0.5, 4.0)
    assert hausdorff_feasible(values, iv) == INFEASIBLE
    # eigenvalue oracle: det [[1,2],[2,3]] = -1
    A, _ = hankel_split(values, iv)
    assert np.linalg.det(A) == pytest.approx(-1.0, abs=1e-10)
    assert not brute_force_feasible(values, iv)


def test_hankel_split_matches_brute_force_construction():
    values = (2.0, 4.0, 26.0 / 3.0, 20.0, 48.8)
    a, b = 1.0, 3.0
    A, B = hankel_split(values, Interval(a, b))
    w = np.asarray(values)
    A_want = np.array([[w[j + k] for k in range(3)] for j in range(3)])
    B_want = np.array([[(a + b) * w[j + k + 1] - a * b * w[j + k] - w[j + k + 2]
                        for k in range(2)] for j in range(2)])
    assert np.allclose(A, A_want) and np.allclose(B, B_want)


def test_odd_length_split_uses_endpoint_shifts():
    values = (2.0, 4.0, 26.0 / 3.0, 20.0)
    a, b = 1.0, 3.0
    A, B = hankel_split(values, Interval(a, b))
    w = np.asarray(values)
    A_want = np.array([[w[j + k + 1] - a * w[j + k] for k in range(2)]
                       for j in range(2)])
    B_want = np.array([[b * w[j + k] - w[j + k + 1] for k in range(2)]
                       for j in range(2)])
    assert np.allclose(A, A_want) and np.allclose(B, B_want)


def test_geometric_ray_detection():
    tup = QuermassTuple(2, (0, 1, 2), (PI, 2 * PI, 4 * PI))
    assert geometric_ray_lambda(tup) == pytest.approx(2.0, rel=1e-10)
    verdict = interval_search(tup)
    assert verdict.status == GEOMETRIC_RAY
    assert verdict.ray_lambda == pytest.approx(2.0, rel=1e-10)


def test_interval_search_interior_with_density_witness():
    tup = QuermassTuple(2, (0, 1, 2), (PI, 2 * PI, 4.5 * PI))
    verdict = interval_search(tup)
    assert verdict.status == INTERIOR
    assert verdict.density is not None and verdict.density.floor > 0
    for i, w in zip(tup.indices, tup.values):
        assert abs(verdict.density.moment(i) / w - 1.0) <= 1e-8


def test_interval_search_outside_with_certificate():
    tup = QuermassTuple(2, (0, 1, 2), (1.0, 2.0, 3.0))
    verdict = interval_search(tup)
    assert verdict.status == OUTSIDE
    assert verdict.certificate is not None


def test_cone_interior_check_real_indices():
    measure = IntervalMeasure(Interval(0.5, 2.0), ((1.0, 0.4),), 0.25)
    indices = (-1.0, 0.0, 0.5, 1.5)
    values = tuple(measure.moment(i) for i in indices)
    tup = QuermassTuple(2, indices, values)
    verdict = cone_interior_check(tup, Interval(0.4, 2.5))
    assert verdict.status == INTERIOR


def test_split_margin_positive_iff_interior():
    iv = Interval(1.0, 3.0)
    assert split_min_margin((2.0, 4.0, 26.0 / 3.0), iv) > 0
    assert split_min_margin((2.0, 4.0, 10.0), iv) <= 1e-10
    assert split_min_margin((1.0, 2.0, 3.0), iv) < 0


def test_positivity_cross_check_agrees_with_feasibility():
    iv = Interval(1.0, 3.0)
    good = positivity_cross_check((2.0, 4.0, 26.0 / 3.0), iv, trials=200, seed=7)
    assert good["pass"]
    bad = positivity_cross_check((1.0, 2.0, 3.0), iv, trials=200, seed=7)
    assert not bad["pass"]
    assert bad["witness_coeffs"] is not None


def test_sampled_polynomials_are_nonnegative():
    rng = np.random.default_rng(3)
    iv = Interval(0.5, 2.0)
    t = np.linspace(iv.a, iv.b, 257)
    for m in (2, 3, 4, 5):
        for _ in range(25):
            coeffs = sample_nonneg_polynomial(m, iv, rng)
            vals = np.polynomial.polynomial.polyval(t, coeffs)
            assert np.min(vals) >= -1e-12 * max(1.0, np.max(np.abs(vals)))


def test_interval_measure_moment_matches_quadrature():
    measure = IntervalMeasure(Interval(1.0, 2.0), ((1.5, 2.0),), 0.5)
    # floor part integral of t^2 over [1,2] is 7/3
    want = 0.5 * 7.0 / 3.0 + 2.0 * 1.5 ** 2
    assert measure.moment(2.0) == pytest.approx(want, rel=1e-12)
