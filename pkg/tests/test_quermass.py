"""Dual quermassintegrals, inequality suites, and pushforward moments."""

import math

import numpy as np
import pytest

from dualquermass import (
    Ball,
    Dilate,
    QuermassTuple,
    TrigFamily,
    ZonalExp,
    dual_af_verify,
    dual_quermass,
    hankel_pd_verify,
    monotonicity_verify,
    pushforward_moments,
    quermass_tuple,
    reciprocity_verify,
    default_grid,
)
from dualquermass.quermass import ContainmentError

PI = math.pi


def test_ball_pair_closed_form_real_indices():
    grid = default_grid(2)
    for lam in (0.5, 1.0, 2.0):
        for i in (-1.0, 0.0, 0.5, 1.0, 2.0):
            w = dual_quermass(Ball(2), Ball(2, lam), i, grid)
            assert abs(w - lam ** i * PI) <= 1e-10 * lam ** i * PI


def test_trig_pair_closed_form():
    grid = default_grid(2)
    tup = quermass_tuple(Ball(2), TrigFamily(2.0, (1.0,)), (0, 1, 2), grid)
    expected = (PI, 2 * PI, 4.5 * PI)
    for got, want in zip(tup.values, expected):
        assert abs(got - want) <= 1e-8 * want


def test_bi_homogeneity():
    grid = default_grid(3)
    K = ZonalExp(3, (0.1, 0.2))
    L = ZonalExp(3, (0.0, -0.3, 0.1))
    a, b = 1.7, 0.6
    for i in (-0.5, 0.0, 1.0, 2.5, 3.0):
        lhs = dual_quermass(Dilate(K, a), Dilate(L, b), i, grid)
        rhs = a ** (3 - i) * b ** i * dual_quermass(K, L, i, grid)
        assert abs(lhs / rhs - 1.0) <= 1e-12


def test_reciprocity_swap_symmetry():
    grid = default_grid(3)
    K = ZonalExp(3, (0.1, 0.2))
    L = Ball(3, 1.3)
    for i in (0.0, 0.7, 1.0, 2.0, 3.0):
        rep = reciprocity_verify(K, L, i, grid)
        assert rep["holds"], rep


def test_pushforward_moments_match_tuple():
    grid = default_grid(2)
    K = Ball(2)
    L = TrigFamily(2.0, (1.0,))
    indices = (-1.0, 0.0, 0.5, 1.0, 2.0)
    tup = quermass_tuple(K, L, indices, grid)
    _, moments = pushforward_moments(K, L, grid, indices)
    for i, want in zip(indices, tup.values):
        assert abs(moments[i] / want - 1.0) <= 1e-12


def test_dual_af_strict_for_non_dilates():
    grid = default_grid(2)
    tup = quermass_tuple(Ball(2), TrigFamily(2.0, (1.0,)), range(5), grid)
    for (i, j, k) in ((0, 1, 2), (1, 2, 3), (0, 2, 4)):
        rep = dual_af_verify(tup, i, j, k)
        assert rep["holds"] and not rep["equality"]


def test_dual_af_equality_for_dilates():
    grid = default_grid(2)
    K = TrigFamily(2.0, (1.0,))
    tup = quermass_tuple(K, Dilate(K, 1.7), range(5), grid)
    for (i, j, k) in ((0, 1, 2), (1, 2, 3), (0, 2, 4)):
        rep = dual_af_verify(tup, i, j, k)
        assert rep["holds"] and rep["equality"]


def test_hankel_pd_for_non_dilates_and_psd_for_dilates():
    grid = default_grid(2)
    K = Ball(2)
    L = TrigFamily(2.0, (1.0,))
    for m in (1, 2, 3):
        rep = hankel_pd_verify(K, L, grid, m)
        assert not rep["dilate"]
        assert rep["A_min_eig"] > rep["tau_A"]
        assert rep["B_min_eig"] > rep["tau_B"]
        assert rep["det_A"] > 0 and rep["det_B"] > 0
    rep = hankel_pd_verify(K, Dilate(K, 2.0), grid, 3)
    assert rep["dilate"]
    assert rep["A_min_eig"] >= -rep["tau_A"]
    assert min(rep["A_min_eig"], rep["B_min_eig"]) <= max(rep["tau_A"],
                                                          rep["tau_B"])


def test_monotonicity_for_contained_bodies():
    grid = default_grid(2)
    K = Ball(2, 3.0)
    L = TrigFamily(1.5, (0.5,))  # rho_L <= 2 < 3
    assert monotonicity_verify(K, L, 0.0, 1.0, grid)
    assert monotonicity_verify(K, L, 1.0, 2.5, grid)


def test_monotonicity_requires_containment():
    grid = default_grid(2)
    with pytest.raises(ContainmentError):
        monotonicity_verify(Ball(2, 1.0), Ball(2, 2.0), 0.0, 1.0, grid)


def test_tuple_requires_index_zero():
    with pytest.raises(ValueError):
        QuermassTuple(2, (1.0, 2.0), (1.0, 1.0))


def test_tuple_sorted_orders_indices():
    tup = QuermassTuple(2, (2.0, 0.0, 1.0), (3.0, 1.0, 2.0)).sorted()
    assert tup.indices == (0.0, 1.0, 2.0)
    assert tup.values == (1.0, 2.0, 3.0)
