"""Dual quermassintegrals for real indices and their inequality suites.

The central quantity is W_i(K, L) = (1/n) * integral over S^{n-1} of
rho_K^{n-i} * rho_L^i, defined for any real index i.  Powers are taken in
log space so that widely varying radial functions stay well conditioned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigvalsh

from .starbody import (
    DimensionMismatchError,
    SphereGrid,
    StarBody,
    ratio_range,
)

PD_EIG_REL_TOL = 1e-10
AF_SLACK_TOL = 1e-10
AF_EQUALITY_TOL = 1e-8


class ContainmentError(ValueError):
    """The containment precondition rho_L <= rho_K fails on the grid."""


@dataclass(frozen=True)
class QuermassTuple:
    """Index set I (with 0 in I) and positive values, targeting dimension dim."""

    dim: int
    indices: tuple
    values: tuple

    def __post_init__(self):
        idx = tuple(float(i) for i in self.indices)
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", vals)
        if len(idx) != len(vals):
            raise ValueError("index/value length mismatch")
        if len(set(idx)) != len(idx):
            raise ValueError("indices must be distinct")
        if 0.0 not in idx:
            raise ValueError("index set must contain 0")
        if any(v <= 0 for v in vals):
            raise ValueError("all values must be strictly positive")
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")

    def value(self, i: float) -> float:
        return self.values[self.indices.index(float(i))]

    def sorted(self) -> "QuermassTuple":
        order = np.argsort(self.indices)
        return QuermassTuple(self.dim,
                             tuple(self.indices[k] for k in order),
                             tuple(self.values[k] for k in order))

    def to_dict(self) -> dict:
        return {"dim": self.dim, "indices": list(self.indices),
                "values": list(self.values)}

    @staticmethod
    def from_dict(doc: dict) -> "QuermassTuple":
        return QuermassTuple(int(doc["dim"]), tuple(doc["indices"]),
                             tuple(doc["values"]))


@dataclass(frozen=True)
class PushforwardMeasure:
    """Atoms on [a, b] obtained by transporting (1/n) rho_K^n * w through
    the ratio rho_L/rho_K."""

    interval: tuple
    locations: np.ndarray
    masses: np.ndarray

    def total_mass(self) -> float:
        return float(np.sum(self.masses))

    def moment(self, i: float) -> float:
        return float(np.dot(self.locations ** i, self.masses))


def _log_radials(K: StarBody, L: StarBody, grid: SphereGrid):
    if K.dim != L.dim:
        raise DimensionMismatchError("bodies live in different dimensions")
    if grid.dim != K.dim:
        raise DimensionMismatchError("grid dimension does not match bodies")
    return np.log(K.radial_on_grid(grid)), np.log(L.radial_on_grid(grid))


def dual_quermass(K: StarBody, L: StarBody, i: float, grid: SphereGrid) -> float:
    """The i-th dual quermassintegral of (K, L), any real i."""
    log_k, log_l = _log_radials(K, L, grid)
    n = grid.dim
    vals = np.exp((n - i) * log_k + i * log_l)
    return grid.integrate(vals) / n


def quermass_tuple(K: StarBody, L: StarBody, index_set, grid: SphereGrid) -> QuermassTuple:
    """Componentwise dual quermassintegrals over an index set containing 0."""
    log_k, log_l = _log_radials(K, L, grid)
    n = grid.dim
    vals = [grid.integrate(np.exp((n - i) * log_k + i * log_l)) / n
            for i in index_set]
    return QuermassTuple(n, tuple(float(i) for i in index_set), tuple(vals))


def pushforward_moments(K: StarBody, L: StarBody, grid: SphereGrid, index_set):
    """Push-forward of (1/n) rho_K^n d(sigma) through rho_L/rho_K.

    Returns the atomic measure together with its generalized moments over
    the index set; these reproduce the dual quermassintegrals.
    """
    if K.dim != L.dim:
        raise DimensionMismatchError("bodies live in different dimensions")
    rho_k = K.radial_on_grid(grid)
    rho_l = L.radial_on_grid(grid)
    locs = rho_l / rho_k
    masses = rho_k ** grid.dim * grid.weights / grid.dim
    order = np.argsort(locs)
    a, b = ratio_range(K, L, grid)
    measure = PushforwardMeasure((a, b), locs[order], masses[order])
    moments = {float(i): measure.moment(i) for i in index_set}
    return measure, moments


def dual_af_verify(tup: QuermassTuple, i: float, j: float, k: float) -> dict:
    """Log-convexity check W_j^{k-i} <= W_i^{k-j} * W_k^{j-i} for i<j<k.

    The slack is the log-space difference; equality flags dilate pairs.
    """
    if not (i < j < k):
        raise ValueError("indices must satisfy i < j < k")
    wi, wj, wk = tup.value(i), tup.value(j), tup.value(k)
    slack = (k - j) * np.log(wi) + (j - i) * np.log(wk) - (k - i) * np.log(wj)
    return {
        "holds": bool(slack >= -AF_SLACK_TOL),
        "slack": float(slack),
        "equality": bool(abs(slack) <= AF_EQUALITY_TOL),
    }


def _hankel(seq: np.ndarray, order: int, offset: int) -> np.ndarray:
    return np.array([[seq[i + j + offset] for j in range(order)]
                     for i in range(order)])


def hankel_pd_verify(K: StarBody, L: StarBody, grid: SphereGrid, m: int) -> dict:
    """Hankel positivity of the dual quermassintegral sequence.

    Builds A_m = (W_{i+j})_{i,j=0..m} and B_m = (W_{i+j+1})_{i,j=0..m-1}
    and reports their smallest eigenvalues and determinants.  Both are
    strictly positive definite for non-dilate pairs and only positive
    semi-definite on the dilate locus.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    tup = quermass_tuple(K, L, range(2 * m + 1), grid)
    seq = np.asarray(tup.values)
    a_mat = _hankel(seq, m + 1, 0)
    b_mat = _hankel(seq, m, 1)
    a_eigs = eigvalsh(a_mat)
    b_eigs = eigvalsh(b_mat)
    return {
        "m": m,
        "A_min_eig": float(a_eigs[0]),
        "B_min_eig": float(b_eigs[0]),
        "det_A": float(np.linalg.det(a_mat)),
        "det_B": float(np.linalg.det(b_mat)),
        "tau_A": pd_threshold(a_mat),
        "tau_B": pd_threshold(b_mat),
        "dilate": is_dilate(K, L, grid),
    }


def pd_threshold(mat: np.ndarray) -> float:
    """Relative positive-definiteness threshold for a symmetric matrix."""
    return PD_EIG_REL_TOL * max(1.0, float(np.max(np.abs(mat))))


def is_dilate(K: StarBody, L: StarBody, grid: SphereGrid) -> bool:
    a, b = ratio_range(K, L, grid)
    return a == b


def reciprocity_verify(K: StarBody, L: StarBody, i: float,
                       grid: SphereGrid) -> dict:
    """Swap symmetry W_i(K, L) = W_{n-i}(L, K); reports both values."""
    n = grid.dim
    lhs = dual_quermass(K, L, i, grid)
    rhs = dual_quermass(L, K, n - i, grid)
    rel = abs(lhs - rhs) / max(abs(lhs), abs(rhs))
    return {"i": float(i), "lhs": lhs, "rhs": rhs, "rel_diff": rel,
            "holds": bool(rel <= 1e-10)}


def monotonicity_verify(K: StarBody, L: StarBody, i: float, j: float,
                        grid: SphereGrid) -> bool:
    """For L contained in K and i < j, W_i >= W_j.

    The containment is certified pointwise on the grid; a violation is a
    precondition error, not a negative verdict.
    """
    if not i < j:
        raise ValueError("requires i < j")
    rho_k = K.radial_on_grid(grid)
    rho_l = L.radial_on_grid(grid)
    if np.any(rho_l > rho_k * (1.0 + 1e-12)):
        raise ContainmentError("rho_L <= rho_K fails on the grid")
    wi = dual_quermass(K, L, i, grid)
    wj = dual_quermass(K, L, j, grid)
    return bool(wi >= wj - 1e-10 * max(wi, wj))
