"""Star bodies, radial functions and spherical quadrature grids.

A star body is represented by its radial function on the unit sphere.
Several analytic families are provided (balls, dilates, planar
trigonometric bodies, zonal table bodies) together with the radial-sum
algebra.  Quadrature grids integrate continuous functions against the
spherical Lebesgue measure; n=2 uses the equi-angular trapezoid rule,
n>=3 a Gauss-Jacobi product rule in spherical coordinates with the
sin-power densities folded into the weights.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.interpolate import BSpline
from scipy.special import betainc, roots_jacobi

UNIT_NORM_TOL = 1e-9
DILATE_DETECT_TOL = 1e-8


class DimensionMismatchError(ValueError):
    """Operands live in different ambient dimensions."""


class InvariantViolationError(RuntimeError):
    """A structural invariant (e.g. positivity of a radial function) failed."""


def ball_volume(n: int) -> float:
    """Volume of the n-dimensional unit Euclidean ball."""
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def sphere_surface(n: int) -> float:
    """Total spherical measure of S^{n-1}, equal to n times the unit-ball volume."""
    return n * ball_volume(n)


# ---------------------------------------------------------------------------
# Quadrature grids
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SphereGrid:
    """Quadrature nodes and positive weights on S^{n-1}.

    ``nodes`` has shape (N, dim) with unit rows, ``weights`` shape (N,).
    The weights sum to the total spherical measure of S^{n-1}.
    """

    dim: int
    nodes: np.ndarray
    weights: np.ndarray
    resolution: int

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def size(self) -> int:
        return self.weights.shape[0]

    def integrate(self, values: np.ndarray) -> float:
        """Integrate node values against the spherical measure."""
        return float(np.dot(np.asarray(values, dtype=float), self.weights))


def build_grid(n: int, resolution: int) -> SphereGrid:
    """Build a quadrature grid on S^{n-1}.

    n=1 is the two-point counting measure on {+1,-1}; n=2 an equi-angular
    rule with 2*resolution nodes; n>=3 a product of Gauss-Jacobi rules in
    the polar cosines (resolution+1 points each) with a uniform azimuth
    rule of 2*resolution+2 points.
    """
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    if resolution < 1:
        raise ValueError(f"resolution must be >= 1, got {resolution}")

    if n == 1:
        nodes = np.array([[1.0], [-1.0]])
        weights = np.array([1.0, 1.0])
        return SphereGrid(1, nodes, weights, resolution)

    if n == 2:
        m = 2 * resolution
        theta = 2.0 * np.pi * np.arange(m) / m
        nodes = np.column_stack([np.cos(theta), np.sin(theta)])
        weights = np.full(m, 2.0 * np.pi / m)
        return SphereGrid(2, nodes, weights, resolution)

    # n >= 3: spherical coordinates with n-2 polar angles and one azimuth.
    # The k-th polar angle carries density (sin phi)^{n-2-k}; substituting
    # t = cos phi turns it into the Jacobi weight (1-t^2)^{(n-3-k)/2}.
    q = resolution + 1
    polar = []
    for k in range(n - 2):
        alpha = (n - 3 - k) / 2.0
        t, w = roots_jacobi(q, alpha, alpha)
        polar.append((t, w))
    m_az = 2 * resolution + 2
    theta = 2.0 * np.pi * np.arange(m_az) / m_az
    az_w = np.full(m_az, 2.0 * np.pi / m_az)

    t_axes = [p[0] for p in polar] + [theta]
    w_axes = [p[1] for p in polar] + [az_w]
    mesh = np.meshgrid(*t_axes, indexing="ij")
    wmesh = np.meshgrid(*w_axes, indexing="ij")

    weights = np.ones_like(wmesh[0])
    for w in wmesh:
        weights = weights * w
    weights = weights.ravel()

    total = weights.size
    nodes = np.empty((total, n))
    prefix = np.ones(total)
    for k in range(n - 2):
        t = mesh[k].ravel()
        nodes[:, k] = prefix * t
        prefix = prefix * np.sqrt(np.maximum(0.0, 1.0 - t * t))
    ang = mesh[n - 2].ravel()
    nodes[:, n - 2] = prefix * np.cos(ang)
    nodes[:, n - 1] = prefix * np.sin(ang)

    norms = np.linalg.norm(nodes, axis=1)
    nodes /= norms[:, None]
    return SphereGrid(n, nodes, weights, resolution)


_DEFAULT_RESOLUTION = {1: 1, 2: 2048, 3: 127}
_MAX_GRID_NODES = 2_000_000


def default_resolution(n: int) -> int:
    """Default refinement parameter per dimension (node budget <= 2e6 for n>=4)."""
    if n in _DEFAULT_RESOLUTION:
        return _DEFAULT_RESOLUTION[n]
    res = 1
    while True:
        nxt = res + 1
        if (nxt + 1) ** (n - 2) * (2 * nxt + 2) > _MAX_GRID_NODES or nxt > 63:
            return res
        res = nxt


@lru_cache(maxsize=16)
def default_grid(n: int, resolution: int | None = None) -> SphereGrid:
    """Cached grid at the default (or given) resolution."""
    return build_grid(n, resolution if resolution is not None else default_resolution(n))


# ---------------------------------------------------------------------------
# Star bodies
# ---------------------------------------------------------------------------

def _check_unit(u: np.ndarray, dim: int) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != dim:
        raise DimensionMismatchError(
            f"direction has dimension {u.shape[-1]}, body has dimension {dim}")
    norms = np.linalg.norm(u, axis=-1)
    if np.any(np.abs(norms - 1.0) > UNIT_NORM_TOL):
        raise ValueError("radial functions are defined on unit vectors only")
    return u


class StarBody:
    """Base class: a positive continuous radial function on S^{n-1}.

    Bodies are immutable after construction and safe to share across
    threads.  ``radial`` is vectorized over the leading axes of ``u``.
    """

    dim: int

    def radial(self, u) -> np.ndarray | float:
        u = _check_unit(u, self.dim)
        scalar = u.ndim == 1
        vals = self._radial(np.atleast_2d(u))
        if np.any(vals <= 0.0) or not np.all(np.isfinite(vals)):
            raise InvariantViolationError("radial function must be positive and finite")
        return float(vals[0]) if scalar else vals

    def radial_on_grid(self, grid: SphereGrid) -> np.ndarray:
        if grid.dim != self.dim:
            raise DimensionMismatchError(
                f"grid dimension {grid.dim} != body dimension {self.dim}")
        return self.radial(grid.nodes)

    def _radial(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class Ball(StarBody):
    dim: int
    radius: float = 1.0

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("ball radius must be positive")

    def _radial(self, u):
        return np.full(u.shape[:-1], float(self.radius))

    def to_dict(self):
        return {"dim": self.dim, "kind": "ball", "radius": self.radius}


@dataclass(frozen=True)
class Dilate(StarBody):
    base: StarBody
    factor: float

    def __post_init__(self):
        if self.factor <= 0:
            raise ValueError("dilation factor must be positive")

    @property
    def dim(self):  # type: ignore[override]
        return self.base.dim

    def _radial(self, u):
        return self.factor * self.base._radial(u)

    def to_dict(self):
        return {"dim": self.dim, "kind": "dilate", "factor": self.factor,
                "base": self.base.to_dict()}


@dataclass(frozen=True)
class TrigFamily(StarBody):
    """Planar body with rho(theta) = c0 + sum c_k cos(k theta) + s_k sin(k theta)."""

    c0: float
    cos_coeffs: tuple = ()
    sin_coeffs: tuple = ()
    dim: int = field(default=2, init=False)

    def __post_init__(self):
        # sufficient positivity condition; exact minimum checked lazily on use
        if self.c0 <= 0:
            raise ValueError("constant term must be positive")

    def _radial(self, u):
        theta = np.arctan2(u[..., 1], u[..., 0])
        vals = np.full(theta.shape, float(self.c0))
        for k, c in enumerate(self.cos_coeffs, start=1):
            vals += c * np.cos(k * theta)
        for k, s in enumerate(self.sin_coeffs, start=1):
            vals += s * np.sin(k * theta)
        return vals

    def to_dict(self):
        return {"dim": 2, "kind": "trig", "c0": self.c0,
                "cos": list(self.cos_coeffs), "sin": list(self.sin_coeffs)}


@dataclass(frozen=True)
class Zonal(StarBody):
    """Body depending on u only through |u_1|, stored as a monotone table.

    ``ts`` are increasing sample points of |u_1| in [0,1]; ``rhos`` the
    corresponding radii, monotone in one direction.  Evaluation is
    piecewise linear.
    """

    dim: int
    ts: np.ndarray
    rhos: np.ndarray

    def __post_init__(self):
        ts = np.asarray(self.ts, dtype=float)
        rhos = np.asarray(self.rhos, dtype=float)
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "rhos", rhos)
        if ts.ndim != 1 or ts.shape != rhos.shape or ts.size < 2:
            raise ValueError("zonal table needs matching 1-d arrays of length >= 2")
        if np.any(np.diff(ts) <= 0) or ts[0] < 0 or ts[-1] > 1 + 1e-12:
            raise ValueError("zonal abscissae must be increasing within [0, 1]")
        d = np.diff(rhos)
        if not (np.all(d >= -1e-12) or np.all(d <= 1e-12)):
            raise ValueError("zonal profile must be monotone")
        if np.any(rhos <= 0):
            raise InvariantViolationError("zonal profile must be positive")
        ts.setflags(write=False)
        rhos.setflags(write=False)

    def _radial(self, u):
        return np.interp(np.abs(u[..., 0]), self.ts, self.rhos)

    def to_dict(self):
        return {"dim": self.dim, "kind": "zonal",
                "profile": [[float(t), float(r)] for t, r in zip(self.ts, self.rhos)]}


@dataclass(frozen=True)
class ZonalExp(StarBody):
    """Log-Chebyshev zonal body: rho(u) = exp(sum_k c_k T_k(u_1)).

    Smooth and positive by construction, so product quadrature rules
    resolve its generalized moments spectrally.
    """

    dim: int
    coeffs: tuple

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionMismatchError("dimension must be >= 1")
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if len(self.coeffs) == 0:
            raise ValueError("log-Chebyshev body needs at least one coefficient")

    def _radial(self, u):
        return np.exp(np.polynomial.chebyshev.chebval(
            u[..., 0], np.asarray(self.coeffs)))

    def to_dict(self):
        return {"dim": self.dim, "kind": "zonal_exp",
                "coeffs": list(self.coeffs)}


@dataclass(frozen=True)
class ZonalBump(StarBody):
    """Constant base plus a smooth exponential bump at one pole.

    rho(u) = base + amp * exp(kappa * (pole * u_1 - 1)), pole = +1 or -1.
    Pairs of bumps at opposite poles give smooth bodies whose radial
    functions have arbitrarily small normalized correlation.
    """

    dim: int
    base: float
    amp: float
    kappa: float
    pole: int = 1

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionMismatchError("dimension must be >= 1")
        if self.base <= 0 or self.amp < 0 or self.kappa <= 0:
            raise InvariantViolationError(
                "bump body needs base > 0, amp >= 0, kappa > 0")
        if self.pole not in (-1, 1):
            raise ValueError("pole must be +1 or -1")

    def _radial(self, u):
        return self.base + self.amp * np.exp(
            self.kappa * (self.pole * u[..., 0] - 1.0))

    def to_dict(self):
        return {"dim": self.dim, "kind": "zonal_bump", "base": self.base,
                "amp": self.amp, "kappa": self.kappa, "pole": self.pole}


def one_sided_cap(n: int, t) -> np.ndarray:
    """Normalized spherical measure of the cap {v_1 >= t} on S^{n-1}.

    Smooth and strictly decreasing on (-1, 1), with value 1/2 at t=0.
    """
    t_arr = np.asarray(t, dtype=float)
    s = np.abs(t_arr)
    if n == 1:
        half = np.where(s > 0, 0.0, 0.5)
    else:
        half = 0.5 * (1.0 - betainc(0.5, (n - 1) / 2.0, s * s))
    return np.where(t_arr >= 0, half, 1.0 - half)


@dataclass(frozen=True)
class SmoothAxial(StarBody):
    """Body of revolution whose radius grows smoothly along the first axis.

    The profile is the exact quantile transform of a density on [a, b]
    (uniform floor plus a non-negative cubic spline) composed with the
    one-sided cap fraction of u_1.  The level sets push the spherical
    measure forward onto the density, so the generalized moments of the
    density are reproduced exactly, and rho inherits the smoothness of
    the density with no fold at u_1 = 0.
    """

    dim: int
    knots: np.ndarray
    coeffs: np.ndarray
    floor: float

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float)
        coeffs = np.asarray(self.coeffs, dtype=float)
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "coeffs", coeffs)
        if knots.ndim != 1 or coeffs.ndim != 1 or coeffs.size != knots.size - 4:
            raise ValueError("need a clamped cubic knot vector with matching coefficients")
        if knots[0] <= 0 or np.any(np.diff(knots) < 0):
            raise ValueError("knots must be non-decreasing within (0, inf)")
        if self.floor <= 0:
            raise ValueError("density floor must be positive")
        if np.any(coeffs < 0):
            raise InvariantViolationError("spline coefficients must be non-negative")
        knots.setflags(write=False)
        coeffs.setflags(write=False)

    @property
    def interval(self) -> tuple[float, float]:
        return float(self.knots[0]), float(self.knots[-1])

    def density(self, t) -> np.ndarray:
        """Density floor + spline, vectorized over t in [a, b]."""
        return self.floor + BSpline(self.knots, self.coeffs, 3)(t)

    def cumulative(self, t) -> np.ndarray:
        """Mass of [a, t] under the density."""
        a = self.knots[0]
        spline_mass = BSpline(self.knots, self.coeffs, 3).antiderivative()
        return self.floor * (np.asarray(t, dtype=float) - a) + spline_mass(t) - spline_mass(a)

    def total_mass(self) -> float:
        return float(self.cumulative(self.knots[-1]))

    def _radial(self, u):
        a, b = self.interval
        spline = BSpline(self.knots, self.coeffs, 3)
        mass = spline.antiderivative()
        mass0 = float(mass(a))

        def cum(t):
            return self.floor * (t - a) + mass(t) - mass0

        total = cum(np.asarray(b))
        target = (1.0 - one_sided_cap(self.dim, u[..., 0])) * total
        # warm start from a monotone cumulative table, then Newton polish
        t_grid = np.linspace(a, b, 513)
        t = np.interp(target, cum(t_grid), t_grid)
        for _ in range(50):
            resid = cum(t) - target
            if np.max(np.abs(resid)) <= 1e-14 * total:
                break
            t = np.clip(t - resid / (self.floor + spline(t)), a, b)
        return t

    def to_dict(self):
        return {"dim": self.dim, "kind": "smooth_axial", "floor": self.floor,
                "knots": self.knots.tolist(), "coeffs": self.coeffs.tolist()}


@dataclass(frozen=True)
class GridTable(StarBody):
    """Radial samples bound to a grid, evaluated by nearest-node lookup."""

    grid: SphereGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.shape != (self.grid.size,):
            raise ValueError("one value per grid node required")
        if np.any(vals <= 0):
            raise InvariantViolationError("grid table values must be positive")
        vals.setflags(write=False)

    @property
    def dim(self):  # type: ignore[override]
        return self.grid.dim

    def _radial(self, u):
        flat = u.reshape(-1, self.grid.dim)
        idx = np.argmax(flat @ self.grid.nodes.T, axis=1)
        return self.values[idx].reshape(u.shape[:-1])

    def to_dict(self):
        return {"dim": self.dim, "kind": "grid_table",
                "resolution": self.grid.resolution,
                "values": self.values.tolist()}


@dataclass(frozen=True)
class RadialSum(StarBody):
    left: StarBody
    right: StarBody
    mu: float
    lam: float

    def __post_init__(self):
        if self.left.dim != self.right.dim:
            raise DimensionMismatchError("radial sum requires equal dimensions")
        if self.mu < 0 or self.lam < 0:
            raise ValueError("radial sum weights must be non-negative")
        if self.mu == 0 and self.lam == 0:
            raise ValueError("radial sum with both weights zero is empty")

    @property
    def dim(self):  # type: ignore[override]
        return self.left.dim

    def _radial(self, u):
        return self.mu * self.left._radial(u) + self.lam * self.right._radial(u)

    def to_dict(self):
        return {"dim": self.dim, "kind": "radial_sum", "mu": self.mu, "lam": self.lam,
                "left": self.left.to_dict(), "right": self.right.to_dict()}


def radial_sum(K: StarBody, L: StarBody, mu: float, lam: float) -> StarBody:
    """Radial linear combination mu*K +~ lam*L.

    When both operands are the same object this collapses to a dilate, so
    that the dilation identity holds exactly at evaluation time.
    """
    if K.dim != L.dim:
        raise DimensionMismatchError("radial sum requires equal dimensions")
    if mu < 0 or lam < 0:
        raise ValueError("radial sum weights must be non-negative")
    if mu + lam <= 0:
        raise ValueError("radial sum with both weights zero is empty")
    if K is L:
        return Dilate(K, mu + lam)
    if lam == 0:
        return K if mu == 1.0 else Dilate(K, mu)
    if mu == 0:
        return L if lam == 1.0 else Dilate(L, lam)
    return RadialSum(K, L, mu, lam)


def ratio_range(K: StarBody, L: StarBody, grid: SphereGrid) -> tuple[float, float]:
    """Range (min, max) of rho_L/rho_K over the grid.

    If the ratio is constant within relative sup-norm 1e-8 the pair is
    treated as dilates and a degenerate range (c, c) is returned.
    """
    if K.dim != L.dim:
        raise DimensionMismatchError("ratio_range requires equal dimensions")
    f = L.radial_on_grid(grid) / K.radial_on_grid(grid)
    a, b = float(np.min(f)), float(np.max(f))
    mid = 0.5 * (a + b)
    if b - a <= DILATE_DETECT_TOL * mid:
        return mid, mid
    return a, b


def is_dilate_pair(K: StarBody, L: StarBody, grid: SphereGrid) -> bool:
    a, b = ratio_range(K, L, grid)
    return a == b


def volume(K: StarBody, grid: SphereGrid) -> float:
    """Volume via (1/n) integral of rho^n."""
    rho = K.radial_on_grid(grid)
    return grid.integrate(rho ** grid.dim) / grid.dim


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def body_from_dict(doc: dict) -> StarBody:
    kind = doc["kind"]
    if kind == "ball":
        return Ball(int(doc["dim"]), float(doc["radius"]))
    if kind == "dilate":
        return Dilate(body_from_dict(doc["base"]), float(doc["factor"]))
    if kind == "trig":
        return TrigFamily(float(doc["c0"]), tuple(doc.get("cos", ())),
                          tuple(doc.get("sin", ())))
    if kind == "zonal":
        prof = np.asarray(doc["profile"], dtype=float)
        return Zonal(int(doc["dim"]), prof[:, 0], prof[:, 1])
    if kind == "zonal_exp":
        return ZonalExp(int(doc["dim"]), tuple(doc["coeffs"]))
    if kind == "zonal_bump":
        return ZonalBump(int(doc["dim"]), float(doc["base"]), float(doc["amp"]),
                         float(doc["kappa"]), int(doc.get("pole", 1)))
    if kind == "smooth_axial":
        return SmoothAxial(int(doc["dim"]), np.asarray(doc["knots"], dtype=float),
                           np.asarray(doc["coeffs"], dtype=float), float(doc["floor"]))
    if kind == "grid_table":
        grid = default_grid(int(doc["dim"]), int(doc["resolution"]))
        return GridTable(grid, np.asarray(doc["values"], dtype=float))
    if kind == "radial_sum":
        return RadialSum(body_from_dict(doc["left"]), body_from_dict(doc["right"]),
                         float(doc["mu"]), float(doc["lam"]))
    raise ValueError(f"unknown body kind {kind!r}")


def body_from_json(text: str) -> StarBody:
    return body_from_dict(json.loads(text))
