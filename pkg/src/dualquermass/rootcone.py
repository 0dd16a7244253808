"""Membership in the cone of dual Steiner polynomial roots.

For each dimension n the upper-half-plane roots of all dual Steiner
polynomials form a convex, half-open cone containing the negative real
axis.  n=2 has the exact law Re z < 0; n=3 carries the necessary slope
bound Im > sqrt(3) * Re for positive real parts.  General membership is
searched constructively: the remaining roots are parametrized, the
coefficient tuple is tested for realizability, and successful witnesses
are realized and re-verified.  OUT is certificate-only; failed searches
stay UNKNOWN.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, linprog, minimize

from . import moment as mm
from .moment import Interval
from .quermass import QuermassTuple, quermass_tuple
from .starbody import (Ball, Dilate, StarBody, ZonalBump, ball_volume,
                       radial_sum, default_grid)
from .steinerpoly import (
    DualSteinerPoly,
    build_poly,
    build_poly_from_tuple,
    poly_roots,
)
from .synth import NotRealizableError, realize_pair

IN = "IN"
OUT = "OUT"
UNKNOWN = "UNKNOWN"

SQRT3 = math.sqrt(3.0)
WITNESS_ROOT_TOL = 1e-7
DEFAULT_MULTISTARTS = 16


@dataclass(frozen=True)
class Witness:
    """A realizable tuple together with its realized pair and verified root."""

    tup: QuermassTuple
    pair: tuple  # (K, L)
    root: complex
    residual: float


@dataclass(frozen=True)
class ConeQuery:
    dim: int
    z: complex
    status: str
    witness: Witness | None = None
    certificate: str | None = None


def _tuple_from_roots(zs: np.ndarray, n: int) -> tuple | None:
    """Coefficient tuple (W_0..W_n, W_n = 1) of the monic polynomial with the
    given roots, or None if some entry is not a positive real."""
    e = np.zeros(n + 1, dtype=complex)
    e[0] = 1.0
    for z in zs:
        e[1:] = e[1:] + z * e[:-1]
    values = []
    for j in range(n + 1):
        w = (-1) ** j * e[j] / math.comb(n, j)  # W_{n-j} / W_n
        if abs(w.imag) > 1e-9 * max(1.0, abs(w)) or w.real <= 0:
            return None
        values.append(w.real)
    return tuple(values[::-1])  # ascending index order W_0..W_n


def verify_witness(tup: QuermassTuple, K: StarBody, L: StarBody,
                   z: complex, grid=None) -> float | None:
    """Recompute the pair's polynomial by quadrature and measure the root.

    Returns the scaled residual |f(z)| / max|coeff| when the pair
    reproduces the tuple and z stays a root, else None.
    """
    n = tup.dim
    if grid is None:
        grid = default_grid(n)
    poly = build_poly(K, L, grid)
    scale = max(abs(c) for c in poly.coeffs)
    resid = abs(poly(complex(z))) / scale
    return resid if resid <= WITNESS_ROOT_TOL else None


def _bump_pair_for_angle(n: int, a: float, kappa: float = 12.0):
    """Pair (K, L) of opposite-pole bump bodies with polynomial root e^{i theta},
    a = cos(theta) in (-1, 0).

    Works for the quadratic case: normalized correlation of the radial
    functions equals -a, which pins the root up to the dilate scale.
    """
    grid = default_grid(n)

    def corr(amp: float) -> float:
        Kb = ZonalBump(n, 1.0, amp, kappa, 1)
        Lb = ZonalBump(n, 1.0, amp, kappa, -1)
        w0, w1, w2 = quermass_tuple(Kb, Lb, (0, 1, 2), grid).values
        return w1 / math.sqrt(w0 * w2)

    target = -a
    hi = 1.0
    while corr(hi) > target:
        hi *= 2.0
        if hi > 1e9:
            raise RuntimeError("bump amplitude search failed to bracket")
    amp = brentq(lambda s: corr(s) - target, 0.0, hi, xtol=1e-13,
                 rtol=8.9e-16)
    Kb = ZonalBump(n, 1.0, amp, kappa, 1)
    Lb = ZonalBump(n, 1.0, amp, kappa, -1)
    w0, _, w2 = quermass_tuple(Kb, Lb, (0, 1, 2), grid).values
    return Kb, Dilate(Lb, math.sqrt(w0 / w2))


def membership_exact_n2(z: complex) -> ConeQuery:
    """Exact n=2 law: the cone is the open left half of the closed upper
    half-plane; witnesses are explicit."""
    z = complex(z)
    if z.imag < 0:
        raise ValueError("queries live in the closed upper half-plane")
    if z.real >= 0:
        return ConeQuery(2, z, OUT, certificate="n2_exact_law")
    if z.imag == 0:
        return _negative_real_witness(z, 2)
    r = abs(z)
    K0, L = _bump_pair_for_angle(2, z.real / r)
    K = Dilate(K0, r) if r != 1.0 else K0
    grid = default_grid(2)
    tup = quermass_tuple(K, L, (0, 1, 2), grid)
    resid = verify_witness(tup, K, L, z, grid)
    if resid is None:
        # the construction pins the root; treat failure as internal
        raise RuntimeError("n=2 witness verification failed unexpectedly")
    return ConeQuery(2, z, IN, witness=Witness(tup, (K, L), z, resid))


def necessary_bound_n3(z: complex) -> bool:
    """True iff the n=3 slope bound Im > sqrt(3)*Re is violated (certifying OUT).

    The bound binds only for roots with positive real part.
    """
    z = complex(z)
    return z.real > 0 and z.imag <= SQRT3 * z.real


def _n3_margin(c: float, z: complex, intervals) -> float:
    """Feasibility margin of the n=3 tuple with third root -c."""
    if c <= 0:
        return -np.inf
    zs = np.array([z, np.conj(z), -c])
    values = _tuple_from_roots(zs, 3)
    if values is None:
        return -np.inf
    return max(mm.split_min_margin(values, iv) for iv in intervals)


def membership_search(z: complex, n: int, budget: int = 200,
                      seed: int = 0,
                      multistarts: int = DEFAULT_MULTISTARTS) -> ConeQuery:
    """Constructive membership test for the root cone in dimension n.

    The n-2 remaining roots are parametrized as conjugate pairs (plus one
    negative real when n is odd); the feasibility margin of the induced
    coefficient tuple is maximized by seeded multistart local search, and
    a positive margin is realized into a verified witness.
    """
    z = complex(z)
    if z.imag < 0:
        raise ValueError("queries live in the closed upper half-plane")
    if n < 2:
        raise ValueError("dimension must be >= 2")
    if n == 2:
        return membership_exact_n2(z)
    if z.imag == 0 and z.real < 0:
        return _negative_real_witness(z, n)
    if z.real >= 0 and z.imag == 0:
        return ConeQuery(n, z, OUT, certificate="nonnegative_real_axis")
    if n == 3 and necessary_bound_n3(z):
        return ConeQuery(n, z, OUT, certificate="n3_slope_bound")

    # cone invariance under scaling: search at unit modulus, where the
    # candidate tuples are well balanced, and dilate the witness back
    r = abs(z)
    zh = z / r

    intervals = [Interval(0.5 ** k, 2.0 ** k) for k in range(1, 9)]
    rng = np.random.default_rng(seed)
    n_pairs = (n - 2) // 2
    has_real = (n % 2 == 1)

    def gamma_from_params(params: np.ndarray) -> np.ndarray:
        zs = [zh, np.conj(zh)]
        pos = 0
        for _ in range(n_pairs):
            re = -np.exp(params[pos])      # known IN region: Re < 0
            im = np.exp(params[pos + 1])
            zs.extend([complex(re, im), complex(re, -im)])
            pos += 2
        if has_real:
            zs.append(complex(-np.exp(params[pos]), 0.0))
        return np.asarray(zs)

    def neg_margin(params: np.ndarray) -> float:
        values = _tuple_from_roots(gamma_from_params(params), n)
        if values is None:
            return np.inf
        return -max(mm.split_min_margin(values, iv) for iv in intervals)

    dof = 2 * n_pairs + (1 if has_real else 0)
    best_params, best_margin = None, -np.inf
    evals = 0
    for _ in range(multistarts):
        if evals >= budget:
            break
        x0 = rng.uniform(-2.0, 2.0, size=dof)
        res = minimize(neg_margin, x0, method="Nelder-Mead",
                       options={"maxfev": max(20, budget // multistarts),
                                "xatol": 1e-4, "fatol": 1e-12})
        evals += res.nfev
        if -res.fun > best_margin:
            best_margin = -res.fun
            best_params = res.x
        if best_margin > 1e-6:
            break
    if best_params is None or best_margin <= 0:
        return ConeQuery(n, z, UNKNOWN)
    values = _tuple_from_roots(gamma_from_params(best_params), n)
    tup = QuermassTuple(n, tuple(range(n + 1)), values)
    try:
        K, L, _ = realize_pair(tup)
    except NotRealizableError:
        return ConeQuery(n, z, UNKNOWN)
    if r != 1.0:
        K = Dilate(K, r)
        tup = quermass_tuple(K, L, tuple(range(n + 1)), default_grid(n))
    resid = verify_witness(tup, K, L, z)
    if resid is None:
        return ConeQuery(n, z, UNKNOWN)
    return ConeQuery(n, z, IN, witness=Witness(tup, (K, L), z, resid))


def _negative_real_witness(z: complex, n: int) -> ConeQuery:
    """Any -c < 0 is a root of the dilate pair (c*L, L)."""
    c = -z.real
    L = Ball(n, 1.0)
    K = Dilate(L, c)
    tup = quermass_tuple(K, L, range(n + 1), default_grid(n))
    resid = verify_witness(tup, K, L, z)
    return ConeQuery(n, z, IN, witness=Witness(tup, (K, L), z, resid or 0.0))


# ---------------------------------------------------------------------------
# Convex combinations and dimension monotonicity
# ---------------------------------------------------------------------------

def _as_root_of(witness: Witness):
    K, L = witness.pair
    return K, L, complex(witness.root)


def convex_combination_witness(w1: Witness, w2: Witness, rho: float,
                               grid=None) -> Witness:
    """Witness for rho*gamma1 + (1-rho)*gamma2 from witnesses of the endpoints.

    Follows the cone-convexity construction: reduce to a common second
    body by scale and shift, then build the mixing body
    M = (1/mu) (K1 +~ (a1 - nu) L).
    """
    if not 0.0 < rho < 1.0:
        raise ValueError("rho must lie in (0, 1)")
    K1, L1, g1 = _as_root_of(w1)
    K2, L2, g2 = _as_root_of(w2)
    if K1.dim != K2.dim:
        raise ValueError("witnesses must share the dimension")
    n = K1.dim
    if grid is None:
        grid = default_grid(n)
    target = rho * g1 + (1.0 - rho) * g2

    if g1.imag == 0 and g2.imag == 0:
        # both on the negative real axis: dilate ray
        c = -(target.real)
        L = Ball(n, 1.0)
        K = Dilate(L, c)
        tup = quermass_tuple(K, L, range(n + 1), grid)
        resid = verify_witness(tup, K, L, target, grid)
        return Witness(tup, (K, L), target, resid or 0.0)

    # Reduce to a common second body L.  If one endpoint is a negative
    # real, its witness can be rebuilt over any L, so use the other's.
    if g1.imag == 0:
        K2c, Lc, gb = K2, L2, g2
        K1c, ga = Dilate(Lc, -g1.real), g1
    elif g2.imag == 0:
        K1c, Lc, ga = K1, L1, g1
        K2c, gb = Dilate(Lc, -g2.real), g2
    else:
        # transform the witness whose root has the smaller slope deficit:
        # mu >= 0 requires a_src/b_src >= a_dst/b_dst
        s1, s2 = g1.real / g1.imag, g2.real / g2.imag
        if s2 >= s1:
            lam = g1.imag / g2.imag
            mu = lam * g2.real - g1.real
            K1c = radial_sum(Dilate(K2, lam), L2, 1.0, mu)
            Lc, ga = L2, g1
            K2c, gb = K2, g2
        else:
            lam = g2.imag / g1.imag
            mu = lam * g1.real - g2.real
            K2c = radial_sum(Dilate(K1, lam), L1, 1.0, mu)
            Lc, gb = L1, g2
            K1c, ga = K1, g1

    # order so that (Ka, ga) has the maximal a/b among roots with b > 0
    pairs = [(K1c, ga, rho), (K2c, gb, 1.0 - rho)]
    pairs.sort(key=lambda p: (-np.inf if p[1].imag == 0
                              else p[1].real / p[1].imag), reverse=True)
    (Ka, gamma_a, wa), (_, gamma_b, _) = pairs
    a1, b1 = gamma_a.real, gamma_a.imag
    a2, b2 = gamma_b.real, gamma_b.imag
    mu = b1 / (wa * b1 + (1.0 - wa) * b2)
    nu = mu * (wa * a1 + (1.0 - wa) * a2)
    shift = a1 - nu
    if shift < 0:
        shift = 0.0  # guards roundoff; nu <= a1 by construction
    M = radial_sum(Ka, Lc, 1.0 / mu, shift / mu)
    tup = quermass_tuple(M, Lc, range(n + 1), grid)
    resid = verify_witness(tup, M, Lc, target, grid)
    if resid is None:
        raise RuntimeError("convex combination witness failed verification")
    return Witness(tup, (M, Lc), target, resid)


def point_in_hull(z: complex, points, slack: float = 1e-9) -> bool:
    """2-d point-in-convex-hull test via a small feasibility LP."""
    pts = np.asarray([[p.real, p.imag] for p in points])
    m = pts.shape[0]
    scale = max(1.0, float(np.max(np.abs(pts))))
    target = np.array([z.real, z.imag])
    # convex weights reproducing the target within the slack band
    A_ub = np.vstack([pts.T, -pts.T])
    b_ub = np.concatenate([target + slack * scale, -(target - slack * scale)])
    res = linprog(np.zeros(m), A_ub=A_ub, b_ub=b_ub,
                  A_eq=np.ones((1, m)), b_eq=[1.0], bounds=[(0, None)] * m,
                  method="highs")
    return bool(res.success)


def monotone_embed(witness: Witness, grid=None) -> dict:
    """Certify that a verified root also lies in the cone one dimension up.

    Lifts the witness polynomial to an antiderivative pair in n+1 and
    checks the root against the convex hull of the lifted roots; combined
    with cone convexity this embeds the root in dimension n+1.
    """
    from .steinerpoly import antiderivative_lift

    K, L = witness.pair
    n = K.dim
    if grid is None:
        grid = default_grid(n)
    K2, L2, c_val = antiderivative_lift(K, L, grid)
    lifted_grid = default_grid(n + 1)
    lifted = build_poly(K2, L2, lifted_grid)
    lifted_roots = poly_roots(lifted.coeffs)
    contained = point_in_hull(witness.root, lifted_roots.roots,
                              slack=1e-7)
    return {
        "contained": contained,
        "lifted_pair": (K2, L2),
        "constant": c_val,
        "lifted_roots": lifted_roots,
    }


# ---------------------------------------------------------------------------
# Boundary map
# ---------------------------------------------------------------------------

def cone_boundary_map(n: int, angles: int, budget: int = 200,
                      seed: int = 0) -> list:
    """Status of the direction e^{i theta} for theta on a grid of (0, pi].

    Radius-free by cone invariance; rows are (theta, status, witness or
    None).  UNKNOWN entries are legitimate output for n >= 3.
    """
    if n < 2:
        raise ValueError("dimension must be >= 2")
    rows = []
    for k in range(1, angles + 1):
        theta = np.pi * k / angles
        z = complex(np.cos(theta), np.sin(theta))
        if abs(z.imag) < 1e-15:
            z = complex(z.real, 0.0)
        query = membership_search(z, n, budget=budget, seed=seed + k)
        rows.append((float(theta), query.status, query.witness))
    return rows


def witness_to_dict(w: Witness) -> dict:
    K, L = w.pair
    return {
        "root": [w.root.real, w.root.imag],
        "residual": w.residual,
        "tuple": w.tup.to_dict() if w.tup is not None else None,
        "K": K.to_dict(),
        "L": L.to_dict(),
    }


def boundary_map_csv(rows) -> tuple[str, dict]:
    """CSV text (theta,status,witness_id) plus the witness sidecar dicts."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["theta", "status", "witness_id"])
    sidecar = {}
    for k, (theta, status, witness) in enumerate(rows, start=1):
        wid = ""
        if witness is not None:
            wid = f"w{k:04d}"
            sidecar[wid] = witness_to_dict(witness)
        writer.writerow([f"{theta:.12f}", status, wid])
    return buf.getvalue(), sidecar
