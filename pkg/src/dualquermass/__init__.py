"""Dual quermassintegrals of star bodies, realizability of prescribed
tuples, witness synthesis, and the root structure of dual Steiner
polynomials."""

from .starbody import (
    Ball,
    Dilate,
    GridTable,
    RadialSum,
    SmoothAxial,
    SphereGrid,
    StarBody,
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
from .quermass import (
    QuermassTuple,
    dual_af_verify,
    dual_quermass,
    hankel_pd_verify,
    monotonicity_verify,
    pushforward_moments,
    quermass_tuple,
    reciprocity_verify,
)
from .moment import (
    ConeVerdict,
    Interval,
    IntervalMeasure,
    cone_interior_check,
    hankel_split,
    hausdorff_feasible,
    interval_search,
    positivity_cross_check,
)
from .synth import (
    NotRealizableError,
    body_from_measure,
    cap_fraction,
    fit_smooth_density,
    measure_from_moments,
    realize_pair,
    zonal_exp_body,
)
from .steinerpoly import (
    DualSteinerPoly,
    RootSet,
    antiderivative_lift,
    build_poly,
    build_poly_from_tuple,
    derivative_descend,
    nonstable_search,
    real_roots_rigidity_check,
    roots,
    stability_check,
    transform_root,
)
from .rootcone import (
    ConeQuery,
    Witness,
    boundary_map_csv,
    cone_boundary_map,
    convex_combination_witness,
    membership_exact_n2,
    membership_search,
    monotone_embed,
    necessary_bound_n3,
    verify_witness,
    witness_to_dict,
)

__version__ = "0.1.0"
