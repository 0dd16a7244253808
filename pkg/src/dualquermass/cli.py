"""Command-line front end.

Subcommands: compute, check, realize, roots, cone, verify.  JSON goes to
stdout, logs to stderr; identical config and seed give byte-identical
output.  Exit codes: 0 ok, 2 input error, 3 dimension error, 4 refusal
or negative verdict, 5 internal invariant failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .moment import interval_search, INTERIOR, GEOMETRIC_RAY
from .quermass import (ContainmentError, QuermassTuple, dual_af_verify,
                       hankel_pd_verify, monotonicity_verify, quermass_tuple,
                       reciprocity_verify)
from .starbody import (DimensionMismatchError, InvariantViolationError,
                       body_from_dict, build_grid, default_grid)
from .steinerpoly import build_poly, build_poly_from_tuple, roots, vieta_check
from .synth import NotRealizableError, realize_pair
from .rootcone import boundary_map_csv, cone_boundary_map

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DIM = 3
EXIT_REFUSAL = 4
EXIT_INTERNAL = 5


@dataclass
class RunConfig:
    res: int | None = None
    seed: int = 0
    k_max: int = 20
    budget: int = 200
    fmt: str | None = None  # resolved per command: cone -> csv, else json
    out: str | None = None


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    values = {}
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line: {line!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        values[key] = val
    return values


def _build_config(args) -> RunConfig:
    cfg = RunConfig()
    file_vals = _load_config(getattr(args, "config", None))
    for key, val in file_vals.items():
        if key in ("res", "seed", "k_max", "budget"):
            setattr(cfg, key, int(val))
        elif key == "format":
            cfg.fmt = val
        elif key == "out":
            cfg.out = val
        else:
            raise ValueError(f"unknown config key {key!r}")
    # flags win over the config file
    if getattr(args, "res", None) is not None:
        cfg.res = args.res
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "budget", None) is not None:
        cfg.budget = args.budget
    if getattr(args, "format", None) is not None:
        cfg.fmt = args.format
    if getattr(args, "out", None) is not None:
        cfg.out = args.out
    if cfg.fmt is None:
        cfg.fmt = "csv" if args.command == "cone" else "json"
    if cfg.fmt not in ("json", "csv"):
        raise ValueError("format must be json or csv")
    return cfg


def _round15(obj):
    """Round every float to 15 significant digits, recursively."""
    if isinstance(obj, float):
        return float(f"{obj:.15g}")
    if isinstance(obj, dict):
        return {k: _round15(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round15(v) for v in obj]
    return obj


def _emit(doc, cfg: RunConfig) -> None:
    text = json.dumps(_round15(doc), indent=2, sort_keys=True)
    if cfg.out:
        Path(cfg.out).write_text(text + "\n")
        print(f"wrote {cfg.out}", file=sys.stderr)
    else:
        print(text)


def _grid_for(n: int, cfg: RunConfig):
    return build_grid(n, cfg.res) if cfg.res is not None else default_grid(n)


def _load_body(path: str):
    return body_from_dict(json.loads(Path(path).read_text()))


def _load_tuple(path: str) -> QuermassTuple:
    return QuermassTuple.from_dict(json.loads(Path(path).read_text()))


def _parse_indices(text: str) -> tuple:
    return tuple(float(s) for s in text.split(","))


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_compute(args, cfg: RunConfig) -> int:
    K = _load_body(args.body[0])
    L = _load_body(args.body[1])
    indices = _parse_indices(args.indices)
    grid = _grid_for(K.dim, cfg)
    if 0.0 in indices:
        doc = quermass_tuple(K, L, indices, grid).to_dict()
    else:
        # tuples require index 0; bare index lists are computed directly
        from .quermass import dual_quermass
        doc = {"dim": K.dim, "indices": list(indices),
               "values": [dual_quermass(K, L, i, grid) for i in indices]}
    _emit(doc, cfg)
    return EXIT_OK


def cmd_check(args, cfg: RunConfig) -> int:
    tup = _load_tuple(args.tuple)
    verdict = interval_search(tup, k_max=cfg.k_max)
    _emit(verdict.to_dict(), cfg)
    return EXIT_OK if verdict.status in (INTERIOR, GEOMETRIC_RAY) else EXIT_REFUSAL


def cmd_realize(args, cfg: RunConfig) -> int:
    tup = _load_tuple(args.tuple)
    try:
        K, L, verdict = realize_pair(tup, k_max=cfg.k_max)
    except NotRealizableError as exc:
        print(json.dumps(_round15(exc.verdict.to_dict()), indent=2,
                         sort_keys=True))
        return EXIT_REFUSAL
    grid = _grid_for(tup.dim, cfg)
    out = quermass_tuple(K, L, tup.indices, grid)
    dev = max(abs(a / b - 1.0) for a, b in zip(out.values, tup.values))
    out_dir = Path(cfg.out) if cfg.out else Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    k_path = out_dir / "witness_K.json"
    l_path = out_dir / "witness_L.json"
    k_path.write_text(K.to_json() + "\n")
    l_path.write_text(L.to_json() + "\n")
    print(f"wrote {k_path} and {l_path}", file=sys.stderr)
    doc = {"status": verdict.status, "roundtrip": out.to_dict(),
           "max_rel_deviation": dev,
           "bodies": [str(k_path), str(l_path)]}
    print(json.dumps(_round15(doc), indent=2, sort_keys=True))
    return EXIT_OK


def cmd_roots(args, cfg: RunConfig) -> int:
    if args.tuple:
        tup = _load_tuple(args.tuple)
        poly = build_poly_from_tuple(tup.sorted().values, tup.dim)
    else:
        K = _load_body(args.body[0])
        L = _load_body(args.body[1])
        poly = build_poly(K, L, _grid_for(K.dim, cfg))
    rs = roots(poly)
    doc = {"dim": poly.dim, "coeffs": list(poly.coeffs)}
    doc.update(rs.to_jsonable())
    _emit(doc, cfg)
    return EXIT_OK


def cmd_cone(args, cfg: RunConfig) -> int:
    rows = cone_boundary_map(args.dim, args.samples, budget=cfg.budget,
                             seed=cfg.seed)
    if cfg.fmt == "json":
        doc = [{"theta": theta, "status": status}
               for theta, status, _ in rows]
        _emit(doc, cfg)
        return EXIT_OK
    text, sidecar = boundary_map_csv(rows)
    if cfg.out:
        Path(cfg.out).write_text(text)
        side_path = Path(cfg.out).with_suffix(".witnesses.json")
        side_path.write_text(json.dumps(_round15(sidecar), indent=2,
                                        sort_keys=True) + "\n")
        print(f"wrote {cfg.out} and {side_path}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args, cfg: RunConfig) -> int:
    K = _load_body(args.body[0])
    L = _load_body(args.body[1])
    n = K.dim
    grid = _grid_for(n, cfg)
    report: dict = {}
    ok = True

    triples = [(i, j, k) for (i, j, k) in ((0, 1, 2), (1, 2, 3), (0, 2, 4))
               if k <= n]
    tup = quermass_tuple(K, L, range(n + 1), grid)
    report["dual_af"] = []
    for i, j, k in triples:
        res = dual_af_verify(tup, i, j, k)
        res["triple"] = [i, j, k]
        report["dual_af"].append(res)
        ok = ok and res["holds"]

    try:
        mono = monotonicity_verify(K, L, 0.0, 1.0, grid)
        report["monotonicity"] = {"checked": True, "holds": mono}
        ok = ok and mono
    except ContainmentError:
        report["monotonicity"] = {"checked": False,
                                  "reason": "containment precondition fails"}

    report["hankel"] = []
    for m in (1, 2, 3):
        res = hankel_pd_verify(K, L, grid, m)
        report["hankel"].append(res)
        thresh = -res["tau_A"] if res["dilate"] else res["tau_A"]
        ok = ok and res["A_min_eig"] >= thresh and res["B_min_eig"] >= thresh

    poly = build_poly(K, L, grid)
    rs = roots(poly)
    report["vieta"] = vieta_check(poly, rs)
    ok = ok and report["vieta"]

    report["reciprocity"] = [reciprocity_verify(K, L, float(i), grid)
                             for i in range(n + 1)]
    ok = ok and all(r["holds"] for r in report["reciprocity"])

    report["pass"] = ok
    _emit(report, cfg)
    return EXIT_OK if ok else EXIT_REFUSAL


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dualquermass",
        description="Dual quermassintegrals, tuple realizability, witness "
                    "synthesis, and dual Steiner polynomial roots.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--seed", type=int, help="RNG seed")
        p.add_argument("--res", type=int, help="grid resolution override")
        p.add_argument("--budget", type=int, help="search budget")
        p.add_argument("--out", help="output path")
        p.add_argument("--format", choices=("json", "csv"),
                       help="output format")

    p = sub.add_parser("compute", help="tuple of a body pair")
    p.add_argument("--body", action="append", required=True,
                   help="body JSON file (give twice: K then L)")
    p.add_argument("--indices", required=True, help="comma-separated indices")
    common(p)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("check", help="realizability verdict for a tuple")
    p.add_argument("--tuple", required=True, help="tuple JSON file")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("realize", help="synthesize a witness pair")
    p.add_argument("--tuple", required=True, help="tuple JSON file")
    common(p)
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("roots", help="dual Steiner polynomial roots")
    p.add_argument("--tuple", help="tuple JSON file")
    p.add_argument("--body", action="append",
                   help="body JSON file (give twice: K then L)")
    common(p)
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("cone", help="root-cone boundary map")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--samples", type=int, default=90)
    common(p)
    p.set_defaults(func=cmd_cone)

    p = sub.add_parser("verify", help="inequality suites for a pair")
    p.add_argument("--body", action="append", required=True,
                   help="body JSON file (give twice: K then L)")
    common(p)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _build_config(args)
        if args.command in ("compute", "verify") and len(args.body or ()) != 2:
            raise ValueError("exactly two --body files are required")
        if args.command == "roots":
            has_pair = args.body is not None and len(args.body) == 2
            if bool(args.tuple) == has_pair:
                raise ValueError("give either --tuple or two --body files")
        return args.func(args, cfg)
    except DimensionMismatchError as exc:
        print(f"dimension error: {exc}", file=sys.stderr)
        return EXIT_DIM
    except InvariantViolationError as exc:
        print(f"internal invariant failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
