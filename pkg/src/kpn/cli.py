"""Batch driver: flow, correspondence, and geometry pipelines with JSON reports.

Exit codes: 0 = verified or diagnostic-only, 1 = identity violation,
2 = usage or configuration error.  Reports are canonical JSON; identical
configurations (including RNG seed) produce byte-identical reports.
"""

import argparse
import json
import logging
import os
import random
import sys
from dataclasses import dataclass, field

from . import serialize as ser
from .config import default_config, flow_guard
from .errors import KPNError, NotTransversal, UsageError
from .grassmann import (
    adjoint_wave,
    ba_function,
    bilinear_check,
    is_F0,
    k_extend,
    kpgr_leading_term,
    point_from_wave,
    random_point,
    stationary_indices,
    trivial_point,
    wave_from_point,
)
from .hierarchy import (
    DressingOp,
    dress,
    finite_gap_certificate,
    guarded_d_region,
    integrate_flows,
    lax_residual,
    random_seed,
    wave_contract_residual,
)
from .indexing import mi_neg, revlex_key
from .krichever import builtin_geometry, krichever_point
from .pdo import pdo_from_symbol
from .tpoly import tvar
from .xseries import XSeries

log = logging.getLogger("kpn")


@dataclass
class RunConfig:
    """One run: truncation plus command-specific options."""

    truncation: object
    seed: dict = field(default_factory=dict)
    search_box: tuple = None
    s_count: int = 1
    guard: tuple = None
    rng_seed: int = 0
    literal_v_filter: bool = False

    @classmethod
    def load(cls, path, overrides):
        with open(path) as fh:
            raw = json.load(fh)
        if "truncation" in raw:
            trunc = ser.parse_config(raw["truncation"])
        else:
            trunc = default_config(raw.get("n_vars", 2))
        if overrides.get("split_mode"):
            trunc = ser.parse_config(
                {**ser.config_obj(trunc), "split_mode": overrides["split_mode"]}
            )
        search = raw.get("search_box")
        return cls(
            truncation=trunc,
            seed=raw.get("seed", {}),
            search_box=tuple(search) if search else None,
            s_count=raw.get("s_count", 1),
            guard=tuple(raw["guard"]) if raw.get("guard") else None,
            rng_seed=overrides.get("rng_seed", raw.get("rng_seed", 0)),
            literal_v_filter=overrides.get("literal_v_filter", False),
        )


def _tpoly_or_zero(rep):
    if rep is None:
        return "0"
    return rep


def _residual_entry(res, region):
    inside = sorted((e for e in res.terms if region(e)), key=revlex_key)
    full = sorted(res.terms, key=revlex_key)
    entry = {
        "trusted": "0" if not inside else {
            "witness_exponent": list(inside[0]),
            "witness": ser.tpoly_obj(res.terms[inside[0]]),
        },
        "full_support": [list(e) for e in full],
    }
    return entry, not inside


def _seed_operator(run, rng):
    cfg = run.truncation
    spec = run.seed
    if "pdo" in spec:
        return ser.parse_pdo(spec["pdo"], cfg), False
    if "random" in spec:
        opts = spec["random"]
        return (
            random_seed(
                cfg,
                rng,
                depth=tuple(opts["depth"]) if opts.get("depth") else None,
                terms=opts.get("terms", 2),
                profile_degree=opts.get("profile_degree", 1),
            ),
            False,
        )
    if "dressing" in spec:
        return ser.parse_pdo(spec["dressing"], cfg), True
    raise UsageError("flow seed must be one of: pdo, random, dressing")


def cmd_flow(run):
    cfg = run.truncation
    rng = random.Random(run.rng_seed)
    seed_op, pre_dressed = _seed_operator(run, rng)
    if pre_dressed:
        s_op = DressingOp(S=seed_op)
    else:
        s_op = integrate_flows(seed_op)
    guard = run.guard or flow_guard(cfg)
    region = guarded_d_region(cfg, guard)
    lax = dress(s_op)
    residuals = {}
    all_zero = True
    for a in sorted(cfg.active_times):
        for i in range(cfg.n_vars):
            res = lax_residual(lax, s_op, a, i)
            entry, zero = _residual_entry(res, region)
            residuals[f"a={list(a)},i={i + 1}"] = entry
            all_zero = all_zero and zero
    report = {
        "command": "flow",
        "truncation": ser.config_obj(cfg),
        "advisories": cfg.advisories(),
        "rng_seed": run.rng_seed,
        "seed": ser.pdo_obj(seed_op),
        "dressing": ser.pdo_obj(s_op.S),
        "lax": [ser.pdo_obj(L) for L in lax.ops],
        "guard": list(guard),
        "residuals": residuals,
        "status": "verified" if all_zero else "violations",
    }
    if run.search_box:
        cert = finite_gap_certificate(s_op, run.search_box, region)
        report["certificate"] = sorted([list(a) for a in cert])
    return report, (0 if all_zero else 1)


def _seed_point(run, rng):
    cfg = run.truncation
    spec = run.seed
    if "point" in spec:
        return ser.parse_grpoint(spec["point"], cfg)
    if "trivial" in spec:
        return trivial_point(cfg)
    if "random_point" in spec:
        opts = spec["random_point"]
        lo = tuple(opts.get("graph_lo", [-1] * cfg.n_vars))
        hi = tuple(opts.get("graph_hi", [2] * cfg.n_vars))
        depth = tuple(opts.get("pivot_depth", [1] * cfg.n_vars))
        return random_point(cfg, rng, lo, hi, depth)
    raise UsageError("correspondence seed must be one of: point, trivial, random_point")


def cmd_correspondence(run):
    cfg = run.truncation
    rng = random.Random(run.rng_seed)
    point = _seed_point(run, rng)
    ok, diag = is_F0(point)
    report = {
        "command": "correspondence",
        "truncation": ser.config_obj(cfg),
        "advisories": cfg.advisories(),
        "rng_seed": run.rng_seed,
        "point": ser.grpoint_obj(point),
        "chart": {
            "in_chart": ok,
            "missing": [list(e) for e in diag["missing"]],
            "extra": [list(e) for e in diag["extra"]],
            "bad_support": [list(e) for e in diag["bad_support"]],
        },
    }
    if not ok:
        report["status"] = "non-transversal"
        return report, 0
    wf = wave_from_point(point)
    recovered = point_from_wave(wf)
    guard = run.guard or cfg.weight_cap()
    keep = lambda e: all(x <= h - g for x, h, g in zip(e, cfg.x_hi, guard))
    round_trip = all(
        (u.restrict(keep).terms == (recovered.row(u.valuation()) or XSeries.zero(cfg)).restrict(keep).terms)
        for u in point.basis
        if recovered.row(u.valuation()) is not None
    )
    kpgr_ok = True
    for a in sorted(cfg.active_times):
        lead = kpgr_leading_term(wf, a)
        if lead.valuation() != mi_neg(a):
            kpgr_ok = False
    checks = {"round_trip": round_trip, "kpgr_leading": kpgr_ok}
    try:
        omega = ba_function(point)
        aw = adjoint_wave(k_extend(point), s_count=run.s_count)
        pair = bilinear_check(omega, aw.w)
        checks["bilinear_zero"] = pair.is_zero()
        report["bilinear_support"] = [list(e) for e in sorted(pair.support(), key=revlex_key)]
    except UsageError as exc:
        checks["bilinear_zero"] = None
        report["bilinear_skipped"] = str(exc)
    report["wave_symbol"] = ser.xseries_obj(wf.sym)
    report["checks"] = checks
    bad = [k for k, v in checks.items() if v is False]
    report["status"] = "verified" if not bad else "violations"
    return report, (0 if not bad else 1)


def cmd_krichever(run):
    cfg = run.truncation
    spec = run.seed
    if "geometry" in spec:
        g = spec["geometry"]
        if isinstance(g, str):
            geom = builtin_geometry(cfg, g, spec.get("params"))
        else:
            geom = ser.parse_geometry(g, cfg)
    else:
        raise UsageError("krichever seed must carry a geometry")
    point, info = krichever_point(geom, literal_filter=run.literal_v_filter)
    report = {
        "command": "krichever",
        "truncation": ser.config_obj(cfg),
        "advisories": cfg.advisories(),
        "geometry": ser.geometry_obj(geom),
        "literal_v_filter": run.literal_v_filter,
        "point": ser.grpoint_obj(point),
        "chart": {
            "in_chart": info["F0"],
            "missing": [list(e) for e in info["diagnostic"]["missing"]],
            "extra": [list(e) for e in info["diagnostic"]["extra"]],
            "bad_support": [list(e) for e in info["diagnostic"]["bad_support"]],
        },
        "closure": {
            "checked_pairs": info["closure"]["checked_pairs"],
            "failures": info["closure"]["failures"],
        },
        "dropped_pivots": [list(e) for e in info["dropped_pivots"]],
    }
    box = run.search_box or tuple(min(2, h) for h in cfg.d_box_hi)
    stationary = stationary_indices(point, box)
    report["stationary_indices"] = sorted([list(a) for a in stationary])
    if not info["F0"]:
        report["status"] = "non-transversal"
        return report, 0
    wf = wave_from_point(point)
    s_op = DressingOp(S=pdo_from_symbol(wf.sym))
    lax = dress(s_op)
    guard = run.guard or flow_guard(cfg)
    region = guarded_d_region(cfg, guard)
    residuals = {}
    all_zero = True
    for a in sorted(cfg.active_times):
        for i in range(cfg.n_vars):
            entry, zero = _residual_entry(lax_residual(lax, s_op, a, i), region)
            residuals[f"a={list(a)},i={i + 1}"] = entry
            all_zero = all_zero and zero
    report["dressing"] = ser.pdo_obj(s_op.S)
    report["residuals"] = residuals
    cert = finite_gap_certificate(s_op, box, region)
    report["certificate"] = sorted([list(a) for a in cert])
    report["status"] = "verified" if all_zero else "violations"
    return report, (0 if all_zero else 1)


COMMANDS = {
    "flow": cmd_flow,
    "correspondence": cmd_correspondence,
    "krichever": cmd_krichever,
}


def cmd_verify(args):
    with open(args.report) as fh:
        saved = json.load(fh)
    command = saved.get("command")
    if command not in COMMANDS:
        raise UsageError(f"saved report has unknown command {command!r}")
    run = RunConfig(
        truncation=ser.parse_config(saved["truncation"]),
        seed=_reseed_from_report(saved),
        search_box=None,
        rng_seed=saved.get("rng_seed", 0),
        literal_v_filter=saved.get("literal_v_filter", False),
    )
    if "certificate" in saved and command == "flow":
        box = _infer_search_box(saved)
        run.search_box = box
    report, code = COMMANDS[command](run)
    fresh = ser.canonical_json(report)
    original = ser.canonical_json(saved)
    if fresh == original:
        print("report verified: byte-identical recomputation")
        return 0
    print("report MISMATCH: recomputation differs from the saved report")
    return 1


def _reseed_from_report(saved):
    if saved["command"] == "flow":
        key = "seed"
        if saved.get("seed") == saved.get("dressing"):
            pass
        return {"pdo": saved["seed"]}
    if saved["command"] == "correspondence":
        return {"point": saved["point"]}
    return {"geometry": saved["geometry"]}


def _infer_search_box(saved):
    cert = saved.get("certificate") or []
    if not cert:
        return None
    n = len(cert[0])
    return tuple(max(c[i] for c in cert) for i in range(n))


def build_parser():
    parser = argparse.ArgumentParser(
        prog="kpn",
        description="Exact engine for the several-variable KP hierarchy",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="run configuration (JSON)")
        p.add_argument("--out", help="write the report here (default: stdout)")
        p.add_argument("--seed-rng", type=int, default=None)
        p.add_argument("--split-mode", choices=["revlex", "componentwise"])
        if name == "krichever":
            p.add_argument("--literal-v-filter", action="store_true")
    v = sub.add_parser("verify")
    v.add_argument("report", help="previously written report (JSON)")
    return parser


def main(argv=None):
    logging.basicConfig(level=os.environ.get("KPN_LOG", "WARNING").upper())
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args)
        overrides = {
            "split_mode": getattr(args, "split_mode", None),
            "literal_v_filter": getattr(args, "literal_v_filter", False),
        }
        if args.seed_rng is not None:
            overrides["rng_seed"] = args.seed_rng
        run = RunConfig.load(args.config, overrides)
        report, code = COMMANDS[args.command](run)
        text = ser.canonical_json(report)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return code
    except KPNError as exc:
        log.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
