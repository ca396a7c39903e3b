"""Canonical JSON forms for every value the engine exchanges.

Rationals are strings "p/q" in lowest terms with q > 0; multi-indices are
integer arrays; series and operators are term lists sorted by revlex on the
exponent; time monomials are sorted by their serialized key.  Round-trips
are bit-exact.
"""

import json
from fractions import Fraction

from .config import TruncationConfig
from .errors import UsageError
from .grassmann import GrPoint
from .indexing import revlex_key
from .krichever import GeometryData
from .pdo import Pdo
from .tpoly import T_FAMILY, TimePoly
from .xseries import XSeries


def frac_str(value):
    f = Fraction(value)
    return f"{f.numerator}/{f.denominator}"


def parse_frac(s):
    return Fraction(s)


def _var_obj(var):
    fam, idx = var
    if fam == T_FAMILY:
        return list(idx)
    return [fam, idx[0]]


def _parse_var(obj):
    if obj and isinstance(obj[0], str):
        return (obj[0], (obj[1],))
    return (T_FAMILY, tuple(obj))


def mono_obj(mono):
    entries = [[_var_obj(var), e] for var, e in mono]
    entries.sort(key=lambda x: json.dumps(x))
    return entries


def parse_mono(entries):
    return tuple(sorted((_parse_var(v), e) for v, e in entries))


def tpoly_obj(p):
    items = [
        {"monomial": mono_obj(m), "coeff": frac_str(c)} for m, c in p.terms.items()
    ]
    items.sort(key=lambda d: json.dumps(d["monomial"]))
    return items


def parse_tpoly(items, t_degree):
    terms = {}
    for d in items:
        terms[parse_mono(d["monomial"])] = parse_frac(d["coeff"])
    return TimePoly(terms, t_degree)


def xseries_obj(f):
    out = [
        [list(e), tpoly_obj(c)]
        for e, c in sorted(f.terms.items(), key=lambda kv: revlex_key(kv[0]))
    ]
    return out


def parse_xseries(items, config):
    terms = {}
    for e, cp in items:
        terms[tuple(e)] = parse_tpoly(cp, config.t_degree)
    return XSeries(config, terms)


def pdo_obj(p):
    return [
        [list(e), tpoly_obj(c)]
        for e, c in sorted(p.terms.items(), key=lambda kv: revlex_key(kv[0]))
    ]


def parse_pdo(items, config):
    terms = {}
    for e, cp in items:
        terms[tuple(e)] = parse_tpoly(cp, config.t_degree)
    return Pdo(config, terms)


def grpoint_obj(p):
    return {
        "basis": [xseries_obj(u) for u in p.basis],
        "leading_set": [list(v) for v in p.leading_set()],
    }


def parse_grpoint(obj, config):
    rows = [parse_xseries(item, config) for item in obj["basis"]]
    return GrPoint.from_rows(rows)


def config_obj(cfg):
    return {
        "n_vars": cfg.n_vars,
        "d_box_lo": list(cfg.d_box_lo),
        "d_box_hi": list(cfg.d_box_hi),
        "x_lo": list(cfg.x_lo),
        "x_hi": list(cfg.x_hi),
        "t_degree": cfg.t_degree,
        "active_times": sorted(list(a) for a in cfg.active_times),
        "split_mode": cfg.split_mode,
    }


def parse_config(obj):
    return TruncationConfig(
        n_vars=obj["n_vars"],
        d_box_lo=tuple(obj["d_box_lo"]),
        d_box_hi=tuple(obj["d_box_hi"]),
        x_lo=tuple(obj["x_lo"]),
        x_hi=tuple(obj["x_hi"]),
        t_degree=obj["t_degree"],
        active_times=frozenset(tuple(a) for a in obj["active_times"]),
        split_mode=obj.get("split_mode", "revlex"),
    )


def geometry_obj(g):
    return {
        "n_vars": g.config.n_vars,
        "name": g.name,
        "params": g.params,
        "generators": [
            {"pole": list(tag), "series": xseries_obj(series)}
            for series, tag in g.generators
        ],
    }


def parse_geometry(obj, config):
    if obj.get("n_vars") != config.n_vars:
        raise UsageError("geometry dimension does not match configuration")
    gens = [
        (parse_xseries(d["series"], config), tuple(d["pole"]))
        for d in obj["generators"]
    ]
    return GeometryData(
        config=config,
        generators=tuple(gens),
        name=obj.get("name", ""),
        params=obj.get("params", {}),
    )


def canonical_json(obj):
    """Deterministic byte form used for reports and golden files."""
    return json.dumps(obj, sort_keys=True, indent=1, separators=(",", ": ")) + "\n"
