"""Construction of Grassmannian points from algebro-geometric data.

A geometry is a finite list of local expansions (at the base point) of
functions regular away from the chosen divisors, each tagged with its pole
multi-order.  The ring they generate is enumerated inside the window,
filtered by the valuation condition, and reduced to a candidate point.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import UsageError, WindowTooSmall
from .grassmann import GrPoint, is_F0, reduce_rows, span_residual
from .indexing import (
    iter_box,
    mi_add,
    mi_neg,
    mi_zero,
    revlex_key,
    subset_leq,
)
from .xseries import XSeries

BUILTIN_NAMES = ("p1n", "p1-multi", "cusp", "node", "elliptic", "p2-lines")


@dataclass(frozen=True)
class GeometryData:
    """Expanded local data of a geometry: (series, pole multi-order) pairs."""

    config: object
    generators: tuple            # tuple of (XSeries, pole-tag) pairs, 1 excluded
    name: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        cfg = self.config
        zero = mi_zero(cfg.n_vars)
        for series, tag in self.generators:
            if series.is_zero():
                raise UsageError("geometry generator must be nonzero")
            if not subset_leq(zero, tag):
                raise UsageError(f"pole tag must be nonnegative, got {tag}")
            v = series.valuation()
            if not subset_leq(mi_neg(tag), v):
                raise UsageError(
                    f"generator valuation {v} inconsistent with pole tag {tag}"
                )


def _geom(config, gens, name, params=None):
    return GeometryData(
        config=config,
        generators=tuple((s, tuple(t)) for s, t in gens),
        name=name,
        params=params or {},
    )


def _geometric_series(config, i, c):
    """Expansion of 1/(x_i - c) at 0: -(1/c) sum (x_i/c)^k, window-clipped."""
    n = config.n_vars
    terms = {}
    for k in range(config.x_hi[i] + 1):
        e = tuple(k if j == i else 0 for j in range(n))
        terms[e] = -Fraction(1) / Fraction(c) ** (k + 1)
    return XSeries.from_fractions(config, terms)


def weierstrass_p(config, g2, g3):
    """Truncated Weierstrass function and its derivative, exact coefficients.

    p(x) = x^-2 + sum_{k>=2} c_k x^{2k-2} with c_2 = g2/20, c_3 = g3/28 and
    the standard quadratic recursion for the higher coefficients.
    """
    if config.n_vars != 1:
        raise UsageError("elliptic geometry is one-variable")
    g2 = Fraction(g2)
    g3 = Fraction(g3)
    kmax = (config.x_hi[0] + 2) // 2 + 2
    c = {2: g2 / 20, 3: g3 / 28}
    for k in range(4, kmax + 1):
        acc = Fraction(0)
        for j in range(2, k - 1):
            acc += c[j] * c[k - j]
        c[k] = Fraction(3, (2 * k + 1) * (k - 3)) * acc
    p_terms = {(-2,): Fraction(1)}
    dp_terms = {(-3,): Fraction(-2)}
    for k in range(2, kmax + 1):
        e = 2 * k - 2
        if e <= config.x_hi[0]:
            p_terms[(e,)] = c[k]
        if e - 1 <= config.x_hi[0]:
            dp_terms[(e - 1,)] = c[k] * e
    return (
        XSeries.from_fractions(config, p_terms),
        XSeries.from_fractions(config, dp_terms),
    )


def builtin_geometry(config, name, params=None):
    """Classical geometries with exact window expansions."""
    params = dict(params or {})
    n = config.n_vars
    if name not in BUILTIN_NAMES:
        raise UsageError(f"unknown geometry {name!r}; builtins: {BUILTIN_NAMES}")
    if name == "p1n":
        gens = []
        for i in range(n):
            e = tuple(-1 if j == i else 0 for j in range(n))
            gens.append((XSeries.monomial(config, e), mi_neg(e)))
        return _geom(config, gens, name)
    if name == "p1-multi":
        cs = params.get("c")
        if cs is None:
            cs = [i + 2 for i in range(n)]
        if len(cs) != n or any(Fraction(c) == 0 for c in cs):
            raise UsageError("p1-multi needs n_vars nonzero marked points c")
        gens = []
        for i in range(n):
            e = tuple(-1 if j == i else 0 for j in range(n))
            tag = mi_neg(e)
            gens.append((XSeries.monomial(config, e), tag))
            gens.append((_geometric_series(config, i, Fraction(cs[i])), tag))
        return _geom(config, gens, name, {"c": [str(Fraction(c)) for c in cs]})
    if name == "cusp":
        if n != 1:
            raise UsageError("cusp geometry is one-variable")
        gens = [
            (XSeries.monomial(config, (-2,)), (2,)),
            (XSeries.monomial(config, (-3,)), (3,)),
        ]
        return _geom(config, gens, name)
    if name == "node":
        if n != 1:
            raise UsageError("node geometry is one-variable")
        lam = Fraction(params.get("lam", 2))
        if lam == 0:
            raise UsageError("node needs a nonzero marked point")
        inv2 = Fraction(1) / lam**2
        f2 = XSeries.from_fractions(config, {(-2,): Fraction(1), (0,): -inv2})
        f3 = XSeries.from_fractions(config, {(-3,): Fraction(1), (-1,): -inv2})
        return _geom(
            config, [(f2, (2,)), (f3, (3,))], name, {"lam": str(lam)}
        )
    if name == "elliptic":
        g2 = Fraction(params.get("g2", 4))
        g3 = Fraction(params.get("g3", 1))
        p, dp = weierstrass_p(config, g2, g3)
        return _geom(
            config,
            [(p, (2,)), (dp, (3,))],
            name,
            {"g2": str(g2), "g3": str(g3)},
        )
    if name == "p2-lines":
        if n != 2:
            raise UsageError("p2-lines geometry is two-variable")
        gens = [
            (XSeries.monomial(config, (-1, 0)), (1, 0)),
            (XSeries.monomial(config, (0, -1)), (0, 1)),
            (XSeries.monomial(config, (-1, 1)), (1, 0)),
            (XSeries.monomial(config, (1, -1)), (0, 1)),
        ]
        return _geom(config, gens, name)
    raise UsageError(f"unhandled geometry {name!r}")


def _enumerate_products(geom, budget):
    """Expand all generator monomials whose pole tags fit in the budget."""
    cfg = geom.config
    gens = list(geom.generators)
    rows = [XSeries.const(cfg, 1)]

    def rec(i, acc, tag):
        if i == len(gens):
            return
        # without generator i
        rec(i + 1, acc, tag)
        series, gtag = gens[i]
        cur, cur_tag = acc, tag
        while True:
            nxt_tag = mi_add(cur_tag, gtag)
            if not subset_leq(nxt_tag, budget):
                break
            cur = cur * series
            cur_tag = nxt_tag
            if cur.is_zero():
                break
            rows.append(cur)
            rec(i + 1, cur, cur_tag)
    rec(0, XSeries.const(cfg, 1), mi_zero(cfg.n_vars))
    return rows


def ring_basis(geom, literal_filter=False):
    """Candidate point: window ring elements passing the valuation filter.

    The default filter keeps reduced rows with leading exponent in the
    nonpositive cone; ``literal_filter`` keeps the nonnegative cone instead
    (the literal reading, retained for comparison).
    """
    cfg = geom.config
    budget = mi_neg(cfg.x_lo)
    rows = _enumerate_products(geom, budget)
    reduced = reduce_rows(rows)
    zero = cfg.zero
    if literal_filter:
        keep = lambda v: subset_leq(zero, v)
    else:
        keep = lambda v: subset_leq(v, zero)
    kept = [r for r in reduced if keep(r.valuation())]
    dropped = [r.valuation() for r in reduced if not keep(r.valuation())]
    if not kept:
        raise WindowTooSmall("valuation filter removed every ring element")
    point = GrPoint(basis=tuple(kept))
    closure = verify_closure(geom, point)
    return point, {
        "dropped_pivots": sorted(dropped, key=revlex_key),
        "closure": closure,
    }


def verify_closure(geom, point):
    """Check products of basis elements reduce to zero remainder.

    Only pairs whose combined pole depth stays inside the window are
    checkable; remainders are compared above the pole-depth guard and below
    the top band lost to tail clipping.
    """
    cfg = geom.config
    budget = mi_neg(cfg.x_lo)
    basis = point.basis
    checked = 0
    failures = []
    for i, u in enumerate(basis):
        for v in basis[i:]:
            tag_u = mi_neg(u.valuation())
            tag_v = mi_neg(v.valuation())
            depth = mi_add(tag_u, tag_v)
            if not subset_leq(depth, budget):
                continue
            prod = u * v
            guard_top = tuple(max(a, b) for a, b in zip(tag_u, tag_v))
            rem = span_residual(point, prod, depth_guard=cfg.zero)
            rem = rem.restrict(
                lambda e: all(x <= h - g for x, h, g in zip(e, cfg.x_hi, guard_top))
            )
            checked += 1
            if not rem.is_zero():
                failures.append(
                    {
                        "pivots": [u.valuation(), v.valuation()],
                        "remainder_at": sorted(rem.support(), key=revlex_key),
                    }
                )
    return {"checked_pairs": checked, "failures": failures}


def krichever_point(geom, literal_filter=False):
    """Reduced point of a geometry plus its graph-chart diagnostic."""
    point, report = ring_basis(geom, literal_filter=literal_filter)
    ok, diag = is_F0(point)
    report = dict(report)
    report["F0"] = ok
    report["diagnostic"] = diag
    if report["closure"]["failures"]:
        raise WindowTooSmall(
            f"ring closure failed within window: {report['closure']['failures'][:2]}"
        )
    return point, report
