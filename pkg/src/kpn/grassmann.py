"""Finite-window Grassmannian points, the graph-chart wave solve, and the
residue-pairing side: perpendicular points, adjoint waves, bilinear checks.

A point is stored as a reduced echelon family of constant-coefficient
XSeries: leading (revlex-minimal) exponents pairwise distinct, leading
coefficients 1, and no basis element supported on another's leading
exponent.  The graph chart consists of points whose leading exponents fill
the componentwise-nonpositive cone of the window and whose remaining
support is revlex-positive.
"""

from dataclasses import dataclass
from fractions import Fraction

from .errors import NotTransversal, UsageError, WindowTooSmall
from .indexing import (
    is_revlex_positive,
    iter_box,
    mi_add,
    mi_neg,
    revlex_key,
    subset_leq,
)
from .tpoly import (
    ONE_MONO,
    TimePoly,
    enumerate_monomials,
    mono_divisors,
    svar,
    tvar,
)
from .wavefunction import WaveFunction
from .xseries import (
    XSeries,
    build_exponential,
    build_s_exponential,
    exp_coefficient,
    exp_weight,
    pairing,
    xser_invert,
)


# ---------------------------------------------------------------------------
# reduction to echelon normal form


def _monic(row):
    lead = row.leading_coefficient()
    if not lead.is_const() or not lead.const_value():
        raise WindowTooSmall(
            f"leading coefficient at {row.valuation()} is not a rational unit"
        )
    c = lead.const_value()
    return row if c == 1 else row.scale(Fraction(1) / c)


def reduce_rows(rows):
    """Reduced echelon form of a family of constant-coefficient XSeries."""
    by_val = {}
    pending = [r for r in rows if not r.is_zero()]
    while pending:
        r = _monic(pending.pop())
        v = r.valuation()
        held = by_val.get(v)
        if held is None:
            by_val[v] = r
        else:
            diff = r - held
            if not diff.is_zero():
                pending.append(diff)
    # clear pivot exponents from the tails, shallowest pivots first so each
    # row used for clearing is already clean
    pivots = sorted(by_val, key=revlex_key, reverse=True)
    for v in pivots:
        r = by_val[v]
        for w in pivots:
            if w == v:
                continue
            c = r.terms.get(w)
            if c is not None:
                r = r - by_val[w].scale(c)
        by_val[v] = r
    return [by_val[v] for v in sorted(by_val, key=revlex_key, reverse=True)]


@dataclass(frozen=True)
class GrPoint:
    """Reduced family of window series with distinct leading exponents."""

    basis: tuple

    @classmethod
    def from_rows(cls, rows):
        return cls(tuple(reduce_rows(rows)))

    @property
    def config(self):
        return self.basis[0].config

    def leading_set(self):
        return [u.valuation() for u in self.basis]

    def row(self, pivot):
        for u in self.basis:
            if u.valuation() == pivot:
                return u
        return None


def trivial_point(config):
    """The point spanned by the pure monomials of the nonpositive cone."""
    rows = [XSeries.monomial(config, e) for e in iter_box(config.x_lo, config.zero)]
    return GrPoint.from_rows(rows)


def expected_pivots(config):
    return set(iter_box(config.x_lo, config.zero))


def is_F0(p):
    """Graph-chart membership test with a structured diagnostic.

    The leading exponents must fill the nonpositive cone of the window and
    the remaining support must lie in the complement cone (exponents with
    some positive entry), i.e. the monomial complement that the chart
    projects along.
    """
    cfg = p.config
    zero = cfg.zero
    expected = expected_pivots(cfg)
    actual = set(p.leading_set())
    missing = sorted(expected - actual, key=revlex_key)
    extra = sorted(actual - expected, key=revlex_key)
    bad_support = set()
    for u in p.basis:
        v = u.valuation()
        if v not in expected:
            continue
        for e in u.support():
            if e != v and subset_leq(e, zero):
                bad_support.add(e)
    diag = {
        "missing": missing,
        "extra": extra,
        "bad_support": sorted(bad_support, key=revlex_key),
    }
    ok = not missing and not extra and not bad_support
    return ok, diag


# ---------------------------------------------------------------------------
# slice arithmetic (per-time-monomial coefficient maps over Fraction)


def _slice_of(row):
    return {e: c.const_value() for e, c in row.terms.items()}


def _shift_slice(cfg, sl, shift):
    out = {}
    for e, c in sl.items():
        e2 = mi_add(e, shift)
        if cfg.in_x_window(e2):
            out[e2] = c
    return out


def _add_into(acc, sl, factor):
    for e, c in sl.items():
        v = acc.get(e, Fraction(0)) + factor * c
        if v:
            acc[e] = v
        else:
            acc.pop(e, None)


def slices_to_xseries(config, slices):
    """Assemble {monomial -> {exponent -> Fraction}} into one XSeries."""
    per_exp = {}
    for mono, sl in slices.items():
        for e, c in sl.items():
            per_exp.setdefault(e, {})[mono] = c
    terms = {e: TimePoly(mm, config.t_degree) for e, mm in per_exp.items()}
    return XSeries(config, terms)


# ---------------------------------------------------------------------------
# wave function of a graph-chart point


def wave_from_point(p, time_indices=None):
    """Solve for the wave function of a graph-chart point.

    Per time monomial, in increasing total degree, the coefficient series of
    the wave is forced into the span of the point's basis; in the graph
    chart this determines the symbol coefficients by direct projection.  The
    coefficient of a monomial with exponential weight w is exact on the
    window shrunk from above by w (recorded in guards).
    """
    cfg = p.config
    ok, diag = is_F0(p)
    if not ok:
        raise NotTransversal(f"point is outside the graph chart: {diag}")
    if time_indices is None:
        time_indices = tuple(cfg.sorted_times())
    tvars = [tvar(b) for b in time_indices]
    pivot_rows = {u.valuation(): _slice_of(u) for u in p.basis}
    monos = enumerate_monomials(tvars, cfg.t_degree)
    zero = cfg.zero

    def weight(mono):
        w = exp_weight(mono)
        return zero if w is None else w

    def reliable(e, w):
        return all(x <= h - g for x, h, g in zip(e, cfg.x_hi, w))

    slices = {ONE_MONO: dict(pivot_rows[zero])}
    guards = {ONE_MONO: zero}
    for mono in monos:
        if mono == ONE_MONO:
            continue
        w_total = weight(mono)
        known = {}
        for m1, m2 in mono_divisors(mono):
            if not m2:
                continue
            q = exp_coefficient(m2)
            _add_into(known, _shift_slice(cfg, slices[m1], mi_neg(weight(m2))), q)
        # project onto the basis: pivot coefficients give the expansion;
        # resid = known - sum(lambda * u) must then live on the graph cone
        resid = dict(known)
        for e in list(known):
            if e in pivot_rows:
                lam = resid.get(e)
                if lam:
                    _add_into(resid, pivot_rows[e], -lam)
        sl = {}
        for e, c in resid.items():
            if not reliable(e, w_total):
                continue
            if is_revlex_positive(e):
                sl[e] = -c
            elif e not in pivot_rows:
                raise WindowTooSmall(
                    f"wave solve inconsistent at exponent {e}, monomial {mono}: "
                    f"residual {c}"
                )
        slices[mono] = sl
        guards[mono] = w_total
    sym = slices_to_xseries(cfg, slices)
    exp = build_exponential(cfg, 1, time_indices)
    return WaveFunction(
        sym=sym, w=sym * exp, time_indices=tuple(time_indices), guards=guards
    )


def point_from_wave(wf):
    """Extract the point generated by the time coefficients of a wave."""
    cfg = wf.config
    rows = []
    seen_pivots = set()
    for mono in sorted(wf.w.monomials()):
        sl = wf.w.slice(mono)
        if not sl:
            continue
        rows.append(XSeries.from_fractions(cfg, sl))
        w = exp_weight(mono)
        seen_pivots.add(mi_neg(w) if w is not None else cfg.zero)
    point = GrPoint.from_rows(rows)
    actual = set(point.leading_set())
    if actual != seen_pivots:
        raise WindowTooSmall(
            "wave coefficients reduced to unexpected pivots "
            f"{sorted(actual.symmetric_difference(seen_pivots), key=revlex_key)}"
        )
    zero = cfg.zero
    for u in point.basis:
        v = u.valuation()
        for e in u.support():
            if e != v and subset_leq(e, zero):
                raise WindowTooSmall(f"recovered point has cone support at {e}")
    return point


def kpgr_leading_term(wf, a):
    """(d_a w) e^{-xi} at t = 0; the chart map sends it to x^{-a} + higher."""
    sym = wf.sym
    return (sym.derive(tvar(a)) + sym.shift(mi_neg(tuple(a)))).at_zero()


def ba_function(p, time_indices=None):
    """Baker-Akhiezer sum of a point: u0 plus sum of t_{-v(u)} u."""
    cfg = p.config
    if time_indices is None:
        time_indices = tuple(cfg.sorted_times())
    available = set(tuple(b) for b in time_indices)
    acc = XSeries.zero(cfg)
    needed = []
    for u in p.basis:
        v = u.valuation()
        if v == cfg.zero:
            acc = acc + u
            continue
        idx = mi_neg(v)
        if idx not in available:
            needed.append(idx)
            continue
        acc = acc + u.scale(TimePoly.variable(tvar(idx), cfg.t_degree))
    if needed:
        raise UsageError(
            "Baker-Akhiezer sum needs time indices "
            f"{sorted(needed, key=revlex_key)} in active_times"
        )
    return acc


# ---------------------------------------------------------------------------
# the K-side: regrouping in the last variable, perp, adjoint wave


@dataclass(frozen=True)
class KPoint:
    """Family of window series reduced over K (series in the first N-1
    variables), with pairwise-distinct x_N-leading orders."""

    basis: tuple
    orders: tuple

    @property
    def config(self):
        return self.basis[0].config

    def row(self, order):
        for o, u in zip(self.orders, self.basis):
            if o == order:
                return u
        return None


def _k_monic(u):
    parts = u.xn_order_parts()
    order = min(parts)
    lead = parts[order]
    if lead.terms.get(lead.config.zero) == TimePoly.const(1, lead.config.t_degree) and len(
        lead.terms
    ) == 1:
        return order, u
    try:
        inv = xser_invert(lead)
    except Exception as exc:
        raise WindowTooSmall(f"x_N-leading coefficient not invertible: {exc}") from exc
    out = u * inv
    check = out.xn_order_parts()[order]
    if check != XSeries.const(u.config, 1):
        raise WindowTooSmall(
            f"window too tight to normalize x_N-order {order} exactly"
        )
    return order, out


def k_extend(p):
    """Regroup a point over K and reduce to distinct x_N-leading orders."""
    if isinstance(p, GrPoint):
        pending = list(p.basis)
    else:
        pending = list(p)
    by_order = {}
    while pending:
        u = pending.pop()
        if u.is_zero():
            continue
        order, u = _k_monic(u)
        held = by_order.get(order)
        if held is None:
            by_order[order] = u
        else:
            diff = u - held
            if not diff.is_zero():
                pending.append(diff)
    orders = sorted(by_order, reverse=True)
    return KPoint(basis=tuple(by_order[o] for o in orders), orders=tuple(orders))


def perp(q):
    """Perpendicular point under the residue pairing, within the window.

    Solves res_{x_N}(f * g) = 0 for every basis element f by K-valued
    Gauss-Jordan elimination on the pairing matrix between x_N-orders.
    """
    cfg = q.config
    cols = list(range(cfg.x_hi[-1], cfg.x_lo[-1] - 1, -1))
    col_index = {b: j for j, b in enumerate(cols)}
    zero = XSeries.zero(cfg)

    def sub_scaled(row, factor, other):
        # row -= factor * other, dict-of-XSeries over column indices
        for j, val in other.items():
            cur = row.get(j, zero)
            nxt = cur - factor * val
            if nxt.is_zero():
                row.pop(j, None)
            else:
                row[j] = nxt

    pivots = {}
    for f in q.basis:
        entries = f.xn_order_parts()
        row = {}
        for a, k_coeff in entries.items():
            b = -1 - a
            if b in col_index:
                row[col_index[b]] = k_coeff
        for col, prow in pivots.items():
            c = row.pop(col, None)
            if c is not None:
                sub_scaled(row, c, prow)
        if not row:
            continue
        col = min(row.keys())
        try:
            inv = xser_invert(row[col])
        except Exception as exc:
            raise WindowTooSmall(
                f"pairing pivot at x_N-order {cols[col]} not invertible: {exc}"
            ) from exc
        row = {j: inv * v for j, v in row.items()}
        row[col] = XSeries.const(cfg, 1)
        for pcol, prow in pivots.items():
            c = prow.pop(col, None)
            if c is not None:
                sub_scaled(prow, c, row)
                prow.pop(col, None)
        pivots[col] = {j: v for j, v in row.items() if j != col}
    xshift0 = (0,) * (cfg.n_vars - 1)
    kernel_rows = []
    for j, b in enumerate(cols):
        if j in pivots:
            continue
        g = XSeries.monomial(cfg, xshift0 + (b,))
        for pcol, prow in pivots.items():
            val = prow.get(j)
            if val is not None:
                g = g - val.shift(xshift0 + (cols[pcol],))
        kernel_rows.append(g)
    if not kernel_rows:
        raise WindowTooSmall("perpendicular point is empty within the window")
    return k_extend(kernel_rows)


def k_span_residual(q, f, max_steps=None):
    """Remainder of f after eliminating the orders matched by q's basis."""
    rows = {o: u for o, u in zip(q.orders, q.basis)}
    rem = f
    cfg = q.config
    if max_steps is None:
        max_steps = cfg.x_hi[-1] - cfg.x_lo[-1] + 2
    for _ in range(max_steps):
        if rem.is_zero():
            break
        parts = rem.xn_order_parts()
        hits = [o for o in sorted(parts) if o in rows]
        if not hits:
            break
        o = hits[0]
        rem = rem - parts[o] * rows[o]
        if o in rem.xn_order_parts():
            raise WindowTooSmall(f"elimination at x_N-order {o} did not terminate")
    return rem


@dataclass(frozen=True)
class AdjointWave:
    """One-variable wave data of the perpendicular point.

    ``top`` is the leading x_N-order of the perpendicular point; the wave is
    sym * exp(sum s_i x_N^{-i}) where sym = x_N^top + (higher orders).
    """

    sym: XSeries
    w: XSeries
    top: int
    s_count: int


def adjoint_wave(q, s_count=None):
    """Wave function over K of the perpendicular point of q.

    The perpendicular of a graph-chart point occupies consecutive x_N-orders
    from a shifted top (index bookkeeping of the residue pairing), so the
    solve runs relative to that top order.
    """
    cfg = q.config
    if s_count is None:
        s_count = max(1, min(cfg.t_degree, -cfg.x_lo[-1] // max(1, cfg.t_degree)))
    qp = perp(q)
    top = max(qp.orders)
    floor = cfg.x_lo[-1]
    want = set(range(floor, top + 1))
    have = set(qp.orders)
    if not want <= have:
        raise NotTransversal(
            f"perpendicular point misses x_N-orders {sorted(want - have)}"
        )
    rows = {o: qp.row(o) for o in want}
    svars = [svar(i) for i in range(1, s_count + 1)]
    monos = enumerate_monomials(svars, cfg.t_degree)
    xshift0 = (0,) * (cfg.n_vars - 1)

    def s_weight(mono):
        return sum(idx[0] * e for (_, idx), e in mono)

    slices = {ONE_MONO: rows[top]}
    for mono in monos:
        if mono == ONE_MONO:
            continue
        known = XSeries.zero(cfg)
        for m1, m2 in mono_divisors(mono):
            if not m2:
                continue
            c = exp_coefficient(m2)
            known = known + slices[m1].shift(xshift0 + (-s_weight(m2),)).scale(c)
        resid = k_span_residual(KPoint(
            basis=tuple(rows[o] for o in sorted(rows, reverse=True)),
            orders=tuple(sorted(rows, reverse=True)),
        ), known)
        for order in resid.xn_order_parts():
            if order <= top:
                raise WindowTooSmall(
                    f"adjoint wave solve inconsistent at x_N-order {order}, "
                    f"monomial {mono}"
                )
        slices[mono] = -resid
    d = cfg.t_degree
    sym = XSeries.zero(cfg)
    for mono, sl in slices.items():
        sym = sym + sl.scale(TimePoly({mono: Fraction(1)}, d))
    wave = sym * build_s_exponential(cfg, s_count, 1)
    return AdjointWave(sym=sym, w=wave, top=top, s_count=s_count)


def bilinear_check(f, g):
    """Residue pairing of a flow-side and an adjoint-side series."""
    return pairing(f, g)


# ---------------------------------------------------------------------------
# membership and stationarity at the point level


def span_residual(p, f, depth_guard=None):
    """Remainder of f after elimination against the point's pivot rows.

    Exponents below x_lo + depth_guard are outside the claim and dropped.
    """
    cfg = p.config
    rows = {u.valuation(): u for u in p.basis}
    rem = f
    for _ in range(len(rows) + 4):
        changed = False
        for v, u in rows.items():
            c = rem.terms.get(v)
            if c is not None:
                rem = rem - u.scale(c)
                changed = True
        if not changed:
            break
    if depth_guard is not None:
        floor = mi_add(cfg.x_lo, depth_guard)
        rem = rem.restrict(lambda e: subset_leq(floor, e))
    return rem


def stationary_indices(p, search_box):
    """Indices a with x^{-a} * span(p) inside span(p), within window claims."""
    cfg = p.config
    zero = cfg.zero
    out = set()
    for a in iter_box(zero, search_box):
        if a == zero:
            continue
        ok = True
        for u in p.basis:
            shifted = u.shift(mi_neg(a))
            if shifted.is_zero():
                continue
            rem = span_residual(p, shifted, depth_guard=a)
            if not rem.is_zero():
                ok = False
                break
        if ok:
            out.add(a)
    return out


# ---------------------------------------------------------------------------
# random graph-chart points for tests and fixtures


def random_point(config, rng, graph_lo, graph_hi, pivot_depth, density=0.5, magnitude=3):
    """Random graph-chart point: pivots deeper than pivot_depth stay pure."""
    cfg = config
    graph_cols = [
        e
        for e in iter_box(graph_lo, graph_hi)
        if is_revlex_positive(e) and cfg.in_x_window(e)
    ]
    shallow_floor = mi_neg(pivot_depth)
    rows = []
    for piv in iter_box(cfg.x_lo, cfg.zero):
        terms = {piv: Fraction(1)}
        if subset_leq(shallow_floor, piv):
            for e in graph_cols:
                if rng.random() < density:
                    num = rng.randint(-magnitude, magnitude)
                    den = rng.randint(1, magnitude)
                    if num:
                        terms[e] = Fraction(num, den)
        rows.append(XSeries.from_fractions(cfg, terms))
    return GrPoint.from_rows(rows)


def points_agree_on(p1, p2, keep):
    """Compare reduced bases restricted to an exponent predicate."""
    lead1 = {u.valuation(): u for u in p1.basis}
    lead2 = {u.valuation(): u for u in p2.basis}
    shared = set(lead1) & set(lead2)
    for v in shared:
        if lead1[v].restrict(keep).terms != lead2[v].restrict(keep).terms:
            return False
    return True
