"""The N-variable KP hierarchy: dressing, flow integration, Lax residuals,
wave functions, and finite-gap certificates.

Flow integration works through the graph-chart wave solve: the seed's
space-profile (its dependence on the unit-index times) determines a point of
the Grassmannian, whose wave function solves every flow at once.  Undressing
integrates the flow system directly, written with the unknown on the left
(adjoint form) so the recursion in total time degree is well founded.
"""

from dataclasses import dataclass, field

from .errors import FlowInconsistency, NotDressable, UsageError
from .indexing import (
    is_revlex_negative,
    iter_box,
    mi_neg,
    subset_lt,
)
from .pdo import (
    Pdo,
    commutator,
    pdo_adjoint,
    pdo_divide_right,
    pdo_from_symbol,
    pdo_invert,
    pdo_mul,
    pdo_pow,
    pdo_split,
    pdo_symbol,
)
from .tpoly import ONE_MONO, T_FAMILY, TimePoly, mono_degree, tvar
from .wavefunction import WaveFunction
from .xseries import XSeries, build_exponential, exp_weight


@dataclass
class DressingOp:
    """An operator 1 + (revlex-negative part); caches its Neumann inverse."""

    S: Pdo
    _inv: Pdo = field(default=None, repr=False)

    def __post_init__(self):
        cfg = self.S.config
        lead = self.S.terms.get(cfg.zero)
        if lead is None or lead.at_zero() != 1:
            raise UsageError("dressing operator must be 1 + lower structure")
        for e in self.S.terms:
            if e != cfg.zero and not is_revlex_negative(e):
                raise UsageError(f"dressing tail must be revlex-negative, got {e}")

    @property
    def config(self):
        return self.S.config

    def inverse(self):
        if self._inv is None:
            self._inv = pdo_invert(self.S)
        return self._inv


@dataclass(frozen=True)
class LaxTuple:
    """The dressed derivations L_1..L_N."""

    ops: tuple

    @property
    def config(self):
        return self.ops[0].config

    def power(self, a):
        return pdo_pow(a, list(self.ops))


def guarded_d_region(config, below, above=None):
    """Predicate selecting the derivative-box core trusted by a pipeline."""
    lo = tuple(l + g for l, g in zip(config.d_box_lo, below))
    if above is None:
        hi = config.d_box_hi
    else:
        hi = tuple(h - g for h, g in zip(config.d_box_hi, above))
    return lambda e: all(a <= x <= b for x, a, b in zip(e, lo, hi))


def pdo_zero_on(p, region=None):
    """True iff every stored coefficient inside the region vanishes."""
    if region is None:
        return p.is_zero()
    return all(not region(e) for e in p.terms)


def max_term_on(p, region):
    """A witness (exponent, coefficient) inside the region, or None."""
    hits = [e for e in p.terms if region(e)]
    if not hits:
        return None
    e = sorted(hits)[0]
    return e, p.terms[e]


def dress(s_op, check_region=None):
    """Conjugate the basic derivations by the dressing operator.

    Solves L_i . S = S . d_i by exact right division instead of multiplying
    by a Neumann inverse; only the stored coefficients of S enter, so the
    result is exact outside the staircase corner bands of the window.
    """
    S = s_op.S
    cfg = S.config
    ops = []
    for i in range(cfg.n_vars):
        L = pdo_divide_right(pdo_mul(S, Pdo.d(cfg, i)), S)
        ops.append(L)
    lax = LaxTuple(ops=tuple(ops))
    if check_region is not None:
        problems = lax_shape_violations(lax, check_region)
        if problems:
            raise NotDressable(f"dressed tuple violates the Lax shape: {problems[:3]}")
    return lax


def lax_shape_violations(lax, region):
    """Exponents inside the region violating L_i = d_i + (strict lower cone)."""
    cfg = lax.config
    zero = cfg.zero
    bad = []
    for i, L in enumerate(lax.ops):
        unit = tuple(1 if j == i else 0 for j in range(cfg.n_vars))
        for e, c in L.terms.items():
            if not region(e):
                continue
            if e == unit:
                if c.at_zero() != 1 or not c.is_const():
                    bad.append((i, e, "unit coefficient"))
                continue
            if not subset_lt(e, zero):
                bad.append((i, e, "exponent outside the strict lower cone"))
    return bad


def lax_residual(lax, s_op, a, i):
    """The flow defect d_a L_i - [(L^a)_+, L_i], term-exact."""
    a = tuple(a)
    cfg = lax.config
    if a not in cfg.active_times:
        raise UsageError(f"flow index {a} is not active")
    L_i = lax.ops[i]
    La_plus = pdo_split(lax.power(a), "plus")
    return L_i.derive(tvar(a)) - commutator(La_plus, L_i)


def wave_function(s_op, time_indices=None):
    """Assemble the wave w = symbol(S) * exp(xi)."""
    cfg = s_op.config
    if time_indices is None:
        time_indices = tuple(cfg.sorted_times())
    sym = pdo_symbol(s_op.S)
    return WaveFunction(
        sym=sym,
        w=sym * build_exponential(cfg, 1, time_indices),
        time_indices=tuple(time_indices),
    )


def wave_contract_residual(wf, lax, a):
    """Symbol-level defect of d_a w = (L^a)_+ w, with exp(xi) divided out."""
    a = tuple(a)
    sym = wf.sym
    lhs = sym.derive(tvar(a)) + sym.shift(mi_neg(a))
    La_plus = pdo_split(lax.power(a), "plus")
    rhs = pdo_symbol(pdo_mul(La_plus, pdo_from_symbol(sym)))
    return lhs - rhs


def _profile_only(p):
    """Check coefficients depend on the unit-index times alone."""
    cfg = p.config
    units = {tvar(u) for u in cfg.units()}
    for c in p.terms.values():
        if not c.variables() <= units:
            return False
    return True


def integrate_flows(s0, time_indices=None):
    """Solve the hierarchy with the given space-profile seed.

    The seed is 1 + (revlex-negative) with coefficients depending only on
    the unit-index times (the space profile; constants give the stationary
    gauge orbit).  Its profile determines a graph-chart point; the wave
    function of that point supplies the unique solution whose profile
    restriction matches the seed.
    """
    from .grassmann import GrPoint, wave_from_point

    cfg = s0.config
    seed = DressingOp(S=s0)
    if not _profile_only(s0):
        raise UsageError(
            "flow seed coefficients must depend only on the unit-index times"
        )
    if time_indices is None:
        time_indices = tuple(cfg.sorted_times())
    sym0 = pdo_symbol(s0)
    exp_units = build_exponential(cfg, 1, cfg.units())
    w0 = sym0 * exp_units
    rows = []
    covered = set()
    for mono in w0.monomials():
        sl = w0.slice(mono)
        if not sl:
            continue
        w = exp_weight(mono)
        w = cfg.zero if w is None else w
        reliable = lambda e, w=w: all(
            x <= h - g for x, h, g in zip(e, cfg.x_hi, w)
        )
        rows.append(
            XSeries.from_fractions(cfg, {e: c for e, c in sl.items() if reliable(e)})
        )
        covered.add(mi_neg(w))
    for piv in iter_box(cfg.x_lo, cfg.zero):
        if piv not in covered:
            rows.append(XSeries.monomial(cfg, piv))
    point = GrPoint.from_rows(rows)
    wf = wave_from_point(point, time_indices)
    S = pdo_from_symbol(wf.sym)
    out = DressingOp(S=S)
    _check_profile_restriction(s0, S)
    return out


def _check_profile_restriction(s0, S):
    """The solution's pure-profile part must reproduce the seed."""
    cfg = s0.config
    units = {tvar(u) for u in cfg.units()}

    def profile_part(p):
        kept = {}
        for e, c in p.terms.items():
            sub = {
                m: v
                for m, v in c.terms.items()
                if all(var in units for var, _ in m)
            }
            if sub:
                kept[e] = TimePoly(sub, cfg.t_degree)
        return kept

    want = profile_part(s0)
    got = profile_part(S)
    if want != got:
        diffs = set(want) ^ set(got)
        diffs |= {e for e in set(want) & set(got) if want[e] != got[e]}
        raise FlowInconsistency(
            f"integrated flow does not restrict to the seed profile at {sorted(diffs)[:4]}"
        )


def undress(lax, normalization, time_indices=None):
    """Recover the dressing with a prescribed value at t = 0.

    Integrates the flow system for S degree by degree in adjoint form
    (unknown on the left), recovering each coefficient redundantly from
    every flow present in its monomial and asserting agreement.
    """
    cfg = lax.config
    if time_indices is None:
        time_indices = tuple(sorted(cfg.active_times))
    if isinstance(normalization, DressingOp):
        norm = normalization.S
    else:
        norm = normalization
    norm0 = norm.at_zero()
    if norm0 != norm:
        raise UsageError("normalization must have constant coefficients")
    right = {}
    for b in time_indices:
        Lb_minus = pdo_split(lax.power(tuple(b)), "minus")
        right[tuple(b)] = pdo_adjoint(Lb_minus)
    w_acc = pdo_adjoint(norm0)
    for deg in range(cfg.t_degree):
        layers = {}
        for b, rb in right.items():
            rhs = -pdo_mul(w_acc, rb)
            var = tvar(b)
            for e, c in rhs.terms.items():
                for mono, val in c.degree_part(deg).terms.items():
                    md = dict(mono)
                    md[var] = md.get(var, 0) + 1
                    key = tuple(sorted(md.items()))
                    recovered = val / md[var]
                    prev = layers.setdefault((e, key), {})
                    if b in prev and prev[b] != recovered:
                        raise NotDressable(f"flow {b} self-inconsistent at {e}, {key}")
                    prev[b] = recovered
        new_terms = {}
        for (e, key), recs in layers.items():
            vals = set(recs.values())
            if len(vals) != 1:
                raise NotDressable(
                    f"flows disagree at exponent {e}, monomial {key}: {recs}"
                )
            new_terms.setdefault(e, {})[key] = vals.pop()
        if new_terms:
            add = Pdo(
                cfg,
                {e: TimePoly(mm, cfg.t_degree) for e, mm in new_terms.items()},
            )
            w_acc = w_acc + add
    S = pdo_adjoint(w_acc)
    return DressingOp(S=S)


def random_seed(config, rng, depth=None, terms=2, profile_degree=1, magnitude=2):
    """Random flow seed 1 + (cone tail) with a random space profile."""
    from fractions import Fraction

    cfg = config
    if depth is None:
        depth = tuple(min(2, -l) for l in cfg.d_box_lo)
    cone = [
        e
        for e in iter_box(mi_neg(depth), cfg.zero)
        if e != cfg.zero
    ]
    units = cfg.units()
    acc = {}
    for _ in range(terms):
        e = cone[rng.randrange(len(cone))]
        coeff = TimePoly.const(
            Fraction(rng.randint(-magnitude, magnitude), rng.randint(1, magnitude)),
            cfg.t_degree,
        )
        if profile_degree >= 1 and rng.random() < 0.7:
            u = units[rng.randrange(len(units))]
            lin = TimePoly.variable(tvar(u), cfg.t_degree).scale(
                Fraction(rng.randint(-magnitude, magnitude), rng.randint(1, magnitude))
            )
            coeff = coeff + lin
        if coeff.is_zero():
            continue
        prev = acc.get(e)
        acc[e] = coeff if prev is None else prev + coeff
    s0 = Pdo.identity(cfg) + Pdo(cfg, acc)
    return DressingOp(S=s0).S


def finite_gap_certificate(s_op, search_box, region=None):
    """Flow indices whose power operator is purely differential.

    Returns the set of indices a with (L^a)_- = 0 on the trusted region
    (everywhere, if no region is given).
    """
    cfg = s_op.config
    lax = dress(s_op)
    out = set()
    for a in iter_box(cfg.zero, tuple(search_box)):
        if a == cfg.zero:
            continue
        minus = pdo_split(lax.power(a), "minus")
        if region is None:
            ok = minus.is_zero()
        else:
            ok = all(not region(e) for e in minus.terms)
        if ok:
            out.add(a)
    return out
