"""Pseudodifferential operators in N variables with the generalized Leibniz rule.

Coefficients are TimePoly values; the derivative of a coefficient in the
Leibniz rule is the derivative with respect to the unit-index time t_{e_i}
(the classical identification of the space variables with the first times).
Exponents live in the componentwise derivative box of the configuration.
"""

from fractions import Fraction

from .config import SPLIT_COMPONENTWISE, SPLIT_REVLEX
from .errors import NotInvertible, UsageError
from .indexing import (
    gen_binom,
    mi_add,
    mi_neg,
    mi_sub,
    is_revlex_negative,
    revlex_cmp,
    revlex_key,
    subset_leq,
)
from .tpoly import TimePoly, tvar
from .xseries import XSeries, _phi_bound


class Pdo:
    __slots__ = ("config", "terms", "clipped")

    def __init__(self, config, terms, clipped=False):
        self.config = config
        clean = {}
        for e, c in terms.items():
            if c.is_zero():
                continue
            if config.in_d_box(e):
                clean[e] = c
            else:
                clipped = True
        self.terms = clean
        self.clipped = clipped

    @classmethod
    def zero(cls, config):
        return cls(config, {})

    @classmethod
    def identity(cls, config):
        return cls(config, {config.zero: TimePoly.const(1, config.t_degree)})

    @classmethod
    def monomial(cls, config, exponent, value=1):
        if isinstance(value, TimePoly):
            c = value
        else:
            c = TimePoly.const(value, config.t_degree)
        return cls(config, {tuple(exponent): c})

    @classmethod
    def d(cls, config, i):
        """The basic derivation in the i-th variable (0-based index)."""
        e = tuple(1 if j == i else 0 for j in range(config.n_vars))
        return cls.monomial(config, e)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return (
            isinstance(other, Pdo)
            and self.config == other.config
            and self.terms == other.terms
        )

    def _check(self, other):
        if not isinstance(other, Pdo):
            raise UsageError(f"expected Pdo, got {type(other).__name__}")
        if self.config != other.config:
            raise UsageError("Pdo config mismatch")

    def __add__(self, other):
        self._check(other)
        acc = dict(self.terms)
        for e, c in other.terms.items():
            s = acc.get(e)
            acc[e] = c if s is None else s + c
        return Pdo(self.config, acc, self.clipped or other.clipped)

    def __neg__(self):
        return Pdo(self.config, {e: -c for e, c in self.terms.items()}, self.clipped)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, value):
        if isinstance(value, TimePoly):
            return Pdo(
                self.config, {e: c * value for e, c in self.terms.items()}, self.clipped
            )
        return Pdo(
            self.config,
            {e: c.scale(value) for e, c in self.terms.items()},
            self.clipped,
        )

    def derive(self, var):
        return Pdo(
            self.config, {e: c.derive(var) for e, c in self.terms.items()}, self.clipped
        )

    def at_zero(self):
        d = self.config.t_degree
        return Pdo(
            self.config,
            {e: TimePoly.const(c.at_zero(), d) for e, c in self.terms.items()},
            self.clipped,
        )

    def support(self):
        return set(self.terms.keys())

    def restrict(self, keep):
        return Pdo(
            self.config,
            {e: c for e, c in self.terms.items() if keep(e)},
            self.clipped,
        )

    def __mul__(self, other):
        return pdo_mul(self, other)

    def __repr__(self):
        if not self.terms:
            return "Pdo(0)"
        bits = [
            f"({c!r})*D^{list(e)}"
            for e, c in sorted(self.terms.items(), key=lambda kv: revlex_key(kv[0]))
        ]
        return "Pdo(" + " + ".join(bits) + ")"


def _derivative_table(coeff, units, max_order):
    """All nonzero iterated t_{e_i}-derivatives of a coefficient, by exponent."""
    table = {}
    frontier = {(0,) * len(units): coeff}
    table.update(frontier)
    for _ in range(max_order):
        new = {}
        for g, c in frontier.items():
            for i, u in enumerate(units):
                g2 = tuple(v + (1 if j == i else 0) for j, v in enumerate(g))
                if g2 in table or g2 in new:
                    continue
                # fill in lexicographic layers: derive from the recorded parent
                d = c.derive(tvar(u))
                if not d.is_zero():
                    new[g2] = d
        if not new:
            break
        table.update(new)
        frontier = new
    return table


def pdo_mul(p, q):
    """Generalized Leibniz product, clipped to the derivative box."""
    p._check(q)
    cfg = p.config
    units = cfg.units()
    acc = {}
    clipped = p.clipped or q.clipped
    tables = {
        beta: _derivative_table(c, units, cfg.t_degree)
        for beta, c in q.terms.items()
    }
    for alpha, a in p.terms.items():
        for beta, tab in tables.items():
            base = mi_add(alpha, beta)
            for gamma, dcoeff in tab.items():
                w = Fraction(1)
                ok = True
                for ai, gi in zip(alpha, gamma):
                    if gi:
                        if 0 <= ai < gi:
                            ok = False
                            break
                        w *= gen_binom(ai, gi)
                if not ok or not w:
                    continue
                e = mi_sub(base, gamma)
                if not cfg.in_d_box(e):
                    clipped = True
                    continue
                term = (a * dcoeff).scale(w)
                if term.is_zero():
                    continue
                s = acc.get(e)
                acc[e] = term if s is None else s + term
    return Pdo(cfg, acc, clipped)


def pdo_split(p, part, mode=None):
    """Nonnegative/negative splitting, by revlex (default) or componentwise."""
    if part not in ("plus", "minus"):
        raise UsageError("part must be 'plus' or 'minus'")
    mode = mode or p.config.split_mode
    zero = p.config.zero
    if mode == SPLIT_REVLEX:
        is_plus = lambda e: revlex_cmp(e, zero) >= 0
    elif mode == SPLIT_COMPONENTWISE:
        is_plus = lambda e: subset_leq(zero, e)
    else:
        raise UsageError(f"unknown split mode {mode!r}")
    if part == "plus":
        keep = is_plus
    else:
        keep = lambda e: not is_plus(e)
    return p.restrict(keep)


def pdo_invert(p):
    """Neumann inverse of 1 + (nilpotent-modulo-truncation) operators."""
    cfg = p.config
    one = Pdo.identity(cfg)
    q = one - p
    lead = p.terms.get(cfg.zero)
    if lead is None or lead.at_zero() != 1:
        raise NotInvertible("operator is not of the form 1 + lower structure")
    for e in q.terms:
        if not is_revlex_negative(e) and e != cfg.zero:
            raise NotInvertible(f"non-unit structure at exponent {e}")
    acc = one
    power = one
    cap = _phi_bound(cfg.d_box_lo, cfg.d_box_hi) * (cfg.t_degree + 1) + cfg.t_degree + 4
    k = 0
    while True:
        power = pdo_mul(power, q)
        if power.is_zero():
            break
        acc = acc + power
        k += 1
        if k > cap:
            raise NotInvertible("Neumann series failed to terminate")
    return acc


def pdo_divide_right(a, b):
    """Solve x . b = a for x, where b = 1 + (revlex-negative tail).

    Proceeds down the revlex order: the leading coefficient of b is the
    constant 1, so peeling the revlex-top term of the remainder is exact.
    Much sharper than multiplying by a Neumann inverse, because only the
    finitely many stored coefficients of b ever enter.
    """
    cfg = a.config
    b._check(a)
    lead = b.terms.get(cfg.zero)
    if lead is None or not lead.is_const() or lead.const_value() != 1:
        raise NotInvertible("right divisor must have constant leading term 1")
    for e in b.terms:
        if e != cfg.zero and not is_revlex_negative(e):
            raise NotInvertible(f"right divisor has non-negative tail at {e}")
    x_terms = {}
    r = a
    steps = 0
    bound = 4 * len(list(_box_size(cfg))) + 16
    while not r.is_zero():
        delta = max(r.terms, key=revlex_key)
        c = r.terms[delta]
        x_terms[delta] = x_terms.get(delta, TimePoly.zero(cfg.t_degree)) + c
        r = r - pdo_mul(Pdo.monomial(cfg, delta, c), b)
        if delta in r.terms:
            raise NotInvertible("division step failed to cancel the leading term")
        steps += 1
        if steps > bound:
            raise NotInvertible("right division failed to terminate")
    return Pdo(cfg, x_terms)


def _box_size(cfg):
    from .indexing import iter_box

    return iter_box(cfg.d_box_lo, cfg.d_box_hi)


def pdo_pow(a, basis):
    """Ordered product basis[0]^a_0 ... basis[N-1]^a_N for a >= 0."""
    if not basis:
        raise UsageError("empty operator basis")
    cfg = basis[0].config
    if len(a) != len(basis):
        raise UsageError("exponent length does not match basis length")
    if any(x < 0 for x in a):
        raise UsageError("pdo_pow needs a componentwise-nonnegative exponent")
    acc = Pdo.identity(cfg)
    for op, k in zip(basis, a):
        for _ in range(k):
            acc = pdo_mul(acc, op)
    return acc


def pdo_adjoint(p):
    """Formal adjoint sum (-D)^a . a_a, renormalized to coefficient-left form."""
    cfg = p.config
    acc = Pdo.zero(cfg)
    for e, c in p.terms.items():
        sign = -1 if sum(e) % 2 else 1
        mono = Pdo.monomial(cfg, e, sign)
        acc = acc + pdo_mul(mono, Pdo.monomial(cfg, cfg.zero, c))
    return acc


def pdo_symbol(p):
    """Substitute D^a -> x^{-a}; wave objects multiply this by exp(xi)."""
    cfg = p.config
    acc = {}
    clipped = p.clipped
    for e, c in p.terms.items():
        xe = mi_neg(e)
        if cfg.in_x_window(xe):
            acc[xe] = c
        else:
            clipped = True
    return XSeries(cfg, acc, clipped)


def pdo_from_symbol(xs):
    """Inverse of pdo_symbol on window-compatible series (x^g -> D^{-g})."""
    cfg = xs.config
    acc = {}
    clipped = xs.clipped
    for e, c in xs.terms.items():
        de = mi_neg(e)
        if cfg.in_d_box(de):
            acc[de] = c
        else:
            clipped = True
    return Pdo(cfg, acc, clipped)


def commutator(p, q):
    return pdo_mul(p, q) - pdo_mul(q, p)
