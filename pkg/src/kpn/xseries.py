"""Truncated iterated-Laurent series with TimePoly coefficients.

An XSeries stores a sparse map from x-exponents (multi-indices, possibly
negative) to TimePoly coefficients, clipped to the componentwise window
[x_lo, x_hi] of its TruncationConfig.  Terms produced outside the window are
silently dropped; the ``clipped`` flag records whether that ever happened so
tests can assert clip-free regimes.
"""

from fractions import Fraction

from .errors import NoValuation, NotInvertible, UsageError
from .indexing import (
    gen_binom,
    mi_add,
    mi_neg,
    mi_zero,
    revlex_key,
    revlex_min,
)
from .tpoly import ONE_MONO, TimePoly, svar, tvar


def _phi_bound(lo, hi):
    """Functional bound used to cap Neumann-style loops on a finite box."""
    n = len(lo)
    m = 1 + 2 * n * max(
        [abs(x) for x in lo] + [abs(x) for x in hi] + [1]
    )
    weights = [m**i for i in range(n)]
    cap = sum(max(abs(l), abs(h)) * w for l, h, w in zip(lo, hi, weights))
    return cap + 2


class XSeries:
    __slots__ = ("config", "terms", "clipped")

    def __init__(self, config, terms, clipped=False):
        self.config = config
        clean = {}
        for e, c in terms.items():
            if c.is_zero():
                continue
            if config.in_x_window(e):
                clean[e] = c
            else:
                clipped = True
        self.terms = clean
        self.clipped = clipped

    @classmethod
    def zero(cls, config):
        return cls(config, {})

    @classmethod
    def const(cls, config, value):
        c = TimePoly.const(value, config.t_degree)
        return cls(config, {config.zero: c})

    @classmethod
    def monomial(cls, config, exponent, value=1):
        c = TimePoly.const(value, config.t_degree)
        return cls(config, {tuple(exponent): c})

    @classmethod
    def from_fractions(cls, config, frac_terms, clipped=False):
        d = config.t_degree
        return cls(
            config,
            {e: TimePoly.const(c, d) for e, c in frac_terms.items()},
            clipped,
        )

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return (
            isinstance(other, XSeries)
            and self.config == other.config
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def _check(self, other):
        if not isinstance(other, XSeries):
            raise UsageError(f"expected XSeries, got {type(other).__name__}")
        if self.config != other.config:
            raise UsageError("XSeries config mismatch")

    def __add__(self, other):
        self._check(other)
        acc = dict(self.terms)
        for e, c in other.terms.items():
            s = acc.get(e)
            acc[e] = c if s is None else s + c
        return XSeries(self.config, acc, self.clipped or other.clipped)

    def __neg__(self):
        return XSeries(self.config, {e: -c for e, c in self.terms.items()}, self.clipped)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        cfg = self.config
        acc = {}
        clipped = self.clipped or other.clipped
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = mi_add(e1, e2)
                if not cfg.in_x_window(e):
                    clipped = True
                    continue
                p = c1 * c2
                if p.is_zero():
                    continue
                s = acc.get(e)
                acc[e] = p if s is None else s + p
        return XSeries(cfg, acc, clipped)

    def scale(self, value):
        if isinstance(value, TimePoly):
            return XSeries(
                self.config,
                {e: c * value for e, c in self.terms.items()},
                self.clipped,
            )
        return XSeries(
            self.config,
            {e: c.scale(value) for e, c in self.terms.items()},
            self.clipped,
        )

    def shift(self, mi):
        """Multiply by the monomial x^mi (exact up to window clipping)."""
        cfg = self.config
        acc = {}
        clipped = self.clipped
        for e, c in self.terms.items():
            e2 = mi_add(e, mi)
            if cfg.in_x_window(e2):
                acc[e2] = c
            else:
                clipped = True
        return XSeries(cfg, acc, clipped)

    def derive(self, var):
        """Coefficientwise time derivative."""
        return XSeries(
            self.config, {e: c.derive(var) for e, c in self.terms.items()}, self.clipped
        )

    def at_zero(self):
        """Evaluate all time variables at 0 (keeps constant coefficients)."""
        d = self.config.t_degree
        return XSeries(
            self.config,
            {e: TimePoly.const(c.at_zero(), d) for e, c in self.terms.items()},
            self.clipped,
        )

    def slice(self, mono):
        """Extract the coefficient of one time monomial as a Fraction map."""
        out = {}
        for e, c in self.terms.items():
            v = c.coefficient(mono)
            if v:
                out[e] = v
        return out

    def monomials(self):
        out = set()
        for c in self.terms.values():
            out.update(c.terms.keys())
        return out

    def valuation(self):
        if not self.terms:
            raise NoValuation("valuation of the zero series is undefined")
        return revlex_min(self.terms.keys())

    def leading_coefficient(self):
        return self.terms[self.valuation()]

    def invert(self):
        """Inverse within the window; needs a constant unit leading term.

        Writes f = c x^m (1 + r) with r supported on revlex-positive
        exponents, then sums the geometric series of -r, which leaves the
        finite window after boundedly many powers.
        """
        if self.is_zero():
            raise NotInvertible("zero series is not invertible")
        cfg = self.config
        m = self.valuation()
        lead = self.terms[m]
        if not lead.is_const() or not lead.const_value():
            raise NotInvertible(
                f"leading coefficient at {m} is not a nonzero rational constant"
            )
        c = lead.const_value()
        # r = f * x^-m / c - 1, supported strictly revlex above 0
        norm = self.shift(mi_neg(m)).scale(Fraction(1, 1) / c)
        r = norm - XSeries.const(cfg, 1)
        acc = XSeries.const(cfg, 1)
        power = XSeries.const(cfg, 1)
        cap = _phi_bound(cfg.x_lo, cfg.x_hi)
        k = 0
        while not power.is_zero():
            power = power * (-r)
            acc = acc + power
            k += 1
            if k > cap:
                raise NotInvertible("geometric series failed to terminate")
        return acc.shift(mi_neg(m)).scale(Fraction(1, 1) / c)

    def residue(self):
        """Coefficient of x_N^{-1}, as a series constant in x_N.

        The result lives in the same configuration with last exponent 0,
        i.e. the embedded copy of the coefficient field K.
        """
        acc = {}
        for e, c in self.terms.items():
            if e[-1] == -1:
                acc[e[:-1] + (0,)] = c
        return XSeries(self.config, acc, self.clipped)

    def xn_order_parts(self):
        """Group terms by their x_N-exponent: {order: K-valued XSeries}."""
        groups = {}
        for e, c in self.terms.items():
            groups.setdefault(e[-1], {})[e[:-1] + (0,)] = c
        return {
            k: XSeries(self.config, v, self.clipped) for k, v in groups.items()
        }

    def support(self):
        return set(self.terms.keys())

    def restrict(self, keep):
        """Keep only exponents for which keep(e) is true."""
        return XSeries(
            self.config,
            {e: c for e, c in self.terms.items() if keep(e)},
            self.clipped,
        )

    def __repr__(self):
        if not self.terms:
            return "XSeries(0)"
        bits = [
            f"x^{list(e)}*({c!r})"
            for e, c in sorted(self.terms.items(), key=lambda kv: revlex_key(kv[0]))
        ]
        return "XSeries(" + " + ".join(bits) + ")"


def xser_mul(f, g):
    return f * g


def xser_invert(f):
    return f.invert()


def valuation(f):
    return f.valuation()


def residue(f):
    return f.residue()


def pairing(f, g):
    """Residue pairing <f, g> = res_{x_N}(f * g)."""
    return (f * g).residue()


def build_exponential(config, sign=1, variables=None):
    """exp(sign * sum t_b x^{-b}) over the active times, exact to t_degree.

    ``variables`` may override the set of flow indices (defaults to the
    active times of the configuration).
    """
    if sign not in (1, -1):
        raise UsageError("sign must be +1 or -1")
    if variables is None:
        variables = config.sorted_times()
    acc = XSeries.const(config, 1)
    d = config.t_degree
    for b in sorted(variables):
        gen = TimePoly.variable(tvar(b), d).scale(sign)
        term = XSeries.const(config, 1)
        power = XSeries.const(config, 1)
        fact = 1
        xb = mi_neg(tuple(b))
        for k in range(1, d + 1):
            fact *= k
            power = power.shift(xb).scale(gen)
            term = term + power.scale(Fraction(1, fact))
        acc = acc * term
    return acc


def build_s_exponential(config, count, sign=1):
    """exp(sign * sum_{i=1..count} s_i x_N^{-i}) for the adjoint time family."""
    if sign not in (1, -1):
        raise UsageError("sign must be +1 or -1")
    acc = XSeries.const(config, 1)
    d = config.t_degree
    n = config.n_vars
    for i in range(1, count + 1):
        gen = TimePoly.variable(svar(i), d).scale(sign)
        term = XSeries.const(config, 1)
        power = XSeries.const(config, 1)
        fact = 1
        xb = tuple(0 for _ in range(n - 1)) + (-i,)
        for k in range(1, d + 1):
            fact *= k
            power = power.shift(xb).scale(gen)
            term = term + power.scale(Fraction(1, fact))
        acc = acc * term
    return acc


def exp_weight(mono):
    """x-exponent shift sum(k_b * b) contributed by a flow-time monomial."""
    acc = None
    for (fam, idx), e in mono:
        if fam != "t":
            raise UsageError("exp_weight applies to flow-time monomials only")
        contrib = tuple(x * e for x in idx)
        acc = contrib if acc is None else mi_add(acc, contrib)
    return acc


def exp_coefficient(mono):
    """Rational coefficient of a time monomial in exp(sum t_b x^{-b})."""
    c = Fraction(1)
    for (_, _), e in mono:
        f = 1
        for j in range(2, e + 1):
            f *= j
        c /= f
    return c
