"""Truncated polynomials in the time variables, with exact rational coefficients.

A time variable is a pair (family, index) where family is "t" for the flow
times (index = multi-index) or "s" for the adjoint-side times (index = (i,)).
A monomial is a sorted tuple of ((family, index), exponent) pairs; the zero
monomial is ().  Polynomials are truncated at total degree t_degree across
all families jointly, and never store zero coefficients.
"""

from fractions import Fraction

from .errors import UsageError

T_FAMILY = "t"
S_FAMILY = "s"

ONE_MONO = ()


def tvar(index):
    return (T_FAMILY, tuple(index))


def svar(i):
    return (S_FAMILY, (i,))


def mono_mul(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    acc = dict(m1)
    for v, e in m2:
        acc[v] = acc.get(v, 0) + e
    return tuple(sorted(acc.items()))


def mono_degree(m):
    return sum(e for _, e in m)


class TimePoly:
    """Sparse exact polynomial in named time variables."""

    __slots__ = ("terms", "t_degree")

    def __init__(self, terms, t_degree):
        self.terms = {m: c for m, c in terms.items() if c}
        self.t_degree = t_degree

    @classmethod
    def zero(cls, t_degree):
        return cls({}, t_degree)

    @classmethod
    def const(cls, value, t_degree):
        c = Fraction(value)
        return cls({ONE_MONO: c} if c else {}, t_degree)

    @classmethod
    def variable(cls, var, t_degree):
        if t_degree < 1:
            return cls.zero(t_degree)
        return cls({((var, 1),): Fraction(1)}, t_degree)

    def is_zero(self):
        return not self.terms

    def is_const(self):
        return all(m == ONE_MONO for m in self.terms)

    def const_value(self):
        return self.terms.get(ONE_MONO, Fraction(0))

    def degree(self):
        return max((mono_degree(m) for m in self.terms), default=0)

    def __eq__(self, other):
        return isinstance(other, TimePoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        self._check(other)
        acc = dict(self.terms)
        for m, c in other.terms.items():
            s = acc.get(m, Fraction(0)) + c
            if s:
                acc[m] = s
            else:
                acc.pop(m, None)
        return TimePoly(acc, self.t_degree)

    def __neg__(self):
        return TimePoly({m: -c for m, c in self.terms.items()}, self.t_degree)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        cap = self.t_degree
        acc = {}
        for m1, c1 in self.terms.items():
            d1 = mono_degree(m1)
            for m2, c2 in other.terms.items():
                if d1 + mono_degree(m2) > cap:
                    continue
                m = mono_mul(m1, m2)
                s = acc.get(m, Fraction(0)) + c1 * c2
                if s:
                    acc[m] = s
                else:
                    acc.pop(m, None)
        return TimePoly(acc, cap)

    def scale(self, value):
        c = Fraction(value)
        if not c:
            return TimePoly.zero(self.t_degree)
        return TimePoly({m: c * v for m, v in self.terms.items()}, self.t_degree)

    def derive(self, var):
        """Formal partial derivative with respect to one time variable."""
        acc = {}
        for m, c in self.terms.items():
            md = dict(m)
            e = md.get(var, 0)
            if not e:
                continue
            if e == 1:
                del md[var]
            else:
                md[var] = e - 1
            key = tuple(sorted(md.items()))
            s = acc.get(key, Fraction(0)) + c * e
            if s:
                acc[key] = s
            else:
                acc.pop(key, None)
        return TimePoly(acc, self.t_degree)

    def at_zero(self):
        """Constant term (evaluation at all times = 0)."""
        return self.terms.get(ONE_MONO, Fraction(0))

    def coefficient(self, mono):
        return self.terms.get(mono, Fraction(0))

    def degree_part(self, deg):
        return TimePoly(
            {m: c for m, c in self.terms.items() if mono_degree(m) == deg},
            self.t_degree,
        )

    def truncate(self, deg):
        return TimePoly(
            {m: c for m, c in self.terms.items() if mono_degree(m) <= deg},
            self.t_degree,
        )

    def variables(self):
        return {v for m in self.terms for v, _ in m}

    def _check(self, other):
        if not isinstance(other, TimePoly):
            raise UsageError(f"expected TimePoly, got {type(other).__name__}")
        if self.t_degree != other.t_degree:
            raise UsageError("TimePoly t_degree mismatch")

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for m, c in sorted(self.terms.items()):
            if not m:
                bits.append(str(c))
                continue
            vs = "*".join(
                f"{fam}{list(idx)}" + (f"^{e}" if e > 1 else "")
                for (fam, idx), e in m
            )
            bits.append(f"{c}*{vs}" if c != 1 else vs)
        return " + ".join(bits)


def tpoly_arith(p, q, op):
    """Dispatch helper mirroring the one-entry arithmetic contract."""
    if op == "add":
        return p + q
    if op == "mul":
        return p * q
    if op == "scale":
        return p.scale(q)
    raise UsageError(f"unknown op {op!r}")


def enumerate_monomials(variables, max_degree):
    """All monomial keys of total degree <= max_degree in the given variables.

    Returned in increasing total degree, deterministically ordered.
    """
    variables = sorted(variables)
    level = [{}]
    out = [ONE_MONO]
    for _ in range(max_degree):
        nxt = []
        seen = set()
        for m in level:
            for v in variables:
                m2 = dict(m)
                m2[v] = m2.get(v, 0) + 1
                key = tuple(sorted(m2.items()))
                if key not in seen:
                    seen.add(key)
                    nxt.append(m2)
                    out.append(key)
        level = nxt
    return out


def mono_divisors(mono):
    """All factorizations mono = m1 * m2, yielded as (m1, m2) pairs."""
    items = list(mono)

    def rec(i, left, right):
        if i == len(items):
            yield (
                tuple(sorted((v, e) for v, e in left.items() if e)),
                tuple(sorted((v, e) for v, e in right.items() if e)),
            )
            return
        v, e = items[i]
        for k in range(e + 1):
            left[v] = k
            right[v] = e - k
            yield from rec(i + 1, left, right)
        left.pop(v, None)
        right.pop(v, None)

    yield from rec(0, {}, {})
