"""Multi-index combinatorics: the two orders on Z^N and generalized binomials.

A multi-index is a plain tuple of ints.  Two orders coexist:

* ``subset_leq`` -- the componentwise partial order (written with set symbols
  in the literature: a "⊆" b iff a_i <= b_i for all i);
* ``revlex_cmp`` -- the reverse lexicographic total order, comparing at the
  *largest* index where the entries differ.  It is the order realized by the
  functional sum(a_i * k**i) for k large.
"""

from fractions import Fraction
from itertools import product

from .errors import NoValuation, UsageError


def check_same_length(a, b):
    if len(a) != len(b):
        raise UsageError(f"multi-index length mismatch: {len(a)} vs {len(b)}")


def revlex_cmp(a, b):
    """Return -1, 0, 1 comparing a and b in reverse lexicographic order."""
    check_same_length(a, b)
    for i in range(len(a) - 1, -1, -1):
        if a[i] != b[i]:
            return -1 if a[i] < b[i] else 1
    return 0


def revlex_key(a):
    """Sort key realizing the revlex order (lex on the reversed tuple)."""
    return tuple(reversed(a))


def revlex_min(indices):
    return min(indices, key=revlex_key)


def is_revlex_positive(a):
    """True iff a > 0 in revlex, i.e. the last nonzero entry is positive."""
    return revlex_cmp(a, (0,) * len(a)) > 0


def is_revlex_negative(a):
    return revlex_cmp(a, (0,) * len(a)) < 0


def subset_leq(a, b):
    """Componentwise order: a_i <= b_i for all i."""
    check_same_length(a, b)
    return all(x <= y for x, y in zip(a, b))


def subset_lt(a, b):
    """Strict componentwise order: a != b and a_i <= b_i for all i."""
    return a != b and subset_leq(a, b)


def mi_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def mi_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def mi_neg(a):
    return tuple(-x for x in a)


def mi_zero(n):
    return (0,) * n


def mi_unit(i, n):
    """The i-th unit multi-index e_i (0-based i)."""
    return tuple(1 if j == i else 0 for j in range(n))


def mi_total(a):
    return sum(a)


def iter_box(lo, hi):
    """Yield every multi-index in the componentwise box [lo, hi]."""
    check_same_length(lo, hi)
    ranges = [range(l, h + 1) for l, h in zip(lo, hi)]
    return (tuple(reversed(t)) for t in product(*reversed(ranges)))


def in_box(a, lo, hi):
    return all(l <= x <= h for x, l, h in zip(a, lo, hi))


def gen_binom(a, k):
    """binom(a, k) = a(a-1)...(a-k+1)/k! for integer a (possibly negative)."""
    if k < 0:
        raise UsageError("gen_binom needs k >= 0")
    num = 1
    for j in range(k):
        num *= a - j
    den = 1
    for j in range(2, k + 1):
        den *= j
    return Fraction(num, den)


def valuation_of_support(exponents):
    """Revlex-minimal element of a nonempty exponent collection."""
    exponents = list(exponents)
    if not exponents:
        raise NoValuation("zero series has no valuation")
    return revlex_min(exponents)
