"""Truncation configuration: the finite window every computation lives in."""

from dataclasses import dataclass, field

from .errors import UsageError
from .indexing import mi_unit, mi_zero, subset_leq, subset_lt

SPLIT_REVLEX = "revlex"
SPLIT_COMPONENTWISE = "componentwise"


@dataclass(frozen=True)
class TruncationConfig:
    """Finite truncation data for one computation context.

    d_box_lo/hi bound the stored derivative exponents, x_lo/hi the stored
    Laurent exponents, t_degree the total degree kept in the time variables,
    and active_times lists the flow indices actually represented.
    """

    n_vars: int
    d_box_lo: tuple
    d_box_hi: tuple
    x_lo: tuple
    x_hi: tuple
    t_degree: int
    active_times: frozenset = field(default=frozenset())
    split_mode: str = SPLIT_REVLEX

    def __post_init__(self):
        n = self.n_vars
        if n < 1:
            raise UsageError("n_vars must be positive")
        for name in ("d_box_lo", "d_box_hi", "x_lo", "x_hi"):
            v = getattr(self, name)
            if len(v) != n or not all(isinstance(x, int) for x in v):
                raise UsageError(f"{name} must be an int tuple of length {n}")
        zero = mi_zero(n)
        if not (subset_leq(self.d_box_lo, zero) and subset_leq(zero, self.d_box_hi)):
            raise UsageError("derivative box must contain 0 componentwise")
        if not (subset_leq(self.x_lo, zero) and subset_leq(zero, self.x_hi)):
            raise UsageError("x window must contain 0 componentwise")
        if self.t_degree < 0:
            raise UsageError("t_degree must be nonnegative")
        if self.split_mode not in (SPLIT_REVLEX, SPLIT_COMPONENTWISE):
            raise UsageError(f"unknown split_mode {self.split_mode!r}")
        times = frozenset(tuple(a) for a in self.active_times)
        object.__setattr__(self, "active_times", times)
        for a in times:
            if len(a) != n:
                raise UsageError(f"time index {a} has wrong length")
            if not subset_lt(zero, a):
                raise UsageError(f"time index {a} must satisfy 0 < a componentwise")
            if not subset_leq(a, self.d_box_hi):
                raise UsageError(f"time index {a} outside derivative box")
        for i in range(n):
            if mi_unit(i, n) not in times:
                raise UsageError(f"active_times must contain the unit index e_{i + 1}")

    @property
    def zero(self):
        return mi_zero(self.n_vars)

    def units(self):
        return [mi_unit(i, self.n_vars) for i in range(self.n_vars)]

    def sorted_times(self):
        return sorted(self.active_times)

    def in_x_window(self, a):
        return all(l <= x <= h for x, l, h in zip(a, self.x_lo, self.x_hi))

    def in_d_box(self, a):
        return all(l <= x <= h for x, l, h in zip(a, self.d_box_lo, self.d_box_hi))

    def weight_cap(self):
        """Componentwise bound on sum(k_a * a) over stored time monomials."""
        if not self.active_times:
            return mi_zero(self.n_vars)
        caps = []
        for i in range(self.n_vars):
            caps.append(self.t_degree * max(a[i] for a in self.active_times))
        return tuple(caps)

    def advisories(self):
        """Human-readable warnings about mutually tight truncation choices."""
        notes = []
        cap = self.weight_cap()
        for i in range(self.n_vars):
            if -self.x_lo[i] < -self.d_box_lo[i] + cap[i]:
                notes.append(
                    f"x window depth {-self.x_lo[i]} in variable {i + 1} is smaller "
                    f"than derivative depth {-self.d_box_lo[i]} plus flow weight "
                    f"{cap[i]}; wave solves will lose bottom terms"
                )
            if self.x_hi[i] < self.d_box_hi[i]:
                notes.append(
                    f"x window top {self.x_hi[i]} in variable {i + 1} is below the "
                    f"derivative box top {self.d_box_hi[i]}; symbols will clip"
                )
        return notes


def default_config(n_vars=2):
    """Desk-scale defaults per dimension; exact arithmetic throughout."""
    if n_vars == 1:
        return TruncationConfig(
            n_vars=1,
            d_box_lo=(-12,),
            d_box_hi=(12,),
            x_lo=(-24,),
            x_hi=(24,),
            t_degree=3,
            active_times=frozenset({(1,), (2,), (3,)}),
        )
    if n_vars == 2:
        return TruncationConfig(
            n_vars=2,
            d_box_lo=(-6, -6),
            d_box_hi=(6, 6),
            x_lo=(-12, -12),
            x_hi=(12, 12),
            t_degree=2,
            active_times=frozenset({(1, 0), (0, 1), (1, 1)}),
        )
    if n_vars == 3:
        return TruncationConfig(
            n_vars=3,
            d_box_lo=(-2, -2, -2),
            d_box_hi=(2, 2, 2),
            x_lo=(-4, -4, -4),
            x_hi=(4, 4, 4),
            t_degree=2,
            active_times=frozenset(
                {(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)}
            ),
        )
    raise UsageError(f"no default configuration for n_vars={n_vars}")


def flow_guard(config):
    """Componentwise band width excluded from residual comparisons.

    One variable admits sharp order bookkeeping (the dressing tail only
    lowers orders); in several variables the dressing develops positive
    early components bounded by the flow weight cap, which widens the band.
    """
    amax = [max(a[i] for a in config.active_times) for i in range(config.n_vars)]
    if config.n_vars == 1:
        return (amax[0] + 1,)
    cap = config.weight_cap()
    return tuple(c + a + 1 for c, a in zip(cap, amax))
