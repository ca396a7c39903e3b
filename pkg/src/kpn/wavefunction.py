"""Wave-function container shared by the hierarchy and Grassmannian layers."""

from dataclasses import dataclass, field

from .errors import UsageError
from .indexing import is_revlex_positive
from .xseries import XSeries


@dataclass(frozen=True)
class WaveFunction:
    """A formal oscillating function w = sym * exp(xi).

    ``sym`` is 1 plus terms with revlex-positive x-exponents; ``w`` is the
    assembled product.  ``guards`` maps each time monomial to the weight
    shift consumed while solving it: the stored coefficient of that monomial
    is exact on the window shrunk from above by the guard.
    """

    sym: XSeries
    w: XSeries
    time_indices: tuple
    guards: dict = field(default_factory=dict)

    def __post_init__(self):
        cfg = self.sym.config
        zero = cfg.zero
        lead = self.sym.terms.get(zero)
        if lead is None or lead.at_zero() != 1:
            raise UsageError("wave symbol must have constant term 1")
        for e in self.sym.terms:
            if e != zero and not is_revlex_positive(e):
                raise UsageError(f"wave symbol support must be revlex-positive, got {e}")

    @property
    def config(self):
        return self.sym.config
