"""Exception taxonomy shared by all modules."""


class KPNError(Exception):
    """Base class for all engine errors."""


class UsageError(KPNError):
    """Caller violated a precondition (bad lengths, missing time index, ...)."""


class NotInvertible(KPNError):
    """Series or operator has no invertible leading structure."""


class NoValuation(KPNError):
    """Valuation of the zero series is undefined."""


class NotDressable(KPNError):
    """Lax tuple is inconsistent with any dressing at this truncation."""


class FlowInconsistency(KPNError):
    """Cross-flow recovery of a coefficient disagreed; indicates a bug."""


class NotTransversal(KPNError):
    """Point is outside the graph chart; no wave function exists there."""


class WindowTooSmall(KPNError):
    """The truncation window cannot support the requested computation."""
