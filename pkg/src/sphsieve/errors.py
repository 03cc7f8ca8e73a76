"""Exception types shared across the library."""


class ConvergenceError(RuntimeError):
    """An iterative solver exhausted its iteration budget."""


class ResolutionError(ValueError):
    """A grid or quadrature rule is too coarse for the requested band limit."""


class OverlapError(ValueError):
    """Caps overlap where a deterministic method requires disjoint caps."""


class SeparationError(ValueError):
    """A point set violates its claimed minimum separation."""


class BoundViolationError(RuntimeError):
    """A proven inequality failed beyond tolerance; signals an implementation bug."""
