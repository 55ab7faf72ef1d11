"""Exception types raised across the package."""


class ShapeError(ValueError):
    """Array dimensions incompatible with a qubit register or with each other."""


class NotHermitianError(ValueError):
    """Operator claimed Hermitian deviates beyond tolerance."""


class InvalidPovmError(ValueError):
    """POVM elements are not positive or do not sum to the declared space."""


class InvalidStateError(ValueError):
    """State vector has the wrong size or is not normalized."""
