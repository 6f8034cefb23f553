"""Exception hierarchy shared by every module in the package."""


class OrbitModuliError(ValueError):
    """Base class for input and precondition failures."""


class DimensionError(OrbitModuliError):
    pass


class SymmetryError(OrbitModuliError):
    pass


class NotPSDError(OrbitModuliError):
    pass


class ParameterError(OrbitModuliError):
    pass


class PreconditionError(OrbitModuliError):
    """A mathematical hypothesis (contraction, isometry, projection) is violated."""
