"""Exception types raised across the package."""


class SchurKitError(Exception):
    """Base class for all schurkit errors."""


class ShapeMismatch(SchurKitError, ValueError):
    """Operands or stored images do not have compatible shapes."""


class IndexOutOfRange(SchurKitError, ValueError):
    """A 1-based entry index falls outside the ambient grid."""


class NonFiniteEntry(SchurKitError, ValueError):
    """A matrix contains NaN or infinite entries."""


class NotHermitian(SchurKitError, ValueError):
    """Input is not Hermitian within the accepted tolerance."""


class NotBijective(SchurKitError, ValueError):
    """A permutation (of basis vectors or grid entries) is not a bijection."""


class NotNullPreserving(SchurKitError, ValueError):
    """The map does not preserve disjointness of entry supports."""


class ImageNotMonomial(SchurKitError, ValueError):
    """Some basis image has two or more nonzero entries."""


class NotMultiplicative(SchurKitError, ValueError):
    """The map is not multiplicative for the entrywise product."""


class DimensionTooSmall(SchurKitError, ValueError):
    """The ambient dimension cannot accommodate the requested embedding."""


class MalformedInput(SchurKitError, ValueError):
    """A JSON document does not follow the documented schema."""
