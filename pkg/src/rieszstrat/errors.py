"""Exception types shared across the toolkit."""


class RieszStratError(Exception):
    """Base class for all toolkit errors."""


class DomainError(RieszStratError, ValueError):
    """A query point or ball left the domain of a field."""


class UnsupportedCharacteristicError(RieszStratError, ValueError):
    """Riesz characteristic outside the supported range for an operation."""


class ProfileRangeError(RieszStratError, ValueError):
    """A radius fell outside the sampled range of a radial profile."""


class InsufficientDataError(RieszStratError, ValueError):
    """Too few samples for the requested statistic."""


class ScaleError(RieszStratError, ValueError):
    """A rescaling radius is incompatible with the available domain."""


class ResolutionError(RieszStratError, ValueError):
    """Grid resolution too coarse for the requested tube radius."""


class InsufficientSamplingError(RieszStratError, ValueError):
    """A Grassmannian family carries too few sampled planes."""


class MemoryGuardError(RieszStratError, RuntimeError):
    """A grid request exceeded the configured cell budget."""


class ConfigError(RieszStratError, ValueError):
    """Malformed CLI configuration."""
