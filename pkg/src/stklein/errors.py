"""Exception types raised by the scattering library."""


class DomainError(ValueError):
    """Input lies outside the domain where a formula is real or defined."""


class InvalidGapCondition(ValueError):
    """Vector-to-scalar offset ratio does not admit a Klein gap (r_AV >= 1)."""


class DegenerateChannels(ArithmeticError):
    """Transmitted and reflected spinors coincide, so amplitudes are undefined."""


class NoScattering(ValueError):
    """The incident electron never reaches the modulation front."""


class NoRoot(ValueError):
    """A bracketed root search found no sign change."""


class EvanescentStatic(ValueError):
    """Static step inside the Klein gap: no propagating transmitted channel."""


class ConsistencyError(RuntimeError):
    """An internal physics cross-check failed."""
