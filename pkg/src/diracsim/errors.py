"""Exception hierarchy for the simulator."""


class DiracSimError(Exception):
    """Base class for all simulator errors."""


class TruncationError(DiracSimError):
    """Fock-space truncation is inadequate for the requested operation."""


class ConfigError(DiracSimError):
    """Physical parameters violate a required resonance or mode constraint."""


class DegenerateMassError(DiracSimError):
    """Operation requires a strictly positive simulated mass."""


class NonHermitianError(DiracSimError):
    """A Hermitian operator was expected."""


class DimensionError(DiracSimError):
    """Operator/state dimensions do not match."""


class GridTooSmallError(DiracSimError):
    """Phase-space grid does not cover the support of the state."""


class SingularHError(DiracSimError):
    """Hamiltonian is singular (massless spectrum touches zero)."""


class NoPeakError(DiracSimError):
    """No oscillation peak found in the spectrum of a trajectory."""


class ParseError(DiracSimError):
    """Config text could not be parsed."""


class ValidationError(DiracSimError):
    """Config parsed but violates an invariant."""
