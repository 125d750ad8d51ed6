"""Exception types shared across the package."""


class LeapError(ValueError):
    """Base class for every validation or domain error raised here."""


class ParityMismatch(LeapError):
    """Photon total and population difference have different parity."""


class RangeError(LeapError):
    """A parameter lies outside its admissible range."""


class LatticeError(LeapError):
    """A position is off the step-2 population-difference lattice."""


class ModeError(LeapError):
    """Exact-rational evaluation requested without exact-rational inputs."""


class DomainError(LeapError):
    """Invalid spin or rotation-matrix indices."""


class DegenerateError(LeapError):
    """A visibility denominator vanished; the ratio is undefined."""


class NoSolution(LeapError):
    """A solver target is outside the achievable range."""
