"""Exception hierarchy for the rdcodec package.

Three rough families, which the CLI maps to distinct exit codes:
validation errors (bad inputs / parameters), runtime errors (a
computation or stream that cannot proceed), and container/IO errors.
"""


class RdcodecError(Exception):
    """Base class for all package-specific errors."""


# --- validation -------------------------------------------------------------

class ValidationError(RdcodecError):
    """Invalid input data or parameters."""


class InvalidPmf(ValidationError):
    pass


class InvalidDistortion(ValidationError):
    pass


class DistortionOutOfRange(ValidationError):
    """Target distortion not in the open interval (0, Dmax)."""


class RateOutOfRange(ValidationError):
    """Requested rate outside the achievable range."""


class GammaOutOfRange(ValidationError):
    pass


class EpsilonOutOfRange(ValidationError):
    pass


class ParamInvariantViolation(ValidationError):
    """A derived codec parameter violates its invariants."""


class EmptyCandidates(ValidationError):
    """A search was requested over an empty candidate set."""


class ParamMismatch(ValidationError):
    """Two parameter objects that must agree do not."""


# --- runtime ----------------------------------------------------------------

class RuntimeFault(RdcodecError):
    """A computation or decode that cannot proceed."""


class NoConvergence(RuntimeFault):
    """Iterative solver failed to reach the requested tolerance."""


class MemoryCap(RuntimeFault):
    """A database/codebook would exceed the configured symbol cap."""


class DegenerateConstants(RuntimeFault):
    pass


class StreamExhausted(RuntimeFault):
    """Bit reader ran past the end of the stream."""


class StreamLengthMismatch(RuntimeFault):
    """Stream length inconsistent with the codec parameters."""


class IndexOutOfRange(RuntimeFault):
    """Decoded codeword/window index exceeds the candidate count."""


class PointerOutOfRange(RuntimeFault):
    """Decoded database pointer runs past the database end."""


class SeedMismatch(RuntimeFault):
    """Regenerated database does not match the container checksum."""


# --- container / IO ---------------------------------------------------------

class ContainerFormatError(RdcodecError):
    """Malformed or truncated container file."""
