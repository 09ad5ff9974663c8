"""
Exceptions raised by fuse-dock.

Every error a caller is expected to handle derives from FuseDockError, so the
command line can map them to a "data/validation" exit code in one place.
"""


class FuseDockError(Exception):
    """Root of all recoverable fuse-dock errors"""


# pose algebra
class DegenerateInput(FuseDockError, ValueError):
    """Gram-Schmidt on parallel or zero columns"""


class ZeroRange(FuseDockError, ValueError):
    pass


# orbit
class ChecksumMismatch(FuseDockError, ValueError):
    pass


class BadFieldFormat(FuseDockError, ValueError):
    pass


class LineLength(FuseDockError, ValueError):
    pass


class KeplerNonConvergence(FuseDockError, ArithmeticError):
    pass


class BelowSurface(FuseDockError, ValueError):
    pass


class EpochOutOfRange(FuseDockError, ValueError):
    pass


# trajectories
class ConfigInvalid(FuseDockError, ValueError):
    pass


class NonMonotonicPhases(FuseDockError, ValueError):
    pass


# imaging
class BadFov(FuseDockError, ValueError):
    pass


class FixtureNotVisible(FuseDockError, ValueError):
    pass


class PlaneBehindCamera(FuseDockError, ValueError):
    pass


# datasets
class IoFailure(FuseDockError, IOError):
    pass


class TooShort(FuseDockError, ValueError):
    pass


class Malformed(FuseDockError, ValueError):
    pass


class MissingImage(FuseDockError, IOError):
    pass


class TimestampGap(FuseDockError, ValueError):
    pass


# network
class ShapeMismatch(FuseDockError, ValueError):
    pass


class EmptySplit(FuseDockError, ValueError):
    pass


# calibration
class InsufficientExcitation(FuseDockError, ValueError):
    pass


class TooFewSamples(FuseDockError, ValueError):
    pass
