"""Exception types shared across the library."""


class AsloLabError(Exception):
    """Base class for all library errors."""


class NonFiniteSignal(AsloLabError):
    """A signal became NaN or infinite.

    Carries the offending signal name and simulation time when raised by
    the simulation runner.
    """

    def __init__(self, message: str, signal: str | None = None, t: float | None = None):
        super().__init__(message)
        self.signal = signal
        self.t = t


class SingularConfiguration(AsloLabError):
    """A plant reached a configuration where its dynamics are undefined
    (e.g. vanishing inertia, non-invertible inductance matrix)."""


class DegenerateFactor(AsloLabError):
    """The integrating-factor denominator of a mechanical velocity
    observer dropped below its singularity threshold."""


class ConfigError(AsloLabError):
    """A scenario configuration file is malformed or incomplete."""
