"""Exception types shared across the simulator."""


class SimulatorError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(SimulatorError):
    """An operation received arguments outside its documented domain."""


class ConfigError(SimulatorError):
    """A configuration file or config object failed validation."""


class IngestionError(SimulatorError):
    """An external data file violated the documented schema."""
