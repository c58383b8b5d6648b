class ConfigError(ValueError):
    """Raised when a configuration value violates a model constraint."""


class SimulationError(RuntimeError):
    """Raised on an internal inconsistency in the simulator (a bug, not bad input)."""
