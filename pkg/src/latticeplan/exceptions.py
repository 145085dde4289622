"""Error types shared across the package."""


class ContractError(RuntimeError):
    """A verification contract was violated (wrong qubits survived, frame
    mismatch, non-unitary channel, ...)."""


class CapacityError(ValueError):
    """A floorplan request does not fit the stated footprint bounds."""


class ConfigError(ValueError):
    """A config file or CLI input could not be parsed."""
