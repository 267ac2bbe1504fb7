"""Exception hierarchy shared across the package."""


class UdspinError(Exception):
    """Base class for package-specific failures."""


class CapacityError(UdspinError):
    """Requested object exceeds a hard size bound (dimension, oracle range)."""


class EmptySectorError(UdspinError):
    """A projection annihilated the state (zero norm within tolerance)."""


class IntegrityError(UdspinError):
    """An internal cross-check failed: results cannot be trusted."""


class ConfigError(UdspinError):
    """Invalid run configuration (CLI flags or config file)."""
