"""Exception hierarchy shared by the library and the command line."""


class SqueezelabError(Exception):
    """Base class for library errors."""


class ConfigError(SqueezelabError, ValueError):
    """Invalid or incomplete scenario configuration."""


class PhysicalityError(SqueezelabError):
    """A w-trajectory or state violates the physicality conditions."""


class NumericalError(SqueezelabError):
    """An integrator or quadrature failed to reach the requested accuracy."""


class MixedStateError(SqueezelabError, ValueError):
    """An operation defined only for pure states received a mixed one."""
