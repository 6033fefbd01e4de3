"""Exception types raised across the package."""


class HilbertShimuraError(Exception):
    """Base class for computation errors."""


class NormTooLarge(HilbertShimuraError):
    pass


class DyadicPrime(HilbertShimuraError):
    pass


class NoGenerator(HilbertShimuraError):
    pass


class NotPositiveDefinite(HilbertShimuraError):
    pass


class NotFullRank(HilbertShimuraError):
    pass


class NotAnOrder(HilbertShimuraError):
    pass


class IncompatibleOrders(HilbertShimuraError):
    pass


class LevelPrime(HilbertShimuraError):
    """A Hecke operator was requested at a prime dividing the level."""


class DimensionMismatch(HilbertShimuraError):
    pass


class NonIntegralEigenvalue(HilbertShimuraError):
    pass


class IndexSetTooSmall(HilbertShimuraError):
    pass


class BadReduction(HilbertShimuraError):
    pass


class MissingBadPrime(HilbertShimuraError):
    pass


class DegenerateRatio(HilbertShimuraError):
    pass


class ConfigError(Exception):
    """Invalid run configuration (CLI exit code 2)."""
