"""Exception hierarchy."""


class WatchdogError(Exception):
    """Base class for all errors raised by liftwatchdog."""


class InvalidDistribution(WatchdogError, ValueError):
    pass


class NegativeEntry(InvalidDistribution):
    pass


class MassNotNormalizable(InvalidDistribution):
    pass


class DeadSymbol(InvalidDistribution):
    """A symbol (column) or secret (row) carries zero probability mass."""


class DegenerateSampler(WatchdogError, RuntimeError):
    pass


class EmptySubset(WatchdogError, ValueError):
    pass


class PartitionMismatch(WatchdogError, ValueError):
    """Partition blocks do not exactly cover the high-risk set."""


class CoverMismatch(WatchdogError, ValueError):
    pass


class ZeroEntropy(WatchdogError, ValueError):
    pass


class TooLarge(WatchdogError, ValueError):
    pass


class IoFailure(WatchdogError):
    pass
