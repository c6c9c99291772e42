"""Exception types shared across the package."""


class ScottLabError(Exception):
    """Base class for all scottlab errors."""


class DuplicateLabelError(ScottLabError):
    pass


class UnknownLabelError(ScottLabError):
    pass


class CycleError(ScottLabError):
    """Antisymmetry violation; carries a witness cycle of labels."""

    def __init__(self, cycle):
        self.cycle = tuple(cycle)
        super().__init__(f"order relation has a cycle: {' <= '.join(self.cycle)} <= {self.cycle[0]}")


class NotDirectedError(ScottLabError):
    pass


class EmptySetError(ScottLabError):
    pass


class BadPartitionError(ScottLabError):
    pass


class SizeTooLargeError(ScottLabError):
    pass


class NotT0Error(ScottLabError):
    """T0 separation failure; carries a witness pair of point labels."""

    def __init__(self, a, b):
        self.pair = (a, b)
        super().__init__(f"points {a!r} and {b!r} have identical open neighbourhoods")


class NotSaturatedError(ScottLabError):
    pass


class EmptyFamilyError(ScottLabError):
    pass


class HypothesisFailedError(ScottLabError):
    """A lemma-search precondition does not hold; names the broken one."""


class ForeignCodeError(ScottLabError):
    pass


class NoRuleError(ScottLabError):
    pass


class UnverifiedCertError(ScottLabError):
    pass


class PreconditionFailedError(ScottLabError):
    pass


class MalformedWitnessError(ScottLabError):
    pass


class NotScottOpenError(ScottLabError):
    pass


class ParseError(ScottLabError):
    pass


class TopologyTooLargeError(ScottLabError):
    pass


class NoUpperBoundError(ScottLabError):
    pass


class SelfCheckError(ScottLabError):
    """An internal double-computation disagreed; always a bug."""


def ensure(cond, msg):
    if not cond:
        raise SelfCheckError(msg)
