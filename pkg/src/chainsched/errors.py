"""Exception hierarchy.

Every error raised on bad input derives from :class:`SchedError` (itself a
``ValueError``) so callers can catch one type. ``ids`` carries the offending
job ids when there are any; the CLI uses them to point at file lines.
"""

from __future__ import annotations


class SchedError(ValueError):
    def __init__(self, message: str, ids: tuple[str, ...] = ()) -> None:
        super().__init__(message)
        self.ids = tuple(ids)


# instance / schedule validation
class DuplicateId(SchedError):
    pass


class UnknownIdReference(SchedError):
    pass


class CyclicPrecedence(SchedError):
    pass


class BadChainPartition(SchedError):
    pass


class NegativeTime(SchedError):
    pass


class ZeroProcessing(SchedError):
    pass


class HorizonOverflow(SchedError):
    pass


class JobSetMismatch(SchedError):
    pass


# solvers
class NotAChainPartition(SchedError):
    pass


class CrossChainEdge(SchedError):
    pass


class InfeasibleNoSchedule(SchedError):
    pass


class PreconditionViolated(SchedError):
    pass


class NotChainUniform(SchedError):
    pass


class InstanceTooLarge(SchedError):
    pass


class TooManyTies(SchedError):
    pass


# reductions
class NonBinaryAlphabet(SchedError):
    pass


class TooLarge(SchedError):
    pass


class BadAlphabetValues(SchedError):
    pass


class EquivalenceViolated(AssertionError):
    """A reduction biconditional failed. Never expected; signals a bug."""
