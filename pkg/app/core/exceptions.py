"""
Errors raised by the navigation system.
"""


class NavigationError(Exception):
    """Base class for every domain error in this project."""


class ContractViolation(NavigationError, ValueError):
    """Inputs break an operation's preconditions."""


class GenerationFailure(NavigationError):
    """Scene generation gave up after its retry budget."""


class SamplingFailure(NavigationError):
    """No valid goal-image viewpoint was found."""


class UnknownInstance(NavigationError, KeyError):
    """An instance id that does not exist in the scene."""


class InsufficientInstances(NavigationError):
    """Not enough object instances to build a pair dataset."""


class CalibrationError(NavigationError):
    """Threshold calibration on a single-class dataset."""


class MaskFailure(NavigationError):
    """The goal image center pixel does not belong to any object."""


class EmptyGoal(NavigationError):
    """Localization produced no goal cells."""


class ExplorationExhausted(NavigationError):
    """No reachable frontier is left on the map."""


class PlanningFailure(NavigationError):
    """The agent cell is unreachable from the current targets."""


class UnreachableSources(NavigationError):
    """Every source cell of a distance field is blocked."""
