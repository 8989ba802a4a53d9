"""Exception types raised across the package."""


class DriveSenseError(Exception):
    """Base class for all package errors."""


class InvalidRegionError(DriveSenseError, ValueError):
    """Bounding box or cell size cannot produce a grid."""


class WeightEntryError(DriveSenseError, ValueError):
    """A weight entry is negative, malformed or outside the grid."""

    def __init__(self, index, message):
        self.index = index
        super().__init__(f"weight entry {index}: {message}")


class TrajectoryFormatError(DriveSenseError, ValueError):
    """Trajectory source is unreadable or has a bad header."""


class UnknownAgentError(DriveSenseError, LookupError):
    def __init__(self, agent_id):
        self.agent_id = agent_id
        super().__init__(f"unknown agent id: {agent_id!r}")

    def __str__(self):
        return self.args[0]


class BudgetExceededError(DriveSenseError, RuntimeError):
    """Exhaustive enumeration would exceed the evaluation budget."""

    def __init__(self, combinations, budget):
        self.combinations = combinations
        self.budget = budget
        super().__init__(
            f"refusing to enumerate {combinations} combinations "
            f"(evaluation budget is {budget})"
        )
