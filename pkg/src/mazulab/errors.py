"""Exception types shared across the toolkit."""


class MazulabError(Exception):
    """Base class for all toolkit errors."""


class MalformedSpec(MazulabError):
    pass


class ResolutionTooCoarse(MazulabError):
    pass


class WindowEmpty(MazulabError):
    pass


class Disconnected(MazulabError):
    pass


class BudgetExceeded(MazulabError):
    """Search budget hit; carries the best incumbent upper bound found so far."""

    def __init__(self, incumbent=None, witness=None):
        super().__init__(f"budget exceeded (incumbent={incumbent})")
        self.incumbent = incumbent
        self.witness = witness


class QueryInObstacle(MazulabError):
    pass


class NotBoundary(MazulabError):
    pass


class UnknownExample(MazulabError):
    pass


class PreconditionUnmet(MazulabError):
    pass


class PayloadTooLarge(MazulabError):
    pass
