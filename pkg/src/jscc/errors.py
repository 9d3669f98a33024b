"""Exception hierarchy shared by every module of the package."""


class JSCCError(Exception):
    """Base class for all package errors."""


class UsageError(JSCCError, ValueError):
    """An operation was called with arguments that violate its contract."""


class DomainError(JSCCError, ValueError):
    """A quantity was requested where it is mathematically undefined."""


class BudgetExceededError(JSCCError, RuntimeError):
    """An exact enumeration would exceed the configured state budget."""

    def __init__(self, what: str, states: int, budget: int):
        self.what = what
        self.states = states
        self.budget = budget
        super().__init__(
            f"{what}: exact enumeration needs {states} states, budget is {budget}"
        )


class ConfigError(JSCCError, ValueError):
    """A configuration failed validation; ``problems`` lists every violation."""

    def __init__(self, problems, source=None):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        self.source = source
        where = f"{source}: " if source else ""
        super().__init__(where + "; ".join(self.problems))


DEFAULT_BUDGET = 2**24


def check_budget(what: str, states: int, budget: int | None) -> None:
    """Raise :class:`BudgetExceededError` when ``states`` exceeds ``budget``."""
    if budget is None:
        budget = DEFAULT_BUDGET
    if states > budget:
        raise BudgetExceededError(what, states, budget)
