"""Exception hierarchy shared by all acpsi modules."""

from __future__ import annotations


class AcpsiError(Exception):
    """Base class for all errors raised by this package."""


class IllFormedHistory(AcpsiError):
    """An interleaving history operation would violate the history rules.

    Raised by ``hist_extend`` and by term constructors.  Reaching this from
    a reachable state indicates an internal logic error; it is also raised
    when user-supplied ``si[...]``/``pos[...]`` literals carry a history
    that cannot legally be extended.
    """


class UndeclaredAction(AcpsiError):
    """A term mentions an action name that the system config does not declare."""


class UnguardedRecursion(AcpsiError):
    """A recursive constant was unfolded cyclically without consuming an action."""


class BudgetExceeded(AcpsiError):
    """An exploration or rewrite exceeded its state/depth/work budget."""


class TruncatedInput(AcpsiError):
    """An analysis that needs a complete transition system got a truncated one."""


class ParseError(AcpsiError):
    """Syntax or well-formedness error in term or config source text."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None,
                 path: str | None = None):
        self.message = message
        self.line = line
        self.column = column
        self.path = path
        where = ""
        if line is not None:
            where = f"{path or '<input>'}:{line}"
            if column is not None:
                where += f":{column}"
            where += ": "
        super().__init__(where + message)


class ConfigError(AcpsiError):
    """One or more problems found while loading or validating a configuration."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
