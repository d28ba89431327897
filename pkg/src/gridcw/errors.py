"""Exception hierarchy shared across the package.

Each class maps to a distinct CLI exit code so that scripted runs can
tell input problems, exhausted search budgets and internal invariant
violations apart.
"""


class GridcwError(Exception):
    exit_code = 1


class InputError(GridcwError):
    """Malformed input: bad spec text, bad expression text, bad flags."""

    exit_code = 3


class SpecParseError(InputError):
    """Parse failure with a position annotation."""

    def __init__(self, message, line=None, pos=None):
        loc = ""
        if line is not None:
            loc = f" (line {line})"
        elif pos is not None:
            loc = f" (pos {pos})"
        super().__init__(message + loc)
        self.line = line
        self.pos = pos


class BudgetError(GridcwError):
    """A configured search budget or horizon was exhausted."""

    exit_code = 4


class HorizonError(BudgetError):
    """Not enough factor occurrences within the requested horizon."""


class InvariantError(GridcwError):
    """An internal invariant failed; indicates a bug, not bad input."""

    exit_code = 5
