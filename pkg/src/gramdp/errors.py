"""Exception hierarchy shared by every gramdp module."""


class GramDPError(Exception):
    """Base class for all gramdp errors."""


class EmptyColumn(GramDPError, ValueError):
    def __init__(self, name: str = ""):
        self.name = name
        super().__init__(f"column {name!r} is empty" if name else "column is empty")


class UnresolvedBounds(GramDPError, ValueError):
    def __init__(self, kind: str):
        self.kind = kind
        super().__init__(f"{kind} query needs bounds; supply them or infer them first")


class NeedAtLeastTwoRows(GramDPError, ValueError):
    def __init__(self, n: int):
        self.n = n
        super().__init__(f"variance needs at least 2 rows, got {n}")


class UnknownQueryKind(GramDPError, ValueError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown query kind {name!r}")


class InfeasibleEnumeration(GramDPError, ValueError):
    pass


class MalformedCsv(GramDPError, ValueError):
    def __init__(self, line: int, reason: str):
        self.line = line
        super().__init__(f"malformed CSV at line {line}: {reason}")


class RaggedRow(GramDPError, ValueError):
    def __init__(self, line: int, expected: int, got: int):
        self.line = line
        super().__init__(f"line {line} has {got} cells, header has {expected}")


class NoSuchColumn(GramDPError, KeyError):
    def __init__(self, name: str, available):
        self.name = name
        super().__init__(f"no column {name!r}; available: {', '.join(available)}")

    def __str__(self):
        return self.args[0]


class NonNumericCell(GramDPError, ValueError):
    def __init__(self, row: int, content: str):
        self.row = row
        self.content = content
        super().__init__(f"row {row}: {content!r} is not a finite decimal number")


class EmptyCell(GramDPError, ValueError):
    def __init__(self, row: int):
        self.row = row
        super().__init__(f"row {row}: empty cell (pre-process the data; gramdp does not impute)")


class BudgetExhausted(GramDPError):
    def __init__(self, requested: float, remaining: float):
        self.requested = requested
        self.remaining = remaining
        super().__init__(
            f"requested epsilon {requested:g} exceeds remaining budget {remaining:g}"
        )


class CorruptLedger(GramDPError):
    pass


class TrueValueZero(GramDPError, ZeroDivisionError):
    def __init__(self):
        super().__init__("scaled error metrics are undefined when the true value is 0")


class EmptyResults(GramDPError, ValueError):
    def __init__(self):
        super().__init__("no results to score")


class PrivacyWarning(UserWarning):
    """Emitted when a release relies on something that leaks information, e.g. data-derived bounds."""
