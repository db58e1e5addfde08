"""Exception hierarchy.

Every error carries the CLI exit code it maps to, so the command-line layer
never has to pattern-match on exception types.
"""

from __future__ import annotations

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


class LipoptError(Exception):
    exit_code = EXIT_NUMERIC


class InvalidConfig(LipoptError, ValueError):
    exit_code = EXIT_USAGE


class UnknownFunction(LipoptError, KeyError):
    exit_code = EXIT_USAGE

    def __init__(self, name: str, available: list[str]):
        self.name = name
        self.available = list(available)
        super().__init__(f"unknown function {name!r}; available: {', '.join(self.available)}")

    def __str__(self) -> str:
        # KeyError.__str__ would repr() the message
        return self.args[0]


class ExpressionSyntaxError(LipoptError, ValueError):
    exit_code = EXIT_USAGE

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        self.offset = offset
        self.expected = tuple(expected)
        detail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at offset {offset}{detail}")


class UnknownIdentifier(ExpressionSyntaxError):
    pass


class DegeneratePair(LipoptError, ValueError):
    """Global gradient requested on two identical points."""


class StencilOutOfDomain(LipoptError, ValueError):
    def __init__(self, point: float, lo: float, hi: float):
        self.point = point
        super().__init__(f"finite-difference stencil point {point!r} outside [{lo!r}, {hi!r}]")


class NonpositiveK(LipoptError, ValueError):
    exit_code = EXIT_USAGE


class BracketCollapse(LipoptError, ArithmeticError):
    def __init__(self, iteration: int, x1: float, x2: float, alpha: float):
        self.iteration = iteration
        self.x1 = x1
        self.x2 = x2
        self.alpha = alpha
        super().__init__(
            f"bracket collapsed at step {iteration}: x1={x1!r} >= x2={x2!r}; "
            f"alpha={alpha!r} is too large for this function's Lipschitz constant"
        )


class NonFiniteValue(LipoptError, ArithmeticError):
    def __init__(self, x: float, value: float | None = None, reason: str = ""):
        self.x = x
        self.value = value
        msg = f"non-finite objective value at x={x!r}"
        if value is not None:
            msg += f" (got {value!r})"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)
