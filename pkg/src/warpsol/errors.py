"""Exception types shared across the package."""

from __future__ import annotations


class WarpsolError(Exception):
    """Base class for all package errors."""


class ParseError(WarpsolError, ValueError):
    """Malformed expression text.

    ``offset`` is a byte offset into the UTF-8 encoding of the input.
    """

    def __init__(self, offset: int, expected: str, text: str = ""):
        self.offset = offset
        self.expected = expected
        self.text = text
        super().__init__(f"parse error at byte {offset}: expected {expected}")


class DomainError(WarpsolError, ArithmeticError):
    """Evaluation left the domain of a function at ``point``."""

    def __init__(self, point: float, reason: str):
        self.point = float(point)
        self.reason = reason
        super().__init__(f"{reason} at s={self.point!r}")


class PositivityError(WarpsolError, ValueError):
    """A warping function is not strictly positive on the grid."""

    def __init__(self, message: str, index: int | None = None, point: float | None = None):
        self.index = index
        self.point = point
        super().__init__(message)


class CriticalPointError(WarpsolError, ValueError):
    """The potential has (numerically) vanishing derivative at grid points."""

    def __init__(self, indices, threshold: float):
        self.indices = tuple(int(i) for i in indices)
        self.threshold = threshold
        shown = ", ".join(map(str, self.indices[:10]))
        more = "" if len(self.indices) <= 10 else f", ... ({len(self.indices)} total)"
        super().__init__(f"|f'| < {threshold:g} at grid indices [{shown}{more}]")


class ArityError(WarpsolError, ValueError):
    """Operation needs a different number of fibers."""


class ParamError(WarpsolError, ValueError):
    """Invalid construction or coefficient parameters."""


class StencilError(WarpsolError, ValueError):
    """Grid too small for the requested finite-difference derivative."""
