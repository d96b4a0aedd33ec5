"""
Extended reals in (-inf, +inf] with the arithmetic conventions of divergence
integrands: 0 * (+inf) = 0, a * (+inf) = +inf for a > 0, and +inf absorbing
under addition.

+inf is a tagged value rather than an IEEE infinity, so no convention case is
left to float arithmetic (where 0 * inf is NaN).
"""

import math
from dataclasses import dataclass
from functools import total_ordering

INF_TEXT = "+inf"


@total_ordering
@dataclass(frozen=True)
class ExtReal:
    value: float = 0.0
    infinite: bool = False

    def __post_init__(self):
        if self.infinite:
            object.__setattr__(self, "value", math.inf)
            return
        value = float(self.value)
        if not math.isfinite(value):
            raise ValueError(f"finite ExtReal payload must be a finite real, got {self.value!r}")
        object.__setattr__(self, "value", value)

    @classmethod
    def of(cls, x):
        """Lift a real (or +inf) into ExtReal. -inf and NaN are rejected."""
        if isinstance(x, ExtReal):
            return x
        x = float(x)
        if x == math.inf:
            return PLUS_INF
        return cls(x)

    @classmethod
    def parse(cls, text):
        if text.strip() == INF_TEXT:
            return PLUS_INF
        return cls.of(float(text))

    @property
    def is_finite(self):
        return not self.infinite

    def to_text(self):
        return INF_TEXT if self.infinite else repr(self.value)

    def __str__(self):
        return self.to_text()

    def __float__(self):
        return self.value

    def __add__(self, other):
        return ext_add(self, other)

    __radd__ = __add__

    def __eq__(self, other):
        if isinstance(other, (int, float)):
            other = ExtReal.of(other)
        if not isinstance(other, ExtReal):
            return NotImplemented
        if self.infinite or other.infinite:
            return self.infinite and other.infinite
        return self.value == other.value

    def __lt__(self, other):
        other = ExtReal.of(other)
        if self.infinite:
            return False
        if other.infinite:
            return True
        return self.value < other.value

    def __hash__(self):
        return hash((self.infinite, None if self.infinite else self.value))


PLUS_INF = ExtReal(infinite=True)
ZERO = ExtReal(0.0)


def ext_add(a, b):
    """Sum in (-inf, +inf]; any +inf operand gives +inf."""
    a, b = ExtReal.of(a), ExtReal.of(b)
    if a.infinite or b.infinite:
        return PLUS_INF
    return ExtReal(a.value + b.value)


def ext_sum(values):
    total = ZERO
    for v in values:
        total = ext_add(total, v)
    return total


def ext_scale(c, a):
    """c * a for a real c >= 0, with 0 * (+inf) = 0."""
    c = float(c)
    if not math.isfinite(c) or c < 0:
        raise ValueError(f"scale factor must be a nonnegative real, got {c!r}")
    a = ExtReal.of(a)
    if a.infinite:
        return ZERO if c == 0 else PLUS_INF
    return ExtReal(c * a.value)
