"""Exact scalars of the form q * pi**(k/2) with q rational.

Every constant appearing in the closed-form integral tables and the
expansion coefficients is a rational multiple of an integer or
half-integer power of pi, so the coefficient identities can be checked
with zero tolerance instead of floating point comparisons.
"""

from __future__ import annotations

import math
from fractions import Fraction


class PiPow:
    """An exact number ``frac * pi**(half_power / 2)``.

    Addition is only defined between values carrying the same power of
    pi; everything else (products, quotients, integer powers) is closed.
    """

    __slots__ = ("frac", "half_power")

    def __init__(self, frac, half_power: int = 0):
        self.frac = Fraction(frac)
        self.half_power = 0 if self.frac == 0 else int(half_power)

    # -- constructors -------------------------------------------------

    @staticmethod
    def pi(power: int = 1) -> "PiPow":
        return PiPow(1, 2 * power)

    @staticmethod
    def coerce(x) -> "PiPow":
        if isinstance(x, PiPow):
            return x
        return PiPow(x)

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other):
        other = PiPow.coerce(other)
        if self.frac == 0:
            return other
        if other.frac == 0:
            return self
        if self.half_power != other.half_power:
            raise ValueError(
                f"cannot add pi^{self.half_power}/2 and pi^{other.half_power}/2 terms exactly"
            )
        return PiPow(self.frac + other.frac, self.half_power)

    __radd__ = __add__

    def __neg__(self):
        return PiPow(-self.frac, self.half_power)

    def __sub__(self, other):
        return self + (-PiPow.coerce(other))

    def __rsub__(self, other):
        return PiPow.coerce(other) + (-self)

    def __mul__(self, other):
        other = PiPow.coerce(other)
        return PiPow(self.frac * other.frac, self.half_power + other.half_power)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = PiPow.coerce(other)
        if other.frac == 0:
            raise ZeroDivisionError("division by exact zero")
        return PiPow(self.frac / other.frac, self.half_power - other.half_power)

    def __rtruediv__(self, other):
        return PiPow.coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("only integer powers are exact")
        if k < 0:
            return PiPow(1) / (self ** (-k))
        out = PiPow(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        other = PiPow.coerce(other)
        return self.frac == other.frac and self.half_power == other.half_power

    def __hash__(self):
        return hash((self.frac, self.half_power))

    def __repr__(self):
        if self.half_power == 0:
            return f"{self.frac}"
        if self.half_power % 2 == 0:
            return f"{self.frac}*pi^{self.half_power // 2}"
        return f"{self.frac}*pi^({self.half_power}/2)"

    def __float__(self):
        return float(self.frac) * math.pi ** (self.half_power / 2.0)


def gamma_exact(x) -> PiPow:
    """Gamma function at positive integer or half-integer arguments.

    Gamma(m) = (m-1)!,  Gamma(m + 1/2) = (2m)! / (4^m m!) * sqrt(pi).
    """
    x = Fraction(x)
    if x <= 0:
        raise ValueError("argument must be positive")
    if x.denominator == 1:
        return PiPow(math.factorial(x.numerator - 1))
    if x.denominator == 2:
        m = (x.numerator - 1) // 2  # x = m + 1/2
        frac = Fraction(math.factorial(2 * m), 4**m * math.factorial(m))
        return PiPow(frac, 1)
    raise ValueError("only integer and half-integer arguments are exact")
