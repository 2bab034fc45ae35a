"""Numbers stored as (log-magnitude, sign/phase).

The scaling constants of high derivatives contain factors like exp(a*exp(w)),
and Fourier transforms of Gamma products decay like exp(-exp(T)); neither fits
in a double.  These two small value types carry such quantities around.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi
NEG_INF = float("-inf")


def wrap_phase(phase: float) -> float:
    """Reduce an angle to the half-open interval (-pi, pi]."""
    p = math.remainder(phase, TWO_PI)
    if p <= -math.pi:
        p += TWO_PI
    return p


def _expm1_complex(d: complex) -> complex:
    # exp(d) - 1 without cancellation when |d| is small
    x, y = d.real, d.imag
    em1 = math.expm1(x)
    cos_m1 = -2.0 * math.sin(0.5 * y) ** 2
    return complex(em1 * math.cos(y) + cos_m1, math.exp(x) * math.sin(y))


@dataclass(frozen=True)
class SignedLogReal:
    """A real number ``sign * exp(log_abs)``; zero is ``sign=0, log_abs=-inf``."""

    log_abs: float
    sign: int

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign}")
        if self.sign == 0 and self.log_abs != NEG_INF:
            raise ValueError("zero must carry log_abs = -inf")

    @classmethod
    def from_float(cls, x: float) -> "SignedLogReal":
        if x == 0.0:
            return cls(NEG_INF, 0)
        return cls(math.log(abs(x)), 1 if x > 0 else -1)

    @classmethod
    def zero(cls) -> "SignedLogReal":
        return cls(NEG_INF, 0)

    def to_float(self) -> float:
        """Plain float; overflows to +-inf and underflows to 0 silently."""
        if self.sign == 0:
            return 0.0
        try:
            return self.sign * math.exp(self.log_abs)
        except OverflowError:
            return self.sign * math.inf

    @property
    def log10_abs(self) -> float:
        return self.log_abs / math.log(10.0)

    def __mul__(self, other: "SignedLogReal") -> "SignedLogReal":
        if self.sign == 0 or other.sign == 0:
            return SignedLogReal.zero()
        return SignedLogReal(self.log_abs + other.log_abs, self.sign * other.sign)

    def __truediv__(self, other: "SignedLogReal") -> "SignedLogReal":
        if other.sign == 0:
            raise ZeroDivisionError("division by zero SignedLogReal")
        if self.sign == 0:
            return SignedLogReal.zero()
        return SignedLogReal(self.log_abs - other.log_abs, self.sign * other.sign)

    def __neg__(self) -> "SignedLogReal":
        return SignedLogReal(self.log_abs, -self.sign)


@dataclass(frozen=True)
class LogComplex:
    """A complex number ``exp(log_abs) * exp(i*phase)`` with phase in (-pi, pi]."""

    log_abs: float
    phase: float = 0.0

    def __post_init__(self):
        if self.log_abs == NEG_INF:
            object.__setattr__(self, "phase", 0.0)
        elif not (-math.pi < self.phase <= math.pi):
            object.__setattr__(self, "phase", wrap_phase(self.phase))

    @classmethod
    def from_log(cls, w: complex) -> "LogComplex":
        """Build from a complex logarithm; the imaginary part may be any angle."""
        w = complex(w)
        return cls(w.real, wrap_phase(w.imag))

    @classmethod
    def from_complex(cls, z: complex) -> "LogComplex":
        z = complex(z)
        if z == 0:
            return cls(NEG_INF, 0.0)
        return cls(math.log(math.hypot(z.real, z.imag)), wrap_phase(math.atan2(z.imag, z.real)))

    @property
    def log(self) -> complex:
        return complex(self.log_abs, self.phase)

    @property
    def is_zero(self) -> bool:
        return self.log_abs == NEG_INF

    def to_complex(self) -> complex:
        if self.is_zero:
            return 0j
        try:
            r = math.exp(self.log_abs)
        except OverflowError:
            r = math.inf
        return complex(r * math.cos(self.phase), r * math.sin(self.phase))

    def __mul__(self, other):
        if not isinstance(other, LogComplex):
            other = LogComplex.from_complex(other)
        if self.is_zero or other.is_zero:
            return LogComplex(NEG_INF)
        return LogComplex(self.log_abs + other.log_abs, wrap_phase(self.phase + other.phase))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, LogComplex):
            other = LogComplex.from_complex(other)
        if other.is_zero:
            raise ZeroDivisionError("division by zero LogComplex")
        if self.is_zero:
            return self
        return LogComplex(self.log_abs - other.log_abs, wrap_phase(self.phase - other.phase))

    def conjugate(self) -> "LogComplex":
        return LogComplex(self.log_abs, wrap_phase(-self.phase))

    def ratio_minus_one(self, other: "LogComplex") -> complex:
        """``self/other - 1`` evaluated accurately in the log domain."""
        d = complex(self.log_abs - other.log_abs, wrap_phase(self.phase - other.phase))
        return _expm1_complex(d)

    def rel_error(self, reference: "LogComplex") -> float:
        """``|self/reference - 1|``."""
        return abs(self.ratio_minus_one(reference))


def logsumexp_complex(logs) -> complex:
    """log(sum(exp(l) for l in logs)) for complex logs; -inf for an empty/all-zero sum."""
    logs = [complex(l) for l in logs if complex(l).real != NEG_INF]
    if not logs:
        return complex(NEG_INF, 0.0)
    ref = max(l.real for l in logs)
    s = sum(cmath.exp(l - ref) for l in logs)
    if s == 0:
        return complex(NEG_INF, 0.0)
    return ref + cmath.log(s)
