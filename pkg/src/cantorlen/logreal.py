"""Extended-range real scalars stored as layered exponentials.

A ``LogScalar`` holds one real number in one of three layers:

* layer 0: the number itself fits comfortably in a float; ``mantissa``
  is its absolute value (or 0.0 for zero),
* layer 1: the number is ``exp(mantissa)`` with a signed mantissa, so
  values like ``exp(-921.034)`` keep their tiny/huge distinction,
* layer 2: the number is ``exp(s * exp(|mantissa|))`` where ``s`` is the
  sign of the mantissa.  ``exp(-exp(3236.356))`` stores mantissa
  -3236.356.

The extra ``sign`` field is the sign of the represented value itself, so
negative numbers work at every layer.  Normalization keeps the bands
disjoint:

* layer 0 whenever ``|ln|x|| <= 690`` (mantissa then sits inside
  ``[1e-300, 1e300]``),
* layer 1 while ``|ln|x|| <= 1e300``,
* layer 2 while ``|ln ln |x|| <= 1e300``; beyond that every operation
  raises ``SaturationError`` rather than degrade silently.

Mantissas are 64-bit floats; accumulations elsewhere in the package use
compensated summation so the documented tolerances hold.  Arithmetic on
two layer-2 operands works in the log-log domain directly, which keeps
multiplication and division exact at mantissa resolution even where a
naive route would overflow.  When a layer-2 value's inner exponential no
longer fits in a float (mantissa above ~709.8), additive perturbations
fall below one unit in the last place of the mantissa; absorbing them is
then the correctly rounded result.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional, Union

from .errors import (
    DomainError,
    SaturationError,
    UnsupportedOperationError,
)

__all__ = ["LogScalar", "TowerFloat", "APPROX_DIGITS"]

# |ln x| at or below this stays in layer 0.
_LAYER0_LN_MAX = 690.0
# Mantissa magnitude cap for layers 1 and 2.
_MANTISSA_CAP = 1e300
# ln of the largest finite float; an inner exponential above this cannot
# be materialized as a float.
_LN_FLOAT_MAX = 709.782712893384
# ln(_MANTISSA_CAP): layer-2 values with |mantissa| at or below this
# demote to layer 1 on normalization.
_LN_CAP = math.log(_MANTISSA_CAP)

APPROX_DIGITS = 12

Numeric = Union[int, float, Fraction, str, "LogScalar"]


def _fraction_ln(v: Fraction) -> float:
    """ln|v| for a nonzero Fraction, robust to values far outside float range."""
    return math.log(abs(v.numerator)) - math.log(v.denominator)


class LogScalar:
    """One extended-range real number.  Immutable."""

    __slots__ = ("sign", "layer", "mantissa")

    def __init__(self, sign: int, layer: int, mantissa: float):
        # Trusting constructor; use the from_* classmethods for
        # normalized construction from outside the module.
        object.__setattr__(self, "sign", sign)
        object.__setattr__(self, "layer", layer)
        object.__setattr__(self, "mantissa", mantissa)

    def __setattr__(self, name, value):
        raise AttributeError("LogScalar is immutable")

    # ------------------------------------------------------------------
    # construction
    # ------------------------------------------------------------------

    @classmethod
    def zero(cls) -> "LogScalar":
        return cls(0, 0, 0.0)

    @classmethod
    def one(cls) -> "LogScalar":
        return cls(1, 0, 1.0)

    @classmethod
    def _wrap_ln(cls, sign: int, ln_mag: float) -> "LogScalar":
        """Build from ln|x| (a finite float) and the sign of x."""
        if math.isnan(ln_mag) or math.isinf(ln_mag):
            raise DomainError(f"log magnitude must be finite, got {ln_mag!r}")
        a = abs(ln_mag)
        if a <= _LAYER0_LN_MAX:
            return cls(sign, 0, math.exp(ln_mag))
        if a <= _MANTISSA_CAP:
            return cls(sign, 1, ln_mag)
        return cls(sign, 2, math.copysign(math.log(a), ln_mag))

    @classmethod
    def _wrap_lnln(cls, sign: int, ln_sign: int, lnln_mag: float) -> "LogScalar":
        """Build from ln|ln|x|| plus the sign of ln|x| and the sign of x."""
        if lnln_mag > _MANTISSA_CAP:
            raise SaturationError(
                "value beyond exp(+-exp(1e300)) is not representable"
            )
        if lnln_mag <= _LN_CAP:
            return cls._wrap_ln(sign, ln_sign * math.exp(lnln_mag))
        return cls(sign, 2, math.copysign(lnln_mag, ln_sign))

    @classmethod
    def from_linear(cls, v: Numeric) -> "LogScalar":
        """Wrap an ordinary number.  Accepts int, float, Fraction and
        decimal strings (so magnitudes beyond float range, e.g. "1e-400",
        still come in exactly)."""
        if isinstance(v, LogScalar):
            return v
        if isinstance(v, str):
            v = Fraction(v)
        if isinstance(v, float):
            if math.isnan(v) or math.isinf(v):
                raise DomainError(f"from_linear requires a finite value, got {v!r}")
            if v == 0.0:
                return cls.zero()
            sign = 1 if v > 0 else -1
            a = abs(v)
            ln_mag = math.log(a)
            if abs(ln_mag) <= _LAYER0_LN_MAX:
                return cls(sign, 0, a)
            return cls._wrap_ln(sign, ln_mag)
        if isinstance(v, int):
            v = Fraction(v)
        if isinstance(v, Fraction):
            if v == 0:
                return cls.zero()
            sign = 1 if v > 0 else -1
            try:
                f = float(abs(v))
            except OverflowError:
                f = math.inf
            if f != 0.0 and not math.isinf(f) and abs(math.log(f)) <= _LAYER0_LN_MAX:
                return cls(sign, 0, f)
            return cls._wrap_ln(sign, _fraction_ln(v))
        raise DomainError(f"cannot wrap object of type {type(v).__name__}")

    @classmethod
    def from_ln(cls, ln_value: float, sign: int = 1) -> "LogScalar":
        """Build ``sign * exp(ln_value)`` from a float log."""
        return cls._wrap_ln(sign, ln_value)

    @classmethod
    def from_lnln(cls, ln_sign: int, lnln_mag: float, sign: int = 1) -> "LogScalar":
        """Build ``sign * exp(ln_sign * exp(lnln_mag))``."""
        if lnln_mag < 0:
            # Inner exponential below 1; comes back through the float log.
            return cls._wrap_ln(sign, ln_sign * math.exp(lnln_mag))
        return cls._wrap_lnln(sign, ln_sign, lnln_mag)

    @classmethod
    def from_parts(cls, sign: int, layer: int, mantissa: float) -> "LogScalar":
        """Rebuild from serialized fields, validating and renormalizing."""
        if sign not in (-1, 0, 1):
            raise DomainError("sign must be -1, 0 or 1")
        if layer not in (0, 1, 2):
            raise DomainError("layer must be 0, 1 or 2")
        if sign == 0:
            return cls.zero()
        if layer == 0:
            return cls.from_linear(sign * mantissa)
        if layer == 1:
            return cls._wrap_ln(sign, mantissa)
        ln_sign = 1 if mantissa > 0 else -1
        return cls._wrap_lnln(sign, ln_sign, abs(mantissa))

    # ------------------------------------------------------------------
    # views
    # ------------------------------------------------------------------

    def is_zero(self) -> bool:
        return self.sign == 0

    def ln_float(self) -> Optional[float]:
        """ln|x| as a float, or None when it does not fit.

        Layer 0 and layer 1 always fit; layer 2 fits only while the
        mantissa stays at or below ~709.8.
        """
        if self.sign == 0:
            return None
        if self.layer == 0:
            return math.log(self.mantissa)
        if self.layer == 1:
            return self.mantissa
        if abs(self.mantissa) <= _LN_FLOAT_MAX:
            return math.copysign(math.exp(abs(self.mantissa)), self.mantissa)
        return None

    def to_linear(self) -> float:
        """The value as a float.  Raises DomainError when the magnitude
        falls outside float range."""
        if self.sign == 0:
            return 0.0
        if self.layer == 0:
            return self.sign * self.mantissa
        ln_mag = self.ln_float()
        if ln_mag is None or ln_mag > _LN_FLOAT_MAX:
            raise DomainError("magnitude exceeds float range")
        r = math.exp(ln_mag)
        if r == 0.0 or math.isinf(r):
            raise DomainError("magnitude exceeds float range")
        return self.sign * r

    def approx(self, digits: int = APPROX_DIGITS) -> str:
        """Human-readable rendering; exact-form decimal when the value
        fits in a float, nested-exponential notation otherwise."""
        if self.sign == 0:
            return "0"
        prefix = "-" if self.sign < 0 else ""
        if self.layer == 0:
            return prefix + format(self.mantissa, f".{digits}g")
        ln_mag = self.ln_float()
        if ln_mag is not None and abs(ln_mag) <= _LN_FLOAT_MAX:
            v = math.exp(ln_mag)
            if v != 0.0 and not math.isinf(v):
                return prefix + format(v, f".{digits}g")
        if self.layer == 1:
            return f"{prefix}exp({format(self.mantissa, f'.{digits}g')})"
        inner_sign = "-" if self.mantissa < 0 else ""
        return (
            f"{prefix}exp({inner_sign}exp("
            f"{format(abs(self.mantissa), f'.{digits}g')}))"
        )

    def to_json(self, digits: int = APPROX_DIGITS) -> dict:
        return {
            "sign": self.sign,
            "layer": self.layer,
            "mantissa": self.mantissa,
            "approx": self.approx(digits),
        }

    def __repr__(self) -> str:
        return f"LogScalar({self.approx()})"

    # ------------------------------------------------------------------
    # comparison
    # ------------------------------------------------------------------

    def _magnitude_class(self) -> int:
        """Ordering class for positive values: -2 < -1 < 0 < 1 < 2.

        Layer-0 values sit in class 0; higher layers split by the
        direction of their exponent, and within a class the signed
        mantissa orders values directly.
        """
        if self.layer == 0:
            return 0
        return self.layer if self.mantissa > 0 else -self.layer

    def cmp(self, other: "LogScalar") -> int:
        """Three-way comparison by represented value: -1, 0 or 1."""
        if not isinstance(other, LogScalar):
            other = LogScalar.from_linear(other)
        if self.sign != other.sign:
            return -1 if self.sign < other.sign else 1
        if self.sign == 0:
            return 0
        flip = self.sign  # compare magnitudes, flip for negatives
        ca, cb = self._magnitude_class(), other._magnitude_class()
        if ca != cb:
            return flip * (-1 if ca < cb else 1)
        ma, mb = self.mantissa, other.mantissa
        if ma == mb:
            return 0
        return flip * (-1 if ma < mb else 1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, (LogScalar, int, float, Fraction)):
            return NotImplemented
        return self.cmp(LogScalar.from_linear(other)) == 0

    def __hash__(self):
        return hash((self.sign, self.layer, self.mantissa))

    def __lt__(self, other):
        return self.cmp(LogScalar.from_linear(other)) < 0

    def __le__(self, other):
        return self.cmp(LogScalar.from_linear(other)) <= 0

    def __gt__(self, other):
        return self.cmp(LogScalar.from_linear(other)) > 0

    def __ge__(self, other):
        return self.cmp(LogScalar.from_linear(other)) >= 0

    # ------------------------------------------------------------------
    # arithmetic
    # ------------------------------------------------------------------

    def negated(self) -> "LogScalar":
        return LogScalar(-self.sign, self.layer, self.mantissa)

    def reciprocal(self) -> "LogScalar":
        if self.sign == 0:
            raise DomainError("reciprocal of zero")
        if self.layer == 0:
            return LogScalar.from_linear(self.sign * (1.0 / self.mantissa))
        # Negating the log is exact at every higher layer.
        return LogScalar(self.sign, self.layer, -self.mantissa)

    def _lnln_parts(self) -> tuple[int, float]:
        """(sign of ln|x|, ln|ln|x||) for a value with ln|x| != 0."""
        if self.layer == 2:
            return (1 if self.mantissa > 0 else -1), abs(self.mantissa)
        ln_mag = self.ln_float()
        return (1 if ln_mag > 0 else -1), math.log(abs(ln_mag))

    def mul(self, other: Numeric) -> "LogScalar":
        other = LogScalar.from_linear(other)
        sign = self.sign * other.sign
        if sign == 0:
            return LogScalar.zero()
        if self.layer == 0 and other.layer == 0:
            f = self.mantissa * other.mantissa
            if f != 0.0 and not math.isinf(f):
                return LogScalar.from_linear(sign * f)
        la, lb = self.ln_float(), other.ln_float()
        if la is not None and lb is not None:
            s = la + lb
            if not math.isinf(s):
                return LogScalar._wrap_ln(sign, s)
        # At least one log is beyond float range: combine in the
        # log-log domain.  A unit operand multiplies exactly.
        if la == 0.0:
            return LogScalar(sign, other.layer, other.mantissa)
        if lb == 0.0:
            return LogScalar(sign, self.layer, self.mantissa)
        ta, wa = self._lnln_parts()
        tb, wb = other._lnln_parts()
        if wa < wb:
            ta, wa, tb, wb = tb, wb, ta, wa
        arg = ta * tb * math.exp(wb - wa)
        if arg == -1.0:
            return LogScalar.from_linear(sign * 1.0)
        return LogScalar._wrap_lnln(sign, ta, wa + math.log1p(arg))

    def div(self, other: Numeric) -> "LogScalar":
        other = LogScalar.from_linear(other)
        return self.mul(other.reciprocal())

    def add(self, other: Numeric) -> "LogScalar":
        other = LogScalar.from_linear(other)
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        if self.layer == 0 and other.layer == 0:
            return LogScalar.from_linear(
                self.sign * self.mantissa + other.sign * other.mantissa
            )
        if self.sign != other.sign:
            raise UnsupportedOperationError(
                "mixed-sign addition is only defined while both operands "
                "stay in the float band (layer 0)"
            )
        la, lb = self.ln_float(), other.ln_float()
        if la is not None and lb is not None:
            hi, lo = (la, lb) if la >= lb else (lb, la)
            return LogScalar._wrap_ln(self.sign, hi + math.log1p(math.exp(lo - hi)))
        # One operand's log exceeds float range; the other's relative
        # contribution is below mantissa resolution, so the larger
        # magnitude is the correctly rounded sum.
        bigger = self if self.cmp(other) * self.sign >= 0 else other
        return bigger

    def __mul__(self, other):
        return self.mul(other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self.div(other)

    def __rtruediv__(self, other):
        return LogScalar.from_linear(other).div(self)

    def __add__(self, other):
        return self.add(other)

    __radd__ = __add__

    def __sub__(self, other):
        return self.add(LogScalar.from_linear(other).negated())

    def __rsub__(self, other):
        return LogScalar.from_linear(other).add(self.negated())

    def __neg__(self):
        return self.negated()

    def __abs__(self):
        return LogScalar(abs(self.sign), self.layer, self.mantissa)

    # ------------------------------------------------------------------
    # transcendental moves between layers
    # ------------------------------------------------------------------

    def ln_of(self) -> "LogScalar":
        """Natural log of the value.  Exact re-wrap across layers: the
        mantissa carries over without precision loss."""
        if self.sign <= 0:
            raise DomainError("log of a non-positive value")
        if self.layer == 0:
            return LogScalar.from_linear(math.log(self.mantissa))
        if self.layer == 1:
            return LogScalar.from_linear(self.mantissa)
        ln_sign = 1 if self.mantissa > 0 else -1
        return LogScalar._wrap_ln(ln_sign, abs(self.mantissa))

    def exp_of(self) -> "LogScalar":
        """exp of the value.  Raises SaturationError when the result
        would need a third exponential layer."""
        if self.sign == 0:
            return LogScalar.one()
        if self.layer == 0:
            return LogScalar._wrap_ln(1, self.sign * self.mantissa)
        if self.layer == 1:
            if self.mantissa <= _LN_FLOAT_MAX:
                # exp(mantissa) floats; negative-huge mantissas round the
                # result to exactly 1.
                return LogScalar._wrap_ln(1, self.sign * math.exp(self.mantissa))
            return LogScalar._wrap_lnln(1, self.sign, self.mantissa)
        raise SaturationError("exp of a layer-2 value needs a third layer")

    def one_minus(self) -> "LogScalar":
        """1 - x for 0 <= x < 1.  For x below layer-0 resolution the
        result rounds to exactly 1; pair with ln_one_minus to keep the
        log information."""
        if self.sign < 0:
            raise DomainError("one_minus requires 0 <= x < 1")
        if self.sign == 0:
            return LogScalar.one()
        if self.layer == 0:
            if self.mantissa >= 1.0:
                raise DomainError("one_minus requires x < 1")
            return LogScalar.from_linear(1.0 - self.mantissa)
        if self.mantissa > 0:
            raise DomainError("one_minus requires x < 1")
        return LogScalar.one()

    def ln_one_minus(self) -> "LogScalar":
        """ln(1 - x) for 0 <= x < 1, accurate even when 1 - x rounds
        to 1.  For tiny x the result is -x with relative error below x."""
        if self.sign < 0:
            raise DomainError("ln_one_minus requires 0 <= x < 1")
        if self.sign == 0:
            return LogScalar.zero()
        if self.layer == 0:
            if self.mantissa >= 1.0:
                raise DomainError("ln_one_minus requires x < 1")
            return LogScalar.from_linear(math.log1p(-self.mantissa))
        if self.mantissa > 0:
            raise DomainError("ln_one_minus requires x < 1")
        return self.negated()

    # ------------------------------------------------------------------
    # metrics
    # ------------------------------------------------------------------

    def rel_diff(self, other: Numeric) -> float:
        """|self/other - 1| as a float; inf when the two are not even on
        the same scale."""
        other = LogScalar.from_linear(other)
        if other.sign == 0:
            return 0.0 if self.sign == 0 else math.inf
        if self.sign == 0:
            return 1.0
        if self.sign != other.sign:
            return math.inf
        r = abs(self).div(abs(other))
        if r.layer == 0:
            return abs(r.mantissa - 1.0)
        return math.inf


class TowerFloat:
    """Iterated exponential exp^h(t) of a float, for bookkeeping beyond
    LogScalar's two layers.

    Canonical form keeps either h == 0 or t > 700, so materializing one
    level never overflows.  For h >= 1 the represented value is always
    positive.  Comparisons descend through logs, which stays exact in
    the float sense at every step.
    """

    __slots__ = ("h", "t")

    _DESCEND = 700.0

    def __init__(self, h: int, t: float):
        if math.isnan(t) or math.isinf(t):
            raise DomainError("tower top must be finite")
        if h < 0:
            raise DomainError("tower height must be >= 0")
        while h > 0 and t <= self._DESCEND:
            t = math.exp(t)
            h -= 1
        self.h = h
        self.t = t

    def __repr__(self):
        return f"TowerFloat({self.approx()})"

    def approx(self, digits: int = APPROX_DIGITS) -> str:
        body = format(self.t, f".{digits}g")
        return "exp(" * self.h + body + ")" * self.h

    def value_float(self) -> Optional[float]:
        return self.t if self.h == 0 else None

    def exp(self) -> "TowerFloat":
        return TowerFloat(self.h + 1, self.t)

    def ln(self) -> "TowerFloat":
        if self.h >= 1:
            return TowerFloat(self.h - 1, self.t)
        if self.t <= 0:
            raise DomainError("log of a non-positive tower value")
        return TowerFloat(0, math.log(self.t))

    def times(self, s: float) -> "TowerFloat":
        """Multiply by a positive float."""
        if s <= 0:
            raise DomainError("tower multiplier must be positive")
        if self.h == 0:
            f = self.t * s
            if not math.isinf(f):
                return TowerFloat(0, f)
            return TowerFloat(1, math.log(self.t) + math.log(s))
        if self.h == 1:
            return TowerFloat(1, self.t + math.log(s))
        # ln(s) vanishes against t > exp(700) at the next level down.
        return self

    def plus(self, x: float) -> "TowerFloat":
        """Add a nonnegative float."""
        if x < 0:
            raise DomainError("tower addend must be nonnegative")
        if x == 0:
            return self
        if self.h == 0:
            return TowerFloat(0, self.t + x)
        if self.h == 1:
            lx = math.log(x)
            hi, lo = (self.t, lx) if self.t >= lx else (lx, self.t)
            return TowerFloat(1, hi + math.log1p(math.exp(lo - hi)))
        return self

    def cmp(self, other: "TowerFloat") -> int:
        a, b = self, other
        while True:
            if a.h == 0 and b.h == 0:
                if a.t == b.t:
                    return 0
                return -1 if a.t < b.t else 1
            if a.h >= 1 and b.h >= 1:
                a, b = TowerFloat(a.h - 1, a.t), TowerFloat(b.h - 1, b.t)
                continue
            if a.h >= 1:  # b.h == 0
                if b.t <= 0:
                    return 1
                a, b = TowerFloat(a.h - 1, a.t), TowerFloat(0, math.log(b.t))
                continue
            # a.h == 0, b.h >= 1
            if a.t <= 0:
                return -1
            a, b = TowerFloat(0, math.log(a.t)), TowerFloat(b.h - 1, b.t)

    def __lt__(self, other):
        return self.cmp(other) < 0

    def __eq__(self, other):
        if not isinstance(other, TowerFloat):
            return NotImplemented
        return self.cmp(other) == 0

    def __hash__(self):
        return hash((self.h, self.t))

    def to_logscalar(self) -> LogScalar:
        """Convert to a LogScalar; SaturationError beyond layer 2."""
        if self.h == 0:
            return LogScalar.from_linear(self.t)
        if self.h == 1:
            return LogScalar.from_ln(self.t)
        if self.h == 2:
            return LogScalar._wrap_lnln(1, 1, self.t)
        raise SaturationError(
            f"tower of height {self.h} exceeds the two-layer range"
        )
