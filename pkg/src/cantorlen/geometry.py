"""Hyperbolic length bounds for the geodesics that a Cantor-type gap
structure pins down, stable across all representable scales.

The two central quantities, for a gap fraction q in (0, 1):

* ``upper_length_bound(q)``: the core-curve length 2 pi^2 / log((1+q)/(1-q))
  of the flat annulus whose modulus the surrounding intervals force.  It
  shrinks as q grows and blows up like pi^2 / q as q -> 0.

* ``lower_length_bound(q)``: twice the collar half-width taken at the
  matching annulus length, 2 * eta(2 pi^2 / log1p((1-q)/(2q))).  It grows
  like 2 ln ln (1/q) as q -> 0, which is what makes doubly exponential
  gap fractions interesting.

``collar_half_width(x)`` is the standard embedded-collar radius
asinh(1/sinh(x/2)) around a closed geodesic of length x, and
``annulus_core_length(R)`` is -2 pi^2 / ln R for a round annulus of
inner radius R.  Right-angled pentagon relations close the toolbox:
``pentagon_opposite`` and ``pentagon_leg`` solve the standard relation
sinh(a) sinh(b) = cosh(d) for the side opposite a pair of legs and back.

All entry points accept floats, Fractions, or LogScalars and return
LogScalars, switching to series or log-domain forms outside the float
window so that the relative error stays at the representational
resolution of the input layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

from .cantor import OmegaSpec, gap_ratio, two_adic
from .errors import DomainError, NoPentagonError, SaturationError
from .logreal import LogScalar

__all__ = [
    "upper_length_bound",
    "lower_length_bound",
    "collar_half_width",
    "annulus_core_length",
    "pentagon_opposite",
    "pentagon_leg",
    "UpperBound",
    "BoundReport",
    "geodesic_upper_bound",
    "geodesic_lower_bound",
    "bound_report",
]

_PI_SQ = math.pi * math.pi
_LN2 = math.log(2.0)
_LN_FLOAT_MAX = 709.782712893384

NumericIn = Union[int, float, str, "LogScalar"]


def _as_scalar(v: NumericIn) -> LogScalar:
    return v if isinstance(v, LogScalar) else LogScalar.from_linear(v)


def _require_unit_open(q: LogScalar, what: str) -> None:
    if q.sign <= 0:
        raise DomainError(f"{what} requires a value in (0, 1)")
    if q.layer == 0 and q.mantissa >= 1.0:
        raise DomainError(f"{what} requires a value in (0, 1)")
    if q.layer >= 1 and q.mantissa > 0:
        raise DomainError(f"{what} requires a value in (0, 1)")


def upper_length_bound(q: NumericIn) -> LogScalar:
    """Flat-annulus core length 2 pi^2 / log((1+q)/(1-q)).

    Below q = 1e-4 the log is evaluated by its odd series in q; once q
    drops below layer 0 entirely, log((1+q)/(1-q)) = 2q at working
    resolution and the bound is exactly pi^2 / q.
    """
    ls = _as_scalar(q)
    _require_unit_open(ls, "upper_length_bound")
    if ls.layer == 0:
        x = ls.mantissa
        if x >= 1e-4:
            denom = 2.0 * math.atanh(x)
        else:
            x2 = x * x
            denom = 2.0 * x * (1.0 + x2 * (1.0 / 3.0 + x2 * (1.0 / 5.0 + x2 * (1.0 / 7.0 + x2 / 9.0))))
        return LogScalar.from_linear(2.0 * _PI_SQ / denom)
    return ls.reciprocal().mul(_PI_SQ)


def collar_half_width(x: NumericIn) -> LogScalar:
    """Embedded-collar half-width asinh(1/sinh(x/2)) around a closed
    geodesic of length x > 0.

    Short geodesics get wide collars, eta ~ ln(4/x); long ones get
    exponentially thin collars, eta ~ 2 exp(-x/2).
    """
    ls = _as_scalar(x)
    if ls.sign <= 0:
        raise DomainError("collar_half_width requires a positive length")
    if ls.layer == 0:
        xf = ls.mantissa
        if xf < 1e-4:
            return LogScalar.from_linear(math.log(4.0 / xf) + xf * xf / 48.0)
        if xf <= 40.0:
            return LogScalar.from_linear(math.asinh(1.0 / math.sinh(xf / 2.0)))
        return LogScalar.from_ln(_LN2 - xf / 2.0 + math.log1p(math.exp(-xf) / 3.0))
    if ls.mantissa < 0:
        # x below layer-0 resolution: eta = ln(4/x) + O(x^2)
        if ls.layer == 1:
            return LogScalar.from_linear(math.log(4.0) - ls.mantissa)
        mag = -ls.mantissa  # x = exp(-exp(mag))
        if mag <= _LN_FLOAT_MAX:
            return LogScalar.from_linear(math.log(4.0) + math.exp(mag))
        return LogScalar.from_ln(mag)
    # x above layer-0 resolution: eta = 2 exp(-x/2)
    try:
        xf = ls.to_linear()
    except DomainError:
        xf = None
    if xf is not None:
        return LogScalar.from_ln(_LN2 - xf / 2.0 + math.log1p(math.exp(-xf) / 3.0))
    ln_x = ls.ln_float()
    if ln_x is None:
        raise SaturationError(
            "collar width exp(-x/2) needs a third exponential layer here"
        )
    return LogScalar.from_lnln(-1, ln_x - _LN2)


def annulus_core_length(inner_radius: NumericIn) -> LogScalar:
    """Core-curve length -2 pi^2 / ln R of the round annulus
    {R < |z| < 1}, for inner radius R in (0, 1)."""
    ls = _as_scalar(inner_radius)
    _require_unit_open(ls, "annulus_core_length")
    return ls.ln_of().negated().reciprocal().mul(2.0 * _PI_SQ)


def lower_length_bound(q: NumericIn) -> LogScalar:
    """Certified floor 2 * eta(2 pi^2 / log1p((1-q)/(2q))) on the length
    of the geodesic that a gap of fraction q forces.

    Grows like 2 ln ln (1/q) + 2 ln(2/pi^2) as q -> 0.
    """
    ls = _as_scalar(q)
    _require_unit_open(ls, "lower_length_bound")
    if ls.layer == 0:
        qf = ls.mantissa
        inner = 2.0 * _PI_SQ / math.log1p((1.0 - qf) / (2.0 * qf))
        return collar_half_width(inner).mul(2.0)
    if ls.layer == 1:
        # log1p((1-q)/(2q)) = -ln q - ln 2 at working resolution
        denom = -ls.mantissa - _LN2
        return collar_half_width(2.0 * _PI_SQ / denom).mul(2.0)
    # layer 2: ln(1/q) = exp(mag), so the annulus length is
    # 2 pi^2 exp(-mag) up to a relative error below float resolution.
    mag = -ls.mantissa
    inner_ls = LogScalar.from_ln(math.log(2.0 * _PI_SQ) - mag)
    return collar_half_width(inner_ls).mul(2.0)


# ----------------------------------------------------------------------
# right-angled pentagon relations
# ----------------------------------------------------------------------


def _ln_sinh_float(ls: LogScalar) -> Optional[float]:
    """ln sinh(x) as a float for positive x, or None when the value
    itself cannot be held in a float."""
    if ls.layer == 0:
        xf = ls.mantissa
        if xf >= 20.0:
            return xf - _LN2
        if xf >= 1e-8:
            return math.log(math.sinh(xf))
        return math.log(xf) + xf * xf / 6.0
    if ls.mantissa < 0:
        # tiny x: sinh x = x at working resolution
        return ls.ln_float()
    # huge x: ln sinh x = x - ln 2; needs x itself to float
    try:
        return ls.to_linear() - _LN2
    except DomainError:
        return None


def _ln_cosh_float(ls: LogScalar) -> Optional[float]:
    """ln cosh(x) as a float for x >= 0, or None when unavailable."""
    if ls.sign == 0:
        return 0.0
    if ls.layer == 0:
        xf = ls.mantissa
        if xf >= 20.0:
            return xf - _LN2
        return math.log(math.cosh(xf))
    if ls.mantissa < 0:
        return 0.0  # cosh(tiny) = 1 at working resolution
    try:
        return ls.to_linear() - _LN2
    except DomainError:
        return None


def _ln_sinh_scalar(ls: LogScalar, lnf: Optional[float]) -> LogScalar:
    """ln sinh(x) as a LogScalar for positive x.  Uses the float value
    when one exists; beyond the float window the -ln 2 shift of the
    huge branch sits below resolution and x itself stands in."""
    if lnf is not None:
        return LogScalar.from_linear(lnf) if lnf != 0.0 else LogScalar.zero()
    if ls.mantissa < 0:
        return ls.ln_of()
    return ls


def _signed_combine(x: LogScalar, y: LogScalar) -> Optional[LogScalar]:
    """x + y for operands that may sit beyond layer 0 with mixed signs.

    Returns None when the two magnitudes agree at representational
    resolution, so the sum cannot be resolved.  Outside that corner the
    subtraction is as stable as the log-sum-exp it mirrors.
    """
    if x.sign == 0:
        return y
    if y.sign == 0:
        return x
    if x.sign == y.sign or (x.layer == 0 and y.layer == 0):
        return x.add(y)
    ax = x if x.sign > 0 else x.negated()
    ay = y if y.sign > 0 else y.negated()
    c = ax.cmp(ay)
    if c == 0:
        return None
    big, small = (x, ay) if c > 0 else (y, ax)
    sign = big.sign
    big_abs = big if sign > 0 else big.negated()
    w = big_abs.ln_float()
    v = small.ln_float()
    if w is not None and v is not None:
        t = math.exp(v - w)
        if t >= 1.0:
            return None
        return LogScalar.from_ln(w + math.log1p(-t), sign=sign)
    # unequal magnitudes with a log beyond the float window differ by
    # far more than the resolution of the larger one: absorb
    return big


def pentagon_opposite(a: NumericIn, b: NumericIn) -> LogScalar:
    """Side acosh(sinh a * sinh b) opposite the legs a, b of a
    right-angled pentagon.  The pentagon exists only when
    sinh(a) sinh(b) >= 1; otherwise NoPentagonError is raised."""
    a_ls = _as_scalar(a)
    b_ls = _as_scalar(b)
    if a_ls.sign <= 0 or b_ls.sign <= 0:
        raise DomainError("pentagon legs must be positive lengths")
    la = _ln_sinh_float(a_ls)
    lb = _ln_sinh_float(b_ls)
    if la is not None and lb is not None:
        total = la + lb
        if total < 0.0:
            raise NoPentagonError(
                "sinh(a) sinh(b) < 1: no right-angled pentagon with these legs"
            )
        if total == 0.0:
            return LogScalar.zero()
        if total <= 700.0:
            return LogScalar.from_linear(math.acosh(math.exp(total)))
        return LogScalar.from_linear(total + _LN2)
    # at least one leg is beyond the float window; corrections to
    # acosh(P) = ln(2P) sit below the resolution of the dominant term
    sum_ls = _signed_combine(_ln_sinh_scalar(a_ls, la), _ln_sinh_scalar(b_ls, lb))
    if sum_ls is None or sum_ls.sign == 0:
        return LogScalar.zero()
    if sum_ls.sign < 0:
        raise NoPentagonError(
            "sinh(a) sinh(b) < 1: no right-angled pentagon with these legs"
        )
    return sum_ls


def pentagon_leg(a: NumericIn, d: NumericIn) -> LogScalar:
    """Leg b = asinh(cosh d / sinh a) that pairs with leg a to put the
    opposite side at length d.  Requires a > 0; d enters through cosh
    and is taken by magnitude."""
    a_ls = _as_scalar(a)
    if a_ls.sign <= 0:
        raise DomainError("pentagon leg a must be a positive length")
    d_ls = _as_scalar(d)
    if d_ls.sign < 0:
        d_ls = d_ls.negated()
    la = _ln_sinh_float(a_ls)
    ld = _ln_cosh_float(d_ls)
    if la is not None and ld is not None:
        r = ld - la
        if r < -37.0:
            return LogScalar.from_ln(r)
        if r <= 700.0:
            return LogScalar.from_linear(math.asinh(math.exp(r)))
        return LogScalar.from_linear(r + _LN2)
    if ld is None:
        num: LogScalar = d_ls  # cosh d = e^d / 2, the shift is absorbed
    else:
        num = LogScalar.from_linear(ld) if ld != 0.0 else LogScalar.zero()
    den = _ln_sinh_scalar(a_ls, la)
    r_ls = _signed_combine(num, den.negated())
    if r_ls is None or r_ls.sign == 0:
        return LogScalar.from_linear(math.asinh(1.0))
    if r_ls.sign > 0:
        return r_ls  # asinh(e^r) = r + ln 2, shift below resolution
    return r_ls.exp_of()


# ----------------------------------------------------------------------
# per-interval geodesic bounds
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class UpperBound:
    """Upper bound on a pinned geodesic length with its derivation.

    ``branch`` is one of ``certified-u`` (the annulus bound at q_k
    alone), ``even-case`` (the adjacent-gap form, provably the larger
    one when the fresh gap dominates), or ``max-of-both`` (neither form
    provably dominates; ``max_source`` names the one that won
    numerically and ``certified`` is False).
    """

    value: LogScalar
    branch: str
    certified: bool
    ell: Optional[int] = None
    max_source: Optional[str] = None


@dataclass(frozen=True)
class BoundReport:
    """Two-sided length bounds for the geodesic pinned by interval i at
    level k, with the dyadic bookkeeping that chose the upper branch."""

    k: int
    i: int
    boundary: bool
    ell: Optional[int]
    lower: LogScalar
    upper: LogScalar
    branch: str
    certified: bool
    max_source: Optional[str] = None


def _two_pi_sq_over_log1p(arg: LogScalar) -> LogScalar:
    """2 pi^2 / log1p(arg) for arg > 0, across all layers."""
    if arg.layer == 0:
        return LogScalar.from_linear(2.0 * _PI_SQ / math.log1p(arg.mantissa))
    if arg.mantissa < 0:
        # tiny arg: log1p(arg) = arg at working resolution
        return arg.reciprocal().mul(2.0 * _PI_SQ)
    # huge arg: log1p(arg) = ln(arg); its float form exists through
    # layer 2 mantissa 709, beyond which the result is below resolution
    ln_arg = arg.ln_float()
    if ln_arg is None:
        raise SaturationError("log1p argument beyond layer-2 resolution")
    return LogScalar.from_linear(2.0 * _PI_SQ / ln_arg)


def geodesic_upper_bound(spec: OmegaSpec, k: int, i: int) -> UpperBound:
    """Upper bound for the geodesic pinned by closed interval i at
    level k.

    Boundary intervals see only the level-k gap, so the annulus bound
    at q_k applies as is.  Interior intervals sit between a fresh gap
    and one inherited from ell levels up; when the fresh gap dominates
    (the adjacent-gap ratio test), the inherited-gap form

        2 pi^2 / log1p(2 q_{k-ell} / (1 - q_k))

    is provably the larger of the two and is certified on its own.
    When the gap fractions are non-increasing up to k, or q_k is their
    minimum so far, the plain annulus bound is certified instead.
    Otherwise neither form provably dominates and the numerical max is
    reported uncertified.
    """
    dy = two_adic(k, i)
    u_plain = upper_length_bound(spec.q(k))
    if dy.boundary:
        return UpperBound(u_plain, "certified-u", True)
    even_i = i - 1 if dy.offset_one else i
    ratio = gap_ratio(spec, k, even_i)
    arg = spec.q(k - ratio.ell).mul(2.0).div(spec.q(k).one_minus())
    u_even = _two_pi_sq_over_log1p(arg)
    if ratio.fresh_gap_dominates:
        return UpperBound(u_even, "even-case", True, ell=ratio.ell)
    if spec.nonincreasing_prefix(k) or spec.is_prefix_min(k):
        return UpperBound(u_plain, "certified-u", True, ell=ratio.ell)
    if u_even.cmp(u_plain) >= 0:
        return UpperBound(u_even, "max-of-both", False, ell=ratio.ell,
                          max_source="even-case")
    return UpperBound(u_plain, "max-of-both", False, ell=ratio.ell,
                      max_source="u")


def geodesic_lower_bound(spec: OmegaSpec, k: int) -> LogScalar:
    """Certified lower bound for any geodesic pinned at level k: the
    collar floor at the level-k gap fraction."""
    return lower_length_bound(spec.q(k))


def bound_report(spec: OmegaSpec, k: int, i: int) -> BoundReport:
    """Two-sided bounds for interval i at level k."""
    dy = two_adic(k, i)
    ub = geodesic_upper_bound(spec, k, i)
    lb = geodesic_lower_bound(spec, k)
    return BoundReport(
        k=k,
        i=i,
        boundary=dy.boundary,
        ell=ub.ell,
        lower=lb,
        upper=ub.value,
        branch=ub.branch,
        certified=ub.certified,
        max_source=ub.max_source,
    )
