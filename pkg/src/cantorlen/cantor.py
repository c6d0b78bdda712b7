"""Generalized Cantor sets driven by a gap-fraction sequence.

Level ``k`` of the construction keeps ``2**k`` closed intervals of a
common length and removes, from each level-(k-1) interval of length
``len_{k-1}``, a centered open gap of length ``q_k * len_{k-1}``.  So

    len_k = (1 - q_k) / 2 * len_{k-1},            len_0 = 1,

and the open gaps of level ``k`` are indexed left to right by
``j = 1 .. 2**k - 1``; odd ``j`` are the gaps freshly removed at level
``k``, and even ``j = 2**ell * m`` (``m`` odd) are inherited from level
``k - ell``, keeping their original length.  Index 0 and ``2**k`` are
the sentinel half-infinite gaps outside ``[0, 1]``; they carry no finite
length and any length query on them is an error.

The gap-fraction sequence itself comes from an ``OmegaSpec``: a constant
value, an explicit finite prefix, the recursion
``q_{n+1} = exp(-exp(n / q_n))``, or a two-track composite that places a
fixed value on a sparse index set and a named decaying rule elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import (
    DomainError,
    ModeUnavailableError,
    SaturationError,
    SpecViolationError,
)
from .logreal import LogScalar, TowerFloat

__all__ = [
    "DyadicIndex",
    "two_adic",
    "OmegaSpec",
    "CantorLevel",
    "interval_length",
    "interval_length_fraction",
    "gap_length",
    "gap_length_fraction",
    "level",
    "interval_at",
    "GapRatio",
    "gap_ratio",
    "LEVEL_ENDPOINT_CAP",
    "EXACT_DEPTH_CAP",
    "LAZY_DEPTH_CAP",
]

# level() materializes endpoints only up to 2**20 intervals.
LEVEL_ENDPOINT_CAP = 20
# Exact-rational arithmetic is supported to depth 40.
EXACT_DEPTH_CAP = 40
# Lazy single-interval addressing works to depth 1e6.
LAZY_DEPTH_CAP = 10**6

RationalLike = Union[int, float, Fraction, str]


def _as_fraction(v: RationalLike) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, str)):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(v)  # exact binary expansion
    raise DomainError(f"cannot interpret {type(v).__name__} as a rational")


@dataclass(frozen=True)
class DyadicIndex:
    """Two-adic decomposition of an interval or gap index at level k.

    ``boundary`` marks the outermost indices 1 and 2**k.  For an even
    interior index ``i = 2**ell * m`` with ``m`` odd, ``ell`` and ``m``
    are that decomposition; for an odd interior index the decomposition
    of ``i - 1`` is carried and ``offset_one`` is set.
    """

    k: int
    i: int
    boundary: bool
    ell: Optional[int] = None
    m: Optional[int] = None
    offset_one: bool = False


def two_adic(k: int, i: int) -> DyadicIndex:
    """Decompose index ``i`` at level ``k`` (1 <= i <= 2**k)."""
    if k < 1:
        raise DomainError("level must be >= 1")
    if not 1 <= i <= (1 << k):
        raise DomainError(f"index {i} outside 1..2**{k}")
    if i == 1 or i == (1 << k):
        return DyadicIndex(k, i, True)
    if i % 2 == 0:
        ell = (i & -i).bit_length() - 1
        return DyadicIndex(k, i, False, ell, i >> ell)
    j = i - 1
    ell = (j & -j).bit_length() - 1
    return DyadicIndex(k, i, False, ell, j >> ell, offset_one=True)


class _RecNode:
    """One step of the double-exponential recursion chain."""

    __slots__ = ("g", "c", "q", "q_float")

    def __init__(self, g: TowerFloat, c: TowerFloat,
                 q: Optional[LogScalar], q_float: Optional[float]):
        self.g = g          # ln(1/q_n)
        self.c = c          # ln ln(1/q_n)  (may be negative at n = 1)
        self.q = q          # None once below the representable range
        self.q_float = q_float


class OmegaSpec:
    """A gap-fraction sequence q_1, q_2, ... with values in (0, 1).

    Construct through the classmethods.  Kinds:

    * ``constant``: q_n = q for all n,
    * ``explicit``: a finite prefix; queries beyond it raise,
    * ``recursive-i``: q_{n+1} = exp(-exp(n / q_n)) from a seed q_1
      (rule id "inverse-double-exp"),
    * ``composite-ii``: q_n = d on a sparse index set A, q_n = p_n
      elsewhere, with named rules for both A and p.

    Value memoization is grow-only: concurrent readers are safe and
    writers are idempotent.
    """

    P_RULES = ("half-pi-sq-over-log", "pow-half", "explicit")
    A_RULES = ("geometric", "powers-of-two", "odd", "explicit")

    def __init__(self, kind: str, *, horizon_hint: Optional[int] = None,
                 _internal: bool = False):
        if not _internal:
            raise DomainError("use the OmegaSpec classmethods")
        self.kind = kind
        self.horizon_hint = horizon_hint
        self._q_memo: dict[int, LogScalar] = {}
        self._ln1mq_terms: list[float] = []   # ln(1 - q_p), p = 1, 2, ...
        self._ln_lambda: dict[int, float] = {0: 0.0}
        self._lambda_frac: dict[int, Optional[Fraction]] = {0: Fraction(1)}
        # kind-specific slots
        self._const: Optional[Fraction] = None
        self._entries: tuple = ()
        self._seed: Optional[Fraction] = None
        self._chain: list = []
        self._p_rule: str = ""
        self._a_rule: str = ""
        self._p_values: tuple = ()
        self._a_values: tuple = ()
        self._d: Optional[Fraction] = None

    # ------------------------------------------------------------------
    # constructors
    # ------------------------------------------------------------------

    @classmethod
    def constant(cls, q: RationalLike,
                 horizon_hint: Optional[int] = None) -> "OmegaSpec":
        spec = cls("constant", horizon_hint=horizon_hint, _internal=True)
        qf = _as_fraction(q)
        if not 0 < qf < 1:
            raise SpecViolationError(f"constant value {q} outside (0, 1)")
        spec._const = qf
        return spec

    @classmethod
    def explicit(cls, qs: Sequence[RationalLike],
                 horizon_hint: Optional[int] = None) -> "OmegaSpec":
        spec = cls("explicit", horizon_hint=horizon_hint, _internal=True)
        entries = []
        for idx, v in enumerate(qs, start=1):
            f = _as_fraction(v)
            if not 0 < f < 1:
                raise SpecViolationError(
                    f"explicit value at position {idx} outside (0, 1)", index=idx
                )
            entries.append(f)
        if not entries:
            raise SpecViolationError("explicit sequence must be nonempty")
        spec._entries = tuple(entries)
        return spec

    @classmethod
    def recursive_i(cls, q1: RationalLike,
                    horizon_hint: Optional[int] = None) -> "OmegaSpec":
        spec = cls("recursive-i", horizon_hint=horizon_hint, _internal=True)
        seed = _as_fraction(q1)
        if not 0 < seed < 1:
            raise SpecViolationError(f"seed {q1} outside (0, 1)")
        spec._seed = seed
        g1 = TowerFloat(0, -math.log(float(seed)))
        spec._chain = [
            _RecNode(g1, g1.ln() if g1.t > 0 else TowerFloat(0, -math.inf),
                     LogScalar.from_linear(seed), float(seed))
        ]
        return spec

    @classmethod
    def composite_ii(cls, p_rule: Union[str, Sequence[RationalLike]] = "half-pi-sq-over-log",
                     a_rule: Union[str, Sequence[int]] = "geometric",
                     d: RationalLike = Fraction(1, 2),
                     horizon_hint: Optional[int] = None) -> "OmegaSpec":
        spec = cls("composite-ii", horizon_hint=horizon_hint, _internal=True)
        df = _as_fraction(d)
        if not 0 < df < 1:
            raise SpecViolationError(f"sparse-set value {d} outside (0, 1)")
        spec._d = df
        if isinstance(p_rule, str):
            if p_rule not in cls.P_RULES or p_rule == "explicit":
                raise SpecViolationError(
                    f"unknown p rule {p_rule!r}; expected one of "
                    f"{cls.P_RULES[:-1]} or an explicit value sequence"
                )
            spec._p_rule = p_rule
        else:
            spec._p_rule = "explicit"
            spec._p_values = tuple(_as_fraction(v) for v in p_rule)
        if isinstance(a_rule, str):
            if a_rule not in cls.A_RULES or a_rule == "explicit":
                raise SpecViolationError(
                    f"unknown A rule {a_rule!r}; expected one of "
                    f"{cls.A_RULES[:-1]} or an explicit index sequence"
                )
            spec._a_rule = a_rule
        else:
            vals = tuple(int(v) for v in a_rule)
            if any(b <= a for a, b in zip(vals, vals[1:])) or (vals and vals[0] < 1):
                raise SpecViolationError("explicit A indices must be strictly increasing and >= 1")
            spec._a_rule = "explicit"
            spec._a_values = vals
        return spec

    # ------------------------------------------------------------------
    # composite-ii structure
    # ------------------------------------------------------------------

    def a_index(self, m: int) -> int:
        """The m-th sparse index a_m (m >= 1) of a composite spec."""
        if self.kind != "composite-ii":
            raise DomainError("a_index applies to composite-ii specs only")
        if m < 1:
            raise DomainError("block number must be >= 1")
        if self._a_rule == "geometric":
            # a_1 = 1 and a_{m+1} = 2**m * a_m, so a_m = 2**(m(m-1)/2).
            return 1 << (m * (m - 1) // 2)
        if self._a_rule == "powers-of-two":
            return 1 << m
        if self._a_rule == "odd":
            return 2 * m - 1
        if m > len(self._a_values):
            raise SpecViolationError(
                f"explicit A prefix of length {len(self._a_values)} exhausted",
                index=m,
            )
        return self._a_values[m - 1]

    def in_sparse_set(self, n: int) -> bool:
        if self.kind != "composite-ii":
            raise DomainError("in_sparse_set applies to composite-ii specs only")
        if n < 1:
            raise DomainError("index must be >= 1")
        if self._a_rule == "geometric":
            if n == 1:
                return True
            e = n.bit_length() - 1
            if n != 1 << e:
                return False
            m = (1 + math.isqrt(1 + 8 * e)) // 2
            return m * (m - 1) // 2 == e
        if self._a_rule == "powers-of-two":
            return n >= 2 and (n & (n - 1)) == 0
        if self._a_rule == "odd":
            return n % 2 == 1
        if self._a_values and n > self._a_values[-1]:
            raise SpecViolationError(
                "membership beyond the explicit A prefix is undetermined", index=n
            )
        return n in self._a_values

    def p_fraction(self, n: int) -> Optional[Fraction]:
        if self.kind != "composite-ii":
            raise DomainError("p_fraction applies to composite-ii specs only")
        if self._p_rule == "pow-half":
            return Fraction(1, 2**n)
        if self._p_rule == "explicit":
            if n > len(self._p_values):
                raise SpecViolationError(
                    f"explicit p prefix of length {len(self._p_values)} exhausted",
                    index=n,
                )
            return self._p_values[n - 1]
        return None

    def p_float(self, n: int) -> float:
        """The off-set value p_n as a float (no (0,1) validation here;
        series code owns its own domain checks)."""
        if self.kind != "composite-ii":
            raise DomainError("p_float applies to composite-ii specs only")
        if self._p_rule == "half-pi-sq-over-log":
            if n < 2:
                raise SpecViolationError(
                    "the half-pi-sq-over-log rule needs n >= 2", index=n
                )
            return math.pi**2 / (2.0 * math.log(n))
        f = self.p_fraction(n)
        return float(f)

    @property
    def p_rule_name(self) -> str:
        return self._p_rule

    @property
    def a_rule_name(self) -> str:
        return self._a_rule

    @property
    def sparse_value(self) -> Optional[Fraction]:
        return self._d

    @property
    def seed(self) -> Optional[Fraction]:
        return self._seed

    @property
    def entries(self) -> tuple:
        return self._entries

    @property
    def constant_value(self) -> Optional[Fraction]:
        return self._const

    # ------------------------------------------------------------------
    # the sequence itself
    # ------------------------------------------------------------------

    def _ensure_chain(self, n: int) -> _RecNode:
        chain = self._chain
        while len(chain) < n:
            idx = len(chain)  # building node for index idx + 1
            prev = chain[-1]
            ln_c_next = prev.g.plus(math.log(idx) if idx > 1 else 0.0)
            c_next = ln_c_next.exp()
            g_next = c_next.exp()
            q = None
            q_float = None
            if g_next.h == 0:
                q = LogScalar.from_ln(-g_next.t)
            elif g_next.h == 1 and g_next.t <= 1e300:
                q = LogScalar.from_lnln(-1, g_next.t)
            if q is not None:
                try:
                    q_float = q.to_linear()
                except DomainError:
                    q_float = None
            chain.append(_RecNode(g_next, c_next, q, q_float))
        return chain[n - 1]

    def chain_g(self, n: int) -> TowerFloat:
        """ln(1/q_n) of a recursive spec, exact in tower form."""
        if self.kind != "recursive-i":
            raise DomainError("chain_g applies to recursive-i specs only")
        return self._ensure_chain(n).g

    def chain_c(self, n: int) -> TowerFloat:
        """ln ln(1/q_n) of a recursive spec, exact in tower form."""
        if self.kind != "recursive-i":
            raise DomainError("chain_c applies to recursive-i specs only")
        return self._ensure_chain(n).c

    def q(self, n: int) -> LogScalar:
        """The n-th gap fraction.  Raises SaturationError when the value
        lies below exp(-exp(1e300)), SpecViolationError when the spec
        does not define (or violates (0,1) at) this index."""
        if n < 1:
            raise DomainError("sequence index must be >= 1")
        memo = self._q_memo
        got = memo.get(n)
        if got is not None:
            return got
        if self.kind == "constant":
            val = LogScalar.from_linear(self._const)
        elif self.kind == "explicit":
            if n > len(self._entries):
                raise SpecViolationError(
                    f"explicit prefix has {len(self._entries)} terms; "
                    f"index {n} is undefined",
                    index=n,
                )
            val = LogScalar.from_linear(self._entries[n - 1])
        elif self.kind == "recursive-i":
            node = self._ensure_chain(n)
            if node.q is None:
                raise SaturationError(
                    f"q_{n} lies below exp(-exp(1e300)) and is not representable"
                )
            val = node.q
        else:  # composite-ii
            if self.in_sparse_set(n):
                val = LogScalar.from_linear(self._d)
            else:
                p = self.p_float(n)
                if not 0.0 < p < 1.0:
                    raise SpecViolationError(
                        f"rule value p_{n} = {p!r} outside (0, 1)", index=n
                    )
                pf = self.p_fraction(n)
                val = LogScalar.from_linear(pf if pf is not None else p)
        memo[n] = val
        return val

    def q_float(self, n: int) -> float:
        return self.q(n).to_linear()

    def q_fraction(self, n: int) -> Optional[Fraction]:
        """Exact rational value when one exists, else None."""
        if n < 1:
            raise DomainError("sequence index must be >= 1")
        if self.kind == "constant":
            return self._const
        if self.kind == "explicit":
            if n > len(self._entries):
                raise SpecViolationError(
                    f"explicit prefix has {len(self._entries)} terms; "
                    f"index {n} is undefined",
                    index=n,
                )
            return self._entries[n - 1]
        if self.kind == "recursive-i":
            return self._seed if n == 1 else None
        if self.in_sparse_set(n):
            return self._d
        f = self.p_fraction(n)
        if f is not None and not 0 < f < 1:
            raise SpecViolationError(
                f"rule value p_{n} = {f} outside (0, 1)", index=n
            )
        return f

    def max_defined_index(self) -> Optional[int]:
        """Largest index the spec defines, or None when unbounded."""
        if self.kind == "explicit":
            return len(self._entries)
        return None

    def strictly_decreasing_prefix(self, upto: int) -> Optional[int]:
        """None when q_1 > q_2 > ... > q_upto holds; else the first
        offending index n (q_n >= q_{n-1}).  The recursion kind is
        strictly decreasing by construction."""
        if self.kind == "recursive-i":
            return None
        if self.kind == "constant":
            return 2 if upto >= 2 else None
        prev = self.q(1)
        for n in range(2, upto + 1):
            try:
                cur = self.q(n)
            except SaturationError:
                return None  # beyond-range values only get smaller
            if cur.cmp(prev) >= 0:
                return n
            prev = cur
        return None

    def nonincreasing_prefix(self, upto: int) -> bool:
        if self.kind in ("recursive-i", "constant"):
            return True
        prev = self.q(1)
        for n in range(2, upto + 1):
            try:
                cur = self.q(n)
            except SaturationError:
                return True
            if cur.cmp(prev) > 0:
                return False
            prev = cur
        return True

    def is_prefix_min(self, k: int) -> bool:
        """Whether q_k is the minimum of q_1..q_k."""
        qk = self.q(k)
        for n in range(1, k):
            try:
                if self.q(n).cmp(qk) < 0:
                    return False
            except SaturationError:
                return False
        return True

    def describe(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.kind == "constant":
            d["q"] = str(self._const)
        elif self.kind == "explicit":
            d["qs"] = [str(v) for v in self._entries]
        elif self.kind == "recursive-i":
            d["q1"] = str(self._seed)
            d["rule"] = "inverse-double-exp"
        else:
            d["p"] = self._p_rule
            if self._p_rule == "explicit":
                d["p_values"] = [str(v) for v in self._p_values]
            d["a"] = self._a_rule
            if self._a_rule == "explicit":
                d["a_values"] = list(self._a_values)
            d["d"] = str(self._d)
        if self.horizon_hint is not None:
            d["horizon_hint"] = self.horizon_hint
        return d


# ----------------------------------------------------------------------
# lengths
# ----------------------------------------------------------------------


def _ln_one_minus_q_float(spec: OmegaSpec, p: int) -> float:
    """ln(1 - q_p) as a float; exactly 0.0 once q_p is below float
    resolution (the true value then differs by less than 1e-300)."""
    t = spec.q(p).ln_one_minus()
    try:
        return t.to_linear()
    except DomainError:
        return 0.0


def _ln_lambda(spec: OmegaSpec, k: int) -> float:
    """ln of the common closed-interval length at level k."""
    cached = spec._ln_lambda.get(k)
    if cached is not None:
        return cached
    terms = spec._ln1mq_terms
    while len(terms) < k:
        terms.append(_ln_one_minus_q_float(spec, len(terms) + 1))
    val = -k * math.log(2) + math.fsum(terms[:k])
    spec._ln_lambda[k] = val
    return val


def interval_length(spec: OmegaSpec, k: int) -> LogScalar:
    """Common length of the 2**k closed intervals at level k."""
    if k < 0:
        raise DomainError("level must be >= 0")
    if k > LAZY_DEPTH_CAP:
        raise DomainError(f"depth cap is {LAZY_DEPTH_CAP}")
    if k == 0:
        return LogScalar.one()
    return LogScalar.from_ln(_ln_lambda(spec, k))


def interval_length_fraction(spec: OmegaSpec, k: int) -> Fraction:
    """Exact-rational interval length; ModeUnavailableError when some
    q_p up to k has no rational value, DomainError beyond depth 40."""
    if k < 0:
        raise DomainError("level must be >= 0")
    if k > EXACT_DEPTH_CAP:
        raise DomainError(f"exact mode depth cap is {EXACT_DEPTH_CAP}")
    cached = spec._lambda_frac.get(k)
    if cached is not None:
        return cached
    prev = interval_length_fraction(spec, k - 1)
    qf = spec.q_fraction(k)
    if qf is None:
        raise ModeUnavailableError(
            f"q_{k} has no exact rational value; exact mode unavailable"
        )
    val = (1 - qf) * prev / 2
    spec._lambda_frac[k] = val
    return val


def _gap_source(k: int, j: int) -> tuple[int, int]:
    """(source level, source odd index) of gap j at level k."""
    if j <= 0 or j >= (1 << k):
        raise DomainError(
            f"gap index {j} at level {k} is a sentinel outer gap with no "
            "finite length"
        )
    if j % 2 == 1:
        return k, j
    ell = (j & -j).bit_length() - 1
    return k - ell, j >> ell


def gap_length(spec: OmegaSpec, k: int, j: int) -> LogScalar:
    """Length of the open gap J_k^j (interior indices only).  Inherited
    gaps report the length they had when first removed."""
    if k < 1:
        raise DomainError("level must be >= 1")
    src_k, src_j = _gap_source(k, j)
    del src_j  # the fresh-gap length does not depend on which odd index
    return spec.q(src_k).mul(interval_length(spec, src_k - 1))


def gap_length_fraction(spec: OmegaSpec, k: int, j: int) -> Fraction:
    if k < 1:
        raise DomainError("level must be >= 1")
    src_k, _ = _gap_source(k, j)
    qf = spec.q_fraction(src_k)
    if qf is None:
        raise ModeUnavailableError(
            f"q_{src_k} has no exact rational value; exact mode unavailable"
        )
    return qf * interval_length_fraction(spec, src_k - 1)


# ----------------------------------------------------------------------
# level materialization and lazy addressing
# ----------------------------------------------------------------------


@dataclass
class CantorLevel:
    """Materialized level: endpoints and gap lengths.

    ``endpoints`` is the ordered list of ``2**k`` closed-interval
    endpoint pairs; ``gaps`` maps interior gap index to length.  In
    exact mode both hold Fractions; in log-domain mode endpoints are
    floats and gap lengths LogScalars.
    """

    k: int
    mode: str
    closed_length: LogScalar
    closed_length_fraction: Optional[Fraction]
    endpoints: list
    gaps: list  # (j, length) pairs


def level(spec: OmegaSpec, k: int, mode: str = "log-domain") -> CantorLevel:
    if k < 0:
        raise DomainError("level must be >= 0")
    if k > LEVEL_ENDPOINT_CAP:
        raise DomainError(
            f"level() materializes at most 2**{LEVEL_ENDPOINT_CAP} intervals; "
            "use interval_at for deeper single addresses"
        )
    if mode not in ("log-domain", "exact-rational"):
        raise DomainError(f"unknown mode {mode!r}")
    if mode == "exact-rational":
        pairs = [(Fraction(0), Fraction(1))]
        for p in range(1, k + 1):
            qf = spec.q_fraction(p)
            if qf is None:
                raise ModeUnavailableError(
                    f"q_{p} has no exact rational value; exact mode unavailable"
                )
            nxt = []
            for lo, hi in pairs:
                side = (hi - lo) * (1 - qf) / 2
                nxt.append((lo, lo + side))
                nxt.append((hi - side, hi))
            pairs = nxt
        gaps = [(j, gap_length_fraction(spec, k, j)) for j in range(1, (1 << k))] if k >= 1 else []
        return CantorLevel(
            k, mode, interval_length(spec, k), interval_length_fraction(spec, k),
            pairs, gaps,
        )
    pairs_f = [(0.0, 1.0)]
    for p in range(1, k + 1):
        try:
            qv = spec.q(p).to_linear()
        except DomainError:
            qv = 0.0  # below float resolution; gap indistinguishable from a point
        nxt = []
        for lo, hi in pairs_f:
            side = (hi - lo) * (1.0 - qv) / 2.0
            nxt.append((lo, lo + side))
            nxt.append((hi - side, hi))
        pairs_f = nxt
    gaps_l = [(j, gap_length(spec, k, j)) for j in range(1, (1 << k))] if k >= 1 else []
    return CantorLevel(k, mode, interval_length(spec, k), None, pairs_f, gaps_l)


def interval_at(spec: OmegaSpec, k: int, i: int, mode: str = "log-domain"):
    """Endpoints of the single closed interval I_k^i without
    materializing the level.  Returns a (left, right) pair of LogScalars
    in log-domain mode, Fractions in exact mode."""
    if k < 0:
        raise DomainError("level must be >= 0")
    if k == 0:
        if i != 1:
            raise DomainError("level 0 has a single interval")
        if mode == "exact-rational":
            return (Fraction(0), Fraction(1))
        return (LogScalar.zero(), LogScalar.one())
    if mode == "exact-rational":
        if k > EXACT_DEPTH_CAP:
            raise DomainError(f"exact mode depth cap is {EXACT_DEPTH_CAP}")
    elif k > LAZY_DEPTH_CAP:
        raise DomainError(f"depth cap is {LAZY_DEPTH_CAP}")
    if i < 1 or i > (1 << k):
        raise DomainError(f"index {i} outside 1..2**{k}")
    if mode == "exact-rational":
        left = Fraction(0)
        length = Fraction(1)
        for p in range(1, k + 1):
            qf = spec.q_fraction(p)
            if qf is None:
                raise ModeUnavailableError(
                    f"q_{p} has no exact rational value; exact mode unavailable"
                )
            side = length * (1 - qf) / 2
            bit = (i - 1) >> (k - p) & 1
            if bit:
                left += length - side
            length = side
        return (left, left + length)
    left_ls = LogScalar.zero()
    for p in range(1, k + 1):
        bit = (i - 1) >> (k - p) & 1
        if bit:
            # right-child offset: len_{p-1} - len_p = len_{p-1}(1+q_p)/2
            lam_prev = interval_length(spec, p - 1)
            q_p = spec.q(p)
            try:
                half = (1.0 + q_p.to_linear()) / 2.0
            except DomainError:
                half = 0.5
            left_ls = left_ls.add(lam_prev.mul(half))
    return (left_ls, left_ls.add(interval_length(spec, k)))


# ----------------------------------------------------------------------
# gap ratios
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class GapRatio:
    """Ratio of adjacent gap lengths |J_k^i| / |J_k^{i-1}|.

    ``ell`` and ``m`` decompose the even index of the pair, and
    ``fresh_gap_dominates`` records whether the freshly removed gap of
    the pair is strictly longer than the inherited one (ties count as
    not dominating).
    """

    k: int
    i: int
    ell: int
    m: int
    ratio: LogScalar
    fresh_gap_dominates: bool


def gap_ratio(spec: OmegaSpec, k: int, i: int) -> GapRatio:
    """Closed-form adjacent-gap ratio at level k.

    For even interior ``i = 2**ell * m`` the ratio is

        (q_{k-ell} / q_k) * 2**ell * prod_{p=k-ell}^{k-1} 1/(1 - q_p),

    and for odd interior ``i`` the same pair is read in the other
    direction, so the value is the reciprocal taken at ``i - 1``.
    """
    if k < 1:
        raise DomainError("level must be >= 1")
    if i <= 1 or i >= (1 << k):
        raise DomainError(
            f"gap index {i} at level {k} has no interior left neighbor"
        )
    reciprocal = i % 2 == 1
    even_i = i - 1 if reciprocal else i
    ell = (even_i & -even_i).bit_length() - 1
    m = even_i >> ell
    ratio = spec.q(k - ell).div(spec.q(k)).mul(float(1 << ell))
    for p in range(k - ell, k):
        ratio = ratio.div(spec.q(p).one_minus())
    fresh = ratio.cmp(LogScalar.one()) < 0
    if reciprocal:
        ratio = ratio.reciprocal()
    return GapRatio(k, i, ell, m, ratio, fresh)
