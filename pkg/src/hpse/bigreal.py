"""Arbitrary-precision reals bound to an explicit decimal-digit precision.

Thin wrapper over MPFR (via gmpy2). Every value carries the context it was
created under; all arithmetic goes through explicit context objects, so there
is no dependence on gmpy2's thread-local context and results are bit-identical
across runs for identical operand sequences.

Decimal in, decimal out: values enter as decimal strings and leave through
`render_decimal`, which is correctly rounded (round-to-nearest-even).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import gmpy2

__all__ = [
    "PrecisionCtx",
    "BigReal",
    "make_context",
    "parse_decimal",
    "render_decimal",
    "ParseError",
    "RenderError",
]

_DECIMAL_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")

DEFAULT_GUARD_BITS = 32


class ParseError(ValueError):
    """Text does not parse as a decimal literal."""


class RenderError(ValueError):
    """Requested rendering exceeds what the context can certify."""


def _bits_for_digits(decimal_digits: int) -> int:
    # smallest k with 2^k >= 10^D, exact integer arithmetic
    return int((gmpy2.mpz(10) ** decimal_digits).bit_length())


@dataclass(frozen=True)
class PrecisionCtx:
    """Descriptor of a working precision in decimal digits.

    mantissa_bits = ceil(D * log2(10)) + guard_bits.  The guard bits only
    protect decimal<->binary conversions; planned cancellation headroom is
    accounted for in decimal digits by the callers.
    """

    decimal_digits: int
    guard_bits: int = DEFAULT_GUARD_BITS
    mantissa_bits: int = field(init=False, compare=False)
    _gctx: object = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.decimal_digits < 1:
            raise ValueError(f"decimal_digits must be >= 1, got {self.decimal_digits}")
        if self.guard_bits < 0:
            raise ValueError(f"guard_bits must be >= 0, got {self.guard_bits}")
        bits = _bits_for_digits(self.decimal_digits) + self.guard_bits
        object.__setattr__(self, "mantissa_bits", bits)
        object.__setattr__(self, "_gctx", gmpy2.context(precision=bits))

    @property
    def gctx(self):
        """The gmpy2 context performing correctly rounded mpfr arithmetic."""
        return self._gctx

    def mpfr(self, value) -> "gmpy2.mpfr":
        """Raw mpfr at this precision from a string, int or mpfr."""
        if isinstance(value, str):
            if not _DECIMAL_RE.match(value.strip()):
                raise ParseError(f"not a decimal literal: {value!r}")
            return gmpy2.mpfr(value.strip(), self.mantissa_bits)
        return gmpy2.mpfr(value, self.mantissa_bits)


def make_context(decimal_digits: int, guard_bits: int = DEFAULT_GUARD_BITS) -> PrecisionCtx:
    if decimal_digits < 1:
        raise ValueError(f"decimal_digits must be >= 1, got {decimal_digits}")
    return PrecisionCtx(decimal_digits, guard_bits)


class BigReal:
    """Immutable real number at the precision of its PrecisionCtx.

    Arithmetic between BigReals requires matching contexts (mixing working
    precisions silently is exactly the bug class this layer exists to stop);
    ints mix freely.  In-contract operations never produce NaN: division by
    zero and sqrt of a negative raise.
    """

    __slots__ = ("raw", "ctx")

    def __init__(self, raw: "gmpy2.mpfr", ctx: PrecisionCtx):
        object.__setattr__(self, "raw", raw)
        object.__setattr__(self, "ctx", ctx)

    def __setattr__(self, *_):
        raise AttributeError("BigReal is immutable")

    # -- construction helpers ------------------------------------------------
    @classmethod
    def from_str(cls, text: str, ctx: PrecisionCtx) -> "BigReal":
        return cls(ctx.mpfr(text), ctx)

    @classmethod
    def from_int(cls, n: int, ctx: PrecisionCtx) -> "BigReal":
        return cls(ctx.mpfr(n), ctx)

    # -- arithmetic ----------------------------------------------------------
    def _coerce(self, other) -> "gmpy2.mpfr | int":
        if isinstance(other, BigReal):
            if other.ctx != self.ctx:
                raise ValueError(
                    f"context mismatch: {self.ctx.decimal_digits}d vs {other.ctx.decimal_digits}d"
                )
            return other.raw
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return BigReal(self.ctx.gctx.add(self.raw, o), self.ctx)

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return BigReal(self.ctx.gctx.sub(self.raw, o), self.ctx)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return BigReal(self.ctx.gctx.sub(o, self.raw), self.ctx)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return BigReal(self.ctx.gctx.mul(self.raw, o), self.ctx)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if (isinstance(o, int) and o == 0) or (not isinstance(o, int) and gmpy2.is_zero(o)):
            raise ZeroDivisionError("BigReal division by zero")
        return BigReal(self.ctx.gctx.div(self.raw, o), self.ctx)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if gmpy2.is_zero(self.raw):
            raise ZeroDivisionError("BigReal division by zero")
        return BigReal(self.ctx.gctx.div(o, self.raw), self.ctx)

    def __neg__(self):
        return BigReal(self.ctx.gctx.minus(self.raw), self.ctx)

    def __abs__(self):
        return BigReal(abs(self.raw), self.ctx)

    def sqrt(self) -> "BigReal":
        if self.raw < 0:
            raise ValueError("sqrt of negative BigReal")
        return BigReal(self.ctx.gctx.sqrt(self.raw), self.ctx)

    # -- comparisons (total order; exact across contexts) ---------------------
    def _cmp_raw(self, other):
        if isinstance(other, BigReal):
            return other.raw
        if isinstance(other, int):
            return other
        return NotImplemented

    def __eq__(self, other):
        o = self._cmp_raw(other)
        return NotImplemented if o is NotImplemented else self.raw == o

    def __lt__(self, other):
        o = self._cmp_raw(other)
        return NotImplemented if o is NotImplemented else self.raw < o

    def __le__(self, other):
        o = self._cmp_raw(other)
        return NotImplemented if o is NotImplemented else self.raw <= o

    def __gt__(self, other):
        o = self._cmp_raw(other)
        return NotImplemented if o is NotImplemented else self.raw > o

    def __ge__(self, other):
        o = self._cmp_raw(other)
        return NotImplemented if o is NotImplemented else self.raw >= o

    def __hash__(self):
        return hash(self.raw)

    # -- inspection ------------------------------------------------------------
    def is_zero(self) -> bool:
        return gmpy2.is_zero(self.raw)

    def sign(self) -> int:
        return gmpy2.sign(self.raw)

    def __float__(self) -> float:
        return float(self.raw)

    def __repr__(self):
        digits = min(self.ctx.decimal_digits, 20)
        return f"BigReal({render_decimal(self, digits)!r}, D={self.ctx.decimal_digits})"

    def render(self, digits: int) -> str:
        return render_decimal(self, digits)


def parse_decimal(text: str, ctx: PrecisionCtx) -> BigReal:
    """Decimal literal -> BigReal, correctly rounded to ctx precision."""
    return BigReal.from_str(text, ctx)


def mantissa_exp10(raw: "gmpy2.mpfr", digits: int) -> tuple[str, int]:
    """Correctly rounded (signed digit string, decimal exponent).

    Value = +-0.<digits> * 10^exp10.  MPFR's get_str needs digits >= 2; the
    one-digit case is rendered at 2 and re-rounded by exact midpoint
    comparison so the single digit is still correctly rounded.
    """
    if gmpy2.is_zero(raw):
        return ("-" if raw.is_signed() else "") + "0" * digits, 0
    if digits >= 2:
        ds, e10, _ = raw.digits(10, digits)
        return ds, e10
    ds, e10, _ = raw.digits(10, 2)
    neg = ds.startswith("-")
    body = ds.lstrip("-")
    lead, nxt = int(body[0]), int(body[1])
    # round half to even on the leading digit, using the exact decimal value
    # of the two-digit rendering as a proxy is unsafe; compare |raw| to the
    # midpoint lead.5 * 10^(e10-1) exactly via mpq
    mid = gmpy2.mpq(2 * lead + 1, 2) * gmpy2.mpq(10) ** (e10 - 1)
    a = abs(raw)
    if a > mid or (a == mid and lead % 2 == 1):
        lead += 1
        if lead == 10:
            lead, e10 = 1, e10 + 1
    return ("-" if neg else "") + str(lead), e10


def render_decimal(v: BigReal, digits: int) -> str:
    """Correctly rounded decimal string with exactly `digits` significant digits.

    Plain notation when the exponent is small, otherwise d.ddd...e+-E.
    """
    if digits < 1:
        raise RenderError(f"digits must be >= 1, got {digits}")
    if digits > v.ctx.decimal_digits:
        raise RenderError(
            f"requested {digits} digits from a {v.ctx.decimal_digits}-digit context"
        )
    ds, e10 = mantissa_exp10(v.raw, digits)
    neg = ds.startswith("-")
    body = ds.lstrip("-")
    if v.is_zero():
        txt = "0." + "0" * (digits - 1) if digits > 1 else "0"
        return ("-" if neg else "") + txt
    sign = "-" if neg else ""
    if -4 < e10 <= digits:
        if e10 <= 0:
            txt = "0." + "0" * (-e10) + body
        elif e10 >= len(body):
            txt = body + "0" * (e10 - len(body))
        else:
            txt = body[:e10] + "." + body[e10:]
        return sign + txt
    mant = body[0] + ("." + body[1:] if len(body) > 1 else "")
    return f"{sign}{mant}e{e10 - 1:+d}".replace("e+", "e+").replace("e-", "e-")


def log10_abs(raw: "gmpy2.mpfr") -> float:
    """log10 |raw| as a float, safe for values far outside float range."""
    if gmpy2.is_zero(raw):
        raise ValueError("log10 of zero")
    import math

    ds, e10 = mantissa_exp10(raw, 8)
    frac = int(ds.lstrip("-")) / 10**8
    return e10 + math.log10(frac)
