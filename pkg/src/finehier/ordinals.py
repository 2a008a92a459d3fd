"""Ordinals below epsilon_0 in Cantor normal form.

An ordinal is a descending tuple of ``(exponent, coefficient)`` terms where
each exponent is itself an :class:`Ordinal`.  The empty tuple is zero.
Values are immutable and hashable; canonicity makes ``==`` structural.

Text syntax: ``w^w*2 + w*3 + 1``; compound exponents go in braces,
``w^{w+1}``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import total_ordering
from typing import Iterator, Tuple, Union

Term = Tuple["Ordinal", int]


class OrdinalSyntaxError(ValueError):
    pass


@total_ordering
@dataclass(frozen=True)
class Ordinal:
    terms: Tuple[Term, ...] = ()

    def __post_init__(self) -> None:
        prev = None
        for exp, coef in self.terms:
            if not isinstance(exp, Ordinal):
                raise TypeError(f"exponent must be an Ordinal, got {exp!r}")
            if not isinstance(coef, int) or coef < 1:
                raise ValueError(f"coefficient must be a positive integer, got {coef!r}")
            if prev is not None and ord_compare(prev, exp) <= 0:
                raise ValueError("exponents must be strictly descending")
            prev = exp

    @classmethod
    def of(cls, n: int) -> Ordinal:
        if n < 0:
            raise ValueError("ordinals are non-negative")
        return cls(((ZERO, n),)) if n else ZERO

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_finite(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0].is_zero)

    def __int__(self) -> int:
        if not self.is_finite:
            raise ValueError(f"{self} is infinite")
        return self.terms[0][1] if self.terms else 0

    @property
    def leading_exponent(self) -> Ordinal:
        if not self.terms:
            raise ValueError("zero has no leading exponent")
        return self.terms[0][0]

    def __lt__(self, other: object) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return ord_compare(self, other) < 0

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int) and not isinstance(other, bool):
            return self.is_finite and int(self) == other
        if isinstance(other, Ordinal):
            return self.terms == other.terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.terms)

    def __add__(self, other: Union[Ordinal, int]) -> Ordinal:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return ord_add(self, other)

    def __radd__(self, other: int) -> Ordinal:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return ord_add(other, self)

    def __mul__(self, other: Union[Ordinal, int]) -> Ordinal:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return ord_mul(self, other)

    def __rmul__(self, other: int) -> Ordinal:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return ord_mul(other, self)

    def __str__(self) -> str:
        return format_ordinal(self)

    def __repr__(self) -> str:
        return f"Ordinal({format_ordinal(self)!r})"


def _coerce(x: object):
    if isinstance(x, Ordinal):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return Ordinal.of(x)
    return NotImplemented


ZERO = Ordinal()
ONE = Ordinal(((ZERO, 1),))
OMEGA = Ordinal(((ONE, 1),))


def ord_compare(a: Ordinal, b: Ordinal) -> int:
    """Return -1, 0 or 1.  Lexicographic on the term lists."""
    for (ea, ca), (eb, cb) in zip(a.terms, b.terms):
        c = ord_compare(ea, eb)
        if c:
            return c
        if ca != cb:
            return -1 if ca < cb else 1
    return (len(a.terms) > len(b.terms)) - (len(a.terms) < len(b.terms))


def ord_add(a: Ordinal, b: Ordinal) -> Ordinal:
    if b.is_zero:
        return a
    lead, lead_coef = b.terms[0]
    kept = []
    for exp, coef in a.terms:
        c = ord_compare(exp, lead)
        if c > 0:
            kept.append((exp, coef))
        elif c == 0:
            lead_coef += coef
            break
        else:
            break
    return Ordinal(tuple(kept) + ((lead, lead_coef),) + b.terms[1:])


def ord_mul(a: Ordinal, b: Ordinal) -> Ordinal:
    if a.is_zero or b.is_zero:
        return ZERO
    lead, lead_coef = a.terms[0]
    result = ZERO
    for exp, coef in b.terms:
        if exp.is_zero:
            # a * n: only the leading coefficient scales
            part = Ordinal(((lead, lead_coef * coef),) + a.terms[1:])
        else:
            part = Ordinal(((ord_add(lead, exp), coef),))
        result = ord_add(result, part)
    return result


def omega_pow(a: Ordinal) -> Ordinal:
    return Ordinal(((a, 1),))


def omega_tower(n: int) -> Ordinal:
    """w^w^...^w with ``n`` omegas; ``omega_tower(0) == 1``."""
    x = ONE
    for _ in range(n):
        x = omega_pow(x)
    return x


def base_level_index(n: int) -> Ordinal:
    """Index alpha of the fine-hierarchy level that coincides with base level n.

    Level 0 is S_1, level 1 is S_w, level 2 is S_{w^w}, and so on.
    """
    return omega_tower(n)


# -- text syntax ------------------------------------------------------------

def format_ordinal(a: Ordinal) -> str:
    if a.is_zero:
        return "0"
    return " + ".join(_format_term(e, c) for e, c in a.terms)


def _format_term(exp: Ordinal, coef: int) -> str:
    if exp.is_zero:
        return str(coef)
    if exp == ONE:
        base = "w"
    elif exp.is_finite or exp == OMEGA:
        base = "w^" + format_ordinal(exp)
    else:
        base = "w^{" + format_ordinal(exp) + "}"
    return base if coef == 1 else f"{base}*{coef}"


_TOKEN = re.compile(r"\s*(?:(\d+)|(w|ω)|(\^|\*|\+|\{|\}))")


def _tokens(text: str) -> Iterator[str]:
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise OrdinalSyntaxError(f"unexpected character at {pos}: {text[pos:]!r}")
        pos = m.end()
        yield m.group(1) or ("w" if m.group(2) else m.group(3))


class _Parser:
    def __init__(self, text: str) -> None:
        self.toks = list(_tokens(text))
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expected=None) -> str:
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise OrdinalSyntaxError(f"expected {expected or 'token'}, got {tok!r}")
        self.i += 1
        return tok

    def expr(self) -> Ordinal:
        total = self.term()
        while self.peek() == "+":
            self.take()
            total = ord_add(total, self.term())
        return total

    def term(self) -> Ordinal:
        tok = self.take()
        if tok.isdigit():
            value = Ordinal.of(int(tok))
        elif tok == "w":
            exp = ONE
            if self.peek() == "^":
                self.take()
                exp = self.exponent()
            value = omega_pow(exp)
        else:
            raise OrdinalSyntaxError(f"unexpected token {tok!r}")
        while self.peek() == "*":
            self.take()
            value = ord_mul(value, self.factor())
        return value

    def factor(self) -> Ordinal:
        tok = self.take()
        if tok.isdigit():
            return Ordinal.of(int(tok))
        if tok == "w":
            return OMEGA
        raise OrdinalSyntaxError(f"expected a factor, got {tok!r}")

    def exponent(self) -> Ordinal:
        tok = self.take()
        if tok.isdigit():
            return Ordinal.of(int(tok))
        if tok == "w":
            return OMEGA
        if tok == "{":
            e = self.expr()
            self.take("}")
            return e
        raise OrdinalSyntaxError(f"bad exponent {tok!r}")


def parse_ordinal(text: str) -> Ordinal:
    p = _Parser(text)
    if p.peek() is None:
        raise OrdinalSyntaxError("empty ordinal")
    result = p.expr()
    if p.peek() is not None:
        raise OrdinalSyntaxError(f"trailing input at token {p.peek()!r}")
    return result
