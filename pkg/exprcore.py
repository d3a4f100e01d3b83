"""
Exact Symbolic Expression Engine

Multivariate polynomials with exact rational coefficients over a fixed,
truncated jet space (x, t, T and the derivatives of T up to the differential
consequence T_xxx) and a closed set of named commuting constants.

Division by alpha and by the conductivity is represented by the constants
alpha_inv and kcond_inv; the relations alpha*alpha_inv = 1 and
kcond*kcond_inv = 1 are applied during normalization, so every Expr has a
single canonical form and equality is exact.

Grammar accepted by parse_expr and emitted by to_text:
    expr   := term (('+' | '-') term)*
    term   := unary ('*' unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' INTEGER)?
    atom   := INTEGER ('/' INTEGER)? | NAME | '(' expr ')'
"""

import re
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Union

from errors import ExprSyntaxError, InvalidExponent, JetOverflow, UnknownIdentifier


COORDINATES: tuple[str, ...] = (
    "x", "t", "T", "T_x", "T_t", "T_xx", "T_xt", "T_tt", "T_xxx",
)
CONSTANTS: tuple[str, ...] = (
    "alpha", "alpha_inv", "kcond", "kcond_inv", "T_i", "T_s", "q0pp",
    "k1", "k2", "k3", "k4", "k5", "k6",
)
# Global symbol order; canonical printing is lexicographic over it.
SYMBOLS: tuple[str, ...] = COORDINATES + CONSTANTS
BASE_COORDINATES: frozenset[str] = frozenset({"x", "t", "T"})
JET_COORDINATES: frozenset[str] = frozenset(COORDINATES) - BASE_COORDINATES

_INDEX = {name: i for i, name in enumerate(SYMBOLS)}
_NSYM = len(SYMBOLS)
_ONE: tuple[int, ...] = (0,) * _NSYM
_INVERSE_PAIRS = (
    (_INDEX["alpha"], _INDEX["alpha_inv"]),
    (_INDEX["kcond"], _INDEX["kcond_inv"]),
)
_UNIT_SYMBOLS = frozenset(idx for pair in _INVERSE_PAIRS for idx in pair)

# Total-derivative successors inside the truncated jet space.
_SUCCESSOR = {
    "x": {"T": "T_x", "T_x": "T_xx", "T_t": "T_xt", "T_xx": "T_xxx"},
    "t": {"T": "T_t", "T_x": "T_xt", "T_t": "T_tt"},
}
_NO_SUCCESSOR = {
    "x": ("T_xt", "T_tt", "T_xxx"),
    "t": ("T_xx", "T_xt", "T_tt", "T_xxx"),
}

Monomial = tuple[int, ...]
Scalar = Union[int, Fraction]


def _reduce_monomial(mono: Monomial) -> Monomial:
    """Apply the inverse-pair relations to a single exponent vector."""
    for a, b in _INVERSE_PAIRS:
        common = min(mono[a], mono[b])
        if common:
            mono = list(mono)
            mono[a] -= common
            mono[b] -= common
            mono = tuple(mono)
    return mono


def _normalize(terms: Iterable[tuple[Monomial, Fraction]]) -> dict[Monomial, Fraction]:
    out: dict[Monomial, Fraction] = {}
    for mono, coeff in terms:
        if not coeff:
            continue
        key = _reduce_monomial(mono)
        out[key] = out.get(key, Fraction(0)) + coeff
    return {m: c for m, c in out.items() if c}


class Expr:
    """Immutable canonical polynomial; see module docstring for the symbol set."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None):
        items = ((tuple(m), Fraction(c)) for m, c in (terms or {}).items())
        self._terms = _normalize(items)
        self._hash = None

    @classmethod
    def _canonical(cls, terms: dict[Monomial, Fraction]) -> "Expr":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return MappingProxyType(self._terms)

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        merged = dict(self._terms)
        for mono, coeff in other._terms.items():
            merged[mono] = merged.get(mono, Fraction(0)) + coeff
        return Expr._canonical({m: c for m, c in merged.items() if c})

    __radd__ = __add__

    def __neg__(self):
        return Expr._canonical({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        products = (
            (tuple(a + b for a, b in zip(m1, m2)), c1 * c2)
            for m1, c1 in self._terms.items()
            for m2, c2 in other._terms.items()
        )
        return Expr._canonical(_normalize(products))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if other == 0:
                raise ZeroDivisionError("division of an Expr by zero")
            inv = 1 / Fraction(other)
            return Expr._canonical({m: c * inv for m, c in self._terms.items()})
        return NotImplemented

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            raise InvalidExponent(f"exponent must be a nonnegative integer, got {exponent!r}")
        result, base = ONE, self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    # -- comparison -------------------------------------------------------

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def __str__(self):
        return to_text(self)

    def __repr__(self):
        return f"Expr({to_text(self)!r})"


def _coerce(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return const(value)
    return NotImplemented


ZERO = Expr._canonical({})
ONE = Expr._canonical({_ONE: Fraction(1)})


def const(value: Scalar) -> Expr:
    """Constant Expr with an exact rational value."""
    value = Fraction(value)
    return Expr._canonical({_ONE: value} if value else {})


def symbol(name: str) -> Expr:
    """Expr for a single coordinate or constant."""
    idx = _symbol_index(name)
    mono = [0] * _NSYM
    mono[idx] = 1
    return Expr._canonical({tuple(mono): Fraction(1)})


def _symbol_index(target: Union[str, Expr]) -> int:
    if isinstance(target, Expr):
        if len(target._terms) == 1:
            (mono, coeff), = target._terms.items()
            if coeff == 1 and sum(mono) == 1:
                return mono.index(1)
        raise ValueError(f"{target} is not a single symbol")
    try:
        return _INDEX[target]
    except KeyError:
        raise UnknownIdentifier(target) from None


# ---------------------------------------------------------------------------
# Parsing and printing
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        match = _TOKEN.match(text, pos)
        if not match:
            bad = len(text) - len(text[pos:].lstrip())
            raise ExprSyntaxError(f"unexpected character {text[bad]!r}", bad)
        kind = match.lastgroup
        tokens.append((kind, match.group(kind), match.start(kind)))
        pos = match.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, pos = self.take()
        if text != value or kind != "op":
            raise ExprSyntaxError(f"expected '{value}'", pos)

    def parse(self) -> Expr:
        result = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {text!r}", pos)
        return result

    def expr(self) -> Expr:
        result = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            result = result + rhs if op == "+" else result - rhs
        return result

    def term(self) -> Expr:
        result = self.unary()
        while True:
            kind, text, pos = self.peek()
            if kind == "op" and text == "*":
                self.take()
                result = result * self.unary()
            elif kind in ("num", "name") or (kind == "op" and text == "("):
                raise ExprSyntaxError("implicit multiplication is not allowed", pos)
            elif kind == "op" and text == "/":
                raise ExprSyntaxError("'/' is only allowed inside rational literals p/q", pos)
            else:
                return result

    def unary(self) -> Expr:
        kind, text, _ = self.peek()
        if kind == "op" and text in ("+", "-"):
            self.take()
            operand = self.unary()
            return operand if text == "+" else -operand
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.take()
            kind, text, pos = self.take()
            if kind == "op" and text == "-":
                raise InvalidExponent(f"negative exponent at position {pos}")
            if kind != "num":
                raise InvalidExponent(f"exponent must be a nonnegative integer literal at position {pos}")
            nxt_kind, nxt_text, _ = self.peek()
            if "." in text or (nxt_kind == "op" and nxt_text == "/"):
                raise InvalidExponent(f"non-integer exponent at position {pos}")
            return base ** int(text)
        return base

    def atom(self) -> Expr:
        kind, text, pos = self.take()
        if kind == "num":
            if "." in text:
                raise ExprSyntaxError("decimal literals are not supported, use p/q", pos)
            value = Fraction(int(text))
            nxt_kind, nxt_text, _ = self.peek()
            if nxt_kind == "op" and nxt_text == "/":
                self.take()
                den_kind, den_text, den_pos = self.take()
                if den_kind != "num" or "." in den_text:
                    raise ExprSyntaxError("expected integer denominator", den_pos)
                if int(den_text) == 0:
                    raise ExprSyntaxError("zero denominator", den_pos)
                value = value / int(den_text)
            return const(value)
        if kind == "name":
            if text not in _INDEX:
                raise UnknownIdentifier(text, pos)
            return symbol(text)
        if kind == "op" and text == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        if kind == "end":
            raise ExprSyntaxError("unexpected end of input", pos)
        raise ExprSyntaxError(f"unexpected token {text!r}", pos)


def parse_expr(text: str) -> Expr:
    """Parse expression text into its canonical Expr."""
    return _Parser(text).parse()


def _format_rational(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def to_text(e: Expr) -> str:
    """Deterministic printer emitting the parse_expr grammar."""
    if not e._terms:
        return "0"
    parts = []
    for mono in sorted(e._terms, reverse=True):
        coeff = e._terms[mono]
        factors = [
            name if exp == 1 else f"{name}^{exp}"
            for name, exp in zip(SYMBOLS, mono)
            if exp
        ]
        magnitude = abs(coeff)
        if not factors:
            body = _format_rational(magnitude)
        elif magnitude == 1:
            body = "*".join(factors)
        else:
            body = "*".join([_format_rational(magnitude)] + factors)
        if not parts:
            parts.append(f"-{body}" if coeff < 0 else body)
        else:
            parts.append(f" - {body}" if coeff < 0 else f" + {body}")
    return "".join(parts)


# ---------------------------------------------------------------------------
# Calculus and substitution
# ---------------------------------------------------------------------------

def differentiate(e: Expr, v: Union[str, Expr]) -> Expr:
    """Formal partial derivative; every other symbol is independent."""
    idx = _symbol_index(v)
    out: dict[Monomial, Fraction] = {}
    for mono, coeff in e._terms.items():
        power = mono[idx]
        if power:
            lowered = list(mono)
            lowered[idx] -= 1
            out[tuple(lowered)] = coeff * power
    return Expr._canonical(out)


def total_derivative(e: Expr, direction: str) -> Expr:
    """Total derivative D_x or D_t of an expression on the jet space."""
    if direction not in _SUCCESSOR:
        raise ValueError(f"direction must be 'x' or 't', got {direction!r}")
    used = free_symbols(e)
    for name in _NO_SUCCESSOR[direction]:
        if name in used:
            raise JetOverflow(name, direction)
    result = differentiate(e, direction)
    for source, target in _SUCCESSOR[direction].items():
        if source in used:
            result = result + symbol(target) * differentiate(e, source)
    return result


def substitute(e: Expr, bindings: Sequence[tuple[Union[str, Expr], Union[Expr, Scalar]]]) -> Expr:
    """Simultaneously replace symbols by expressions and renormalize."""
    table: dict[int, Expr] = {}
    for target, value in bindings:
        idx = _symbol_index(target)
        if idx in table:
            raise ValueError(f"duplicate substitution target {SYMBOLS[idx]}")
        value = _coerce(value)
        if value is NotImplemented:
            raise TypeError(f"cannot substitute {value!r}")
        table[idx] = value
    if not table:
        return e

    powers: dict[tuple[int, int], Expr] = {}
    collected: list[tuple[Monomial, Fraction]] = []
    for mono, coeff in e._terms.items():
        kept = list(mono)
        factor = ONE
        for idx, value in table.items():
            p = mono[idx]
            if p:
                kept[idx] = 0
                key = (idx, p)
                if key not in powers:
                    powers[key] = value ** p
                factor = factor * powers[key]
        kept = tuple(kept)
        for fmono, fcoeff in factor._terms.items():
            collected.append((tuple(a + b for a, b in zip(kept, fmono)), coeff * fcoeff))
    return Expr._canonical(_normalize(collected))


def is_zero(e: Expr) -> bool:
    """Exact zero test on the canonical form."""
    return not e._terms


# ---------------------------------------------------------------------------
# Inspection helpers
# ---------------------------------------------------------------------------

def free_symbols(e: Expr) -> frozenset[str]:
    used = set()
    for mono in e._terms:
        used.update(SYMBOLS[i] for i, p in enumerate(mono) if p)
    return frozenset(used)


def depends_on(e: Expr, names: Iterable[str]) -> bool:
    return not free_symbols(e).isdisjoint(names)


def as_rational(e: Expr) -> Fraction:
    """Value of a constant Expr; raises ValueError when symbols remain."""
    if not e._terms:
        return Fraction(0)
    if len(e._terms) == 1 and _ONE in e._terms:
        return e._terms[_ONE]
    raise ValueError(f"{e} is not a rational constant")


def evaluate(e: Expr, values: Mapping[str, float]) -> float:
    """Floating-point value of e; every free symbol needs an entry in values."""
    missing = free_symbols(e) - set(values)
    if missing:
        raise ValueError(f"no value for {', '.join(sorted(missing))}")
    total = 0.0
    for mono, coeff in e._terms.items():
        term = float(coeff)
        for name, p in zip(SYMBOLS, mono):
            if p:
                term *= float(values[name]) ** p
        total += term
    return total


def coefficients(e: Expr, over: Sequence[str]) -> dict[tuple[int, ...], Expr]:
    """Split e by monomials in the symbols `over`; values are the cofactors."""
    indices = [_symbol_index(name) for name in over]
    grouped: dict[tuple[int, ...], dict[Monomial, Fraction]] = {}
    for mono, coeff in e._terms.items():
        key = tuple(mono[i] for i in indices)
        rest = list(mono)
        for i in indices:
            rest[i] = 0
        grouped.setdefault(key, {})[tuple(rest)] = coeff
    return {key: Expr._canonical(terms) for key, terms in grouped.items()}


def linear_form(e: Expr, unknowns: Sequence[str]) -> tuple[list[Expr], Expr]:
    """Coefficients of e as an affine function of the unknowns, plus its constant part."""
    parts = coefficients(e, unknowns)
    n = len(unknowns)
    coeffs = [ZERO] * n
    constant = ZERO
    for key, cofactor in parts.items():
        degree = sum(key)
        if degree == 0:
            constant = cofactor
        elif degree == 1:
            coeffs[key.index(1)] = cofactor
        else:
            raise ValueError(f"{e} is not linear in {', '.join(unknowns)}")
    return coeffs, constant


def is_unit(e: Expr) -> bool:
    """True for c * (invertible constants)^k monomials, the units of the ring."""
    if len(e._terms) != 1:
        return False
    (mono, _), = e._terms.items()
    return all(p == 0 or i in _UNIT_SYMBOLS for i, p in enumerate(mono))


def unit_inverse(e: Expr) -> Expr:
    if not is_unit(e):
        raise ValueError(f"{e} is not invertible in the polynomial ring")
    (mono, coeff), = e._terms.items()
    inverse = list(_ONE)
    for a, b in _INVERSE_PAIRS:
        inverse[a], inverse[b] = mono[b], mono[a]
    return Expr._canonical({tuple(inverse): 1 / coeff})
