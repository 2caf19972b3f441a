"""Concrete syntax: formula parser/printer and the presentation file format.

The formula surface syntax is ASCII-only so files stay portable:

    C x = y . (-1 <= x & x <= 3)        counting quantifier
    E z . x = 2*z                       existential, A for universal
    x + z = 4*y ,  2*x + 1 == 0 mod 3   comparison and congruence atoms
    & | ! -> <->                        connectives (-> and <-> desugar)

Precedence from loose to tight: <-> , -> , | , & , unary.  A quantifier
body extends through exactly one unary item; parenthesise for more.

Presentation files are line oriented: a header (``domain Z|N``, ``dim n``,
optional ``disjoint``/``simple`` flags) followed by components, each a
``component`` line, one ``base`` line and any number of ``period`` lines.
``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Sequence

from . import formula as fm
from .errors import CountQEError, ParameterError
from .formula import (
    And,
    Cong,
    CountEq,
    Eq,
    Exists,
    FalseF,
    Forall,
    Formula,
    Le,
    Lt,
    Not,
    Or,
    Term,
    TrueF,
    conj,
    disj,
    iff,
    implies,
)
from .sets import DomainTag, LinearSetPresentation, SemilinearPresentation


@dataclass(frozen=True)
class SourceSpan:
    begin: int
    end: int
    line: int
    column: int


class ParseError(CountQEError):
    """Syntax error with a span into the offending input."""

    def __init__(self, message: str, span: SourceSpan, expected: str = ""):
        location = f"line {span.line}, column {span.column}: {message}"
        if expected:
            location += f" (expected {expected})"
        super().__init__(location)
        self.message = message
        self.span = span
        self.expected = expected


_KEYWORDS = {"true", "false", "mod"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<int>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><->|->|<=|>=|==|<|>|=|&|\||!|\+|-|\*|\(|\)|\.)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # "int" | "ident" | "op" | "keyword" | "end"
    text: str
    span: SourceSpan


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            span = SourceSpan(pos, pos + 1, line, pos - line_start + 1)
            raise ParseError(f"unexpected character {text[pos]!r}", span)
        kind = match.lastgroup
        value = match.group()
        if kind == "ws":
            line += value.count("\n")
            if "\n" in value:
                line_start = match.start() + value.rfind("\n") + 1
            pos = match.end()
            continue
        span = SourceSpan(match.start(), match.end(), line, match.start() - line_start + 1)
        if kind == "ident" and value in _KEYWORDS:
            kind = "keyword"
        tokens.append(_Token(kind, value, span))
        pos = match.end()
    end_span = SourceSpan(len(text), len(text), line, len(text) - line_start + 1)
    tokens.append(_Token("end", "", end_span))
    return tokens


class _FormulaParser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self, ahead: int = 0) -> _Token:
        idx = min(self.pos + ahead, len(self.tokens) - 1)
        return self.tokens[idx]

    def advance(self) -> _Token:
        token = self.tokens[self.pos]
        if token.kind != "end":
            self.pos += 1
        return token

    def error(self, message: str, expected: str = "") -> ParseError:
        return ParseError(message, self.peek().span, expected)

    def expect_op(self, op: str) -> _Token:
        token = self.peek()
        if token.kind != "op" or token.text != op:
            raise self.error(f"found {token.text!r}" if token.text else "unexpected end of input", f"'{op}'")
        return self.advance()

    def expect_ident(self) -> _Token:
        token = self.peek()
        if token.kind != "ident":
            raise self.error(
                f"found {token.text!r}" if token.text else "unexpected end of input",
                "identifier",
            )
        return self.advance()

    # grammar: formula := iff ; iff := impl ("<->" impl)*
    def parse_formula(self) -> Formula:
        left = self.parse_impl()
        while self.peek().kind == "op" and self.peek().text == "<->":
            self.advance()
            right = self.parse_impl()
            left = iff(left, right)
        return left

    def parse_impl(self) -> Formula:
        left = self.parse_disj()
        if self.peek().kind == "op" and self.peek().text == "->":
            self.advance()
            right = self.parse_impl()  # right associative
            return implies(left, right)
        return left

    def parse_disj(self) -> Formula:
        parts = [self.parse_conj()]
        while self.peek().kind == "op" and self.peek().text == "|":
            self.advance()
            parts.append(self.parse_conj())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def parse_conj(self) -> Formula:
        parts = [self.parse_unary()]
        while self.peek().kind == "op" and self.peek().text == "&":
            self.advance()
            parts.append(self.parse_unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def _at_quantifier(self) -> bool:
        head = self.peek()
        if head.kind != "ident" or head.text not in ("E", "A", "C"):
            return False
        if head.text in ("E", "A"):
            return (
                self.peek(1).kind == "ident"
                and self.peek(2).kind == "op"
                and self.peek(2).text == "."
            )
        return (
            self.peek(1).kind == "ident"
            and self.peek(2).kind == "op"
            and self.peek(2).text == "="
            and self.peek(3).kind == "ident"
            and self.peek(4).kind == "op"
            and self.peek(4).text == "."
        )

    def parse_unary(self) -> Formula:
        token = self.peek()
        if token.kind == "op" and token.text == "!":
            self.advance()
            return Not(self.parse_unary())
        if token.kind == "op" and token.text == "(":
            self.advance()
            inner = self.parse_formula()
            self.expect_op(")")
            return inner
        if token.kind == "keyword" and token.text == "true":
            self.advance()
            return fm.TRUE
        if token.kind == "keyword" and token.text == "false":
            self.advance()
            return fm.FALSE
        if self._at_quantifier():
            kind = self.advance().text
            bound = self.expect_ident().text
            if kind == "C":
                self.expect_op("=")
                count_var = self.expect_ident().text
                self.expect_op(".")
                body = self.parse_unary()
                return CountEq(bound, count_var, body)
            self.expect_op(".")
            body = self.parse_unary()
            return Exists(bound, body) if kind == "E" else Forall(bound, body)
        return self.parse_atom()

    def parse_atom(self) -> Formula:
        left = self.parse_term()
        token = self.peek()
        if token.kind != "op" or token.text not in ("<=", "<", "=", ">=", ">", "=="):
            raise self.error(
                f"found {token.text!r}" if token.text else "unexpected end of input",
                "comparison operator",
            )
        op = self.advance().text
        if op == "==":
            residue = self.parse_integer()
            key = self.peek()
            if key.kind != "keyword" or key.text != "mod":
                raise self.error(f"found {key.text!r}", "'mod'")
            self.advance()
            mod_token = self.peek()
            modulus = self.parse_integer()
            if modulus < 1:
                raise ParseError("modulus must be positive", mod_token.span)
            return Cong(left, residue, modulus)
        right = self.parse_term()
        if op == "<=":
            return Le(left, right)
        if op == "<":
            return Lt(left, right)
        if op == "=":
            return Eq(left, right)
        if op == ">=":
            return Le(right, left)
        return Lt(right, left)

    def parse_integer(self) -> int:
        negative = False
        if self.peek().kind == "op" and self.peek().text == "-":
            self.advance()
            negative = True
        token = self.peek()
        if token.kind != "int":
            raise self.error(
                f"found {token.text!r}" if token.text else "unexpected end of input",
                "integer",
            )
        self.advance()
        value = int(token.text)
        return -value if negative else value

    def parse_term(self) -> Term:
        total = self._parse_addend(negative=self._take_minus())
        while True:
            token = self.peek()
            if token.kind == "op" and token.text in ("+", "-"):
                self.advance()
                total = total + self._parse_addend(negative=token.text == "-")
            else:
                return total

    def _take_minus(self) -> bool:
        if self.peek().kind == "op" and self.peek().text == "-":
            self.advance()
            return True
        return False

    def _parse_addend(self, negative: bool) -> Term:
        token = self.peek()
        sign = -1 if negative else 1
        if token.kind == "int":
            self.advance()
            value = int(token.text)
            if self.peek().kind == "op" and self.peek().text == "*":
                self.advance()
                name = self.expect_ident().text
                return Term(0, {name: sign * value})
            return Term(sign * value)
        if token.kind == "ident":
            self.advance()
            return Term(0, {token.text: sign})
        raise self.error(
            f"found {token.text!r}" if token.text else "unexpected end of input",
            "integer or identifier",
        )


def parse_formula(text: str) -> Formula:
    """Parse the formula surface syntax; raises :class:`ParseError`."""
    parser = _FormulaParser(text)
    try:
        result = parser.parse_formula()
    except ParameterError as exc:
        raise ParseError(str(exc), parser.peek().span) from exc
    tail = parser.peek()
    if tail.kind != "end":
        raise parser.error(f"trailing input {tail.text!r}")
    return result


# --- printing -----------------------------------------------------------------

_LEVEL_OR = 1
_LEVEL_AND = 2
_LEVEL_UNARY = 3


def _print_term(t: Term, unicode_mode: bool = False) -> str:
    pieces = []
    for name in sorted(t.coeffs):
        pieces.append((t.coeffs[name], name))
    out = []
    for value, name in pieces:
        magnitude = abs(value)
        body = name if magnitude == 1 else f"{magnitude}*{name}"
        if not out:
            out.append(f"-{body}" if value < 0 else body)
        else:
            out.append(f"- {body}" if value < 0 else f"+ {body}")
    if t.constant or not pieces:
        value = t.constant
        if not out:
            out.append(str(value))
        else:
            out.append(f"- {abs(value)}" if value < 0 else f"+ {value}")
    return " ".join(out)


def _print(f: Formula, level: int, u: bool) -> str:
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, Le):
        op = " ≤ " if u else " <= "
        return _print_term(f.lhs, u) + op + _print_term(f.rhs, u)
    if isinstance(f, Lt):
        return _print_term(f.lhs, u) + " < " + _print_term(f.rhs, u)
    if isinstance(f, Eq):
        return _print_term(f.lhs, u) + " = " + _print_term(f.rhs, u)
    if isinstance(f, Cong):
        if u:
            return f"{_print_term(f.term, u)} ≡ {f.residue} (mod {f.modulus})"
        return f"{_print_term(f.term, u)} == {f.residue} mod {f.modulus}"
    if isinstance(f, Not):
        mark = "¬" if u else "!"
        return mark + _print(f.body, _LEVEL_UNARY, u)
    if isinstance(f, And):
        sep = " ∧ " if u else " & "
        body = sep.join(_print(p, _LEVEL_AND, u) for p in f.parts)
        return f"({body})" if level > _LEVEL_AND else body
    if isinstance(f, Or):
        sep = " ∨ " if u else " | "
        body = sep.join(_print(p, _LEVEL_OR + 1, u) for p in f.parts)
        return f"({body})" if level > _LEVEL_OR else body
    if isinstance(f, Exists):
        head = f"∃{f.var}. " if u else f"E {f.var} . "
        return head + _print(f.body, _LEVEL_UNARY, u)
    if isinstance(f, Forall):
        head = f"∀{f.var}. " if u else f"A {f.var} . "
        return head + _print(f.body, _LEVEL_UNARY, u)
    if isinstance(f, CountEq):
        if u:
            head = f"∃^={f.count_var} {f.counted_var}. "
        else:
            head = f"C {f.counted_var} = {f.count_var} . "
        return head + _print(f.body, _LEVEL_UNARY, u)
    raise TypeError(f"not a formula: {f!r}")


def print_formula(f: Formula, unicode_mode: bool = False) -> str:
    """Render a formula.

    The default ASCII form roundtrips through :func:`parse_formula` to a
    structurally identical AST; the unicode form is display-only.
    """
    return _print(f, 0, unicode_mode)


# --- presentation files ---------------------------------------------------------


def _line_span(offset: int, line_text: str, line_no: int) -> SourceSpan:
    return SourceSpan(offset, offset + len(line_text), line_no, 1)


def parse_presentation(text: str) -> SemilinearPresentation:
    """Parse the line-oriented presentation format; raises :class:`ParseError`."""
    domain: Optional[DomainTag] = None
    dim: Optional[int] = None
    disjoint = False
    simple = False
    components: list[LinearSetPresentation] = []
    current_base: Optional[tuple[int, ...]] = None
    current_periods: list[tuple[int, ...]] = []
    in_component = False
    header_done = False

    def flush(span: SourceSpan):
        nonlocal current_base, current_periods
        if not in_component:
            return
        if current_base is None:
            raise ParseError("component without a base line", span)
        try:
            components.append(
                LinearSetPresentation(
                    base=current_base,
                    periods=tuple(current_periods),
                    domain=domain,
                )
            )
        except (ParameterError, CountQEError) as exc:
            raise ParseError(str(exc), span) from exc
        current_base = None
        current_periods = []

    def parse_vector(args: Sequence[str], span: SourceSpan) -> tuple[int, ...]:
        values = []
        for piece in args:
            try:
                values.append(int(piece))
            except ValueError:
                raise ParseError(f"not an integer: {piece!r}", span) from None
        if dim is not None and len(values) != dim:
            raise ParseError(
                f"expected {dim} integers, found {len(values)}", span
            )
        return tuple(values)

    offset = 0
    line_no = 0
    last_span = SourceSpan(0, 0, 1, 1)
    for raw in text.splitlines():
        line_no += 1
        span = _line_span(offset, raw, line_no)
        offset += len(raw) + 1
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        last_span = span
        keyword, *args = line.split()
        if keyword == "domain":
            if header_done or domain is not None:
                raise ParseError("domain line out of place", span)
            if args not in (["Z"], ["N"]):
                raise ParseError("domain must be Z or N", span)
            domain = DomainTag(args[0])
        elif keyword == "dim":
            if header_done or dim is not None:
                raise ParseError("dim line out of place", span)
            if len(args) != 1 or not args[0].isdigit() or int(args[0]) < 1:
                raise ParseError("dim needs one positive integer", span)
            dim = int(args[0])
        elif keyword == "disjoint":
            if header_done:
                raise ParseError("flags belong in the header", span)
            disjoint = True
        elif keyword == "simple":
            if header_done:
                raise ParseError("flags belong in the header", span)
            simple = True
        elif keyword == "component":
            if domain is None or dim is None:
                raise ParseError("component before domain/dim header", span)
            if args:
                raise ParseError("component line takes no arguments", span)
            flush(span)
            header_done = True
            in_component = True
        elif keyword == "base":
            if not in_component:
                raise ParseError("base line outside a component", span)
            if current_base is not None:
                raise ParseError("component with two base lines", span)
            current_base = parse_vector(args, span)
        elif keyword == "period":
            if not in_component or current_base is None:
                raise ParseError("period line before the component's base", span)
            current_periods.append(parse_vector(args, span))
        else:
            raise ParseError(f"unknown keyword {keyword!r}", span)
    flush(last_span)
    if domain is None or dim is None:
        raise ParseError("missing domain/dim header", last_span)
    if not components:
        raise ParseError("presentation without components", last_span)
    return SemilinearPresentation(
        components=tuple(components),
        asserted_disjoint=disjoint,
        asserted_simple=simple,
    )


def print_presentation(presentation: SemilinearPresentation) -> str:
    """Render a presentation; roundtrips through :func:`parse_presentation`."""
    lines = [
        f"domain {presentation.domain.value}",
        f"dim {presentation.dimension}",
    ]
    if presentation.asserted_disjoint:
        lines.append("disjoint")
    if presentation.asserted_simple:
        lines.append("simple")
    for comp in presentation.components:
        lines.append("component")
        lines.append("base " + " ".join(str(v) for v in comp.base))
        for period in comp.periods:
            lines.append("period " + " ".join(str(v) for v in period))
    return "\n".join(lines) + "\n"
