"""Concrete syntax: expressions, formulas, world files, witness files, and printing.

Expressions::

    atom := #ident | !ident | ident | self | ( expr ) | (ref: expr, ...)
    expr := atom { . atom }                       (left associative)

Formulas, loosest first: ``=>`` (right associative), ``|``, ``&``, then
prefix ``!``.  Atoms are ``expr >= expr``, ``#k certs <unary>`` and
``false``.  A ``!`` immediately followed by an identifier character is a
global name (except ``!false``); otherwise it is negation, so a negated
containment over a local name is written ``!(n >= p)``.  A ``#`` not followed by an
identifier character starts a comment that runs to the end of the line.

World files hold one directive per line::

    keys #k1 #k2
    global !DNS = #kd
    cert #k: lampson >= #k1

Witness files add ``lna #k n = #k1 #k2`` and ``viewpoint #k``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, NamedTuple

from .core import (
    FALSE,
    SELF,
    And,
    Cert,
    Compound,
    Contains,
    Expr,
    Formula,
    GlobalName,
    Key,
    LocalName,
    LocalNameAssignment,
    Not,
    Self,
    World,
    chain,
    disjoin,
    implies,
)


class ErrorKind(str, Enum):
    UNEXPECTED_TOKEN = "UnexpectedToken"
    NAMESPACE_CLASH = "NamespaceClash"
    UNKNOWN_DIRECTIVE = "UnknownDirective"
    DANGLING_OPERATOR = "DanglingOperator"


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 1

    def __post_init__(self) -> None:
        if self.line < 1 or self.column < 1:
            raise ValueError("source positions are 1-based")


class ParseError(ValueError):
    def __init__(self, span: SourceSpan, kind: ErrorKind, message: str):
        if not message:
            raise ValueError("parse error message must be non-empty")
        super().__init__(f"{span.line}:{span.column}: {kind.value}: {message}")
        self.span = span
        self.kind = kind
        self.message = message


# -- lexer -----------------------------------------------------------------

_IDENT = r"[A-Za-z0-9_]+(?:-[A-Za-z0-9_]+)*"
_TOKEN_RE = re.compile(
    rf"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#(?![A-Za-z0-9_])[^\n]*)
  | (?P<key>\#{_IDENT})
  | (?P<global>!{_IDENT})
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*(?:-[A-Za-z0-9_]+)*)
  | (?P<op>>=|=>|[.()&|!,:=])
    """,
    re.VERBOSE,
)


class Token(NamedTuple):
    kind: str  # key, global, ident, op, eof
    text: str
    span: SourceSpan


def tokenize(text: str, line: int = 1, column: int = 1) -> list[Token]:
    """Tokens of a single logical line; newlines are treated as whitespace."""
    out: list[Token] = []
    pos = 0
    ln, col0 = line, column
    line_start = 0
    while pos < len(text):
        if text[pos] == "\n":
            ln += 1
            col0 = 1
            pos += 1
            line_start = pos
            continue
        m = _TOKEN_RE.match(text, pos)
        col = col0 + pos - line_start
        if not m:
            raise ParseError(
                SourceSpan(ln, col), ErrorKind.UNEXPECTED_TOKEN, f"unexpected character {text[pos]!r}"
            )
        kind = m.lastgroup
        if kind == "global" and m.group() == "!false":
            # negated constant rather than a global called false
            out.append(Token("op", "!", SourceSpan(ln, col)))
            out.append(Token("ident", "false", SourceSpan(ln, col + 1, 5)))
        elif kind not in ("ws", "comment"):
            out.append(Token(kind, m.group(), SourceSpan(ln, col, m.end() - pos)))
        pos = m.end()
    col = col0 + pos - line_start
    out.append(Token("eof", "", SourceSpan(ln, max(col, 1), 0)))
    return out


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, ahead: int = 1) -> Token:
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("op", "ident") and t.text == text

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.i += 1
        return t

    def fail(self, message: str, kind: ErrorKind = ErrorKind.UNEXPECTED_TOKEN, tok: Token | None = None):
        t = tok or self.tok
        if kind is ErrorKind.UNEXPECTED_TOKEN and t.kind == "eof":
            kind = ErrorKind.DANGLING_OPERATOR
            message += " (input ended)"
        raise ParseError(t.span, kind, message)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def expect_eof(self) -> None:
        if self.tok.kind != "eof":
            self.fail(f"unexpected {self.tok.text!r} after complete input")

    # expressions
    def expr(self) -> Expr:
        out = self.atom()
        while self.at("."):
            self.advance()
            out = Compound(out, self.atom())
        return out

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "key":
            self.advance()
            return _key(t)
        if t.kind == "global":
            self.advance()
            ident = t.text[1:]
            if ident == "self":
                self.fail("'self' cannot carry a global prefix", ErrorKind.NAMESPACE_CLASH, t)
            return GlobalName(ident)
        if t.kind == "ident":
            if t.text == "self":
                self.advance()
                return SELF
            if t.text in ("certs", "false"):
                self.fail(f"keyword {t.text!r} cannot be used as a name")
            if not (t.text[0].islower() or t.text[0] == "_"):
                self.fail(f"local names start with a lowercase letter, found {t.text!r}")
            self.advance()
            return LocalName(t.text)
        if self.at("("):
            self.advance()
            if self.at("ref") and self.peek().text == ":":
                self.advance()
                self.advance()
                parts: list[Expr] = []
                if not self.at(")"):
                    parts.append(self.expr())
                    while self.at(","):
                        self.advance()
                        parts.append(self.expr())
                self.expect(")")
                return chain(parts) if parts else SELF
            inner = self.expr()
            self.expect(")")
            return inner
        self.fail(f"expected a principal expression, found {t.text or 'end of input'!r}")

    # formulas
    def formula(self) -> Formula:
        left = self.disjunction()
        if self.at("=>"):
            self.advance()
            return implies(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        out = self.conjunction()
        while self.at("|"):
            self.advance()
            out = disjoin(out, self.conjunction())
        return out

    def conjunction(self) -> Formula:
        out = self.unary()
        while self.at("&"):
            self.advance()
            out = And(out, self.unary())
        return out

    def unary(self) -> Formula:
        if self.at("!"):
            self.advance()
            return Not(self.unary())
        return self.primary()

    def primary(self) -> Formula:
        if self.at("false"):
            self.advance()
            return FALSE
        if self.at("("):
            start = self.i
            try:
                e = self.expr()
            except ParseError:
                e = None
            if e is not None and (self.at(">=") or self.at("certs")):
                return self._after_expr(e, self.toks[start])
            self.i = start
            self.advance()
            inner = self.formula()
            self.expect(")")
            return inner
        start_tok = self.tok
        e = self.expr()
        return self._after_expr(e, start_tok)

    def _after_expr(self, e: Expr, start_tok: Token) -> Formula:
        if self.at("certs"):
            if not isinstance(e, Key):
                self.fail("only keys may certify a formula", ErrorKind.NAMESPACE_CLASH, start_tok)
            self.advance()
            return Cert(e, self.unary())
        if self.at(">="):
            self.advance()
            return Contains(e, self.expr())
        self.fail(f"expected '>=' or 'certs' after expression, found {self.tok.text or 'end of input'!r}")


def _key(t: Token) -> Key:
    ident = t.text[1:]
    if ident == "self":
        raise ParseError(t.span, ErrorKind.NAMESPACE_CLASH, "'self' cannot carry a key prefix")
    return Key(ident)


def parse_expr(text: str) -> Expr:
    p = _Parser(tokenize(text))
    e = p.expr()
    p.expect_eof()
    return e


def parse_formula(text: str) -> Formula:
    p = _Parser(tokenize(text))
    f = p.formula()
    p.expect_eof()
    return f


def parse_key(text: str) -> Key:
    p = _Parser(tokenize(text))
    t = p.tok
    if t.kind != "key":
        p.fail(f"expected a key such as #k, found {t.text or 'end of input'!r}")
    p.advance()
    p.expect_eof()
    return _key(t)


# -- files -----------------------------------------------------------------


@dataclass
class Witness:
    """A world together with a local name assignment and a viewpoint."""

    world: World
    assignment: LocalNameAssignment
    viewpoint: Key | None = None


def _keys_until_eof(p: _Parser) -> list[Key]:
    keys = []
    while p.tok.kind != "eof":
        t = p.tok
        if t.kind != "key":
            p.fail(f"expected a key, found {t.text!r}")
        keys.append(_key(t))
        p.advance()
    return keys


def _parse_lines(text: str, allow_witness: bool) -> Witness:
    declared: set[Key] = set()
    beta: dict[GlobalName, set[Key]] = {}
    certs: dict[Key, set[Formula]] = {}
    lna: dict[tuple[Key, LocalName], set[Key]] = {}
    viewpoint: Key | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = tokenize(raw, line=lineno)
        if toks[0].kind == "eof":
            continue
        p = _Parser(toks)
        head = p.tok
        directive = head.text if head.kind == "ident" else None
        if directive == "keys":
            p.advance()
            declared.update(_keys_until_eof(p))
        elif directive == "global":
            p.advance()
            t = p.tok
            if t.kind != "global":
                p.fail(f"expected a global name such as !G, found {t.text or 'end of line'!r}")
            g = GlobalName(t.text[1:])
            if g.id == "self":
                p.fail("'self' cannot carry a global prefix", ErrorKind.NAMESPACE_CLASH)
            p.advance()
            p.expect("=")
            beta.setdefault(g, set()).update(_keys_until_eof(p))
        elif directive == "cert":
            p.advance()
            t = p.tok
            if t.kind != "key":
                p.fail("a certificate issuer must be a key", ErrorKind.NAMESPACE_CLASH)
            issuer = _key(t)
            p.advance()
            p.expect(":")
            body = p.formula()
            p.expect_eof()
            certs.setdefault(issuer, set()).add(body)
        elif directive == "lna" and allow_witness:
            p.advance()
            t = p.tok
            if t.kind != "key":
                p.fail(f"expected a key, found {t.text or 'end of line'!r}")
            k = _key(t)
            p.advance()
            n = p.atom()
            if not isinstance(n, LocalName):
                p.fail("an lna line binds a local name", ErrorKind.NAMESPACE_CLASH)
            p.expect("=")
            lna.setdefault((k, n), set()).update(_keys_until_eof(p))
        elif directive == "viewpoint" and allow_witness:
            p.advance()
            t = p.tok
            if t.kind != "key":
                p.fail(f"expected a key, found {t.text or 'end of line'!r}")
            viewpoint = _key(t)
            p.advance()
            p.expect_eof()
        else:
            raise ParseError(head.span, ErrorKind.UNKNOWN_DIRECTIVE, f"unknown directive {head.text!r}")
    extra = set(declared)
    for (k, _), ks in lna.items():
        extra.add(k)
        extra |= ks
    if viewpoint is not None:
        extra.add(viewpoint)
    world = World(beta, certs, frozenset(extra))
    return Witness(world, LocalNameAssignment(lna), viewpoint)


def parse_world(text: str) -> World:
    return _parse_lines(text, allow_witness=False).world


def parse_witness(text: str) -> Witness:
    """A world file that may also carry ``lna`` and ``viewpoint`` lines."""
    return _parse_lines(text, allow_witness=True)


def parse_lna(text: str) -> LocalNameAssignment:
    """Read only the ``lna`` lines of a file (other directives are accepted and ignored)."""
    return _parse_lines(text, allow_witness=True).assignment


# -- rendering -------------------------------------------------------------

# binding strength of rendered formulas
_IMPLIES, _OR, _AND, _UNARY = 1, 2, 3, 4


def _render_expr(e: Expr) -> str:
    if isinstance(e, Compound):
        right = _render_expr(e.right)
        if isinstance(e.right, Compound):
            right = f"({right})"
        return f"{_render_expr(e.left)} . {right}"
    return str(e)


def _match_implies(f: Formula):
    if (
        isinstance(f, Not)
        and isinstance(f.body, And)
        and isinstance(f.body.left, Not)
        and isinstance(f.body.left.body, Not)
        and isinstance(f.body.right, Not)
    ):
        return f.body.left.body.body, f.body.right.body
    return None


def _match_or(f: Formula):
    if (
        isinstance(f, Not)
        and isinstance(f.body, And)
        and isinstance(f.body.left, Not)
        and isinstance(f.body.right, Not)
    ):
        return f.body.left.body, f.body.right.body
    return None


def _render_formula(f: Formula) -> tuple[str, int]:
    if f == FALSE:
        return "false", _UNARY
    m = _match_implies(f)
    if m:
        a, b = m
        return f"{_wrap(a, _IMPLIES + 1)} => {_wrap(b, _IMPLIES)}", _IMPLIES
    m = _match_or(f)
    if m:
        a, b = m
        return f"{_wrap(a, _OR)} | {_wrap(b, _OR + 1)}", _OR
    if isinstance(f, And):
        return f"{_wrap(f.left, _AND)} & {_wrap(f.right, _AND + 1)}", _AND
    if isinstance(f, Not):
        return f"!({_render_formula(f.body)[0]})", _UNARY
    if isinstance(f, Cert):
        return f"{f.issuer} certs ({_render_formula(f.body)[0]})", _UNARY
    return f"{_render_expr(f.sup)} >= {_render_expr(f.sub)}", _UNARY


def _wrap(f: Formula, min_level: int) -> str:
    text, level = _render_formula(f)
    return text if level >= min_level else f"({text})"


def render_world(w: World) -> str:
    lines = []
    if w.declared_keys:
        lines.append("keys " + " ".join(map(str, sorted(w.declared_keys))))
    for g in sorted(w.beta):
        lines.append(" ".join([f"global {g} ="] + [str(k) for k in sorted(w.beta[g])]))
    for k in sorted(w.certs):
        for body in sorted(_render_formula(f)[0] for f in w.certs[k]):
            lines.append(f"cert {k}: {body}")
    return "\n".join(lines) + ("\n" if lines else "")


def render_assignment(l: LocalNameAssignment) -> str:
    return "".join(
        " ".join([f"lna {k} {n} ="] + [str(x) for x in sorted(ks)]) + "\n" for (k, n), ks in l.items()
    )


def render_witness(w: World, l: LocalNameAssignment, viewpoint: Key | None) -> str:
    text = render_world(w) + render_assignment(l)
    if viewpoint is not None:
        text += f"viewpoint {viewpoint}\n"
    return text


def render(x: Expr | Formula | World) -> str:
    if isinstance(x, World):
        return render_world(x)
    if isinstance(x, (Contains, Cert, Not, And)):
        return _render_formula(x)[0]
    if isinstance(x, (Key, GlobalName, LocalName, Self, Compound)):
        return _render_expr(x)
    raise TypeError(f"cannot render {type(x).__name__}")


def render_keys(keys: Iterable[Key]) -> str:
    keys = sorted(keys)
    return " ".join(map(str, keys)) if keys else "(empty)"
