"""Concrete syntax: a precedence-climbing parser and a canonical printer.

Grammar shared by all languages (loosest binding first)::

    f := f "<->" f | f "->" f | f "|" f | f "&" f | unary
    unary := "~" unary | "(" f ")" | atom | "true" | "false" | modal unary

with the per-language modal prefixes

    pecp   "<" "{" atoms "}" ">"      "[" "{" atoms "}" "]"
    stit   "<" "{" agents "}" ":stit>"  "[" "{" agents "}" ":stit]"
    clpc   "dia" "{" agents "}"         "box" "{" agents "}"
    s5     "<>"                          "[]"

``->`` and ``<->`` associate to the right, ``&`` and ``|`` to the left.
"""

from __future__ import annotations

import re

from paribus.syntax import (
    BOT,
    TOP,
    And,
    Atom,
    BoxAll,
    CoopDiamond,
    Diamond,
    Formula,
    Iff,
    Imp,
    Not,
    Or,
    StitBox,
    Top,
    match_iff,
)

LANGUAGES = ("pecp", "stit", "clpc", "s5")


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<op><->|->|\[\]|<>|:stit\]|:stit>|[()~&|\[\]<>{},])
  | (?P<name>[a-z][a-zA-Z0-9_]*)
  | (?P<int>[0-9]+)
    """,
    re.VERBOSE,
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", *_where(text, pos))
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


def _where(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


_BINARY = {"<->": (1, "right"), "->": (2, "right"), "|": (3, "left"), "&": (4, "left")}


class _Parser:
    def __init__(self, language: str, text: str):
        if language not in LANGUAGES:
            raise ValueError(
                f"unknown language tag {language!r}; expected one of {LANGUAGES}"
            )
        self.language = language
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self, offset=0):
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return ParseError(message, *_where(self.text, tok[2]))

    def expect(self, value):
        tok = self.peek()
        if tok[1] != value or tok[0] == "eof":
            shown = tok[1] or "end of input"
            raise self.error(f"expected {value!r}, found {shown!r}", tok)
        self.i += 1
        return tok

    def parse(self) -> Formula:
        if self.peek()[0] == "eof":
            raise self.error("empty formula")
        f = self.binary(1)
        tok = self.peek()
        if tok[0] != "eof":
            raise self.error(f"unexpected {tok[1]!r}", tok)
        return f

    def binary(self, min_prec: int) -> Formula:
        left = self.unary()
        while True:
            tok = self.peek()
            entry = _BINARY.get(tok[1]) if tok[0] == "op" else None
            if entry is None or entry[0] < min_prec:
                return left
            prec, assoc = entry
            self.i += 1
            right = self.binary(prec + 1 if assoc == "left" else prec)
            left = _combine(tok[1], left, right)

    def unary(self) -> Formula:
        tok = self.peek()
        kind, value = tok[0], tok[1]
        lang = self.language
        if value == "~":
            self.i += 1
            return Not(self.unary())
        if value == "(":
            self.i += 1
            f = self.binary(1)
            self.expect(")")
            return f
        if kind == "name":
            if value == "true":
                self.i += 1
                return TOP
            if value == "false":
                self.i += 1
                return BOT
            if lang == "clpc" and value in ("dia", "box"):
                self.i += 1
                agents = self.index_set(int_items=True)
                body = self.unary()
                if value == "dia":
                    return CoopDiamond(agents, body)
                return Not(CoopDiamond(agents, Not(body)))
            self.i += 1
            return Atom(value)
        if lang == "s5" and value in ("[]", "<>"):
            self.i += 1
            body = self.unary()
            return BoxAll(body) if value == "[]" else Not(BoxAll(Not(body)))
        if value in ("[", "<") and lang in ("pecp", "stit"):
            self.i += 1
            if lang == "pecp":
                sig = self.index_set(int_items=False)
                self.expect("]" if value == "[" else ">")
                body = self.unary()
                if value == "<":
                    return Diamond(sig, body)
                return Not(Diamond(sig, Not(body)))
            agents = self.index_set(int_items=True)
            self.expect(":stit]" if value == "[" else ":stit>")
            body = self.unary()
            if value == "[":
                return StitBox(agents, body)
            return Not(StitBox(agents, Not(body)))
        if kind == "eof":
            raise self.error("unexpected end of input", tok)
        raise self.error(f"unexpected {value!r}", tok)

    def index_set(self, int_items: bool):
        self.expect("{")
        items = []
        if self.peek()[1] != "}":
            while True:
                tok = self.peek()
                if int_items:
                    if tok[0] != "int":
                        raise self.error(f"expected an agent number, found {tok[1]!r}", tok)
                    item = int(tok[1])
                    if item < 1:
                        raise self.error("agent numbers start at 1", tok)
                else:
                    if tok[0] != "name" or tok[1] in ("true", "false"):
                        raise self.error(f"expected an atom, found {tok[1]!r}", tok)
                    item = tok[1]
                if item in items:
                    raise self.error(f"duplicate element {tok[1]!r} in set", tok)
                items.append(item)
                self.i += 1
                if self.peek()[1] == ",":
                    self.i += 1
                    continue
                break
        self.expect("}")
        return frozenset(items)


def _combine(op, a, b):
    if op == "&":
        return And(a, b)
    if op == "|":
        return Or(a, b)
    if op == "->":
        return Imp(a, b)
    return Iff(a, b)


def parse(language: str, text: str) -> Formula:
    """Parse ``text`` as a formula of ``language`` (pecp, stit, clpc or s5)."""
    return _Parser(language, text).parse()


# -- printing ---------------------------------------------------------------

_UNARY = 5


def _fmt_set(items) -> str:
    return "{" + ",".join(str(x) for x in sorted(items)) + "}"


def _sugar(f: Formula):
    """Recognise sugar so printing is readable; returns (kind, parts) or None."""
    pair = match_iff(f)
    if pair is not None:
        return "<->", pair
    if type(f) is not Not:
        return None
    g = f.arg
    tg = type(g)
    if tg is Top:
        return "false", ()
    if tg is Diamond and type(g.arg) is Not:
        return "pbox", (g.signature, g.arg.arg)
    if tg is StitBox and type(g.arg) is Not:
        return "sdia", (g.coalition, g.arg.arg)
    if tg is CoopDiamond and type(g.arg) is Not:
        return "cbox", (g.coalition, g.arg.arg)
    if tg is BoxAll and type(g.arg) is Not:
        return "s5dia", (g.arg.arg,)
    if tg is And and type(g.right) is Not:
        if type(g.left) is Not:
            return "|", (g.left.arg, g.right.arg)
        return "->", (g.left, g.right.arg)
    return None


def to_text(f: Formula) -> str:
    """Canonical text: sorted index sets, minimal parentheses."""
    return _print(f, 0)


def _print(f: Formula, ctx: int) -> str:
    sugar = _sugar(f)
    if sugar is not None:
        kind, parts = sugar
        if kind in _BINARY:
            prec, assoc = _BINARY[kind]
            a, b = parts
            left_ctx = prec + 1 if assoc == "right" else prec
            right_ctx = prec if assoc == "right" else prec + 1
            text = f"{_print(a, left_ctx)} {kind} {_print(b, right_ctx)}"
            return f"({text})" if prec < ctx else text
        if kind == "false":
            return "false"
        if kind == "pbox":
            return f"[{_fmt_set(parts[0])}] {_print(parts[1], _UNARY)}"
        if kind == "sdia":
            return f"<{_fmt_set(parts[0])}:stit> {_print(parts[1], _UNARY)}"
        if kind == "cbox":
            return f"box{_fmt_set(parts[0])} {_print(parts[1], _UNARY)}"
        if kind == "s5dia":
            return f"<> {_print(parts[0], _UNARY)}"
    t = type(f)
    if t is Atom:
        return f.name
    if t is Top:
        return "true"
    if t is Not:
        return "~" + _print(f.arg, _UNARY)
    if t is And:
        text = f"{_print(f.left, 4)} & {_print(f.right, 5)}"
        return f"({text})" if 4 < ctx else text
    if t is Diamond:
        return f"<{_fmt_set(f.signature)}> {_print(f.arg, _UNARY)}"
    if t is StitBox:
        return f"[{_fmt_set(f.coalition)}:stit] {_print(f.arg, _UNARY)}"
    if t is CoopDiamond:
        return f"dia{_fmt_set(f.coalition)} {_print(f.arg, _UNARY)}"
    if t is BoxAll:
        return f"[] {_print(f.arg, _UNARY)}"
    raise TypeError(f"not a formula: {f!r}")
