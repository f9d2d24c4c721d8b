"""Recursive-descent parser for the expression grammar.

::

    expr     = term , { ("+" | "-") , term } ;
    term     = unary , { ("*" | "/") , unary } ;
    unary    = ("+" | "-") , unary | power ;
    power    = primary , [ "^" , exponent ] ;
    exponent = [ "+" | "-" ] , integer | "(" , expr , ")" ;   (* integer-valued *)
    primary  = number | ident , "(" , expr , ")" | ident | "(" , expr , ")" ;
    number   = digit , { digit } , [ "." , digit , { digit } ] ;
    ident    = letter , { letter | digit | "_" } ;

The only function is ``exp``.  Exponents must be integers.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import NamedTuple

from .core import Const, Exp, Expression, Power, Var

FUNCTIONS = {"exp": Exp}

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<num>\d+(?:\.\d+)?)|(?P<ident>[^\W\d]\w*)|(?P<op>[-+*/^(),])"
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.message = message
        self.line = line
        self.column = column


class Token(NamedTuple):
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str, line: int = 1, column: int = 1) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, column)
        kind = m.lastgroup
        chunk = m.group()
        if kind != "ws":
            tokens.append(Token(kind, chunk, line, column))
        for ch in chunk:
            if ch == "\n":
                line += 1
                column = 1
            else:
                column += 1
        pos = m.end()
    tokens.append(Token("end", "", line, column))
    return tokens


class _Parser:
    def __init__(self, tokens: list):
        self.tokens = tokens
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def take(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def fail(self, message: str, tok: Token = None):
        tok = tok or self.tok
        raise ParseError(message, tok.line, tok.column)

    def expect(self, text: str) -> Token:
        if self.tok.text != text or self.tok.kind != "op":
            found = "end of input" if self.tok.kind == "end" else repr(self.tok.text)
            self.fail(f"expected {text!r}, found {found}")
        return self.take()

    def parse(self) -> Expression:
        e = self.expr()
        if self.tok.kind != "end":
            self.fail(f"unexpected {self.tok.text!r}")
        return e

    def expr(self) -> Expression:
        out = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.take().text
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self) -> Expression:
        out = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.take()
            rhs = self.unary()
            if op.text == "*":
                out = out * rhs
            else:
                if rhs.is_zero_canonical():
                    self.fail("division by zero", op)
                out = out / rhs
        return out

    def unary(self) -> Expression:
        if self.tok.kind == "op" and self.tok.text in "+-":
            op = self.take().text
            inner = self.unary()
            return -inner if op == "-" else inner
        return self.power()

    def power(self) -> Expression:
        base = self.primary()
        if self.tok.kind == "op" and self.tok.text == "^":
            caret = self.take()
            k = self.exponent()
            if k < 0 and base.is_zero_canonical():
                self.fail("zero raised to a negative power", caret)
            return Power(base, k)
        return base

    def exponent(self) -> int:
        start = self.tok
        sign = 1
        if self.tok.kind == "op" and self.tok.text in "+-":
            sign = -1 if self.take().text == "-" else 1
        if self.tok.kind == "num":
            t = self.take()
            q = Fraction(t.text)
        elif self.tok.kind == "op" and self.tok.text == "(":
            self.take()
            e = self.expr()
            self.expect(")")
            if not e.is_constant():
                self.fail("exponent must be an integer constant", start)
            q = e.constant_value()
        else:
            self.fail("expected an integer exponent")
        if q.denominator != 1:
            self.fail(f"non-integer exponent {q}", start)
        return sign * int(q)

    def primary(self) -> Expression:
        t = self.tok
        if t.kind == "num":
            self.take()
            return Const(Fraction(t.text))
        if t.kind == "ident":
            self.take()
            if self.tok.kind == "op" and self.tok.text == "(":
                fn = FUNCTIONS.get(t.text)
                if fn is None:
                    self.fail(f"unknown function {t.text!r}", t)
                self.take()
                arg = self.expr()
                self.expect(")")
                return fn(arg)
            return Var(t.text)
        if t.kind == "op" and t.text == "(":
            self.take()
            e = self.expr()
            self.expect(")")
            return e
        found = "end of input" if t.kind == "end" else repr(t.text)
        self.fail(f"unexpected {found}")


def parse_expression(text: str, line: int = 1, column: int = 1) -> Expression:
    """Parse ``text`` into a canonical Expression.

    ``line``/``column`` offset error locations when the text is embedded in
    a larger file.
    """
    return _Parser(tokenize(text, line, column)).parse()
