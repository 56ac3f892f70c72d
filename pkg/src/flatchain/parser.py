"""Parser for the differential-polynomial DSL.

One equation per line (implicitly ``= 0``).  ``d(x2,3)`` denotes the third
derivative of ``x2``; operators are ``+ - * / ^`` with the usual precedence
and ``^`` restricted to integer exponents; functions are ``sin``, ``cos``,
``tan`` and ``recip``.  Variables are positional (``x1`` .. ``xn``); an
optional first line ``vars: name1 name2 ...`` declares readable aliases.
``#`` starts a comment.  Errors carry line and column numbers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import expr as ex

_FUNCTIONS = ("sin", "cos", "tan", "recip")


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str  # num | ident | op | end
    text: str
    line: int
    col: int


def _tokenize(text: str, line_no: int) -> list[Token]:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c in " \t":
            i += 1
            continue
        if c == "#":
            break
        col = i + 1
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            seen_dot = False
            while j < n and (text[j].isdigit() or (text[j] == "." and not seen_dot)):
                seen_dot = seen_dot or text[j] == "."
                j += 1
            tokens.append(Token("num", text[i:j], line_no, col))
            i = j
        elif c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("ident", text[i:j], line_no, col))
            i = j
        elif c in "+-*/^(),":
            tokens.append(Token("op", c, line_no, col))
            i += 1
        else:
            raise ParseError(f"unexpected character {c!r}", line_no, col)
    tokens.append(Token("end", "", line_no, len(text) + 1))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token], var_index):
        self.tokens = tokens
        self.pos = 0
        self.var_index = var_index  # name -> 0-based index, possibly growing

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def take(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.take()
        if tok.kind != "op" or tok.text != text:
            raise ParseError(f"expected {text!r}", tok.line, tok.col)
        return tok

    def parse_expr(self):
        node = self.parse_term()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "+-":
                self.take()
                rhs = self.parse_term()
                node = ex.add(node, rhs if tok.text == "+" else ex.neg(rhs))
            else:
                return node

    def parse_term(self):
        node = self.parse_unary()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "*/":
                self.take()
                rhs = self.parse_unary()
                node = ex.mul(node, rhs if tok.text == "*" else ex.fun("recip", rhs))
            else:
                return node

    def parse_unary(self):
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.take()
            return ex.neg(self.parse_unary())
        if tok.kind == "op" and tok.text == "+":
            self.take()
            return self.parse_unary()
        return self.parse_power()

    def parse_power(self):
        base = self.parse_atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.take()
            sign = 1
            etok = self.peek()
            if etok.kind == "op" and etok.text == "-":
                self.take()
                sign = -1
                etok = self.peek()
            if etok.kind != "num" or "." in etok.text:
                raise ParseError("exponent must be an integer", etok.line, etok.col)
            self.take()
            return ex.power(base, sign * int(etok.text))
        return base

    def parse_atom(self):
        tok = self.take()
        if tok.kind == "num":
            return ex.Num(Fraction(tok.text))
        if tok.kind == "op" and tok.text == "(":
            node = self.parse_expr()
            closing = self.take()
            if closing.kind != "op" or closing.text != ")":
                raise ParseError("unbalanced parentheses", closing.line, closing.col)
            return node
        if tok.kind == "ident":
            if tok.text == "d":
                return self.parse_derivative(tok)
            if tok.text in _FUNCTIONS:
                self.expect("(")
                arg = self.parse_expr()
                closing = self.take()
                if closing.kind != "op" or closing.text != ")":
                    raise ParseError("unbalanced parentheses", closing.line, closing.col)
                return ex.fun(tok.text, arg)
            return ex.Var(self.lookup(tok), 0)
        raise ParseError("expected a value", tok.line, tok.col)

    def parse_derivative(self, dtok: Token):
        self.expect("(")
        vtok = self.take()
        if vtok.kind != "ident":
            raise ParseError("malformed derivative: expected a variable name", vtok.line, vtok.col)
        var = self.lookup(vtok)
        self.expect(",")
        otok = self.take()
        if otok.kind != "num" or "." in otok.text:
            raise ParseError("malformed derivative: order must be a nonnegative integer", otok.line, otok.col)
        self.expect(")")
        return ex.Var(var, int(otok.text))

    def lookup(self, tok: Token) -> int:
        name = tok.text
        if name in self.var_index:
            return self.var_index[name]
        if self.var_index.get("__frozen__") is not None:
            raise ParseError(f"unknown identifier {name!r}", tok.line, tok.col)
        if len(name) > 1 and name[0] == "x" and name[1:].isdigit() and int(name[1:]) >= 1:
            self.var_index[name] = int(name[1:]) - 1
            return self.var_index[name]
        raise ParseError(f"unknown identifier {name!r}", tok.line, tok.col)


def parse_expression(text: str, var_index, line_no: int = 1):
    tokens = _tokenize(text, line_no)
    parser = _Parser(tokens, var_index)
    node = parser.parse_expr()
    tail = parser.take()
    if tail.kind != "end":
        raise ParseError(f"unexpected trailing input {tail.text!r}", tail.line, tail.col)
    return node


def parse_system_source(text: str):
    """Parse DSL source into (variable names, expression list).

    Without a ``vars:`` header the variables are the positional ``x<j>``
    actually used, up to the largest index mentioned.
    """
    lines = text.splitlines()
    var_index: dict[str, int] = {}
    names = None
    equations = []
    for k, raw in enumerate(lines, start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if names is None and stripped.lower().startswith("vars:"):
            names = stripped[5:].split()
            if not names:
                raise ParseError("empty vars: header", k, 1)
            for idx, nm in enumerate(names):
                var_index[nm] = idx
            var_index["__frozen__"] = True  # aliases declared: no implicit x<j>
            continue
        if names is None:
            names = []  # implicit numbering mode
        equations.append(parse_expression(raw, var_index, line_no=k))
    if names is None:
        raise ParseError("no equations found", len(lines) or 1, 1)
    if "__frozen__" in var_index:
        del var_index["__frozen__"]
        return list(names), equations
    n = 1 + max((i for i in var_index.values()), default=-1)
    return [f"x{j + 1}" for j in range(n)], equations
