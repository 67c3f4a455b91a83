"""Parser for polynomial expressions over named variables.

Grammar (EBNF):

    expr     = [ "+" | "-" ] term { ( "+" | "-" ) term } ;
    term     = factor { "*" factor } ;
    factor   = atom [ "^" natural ] ;
    atom     = rational | variable | "(" expr ")" ;
    rational = natural [ "/" natural ] ;
    natural  = digit { digit } ;
    variable = letter { letter | digit | "_" } ;

Coefficients are exact rationals ("3", "1/2"); exponents are non-negative
integer literals, so "x^-1" is a syntax error.  Division appears only
inside rational literals.  Parsing is total on this grammar and rejects
everything else with a position-annotated error.
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import Poly


class ParseError(ValueError):
    """Syntax or name error, carrying the 0-based character position."""

    def __init__(self, message, position, text=None):
        self.position = position
        self.text = text
        super().__init__(f"{message} (at position {position})")


_OPS = set("+-*^()/")


def _tokenize(text):
    tokens = []
    i, size = 0, len(text)
    while i < size:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < size and text[j].isdigit():
                j += 1
            tokens.append(("number", text[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < size and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
            continue
        if ch in _OPS:
            tokens.append((ch, ch, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", i, text)
    tokens.append(("end", "", size))
    return tokens


class _Parser:
    def __init__(self, text, variables):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.variables = list(variables)
        self.index = {name: i for i, name in enumerate(self.variables)}
        self.n = len(self.variables)

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind, what):
        tok = self.peek()
        if tok[0] != kind:
            raise ParseError(f"expected {what}, found {tok[1]!r}" if tok[1]
                             else f"expected {what}, found end of input",
                             tok[2], self.text)
        return self.advance()

    def parse(self):
        p = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2], self.text)
        return p

    def expr(self):
        sign = 1
        if self.peek()[0] in ("+", "-"):
            if self.advance()[0] == "-":
                sign = -1
        p = self.term().scaled(sign)
        while self.peek()[0] in ("+", "-"):
            op = self.advance()[0]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.factor()
        while self.peek()[0] == "*":
            self.advance()
            p = p * self.factor()
        return p

    def factor(self):
        p = self.atom()
        if self.peek()[0] == "^":
            self.advance()
            tok = self.expect("number", "a non-negative integer exponent")
            p = p ** int(tok[1])
        return p

    def atom(self):
        kind, value, pos = self.peek()
        if kind == "number":
            self.advance()
            num = int(value)
            if self.peek()[0] == "/":
                self.advance()
                den_tok = self.expect("number", "a denominator")
                den = int(den_tok[1])
                if den == 0:
                    raise ParseError("zero denominator", den_tok[2], self.text)
                return Poly.constant(self.n, Fraction(num, den))
            return Poly.constant(self.n, num)
        if kind == "name":
            self.advance()
            if value not in self.index:
                raise ParseError(f"unknown variable {value!r}"
                                 f" (known: {', '.join(self.variables)})",
                                 pos, self.text)
            return Poly.variable(self.n, self.index[value])
        if kind == "(":
            self.advance()
            p = self.expr()
            self.expect(")", "a closing parenthesis")
            return p
        raise ParseError(f"expected a number, variable or '(', found {value!r}"
                         if value else "unexpected end of input",
                         pos, self.text)


def parse_poly(text, variables):
    """Parse text into an exact Poly over the given variable names."""
    return _Parser(text, variables).parse()
