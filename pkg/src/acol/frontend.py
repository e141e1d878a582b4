"""Lexer, recursive-descent parser and pretty-printer for Acol source text.

Grammar::

    program    = stmt*
    stmt       = IDENT (":=" | "=") expr ";"
               | "if" expr block ["else" block]
               | "while" expr block
    block      = "{" stmt* "}"
    expr       = additive [cmp_op additive]       # at most one comparison
    additive   = term (("+" | "-" | "mod") term)*
    term       = unary ("*" unary)*
    unary      = "!" unary | atom
    atom       = INT | "-" INT | IDENT | "(" expr ")"

``mod`` binds like ``+``, so ``b + a mod 1000000`` is ``(b + a) mod 1000000``.
"""
from __future__ import annotations

import re
from typing import NamedTuple

from .errors import LexError, ParseError
from .nodes import INT32_MAX, INT32_MIN, Assign, BinOp, If, IntLit, Not, Var, While


class Token(NamedTuple):
    kind: str
    value: object
    line: int
    col: int


KEYWORDS = {"if", "else", "while", "mod"}

_PUNCT = {
    ":=": "assign", "==": "eq", "<=": "le", ">=": "ge",
    "=": "assign", "<": "lt", ">": "gt", "+": "plus", "-": "minus",
    "*": "star", "!": "not", ";": "semi", "{": "lbrace", "}": "rbrace",
    "(": "lparen", ")": "rparen",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<int>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>:=|==|<=|>=|[=<>+\-*!;{}()])
    """,
    re.VERBOSE,
)


def tokenize(source: str) -> list[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise LexError(line, pos - line_start + 1, source[pos])
        kind = m.lastgroup
        text = m.group()
        col = pos - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "int":
            tokens.append(Token("int", int(text), line, col))
        elif kind == "ident":
            if text in KEYWORDS:
                tokens.append(Token(text, text, line, col))
            else:
                tokens.append(Token("ident", text, line, col))
        elif kind == "punct":
            tokens.append(Token(_PUNCT[text], text, line, col))
        pos = m.end()
    return tokens


_CMP_TOKENS = {"lt": "lt", "le": "le", "gt": "gt", "ge": "ge", "eq": "eq"}
_ADD_TOKENS = {"plus": "add", "minus": "sub", "mod": "mod"}


class _Parser:
    def __init__(self, source: str):
        self.toks = tokenize(source)
        self.i = 0
        lines = source.split("\n")
        self.eof = Token("eof", None, len(lines), len(lines[-1]) + 1)

    def peek(self, k=0) -> Token:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else self.eof

    def fail(self, expected):
        t = self.peek()
        found = "end of input" if t.kind == "eof" else repr(t.value)
        raise ParseError(t.line, t.col, expected, found)

    def expect(self, kind) -> Token:
        t = self.peek()
        if t.kind != kind:
            self.fail({kind})
        self.i += 1
        return t

    def program(self):
        stmts = []
        while self.peek().kind != "eof":
            stmts.append(self.stmt())
        return stmts

    def stmt(self):
        t = self.peek()
        if t.kind == "ident":
            self.i += 1
            self.expect("assign")
            e = self.expr()
            self.expect("semi")
            return Assign(t.value, e)
        if t.kind == "if":
            self.i += 1
            cond = self.expr()
            then = self.block()
            orelse = ()
            if self.peek().kind == "else":
                self.i += 1
                orelse = self.block()
            return If(cond, then, orelse)
        if t.kind == "while":
            self.i += 1
            cond = self.expr()
            return While(cond, self.block())
        self.fail({"ident", "if", "while"})

    def block(self):
        self.expect("lbrace")
        stmts = []
        while self.peek().kind != "rbrace":
            if self.peek().kind == "eof":
                self.fail({"rbrace", "ident", "if", "while"})
            stmts.append(self.stmt())
        self.i += 1
        return tuple(stmts)

    def expr(self):
        lhs = self.additive()
        op = _CMP_TOKENS.get(self.peek().kind)
        if op is None:
            return lhs
        self.i += 1
        rhs = self.additive()
        if self.peek().kind in _CMP_TOKENS:
            # comparisons are non-associative: a < b < c is rejected
            self.fail({"semi", "lbrace", "rparen"})
        return BinOp(op, lhs, rhs)

    def additive(self):
        e = self.term()
        while True:
            op = _ADD_TOKENS.get(self.peek().kind)
            if op is None:
                return e
            self.i += 1
            e = BinOp(op, e, self.term())

    def term(self):
        e = self.unary()
        while self.peek().kind == "star":
            self.i += 1
            e = BinOp("mul", e, self.unary())
        return e

    def unary(self):
        if self.peek().kind == "not":
            self.i += 1
            return Not(self.unary())
        return self.atom()

    def atom(self):
        t = self.peek()
        if t.kind == "int":
            self.i += 1
            return IntLit(self._literal(t.value, t))
        if t.kind == "minus" and self.peek(1).kind == "int":
            self.i += 2
            return IntLit(self._literal(-self.toks[self.i - 1].value, t))
        if t.kind == "ident":
            self.i += 1
            return Var(t.value)
        if t.kind == "lparen":
            self.i += 1
            e = self.expr()
            self.expect("rparen")
            return e
        self.fail({"int", "ident", "lparen", "not"})

    @staticmethod
    def _literal(value, tok):
        if not INT32_MIN <= value <= INT32_MAX:
            raise ParseError(tok.line, tok.col, {"32-bit integer"}, str(value))
        return value


def parse_program(source: str) -> list:
    """Parse Acol source into a list of statements."""
    return _Parser(source).program()


def parse_expr(source: str):
    p = _Parser(source)
    e = p.expr()
    if p.peek().kind != "eof":
        p.fail({"end of input"})
    return e


# pretty-printing

_SYMBOL = {
    "add": "+", "sub": "-", "mod": "mod", "mul": "*",
    "lt": "<", "le": "<=", "gt": ">", "ge": ">=", "eq": "==",
}
_PREC = {"lt": 1, "le": 1, "gt": 1, "ge": 1, "eq": 1, "add": 2, "sub": 2, "mod": 2, "mul": 3}
_NOT_PREC = 4
_ATOM_PREC = 5


def _prec(e) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Not):
        return _NOT_PREC
    return _ATOM_PREC


def format_expr(e, min_prec: int = 0) -> str:
    if isinstance(e, IntLit):
        text = str(e.value)
    elif isinstance(e, Var):
        text = e.name
    elif isinstance(e, Not):
        text = "!" + format_expr(e.operand, _NOT_PREC)
    else:
        p = _PREC[e.op]
        # left-associative levels; comparison operands must bind tighter
        lhs = format_expr(e.lhs, p + 1 if p == 1 else p)
        rhs = format_expr(e.rhs, p + 1)
        text = f"{lhs} {_SYMBOL[e.op]} {rhs}"
    if _prec(e) < min_prec:
        return f"({text})"
    return text


def format_program(stmts, indent: str = "    ") -> str:
    lines: list[str] = []
    _format_block(stmts, 0, indent, lines)
    return "".join(line + "\n" for line in lines)


def _format_block(stmts, level, indent, out):
    pad = indent * level
    for s in stmts:
        if isinstance(s, Assign):
            out.append(f"{pad}{s.target} := {format_expr(s.expr)};")
        elif isinstance(s, While):
            out.append(f"{pad}while {format_expr(s.cond)} {{")
            _format_block(s.body, level + 1, indent, out)
            out.append(pad + "}")
        else:
            out.append(f"{pad}if {format_expr(s.cond)} {{")
            _format_block(s.then, level + 1, indent, out)
            if s.orelse:
                out.append(pad + "} else {")
                _format_block(s.orelse, level + 1, indent, out)
            out.append(pad + "}")
