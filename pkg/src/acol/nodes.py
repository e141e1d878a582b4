"""Abstract syntax tree shared by the parser, compilers and interpreters.

Programs are plain lists of statements.  Nodes are frozen dataclasses so
that structural equality (``==``) is what the round-trip tests compare.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

ARITH_OPS = ("add", "sub", "mul", "mod")
COMPARE_OPS = ("lt", "le", "gt", "ge", "eq")
BINARY_OPS = ARITH_OPS + COMPARE_OPS

INT32_MIN = -(2**31)
INT32_MAX = 2**31 - 1


@dataclass(frozen=True, slots=True)
class IntLit:
    value: int


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class BinOp:
    op: str
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True, slots=True)
class Not:
    operand: Expr


Expr = Union[IntLit, Var, BinOp, Not]


@dataclass(frozen=True, slots=True)
class Assign:
    target: str
    expr: Expr


@dataclass(frozen=True, slots=True)
class If:
    cond: Expr
    then: tuple
    orelse: tuple = ()


@dataclass(frozen=True, slots=True)
class While:
    cond: Expr
    body: tuple


Stmt = Union[Assign, If, While]


def expr_depth(e: Expr) -> int:
    """Height of an expression tree; a leaf has depth 1."""
    if isinstance(e, BinOp):
        return 1 + max(expr_depth(e.lhs), expr_depth(e.rhs))
    if isinstance(e, Not):
        return 1 + expr_depth(e.operand)
    return 1


def iter_stmts(stmts):
    """Yield every statement of a program, nested ones included (pre-order)."""
    todo = list(reversed(stmts))
    while todo:
        s = todo.pop()
        yield s
        if isinstance(s, If):
            todo.extend(reversed(s.orelse))
            todo.extend(reversed(s.then))
        elif isinstance(s, While):
            todo.extend(reversed(s.body))


def iter_exprs(e: Expr):
    todo = [e]
    while todo:
        x = todo.pop()
        yield x
        if isinstance(x, BinOp):
            todo.append(x.rhs)
            todo.append(x.lhs)
        elif isinstance(x, Not):
            todo.append(x.operand)


def stmt_exprs(s: Stmt):
    if isinstance(s, Assign):
        return (s.expr,)
    return (s.cond,)


def max_expr_depth(stmts) -> int:
    return max((expr_depth(e) for s in iter_stmts(stmts) for e in stmt_exprs(s)), default=0)


def ast_size(stmts) -> int:
    """Number of statement and expression nodes in a program."""
    return sum(1 + sum(1 for e in stmt_exprs(s) for _ in iter_exprs(e)) for s in iter_stmts(stmts))


def max_loop_nesting(stmts) -> int:
    best = 0
    for s in stmts:
        if isinstance(s, While):
            best = max(best, 1 + max_loop_nesting(s.body))
        elif isinstance(s, If):
            best = max(best, max_loop_nesting(s.then), max_loop_nesting(s.orelse))
    return best
