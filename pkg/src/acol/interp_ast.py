"""Reference tree-walking interpreter.

Statement lists run in a host loop and ``while`` re-tests its condition in
a host loop too, so host recursion grows with block nesting only, never
with the number of iterations.  Every other backend is checked against
this one.
"""
from __future__ import annotations

from .nodes import Assign, BinOp, If, IntLit, Not, Var, While
from .objspace import STATIC_OPS, Ops, bind, copy_env


def eval_expr(e, env: dict, ops: Ops = STATIC_OPS):
    t = type(e)
    if t is Var:
        return ops.lookup(env, e.name)
    if t is IntLit:
        return ops.create_integer(e.value)
    if t is BinOp:
        # left operand first, so error reporting is deterministic
        a = eval_expr(e.lhs, env, ops)
        b = eval_expr(e.rhs, env, ops)
        return getattr(ops, e.op)(a, b)
    if t is Not:
        return ops.bool_not(eval_expr(e.operand, env, ops))
    raise TypeError(f"not an expression node: {e!r}")


def exec_block(stmts, env: dict, ops: Ops = STATIC_OPS) -> dict:
    for s in stmts:
        t = type(s)
        if t is Assign:
            ops.store(env, s.target, eval_expr(s.expr, env, ops))
        elif t is While:
            cond, body = s.cond, s.body
            while ops.truthy(eval_expr(cond, env, ops)):
                exec_block(body, env, ops)
        elif t is If:
            if ops.truthy(eval_expr(s.cond, env, ops)):
                exec_block(s.then, env, ops)
            else:
                exec_block(s.orelse, env, ops)
        else:
            raise TypeError(f"not a statement node: {s!r}")
    return env


def run_ast(program, env=None, boundary: str = "static", space=None) -> dict:
    """Run ``program`` on a copy of ``env`` and return the final environment."""
    return exec_block(program, copy_env(env), bind(boundary, space))
