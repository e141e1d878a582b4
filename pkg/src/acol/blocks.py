"""Sub-bytecode programs: one linear sequence per block.

A program is a ``main`` sequence plus a table of numbered blocks.  Two
extra opcodes suspend the current sequence::

    1 then_id else_id    pop the condition, run one block on a fresh stack
    2 cond_id body_id    loop: run cond block (must leave one Bool), then body

Arguments are stored decoded: integers for literals and block IDs, names
for variables.  Inside a block execution only moves forward.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .bytecode import (
    ADD, ASSIGN, BINARY_OPCODES, EQ, GE, GT, LE, LOAD, LT, MNEMONICS, MOD, MUL, NOT,
    PUSH1, PUSH4, SUB,
)
from .errors import (
    ConditionArity, LiteralOutOfRange, MalformedImage, StackUnderflow, UnknownBlockId,
)
from .nodes import INT32_MAX, INT32_MIN, Assign, BinOp, If, IntLit, Not, Var, While
from .objspace import bind, copy_env

IF_BLOCK = 1
WHILE_BLOCK = 2

# number of inline arguments per opcode
_ARITY = {PUSH1: 1, PUSH4: 1, LOAD: 1, ASSIGN: 1, IF_BLOCK: 2, WHILE_BLOCK: 2}
_PLAIN = set(MNEMONICS) - {0, 10, 11, 12}


@dataclass(frozen=True)
class BlockProgram:
    main: tuple
    blocks: dict = field(default_factory=dict)


class _BlockCompiler:
    def __init__(self):
        self.blocks: dict[int, tuple] = {}
        self.next_id = 0

    def fresh(self) -> int:
        i = self.next_id
        self.next_id += 1
        return i

    def expr(self, e, out):
        t = type(e)
        if t is IntLit:
            v = e.value
            if -128 <= v <= 127:
                out += (PUSH1, v)
            elif INT32_MIN <= v <= INT32_MAX:
                out += (PUSH4, v)
            else:
                raise LiteralOutOfRange(v)
        elif t is Var:
            out += (LOAD, e.name)
        elif t is BinOp:
            self.expr(e.lhs, out)
            self.expr(e.rhs, out)
            out.append(BINARY_OPCODES[e.op])
        elif t is Not:
            self.expr(e.operand, out)
            out.append(NOT)
        else:
            raise TypeError(f"not an expression node: {e!r}")

    def seq(self, stmts) -> list:
        out: list = []
        for s in stmts:
            t = type(s)
            if t is Assign:
                self.expr(s.expr, out)
                out += (ASSIGN, s.target)
            elif t is While:
                cond_id, body_id = self.fresh(), self.fresh()
                out += (WHILE_BLOCK, cond_id, body_id)
                cond: list = []
                self.expr(s.cond, cond)
                self.blocks[cond_id] = tuple(cond)
                self.blocks[body_id] = tuple(self.seq(s.body))
            elif t is If:
                self.expr(s.cond, out)
                then_id, else_id = self.fresh(), self.fresh()
                out += (IF_BLOCK, then_id, else_id)
                self.blocks[then_id] = tuple(self.seq(s.then))
                self.blocks[else_id] = tuple(self.seq(s.orelse))
            else:
                raise TypeError(f"not a statement node: {s!r}")
        return out


def compile_blocks(program) -> BlockProgram:
    c = _BlockCompiler()
    main = tuple(c.seq(program))
    return BlockProgram(main, dict(sorted(c.blocks.items())))


def _instructions(seq):
    """Yield ``(opcode, args)`` pairs of a flat sequence."""
    i, n = 0, len(seq)
    while i < n:
        op = seq[i]
        if op not in _PLAIN and op not in (IF_BLOCK, WHILE_BLOCK):
            raise MalformedImage(f"opcode {op!r} not allowed in a block sequence")
        k = _ARITY.get(op, 0)
        if i + 1 + k > n:
            raise MalformedImage(f"truncated arguments for opcode {op}")
        yield op, seq[i + 1:i + 1 + k]
        i += 1 + k


def validate_blocks(prog: BlockProgram):
    """Check block references and that condition blocks cannot touch the
    environment (no assign, no nested if/while)."""
    cond_ids = set()
    for seq in (prog.main, *prog.blocks.values()):
        for op, args in _instructions(seq):
            if op in (IF_BLOCK, WHILE_BLOCK):
                for b in args:
                    if b not in prog.blocks:
                        raise UnknownBlockId(b)
                if op == WHILE_BLOCK:
                    cond_ids.add(args[0])
    for b in cond_ids:
        for op, _ in _instructions(prog.blocks[b]):
            if op in (ASSIGN, IF_BLOCK, WHILE_BLOCK):
                raise MalformedImage(f"condition block {b} contains opcode {op}")


def run_blocks(prog: BlockProgram, env=None, boundary="static", space=None, check=True) -> dict:
    if check:
        validate_blocks(prog)
    ops = bind(boundary, space)
    env = copy_env(env)
    blocks = prog.blocks
    make_int, lookup, store, truthy = ops.create_integer, ops.lookup, ops.store, ops.truthy
    add, sub, mul, mod = ops.add, ops.sub, ops.mul, ops.mod
    lt, le, gt, ge, eq = ops.lt, ops.le, ops.gt, ops.ge, ops.eq
    bool_not = ops.bool_not

    def execute(seq, stack):
        push = stack.append
        pop = stack.pop
        i, n = 0, len(seq)
        while i < n:
            op = seq[i]
            if op == LOAD:
                push(lookup(env, seq[i + 1]))
                i += 2
            elif op == PUSH1 or op == PUSH4:
                push(make_int(seq[i + 1]))
                i += 2
            elif op == ASSIGN:
                store(env, seq[i + 1], pop())
                i += 2
            elif op == ADD:
                b = pop()
                push(add(pop(), b))
                i += 1
            elif op == SUB:
                b = pop()
                push(sub(pop(), b))
                i += 1
            elif op == LT:
                b = pop()
                push(lt(pop(), b))
                i += 1
            elif op == EQ:
                b = pop()
                push(eq(pop(), b))
                i += 1
            elif op == WHILE_BLOCK:
                cond_id = seq[i + 1]
                cond, body = blocks[cond_id], blocks[seq[i + 2]]
                while True:
                    result = execute(cond, [])
                    if len(result) != 1:
                        raise ConditionArity(cond_id, len(result))
                    if not truthy(result[0]):
                        break
                    execute(body, [])
                i += 3
            elif op == IF_BLOCK:
                chosen = seq[i + 1] if truthy(pop()) else seq[i + 2]
                execute(blocks[chosen], [])
                i += 3
            elif op == MOD:
                b = pop()
                push(mod(pop(), b))
                i += 1
            elif op == MUL:
                b = pop()
                push(mul(pop(), b))
                i += 1
            elif op == GT:
                b = pop()
                push(gt(pop(), b))
                i += 1
            elif op == LE:
                b = pop()
                push(le(pop(), b))
                i += 1
            elif op == GE:
                b = pop()
                push(ge(pop(), b))
                i += 1
            elif op == NOT:
                push(bool_not(pop()))
                i += 1
            else:
                raise MalformedImage(f"opcode {op!r} not allowed in a block sequence")
        return stack

    try:
        execute(prog.main, [])
    except IndexError:
        raise StackUnderflow("block program") from None
    return env


# text dump: "main: [...]" then one "N: [...]" line per block

def format_blocks(prog: BlockProgram) -> str:
    def show(seq):
        return "[" + ", ".join(str(x) for x in seq) + "]"

    lines = [f"main: {show(prog.main)}"]
    lines += [f"{bid}: {show(seq)}" for bid, seq in sorted(prog.blocks.items())]
    return "\n".join(lines) + "\n"


_DUMP_LINE = re.compile(r"\s*(main|\d+)\s*:\s*\[(.*)\]\s*")


def parse_blocks(text: str) -> BlockProgram:
    main = None
    blocks = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        if not raw.strip():
            continue
        m = _DUMP_LINE.fullmatch(raw)
        if m is None:
            raise MalformedImage(f"line {lineno}: cannot parse {raw!r}")
        items = [x.strip() for x in m.group(2).split(",") if x.strip()]
        seq = tuple(int(x) if re.fullmatch(r"-?\d+", x) else x for x in items)
        if m.group(1) == "main":
            main = seq
        else:
            blocks[int(m.group(1))] = seq
    if main is None:
        raise MalformedImage("block dump has no main sequence")
    return BlockProgram(main, blocks)
