"""Stack VMs over linear bytecode.

``run_linear`` dispatches on the raw byte array and decodes arguments on
every visit, like a C ``switch`` loop.  ``run_decoded`` first builds a
dense offset-indexed table of already-decoded instructions and dispatches
on that instead.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

from .bytecode import (
    ADD, ASSIGN, END, EQ, GE, GT, JUMP, JUMP_IF_FALSE, JUMP_IF_TRUE,
    LE, LOAD, LT, MOD, MUL, NOT, PUSH1, PUSH4, SUB, BytecodeImage, instr_size, validate,
)
from .errors import StackUnderflow
from .objspace import bind, env_to_slots, slots_to_env

_SIGNED_BYTE = tuple(b - 256 if b > 127 else b for b in range(256))
_U32 = struct.Struct("<I").unpack_from
_I32 = struct.Struct("<i").unpack_from


def run_linear(image: BytecodeImage, env=None, boundary="static", space=None, trace=None,
               check=True) -> dict:
    """Execute ``image`` starting from ``env`` (name -> int) and return the
    final environment.

    ``trace``, if given, is called as ``trace(pc, stack_depth)`` before each
    instruction.  ``check=False`` skips validation for images already known
    to be valid.
    """
    if check:
        validate(image, require_end=False)
    ops = bind(boundary, space)
    symbols = image.symbols
    slots = env_to_slots(symbols, env)
    code = image.code
    n = len(code)
    stack = []
    push = stack.append
    pop = stack.pop
    u32, i32 = _U32, _I32
    signed_byte = _SIGNED_BYTE
    make_int = ops.create_integer
    load_slot, store_slot, truthy = ops.load_slot, ops.store_slot, ops.truthy
    add, sub, mul, mod = ops.add, ops.sub, ops.mul, ops.mod
    lt, le, gt, ge, eq = ops.lt, ops.le, ops.gt, ops.ge, ops.eq
    bool_not = ops.bool_not

    pc = 0
    try:
        while pc < n:
            op = code[pc]
            if trace is not None:
                trace(pc, len(stack))
            if op == LOAD:
                push(load_slot(slots, u32(code, pc + 1)[0], symbols))
                pc += 5
            elif op == PUSH1:
                push(make_int(signed_byte[code[pc + 1]]))
                pc += 2
            elif op == ASSIGN:
                store_slot(slots, u32(code, pc + 1)[0], pop(), symbols)
                pc += 5
            elif op == JUMP_IF_FALSE:
                if truthy(pop()):
                    pc += 5
                else:
                    pc = u32(code, pc + 1)[0]
            elif op == JUMP:
                pc = u32(code, pc + 1)[0]
            elif op == ADD:
                b = pop()
                push(add(pop(), b))
                pc += 1
            elif op == SUB:
                b = pop()
                push(sub(pop(), b))
                pc += 1
            elif op == LT:
                b = pop()
                push(lt(pop(), b))
                pc += 1
            elif op == EQ:
                b = pop()
                push(eq(pop(), b))
                pc += 1
            elif op == MOD:
                b = pop()
                push(mod(pop(), b))
                pc += 1
            elif op == MUL:
                b = pop()
                push(mul(pop(), b))
                pc += 1
            elif op == GT:
                b = pop()
                push(gt(pop(), b))
                pc += 1
            elif op == LE:
                b = pop()
                push(le(pop(), b))
                pc += 1
            elif op == GE:
                b = pop()
                push(ge(pop(), b))
                pc += 1
            elif op == NOT:
                push(bool_not(pop()))
                pc += 1
            elif op == PUSH4:
                push(make_int(i32(code, pc + 1)[0]))
                pc += 5
            elif op == JUMP_IF_TRUE:
                if truthy(pop()):
                    pc = u32(code, pc + 1)[0]
                else:
                    pc += 5
            else:  # END; validate() rejected everything else
                break
    except IndexError:
        # list.pop on an empty stack; slot and code indices were validated
        raise StackUnderflow(f"pc {pc}") from None
    return slots_to_env(symbols, slots, env)


@dataclass(frozen=True)
class DecodedProgram:
    """Offset-indexed instruction table.

    ``entries[pc]`` is ``(opcode, arg, next_pc)`` at every instruction start
    and ``None`` in between.  Variable arguments are slot indices and
    ``symbols`` maps them back to names.
    """

    entries: tuple
    symbols: tuple

    def __len__(self):
        return sum(1 for e in self.entries if e is not None)

    def offsets(self) -> list[int]:
        return [pc for pc, e in enumerate(self.entries) if e is not None]

    def lookup(self, pc: int):
        e = self.entries[pc] if 0 <= pc < len(self.entries) else None
        if e is None:
            raise KeyError(pc)
        return e[:2]


def predecode(image: BytecodeImage) -> DecodedProgram:
    instrs = validate(image, require_end=False)
    entries = [None] * len(image.code)
    for pc, op, arg in instrs:
        entries[pc] = (op, arg, pc + instr_size(op))
    return DecodedProgram(tuple(entries), image.symbols)


def run_decoded(prog: DecodedProgram, env=None, boundary="static", space=None, trace=None) -> dict:
    ops = bind(boundary, space)
    symbols = prog.symbols
    slots = env_to_slots(symbols, env)
    table = prog.entries
    n = len(table)
    stack = []
    push = stack.append
    pop = stack.pop
    make_int = ops.create_integer
    load_slot, store_slot, truthy = ops.load_slot, ops.store_slot, ops.truthy
    add, sub, mul, mod = ops.add, ops.sub, ops.mul, ops.mod
    lt, le, gt, ge, eq = ops.lt, ops.le, ops.gt, ops.ge, ops.eq
    bool_not = ops.bool_not

    pc = 0
    try:
        while pc < n:
            op, arg, nxt = table[pc]
            if trace is not None:
                trace(pc, len(stack))
            if op == LOAD:
                push(load_slot(slots, arg, symbols))
            elif op == PUSH1 or op == PUSH4:
                push(make_int(arg))
            elif op == ASSIGN:
                store_slot(slots, arg, pop(), symbols)
            elif op == JUMP_IF_FALSE:
                if not truthy(pop()):
                    pc = arg
                    continue
            elif op == JUMP:
                pc = arg
                continue
            elif op == ADD:
                b = pop()
                push(add(pop(), b))
            elif op == SUB:
                b = pop()
                push(sub(pop(), b))
            elif op == LT:
                b = pop()
                push(lt(pop(), b))
            elif op == EQ:
                b = pop()
                push(eq(pop(), b))
            elif op == MOD:
                b = pop()
                push(mod(pop(), b))
            elif op == MUL:
                b = pop()
                push(mul(pop(), b))
            elif op == GT:
                b = pop()
                push(gt(pop(), b))
            elif op == LE:
                b = pop()
                push(le(pop(), b))
            elif op == GE:
                b = pop()
                push(ge(pop(), b))
            elif op == NOT:
                push(bool_not(pop()))
            elif op == JUMP_IF_TRUE:
                if truthy(pop()):
                    pc = arg
                    continue
            elif op == END:
                break
            pc = nxt
    except IndexError:
        raise StackUnderflow(f"pc {pc}") from None
    return slots_to_env(symbols, slots, env)


def stack_high_water(image: BytecodeImage, env=None) -> int:
    """Largest evaluation-stack depth reached while running ``image``."""
    best = 0

    def trace(pc, depth):
        nonlocal best
        if depth > best:
            best = depth

    run_linear(image, env, trace=trace)
    return best

