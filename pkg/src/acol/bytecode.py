"""Linear bytecode: instruction set, compiler, validator, assembler and the
``.acbc`` container format.

Instruction set (argument widths in bytes; 4-byte fields little-endian)::

     0 end                       197 mod
    10 jump           pc:4       198 mul
    11 jump_if_false  pc:4       199 sub
    12 jump_if_true   pc:4       200 add
    20 push1          int:1      240 not
    21 push4          int:4      251 eq   252 le   253 lt
    40 load           var:4      254 ge   255 gt
    45 assign         var:4

PC and variable-ID arguments are unsigned; push arguments are two's
complement.  Conditional jumps pop the tested value.
"""
from __future__ import annotations

import re
import struct
from dataclasses import dataclass

from .errors import AsmError, LiteralOutOfRange, MalformedImage
from .nodes import INT32_MAX, INT32_MIN, Assign, BinOp, If, IntLit, Not, Var, While

END = 0
JUMP = 10
JUMP_IF_FALSE = 11
JUMP_IF_TRUE = 12
PUSH1 = 20
PUSH4 = 21
LOAD = 40
ASSIGN = 45
MOD = 197
MUL = 198
SUB = 199
ADD = 200
NOT = 240
EQ = 251
LE = 252
LT = 253
GE = 254
GT = 255

MNEMONICS = {
    END: "end", JUMP: "jump", JUMP_IF_FALSE: "jump_if_false", JUMP_IF_TRUE: "jump_if_true",
    PUSH1: "push1", PUSH4: "push4", LOAD: "load", ASSIGN: "assign",
    MOD: "mod", MUL: "mul", SUB: "sub", ADD: "add", NOT: "not",
    EQ: "eq", LE: "le", LT: "lt", GE: "ge", GT: "gt",
}
OPCODES = {name: code for code, name in MNEMONICS.items()}

# argument kind per opcode: "pc", "i8", "i32", "var" or None
ARG_KIND = {JUMP: "pc", JUMP_IF_FALSE: "pc", JUMP_IF_TRUE: "pc",
            PUSH1: "i8", PUSH4: "i32", LOAD: "var", ASSIGN: "var"}
ARG_WIDTH = {"pc": 4, "i8": 1, "i32": 4, "var": 4, None: 0}

# operator name <-> opcode for binary operators and not
BINARY_OPCODES = {"mod": MOD, "mul": MUL, "sub": SUB, "add": ADD,
                  "eq": EQ, "le": LE, "lt": LT, "ge": GE, "gt": GT}
OPCODE_OPS = {code: name for name, code in BINARY_OPCODES.items()}

_U32 = struct.Struct("<I")
_I32 = struct.Struct("<i")


def instr_size(opcode: int) -> int:
    return 1 + ARG_WIDTH[ARG_KIND.get(opcode)]


@dataclass(frozen=True)
class BytecodeImage:
    code: bytes
    symbols: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "code", bytes(self.code))
        object.__setattr__(self, "symbols", tuple(self.symbols))


# decoding and validation

def decode(code: bytes):
    """Decode a byte string into ``[(offset, opcode, arg), ...]``.

    ``arg`` is None, a signed integer for pushes, an unsigned PC or a
    variable ID.  Raises MalformedImage on unknown opcodes or truncation.
    """
    out = []
    pc, n = 0, len(code)
    while pc < n:
        op = code[pc]
        if op not in MNEMONICS:
            raise MalformedImage(f"unknown opcode {op} at offset {pc}")
        kind = ARG_KIND.get(op)
        width = ARG_WIDTH[kind]
        if pc + 1 + width > n:
            raise MalformedImage(f"truncated argument for {MNEMONICS[op]} at offset {pc}")
        raw = code[pc + 1:pc + 1 + width]
        if kind is None:
            arg = None
        elif kind == "i8" or kind == "i32":
            arg = int.from_bytes(raw, "little", signed=True)
        else:
            arg = int.from_bytes(raw, "little")
        out.append((pc, op, arg))
        pc += 1 + width
    return out


def validate(image: BytecodeImage, require_end: bool = True):
    """Check the structural invariants of an image; return its decoding."""
    instrs = decode(image.code)
    starts = {off for off, _, _ in instrs}
    starts.add(len(image.code))
    nsyms = len(image.symbols)
    if len(set(image.symbols)) != nsyms:
        raise MalformedImage("duplicate names in symbol table")
    for off, op, arg in instrs:
        kind = ARG_KIND.get(op)
        if kind == "pc" and arg not in starts:
            raise MalformedImage(f"jump at offset {off} targets {arg}, not an instruction start")
        if kind == "var" and arg >= nsyms:
            raise MalformedImage(f"variable id {arg} at offset {off} out of range ({nsyms} symbols)")
    if require_end and (not instrs or instrs[-1][1] != END):
        raise MalformedImage("image does not end with the end sentinel")
    return instrs


# compilation

class _LinearCompiler:
    def __init__(self):
        self.code = bytearray()
        self.ids: dict[str, int] = {}

    def var(self, name):
        if name not in self.ids:
            self.ids[name] = len(self.ids)
        return self.ids[name]

    def emit(self, op, kind=None, arg=None):
        self.code.append(op)
        if kind == "i8":
            self.code += arg.to_bytes(1, "little", signed=True)
        elif kind == "i32":
            self.code += _I32.pack(arg)
        elif kind is not None:
            self.code += _U32.pack(arg)

    def emit_jump(self, op) -> int:
        """Emit a jump with a placeholder target; return the patch position."""
        self.code.append(op)
        at = len(self.code)
        self.code += b"\0\0\0\0"
        return at

    def patch(self, at, target):
        self.code[at:at + 4] = _U32.pack(target)

    def expr(self, e):
        t = type(e)
        if t is IntLit:
            v = e.value
            if -128 <= v <= 127:
                self.emit(PUSH1, "i8", v)
            elif INT32_MIN <= v <= INT32_MAX:
                self.emit(PUSH4, "i32", v)
            else:
                raise LiteralOutOfRange(v)
        elif t is Var:
            self.emit(LOAD, "var", self.var(e.name))
        elif t is BinOp:
            self.expr(e.lhs)
            self.expr(e.rhs)
            self.emit(BINARY_OPCODES[e.op])
        elif t is Not:
            self.expr(e.operand)
            self.emit(NOT)
        else:
            raise TypeError(f"not an expression node: {e!r}")

    def block(self, stmts):
        for s in stmts:
            t = type(s)
            if t is Assign:
                self.expr(s.expr)
                self.emit(ASSIGN, "var", self.var(s.target))
            elif t is If:
                self.expr(s.cond)
                to_else = self.emit_jump(JUMP_IF_FALSE)
                self.block(s.then)
                to_join = self.emit_jump(JUMP)
                self.patch(to_else, len(self.code))
                self.block(s.orelse)
                self.patch(to_join, len(self.code))
            elif t is While:
                head = len(self.code)
                self.expr(s.cond)
                to_exit = self.emit_jump(JUMP_IF_FALSE)
                self.block(s.body)
                self.emit(JUMP, "pc", head)
                self.patch(to_exit, len(self.code))
            else:
                raise TypeError(f"not a statement node: {s!r}")


def compile_linear(program) -> BytecodeImage:
    c = _LinearCompiler()
    c.block(program)
    c.emit(END)
    return BytecodeImage(bytes(c.code), tuple(c.ids))


# text form

def disassemble(image: BytecodeImage) -> str:
    instrs = decode(image.code)
    symbols = image.symbols
    lines = []
    seen = []
    for _, op, arg in instrs:
        if ARG_KIND.get(op) == "var":
            if arg >= len(symbols):
                raise MalformedImage(f"variable id {arg} out of range")
            if symbols[arg] not in seen:
                seen.append(symbols[arg])
    if tuple(seen) != symbols:
        # symbol order is not recoverable from the listing alone
        lines.append(".symbols " + " ".join(symbols) if symbols else ".symbols")
    for off, op, arg in instrs:
        kind = ARG_KIND.get(op)
        if kind is None:
            lines.append(f"{off}: {MNEMONICS[op]}")
        elif kind == "var":
            lines.append(f"{off}: {MNEMONICS[op]} {symbols[arg]}")
        else:
            lines.append(f"{off}: {MNEMONICS[op]} {arg}")
    return "\n".join(lines) + "\n"


_ASM_LINE = re.compile(r"(?:(\d+)\s*:\s*)?([a-z_0-9]+)(?:\s+(\S+))?")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def assemble(text: str) -> BytecodeImage:
    """Inverse of :func:`disassemble`.  Offsets are optional but checked."""
    symbols: list[str] = []
    ids: dict[str, int] = {}
    parsed = []
    pc = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith(".symbols"):
            if parsed or symbols:
                raise AsmError(lineno, ".symbols must come first")
            for name in line.split()[1:]:
                if not _NAME.fullmatch(name) or name in ids:
                    raise AsmError(lineno, f"bad symbol {name!r}")
                ids[name] = len(symbols)
                symbols.append(name)
            continue
        m = _ASM_LINE.fullmatch(line)
        if m is None:
            raise AsmError(lineno, f"cannot parse {raw.strip()!r}")
        off, mnem, arg = m.groups()
        if mnem not in OPCODES:
            raise AsmError(lineno, f"unknown mnemonic {mnem!r}")
        op = OPCODES[mnem]
        if off is not None and int(off) != pc:
            raise AsmError(lineno, f"offset {off} does not match position {pc}")
        kind = ARG_KIND.get(op)
        if (kind is None) != (arg is None):
            raise AsmError(lineno, f"{mnem} takes {'no' if kind is None else 'one'} argument")
        parsed.append((lineno, pc, op, kind, arg))
        pc += instr_size(op)

    starts = {p for _, p, _, _, _ in parsed} | {pc}
    code = bytearray()
    for lineno, _, op, kind, arg in parsed:
        code.append(op)
        if kind is None:
            continue
        if kind == "var":
            if not _NAME.fullmatch(arg):
                raise AsmError(lineno, f"bad variable name {arg!r}")
            if arg not in ids:
                ids[arg] = len(symbols)
                symbols.append(arg)
            code += _U32.pack(ids[arg])
            continue
        try:
            value = int(arg)
        except ValueError:
            raise AsmError(lineno, f"expected an integer, got {arg!r}") from None
        if kind == "pc":
            if value not in starts:
                raise AsmError(lineno, f"invalid jump target {value}")
            code += _U32.pack(value)
        elif kind == "i8":
            if not -128 <= value <= 127:
                raise AsmError(lineno, f"push1 argument {value} out of range")
            code += value.to_bytes(1, "little", signed=True)
        else:
            if not INT32_MIN <= value <= INT32_MAX:
                raise AsmError(lineno, f"push4 argument {value} out of range")
            code += _I32.pack(value)
    return BytecodeImage(bytes(code), tuple(symbols))


# .acbc container

MAGIC = b"ACBC"
VERSION = 1


def dump_acbc(image: BytecodeImage) -> bytes:
    out = bytearray(MAGIC)
    out.append(VERSION)
    out += _U32.pack(len(image.symbols))
    for name in image.symbols:
        raw = name.encode("utf-8")
        out += struct.pack("<H", len(raw))
        out += raw
    out += _U32.pack(len(image.code))
    out += image.code
    return bytes(out)


def load_acbc(data: bytes) -> BytecodeImage:
    data = bytes(data)
    if data[:4] != MAGIC:
        raise MalformedImage("not an .acbc file (bad magic)")
    if len(data) < 5 or data[4] != VERSION:
        raise MalformedImage(f"unsupported .acbc version {data[4] if len(data) > 4 else None}")
    pos = 5

    def take(n):
        nonlocal pos
        if pos + n > len(data):
            raise MalformedImage("truncated .acbc file")
        chunk = data[pos:pos + n]
        pos += n
        return chunk

    (count,) = _U32.unpack(take(4))
    symbols = []
    for _ in range(count):
        (length,) = struct.unpack("<H", take(2))
        try:
            symbols.append(take(length).decode("utf-8"))
        except UnicodeDecodeError as exc:
            raise MalformedImage(f"symbol name is not UTF-8: {exc}") from None
    (code_len,) = _U32.unpack(take(4))
    code = take(code_len)
    if pos != len(data):
        raise MalformedImage(f"{len(data) - pos} trailing bytes after code section")
    return BytecodeImage(code, tuple(symbols))


def write_acbc(path, image: BytecodeImage):
    with open(path, "wb") as f:
        f.write(dump_acbc(image))


def read_acbc(path) -> BytecodeImage:
    with open(path, "rb") as f:
        return load_acbc(f.read())
