"""The object space: the one place where Acol values get their meaning.

Values are host objects: an Acol Int is a Python ``int`` (unbounded), an
Acol Bool is a Python ``bool``.  Because ``bool`` subclasses ``int`` every
check below tests the exact type.

Every interpreter reaches these functions through an :class:`Ops` table.
``bind("static")`` hands out the module-level functions themselves;
``bind("dynamic", space)`` hands out trampolines that look the operation up
on an :class:`ObjectSpace` instance at every call, so semantics can be
swapped or intercepted without touching the dispatch loop.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable

from .errors import AcolTypeError, DivisionByZero, UnboundVariable

BOUNDARIES = ("static", "dynamic")

# slot value for a variable that has not been assigned yet
UNBOUND = object()


def _kind(v) -> str:
    t = type(v)
    if t is bool:
        return "Bool"
    if t is int:
        return "Int"
    return t.__name__


def _bad(op, *vals):
    kinds = ", ".join(_kind(v) for v in vals)
    return AcolTypeError(f"{op} is not defined for ({kinds})")


def make_int(k):
    if type(k) is not int:
        raise _bad("create_integer", k)
    return k


# arithmetic

def add(a, b):
    if type(a) is int and type(b) is int:
        return a + b
    raise _bad("add", a, b)


def sub(a, b):
    if type(a) is int and type(b) is int:
        return a - b
    raise _bad("sub", a, b)


def mul(a, b):
    if type(a) is int and type(b) is int:
        return a * b
    raise _bad("mul", a, b)


def mod(a, b):
    """Floored modulo: the result takes the sign of the divisor."""
    if type(a) is int and type(b) is int:
        if b == 0:
            raise DivisionByZero(f"{a} mod 0")
        return a % b
    raise _bad("mod", a, b)


# comparison

def lt(a, b):
    if type(a) is int and type(b) is int:
        return a < b
    raise _bad("lt", a, b)


def le(a, b):
    if type(a) is int and type(b) is int:
        return a <= b
    raise _bad("le", a, b)


def gt(a, b):
    if type(a) is int and type(b) is int:
        return a > b
    raise _bad("gt", a, b)


def ge(a, b):
    if type(a) is int and type(b) is int:
        return a >= b
    raise _bad("ge", a, b)


def eq(a, b):
    if type(a) is int and type(b) is int:
        return a == b
    raise _bad("eq", a, b)


def bool_not(v):
    if type(v) is bool:
        return not v
    raise _bad("not", v)


def truthy(v) -> bool:
    """Conditions must be booleans; an Int in a condition is a type error."""
    if type(v) is bool:
        return v
    raise _bad("condition", v)


ARITH = {"add": add, "sub": sub, "mul": mul, "mod": mod}
COMPARE = {"lt": lt, "le": le, "gt": gt, "ge": ge, "eq": eq}


def arith(op: str, a, b):
    return ARITH[op](a, b)


def compare(op: str, a, b):
    return COMPARE[op](a, b)


# environments

def lookup(env: dict, name: str):
    try:
        return env[name]
    except KeyError:
        raise UnboundVariable(name) from None


def store(env: dict, name: str, v) -> dict:
    if type(v) is not int:
        raise _bad("assign", v)
    env[name] = v
    return env


def load_slot(slots: list, index: int, symbols):
    v = slots[index]
    if v is UNBOUND:
        raise UnboundVariable(symbols[index])
    return v


def store_slot(slots: list, index: int, v, symbols=None):
    if type(v) is not int:
        raise _bad("assign", v)
    slots[index] = v


def env_to_slots(symbols, env) -> list:
    """Lay a name-keyed environment out as a slot array indexed by variable ID."""
    env = env or {}
    slots = [UNBOUND] * len(symbols)
    for i, name in enumerate(symbols):
        if name in env:
            slots[i] = make_int(env[name])
    return slots


def slots_to_env(symbols, slots, env=None) -> dict:
    """Inverse of :func:`env_to_slots`; names absent from the symbol table
    are carried over from ``env`` unchanged."""
    out = {k: v for k, v in (env or {}).items() if k not in symbols}
    for name, v in zip(symbols, slots):
        if v is not UNBOUND:
            out[name] = v
    return out


def copy_env(env) -> dict:
    return {name: make_int(v) for name, v in (env or {}).items()}


class ObjectSpace:
    """Default semantics behind the dynamic call boundary.

    Subclass and override methods to observe or alter what the
    interpreters do; every dynamic-mode call is resolved on the instance.
    """

    def create_integer(self, k):
        return make_int(k)

    def add(self, a, b):
        return add(a, b)

    def sub(self, a, b):
        return sub(a, b)

    def mul(self, a, b):
        return mul(a, b)

    def mod(self, a, b):
        return mod(a, b)

    def lt(self, a, b):
        return lt(a, b)

    def le(self, a, b):
        return le(a, b)

    def gt(self, a, b):
        return gt(a, b)

    def ge(self, a, b):
        return ge(a, b)

    def eq(self, a, b):
        return eq(a, b)

    def bool_not(self, v):
        return bool_not(v)

    def truthy(self, v):
        return truthy(v)

    def lookup(self, env, name):
        return lookup(env, name)

    def store(self, env, name, v):
        return store(env, name, v)

    def load_slot(self, slots, index, symbols):
        return load_slot(slots, index, symbols)

    def store_slot(self, slots, index, v, symbols):
        return store_slot(slots, index, v, symbols)


@dataclass(frozen=True)
class Ops:
    """Table of object-space entry points as seen by one interpreter run."""

    create_integer: Callable
    add: Callable
    sub: Callable
    mul: Callable
    mod: Callable
    lt: Callable
    le: Callable
    gt: Callable
    ge: Callable
    eq: Callable
    bool_not: Callable
    truthy: Callable
    lookup: Callable
    store: Callable
    load_slot: Callable
    store_slot: Callable  # (slots, index, value, symbols)

    def binary(self, op: str) -> Callable:
        return getattr(self, op)


STATIC_OPS = Ops(
    create_integer=make_int,
    add=add, sub=sub, mul=mul, mod=mod,
    lt=lt, le=le, gt=gt, ge=ge, eq=eq,
    bool_not=bool_not, truthy=truthy,
    lookup=lookup, store=store,
    load_slot=load_slot,
    store_slot=store_slot,
)


def _dynamic_ops(space: ObjectSpace) -> Ops:
    # each lambda resolves the method on the instance at call time
    return Ops(
        create_integer=lambda k: space.create_integer(k),
        add=lambda a, b: space.add(a, b),
        sub=lambda a, b: space.sub(a, b),
        mul=lambda a, b: space.mul(a, b),
        mod=lambda a, b: space.mod(a, b),
        lt=lambda a, b: space.lt(a, b),
        le=lambda a, b: space.le(a, b),
        gt=lambda a, b: space.gt(a, b),
        ge=lambda a, b: space.ge(a, b),
        eq=lambda a, b: space.eq(a, b),
        bool_not=lambda v: space.bool_not(v),
        truthy=lambda v: space.truthy(v),
        lookup=lambda env, name: space.lookup(env, name),
        store=lambda env, name, v: space.store(env, name, v),
        load_slot=lambda slots, i, symbols: space.load_slot(slots, i, symbols),
        store_slot=lambda slots, i, v, symbols: space.store_slot(slots, i, v, symbols),
    )


def bind(boundary: str = "static", space: ObjectSpace | None = None) -> Ops:
    if boundary == "static":
        if space is not None:
            raise ValueError("a custom object space needs the dynamic boundary")
        return STATIC_OPS
    if boundary == "dynamic":
        return _dynamic_ops(space if space is not None else ObjectSpace())
    raise ValueError(f"unknown call boundary {boundary!r}; expected one of {BOUNDARIES}")


# initial-environment files

_ENV_LINE = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*:?=\s*([+-]?[0-9]+)\s*")


def parse_env(text: str) -> dict:
    """Parse ``name = integer`` lines; ``#`` starts a comment."""
    env = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _ENV_LINE.fullmatch(line)
        if m is None:
            raise ValueError(f"line {lineno}: expected 'name = integer', got {raw.strip()!r}")
        env[m.group(1)] = int(m.group(2))
    return env


def format_env(env: dict) -> str:
    return "".join(f"{name} = {env[name]}\n" for name in sorted(env))
