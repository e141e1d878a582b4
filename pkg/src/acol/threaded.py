"""Successor-linked program graphs and their executors.

Every node names the node that runs after it.  A loop body's last node
points back at the loop, so the infinite unrolled tree a loop denotes is
stored as a finite graph with a back-edge.  Nodes live in an arena (a
tuple) and refer to each other by index.

Two flavors:

* ``ast``: statement nodes carrying expression trees, which the executor
  evaluates recursively.
* ``bc``: one node per stack operation with an explicit value stack; loops
  become a condition chain ending in an :class:`IfOp` whose else-edge is the
  loop exit.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .frontend import format_expr
from .interp_ast import eval_expr
from .nodes import Assign, BinOp, If, IntLit, Not, Var, While
from .objspace import bind, copy_env
from .errors import StackUnderflow


class End(NamedTuple):
    pass


# ast flavor

class AssignStep(NamedTuple):
    var: str
    expr: object
    next: int


class IfStep(NamedTuple):
    cond: object
    then: int
    orelse: int


class WhileStep(NamedTuple):
    cond: object
    body: int
    exit: int


# bc flavor

class Push(NamedTuple):
    value: int
    next: int


class Load(NamedTuple):
    var: str
    next: int


class Store(NamedTuple):
    var: str
    next: int


class Add(NamedTuple):
    next: int


class Sub(NamedTuple):
    next: int


class Mul(NamedTuple):
    next: int


class Mod(NamedTuple):
    next: int


class NotOp(NamedTuple):
    next: int


class Cmp(NamedTuple):
    op: str
    next: int


class IfOp(NamedTuple):
    then: int
    orelse: int


_ARITH_NODES = {"add": Add, "sub": Sub, "mul": Mul, "mod": Mod}

# fields holding successor indices, in traversal order
_REFS = {
    End: (), AssignStep: ("next",), IfStep: ("then", "orelse"), WhileStep: ("body", "exit"),
    Push: ("next",), Load: ("next",), Store: ("next",), Add: ("next",), Sub: ("next",),
    Mul: ("next",), Mod: ("next",), NotOp: ("next",), Cmp: ("next",), IfOp: ("then", "orelse"),
}


def successors(node) -> tuple:
    return tuple(getattr(node, f) for f in _REFS[type(node)])


@dataclass(frozen=True)
class ThreadedGraph:
    flavor: str
    nodes: tuple
    entry: int

    def __len__(self):
        return len(self.nodes)


class _Arena:
    """Mutable build area; slots are ``[cls, field, ...]`` lists so that
    back-edges can be patched after the loop body is linked."""

    def __init__(self):
        self.slots: list[list] = []
        self.end = self.new(End)

    def new(self, cls, *fields) -> int:
        self.slots.append([cls, *fields])
        return len(self.slots) - 1

    def freeze(self, entry, flavor) -> ThreadedGraph:
        # renumber in depth-first preorder from the entry so listings read top-down
        order, seen, todo = [], set(), [entry]
        while todo:
            i = todo.pop()
            if i in seen:
                continue
            seen.add(i)
            order.append(i)
            cls, *fields = self.slots[i]
            refs = [fields[cls._fields.index(f)] for f in _REFS[cls]]
            todo.extend(reversed(refs))
        new_index = {old: new for new, old in enumerate(order)}
        nodes = []
        for old in order:
            cls, *fields = self.slots[old]
            vals = dict(zip(cls._fields, fields))
            for f in _REFS[cls]:
                vals[f] = new_index[vals[f]]
            nodes.append(cls(**vals))
        return ThreadedGraph(flavor, tuple(nodes), 0)


def _link_ast(arena: _Arena, stmts, succ: int) -> int:
    entry = succ
    for s in reversed(stmts):
        t = type(s)
        if t is Assign:
            entry = arena.new(AssignStep, s.target, s.expr, entry)
        elif t is If:
            then = _link_ast(arena, s.then, entry)
            orelse = _link_ast(arena, s.orelse, entry)
            entry = arena.new(IfStep, s.cond, then, orelse)
        elif t is While:
            w = arena.new(WhileStep, s.cond, None, entry)
            arena.slots[w][2] = _link_ast(arena, s.body, w)
            entry = w
        else:
            raise TypeError(f"not a statement node: {s!r}")
    return entry


def _link_expr(arena: _Arena, e, succ: int) -> int:
    t = type(e)
    if t is IntLit:
        return arena.new(Push, e.value, succ)
    if t is Var:
        return arena.new(Load, e.name, succ)
    if t is Not:
        return _link_expr(arena, e.operand, arena.new(NotOp, succ))
    if t is BinOp:
        cls = _ARITH_NODES.get(e.op)
        op_node = arena.new(cls, succ) if cls else arena.new(Cmp, e.op, succ)
        return _link_expr(arena, e.lhs, _link_expr(arena, e.rhs, op_node))
    raise TypeError(f"not an expression node: {e!r}")


def _link_bc(arena: _Arena, stmts, succ: int) -> int:
    entry = succ
    for s in reversed(stmts):
        t = type(s)
        if t is Assign:
            entry = _link_expr(arena, s.expr, arena.new(Store, s.target, entry))
        elif t is If:
            then = _link_bc(arena, s.then, entry)
            orelse = _link_bc(arena, s.orelse, entry)
            entry = _link_expr(arena, s.cond, arena.new(IfOp, then, orelse))
        elif t is While:
            branch = arena.new(IfOp, None, entry)
            head = _link_expr(arena, s.cond, branch)
            arena.slots[branch][1] = _link_bc(arena, s.body, head)
            entry = head
        else:
            raise TypeError(f"not a statement node: {s!r}")
    return entry


def build_threaded(program, flavor: str = "ast") -> ThreadedGraph:
    arena = _Arena()
    if flavor == "ast":
        entry = _link_ast(arena, program, arena.end)
    elif flavor == "bc":
        entry = _link_bc(arena, program, arena.end)
    else:
        raise ValueError(f"unknown flavor {flavor!r}; expected 'ast' or 'bc'")
    return arena.freeze(entry, flavor)


def run_threaded_ast(g: ThreadedGraph, env=None, boundary="static", space=None) -> dict:
    ops = bind(boundary, space)
    env = copy_env(env)
    store, truthy = ops.store, ops.truthy
    nodes = g.nodes
    node = nodes[g.entry]
    while True:
        t = type(node)
        if t is AssignStep:
            store(env, node.var, eval_expr(node.expr, env, ops))
            node = nodes[node.next]
        elif t is WhileStep:
            node = nodes[node.body if truthy(eval_expr(node.cond, env, ops)) else node.exit]
        elif t is IfStep:
            node = nodes[node.then if truthy(eval_expr(node.cond, env, ops)) else node.orelse]
        elif t is End:
            return env
        else:
            raise TypeError(f"{type(node).__name__} node in an ast-flavor graph")


def run_threaded_bc(g: ThreadedGraph, env=None, boundary="static", space=None) -> dict:
    ops = bind(boundary, space)
    env = copy_env(env)
    make_int, lookup, store, truthy = ops.create_integer, ops.lookup, ops.store, ops.truthy
    cmp = {"lt": ops.lt, "le": ops.le, "gt": ops.gt, "ge": ops.ge, "eq": ops.eq}
    add, sub, mul, mod, bool_not = ops.add, ops.sub, ops.mul, ops.mod, ops.bool_not
    nodes = g.nodes
    stack = []
    push = stack.append
    pop = stack.pop
    node = nodes[g.entry]
    try:
        while True:
            t = type(node)
            if t is Load:
                push(lookup(env, node.var))
            elif t is Push:
                push(make_int(node.value))
            elif t is Store:
                store(env, node.var, pop())
            elif t is IfOp:
                node = nodes[node.then if truthy(pop()) else node.orelse]
                continue
            elif t is Add:
                b = pop()
                push(add(pop(), b))
            elif t is Sub:
                b = pop()
                push(sub(pop(), b))
            elif t is Cmp:
                b = pop()
                push(cmp[node.op](pop(), b))
            elif t is Mod:
                b = pop()
                push(mod(pop(), b))
            elif t is Mul:
                b = pop()
                push(mul(pop(), b))
            elif t is NotOp:
                push(bool_not(pop()))
            elif t is End:
                return env
            else:
                raise TypeError(f"{type(node).__name__} node in a bc-flavor graph")
            node = nodes[node.next]
    except IndexError:
        raise StackUnderflow(f"{type(node).__name__} node") from None


# inspection

def back_edges(g: ThreadedGraph) -> set:
    """Edges ``(src, dst)`` that close a cycle in a depth-first walk."""
    on_path, done, edges = set(), set(), set()
    todo = [(g.entry, iter(successors(g.nodes[g.entry])))]
    on_path.add(g.entry)
    while todo:
        src, it = todo[-1]
        dst = next(it, None)
        if dst is None:
            todo.pop()
            on_path.discard(src)
            done.add(src)
        elif dst in on_path:
            edges.add((src, dst))
        elif dst not in done:
            on_path.add(dst)
            todo.append((dst, iter(successors(g.nodes[dst]))))
    return edges


def _describe(node) -> str:
    t = type(node)
    if t is AssignStep:
        return f"assign {node.var} := {format_expr(node.expr)}"
    if t is IfStep:
        return f"if {format_expr(node.cond)}"
    if t is WhileStep:
        return f"while {format_expr(node.cond)}"
    if t is Push:
        return f"push {node.value}"
    if t in (Load, Store):
        return f"{t.__name__.lower()} {node.var}"
    if t is Cmp:
        return node.op
    if t is NotOp:
        return "not"
    if t is IfOp:
        return "if"
    return t.__name__.lower()


def format_graph(g: ThreadedGraph) -> str:
    """One line per node with labelled successor edges; loop edges are
    marked ``(loop)`` rather than unrolled."""
    loops = back_edges(g)
    lines = [f"# {g.flavor} graph, {len(g.nodes)} nodes, entry {g.entry}"]
    for i, node in enumerate(g.nodes):
        parts = []
        for f in _REFS[type(node)]:
            dst = getattr(node, f)
            mark = " (loop)" if (i, dst) in loops else ""
            parts.append(f"{f} -> {dst}{mark}" if f != "next" else f"-> {dst}{mark}")
        tail = ("  " + ", ".join(parts)) if parts else ""
        lines.append(f"{i}: {_describe(node)}{tail}")
    return "\n".join(lines) + "\n"
