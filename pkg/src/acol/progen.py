"""Seeded generator of random, always-terminating Acol programs.

Random numbers come from a fixed, portable recurrence so that a seed
names the same program in every implementation:

* state initialisation (SplitMix64 finaliser, all arithmetic mod 2**64)::

      z = seed + 0x9E3779B97F4A7C15
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
      z = (z ^ (z >> 27)) * 0x94D049BB133111EB
      state = z ^ (z >> 31)          # replaced by 1 if it is 0

* step (xorshift64*)::

      x ^= x >> 12;  x ^= x << 25;  x ^= x >> 27
      state = x;  output = x * 0x2545F4914F6CDD1D

* ``below(n)``: draw outputs until one is ``< 2**64 - (2**64 mod n)``,
  return it ``mod n``.  ``uniform(lo, hi) = lo + below(hi - lo + 1)``.

Program recipe (draws happen in exactly this order):

* block at depth ``d`` (top level is 1): ``count = uniform(stmts_min,
  stmts_max)``; per statement, if ``d < depth_cap`` draw ``below(3)``
  selecting while / if / assign, otherwise it is an assignment (no draw).
* assignment: ``ident = below(5)``, then an arithmetic tree.
* if: condition tree, then-block at ``d + 1``, else-block at ``d + 1``.
* while: body block at ``d + 1``; emitted as ``_lc<d> := 0;`` followed by
  ``while _lc<d> < loop_iters { _lc<d> := _lc<d> + 1; body }``.
* arithmetic tree with budget ``b``: if ``b == 0`` draw ``below(2)``
  (identifier, constant); otherwise draw ``below(4)`` (identifier,
  constant, ``+``, ``-``), operands get budget ``b - 1``, left first.
  Identifier: ``below(5)``; constant: ``uniform(const_min, const_max)``.
* condition tree: ``below(5)`` over (<, <=, >, >=, ==), then two
  arithmetic trees with budget ``max(b - 1, 0)``.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

from .nodes import COMPARE_OPS, Assign, BinOp, If, IntLit, Var, While

MASK64 = (1 << 64) - 1
COUNTER_PREFIX = "_lc"
DEFAULT_IDENTS = ("v0", "v1", "v2", "v3", "v4")


class XorShift64Star:
    def __init__(self, seed: int):
        z = (seed + 0x9E3779B97F4A7C15) & MASK64
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        z ^= z >> 31
        self.state = z or 1

    def next(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * 0x2545F4914F6CDD1D) & MASK64

    def below(self, n: int) -> int:
        if n <= 0:
            raise ValueError("below() needs a positive bound")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next()
            if r < limit:
                return r % n

    def uniform(self, lo: int, hi: int) -> int:
        return lo + self.below(hi - lo + 1)


@dataclass(frozen=True)
class GenConfig:
    seed: int = 1
    stmts_min: int = 20
    stmts_max: int = 50
    depth_cap: int = 3
    loop_iters: int = 20
    idents: tuple = DEFAULT_IDENTS
    const_min: int = -1
    const_max: int = 3
    expr_depth: int = 3

    def __post_init__(self):
        if not 0 <= self.seed <= MASK64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if not 0 <= self.stmts_min <= self.stmts_max:
            raise ValueError("need 0 <= stmts_min <= stmts_max")
        if self.depth_cap < 1:
            raise ValueError("depth_cap must be at least 1")
        if self.loop_iters < 0:
            raise ValueError("loop_iters must be non-negative")
        if self.const_min > self.const_max:
            raise ValueError("need const_min <= const_max")
        if self.expr_depth < 0:
            raise ValueError("expr_depth must be non-negative")
        if not self.idents or any(n.startswith(COUNTER_PREFIX) for n in self.idents):
            raise ValueError(f"identifiers must be non-empty and avoid the {COUNTER_PREFIX!r} prefix")

    @classmethod
    def small(cls, seed: int = 1, **overrides) -> GenConfig:
        """Short blocks for differential testing; same recipe otherwise."""
        return cls(seed=seed, **{"stmts_min": 3, "stmts_max": 8, **overrides})

    def with_seed(self, seed: int) -> GenConfig:
        return replace(self, seed=seed)


class ProgramGenerator:
    def __init__(self, cfg: GenConfig):
        self.cfg = cfg
        self.rng = XorShift64Star(cfg.seed)

    def ident(self) -> Var:
        idents = self.cfg.idents
        return Var(idents[self.rng.below(len(idents))])

    def const(self) -> IntLit:
        return IntLit(self.rng.uniform(self.cfg.const_min, self.cfg.const_max))

    def expr_tree(self, budget: int, kind: str = "arith"):
        if kind == "condition":
            op = COMPARE_OPS[self.rng.below(len(COMPARE_OPS))]
            sub = max(budget - 1, 0)
            lhs = self.expr_tree(sub)
            return BinOp(op, lhs, self.expr_tree(sub))
        if kind != "arith":
            raise ValueError(f"unknown expression kind {kind!r}")
        choice = self.rng.below(2 if budget == 0 else 4)
        if choice == 0:
            return self.ident()
        if choice == 1:
            return self.const()
        lhs = self.expr_tree(budget - 1)
        rhs = self.expr_tree(budget - 1)
        return BinOp("add" if choice == 2 else "sub", lhs, rhs)

    def block(self, depth: int) -> tuple:
        cfg = self.cfg
        out = []
        for _ in range(self.rng.uniform(cfg.stmts_min, cfg.stmts_max)):
            kind = self.rng.below(3) if depth < cfg.depth_cap else 2
            if kind == 0:
                counter = f"{COUNTER_PREFIX}{depth}"
                body = self.block(depth + 1)
                bump = Assign(counter, BinOp("add", Var(counter), IntLit(1)))
                out.append(Assign(counter, IntLit(0)))
                out.append(While(BinOp("lt", Var(counter), IntLit(cfg.loop_iters)), (bump, *body)))
            elif kind == 1:
                cond = self.expr_tree(cfg.expr_depth, "condition")
                then = self.block(depth + 1)
                out.append(If(cond, then, self.block(depth + 1)))
            else:
                target = self.ident().name
                out.append(Assign(target, self.expr_tree(cfg.expr_depth)))
        return tuple(out)


def generate(cfg: GenConfig) -> list:
    return list(ProgramGenerator(cfg).block(1))


def expr_tree(budget: int, kind: str = "arith", seed: int = 1, cfg: GenConfig | None = None):
    """Draw a single expression tree from a fresh generator."""
    cfg = (cfg or GenConfig()).with_seed(seed)
    return ProgramGenerator(cfg).expr_tree(budget, kind)


def initial_env(cfg: GenConfig) -> dict:
    return {name: 0 for name in cfg.idents}
