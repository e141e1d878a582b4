import numpy as np
import pytest
from scipy.stats import chisquare

from acol.frontend import format_program, parse_program
from acol.interp_ast import run_ast
from acol.nodes import COMPARE_OPS, Assign, BinOp, If, IntLit, Not, Var, While, iter_exprs, iter_stmts, stmt_exprs
from acol.objspace import ObjectSpace
from acol.progen import GenConfig, XorShift64Star, expr_tree, generate, initial_env


def numpy_xorshift(seed, count):
    """Same recurrence written against numpy's wrapping uint64 arithmetic."""
    with np.errstate(over="ignore"):
        z = np.uint64(seed) + np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        x = z ^ (z >> np.uint64(31))
        out = []
        for _ in range(count):
            x ^= x >> np.uint64(12)
            x ^= x << np.uint64(25)
            x ^= x >> np.uint64(27)
            out.append(int(x * np.uint64(0x2545F4914F6CDD1D)))
    return out


@pytest.mark.parametrize("seed", [0, 1, 2, 12345, 2 ** 64 - 1])
def test_rng_matches_independent_implementation(seed):
    rng = XorShift64Star(seed)
    assert [rng.next() for _ in range(50)] == numpy_xorshift(seed, 50)


def test_below_range():
    rng = XorShift64Star(7)
    draws = [rng.below(5) for _ in range(2000)]
    assert set(draws) == {0, 1, 2, 3, 4}
    assert all(-1 <= rng.uniform(-1, 3) <= 3 for _ in range(200))
    with pytest.raises(ValueError):
        rng.below(0)


def test_config_validation():
    with pytest.raises(ValueError):
        GenConfig(stmts_min=5, stmts_max=4)
    with pytest.raises(ValueError):
        GenConfig(depth_cap=0)
    with pytest.raises(ValueError):
        GenConfig(idents=("v0", "_lc1"))
    cfg = GenConfig()
    assert (cfg.stmts_min, cfg.stmts_max, cfg.depth_cap, cfg.loop_iters) == (20, 50, 3, 20)
    assert cfg.idents == ("v0", "v1", "v2", "v3", "v4")
    assert (cfg.const_min, cfg.const_max) == (-1, 3)


def test_determinism():
    assert generate(GenConfig(seed=5)) == generate(GenConfig(seed=5))
    assert generate(GenConfig(seed=5)) != generate(GenConfig(seed=6))


def all_exprs(prog):
    for s in iter_stmts(prog):
        for e in stmt_exprs(s):
            yield s, e


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_structure(seed):
    cfg = GenConfig(seed=seed)
    prog = generate(cfg)
    assert cfg.stmts_min <= len([s for s in prog if not _is_counter_reset(s)]) <= cfg.stmts_max
    for s, e in all_exprs(prog):
        nodes = list(iter_exprs(e))
        assert not any(isinstance(n, Not) for n in nodes)
        assert all(n.op not in ("mul", "mod") for n in nodes if isinstance(n, BinOp))
        comparisons = [n for n in nodes if isinstance(n, BinOp) and n.op in COMPARE_OPS]
        if isinstance(s, Assign):
            assert comparisons == []
            if not s.target.startswith("_lc"):
                assert all(-1 <= n.value <= 3 for n in nodes if isinstance(n, IntLit))
                assert s.target in cfg.idents
        else:
            assert comparisons == [e]
    text = format_program(prog)
    assert "*" not in text and "mod" not in text
    assert parse_program(text) == prog


def _is_counter_reset(s):
    return isinstance(s, Assign) and s.target.startswith("_lc") and s.expr == IntLit(0)


def _depth_ok(stmts, depth, cap):
    for s in stmts:
        if isinstance(s, (If, While)):
            if depth >= cap:
                return False
            subs = (s.then, s.orelse) if isinstance(s, If) else (s.body,)
            if not all(_depth_ok(b, depth + 1, cap) for b in subs):
                return False
    return True


@pytest.mark.parametrize("cap", [1, 2, 3, 4])
def test_depth_cap(cap):
    for seed in range(1, 6):
        prog = generate(GenConfig.small(seed, depth_cap=cap))
        assert _depth_ok(prog, 1, cap)


def test_loop_shape():
    prog = generate(GenConfig(seed=3))
    loops = [(i, s) for i, s in enumerate(prog) if isinstance(s, While)]
    assert loops
    for i, w in loops:
        assert prog[i - 1] == Assign("_lc1", IntLit(0))
        assert w.cond == BinOp("lt", Var("_lc1"), IntLit(20))
        assert w.body[0] == Assign("_lc1", BinOp("add", Var("_lc1"), IntLit(1)))


class CounterLog(ObjectSpace):
    def __init__(self):
        self.log = {}

    def store(self, env, name, v):
        if name.startswith("_lc"):
            self.log.setdefault(name, []).append(v)
        return super().store(env, name, v)


@pytest.mark.parametrize("seed", range(1, 11))
def test_every_loop_runs_exactly_twenty_times(seed):
    cfg = GenConfig.small(seed, depth_cap=4)
    space = CounterLog()
    run_ast(generate(cfg), initial_env(cfg), boundary="dynamic", space=space)
    for values in space.log.values():
        # each entry is a reset to 0 followed by 1, 2, ..., 20
        assert len(values) % 21 == 0
        for k in range(0, len(values), 21):
            assert values[k:k + 21] == list(range(21))


def test_expr_tree_examples():
    for seed in range(1, 50):
        leaf = expr_tree(0, "arith", seed=seed)
        assert isinstance(leaf, (Var, IntLit))
        cond = expr_tree(3, "condition", seed=seed)
        assert isinstance(cond, BinOp) and cond.op in COMPARE_OPS
        inner = [n for side in (cond.lhs, cond.rhs) for n in iter_exprs(side)]
        assert all(not (isinstance(n, BinOp) and n.op in COMPARE_OPS) for n in inner)
    with pytest.raises(ValueError):
        expr_tree(1, "boolean")


def test_leaf_frequencies_are_uniform():
    # every leaf is an ident draw or a constant draw with equal probability,
    # and each then picks one of five values uniformly: ten equal categories
    counts = {}
    for seed in range(1, 1001):
        for n in iter_exprs(expr_tree(3, "arith", seed=seed)):
            if isinstance(n, Var):
                counts[n.name] = counts.get(n.name, 0) + 1
            elif isinstance(n, IntLit):
                counts[n.value] = counts.get(n.value, 0) + 1
    assert len(counts) == 10
    observed = list(counts.values())
    stat, p = chisquare(observed)
    assert p > 5.7e-7  # two-sided 5 sigma


def test_root_kind_frequencies():
    roots = {"ident": 0, "const": 0, "add": 0, "sub": 0}
    for seed in range(1, 1001):
        e = expr_tree(3, "arith", seed=seed)
        key = "ident" if isinstance(e, Var) else "const" if isinstance(e, IntLit) else e.op
        roots[key] += 1
    assert chisquare(list(roots.values())).pvalue > 5.7e-7


def test_initial_env():
    assert initial_env(GenConfig()) == {"v0": 0, "v1": 0, "v2": 0, "v3": 0, "v4": 0}
