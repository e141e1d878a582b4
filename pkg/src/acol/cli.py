"""Command-line entry point: ``acol {run,compile,disasm,bench,gen,diff}``.

Exit status: 0 on success, 1 on a program/runtime/correctness failure,
2 on a usage error.
"""
from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

from . import bench as benchmod
from .backends import BACKEND_NAMES, check_equivalent, first_difference, run
from .blocks import compile_blocks, format_blocks
from .bytecode import compile_linear, disassemble, read_acbc, write_acbc
from .errors import AcolError, BackendMismatch
from .frontend import format_program, parse_program
from .objspace import BOUNDARIES, format_env, parse_env
from .progen import GenConfig, generate, initial_env
from .threaded import build_threaded, format_graph
from .vm import predecode, run_decoded, run_linear


class UsageError(Exception):
    pass


def _csv(value, allowed, what):
    items = [x.strip() for x in value.split(",") if x.strip()]
    bad = [x for x in items if x not in allowed]
    if bad:
        raise UsageError(f"unknown {what}: {', '.join(bad)} (choose from {', '.join(allowed)})")
    return items


def _parse_var(text):
    m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)=([+-]?[0-9]+)", text)
    if m is None:
        raise UsageError(f"--var expects NAME=INTEGER, got {text!r}")
    return m.group(1), int(m.group(2))


def parse_seed_range(text: str) -> range:
    m = re.fullmatch(r"\s*(\d+)\s*(?:\.\.\s*(\d+)\s*)?", text)
    if m is None:
        raise UsageError(f"--seeds expects A..B or a single seed, got {text!r}")
    lo = int(m.group(1))
    hi = int(m.group(2)) if m.group(2) is not None else lo
    return range(lo, hi + 1)


def _read_text(path):
    with open(path, encoding="utf-8") as f:
        return f.read()


def cmd_run(args, out):
    env = {}
    if args.env:
        env.update(parse_env(_read_text(args.env)))
    for item in args.var:
        name, value = _parse_var(item)
        env[name] = value
    if args.source.endswith(".acbc"):
        image = read_acbc(args.source)
        if args.backend == "linear":
            final = run_linear(image, env, boundary=args.boundary)
        elif args.backend == "decoded":
            final = run_decoded(predecode(image), env, boundary=args.boundary)
        else:
            raise UsageError(".acbc input needs --backend linear or decoded")
    else:
        program = parse_program(_read_text(args.source))
        final = run(args.backend, program, env, boundary=args.boundary)
    out.write(format_env(final))
    return 0


_COMPILE_EXT = {"acbc": ".acbc", "blocks": ".blocks", "threaded": ".threaded"}


def cmd_compile(args, out):
    program = parse_program(_read_text(args.source))
    dest = args.out or str(Path(args.source).with_suffix(_COMPILE_EXT[args.format]))
    if args.format == "acbc":
        write_acbc(dest, compile_linear(program))
    else:
        if args.format == "blocks":
            text = format_blocks(compile_blocks(program))
        else:
            text = format_graph(build_threaded(program, args.flavor))
        with open(dest, "w", encoding="utf-8") as f:
            f.write(text)
    out.write(f"wrote {dest}\n")
    return 0


def cmd_disasm(args, out):
    out.write(disassemble(read_acbc(args.path)))
    return 0


def cmd_bench(args, out):
    case_names = _csv(args.cases, _CASE_NAMES, "case") if args.cases else list(_CASE_NAMES)
    backends = _csv(args.backends, BACKEND_NAMES, "backend") if args.backends else list(BACKEND_NAMES)
    if args.reps < 0:
        raise UsageError("--reps must be non-negative")
    try:
        scale = benchmod.parse_scale(args.scale)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    boundaries = list(BOUNDARIES) if args.boundary == "both" else [args.boundary]
    cases = [c for c in benchmod.builtin_cases(scale) if c.name in case_names]

    def progress(case, backend, boundary):
        if args.verbose:
            print(f"timing {case} / {backend} / {boundary}", file=sys.stderr)

    report = benchmod.run_bench(cases, backends, args.reps, boundaries, progress=progress)
    if args.format == "records":
        out.write(benchmod.format_records(report))
    else:
        out.write(benchmod.format_table(report))
    for failure in report.failures:
        print(f"error: {failure}", file=sys.stderr)
    return 1 if report.failures else 0


def _gen_config(args, seed):
    if args.preset == "small":
        cfg = GenConfig.small(seed)
    else:
        cfg = GenConfig(seed=seed)
    if getattr(args, "depth_cap", None) is not None:
        cfg = GenConfig(**{**cfg.__dict__, "depth_cap": args.depth_cap})
    return cfg


def cmd_gen(args, out):
    cfg = _gen_config(args, args.seed)
    program = generate(cfg)
    base = args.out
    with open(base + ".acol", "w", encoding="utf-8", newline="\n") as f:
        f.write(f"# generated: seed {cfg.seed}, {cfg.stmts_min}..{cfg.stmts_max} statements, "
                f"depth cap {cfg.depth_cap}\n")
        f.write(format_program(program))
    with open(base + ".env", "w", encoding="utf-8", newline="\n") as f:
        f.write(format_env(initial_env(cfg)))
    out.write(f"wrote {base}.acol and {base}.env\n")
    return 0


def cmd_diff(args, out):
    seeds = parse_seed_range(args.seeds)
    backends = _csv(args.backends, BACKEND_NAMES, "backend") if args.backends else list(BACKEND_NAMES)
    if args.reps_per_seed < 1:
        raise UsageError("--reps-per-seed must be at least 1")
    passed = 0
    first_failure = None
    for seed in seeds:
        cfg = _gen_config(args, seed)
        program = generate(cfg)
        env = initial_env(cfg)
        try:
            reference = check_equivalent(program, env, backends, args.boundary, context=f"seed {seed}")
            for _ in range(args.reps_per_seed - 1):
                for name in backends:
                    diff = first_difference(reference, run(name, program, env, boundary=args.boundary))
                    if diff is not None:
                        raise BackendMismatch(name, *diff, context=f"seed {seed} (repeat run)")
        except BackendMismatch as exc:
            if first_failure is None:
                first_failure = (seed, exc)
            continue
        passed += 1
    out.write(f"{passed}/{len(seeds)} equivalent\n")
    if first_failure is not None:
        seed, exc = first_failure
        out.write(f"first divergence: seed {seed}, backend {exc.backend}, variable {exc.variable}: "
                  f"expected {exc.expected!r}, got {exc.actual!r}\n")
        return 1
    return 0


_CASE_NAMES = ("prime", "fib", "fib_mod", "generated1", "generated2", "generated3")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="acol", description="Acol interpreter laboratory")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a program and print the final environment")
    r.add_argument("source", help=".acol source (or .acbc image for linear/decoded)")
    r.add_argument("env", nargs="?", help="initial environment file (name = value per line)")
    r.add_argument("--var", action="append", default=[], metavar="NAME=VALUE")
    r.add_argument("--backend", choices=BACKEND_NAMES, default="ast")
    r.add_argument("--boundary", choices=BOUNDARIES, default="static")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("compile", help="compile a program to bytecode or a textual dump")
    c.add_argument("source")
    c.add_argument("--out")
    c.add_argument("--format", choices=tuple(_COMPILE_EXT), default="acbc")
    c.add_argument("--flavor", choices=("ast", "bc"), default="ast",
                   help="graph flavor for --format threaded")
    c.set_defaults(func=cmd_compile)

    d = sub.add_parser("disasm", help="print an .acbc image as an offset listing")
    d.add_argument("path")
    d.set_defaults(func=cmd_disasm)

    b = sub.add_parser("bench", help="time backends on the built-in cases")
    b.add_argument("--cases", help="comma-separated subset of " + ",".join(_CASE_NAMES))
    b.add_argument("--backends", help="comma-separated subset of " + ",".join(BACKEND_NAMES))
    b.add_argument("--reps", type=int, default=benchmod.DEFAULT_REPS)
    b.add_argument("--scale", default="full",
                   help="size factor or preset (" + ", ".join(benchmod.SCALE_PRESETS) + ")")
    b.add_argument("--format", choices=("table", "records"), default="table")
    b.add_argument("--boundary", choices=(*BOUNDARIES, "both"), default="static")
    b.add_argument("-v", "--verbose", action="store_true")
    b.set_defaults(func=cmd_bench)

    g = sub.add_parser("gen", help="generate a random program and its initial environment")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", required=True, help="basename; writes BASENAME.acol and BASENAME.env")
    g.add_argument("--preset", choices=("full", "small"), default="full")
    g.add_argument("--depth-cap", type=int)
    g.set_defaults(func=cmd_gen)

    f = sub.add_parser("diff", help="check that all backends agree on generated programs")
    f.add_argument("--seeds", default="1..100", help="inclusive range A..B")
    f.add_argument("--reps-per-seed", type=int, default=1)
    f.add_argument("--preset", choices=("full", "small"), default="small")
    f.add_argument("--backends", help="comma-separated subset of " + ",".join(BACKEND_NAMES))
    f.add_argument("--boundary", choices=BOUNDARIES, default="static")
    f.set_defaults(func=cmd_diff)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"acol: error: {exc}", file=sys.stderr)
        return 2
    except (AcolError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
