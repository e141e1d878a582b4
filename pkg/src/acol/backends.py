"""Registry of execution backends and the differential check between them.

Each backend is split into ``prepare`` (AST -> its program representation,
done once and never timed) and ``execute`` (representation + env -> env).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .blocks import compile_blocks, run_blocks, validate_blocks
from .bytecode import compile_linear, validate
from .errors import BackendMismatch
from .interp_ast import run_ast
from .threaded import build_threaded, run_threaded_ast, run_threaded_bc
from .vm import predecode, run_decoded, run_linear


@dataclass(frozen=True)
class Backend:
    name: str
    prepare: Callable
    execute: Callable  # (prepared, env, boundary=..., space=...) -> env

    def run(self, program, env=None, boundary="static", space=None) -> dict:
        return self.execute(self.prepare(program), env, boundary=boundary, space=space)


def _identity(program):
    return program


def _prepare_linear(program):
    image = compile_linear(program)
    validate(image)
    return image


def _execute_linear(image, env=None, boundary="static", space=None):
    return run_linear(image, env, boundary=boundary, space=space, check=False)


def _prepare_blocks(program):
    prog = compile_blocks(program)
    validate_blocks(prog)
    return prog


def _execute_blocks(prog, env=None, boundary="static", space=None):
    return run_blocks(prog, env, boundary=boundary, space=space, check=False)


BACKENDS: dict[str, Backend] = {
    "ast": Backend("ast", _identity, run_ast),
    "linear": Backend("linear", _prepare_linear, _execute_linear),
    "decoded": Backend("decoded", lambda p: predecode(compile_linear(p)), run_decoded),
    "blocks": Backend("blocks", _prepare_blocks, _execute_blocks),
    "threaded-ast": Backend("threaded-ast", lambda p: build_threaded(p, "ast"), run_threaded_ast),
    "threaded-bc": Backend("threaded-bc", lambda p: build_threaded(p, "bc"), run_threaded_bc),
}
BACKEND_NAMES = tuple(BACKENDS)
REFERENCE = "ast"


def get_backend(name: str) -> Backend:
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown backend {name!r}; expected one of {', '.join(BACKENDS)}") from None


def run(name: str, program, env=None, boundary="static", space=None) -> dict:
    return get_backend(name).run(program, env, boundary=boundary, space=space)


def first_difference(expected: dict, actual: dict):
    """Return ``(name, expected_value, actual_value)`` for the first
    differing variable in sorted order, or None if the envs are equal."""
    for name in sorted(set(expected) | set(actual)):
        if expected.get(name) != actual.get(name):
            return name, expected.get(name), actual.get(name)
    return None


def check_equivalent(program, env=None, backends=BACKEND_NAMES, boundary="static", context="") -> dict:
    """Run every backend and raise BackendMismatch unless all agree with the
    reference backend.  Returns the reference final env."""
    reference = run(REFERENCE, program, env, boundary=boundary)
    for name in backends:
        if name == REFERENCE:
            continue
        diff = first_difference(reference, run(name, program, env, boundary=boundary))
        if diff is not None:
            raise BackendMismatch(name, *diff, context=context)
    return reference
