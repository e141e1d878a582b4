"""Acol: a small imperative language with several interchangeable interpreters.

The same parsed program can run on a tree-walking interpreter, a
byte-addressed stack VM (plain or pre-decoded), a VM over nested
sub-bytecode blocks, or successor-linked graphs in two flavors.  All of
them share the semantics layer in :mod:`acol.objspace`.
"""
from .backends import BACKEND_NAMES, BACKENDS, check_equivalent, run
from .frontend import format_program, parse_program
from .interp_ast import run_ast

__all__ = ["BACKENDS", "BACKEND_NAMES", "check_equivalent", "format_program", "parse_program",
           "run", "run_ast"]
__version__ = "0.1.0"
