"""Benchmark harness: shipped cases, timing, statistics and reports.

Statistics follow the usual practice for runtime ratios: a cell's mean is
the geometric mean of its samples, its 0.95 confidence interval comes from
a Student-t interval on the log samples mapped back through ``exp``, and
each cell is normalised by the AST backend's mean on the same case.
Cross-case aggregates are geometric means of those ratios.
"""
from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass, field, replace

from scipy.stats import t as student_t

from . import programs
from .backends import REFERENCE, first_difference, get_backend
from .errors import BackendMismatch, InsufficientSamples
from .frontend import format_program, parse_program
from .interp_ast import run_ast
from .progen import GenConfig, generate, initial_env

CONFIDENCE = 0.95
DEFAULT_REPS = 10
DEFAULT_SEEDS = (1, 2, 3)
SEED_ENV_VAR = "ACOL_SEED_DEFAULTS"
SCALE_PRESETS = {"tiny": 1e-4, "small": 1e-2, "full": 1.0}
CI_METHOD = "Student-t 0.95 interval on log(seconds), mapped back with exp"


# statistics

def _split(xs):
    """Mantissas in [0.5, 1) and integer exponents of positive floats."""
    if not xs:
        raise InsufficientSamples("need at least one sample")
    parts = []
    for x in xs:
        if not x > 0 or math.isinf(x):
            raise ValueError(f"samples must be positive and finite, got {x!r}")
        parts.append(math.frexp(x))
    return parts


def _log_deviations(parts):
    """Mean log-mantissa and per-sample deviations of log(x) from the log mean.

    Exponents are handled as integers, so scaling all samples by a power of
    two leaves the deviations bit-identical.
    """
    n = len(parts)
    total_exp = sum(e for _, e in parts)
    logs = [math.log(m) for m, _ in parts]
    mean_log_m = math.fsum(logs) / n
    ln2 = math.log(2.0)
    devs = [lm - mean_log_m + (n * e - total_exp) / n * ln2 for lm, (_, e) in zip(logs, parts)]
    return mean_log_m, total_exp, devs


def geometric_mean(xs) -> float:
    parts = _split(list(xs))
    n = len(parts)
    mean_log_m, total_exp, _ = _log_deviations(parts)
    q, r = divmod(total_exp, n)
    core = math.exp(mean_log_m + r / n * math.log(2.0))
    return math.ldexp(core, q)


def _t_quantile(p: float, df: int) -> float:
    # scipy's inverse is good to ~1e-11; one Newton step on the cdf brings it
    # to machine precision
    x = student_t.ppf(p, df)
    return x - (student_t.cdf(x, df) - p) / student_t.pdf(x, df)


def confidence_interval(xs, confidence: float = CONFIDENCE):
    """Return ``(low, high)`` around the geometric mean."""
    xs = list(xs)
    if len(xs) < 2:
        raise InsufficientSamples(f"a confidence interval needs at least 2 samples, got {len(xs)}")
    parts = _split(xs)
    n = len(parts)
    _, _, devs = _log_deviations(parts)
    sd = math.sqrt(math.fsum(d * d for d in devs) / (n - 1))
    half = _t_quantile(0.5 + confidence / 2, n - 1) * sd / math.sqrt(n)
    factor = math.exp(half)
    g = geometric_mean(xs)
    return g / factor, g * factor


def ci_half_width(xs, confidence: float = CONFIDENCE) -> float:
    """Half the width of the interval, in the samples' unit (seconds)."""
    low, high = confidence_interval(xs, confidence)
    return (high - low) / 2


# cases

@dataclass(frozen=True)
class BenchCase:
    name: str
    source: str
    env: dict
    size_param: str
    size: int
    gen_config: GenConfig | None = None
    program: list = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.program is None:
            object.__setattr__(self, "program", parse_program(self.source))

    def with_size(self, size: int) -> BenchCase:
        """The same case with its size parameter replaced."""
        if self.gen_config is not None:
            return _generated_case(self.name, replace(self.gen_config, loop_iters=size))
        env = dict(self.env)
        env[self.size_param] = size
        return replace(self, env=env, size=size)

    def scaled(self, factor: float) -> BenchCase:
        floor = 1 if self.gen_config is not None else 3
        return self.with_size(max(floor, round(self.size * factor)))


def _generated_case(name, cfg: GenConfig) -> BenchCase:
    prog = generate(cfg)
    return BenchCase(name, format_program(prog), initial_env(cfg), "loop_iters",
                     cfg.loop_iters, gen_config=cfg, program=prog)


def default_seeds() -> tuple:
    raw = os.environ.get(SEED_ENV_VAR, "").strip()
    if not raw:
        return DEFAULT_SEEDS
    seeds = tuple(int(s) for s in raw.replace(",", " ").split())
    if len(seeds) != 3:
        raise ValueError(f"{SEED_ENV_VAR} must list exactly three seeds, got {raw!r}")
    return seeds


def builtin_cases(scale: float = 1.0, seeds=None) -> list[BenchCase]:
    seeds = tuple(seeds) if seeds is not None else default_seeds()
    cases = [
        BenchCase("prime", programs.PRIME, dict(programs.PRIME_ENV), "V", programs.PRIME_ENV["V"]),
        BenchCase("fib", programs.FIB, dict(programs.FIB_ENV), "n", programs.FIB_ENV["n"]),
        BenchCase("fib_mod", programs.FIB_MOD, dict(programs.FIB_MOD_ENV), "n", programs.FIB_MOD_ENV["n"]),
    ]
    cases += [_generated_case(f"generated{i}", GenConfig(seed=s)) for i, s in enumerate(seeds, 1)]
    if scale != 1.0:
        cases = [c.scaled(scale) for c in cases]
    return cases


def parse_scale(text) -> float:
    if isinstance(text, (int, float)):
        value = float(text)
    elif text in SCALE_PRESETS:
        value = SCALE_PRESETS[text]
    else:
        try:
            value = float(text)
        except ValueError:
            raise ValueError(f"scale must be a number or one of {', '.join(SCALE_PRESETS)}") from None
    if not value > 0:
        raise ValueError("scale must be positive")
    return value


# timing

def reference_env(case: BenchCase) -> dict:
    return run_ast(case.program, case.env)


def run_case(case: BenchCase, backend: str, reps: int = DEFAULT_REPS, boundary: str = "static",
             reference: dict | None = None, clock=time.perf_counter) -> list[float]:
    """Time ``reps`` runs of ``case`` on ``backend``.

    Preparation (compilation) and one warm-up run happen outside the timed
    region.  Every run's final env must match the AST backend's, otherwise
    BackendMismatch is raised.
    """
    if reps <= 0:
        return []
    impl = get_backend(backend)
    prepared = impl.prepare(case.program)
    if reference is None:
        reference = reference_env(case)

    def check(env):
        diff = first_difference(reference, env)
        if diff is not None:
            raise BackendMismatch(backend, *diff, context=case.name)

    check(impl.execute(prepared, dict(case.env), boundary=boundary))
    samples = []
    for _ in range(reps):
        env = dict(case.env)
        start = clock()
        final = impl.execute(prepared, env, boundary=boundary)
        samples.append(clock() - start)
        check(final)
    return samples


# reports

@dataclass(frozen=True)
class Cell:
    case: str
    backend: str
    boundary: str
    samples: tuple
    mean: float
    ci_low: float | None
    ci_high: float | None
    ci_half_width: float | None
    ratio: float | None


@dataclass(frozen=True)
class BenchReport:
    cells: tuple
    aggregates: dict  # (backend, boundary) -> geometric mean of ratios
    failures: tuple = ()

    def cell(self, case, backend, boundary="static") -> Cell:
        for c in self.cells:
            if (c.case, c.backend, c.boundary) == (case, backend, boundary):
                return c
        raise KeyError((case, backend, boundary))


def summarize(samples: dict, failures=()) -> BenchReport:
    """Build a report from ``{(case, backend, boundary): [seconds, ...]}``."""
    means = {}
    for key, xs in samples.items():
        if not xs:
            raise InsufficientSamples(f"cell {key} has no samples")
        means[key] = geometric_mean(xs)

    cells = []
    ratios: dict = {}
    for key, xs in samples.items():
        case, backend, boundary = key
        base = means.get((case, REFERENCE, boundary))
        ratio = means[key] / base if base is not None else None
        if len(xs) >= 2:
            low, high = confidence_interval(xs)
            half = (high - low) / 2
        else:
            low = high = half = None
        cells.append(Cell(case, backend, boundary, tuple(xs), means[key], low, high, half, ratio))
        if ratio is not None:
            ratios.setdefault((backend, boundary), []).append(ratio)
    aggregates = {k: geometric_mean(v) for k, v in ratios.items()}
    return BenchReport(tuple(cells), aggregates, tuple(failures))


def run_bench(cases, backends, reps=DEFAULT_REPS, boundaries=("static",), progress=None) -> BenchReport:
    """Time every (case, backend, boundary) cell sequentially.

    A backend mismatch aborts the remaining cells of that case and is
    recorded in ``report.failures``.
    """
    samples = {}
    failures = []
    for case in cases:
        reference = reference_env(case) if reps > 0 else None
        case_samples = {}
        try:
            for boundary in boundaries:
                for backend in backends:
                    if progress:
                        progress(case.name, backend, boundary)
                    case_samples[(case.name, backend, boundary)] = run_case(
                        case, backend, reps, boundary, reference=reference)
        except BackendMismatch as exc:
            failures.append(str(exc))
            continue
        samples.update(case_samples)
    if reps <= 0:
        return BenchReport((), {}, tuple(failures))
    return summarize(samples, failures)


def format_table(report: BenchReport) -> str:
    boundaries = sorted({c.boundary for c in report.cells}, key=["static", "dynamic"].index)
    reps = {len(c.samples) for c in report.cells}
    lines = [
        f"# mean runtime in seconds: geometric mean of {', '.join(map(str, sorted(reps))) or 0} runs",
        f"# +/- half-width of the {CI_METHOD}",
        f"# (ratio) normalised to the {REFERENCE} backend on the same case and boundary",
    ]
    by_key = {(c.case, c.backend, c.boundary): c for c in report.cells}
    case_order = list(dict.fromkeys(c.case for c in report.cells))
    backend_order = list(dict.fromkeys(c.backend for c in report.cells))

    def fmt(c):
        if c is None:
            return "-"
        ci = f"{c.ci_half_width:.4f}" if c.ci_half_width is not None else "n/a"
        ratio = f"{c.ratio:.2f}" if c.ratio is not None else "n/a"
        return f"{c.mean:.4f} +/- {ci} ({ratio})"

    header = ["benchmark", "interpreter", *boundaries]
    rows = []
    for case in case_order:
        for backend in backend_order:
            rows.append([case, backend, *(fmt(by_key.get((case, backend, b))) for b in boundaries)])
    for backend in backend_order:
        vals = []
        for b in boundaries:
            agg = report.aggregates.get((backend, b))
            vals.append(f"({agg:.2f})" if agg is not None else "-")
        rows.append(["geomean ratio", backend, *vals])
    widths = [max(len(r[i]) for r in [header, *rows]) for i in range(len(header))]
    lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip())
    lines += ["  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip() for r in rows]
    for failure in report.failures:
        lines.append(f"FAILED: {failure}")
    return "\n".join(lines) + "\n"


def format_records(report: BenchReport) -> str:
    out = [{"kind": "meta", "confidence": CONFIDENCE, "ci_method": CI_METHOD,
            "mean": "geometric", "normalised_to": REFERENCE}]
    for c in report.cells:
        out.append({
            "kind": "cell", "case": c.case, "backend": c.backend, "boundary": c.boundary,
            "samples": list(c.samples), "mean": c.mean, "ci_low": c.ci_low, "ci_high": c.ci_high,
            "ci_half_width": c.ci_half_width, "ratio": c.ratio,
        })
    for (backend, boundary), ratio in report.aggregates.items():
        out.append({"kind": "aggregate", "backend": backend, "boundary": boundary, "ratio": ratio})
    for failure in report.failures:
        out.append({"kind": "failure", "message": failure})
    return "".join(json.dumps(rec, sort_keys=True) + "\n" for rec in out)
