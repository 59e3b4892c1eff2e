"""Deterministic benchmark harness: data generation, timing, CSV rows.

Vectors are produced by a counter-based SplitMix64 stream with normal
variates from the Box-Muller transform, so identical configurations yield
bit-identical instances on any platform.  Three data profiles are offered:

* type 1: standard normal entries,
* type 2: 7/8 of the entries N(0, 0.2), the rest N(0.9, 0.2), shuffled,
* type 3: four equal blocks with means 0.1/0.4/0.7/1.0, sd 0.2, shuffled.

The sparseness level sigma in (0, 1) maps to the l1 radius through
t = sqrt(n) - sigma*(sqrt(n) - 1).  Only the root solve is timed; instance
generation, acceptance filtering and bracket construction stay outside the
clock (the bracketed methods receive their interval as an input).
"""

from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .auxiliary import compute_stats, eval_phi
from .errors import GenerationExhausted
from .projection import Geometry, ProblemKind
from .rootfind import (
    TOL_DEFAULT,
    RootResult,
    TraceRow,
    forward_search,
    make_bracket,
    psi_root,
    solve_phi,
)

_GOLDEN = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1
_INV53 = 1.0 / (1 << 53)


def _mix64(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class _Stream:
    """Counter-based SplitMix64 stream of uniforms and normals."""

    def __init__(self, seed: int):
        self._seed = np.uint64(seed & _MASK64)
        self._pos = 0

    def _raw(self, count: int) -> np.ndarray:
        idx = np.arange(self._pos + 1, self._pos + count + 1, dtype=np.uint64)
        self._pos += count
        z = self._seed + idx * np.uint64(_GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))

    def uniforms(self, count: int) -> np.ndarray:
        """Open-interval (0, 1) uniforms, safe for logarithms."""
        return ((self._raw(count) >> np.uint64(11)).astype(np.float64) + 0.5) * _INV53

    def normals(self, count: int) -> np.ndarray:
        pairs = (count + 1) // 2
        u1 = self.uniforms(pairs)
        u2 = self.uniforms(pairs)
        r = np.sqrt(-2.0 * np.log(u1))
        ang = 2.0 * math.pi * u2
        return np.concatenate([r * np.cos(ang), r * np.sin(ang)])[:count]

    def permutation(self, count: int) -> np.ndarray:
        return np.argsort(self.uniforms(count), kind="stable")


def gen_type1(n: int, seed: int) -> np.ndarray:
    """Standard normal entries."""
    return _Stream(seed).normals(n)


def gen_type2(n: int, seed: int) -> np.ndarray:
    """floor(7n/8) entries N(0, 0.2), the rest N(0.9, 0.2), shuffled."""
    st = _Stream(seed)
    g = st.normals(n)
    n_low = (7 * n) // 8
    vals = 0.2 * g
    vals[n_low:] += 0.9
    return vals[st.permutation(n)]


def gen_type3(n: int, seed: int) -> np.ndarray:
    """Four near-equal blocks with means 0.1/0.4/0.7/1.0, sd 0.2, shuffled."""
    st = _Stream(seed)
    g = st.normals(n)
    qsize, rem = divmod(n, 4)
    sizes = [qsize + 1] * rem + [qsize] * (4 - rem)
    means = np.repeat([0.1, 0.4, 0.7, 1.0], sizes)
    vals = means + 0.2 * g
    return vals[st.permutation(n)]


_GENERATORS = {1: gen_type1, 2: gen_type2, 3: gen_type3}


def sigma_to_radius(n: int, sigma: float) -> float:
    return math.sqrt(n) - sigma * (math.sqrt(n) - 1.0)


@dataclass(frozen=True)
class BenchConfig:
    """One benchmark specification; fully determines the instances."""

    n: int
    data_type: int
    problem: ProblemKind
    sigma: float | None = 0.9
    t: float | None = None
    repeats: int = 100
    methods: tuple[str, ...] = ("qasb",)
    seed: int = 0
    tol: float = TOL_DEFAULT

    def radius(self) -> float:
        if (self.sigma is None) == (self.t is None):
            raise ValueError("exactly one of sigma and t must be set")
        if self.t is not None:
            return float(self.t)
        if not 0.0 < self.sigma < 1.0:
            raise ValueError("sigma must lie in (0, 1)")
        return sigma_to_radius(self.n, self.sigma)


@dataclass(frozen=True)
class BenchRow:
    method: str
    problem: str
    data_type: int
    n: int
    t: float
    seed: int
    trial: int
    time_ns: int
    iterations: int
    nnz: int
    lambda_star: float
    phi_residual: float


CSV_HEADER = ("method", "problem", "data_type", "n", "t", "seed", "trial",
              "time_ns", "iterations", "nnz", "lambda_star", "phi_residual")

_MAX_ATTEMPTS = 1000


def _attempt_seed(seed: int, trial: int, attempt: int) -> int:
    base = (seed ^ trial) & _MASK64
    if attempt == 0:
        return base
    return _mix64(base ^ ((attempt * 0xD1B54A32D192ED03) & _MASK64))


def _passes_filter(v: np.ndarray, t: float, problem: ProblemKind) -> bool:
    if problem.geometry is Geometry.BALL_BALL:
        # keep only the hard region: both constraints end up active
        vp = np.maximum(v, 0.0)
        l1 = float(vp.sum())
        l2 = float(np.linalg.norm(vp))
        if not (l1 > t and l1 > t * l2):
            return False
        lam_hat = psi_root(v, t)
        p = np.maximum(v - lam_hat, 0.0)
        return float(np.linalg.norm(p)) > 1.0
    l1 = float(np.abs(v).sum())
    l2 = float(np.linalg.norm(v))
    return l1 > t * l2


def _instance(config: BenchConfig, t: float, trial: int) -> np.ndarray:
    gen = _GENERATORS[config.data_type]
    for attempt in range(_MAX_ATTEMPTS):
        v = gen(config.n, _attempt_seed(config.seed, trial, attempt))
        if _passes_filter(v, t, config.problem):
            return v
    raise GenerationExhausted(
        f"{_MAX_ATTEMPTS} candidates failed the acceptance filter (trial {trial})")


def _solve_vector(v: np.ndarray, problem: ProblemKind) -> np.ndarray:
    if problem.geometry is Geometry.BALL_BALL:
        return v
    return np.abs(v)


def _problem_tag(problem: ProblemKind) -> str:
    return problem.geometry.value + ("-nonneg" if problem.nonnegative else "")


def _run_trial(config: BenchConfig, t: float, trial: int) -> list[BenchRow]:
    v = _instance(config, t, trial)
    u = _solve_vector(v, config.problem)
    tag = _problem_tag(config.problem)
    rows: list[BenchRow] = []
    bracket = None
    for method in config.methods:
        if method == "fs":
            t0 = time.perf_counter_ns()
            res = forward_search(u, t)
            t1 = time.perf_counter_ns()
        else:
            if bracket is None:
                bracket = make_bracket(u, t)
            t0 = time.perf_counter_ns()
            res = solve_phi(u, t, method, config.tol, bracket=bracket)
            t1 = time.perf_counter_ns()
        lam = res.root
        resid = abs(eval_phi(compute_stats(u, lam), lam, t))
        rows.append(BenchRow(
            method=method,
            problem=tag,
            data_type=config.data_type,
            n=config.n,
            t=t,
            seed=config.seed,
            trial=trial,
            time_ns=t1 - t0,
            iterations=res.iterations,
            nnz=int((u > lam).sum()),
            lambda_star=lam,
            phi_residual=resid,
        ))
    return rows


def _run_trial_star(args) -> list[BenchRow]:
    return _run_trial(*args)


def run_bench(config: BenchConfig, jobs: int = 1) -> list[BenchRow]:
    """Run the configured trials; one row per (trial, method).

    Identical configurations produce identical rows apart from ``time_ns``.
    With ``jobs`` > 1 trials run in separate processes (each regenerates its
    own instance deterministically); keep ``jobs=1`` when timings matter.
    """
    if config.repeats < 1:
        raise ValueError("repeats must be >= 1")
    if config.data_type not in _GENERATORS:
        raise ValueError("data_type must be 1, 2 or 3")
    unknown = [m for m in config.methods if m not in ("fs", "bm", "ssnsb", "qasb")]
    if unknown:
        raise ValueError(f"unknown methods: {unknown}")
    t = config.radius()
    if not 1.0 < t < math.sqrt(config.n):
        raise ValueError("derived radius t must lie in (1, sqrt(n))")
    if jobs <= 1:
        rows: list[BenchRow] = []
        for trial in range(config.repeats):
            rows.extend(_run_trial(config, t, trial))
        return rows
    tasks = [(config, t, trial) for trial in range(config.repeats)]
    rows = []
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for chunk in pool.map(_run_trial_star, tasks):
            rows.extend(chunk)
    return rows


def write_csv(rows, stream) -> None:
    """RFC-4180 CSV with LF line endings, one row per (trial, method)."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow([r.method, r.problem, r.data_type, r.n, repr(r.t),
                         r.seed, r.trial, r.time_ns, r.iterations, r.nnz,
                         repr(r.lambda_star), repr(r.phi_residual)])


def summarize(rows) -> str:
    """Per-method mean/sd of iterations and solve time, as a small table."""
    by_method: dict[str, list[BenchRow]] = {}
    for r in rows:
        by_method.setdefault(r.method, []).append(r)
    lines = [f"{'method':<8}{'trials':>8}{'iters_mean':>12}{'iters_sd':>10}"
             f"{'ms_mean':>10}{'ms_sd':>10}"]
    for method, rs in by_method.items():
        iters = np.array([r.iterations for r in rs], dtype=float)
        ms = np.array([r.time_ns for r in rs], dtype=float) / 1e6
        lines.append(f"{method:<8}{len(rs):>8}{iters.mean():>12.2f}"
                     f"{iters.std():>10.2f}{ms.mean():>10.3f}{ms.std():>10.3f}")
    return "\n".join(lines)


def trace_run(v, t: float, method: str, tol: float = TOL_DEFAULT) -> list[TraceRow]:
    """Iteration table for one solve (see :class:`TraceRow`)."""
    res: RootResult = solve_phi(v, t, method, tol, record_trace=True)
    return res.trace
