"""Experiment protocols: random perturbations, rank-1 tables, sparse examples."""
from __future__ import annotations

import csv
import io
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .errors import STAError
from .initial import random_init, shd_init
from .manifold import Decomposition
from .poly import (
    COMPLEX,
    REAL,
    HomPoly,
    apolar_norm,
    entries_from_function,
    monomial_index,
    random_gaussian_poly,
)
from .rank1 import best_rank1
from .solver import PLAIN_NEWTON, TRUST_REGION, SolverOptions, solve

log = logging.getLogger(__name__)

PERTURB_HEADER = ["r", "eps", "err_min", "err_med", "err_max", "avg_time_s", "avg_iters"]
EXAMPLE_HEADER = ["r", "err_min", "err_med", "err_max", "avg_time_s", "avg_iters"]
RANK1_HEADER = ["name", "n", "d", "w_abs", "d0", "d_star", "time_s", "iters"]


@dataclass
class ExperimentSpec:
    n: int
    d: int
    r: int
    field: str = REAL
    epsilon: float = 1e-2
    trials: int = 100
    seed: int = 0
    init: str = "shd"
    mode: str = TRUST_REGION
    candidates: int = 1
    max_iters: int = 200

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        if self.field not in (REAL, COMPLEX):
            raise ValueError(f"unknown field {self.field!r}")
        if self.init not in ("shd", "random"):
            raise ValueError(f"unknown init {self.init!r}")

    def options(self) -> SolverOptions:
        return SolverOptions(max_iters=self.max_iters, mode=self.mode)


@dataclass
class TrialRow:
    trial: int
    seed: int
    err: float
    residual: float
    time_s: float
    iterations: int
    termination: str
    ok: bool = True


@dataclass
class ExperimentSummary:
    r: int
    eps: float
    err_min: float
    err_med: float
    err_max: float
    avg_time_s: float
    avg_iters: int
    rows: list = field(default_factory=list)
    failures: int = 0
    absolute: bool = False

    def csv_row(self) -> list:
        return [self.r, _fmt(self.eps), _fmt(self.err_min), _fmt(self.err_med),
                _fmt(self.err_max), _fmt(self.avg_time_s), self.avg_iters]


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def lower_median(values) -> float:
    """Median; for an even count, the lower of the two middle values."""
    s = sorted(values)
    if not s:
        return math.nan
    return s[(len(s) - 1) // 2]


def pool_size() -> int:
    try:
        return max(1, int(os.environ.get("STA_THREADS", "1")))
    except ValueError:
        return 1


def _map(fn, items: list) -> list:
    """Ordered map, in a process pool when ``STA_THREADS`` > 1."""
    workers = min(pool_size(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def _initial(P: HomPoly, r: int, seed: int, init: str, candidates: int) -> Decomposition:
    if init == "random":
        return random_init(P, r, seed=seed)
    p0, _ = shd_init(P, r, seed=seed, candidates=candidates)
    return p0


# ---------------------------------------------------------------------------
# random perturbations
# ---------------------------------------------------------------------------

def perturbed_instance(spec: ExperimentSpec, seed: int) -> tuple[HomPoly, HomPoly]:
    """``(T, T~)``: a sum of ``r`` Gaussian powers and its perturbation."""
    rng = np.random.default_rng(seed)
    V = rng.standard_normal((spec.n, spec.r))
    if spec.field == COMPLEX:
        V = V + 1j * rng.standard_normal((spec.n, spec.r))
    p = Decomposition.normalized(np.ones(spec.r), V, spec.d, spec.field)
    T = p.poly()
    E = random_gaussian_poly(spec.n, spec.d, spec.field, seed=rng)
    if spec.epsilon == 0:
        return T, T
    return T, T + E * (spec.epsilon / apolar_norm(E))


def run_trial(spec: ExperimentSpec, trial: int) -> TrialRow:
    seed = spec.seed + trial
    T, Tt = perturbed_instance(spec, seed)
    start = time.perf_counter()
    try:
        p0 = _initial(Tt, spec.r, seed, spec.init, spec.candidates)
        res = solve(Tt, p0, spec.options())
    except STAError as exc:
        log.warning("trial %d failed: %s", trial, exc)
        return TrialRow(trial, seed, math.nan, math.nan, time.perf_counter() - start, 0, "error", False)
    elapsed = time.perf_counter() - start
    dist = apolar_norm(res.decomposition.poly() - T)
    err = dist / spec.epsilon if spec.epsilon > 0 else dist
    ok = res.termination not in ("retraction_failed", "diverged")
    return TrialRow(trial, seed, err, res.residual, elapsed, res.iterations, res.termination, ok)


def _trial_job(args):
    return run_trial(*args)


def summarize(rows: list, r: int, eps: float) -> ExperimentSummary:
    done = [row for row in rows if row.ok]
    errs = [row.err for row in done]
    if done:
        avg_t = float(np.mean([row.time_s for row in done]))
        avg_k = int(round(float(np.mean([row.iterations for row in done]))))
    else:
        avg_t, avg_k = math.nan, 0
    return ExperimentSummary(
        r, eps,
        min(errs, default=math.nan), lower_median(errs), max(errs, default=math.nan),
        avg_t, avg_k, rows, len(rows) - len(done), eps == 0,
    )


def run_perturbation(spec: ExperimentSpec) -> ExperimentSummary:
    """Relative errors ``||T* - T||_d / eps`` over ``spec.trials`` instances.

    With ``eps = 0`` the absolute distance is reported and the summary is
    flagged ``absolute``.
    """
    if spec.epsilon == 0:
        log.warning("epsilon = 0: reporting absolute errors")
    rows = _map(_trial_job, [(spec, t) for t in range(spec.trials)])
    return summarize(rows, spec.r, spec.epsilon)


def to_csv(header: list, rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def perturbation_csv(summaries: list) -> str:
    return to_csv(PERTURB_HEADER, [s.csv_row() for s in summaries])


# ---------------------------------------------------------------------------
# named examples
# ---------------------------------------------------------------------------

def _ex42(*i):
    return sum((-1) ** k / k for k in i)


def _ex43(*i):
    return sum((-1) ** k * math.log(k) for k in i)


def _ex44(*i):
    return math.sin(sum(i))


def _sparse_poly(n: int, diag, off) -> HomPoly:
    """Cubic ``sum diag(i) x_i^3 + sum_{i != j} 3 off(i) x_i^2 x_j``."""
    idx = monomial_index(n, 3)
    c = np.zeros(len(idx), dtype=complex)
    for i in range(n):
        a = [0] * n
        a[i] = 3
        c[idx[tuple(a)]] = diag(i + 1)
        for j in range(n):
            if j != i:
                a = [0] * n
                a[i], a[j] = 2, 1
                c[idx[tuple(a)]] = off(i + 1)
    field = REAL if np.all(c.imag == 0) else COMPLEX
    return HomPoly(n, 3, field, c)


def example_poly(name: str, n: Optional[int] = None, d: Optional[int] = None) -> HomPoly:
    """Closed-form test polynomials, entries indexed from 1."""
    if name == "ex42":
        return entries_from_function(n or 10, 3, _ex42)
    if name == "ex43":
        return entries_from_function(n or 5, 5, _ex43)
    if name == "ex44":
        return entries_from_function(n or 10, d or 3, _ex44)
    if name == "ex45":
        n = n or 10
        # x_i^2 x_j carries coefficient 1, i.e. symmetric entry 1/3
        return _sparse_poly(n, lambda i: i * i + 1, lambda i: 1 / 3)
    if name == "ex46":
        n = n or 10
        return _sparse_poly(
            n,
            lambda i: np.exp(math.sqrt(i) + 1j * i * i) + 1j * i / n,
            lambda i: 1j * i / n / 3,
        )
    raise ValueError(f"unknown example {name!r}")


RANK1_EXAMPLES = ("ex42", "ex43", "ex44")
SPARSE_EXAMPLES = ("ex45", "ex46")


def run_rank1_example(name: str, n: Optional[int] = None, d: Optional[int] = None) -> dict:
    P = example_poly(name, n, d)
    start = time.perf_counter()
    res = best_rank1(P)
    elapsed = time.perf_counter() - start
    return {
        "name": name, "n": P.n, "d": P.d,
        "w": res.w, "w_abs": abs(res.w), "d0": res.d0, "d_star": res.d_star,
        "dist1": res.dist1, "time_s": elapsed, "iters": res.iterations,
        "termination": res.termination, "solver": res.solver,
        "v": res.v.tolist(),
    }


def _sparse_job(args):
    P, r, seed, candidates, opts = args
    start = time.perf_counter()
    try:
        p0, _ = shd_init(P, r, seed=seed, candidates=candidates)
        res = solve(P, p0, opts)
    except STAError as exc:
        log.warning("seed %d failed: %s", seed, exc)
        return TrialRow(seed, seed, math.nan, math.nan, time.perf_counter() - start, 0, "error", False)
    ok = res.termination not in ("retraction_failed", "diverged")
    return TrialRow(seed, seed, res.residual, res.residual, time.perf_counter() - start,
                    res.iterations, res.termination, ok)


def run_sparse_example(name: str, r: int, trials: int = 50, seed: int = 0,
                       candidates: int = 3, opts: Optional[SolverOptions] = None) -> ExperimentSummary:
    """Residuals of ``trials`` spectral-start trust-region runs at rank ``r``."""
    P = example_poly(name)
    opts = opts or SolverOptions()
    rows = _map(_sparse_job, [(P, r, seed + t, candidates, opts) for t in range(trials)])
    return summarize(rows, r, math.nan)


def run_named_example(name: str, n: Optional[int] = None, d: Optional[int] = None,
                      ranks=(3, 5, 10), trials: int = 50, seed: int = 0) -> dict:
    if name in RANK1_EXAMPLES:
        res = run_rank1_example(name, n, d)
        row = [name, res["n"], res["d"], _fmt(res["w_abs"]), _fmt(res["d0"]),
               _fmt(res["d_star"]), _fmt(res["time_s"]), res["iters"]]
        return {"kind": "rank1", "result": res, "csv": to_csv(RANK1_HEADER, [row])}
    if name in SPARSE_EXAMPLES:
        sums = [run_sparse_example(name, r, trials, seed) for r in ranks]
        rows = [[s.r, _fmt(s.err_min), _fmt(s.err_med), _fmt(s.err_max),
                 _fmt(s.avg_time_s), s.avg_iters] for s in sums]
        result = [{k: v for k, v in asdict(s).items() if k not in ("rows", "eps", "absolute")}
                  for s in sums]
        return {"kind": "sparse", "result": result, "csv": to_csv(EXAMPLE_HEADER, rows)}
    raise ValueError(f"unknown example {name!r}")
