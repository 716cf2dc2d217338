"""Best real rank-1 approximation and the spectral-norm lower bound."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import STAError
from .initial import random_init, shd_init
from .poly import REAL, HomPoly, apolar_norm, evaluate, multinomials, veronese
from .solver import PLAIN_NEWTON, ApproxResult, SolverOptions, rns, rns_tr


@dataclass
class Rank1Result:
    w: float
    v: np.ndarray
    spectral_lower_bound: float
    dist1: float
    d_star: float
    d0: float
    iterations: int
    termination: str
    solver: str


def monomial_norm(P: HomPoly) -> float:
    """Euclidean norm of the coefficients of ``P`` in the monomial basis."""
    return float(np.linalg.norm(multinomials(P.n, P.d) * P.coef))


def _score(P: HomPoly, res: ApproxResult) -> float:
    return abs(evaluate(P, res.decomposition.V[:, 0].real).real)


FAILED = ("diverged", "retraction_failed", "max_iters")


def _local_solve(P: HomPoly, p0, opts: SolverOptions) -> tuple[ApproxResult, str]:
    res = rns(P, p0, opts)
    if res.termination in ("diverged", "retraction_failed"):
        alt = rns_tr(P, p0, opts)
        if _score(P, alt) > _score(P, res):
            return alt, "trust_region"
    return res, "newton"


def best_rank1(P: HomPoly, opts: Optional[SolverOptions] = None, seed=0,
               starts: int = 12) -> Rank1Result:
    """Rank-1 approximation ``w (v^t x)^d`` of a real polynomial.

    Plain Newton iterations run from the spectral start on the
    first-variable chart; when they diverge, the trust-region variant is
    run from the same start.  Newton converges to any critical point, so
    ``starts - 1`` further trust-region runs (which only settle at local
    maxima of ``|P(v)|``) start from alternating random-chart spectral
    points and random unit vectors.  One of them replaces the current
    result only if it terminated normally with a strictly larger ``|P(v)|``.  The result is a critical
    point, not a certified global optimum.  ``d0`` always refers to the
    first start.
    """
    if P.field != REAL:
        raise STAError("best_rank1 needs a real polynomial")
    if starts < 1:
        raise ValueError("starts must be at least 1")
    opts = opts or SolverOptions(mode=PLAIN_NEWTON)
    rng = np.random.default_rng(seed)
    p_first, _ = shd_init(P, 1, chart="first")
    res, solver = _local_solve(P, p_first, opts)
    best = _score(P, res)
    for k in range(starts - 1):
        if k % 2 == 0:
            p0, _ = shd_init(P, 1, seed=rng, chart="random")
        else:
            p0 = random_init(P, 1, seed=rng)
        cand = rns_tr(P, p0, opts)
        score = _score(P, cand)
        if cand.termination not in FAILED and score > best * (1 + 1e-9):
            res, solver, best = cand, "trust_region", score
    v = res.decomposition.V[:, 0].real.copy()
    w = float(evaluate(P, v).real)
    resid = P - veronese(v, P.d) * w
    return Rank1Result(
        w=w,
        v=v,
        spectral_lower_bound=abs(w),
        dist1=apolar_norm(resid),
        d_star=monomial_norm(resid),
        d0=monomial_norm(P - p_first.poly()),
        iterations=res.iterations,
        termination=res.termination,
        solver=solver,
    )
