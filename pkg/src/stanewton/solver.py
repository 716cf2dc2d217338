"""Riemannian Newton iterations, with and without a trust region."""
from __future__ import annotations

import csv
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DegenerateInitialPoint, DegenerateRetraction, SubgenericRankWarning
from .manifold import Decomposition, retract_product
from .objective import bundle, objective_value
from .poly import HomPoly, apolar_norm, generic_rank

log = logging.getLogger(__name__)

TRUST_REGION = "trust_region"
PLAIN_NEWTON = "plain_newton"


@dataclass
class SolverOptions:
    max_iters: int = 200
    radius_floor: float = 1e-3
    iterate_tol: float = 1e-6
    rho_accept: float = 0.2
    rho_enlarge: float = 0.6
    pinv_threshold: float = 1e12
    grad_tol: float = 1e-13
    mode: str = TRUST_REGION

    def __post_init__(self):
        if not 0 < self.rho_accept < self.rho_enlarge < 1:
            raise ValueError("need 0 < rho_accept < rho_enlarge < 1")
        if min(self.radius_floor, self.iterate_tol, self.pinv_threshold) <= 0 or self.grad_tol < 0:
            raise ValueError("tolerances must be positive")
        if self.max_iters < 0:
            raise ValueError("max_iters must be non-negative")
        if self.mode not in (TRUST_REGION, PLAIN_NEWTON):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass
class TraceRow:
    k: int
    f: float
    radius: float
    rho: float
    accepted: bool
    grad_norm: float
    step_norm: float
    note: str = ""


@dataclass
class ApproxResult:
    decomposition: Decomposition
    residual: float
    iterations: int
    trace: list = field(default_factory=list)
    termination: str = "running"
    f: float = 0.0

    def write_trace(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "f", "delta", "rho", "accepted"])
            for row in self.trace:
                w.writerow([row.k, repr(row.f), repr(row.radius), repr(row.rho), int(row.accepted)])


# ---------------------------------------------------------------------------
# subproblem pieces
# ---------------------------------------------------------------------------

def newton_direction(G: np.ndarray, H: np.ndarray, pinv_threshold: float = 1e12) -> np.ndarray:
    """Solve ``H p = -G``; Moore-Penrose pseudoinverse when ill-conditioned."""
    if G.size == 0:
        return np.zeros(0)
    if np.linalg.cond(H) > pinv_threshold:
        return -np.linalg.pinv(H, rcond=1.0 / pinv_threshold, hermitian=True) @ G
    return -np.linalg.solve(H, G)


def dogleg(G: np.ndarray, H: np.ndarray, radius: float, pinv_threshold: float = 1e12,
           info: Optional[dict] = None) -> np.ndarray:
    """Dogleg step for ``min G.u + u.H.u/2`` subject to ``|u| <= radius``.

    With an indefinite ``H`` the Newton point may not decrease the model;
    the (clipped) Cauchy point is used instead in that case.
    """
    if radius <= 0:
        raise ValueError("trust radius must be positive")
    gnorm = np.linalg.norm(G)
    if gnorm == 0:
        return np.zeros_like(G)
    gHg = G @ H @ G
    steepest = -(radius / gnorm) * G
    if gHg <= 0:
        _note(info, "nonconvex_cauchy")
        return steepest
    p_c = -(gnorm ** 2 / gHg) * G
    cauchy_out = np.linalg.norm(p_c) >= radius
    p_n = newton_direction(G, H, pinv_threshold)
    if model_decrease(G, H, p_n) <= 0:
        _note(info, "cauchy" if cauchy_out else "cauchy_inside")
        return steepest if cauchy_out else p_c
    if np.linalg.norm(p_n) <= radius:
        _note(info, "newton")
        return p_n
    if cauchy_out:
        _note(info, "cauchy")
        return steepest
    # |p_c + s (p_n - p_c)| = radius, positive root
    diff = p_n - p_c
    a = diff @ diff
    b = 2 * (p_c @ diff)
    c = p_c @ p_c - radius ** 2
    s = (-b + math.sqrt(b * b - 4 * a * c)) / (2 * a)
    u = p_c + s * diff
    if model_decrease(G, H, u) <= 0:
        _note(info, "cauchy_inside")
        return p_c
    _note(info, "dogleg")
    return u


def _note(info, what):
    if info is not None:
        info["branch"] = what


def update_radius(rho: float, radius: float, step_norm: float, radius_max: float,
                  rho_enlarge: float = 0.6) -> float:
    if rho is None or math.isnan(rho):
        rho = -math.inf
    if rho > rho_enlarge:
        return min(2 * step_norm, radius_max)
    if rho == -math.inf:
        factor = 1.0 / 3.0
    else:
        factor = 1.0 / 3.0 + (2.0 / 3.0) / (1.0 + math.exp(min(-14.0 * (rho - 1.0 / 3.0), 700.0)))
    return min(factor * radius, radius_max)


def initial_radius(p0: Decomposition, P: HomPoly) -> tuple[float, float]:
    radius_max = 0.5 * apolar_norm(P)
    r0 = 0.1 * math.sqrt(p0.d / p0.r * float(np.sum(np.abs(p0.W) ** 2)))
    return min(r0, radius_max), radius_max


def model_decrease(G: np.ndarray, H: np.ndarray, u: np.ndarray) -> float:
    """``m(0) - m(u)``."""
    return float(-(G @ u) - 0.5 * (u @ H @ u))


def _distance(a: Decomposition, b: Decomposition) -> float:
    return apolar_norm(a.poly() - b.poly())


def _warn_rank(P: HomPoly, r: int):
    if P.d >= 3 and r >= generic_rank(P.n, P.d):
        warnings.warn(f"rank {r} is not below the generic rank {generic_rank(P.n, P.d)}",
                      SubgenericRankWarning, stacklevel=3)


def _result(p, P, k, trace, reason) -> ApproxResult:
    f = objective_value(p, P)
    return ApproxResult(p, math.sqrt(2 * f), k, trace, reason, f)


# ---------------------------------------------------------------------------
# solvers
# ---------------------------------------------------------------------------

def rns_tr(P: HomPoly, p0: Decomposition, opts: Optional[SolverOptions] = None) -> ApproxResult:
    """Riemannian Newton iterations with a dogleg trust region."""
    opts = opts or SolverOptions()
    _warn_rank(P, p0.r)
    radius, radius_max = initial_radius(p0, P)
    if radius <= 0:
        raise DegenerateInitialPoint("initial trust radius is zero (all weights vanish or P = 0)")
    gscale = max(1.0, apolar_norm(P)) ** 2
    p = p0
    b = bundle(p, P)
    trace: list[TraceRow] = []
    reason = "max_iters"
    k = 0
    while k < opts.max_iters:
        gnorm = float(np.linalg.norm(b.G_proj))
        if gnorm <= opts.grad_tol * gscale:
            reason = "stationary"
            break
        info: dict = {}
        u = dogleg(b.G_proj, b.H_proj, radius, opts.pinv_threshold, info)
        step = float(np.linalg.norm(u))
        pred = model_decrease(b.G_proj, b.H_proj, u)
        try:
            cand = retract_product(p, u, b.basis)
        except DegenerateRetraction as exc:
            log.warning("retraction failed at iteration %d: %s", k, exc)
            reason = "retraction_failed"
            break
        f_new = objective_value(cand, P)
        rho = (b.f_val - f_new) / pred if pred > 0 else -math.inf
        accepted = rho > opts.rho_accept
        k += 1
        trace.append(TraceRow(k, f_new if accepted else b.f_val, radius, rho, accepted,
                              gnorm, step, info.get("branch", "")))
        radius = update_radius(rho, radius, step, radius_max, opts.rho_enlarge)
        if accepted:
            moved = _distance(p, cand)
            p = cand
            b = bundle(p, P)
            if moved < opts.iterate_tol:
                reason = "iterate_converged"
                break
        if radius <= opts.radius_floor:
            reason = "radius_floor"
            break
    return _result(p, P, k, trace, reason)


def rns(P: HomPoly, p0: Decomposition, opts: Optional[SolverOptions] = None) -> ApproxResult:
    """Plain Riemannian Newton iterations (no globalization)."""
    opts = opts or SolverOptions(mode=PLAIN_NEWTON)
    _warn_rank(P, p0.r)
    gscale = max(1.0, apolar_norm(P)) ** 2
    p = p0
    b = bundle(p, P)
    best = (b.f_val, p)
    trace: list[TraceRow] = []
    reason = "max_iters"
    increases = 0
    k = 0
    while k < opts.max_iters:
        gnorm = float(np.linalg.norm(b.G_proj))
        if gnorm <= opts.grad_tol * gscale:
            reason = "stationary"
            break
        eta = newton_direction(b.G_proj, b.H_proj, opts.pinv_threshold)
        try:
            cand = retract_product(p, eta, b.basis)
        except DegenerateRetraction as exc:
            log.warning("retraction failed at iteration %d: %s", k, exc)
            reason = "retraction_failed"
            break
        k += 1
        moved = _distance(p, cand)
        f_prev = b.f_val
        p = cand
        b = bundle(p, P)
        trace.append(TraceRow(k, b.f_val, math.nan, math.nan, True, gnorm,
                              float(np.linalg.norm(eta)), "newton"))
        if b.f_val < best[0]:
            best = (b.f_val, p)
        increases = increases + 1 if b.f_val > f_prev else 0
        if moved < opts.iterate_tol:
            reason = "iterate_converged"
            break
        if increases >= 5:
            reason = "diverged"
            p = best[1]
            break
    return _result(p, P, k, trace, reason)


def solve(P: HomPoly, p0: Decomposition, opts: Optional[SolverOptions] = None) -> ApproxResult:
    opts = opts or SolverOptions()
    if opts.mode == PLAIN_NEWTON:
        return rns(P, p0, opts)
    return rns_tr(P, p0, opts)
