"""Initial points: spectral decomposition of Hankel pencils, or random."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InsufficientDegree, RankDeficientPencilWarning
from .manifold import Decomposition
from .poly import COMPLEX, REAL, HomPoly, apolar_norm, evaluate, monomials, shift_up, sum_index

RETRIES_REAL = 5


@dataclass
class InitReport:
    method: str
    residual_at_init: float
    pencil_gap: float = math.nan
    warnings: list = field(default_factory=list)


def _unit(rng, n, field):
    a = rng.standard_normal(n)
    if field == COMPLEX:
        a = a + 1j * rng.standard_normal(n)
    return a / np.linalg.norm(a)


def fit_weights(P: HomPoly, V: np.ndarray, field: str) -> np.ndarray:
    """Least-squares weights ``argmin_c || sum c_i Phi(v_i) - P ||_d``.

    Normal equations use the apolar Gram matrix ``[(v_i^* v_j)^d]`` and the
    right-hand side ``<Phi(v_i), P> = P(conj v_i)``.
    """
    G = (V.conj().T @ V) ** P.d
    rhs = np.array([evaluate(P, np.conj(V[:, i])) for i in range(V.shape[1])])
    if field == REAL:
        G, rhs = G.real, rhs.real
    c, *_ = np.linalg.lstsq(G, rhs, rcond=None)
    return c


def _decomposition(P: HomPoly, V: np.ndarray, field: str) -> tuple[Decomposition, float]:
    V = V / np.linalg.norm(V, axis=0)
    if field == REAL:
        V = V.real
    c = fit_weights(P, V, field)
    p = Decomposition.normalized(c, V, P.d, field)
    return p, apolar_norm(p.poly() - P)


def pencil_slices(P: HomPoly) -> np.ndarray:
    """Shifted Hankel slices, shape ``(N_k, N_m, n)`` with k = ceil((d-1)/2)."""
    n, d = P.n, P.d
    k = -(-(d - 1) // 2)
    m = d - k - 1
    table = shift_up(n, d)[sum_index(n, k, m)]
    H = P.coef[table]
    return H.real if P.field == REAL else H


def _realify(X: np.ndarray) -> np.ndarray:
    """Closest real directions to complex columns (phase aligned)."""
    out = np.empty(X.shape)
    for j in range(X.shape[1]):
        x = X[:, j]
        i = int(np.argmax(np.abs(x)))
        out[:, j] = (x * np.exp(-1j * np.angle(x[i]))).real
    return out


def _chart_svd(Hs, r, a):
    U, s, Vh = np.linalg.svd(Hs @ a)
    ok = s[0] > 0 and s[min(r, len(s)) - 1] >= 1e-12 * s[0]
    return U, s, Vh, ok


def _shd_once(P: HomPoly, r: int, rng, field: str, notes: list, chart: str):
    n = P.n
    Hs = pencil_slices(P)
    if r > min(Hs.shape[0], Hs.shape[1]):
        raise InsufficientDegree(
            f"rank {r} exceeds the Hankel slice size {Hs.shape[:2]} for n={n}, d={P.d}")
    if chart == "first":
        U, s, Vh, ok = _chart_svd(Hs, r, np.eye(n)[0])
        if not ok:
            notes.append("first-variable chart is rank-deficient; using a random chart")
            chart = "random"
    if chart == "random":
        U, s, Vh, ok = _chart_svd(Hs, r, _unit(rng, n, field))
    r_eff = r
    if s[0] == 0:
        r_eff = 0
    else:
        small = s[:r] < 1e-12 * s[0]
        if np.any(small):
            r_eff = int(np.argmax(small))
            notes.append(f"rank-deficient pencil: {r - r_eff} of {r} singular values vanish")
            warnings.warn(notes[-1], RankDeficientPencilWarning, stacklevel=3)
    cols = []
    gap = math.nan
    if r_eff > 0:
        Ur, sr, Vr = U[:, :r_eff], s[:r_eff], Vh[:r_eff].conj().T
        M = np.einsum("ar,abi,bs->irs", Ur.conj(), Hs, Vr) / sr[None, None, :]
        for attempt in range(RETRIES_REAL + 1):
            bvec = _unit(rng, n, field)
            lam, E = np.linalg.eig(np.tensordot(bvec, M, axes=1))
            if field != REAL or np.all(np.abs(lam.imag) <= 1e-8 * max(1.0, np.max(np.abs(lam)))):
                break
        else:
            notes.append("complex eigenvalues in a real pencil; using phase-aligned real parts")
        # Rayleigh quotients of every slice operator give the point coordinates
        X = np.einsum("rj,irs,sj->ij", E.conj(), M, E) / np.sum(np.abs(E) ** 2, axis=0)[None, :]
        if field == REAL:
            X = _realify(X) if np.any(np.abs(X.imag) > 1e-8 * np.max(np.abs(X))) else X.real
        cols.append(X)
        if r_eff > 1:
            dl = np.abs(lam[:, None] - lam[None, :]) + np.diag(np.full(r_eff, np.inf))
            gap = float(np.min(dl))
    if r_eff < r:
        cols.append(np.stack([_unit(rng, n, field) for _ in range(r - r_eff)], axis=1))
    V = np.concatenate(cols, axis=1)
    if field == REAL:
        V = V.real
    if np.any(np.linalg.norm(V, axis=0) == 0):
        zero = np.linalg.norm(V, axis=0) == 0
        V[:, zero] = np.stack([_unit(rng, n, field) for _ in range(int(zero.sum()))], axis=1)
    return V, gap


def shd_init(P: HomPoly, r: int, seed=None, field: Optional[str] = None,
             candidates: int = 1, chart: str = "auto") -> tuple[Decomposition, InitReport]:
    """Initial rank-``r`` point from common eigenvectors of a Hankel pencil.

    The pencil is normalized either by the slice of the first variable
    (``chart="first"``, with a random fallback when that slice is
    rank-deficient) or by a random combination of slices (``"random"``).
    ``"auto"`` picks the first-variable chart for ``r = 1``, which makes the
    rank-1 start independent of the seed, and a random one otherwise.
    The eigenvectors come from a random combination of the multiplication
    operators.  ``candidates`` independent draws are tried and the one with
    the smallest residual is kept.
    """
    if chart not in ("auto", "first", "random"):
        raise ValueError(f"unknown chart {chart!r}")
    if chart == "auto":
        chart = "first" if r == 1 else "random"
    field = field or P.field
    if P.d < 3:
        raise InsufficientDegree(f"spectral initialization needs d >= 3, got d={P.d}")
    if r < 1:
        raise ValueError("rank must be at least 1")
    if field == REAL and P.field != REAL:
        raise ValueError("real-mode initialization of a complex polynomial")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(max(1, candidates)):
        notes: list = []
        V, gap = _shd_once(P, r, rng, field, notes, chart)
        p, res = _decomposition(P, V, field)
        if best is None or res < best[1]:
            best = (p, res, gap, notes)
    p, res, gap, notes = best
    return p, InitReport("shd", res, gap, notes)


def random_init(P: HomPoly, r: int, seed=None, field: Optional[str] = None) -> Decomposition:
    """Gaussian unit directions with least-squares weights."""
    field = field or P.field
    rng = np.random.default_rng(seed)
    V = np.stack([_unit(rng, P.n, field) for _ in range(r)], axis=1)
    p, _ = _decomposition(P, V, field)
    return p


def init_report(P: HomPoly, p: Decomposition, method: str) -> InitReport:
    return InitReport(method, apolar_norm(p.poly() - P))
