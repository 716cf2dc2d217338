"""Catalecticant (Hankel) matrices and the dominant singular direction."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidDegreeSplit, NearDegenerateWarning, ZeroPolynomial
from .poly import HomPoly, monomials, shift_up, sum_index


@dataclass(frozen=True)
class HankelMatrix:
    k: int
    d_minus_k: int
    rows: np.ndarray  # exponents of degree k
    cols: np.ndarray  # exponents of degree d - k
    data: np.ndarray


def hankel_data(P: HomPoly, k: int) -> np.ndarray:
    """Entry (a, b) is the coefficient ``p_{a+b}``."""
    if not 1 <= k <= P.d - 1:
        raise InvalidDegreeSplit(f"k must lie in [1, {P.d - 1}], got {k}")
    if k == 1:
        return P.coef[shift_up(P.n, P.d)].T
    return P.coef[sum_index(P.n, k, P.d - k)]


def build_hankel(P: HomPoly, k: int) -> HankelMatrix:
    return HankelMatrix(k, P.d - k, monomials(P.n, k), monomials(P.n, P.d - k), hankel_data(P, k))


def fix_phase(u: np.ndarray) -> np.ndarray:
    """Rotate ``u`` so its largest-magnitude entry is real and positive."""
    i = int(np.argmax(np.abs(u)))
    a = u[i]
    if a == 0:
        return u
    return u * (abs(a) / a)


def _leading(P: HomPoly):
    H = hankel_data(P, 1)
    if P.field == "real":
        H = H.real
    if not np.any(H):
        raise ZeroPolynomial("Hankel matrix of the zero polynomial has no singular direction")
    U, s, _ = np.linalg.svd(H, full_matrices=False)
    return U, s


def theta(P: HomPoly) -> np.ndarray:
    """Unit first left singular vector of ``H_P^{1,d-1}`` with fixed phase."""
    U, s = _leading(P)
    if len(s) > 1 and s[1] >= s[0] * (1 - 1e-12):
        warnings.warn("leading singular value of the Hankel matrix is not simple",
                      NearDegenerateWarning, stacklevel=2)
    u = fix_phase(U[:, 0])
    if P.field == "real":
        u = u.real.astype(complex)
    return u


def singular_gap(P: HomPoly) -> tuple[float, float]:
    H = hankel_data(P, 1)
    s = np.linalg.svd(H.real if P.field == "real" else H, compute_uv=False)
    return float(s[0]), float(s[1]) if len(s) > 1 else 0.0
