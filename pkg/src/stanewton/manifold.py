"""Points of the product of Veronese manifolds and the retraction onto it.

A point is stored as weights ``W`` (real) and unit columns ``V`` so that the
represented polynomial is ``sum_i w_i (v_i^t x)^d``.  Local coordinates are
the real vector ``(W, Re V, Im V)`` of length ``r + 2nr`` with ``V``
flattened column by column.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from .errors import (
    DegenerateRetraction,
    DimensionMismatch,
    NotNormalized,
    ZeroPolynomial,
    ZeroVector,
)
from .hankel import theta
from .poly import (
    COMPLEX,
    REAL,
    HomPoly,
    apolar,
    evaluate,
    from_decomposition,
    monomial_powers,
    monomials,
    shift_down,
    veronese,
)

UNIT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Decomposition:
    W: np.ndarray
    V: np.ndarray
    d: int
    field: str = COMPLEX

    def __post_init__(self):
        W = np.array(self.W, dtype=float).ravel()
        V = np.array(self.V, dtype=complex)
        if V.ndim == 1:
            V = V[:, None]
        if V.shape[1] != W.shape[0] or W.shape[0] < 1:
            raise DimensionMismatch(f"{W.shape[0]} weights for {V.shape[1]} vectors")
        norms = np.linalg.norm(V, axis=0)
        if np.any(np.abs(norms - 1) > UNIT_TOL):
            raise NotNormalized(f"columns must have unit norm, got {norms}")
        if self.field == REAL:
            if np.any(V.imag != 0):
                raise ValueError("real-mode decomposition with complex vectors")
        elif self.field == COMPLEX:
            if np.any(W < 0):
                raise ValueError("complex-mode weights must be non-negative")
        else:
            raise ValueError(f"unknown field {self.field!r}")
        W.setflags(write=False)
        V.setflags(write=False)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "V", V)

    @classmethod
    def normalized(cls, weights, vectors, d: int, field: str = COMPLEX) -> "Decomposition":
        """Rescale arbitrary ``(c_i, u_i)`` so that ``c_i Phi(u_i)`` is kept."""
        c = np.asarray(weights, dtype=complex).ravel()
        U = np.array(vectors, dtype=complex)
        if U.ndim == 1:
            U = U[:, None]
        norms = np.linalg.norm(U, axis=0)
        if np.any(norms == 0):
            raise ZeroVector("zero column in decomposition")
        c = c * norms ** d
        U = U / norms
        if field == REAL:
            return cls(c.real, U.real, d, REAL)
        mag = np.abs(c)
        phase = np.exp(1j * np.angle(c) / d)
        return cls(mag, U * phase, d, COMPLEX)

    @property
    def r(self) -> int:
        return self.W.shape[0]

    @property
    def n(self) -> int:
        return self.V.shape[0]

    def poly(self) -> HomPoly:
        P = from_decomposition(self.W, self.V, self.d)
        if self.field == COMPLEX and P.field == REAL:
            return P.as_complex()
        return P

    def coords(self) -> np.ndarray:
        """Real vector ``(W, Re V, Im V)``."""
        return np.concatenate([self.W, self.V.real.T.ravel(), self.V.imag.T.ravel()])

    def __repr__(self):
        return f"Decomposition(r={self.r}, n={self.n}, d={self.d}, field={self.field!r})"


@dataclass(frozen=True, eq=False)
class TangentBasis:
    Q: np.ndarray
    blocks: list = field(default_factory=list)  # per-term (Q_re, Q_im)
    restricted: bool = False


# ---------------------------------------------------------------------------
# projection and retraction on a single Veronese manifold
# ---------------------------------------------------------------------------

def project_pi(v, Q: HomPoly) -> HomPoly:
    """Closest multiple of ``Phi(v)`` to ``Q`` in the apolar norm."""
    v = np.asarray(v, dtype=complex).ravel()
    nv = np.linalg.norm(v)
    if nv == 0:
        raise ZeroVector("projection onto the line of Phi(0)")
    L = veronese(v, Q.d)
    out = L * (apolar(L, Q) / nv ** (2 * Q.d))
    return out if Q.field == COMPLEX or out.field == REAL else out.as_complex()


def _retract_sum(S: HomPoly, field: str) -> tuple[float, np.ndarray]:
    """Veronese point ``Pi_{theta(S)}(S)`` as (weight, unit vector)."""
    try:
        u = theta(S)
    except ZeroPolynomial as exc:
        raise DegenerateRetraction("P + Q has a zero Hankel matrix") from exc
    z = evaluate(S, np.conj(u))
    if field == REAL:
        return float(z.real), u.real.astype(complex)
    return float(abs(z)), u * np.exp(1j * np.angle(z) / S.d)


def retract_veronese(P: HomPoly, Q: HomPoly, field: Optional[str] = None) -> tuple[float, np.ndarray]:
    """Retract ``P + Q`` onto the Veronese manifold.

    Returns ``(w, v)`` with unit ``v`` such that ``w Phi(v) = R_P(Q)``.  In
    complex mode ``w >= 0``; in real mode ``w`` carries the sign.
    """
    if field is None:
        field = REAL if P.field == REAL and Q.field == REAL else COMPLEX
    return _retract_sum(P + Q, field)


# ---------------------------------------------------------------------------
# product manifold
# ---------------------------------------------------------------------------

def _sphere_complement(u: np.ndarray) -> np.ndarray:
    m = u.shape[0]
    A = np.eye(m) - np.outer(u, u)
    Qf, _, _ = scipy.linalg.qr(A, pivoting=True)
    return Qf[:, : m - 1]


def tangent_basis(p: Decomposition, restrict_real: bool = False) -> TangentBasis:
    """Orthonormal basis of the tangent space in ``(W, Re V, Im V)`` coordinates.

    With ``restrict_real`` the imaginary directions are dropped, which gives
    the tangent space of the real slice (dimension ``nr``).
    """
    n, r = p.n, p.r
    norms = np.linalg.norm(p.V, axis=0)
    if np.any(np.abs(norms - 1) > UNIT_TOL):
        raise NotNormalized(f"columns must have unit norm, got {norms}")
    per = n - 1 if restrict_real else 2 * n - 1
    Q = np.zeros((r + 2 * n * r, r + r * per))
    Q[:r, :r] = np.eye(r)
    blocks = []
    for i in range(r):
        cols = slice(r + i * per, r + (i + 1) * per)
        if restrict_real:
            q_re = _sphere_complement(p.V[:, i].real)
            q_im = np.zeros_like(q_re)
        else:
            u = np.concatenate([p.V[:, i].real, p.V[:, i].imag])
            q = _sphere_complement(u)
            q_re, q_im = q[:n], q[n:]
        Q[r + i * n: r + (i + 1) * n, cols] = q_re
        Q[r + n * r + i * n: r + n * r + (i + 1) * n, cols] = q_im
        blocks.append((q_re, q_im))
    return TangentBasis(Q, blocks, restrict_real)


def lift(p: Decomposition, p_hat: np.ndarray, B: TangentBasis) -> tuple[np.ndarray, np.ndarray]:
    """Ambient step ``(w*, V*)`` from local coordinates."""
    n, r = p.n, p.r
    p_hat = np.asarray(p_hat, dtype=float).ravel()
    if p_hat.shape[0] != B.Q.shape[1]:
        raise DimensionMismatch(f"step of size {p_hat.shape[0]} for a basis with {B.Q.shape[1]} columns")
    ps = B.Q @ p_hat
    w_star = ps[:r]
    v_star = ps[r: r + n * r].reshape(r, n).T + 1j * ps[r + n * r:].reshape(r, n).T
    return w_star, v_star


def tangent_poly_coef(w: float, w_star: float, v: np.ndarray, v_star: np.ndarray, d: int) -> np.ndarray:
    """Coefficients of ``w Phi(v) + w* Phi(v) + w DPhi(v)[v*]``."""
    n = v.shape[0]
    base = monomial_powers(v, d)
    low = monomial_powers(v, d - 1)
    mons = monomials(n, d)
    down = shift_down(n, d)
    lowk = np.where(down >= 0, low[np.maximum(down, 0)], 0)
    deriv = np.sum(mons * v_star[None, :] * lowk, axis=1)
    return (w + w_star) * base + w * deriv


def retract_product(p: Decomposition, p_hat: np.ndarray, B: TangentBasis) -> Decomposition:
    """Apply the product retraction to a step given in local coordinates."""
    w_star, v_star = lift(p, p_hat, B)
    n, d = p.n, p.d
    field = p.field
    W = np.empty(p.r)
    V = np.empty((n, p.r), dtype=complex)
    for j in range(p.r):
        coef = tangent_poly_coef(p.W[j], w_star[j], p.V[:, j], v_star[:, j], d)
        if field == REAL:
            coef = coef.real
        S = HomPoly(n, d, field, coef)
        try:
            W[j], V[:, j] = _retract_sum(S, field)
        except DegenerateRetraction as exc:
            raise DegenerateRetraction(f"retraction failed for term {j}", index=j) from exc
    return Decomposition(W, V, d, field)
