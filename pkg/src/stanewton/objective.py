"""Least-squares objective and its exact derivatives.

``f(W, V) = 1/2 || sum_i w_i Phi(v_i) - P ||_d^2`` as a function of the real
coordinates ``(W, Re V, Im V)``.  Gradient and Hessian are assembled in
closed form from the Gram matrix ``S = V^* V`` and the first and second
derivatives of ``conj(P)`` at the points ``v_j``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonRealResult, NotNormalized
from .manifold import UNIT_TOL, Decomposition, TangentBasis, tangent_basis
from .poly import (
    REAL,
    HomPoly,
    apolar_norm,
    grad_eval,
    hess_eval,
    evaluate,
)


@dataclass(frozen=True, eq=False)
class DerivativeBundle:
    f_val: float
    G_R: np.ndarray
    H_R: np.ndarray
    basis: TangentBasis
    G_proj: np.ndarray
    H_proj: np.ndarray


def _check(p: Decomposition, P: HomPoly):
    if (p.n, p.d) != (P.n, P.d):
        raise DimensionMismatch(f"decomposition (n={p.n}, d={p.d}) vs polynomial (n={P.n}, d={P.d})")


def _check_unit(p: Decomposition):
    norms = np.linalg.norm(p.V, axis=0)
    if np.any(np.abs(norms - 1) > UNIT_TOL):
        raise NotNormalized(f"columns must have unit norm, got {norms}")


def residual_poly(p: Decomposition, P: HomPoly) -> HomPoly:
    _check(p, P)
    return p.poly() - P


def objective_value(p: Decomposition, P: HomPoly) -> float:
    return 0.5 * apolar_norm(residual_poly(p, P)) ** 2


def objective_expanded(p: Decomposition, P: HomPoly) -> float:
    """Same value through ``1/2 (f1 - f2 - f3 + f4)`` (Gram form)."""
    _check(p, P)
    S = p.V.conj().T @ p.V
    f1 = np.real(p.W @ (S ** p.d) @ p.W)
    f2 = sum(p.W[i] * evaluate(P, np.conj(p.V[:, i])) for i in range(p.r))
    f4 = apolar_norm(P) ** 2
    return float(0.5 * (f1 - 2 * np.real(f2) + f4))


def _conj_derivs(P: HomPoly, v: np.ndarray, order: int):
    """Value/gradient/Hessian of conj(P) at v, via conj(P^(k)(conj v))."""
    vc = np.conj(v)
    if order == 0:
        return np.conj(evaluate(P, vc))
    if order == 1:
        return np.conj(grad_eval(P, vc))
    return np.conj(hess_eval(P, vc))


def _gradient_parts(p: Decomposition, P: HomPoly):
    d, W, V = p.d, p.W, p.V
    S = V.conj().T @ V                 # S[i, j] = v_i^* v_j
    Vb = V.conj()
    Sd1 = S ** (d - 1)
    G1 = np.real((S ** d).T @ W) - np.real([_conj_derivs(P, V[:, j], 0) for j in range(p.r)])
    sums = Vb @ (W[:, None] * Sd1)     # column j: sum_i w_i S_ij^{d-1} conj(v_i)
    gradPb = np.stack([_conj_derivs(P, V[:, j], 1) for j in range(p.r)], axis=1)
    G2 = W[None, :] * (d * sums - gradPb)
    return S, G1, G2, sums, gradPb


def gradient_real(p: Decomposition, P: HomPoly) -> np.ndarray:
    """Real gradient ``(G1, Re G2, -Im G2)`` of length ``r + 2nr``."""
    _check(p, P)
    _check_unit(p)
    _, G1, G2, _, _ = _gradient_parts(p, P)
    return np.concatenate([G1, G2.real.T.ravel(), -G2.imag.T.ravel()])


def _hessian_blocks(p: Decomposition, P: HomPoly):
    d, W, V, n, r = p.d, p.W, p.V, p.n, p.r
    S, _, _, sums, gradPb = _gradient_parts(p, P)
    Vb = V.conj()
    A = np.real(S ** d)
    Sd1 = S ** (d - 1)
    Sd2 = S ** (d - 2)

    # B: (r, n, r) with B3[i, :, j] = block (i, j)
    B3 = d * W[:, None, None] * Sd1.T[:, None, :] * Vb[None, :, :]
    for i in range(r):
        B3[i, :, i] += d * sums[:, i] - gradPb[:, i]
    B = B3.reshape(r * n, r)

    C = np.zeros((r * n, r * n), dtype=complex)
    for j in range(r):
        inner = (Vb * (W * Sd2[:, j])[None, :]) @ Vb.T
        blk = d * (d - 1) * W[j] * inner - W[j] * _conj_derivs(P, V[:, j], 2)
        C[j * n:(j + 1) * n, j * n:(j + 1) * n] = blk

    coef = d * np.outer(W, W) * Sd2
    D4 = np.einsum("ij,kl->ikjl", coef * S, np.eye(n))
    D4 = D4 + (d - 1) * np.einsum("ij,kj,li->ikjl", coef, V, Vb)
    D = D4.reshape(r * n, r * n)
    return A, B, C, D


def hessian_real(p: Decomposition, P: HomPoly) -> np.ndarray:
    """Real Hessian in ``(W, Re V, Im V)`` coordinates."""
    _check(p, P)
    _check_unit(p)
    A, B, C, D = _hessian_blocks(p, P)
    CpD, DmC = C + D, D - C
    return np.block([
        [A, B.real.T, -B.imag.T],
        [B.real, CpD.real, -CpD.imag],
        [-B.imag, DmC.imag, DmC.real],
    ])


# ---------------------------------------------------------------------------
# complex (Wirtinger) forms and the transform K
# ---------------------------------------------------------------------------

def gradient_complex(p: Decomposition, P: HomPoly) -> np.ndarray:
    """``(df/dW, df/dV, df/dconj(V))`` stacked, length ``r + 2nr``."""
    _check(p, P)
    _, G1, G2, _, _ = _gradient_parts(p, P)
    g2 = 0.5 * G2.T.ravel()
    return np.concatenate([G1.astype(complex), g2, np.conj(g2)])


def hessian_complex(p: Decomposition, P: HomPoly) -> np.ndarray:
    """Complex Hessian over the variables ``(W, V, conj(V))``."""
    _check(p, P)
    A, B, C, D = _hessian_blocks(p, P)
    Bt, Ct, Dt = B / 2, C / 2, D / 2
    return np.block([
        [A.astype(complex), Bt.T, Bt.conj().T],
        [Bt, Ct, Dt.T],
        [Bt.conj(), Dt, Ct.conj()],
    ])


def k_matrix(r: int, nr: int) -> np.ndarray:
    I = np.eye(nr)
    J = np.block([[I, 1j * I], [I, -1j * I]])
    K = np.zeros((r + 2 * nr, r + 2 * nr), dtype=complex)
    K[:r, :r] = np.eye(r)
    K[r:, r:] = J
    return K


def k_inverse(r: int, nr: int) -> np.ndarray:
    I = np.eye(nr)
    J = np.block([[I, 1j * I], [I, -1j * I]])
    Ki = np.zeros((r + 2 * nr, r + 2 * nr), dtype=complex)
    Ki[:r, :r] = np.eye(r)
    Ki[r:, r:] = 0.5 * J.conj().T
    return Ki


def _split(total: int, r: int) -> int:
    nr, rem = divmod(total - r, 2)
    if rem or nr < 0:
        raise DimensionMismatch(f"length {total} is not r + 2nr for r={r}")
    return nr


def _real_part(X: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(X), initial=0.0)))
    if np.max(np.abs(X.imag), initial=0.0) > tol * scale:
        raise NonRealResult("transformed quantity has a non-negligible imaginary part")
    return X.real.copy()


def k_transform_gradient(G_C: np.ndarray, r: int) -> np.ndarray:
    """``K^T G_C``: real gradient from the complex one (no factor-2 rescaling)."""
    G_C = np.asarray(G_C, dtype=complex)
    K = k_matrix(r, _split(G_C.shape[0], r))
    return _real_part(K.T @ G_C)


def k_transform_hessian(H_C: np.ndarray, r: int) -> np.ndarray:
    """``K^T H_C K``."""
    H_C = np.asarray(H_C, dtype=complex)
    K = k_matrix(r, _split(H_C.shape[0], r))
    return _real_part(K.T @ H_C @ K)


# ---------------------------------------------------------------------------

def bundle(p: Decomposition, P: HomPoly) -> DerivativeBundle:
    """Value, gradients and Hessians projected on the tangent basis.

    Real-mode points use the real slice of the tangent space, so the
    projected quantities have dimension ``nr`` instead of ``2nr``.
    """
    _check(p, P)
    B = tangent_basis(p, restrict_real=(p.field == REAL))
    G_R = gradient_real(p, P)
    H_R = hessian_real(p, P)
    Q = B.Q
    H_proj = Q.T @ H_R @ Q
    H_proj = 0.5 * (H_proj + H_proj.T)
    return DerivativeBundle(objective_value(p, P), G_R, H_R, B, Q.T @ G_R, H_proj)
