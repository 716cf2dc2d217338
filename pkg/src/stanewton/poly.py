"""Homogeneous polynomials in apolar-normalized coefficients.

A polynomial of degree ``d`` in ``n`` variables is stored as

    P = sum_{|a| = d} binom(d, a) * p_a * x^a

where only ``p_a`` is kept.  Coefficients live in a dense complex vector
indexed by the graded-lexicographic (descending) list of exponents returned
by :func:`monomials`.
"""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    AsymmetricInput,
    DimensionMismatch,
    InvalidScale,
    UnsupportedDegree,
    ZeroVector,
)

REAL = "real"
COMPLEX = "complex"
FIELDS = (REAL, COMPLEX)


# ---------------------------------------------------------------------------
# monomial bookkeeping (cached per (n, d))
# ---------------------------------------------------------------------------

def _compositions(n: int, d: int):
    if n == 1:
        yield (d,)
        return
    for first in range(d, -1, -1):
        for rest in _compositions(n - 1, d - first):
            yield (first,) + rest


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@functools.lru_cache(maxsize=None)
def monomials(n: int, d: int) -> np.ndarray:
    """Exponents of degree ``d`` in ``n`` variables, graded-lex descending."""
    if n < 1 or d < 0:
        raise DimensionMismatch(f"invalid (n, d) = ({n}, {d})")
    return _frozen(np.array(list(_compositions(n, d)), dtype=np.int64).reshape(-1, n))


@functools.lru_cache(maxsize=None)
def monomial_index(n: int, d: int) -> dict:
    return {tuple(int(x) for x in a): i for i, a in enumerate(monomials(n, d))}


@functools.lru_cache(maxsize=None)
def multinomials(n: int, d: int) -> np.ndarray:
    fd = math.factorial(d)
    vals = [fd // math.prod(math.factorial(int(x)) for x in a) for a in monomials(n, d)]
    return _frozen(np.array(vals, dtype=float))


def dim_space(n: int, d: int) -> int:
    return math.comb(n + d - 1, d)


@functools.lru_cache(maxsize=None)
def sum_index(n: int, k: int, m: int) -> np.ndarray:
    """``out[i, j]`` = position of ``alpha_i + beta_j`` in degree ``k + m``."""
    idx = monomial_index(n, k + m)
    rows, cols = monomials(n, k), monomials(n, m)
    out = np.empty((len(rows), len(cols)), dtype=np.int64)
    for i, a in enumerate(rows):
        for j, b in enumerate(cols):
            out[i, j] = idx[tuple(int(x) for x in a + b)]
    return _frozen(out)


@functools.lru_cache(maxsize=None)
def shift_up(n: int, d: int) -> np.ndarray:
    """``out[j, k]`` = position of ``beta_j + e_k`` in degree ``d``; |beta| = d - 1."""
    return sum_index(n, d - 1, 1)


@functools.lru_cache(maxsize=None)
def shift_down(n: int, d: int) -> np.ndarray:
    """``out[i, k]`` = position of ``alpha_i - e_k`` in degree ``d - 1``, or -1."""
    idx = monomial_index(n, d - 1)
    mons = monomials(n, d)
    out = np.full((len(mons), n), -1, dtype=np.int64)
    for i, a in enumerate(mons):
        for k in range(n):
            if a[k] > 0:
                b = list(int(x) for x in a)
                b[k] -= 1
                out[i, k] = idx[tuple(b)]
    return _frozen(out)


def monomial_powers(v: np.ndarray, d: int) -> np.ndarray:
    """``v^a`` for every exponent of degree ``d``.

    ``v`` may be a vector (n,) giving shape (N,), or a matrix (n, m) of
    column vectors giving shape (m, N).
    """
    v = np.asarray(v)
    mons = monomials(v.shape[0], d)
    if v.ndim == 1:
        return np.prod(v[None, :] ** mons, axis=1)
    return np.prod(v.T[:, None, :] ** mons[None, :, :], axis=2)


# ---------------------------------------------------------------------------
# the polynomial type
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HomPoly:
    n: int
    d: int
    field: str
    coef: np.ndarray

    def __post_init__(self):
        if self.field not in FIELDS:
            raise ValueError(f"field must be one of {FIELDS}, got {self.field!r}")
        c = np.array(self.coef, dtype=complex).ravel()
        if c.shape[0] != dim_space(self.n, self.d):
            raise DimensionMismatch(
                f"expected {dim_space(self.n, self.d)} coefficients for n={self.n}, d={self.d}, got {c.shape[0]}"
            )
        if self.field == REAL:
            scale = max(1.0, float(np.max(np.abs(c), initial=0.0)))
            if np.max(np.abs(c.imag), initial=0.0) > 1e-12 * scale:
                raise ValueError("real-mode polynomial with non-real coefficients")
            c = c.real.astype(complex)
        c.setflags(write=False)
        object.__setattr__(self, "coef", c)

    # constructors ---------------------------------------------------------
    @classmethod
    def zeros(cls, n: int, d: int, field: str = REAL) -> "HomPoly":
        return cls(n, d, field, np.zeros(dim_space(n, d), dtype=complex))

    @classmethod
    def from_coeffs(cls, n: int, d: int, coeffs: Mapping[Sequence[int], complex],
                    field: str | None = None) -> "HomPoly":
        idx = monomial_index(n, d)
        c = np.zeros(dim_space(n, d), dtype=complex)
        for alpha, val in coeffs.items():
            key = tuple(int(x) for x in alpha)
            if key not in idx:
                raise DimensionMismatch(f"exponent {key} is not of degree {d} in {n} variables")
            c[idx[key]] += val
        if field is None:
            field = REAL if np.all(c.imag == 0) else COMPLEX
        return cls(n, d, field, c)

    @classmethod
    def monomial(cls, alpha: Sequence[int]) -> "HomPoly":
        """The monomial ``x^alpha`` itself (coefficient ``1 / binom(d, alpha)``)."""
        alpha = tuple(int(x) for x in alpha)
        n, d = len(alpha), sum(alpha)
        i = monomial_index(n, d)[alpha]
        c = np.zeros(dim_space(n, d), dtype=complex)
        c[i] = 1.0 / multinomials(n, d)[i]
        return cls(n, d, REAL, c)

    # views ----------------------------------------------------------------
    @property
    def coeffs(self) -> dict:
        """Sparse view: exponent tuple -> p_alpha for the nonzero coefficients."""
        mons = monomials(self.n, self.d)
        return {tuple(int(x) for x in mons[i]): complex(self.coef[i])
                for i in np.flatnonzero(self.coef)}

    def __getitem__(self, alpha: Sequence[int]) -> complex:
        return complex(self.coef[monomial_index(self.n, self.d)[tuple(int(x) for x in alpha)]])

    def is_real(self) -> bool:
        return bool(np.all(self.coef.imag == 0))

    # arithmetic -----------------------------------------------------------
    def _check(self, other: "HomPoly"):
        if not isinstance(other, HomPoly):
            raise TypeError(f"expected HomPoly, got {type(other).__name__}")
        if (self.n, self.d) != (other.n, other.d):
            raise DimensionMismatch(f"(n, d) mismatch: {(self.n, self.d)} vs {(other.n, other.d)}")

    def _join(self, other: "HomPoly") -> str:
        return REAL if self.field == REAL and other.field == REAL else COMPLEX

    def __add__(self, other: "HomPoly") -> "HomPoly":
        self._check(other)
        return HomPoly(self.n, self.d, self._join(other), self.coef + other.coef)

    def __sub__(self, other: "HomPoly") -> "HomPoly":
        self._check(other)
        return HomPoly(self.n, self.d, self._join(other), self.coef - other.coef)

    def __neg__(self) -> "HomPoly":
        return HomPoly(self.n, self.d, self.field, -self.coef)

    def __mul__(self, s) -> "HomPoly":
        s = complex(s)
        field = self.field if s.imag == 0 else COMPLEX
        return HomPoly(self.n, self.d, field, s * self.coef)

    __rmul__ = __mul__

    def __truediv__(self, s) -> "HomPoly":
        return self * (1.0 / complex(s))

    def __repr__(self):
        return f"HomPoly(n={self.n}, d={self.d}, field={self.field!r}, nnz={np.count_nonzero(self.coef)})"

    def as_complex(self) -> "HomPoly":
        return HomPoly(self.n, self.d, COMPLEX, self.coef)


# ---------------------------------------------------------------------------
# inner product, evaluation, derivatives
# ---------------------------------------------------------------------------

def apolar(P: HomPoly, Q: HomPoly) -> complex:
    """Apolar product, conjugate-linear in ``P``."""
    P._check(Q)
    return complex(np.sum(multinomials(P.n, P.d) * np.conj(P.coef) * Q.coef))


def apolar_norm(P: HomPoly) -> float:
    return float(np.sqrt(np.sum(multinomials(P.n, P.d) * np.abs(P.coef) ** 2)))


def _vec(P: HomPoly, v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).ravel()
    if v.shape[0] != P.n:
        raise DimensionMismatch(f"vector of length {v.shape[0]} for a polynomial in {P.n} variables")
    return v


def evaluate(P: HomPoly, v) -> complex:
    v = _vec(P, v)
    return complex(np.sum(multinomials(P.n, P.d) * P.coef * monomial_powers(v, P.d)))


def grad_eval(P: HomPoly, v) -> np.ndarray:
    """Gradient of ``P`` at ``v`` (holomorphic partial derivatives)."""
    v = _vec(P, v)
    n, d = P.n, P.d
    if d == 0:
        return np.zeros(n, dtype=complex)
    weights = multinomials(n, d - 1) * monomial_powers(v, d - 1)
    return d * (P.coef[shift_up(n, d)].T @ weights)


def hess_eval(P: HomPoly, v) -> np.ndarray:
    """Matrix of second partial derivatives of ``P`` at ``v``."""
    v = _vec(P, v)
    n, d = P.n, P.d
    if d < 2:
        return np.zeros((n, n), dtype=complex)
    weights = multinomials(n, d - 2) * monomial_powers(v, d - 2)
    table = _second_shift(n, d)
    return d * (d - 1) * np.einsum("g,gkl->kl", weights, P.coef[table])


@functools.lru_cache(maxsize=None)
def _second_shift(n: int, d: int) -> np.ndarray:
    """``out[g, k, l]`` = position of ``gamma + e_k + e_l``; |gamma| = d - 2."""
    up1 = shift_up(n, d - 1)          # (N_{d-2}, n) -> degree d-1
    up2 = shift_up(n, d)              # (N_{d-1}, n) -> degree d
    return _frozen(up2[up1][:, :, :])  # (N_{d-2}, n, n)


def conj_poly(P: HomPoly) -> HomPoly:
    return HomPoly(P.n, P.d, P.field, np.conj(P.coef))


def derivative(P: HomPoly, k: int) -> HomPoly:
    """``d P / d x_k`` as a polynomial of degree ``d - 1``."""
    if P.d == 0:
        raise UnsupportedDegree("cannot differentiate a constant")
    return HomPoly(P.n, P.d - 1, P.field, P.d * P.coef[shift_up(P.n, P.d)[:, k]])


def mul_var(Q: HomPoly, i: int) -> HomPoly:
    """``x_i * Q`` as a polynomial of degree ``d + 1``."""
    n, d = Q.n, Q.d + 1
    mons = monomials(n, d)
    down = shift_down(n, d)[:, i]
    c = np.zeros(len(mons), dtype=complex)
    ok = down >= 0
    c[ok] = Q.coef[down[ok]] * mons[ok, i] / d
    return HomPoly(n, d, Q.field, c)


# ---------------------------------------------------------------------------
# Veronese points and decompositions
# ---------------------------------------------------------------------------

def veronese(v, d: int) -> HomPoly:
    """``(v^t x)^d``."""
    v = np.asarray(v, dtype=complex).ravel()
    if not np.any(v):
        raise ZeroVector("veronese of the zero vector")
    field = REAL if np.all(v.imag == 0) else COMPLEX
    return HomPoly(v.shape[0], d, field, monomial_powers(v, d))


def from_decomposition(W, V, d: int) -> HomPoly:
    """``sum_i w_i (v_i^t x)^d`` with ``v_i`` the columns of ``V``."""
    W = np.asarray(W).ravel()
    V = np.asarray(V, dtype=complex)
    if V.ndim == 1:
        V = V[:, None]
    if V.shape[1] != W.shape[0]:
        raise DimensionMismatch(f"{W.shape[0]} weights for {V.shape[1]} vectors")
    coef = W.astype(complex) @ monomial_powers(V, d)
    field = REAL if np.all(V.imag == 0) and np.all(np.imag(W) == 0) else COMPLEX
    return HomPoly(V.shape[0], d, field, coef)


# ---------------------------------------------------------------------------
# dense symmetric entries
# ---------------------------------------------------------------------------

def entries_to_poly(n: int, d: int, entries: Iterable[tuple[Sequence[int], complex]],
                    one_based: bool = True, field: str | None = None,
                    atol: float = 1e-12) -> HomPoly:
    """Build ``P`` from symmetric-tensor entries ``(index tuple, value)``.

    Every exponent must be reached by at least one index tuple; entries that
    are permutations of each other must agree within ``atol``.
    """
    idx = monomial_index(n, d)
    c = np.zeros(dim_space(n, d), dtype=complex)
    seen = np.zeros(dim_space(n, d), dtype=bool)
    off = 1 if one_based else 0
    for index, value in entries:
        index = [int(i) - off for i in index]
        if len(index) != d or min(index, default=0) < 0 or max(index, default=0) >= n:
            raise DimensionMismatch(f"index {index} out of range for n={n}, d={d}")
        alpha = [0] * n
        for i in index:
            alpha[i] += 1
        j = idx[tuple(alpha)]
        value = complex(value)
        if seen[j]:
            if abs(c[j] - value) > atol:
                raise AsymmetricInput(
                    f"entries with content {tuple(alpha)} disagree: {c[j]} vs {value}")
        else:
            c[j] = value
            seen[j] = True
    if field is None:
        field = REAL if np.all(c.imag == 0) else COMPLEX
    return HomPoly(n, d, field, c)


def poly_to_entries(P: HomPoly, one_based: bool = True) -> list[tuple[tuple[int, ...], complex]]:
    """All ``n^d`` dense tensor entries of ``P``."""
    idx = monomial_index(P.n, P.d)
    off = 1 if one_based else 0
    out = []
    for index in itertools.product(range(P.n), repeat=P.d):
        alpha = [0] * P.n
        for i in index:
            alpha[i] += 1
        out.append((tuple(i + off for i in index), complex(P.coef[idx[tuple(alpha)]])))
    return out


def entries_from_function(n: int, d: int, fn) -> HomPoly:
    """Polynomial whose tensor entries are ``fn(i_1, ..., i_d)`` (1-based)."""
    mons = monomials(n, d)
    c = np.empty(len(mons), dtype=complex)
    for j, alpha in enumerate(mons):
        index = [k + 1 for k in range(n) for _ in range(int(alpha[k]))]
        c[j] = fn(*index)
    field = REAL if np.all(c.imag == 0) else COMPLEX
    return HomPoly(n, d, field, c)


# ---------------------------------------------------------------------------
# misc
# ---------------------------------------------------------------------------

_AH_EXCEPTIONS = {(3, 5), (4, 3), (4, 4), (4, 5)}


def generic_rank(n: int, d: int) -> int:
    """Generic symmetric rank (Alexander-Hirschowitz)."""
    if d < 3:
        raise UnsupportedDegree(f"generic rank formula needs d >= 3, got d={d}")
    r = -(-math.comb(n + d - 1, d) // n)
    return r + 1 if (d, n) in _AH_EXCEPTIONS else r


def random_gaussian_poly(n: int, d: int, field: str = REAL, seed=None) -> HomPoly:
    rng = np.random.default_rng(seed)
    N = dim_space(n, d)
    c = rng.standard_normal(N).astype(complex)
    if field == COMPLEX:
        c = c + 1j * rng.standard_normal(N)
    return HomPoly(n, d, field, c)


def scale_to_norm(P: HomPoly, eps: float) -> HomPoly:
    if not eps > 0:
        raise InvalidScale(f"target norm must be positive, got {eps}")
    nrm = apolar_norm(P)
    if nrm == 0:
        raise InvalidScale("cannot rescale the zero polynomial")
    return P * (eps / nrm)
