import numpy as np
import pytest

from stanewton.errors import STAError
from stanewton.objective import bundle
from stanewton.manifold import Decomposition
from stanewton.poly import (
    COMPLEX,
    REAL,
    HomPoly,
    apolar_norm,
    evaluate,
    monomial_powers,
    multinomials,
    random_gaussian_poly,
)
from stanewton.rank1 import best_rank1, monomial_norm

GRID = np.linspace(0.0, np.pi, 100_000, endpoint=False)


def grid_max(P):
    V = np.stack([np.cos(GRID), np.sin(GRID)])
    return np.max(np.abs(monomial_powers(V, P.d) @ (multinomials(2, P.d) * P.coef).real))


def test_scaled_basis_power():
    P = HomPoly.monomial((4, 0, 0)) * 7
    res = best_rank1(P)
    assert res.w == pytest.approx(7)
    np.testing.assert_allclose(np.abs(res.v), [1, 0, 0], atol=1e-12)


def test_invariants(rng):
    for _ in range(5):
        P = random_gaussian_poly(4, 3, REAL, seed=rng)
        res = best_rank1(P)
        assert res.w == pytest.approx(evaluate(P, res.v).real, abs=1e-10)
        assert res.dist1 ** 2 + res.w ** 2 == pytest.approx(apolar_norm(P) ** 2, rel=1e-8)
        assert abs(res.w) <= apolar_norm(P) + 1e-12
        assert res.spectral_lower_bound == abs(res.w)
        p = Decomposition([res.w], res.v[:, None], P.d, REAL)
        assert np.linalg.norm(bundle(p, P).G_proj) < 1e-8


def test_grid_optimum_n2():
    for seed in range(20):
        P = random_gaussian_poly(2, 4, REAL, seed=seed)
        g = grid_max(P)
        res = best_rank1(P)
        # the grid can only under-estimate the maximum
        assert abs(res.w) >= g * (1 - 1e-8)
        assert abs(res.w) <= g * (1 + 1e-6)


def test_single_start_is_deterministic(rng):
    P = random_gaussian_poly(5, 3, REAL, seed=rng)
    a = best_rank1(P, starts=1, seed=1)
    b = best_rank1(P, starts=1, seed=2)
    assert a.w == b.w


def test_monomial_norm():
    P = HomPoly.from_coeffs(2, 2, {(1, 1): 0.5})
    # x1 x2 has monomial coefficient 1 but apolar norm sqrt(1/2)
    assert monomial_norm(P) == pytest.approx(1.0)
    assert apolar_norm(P) == pytest.approx(np.sqrt(0.5))


def test_complex_rejected():
    with pytest.raises(STAError):
        best_rank1(random_gaussian_poly(3, 3, COMPLEX, seed=0))
