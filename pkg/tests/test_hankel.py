import warnings

import numpy as np
import pytest

from stanewton.errors import InvalidDegreeSplit, NearDegenerateWarning, ZeroPolynomial
from stanewton.hankel import build_hankel, fix_phase, singular_gap, theta
from stanewton.poly import COMPLEX, REAL, HomPoly, apolar, random_gaussian_poly, veronese


def cvec(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def dense_hankel(P, k):
    """Entry (a, b) read off P one monomial at a time."""
    H = build_hankel(P, k)
    M = np.empty((len(H.rows), len(H.cols)), dtype=complex)
    for i, a in enumerate(H.rows):
        for j, b in enumerate(H.cols):
            M[i, j] = P[tuple(a + b)]
    return M


def test_cube_single_entry():
    H = build_hankel(HomPoly.monomial((3, 0)), 1)
    assert H.data.shape == (2, 3)
    nz = np.argwhere(H.data != 0)
    assert nz.tolist() == [[0, 0]]
    assert H.data[0, 0] == 1
    assert tuple(H.rows[0]) == (1, 0) and tuple(H.cols[0]) == (2, 0)


def test_entries_are_monomial_pairings(rng):
    # pairing the monomial x^{a+b} against P reads off p_{a+b}
    P = random_gaussian_poly(3, 4, COMPLEX, seed=rng)
    H = build_hankel(P, 2)
    for i, a in enumerate(H.rows):
        for j, b in enumerate(H.cols):
            mono = HomPoly.monomial(tuple(a + b))
            assert H.data[i, j] == pytest.approx(apolar(mono, P), rel=1e-14)


def test_hankel_structure(rng):
    for _ in range(20):
        n, d = rng.integers(2, 5), rng.integers(2, 6)
        P = random_gaussian_poly(n, d, COMPLEX, seed=rng)
        k = rng.integers(1, d)
        H = build_hankel(P, k)
        np.testing.assert_array_equal(H.data, dense_hankel(P, k))
        seen = {}
        for i, a in enumerate(H.rows):
            for j, b in enumerate(H.cols):
                key = tuple(a + b)
                if key in seen:
                    assert abs(H.data[i, j] - seen[key]) <= 1e-14
                seen[key] = H.data[i, j]


def test_bad_split():
    P = random_gaussian_poly(2, 3, seed=0)
    for k in (0, 3):
        with pytest.raises(InvalidDegreeSplit):
            build_hankel(P, k)


def test_power_has_rank_one(rng):
    for _ in range(20):
        n, d = rng.integers(2, 11), rng.integers(2, 7)
        s = np.linalg.svd(build_hankel(veronese(cvec(rng, n), d), 1).data, compute_uv=False)
        assert len(s) < 2 or s[1] <= 1e-10 * s[0]


def test_theta_collinear(rng):
    for _ in range(10):
        v = cvec(rng, 5)
        u = theta(veronese(v, 4))
        assert abs(np.vdot(u, v / np.linalg.norm(v))) == pytest.approx(1, abs=1e-12)


def test_theta_basis_power():
    u = theta(HomPoly.monomial((0, 0, 5)))
    np.testing.assert_allclose(u, [0, 0, 1], atol=1e-15)


def test_theta_perturbation(rng):
    v = cvec(rng, 4)
    v /= np.linalg.norm(v)
    P = veronese(v, 3)
    E = random_gaussian_poly(4, 3, COMPLEX, seed=rng)
    E = E / np.linalg.norm(build_hankel(E, 1).data, 2)
    for eps in (1e-4, 1e-6):
        u = theta(P + E * eps)
        angle = np.sqrt(max(0.0, 1 - abs(np.vdot(u, v)) ** 2))
        assert angle <= 10 * eps


def test_theta_phase_and_zero():
    with pytest.raises(ZeroPolynomial):
        theta(HomPoly.zeros(3, 3))
    u = fix_phase(np.array([0.1, -2j, 0.3]))
    assert u[1].imag == 0 and u[1].real > 0


def test_theta_tie_warns():
    P = veronese([1, 0], 3) + veronese([0, 1], 3)
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        theta(P)
    assert any(issubclass(x.category, NearDegenerateWarning) for x in w)


def test_singular_gap():
    s1, s2 = singular_gap(veronese([1.0, 2.0, 3.0], 3))
    assert s2 <= 1e-10 * s1
    s1, s2 = singular_gap(veronese([1, 0], 3) + veronese([0, 1], 3))
    assert s1 == pytest.approx(s2)


def test_singular_gap_dense_oracle(rng):
    for field in (REAL, COMPLEX):
        P = random_gaussian_poly(4, 4, field, seed=rng)
        s = np.linalg.svd(dense_hankel(P, 1), compute_uv=False)
        s1, s2 = singular_gap(P)
        assert s1 == pytest.approx(s[0], rel=1e-12) and s2 == pytest.approx(s[1], rel=1e-12)
