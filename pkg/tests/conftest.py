import numpy as np
import pytest

from stanewton.manifold import Decomposition
from stanewton.poly import COMPLEX, REAL, random_gaussian_poly


def random_point(n, d, r, field, rng, spread=1.0):
    V = rng.standard_normal((n, r))
    if field == COMPLEX:
        V = V + 1j * rng.standard_normal((n, r))
    W = spread * (0.5 + rng.random(r))
    if field == REAL:
        W = W * rng.choice([-1.0, 1.0], r)
    return Decomposition.normalized(W, V, d, field)


def random_poly(n, d, field, rng):
    return random_gaussian_poly(n, d, field, seed=rng)


def central_diff(fun, x, h=1e-5):
    g = np.zeros_like(x)
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h
        g[k] = (fun(x + e) - fun(x - e)) / (2 * h)
    return g


def rel_err(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def ambient_objective(P, r):
    """f(W, Re V, Im V) built straight from the polynomial difference."""
    from stanewton.poly import apolar_norm, from_decomposition

    n, d = P.n, P.d

    def f(x):
        W = x[:r]
        V = x[r:r + n * r].reshape(r, n).T + 1j * x[r + n * r:].reshape(r, n).T
        return 0.5 * apolar_norm(from_decomposition(W, V, d) - P) ** 2

    return f


def fd_hessian(f, x, h=1e-4):
    m = x.size
    H = np.zeros((m, m))
    E = np.eye(m) * h
    for k in range(m):
        for l in range(k, m):
            H[k, l] = (f(x + E[k] + E[l]) - f(x + E[k] - E[l])
                       - f(x - E[k] + E[l]) + f(x - E[k] - E[l])) / (4 * h * h)
            H[l, k] = H[k, l]
    return H
