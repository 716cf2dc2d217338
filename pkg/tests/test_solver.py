import math

import numpy as np
import pytest

from stanewton.errors import DegenerateInitialPoint
from stanewton.initial import shd_init
from stanewton.manifold import Decomposition
from stanewton.poly import COMPLEX, REAL, HomPoly, apolar_norm, random_gaussian_poly, veronese
from stanewton.solver import (
    PLAIN_NEWTON,
    SolverOptions,
    dogleg,
    initial_radius,
    model_decrease,
    rns,
    rns_tr,
    update_radius,
)

from conftest import random_point, random_poly


def bisect_boundary(pc, pn, radius):
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.linalg.norm(pc + mid * (pn - pc)) < radius:
            lo = mid
        else:
            hi = mid
    return pc + lo * (pn - pc)


class TestDogleg:
    def test_newton_inside(self):
        g = np.array([0.3, -0.4])
        np.testing.assert_allclose(dogleg(g, np.eye(2), 1.0), -g)

    def test_identity_boundary(self):
        g = np.array([3.0, 4.0])
        np.testing.assert_allclose(dogleg(g, np.eye(2), 1.0), -g / 5)

    def test_segment_point(self):
        H = np.diag([1.0, 10.0])
        g = np.array([1.0, 1.0])
        pn = -np.linalg.solve(H, g)
        pc = -(g @ g) / (g @ H @ g) * g
        radius = 0.5 * (np.linalg.norm(pc) + np.linalg.norm(pn))
        info = {}
        u = dogleg(g, H, radius, info=info)
        assert info["branch"] == "dogleg"
        assert abs(np.linalg.norm(u) - radius) < 1e-12
        np.testing.assert_allclose(u, bisect_boundary(pc, pn, radius), atol=1e-12)

    def test_nonconvex(self):
        info = {}
        u = dogleg(np.array([1.0, 0.0]), np.diag([-1.0, 1.0]), 0.5, info=info)
        assert info["branch"] == "nonconvex_cauchy"
        np.testing.assert_allclose(u, [-0.5, 0.0])

    def test_zero_gradient(self):
        assert np.all(dogleg(np.zeros(3), np.eye(3), 1.0) == 0)

    def test_bad_radius(self):
        with pytest.raises(ValueError):
            dogleg(np.ones(2), np.eye(2), 0.0)

    def test_properties(self, rng):
        for _ in range(200):
            m = rng.integers(1, 6)
            A = rng.standard_normal((m, m))
            H = A + A.T
            g = rng.standard_normal(m)
            radius = float(rng.uniform(0.01, 3))
            info = {}
            u = dogleg(g, H, radius, info=info)
            assert np.linalg.norm(u) <= radius * (1 + 1e-12)
            if info["branch"] in ("cauchy", "nonconvex_cauchy", "dogleg"):
                assert abs(np.linalg.norm(u) - radius) < 1e-12 * max(1, radius)
            if g @ H @ g > 0:
                assert model_decrease(g, H, u) > 0

    def test_singular_hessian_uses_pinv(self):
        H = np.diag([1.0, 0.0])
        u = dogleg(np.array([1.0, 0.0]), H, 10.0)
        np.testing.assert_allclose(u, [-1.0, 0.0])


class TestRadius:
    def test_enlarge(self):
        assert update_radius(1.0, 1.0, 0.3, 10.0) == pytest.approx(0.6)

    def test_midpoint(self):
        assert update_radius(1 / 3, 1.0, 0.3, 10.0) == pytest.approx(2 / 3)

    def test_limits(self):
        assert update_radius(-math.inf, 1.0, 0.3, 10.0) == pytest.approx(1 / 3)
        assert update_radius(-1e6, 1.0, 0.3, 10.0) == pytest.approx(1 / 3)
        assert update_radius(float("nan"), 1.0, 0.3, 10.0) == pytest.approx(1 / 3)

    def test_cap(self):
        assert update_radius(1.0, 1.0, 100.0, 5.0) == 5.0

    def test_initial(self):
        p = Decomposition([1.0], np.array([[1.0], [0.0]]), 4)
        P = HomPoly.monomial((4, 0)) * 10
        r0, rmax = initial_radius(p, P)
        assert r0 == pytest.approx(0.2) and rmax == pytest.approx(5.0)

    def test_zero_weights(self):
        p = Decomposition([0.0], np.array([[1.0], [0.0]]), 3)
        with pytest.raises(DegenerateInitialPoint):
            rns_tr(veronese([1.0, 0.0], 3), p)


class TestOptions:
    def test_invalid(self):
        with pytest.raises(ValueError):
            SolverOptions(rho_accept=0.7)
        with pytest.raises(ValueError):
            SolverOptions(iterate_tol=0)
        with pytest.raises(ValueError):
            SolverOptions(mode="linesearch")


class TestTrustRegion:
    def test_fixed_point(self, rng):
        for field in (REAL, COMPLEX):
            p = random_point(4, 3, 2, field, rng)
            res = rns_tr(p.poly(), p)
            assert res.iterations <= 1
            assert res.residual < 1e-12

    def test_monotone_and_capped(self, rng):
        P = random_poly(4, 3, COMPLEX, rng)
        p0 = random_point(4, 3, 2, COMPLEX, rng)
        res = rns_tr(P, p0)
        fs = [row.f for row in res.trace if row.accepted]
        assert all(b <= a + 1e-12 for a, b in zip(fs, fs[1:]))
        rmax = 0.5 * apolar_norm(P)
        assert all(row.radius <= rmax * (1 + 1e-12) for row in res.trace)
        assert res.residual == pytest.approx(math.sqrt(2 * res.f), rel=1e-10)

    def test_perturbed_recovery(self, rng):
        p = random_point(5, 4, 2, REAL, rng)
        T = p.poly()
        E = random_poly(5, 4, REAL, rng)
        Tt = T + E * (1e-3 / apolar_norm(E))
        q0, _ = shd_init(Tt, 2, seed=0)
        res = rns_tr(Tt, q0)
        assert apolar_norm(res.decomposition.poly() - T) < 1e-3
        assert res.termination in ("iterate_converged", "radius_floor", "stationary")

    def test_deterministic(self, rng):
        P = random_poly(4, 3, REAL, rng)
        p0, _ = shd_init(P, 2, seed=3)
        a, b = rns_tr(P, p0), rns_tr(P, p0)
        assert [(t.f, t.radius, t.rho) for t in a.trace] == [(t.f, t.radius, t.rho) for t in b.trace]

    def test_trace_csv(self, rng, tmp_path):
        P = random_poly(3, 3, REAL, rng)
        p0, _ = shd_init(P, 1, seed=0)
        res = rns_tr(P, p0)
        path = tmp_path / "trace.csv"
        res.write_trace(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "k,f,delta,rho,accepted"
        assert len(lines) == len(res.trace) + 1

    def test_subgeneric_warning(self, rng):
        from stanewton.errors import SubgenericRankWarning

        P = random_poly(2, 3, REAL, rng)
        p0 = random_point(2, 3, 2, REAL, rng)
        with pytest.warns(SubgenericRankWarning):
            rns_tr(P, p0, SolverOptions(max_iters=2))


class TestNewton:
    def test_fixed_point(self, rng):
        p = random_point(4, 4, 2, COMPLEX, rng)
        res = rns(p.poly(), p)
        assert res.iterations == 0 and res.residual < 1e-12

    def test_quadratic_rate(self, rng):
        p = random_point(5, 3, 2, COMPLEX, rng)
        P = p.poly() + random_poly(5, 3, COMPLEX, rng) * 1e-2
        q0 = Decomposition.normalized(p.W * 1.01, p.V + 0.01 * rng.standard_normal(p.V.shape), 3)
        res = rns(P, q0, SolverOptions(mode=PLAIN_NEWTON, iterate_tol=1e-14, grad_tol=0))
        g = [t.grad_norm for t in res.trace]
        pairs = [(a, b) for a, b in zip(g, g[1:]) if b > 1e-11]
        assert pairs, g
        assert all(b <= 1e3 * a * a for a, b in pairs)

    def test_divergence_reported(self, monkeypatch, rng):
        import stanewton.solver as solver

        P = random_poly(3, 3, REAL, rng)
        p0 = random_point(3, 3, 1, REAL, rng)
        # ascent steps force five consecutive increases
        monkeypatch.setattr(solver, "newton_direction", lambda G, H, t=1e12: 0.05 * G / np.linalg.norm(G))
        res = rns(P, p0)
        assert res.termination == "diverged"
        assert res.f <= solver.objective_value(p0, P) + 1e-12
