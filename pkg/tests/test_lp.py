import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import highs_max, lapack_rank
from polynash import lp, polyhedra
from polynash.errors import GameError
from polynash.reps import HRep

OCTAGON = np.array([[-2, 2, -1, 1, -1, -2, 1, 2], [-1, -1, -2, -2, 2, 1, 2, 1]], float).T


def octagon_h():
    return polyhedra.v_to_h(polyhedra.prune(polyhedra.VRep.from_points(OCTAGON)))


class TestSolve:
    def test_unit_square(self):
        res = lp.solve(lp.LpProblem([1.0, 1.0], HRep.box([0, 0], [1, 1])))
        assert res.optimal
        assert res.value == pytest.approx(2.0)
        assert np.allclose(res.point, [1, 1])

    def test_infeasible(self):
        res = lp.maximize([1.0], [[-1.0], [1.0]], [-1.0, 0.0])
        assert res.status is lp.Status.INFEASIBLE

    def test_unbounded(self):
        assert lp.maximize([1.0, 0.0], [[0.0, 1.0]], [1.0]).status is lp.Status.UNBOUNDED

    def test_octagon_direction(self):
        # evaluating (1, 0) over the eight listed columns gives 2
        res = lp.solve(lp.LpProblem([1.0, 0.0], octagon_h()))
        assert res.value == pytest.approx(2.0)
        assert res.point[0] == pytest.approx(2.0)
        assert any(np.allclose(res.point, v) for v in OCTAGON)

    def test_free_lineality_with_zero_gain(self):
        # a line in the feasible set is fine when the objective is orthogonal to it
        res = lp.maximize([1.0, 0.0], [[1.0, 0.0]], [3.0])
        assert res.optimal and res.value == pytest.approx(3.0)

    def test_objective_length_checked(self):
        with pytest.raises(ValueError):
            lp.LpProblem([1.0], HRep.universe(2))

    def test_solve_many_matches_solve(self):
        h = octagon_h()
        cs = [np.array([1.0, 0.3]), np.array([-1.0, 2.0]), np.zeros(2)]
        for res, c in zip(lp.solve_many(cs, h), cs):
            assert res.value == pytest.approx(lp.solve(lp.LpProblem(c, h)).value)

    @given(
        st.integers(1, 4),
        st.integers(0, 10),
        st.integers(0, 2**32 - 1),
        st.booleans(),
    )
    def test_matches_highs(self, n, extra, seed, conic):
        rng = np.random.default_rng(seed)
        m = n + extra
        a = rng.integers(-4, 5, (m, n)).astype(float)
        b = np.zeros(m) if conic else rng.integers(-1, 6, m).astype(float)
        c = rng.normal(size=n)
        res = lp.maximize(c, a, b)
        status, value = highs_max(c, a, b)
        assert res.status.value == status
        if res.optimal:
            assert res.value == pytest.approx(value, abs=1e-7 * (1 + abs(value)))
            assert np.all(a @ res.point <= b + 1e-8)
            assert res.value == pytest.approx(c @ res.point)

    @given(st.integers(1, 4), st.integers(0, 8), st.integers(0, 2**32 - 1))
    def test_optimum_is_vertex(self, n, extra, seed):
        rng = np.random.default_rng(seed)
        # bounded by a box so a vertex always exists
        a = np.vstack([rng.integers(-4, 5, (extra, n)), np.eye(n), -np.eye(n)]).astype(float)
        b = np.concatenate([rng.integers(0, 6, extra), 3 * np.ones(2 * n)]).astype(float)
        res = lp.maximize(rng.normal(size=n), a, b)
        assert res.optimal
        assert lapack_rank(a[list(res.tight_rows)]) == n

    def test_degenerate_separation_terminates(self):
        # highly degenerate: many points on common hyperplanes, all right-hand sides zero
        rng = np.random.default_rng(5)
        pts = rng.integers(-3, 4, (200, 2)) @ rng.integers(-3, 4, (2, 4)) / 7.0
        rows = np.vstack([np.hstack([pts[1:], -np.ones((199, 1))]), np.hstack([np.eye(4), np.zeros((4, 1))])])
        rows = np.vstack([rows, np.hstack([-np.eye(4), np.zeros((4, 1))])])
        rhs = np.concatenate([np.zeros(199), np.ones(8)])
        c = np.append(pts[0], -1.0)
        res = lp.maximize(c, rows, rhs)
        status, value = highs_max(c, rows, rhs)
        assert res.status.value == status and res.value == pytest.approx(value, abs=1e-9)


class TestHelpers:
    def test_feasible_and_bounded(self):
        assert lp.is_feasible(HRep.box([0], [1]))
        assert not lp.is_feasible(HRep([[1.0], [-1.0]], [0.0, -1.0]))
        assert lp.is_bounded(HRep.box([0, 0], [1, 1]))
        assert not lp.is_bounded(HRep([[1.0, -1.0], [-1.0, -1.0]], [0.0, 0.0]))

    def test_lineality(self):
        z = lp.lineality(HRep([[1.0, 0.0, 0.0]], [1.0]))
        assert z.shape == (3, 2)
        assert np.allclose(z[0], 0)


class TestDualEpiPrep:
    def test_unit_interval(self):
        # eta(y) = max over x in [0, 1] of x y = max(0, y)
        h = polyhedra.p_to_h(lp.dual_epi_prep(HRep.box([0], [1]), np.array([[1.0]])))
        for y in np.linspace(-2, 2, 9):
            assert h.contains([y, max(0.0, y)])
            assert not h.contains([y, max(0.0, y) - 1e-3])

    def test_zero_payoff(self):
        h = polyhedra.p_to_h(lp.dual_epi_prep(HRep.simplex(2), np.zeros((2, 2))))
        for y in ([0.3, -4.0], [5.0, 1.0]):
            assert h.contains([*y, 0.0]) and not h.contains([*y, -1e-3])

    def test_simplex_identity(self):
        h = polyhedra.p_to_h(lp.dual_epi_prep(HRep.simplex(2), np.eye(2)))
        rng = np.random.default_rng(3)
        for y in rng.normal(size=(20, 2)):
            assert h.contains([*y, y.max()], tol=1e-8)
            assert not h.contains([*y, y.max() - 1e-3])

    def test_unbounded_set_rejected(self):
        with pytest.raises(GameError):
            lp.dual_epi_prep(HRep([[-1.0]], [0.0]), np.eye(1))

    @given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32 - 1))
    def test_strong_duality(self, m, n, seed):
        # primal max (A y).x over the simplex equals dual min sbar.u, S^T u = A y, u >= 0
        rng = np.random.default_rng(seed)
        a = rng.integers(-5, 6, (m, n)).astype(float)
        y = rng.dirichlet(np.ones(n))
        s = HRep.simplex(m)
        primal = lp.solve(lp.LpProblem(a @ y, s)).value
        # dual over u: min s.b . u  s.t.  s.a^T u = a y, u >= 0
        k = s.rows
        rows = np.vstack([s.a.T, -s.a.T, -np.eye(k)])
        rhs = np.concatenate([a @ y, -(a @ y), np.zeros(k)])
        dual = -lp.maximize(-s.b, rows, rhs).value
        assert primal == pytest.approx(dual, abs=1e-8)
