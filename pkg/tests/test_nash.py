import itertools

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy.optimize import linprog

from oracles import highs_max, is_nondegenerate, same_rows
from polynash import make_game, solve_game
from polynash.nash import (
    brute_force_oracle,
    compatibility,
    eq_tolerance,
    extremal_nash,
    is_nash,
    maximal_bicliques,
    minimax_value,
)


def pairs(eqs):
    return np.array([np.concatenate([e.x, e.y]) for e in eqs]).reshape(len(eqs), -1)


def highs_nash(g, x, y, tol=1e-7):
    """Best-response check with HiGHS over the H-reps of both sets."""
    s1, v1 = highs_max(g.a @ y, g.s.hrep.a, g.s.hrep.b)
    s2, v2 = highs_max(g.b.T @ x, g.t.hrep.a, g.t.hrep.b)
    return s1 == s2 == "optimal" and v1 - x @ g.a @ y <= tol and v2 - x @ g.b @ y <= tol


def highs_minimax(a):
    m, n = a.shape
    # variables (x, v): min -v  s.t.  v <= (A^T x)_j,  sum x = 1, x >= 0
    res = linprog(
        np.append(np.zeros(m), -1.0),
        A_ub=np.hstack([-a.T, np.ones((n, 1))]),
        b_ub=np.zeros(n),
        A_eq=np.append(np.ones(m), 0.0)[None, :],
        b_eq=[1.0],
        bounds=[(0, None)] * m + [(None, None)],
        method="highs",
    )
    return -res.fun


def brute_bicliques(compat):
    k, l = compat.shape
    out = set()
    for r in range(1, k + 1):
        for left in itertools.combinations(range(k), r):
            right = tuple(int(j) for j in np.nonzero(compat[list(left)].all(axis=0))[0])
            if not right:
                continue
            closed = tuple(int(i) for i in np.nonzero(compat[:, list(right)].all(axis=1))[0])
            if closed == left:
                out.add((left, right))
    return out


COORD = (np.eye(2), np.eye(2))
PENNIES = (np.array([[1.0, -1.0], [-1.0, 1.0]]), np.array([[-1.0, 1.0], [1.0, -1.0]]))
BOS = (np.array([[2.0, 0.0], [0.0, 1.0]]), np.array([[1.0, 0.0], [0.0, 2.0]]))
PRISONERS = (np.array([[3.0, 0.0], [5.0, 1.0]]), np.array([[3.0, 5.0], [0.0, 1.0]]))


class TestSmallGames:
    def test_coordination(self):
        r = solve_game(make_game(*COORD))
        assert same_rows(pairs(r.equilibria), [[1, 0, 1, 0], [0, 1, 0, 1], [0.5, 0.5, 0.5, 0.5]])
        assert len(r.faces) == 3
        assert all(reg.kind == "point" for reg in r.regions)

    def test_matching_pennies(self):
        g = make_game(*PENNIES)
        r = solve_game(g)
        assert same_rows(pairs(r.equilibria), [[0.5, 0.5, 0.5, 0.5]])
        assert same_rows(pairs(r.equilibria), pairs(brute_force_oracle(g)))
        assert r.equilibria[0].alpha == pytest.approx(0) and r.equilibria[0].beta == pytest.approx(0)

    def test_zero_game(self):
        # every profile is an equilibrium: one face holding all four vertex pairs
        g = make_game(np.zeros((2, 2)), np.zeros((2, 2)))
        r = solve_game(g)
        assert len(r.equilibria) == 4
        assert len(r.faces) == 1 and len(r.faces[0].i_set) == 2 and len(r.faces[0].j_set) == 2
        assert r.regions[0].kind == "point"
        assert same_rows(pairs(brute_force_oracle(g)), pairs(r.equilibria))

    def test_battle_of_the_sexes(self):
        r = solve_game(make_game(*BOS))
        assert same_rows(pairs(r.equilibria), [[1, 0, 1, 0], [0, 1, 0, 1], [2 / 3, 1 / 3, 1 / 3, 2 / 3]])
        assert np.allclose(sorted(reg.p1_range for reg in r.regions), [(2 / 3, 2 / 3), (1, 1), (2, 2)])
        assert [reg.kind for reg in r.regions] == ["point"] * 3

    def test_unique_equilibrium(self):
        r = solve_game(make_game(*PRISONERS))
        assert same_rows(pairs(r.equilibria), [[0, 1, 0, 1]])
        assert len(r.faces) == 1 and np.allclose(r.regions[0].p1_range, (1, 1))

    def test_segment_of_equilibria(self):
        # player 2 is indifferent, player 1 strictly prefers row 1: a segment of equilibria
        g = make_game([[1.0, 1.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]])
        r = solve_game(g)
        assert len(r.faces) == 1
        assert r.faces[0].j_set and len(r.faces[0].j_set) == 2

    def test_extremal_nash_matches_solve(self):
        g = make_game(*BOS)
        assert same_rows(pairs(extremal_nash(g)), pairs(solve_game(g).equilibria))

    def test_methods_agree(self, data_dir):
        import json

        d = json.loads((data_dir / "octagon.json").read_text())
        g = make_game(d["a"], d["b"], d["s"]["vertices"], d["t"]["vertices"])
        ref = pairs(solve_game(g).equilibria)
        assert len(ref) == 5
        for method in ("calculus", "dual"):
            assert same_rows(pairs(solve_game(g, method).equilibria), ref)

    def test_tolerance_scales_with_payoffs(self):
        # max absolute row sum of A is 13
        g = make_game(np.array([[10.0, -3.0]]), np.zeros((1, 2)))
        assert eq_tolerance(g) == pytest.approx(1e-7 * 14)
        assert eq_tolerance(g, 1e-3) == pytest.approx(1e-3 * 14)


class TestBicliques:
    def test_empty(self):
        assert maximal_bicliques(np.zeros((2, 3), bool)) == []

    def test_full(self):
        faces = maximal_bicliques(np.ones((2, 3), bool))
        assert [(f.i_set, f.j_set) for f in faces] == [((0, 1), (0, 1, 2))]

    @given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**32 - 1))
    def test_against_brute_force(self, k, l, seed):
        compat = np.random.default_rng(seed).random((k, l)) < 0.5
        assert {(f.i_set, f.j_set) for f in maximal_bicliques(compat)} == brute_bicliques(compat)


class TestProperties:
    @given(st.integers(2, 3), st.integers(2, 3), st.integers(0, 2**32 - 1))
    def test_matches_support_enumeration(self, m, n, seed):
        rng = np.random.default_rng(seed)
        a = rng.integers(-5, 6, (m, n)).astype(float)
        b = rng.integers(-5, 6, (m, n)).astype(float)
        assume(is_nondegenerate(a, b))
        g = make_game(a, b)
        got = solve_game(g).equilibria
        assert same_rows(pairs(got), pairs(brute_force_oracle(g)), tol=1e-6)
        for e in got:
            assert highs_nash(g, e.x, e.y)

    @given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32 - 1), st.booleans())
    def test_faces_are_convex(self, m, n, seed, constrained):
        # any mix of a face's x-vertices against any mix of its y-vertices is an equilibrium
        rng = np.random.default_rng(seed)
        a = rng.integers(-3, 4, (m, n)).astype(float)
        b = rng.integers(-3, 4, (m, n)).astype(float)
        if constrained:
            g = make_game(a, b, rng.dirichlet(np.ones(m), m + 1), rng.dirichlet(np.ones(n), n + 1))
        else:
            g = make_game(a, b)
        r = solve_game(g)
        assert r.faces
        for f in r.faces:
            xs = np.array([r.xi_verts[i].point for i in f.i_set])
            ys = np.array([r.eta_verts[j].point for j in f.j_set])
            for _ in range(3):
                x = rng.dirichlet(np.ones(len(xs))) @ xs
                y = rng.dirichlet(np.ones(len(ys))) @ ys
                assert highs_nash(g, x, y, tol=1e-6 * g.payoff_scale)
                assert is_nash(g, x, y, eq_tolerance(g) * 10)

    @given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32 - 1))
    def test_faces_are_maximal(self, m, n, seed):
        # no vertex outside a face is compatible with the whole face
        rng = np.random.default_rng(seed)
        g = make_game(rng.integers(-3, 4, (m, n)), rng.integers(-3, 4, (m, n)))
        r = solve_game(g)
        for f in r.faces:
            others = [i for i in range(len(r.xi_verts)) if i not in f.i_set]
            assert not any(r.compat[i, list(f.j_set)].all() for i in others)

    @given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**32 - 1))
    def test_zero_sum_value(self, m, n, seed):
        rng = np.random.default_rng(seed)
        a = rng.integers(-5, 6, (m, n)).astype(float)
        r = solve_game(make_game(a, -a))
        v = highs_minimax(a)
        assert minimax_value(a) == pytest.approx(v, abs=1e-8)
        for e in r.equilibria:
            assert e.beta == pytest.approx(v, abs=1e-7) and e.alpha == pytest.approx(-v, abs=1e-7)

    def test_threads_agree(self):
        rng = np.random.default_rng(4)
        g = make_game(rng.integers(-5, 6, (6, 6)), rng.integers(-5, 6, (6, 6)))
        r = solve_game(g)
        tol = eq_tolerance(g)
        assert np.array_equal(compatibility(g, r.xi_verts, r.eta_verts, tol, threads=4), r.compat)
