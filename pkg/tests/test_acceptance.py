"""Acceptance criteria, each checked at its stated tolerance.

Every test reports through the ``record`` fixture, and a PASS/FAIL line per
criterion is printed in the terminal summary.
"""

import json
import time
from pathlib import Path

import numpy as np
import pytest
from scipy.optimize import linprog

from oracles import is_nondegenerate, same_rows, signed_perm_match
from polynash import cli, make_game, solve_game
from polynash.game import compute_epigraph_vertices, eta, vertex_array
from polynash.nash import brute_force_oracle, extremal_nash
from polynash.reduce import check_restorable, reduce_game, restore

A2 = np.array([[0, 1], [0, 1]], float)
B2 = np.array([[0, 1], [0, 0]], float)
A3 = np.array([[0, 1, 0], [0, 0, 0], [0, 1, 1]], float)
B3 = np.array([[0, 0, 0], [0, 0, 0], [0, 1, 0]], float)


def pairs(eqs):
    return np.array([np.concatenate([e.x, e.y]) for e in eqs]).reshape(len(eqs), -1)


def highs_minimax(a):
    m, n = a.shape
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


@pytest.fixture(scope="module")
def data_dir_module():
    return Path(__file__).parent / "data"


@pytest.fixture(scope="module")
def octagon(data_dir_module):
    return cli.parse_game(data_dir_module / "octagon.json")


@pytest.fixture(scope="module")
def rank2(data_dir_module):
    return cli.parse_game(data_dir_module / "rank2_8x9.json")


def test_ac1_octagon_game(octagon, record):
    start = time.perf_counter()
    report = cli.cmd_solve(octagon)
    secs = time.perf_counter() - start
    ok = report["n_equilibria"] == 5 and secs <= 10
    record("AC1 octagon game: 5 equilibria within 10 s", ok, f"{report['n_equilibria']} equilibria in {secs:.2f} s")
    assert ok


def test_ac2_reformulated_8x8(octagon, data_dir_module, record):
    # the 8x8 game is U^T A U, U^T B U with the listed octagon vertices as the columns of U
    u = np.array(json.loads((data_dir_module / "octagon.json").read_text())["s"]["vertices"], float).T
    doc = json.loads((data_dir_module / "octagon_8x8.json").read_text())
    g = make_game(doc["a"], doc["b"])
    same = np.allclose(g.a, u.T @ octagon.a @ u) and np.allclose(g.b, u.T @ octagon.b @ u)
    start = time.perf_counter()
    report = cli.cmd_solve(g)
    secs = time.perf_counter() - start
    ok = same and report["n_equilibria"] == 148 and secs <= 600
    record("AC2 8x8 reformulation: 148 equilibria within 10 min", ok, f"{report['n_equilibria']} equilibria in {secs:.2f} s")
    assert ok


def test_ac3_rank2_game(rank2, record):
    report = cli.cmd_reduce(rank2, t=1.0, compare_original=True)
    orig, red = report["original"], report["reduced"]
    counts = (orig["n_equilibria"], orig["n_faces"], red["n_equilibria"], red["n_faces"])
    gap = report["original_discrepancy"]
    ok = counts == (16, 4, 12, 4) and gap <= 1e-6 and report["lift_discrepancy"] <= 1e-6
    record("AC3 rank-2 8x9 game: 16/4 original, 12/4 reduced, regions within 1e-6", ok, f"counts {counts}, gap {gap:.1e}")
    assert ok


def test_ac4_restorability_examples(record):
    flags = (check_restorable(A2, B2, -1.0), check_restorable(A3, B3, -1.0))
    r = reduce_game(make_game(A3, B3), -1.0)
    a, b = restore(r)
    err = max(np.abs(a - A3).max(), np.abs(b - B3).max())
    match = r.k == 2 and signed_perm_match(
        [(r.abar, np.array([[1.0, 0.0], [1.0, 1.0]])), (r.bbar, np.array([[0.0, 0.0], [1.0, 0.0]]))]
    )
    ok = flags == (False, True) and err <= 1e-9 and match
    record("AC4 restorability examples and printed reduced matrices", ok, f"flags {flags}, restore error {err:.1e}")
    assert ok


def test_ac5_oracle_equivalence(record):
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    checked = mismatched = 0
    while checked < 120:
        m = n = 2 if checked % 2 else 3
        a = rng.integers(-5, 6, (m, n)).astype(float)
        b = rng.integers(-5, 6, (m, n)).astype(float)
        if not is_nondegenerate(a, b):
            continue
        g = make_game(a, b)
        if not same_rows(pairs(extremal_nash(g)), pairs(brute_force_oracle(g)), tol=1e-6):
            mismatched += 1
        checked += 1
    secs = time.perf_counter() - start
    ok = mismatched == 0 and secs <= 300
    record("AC5 oracle equivalence on 120 nondegenerate games", ok, f"{mismatched} mismatches in {secs:.1f} s")
    assert ok


def _acceptance_games(octagon, rank2, data_dir):
    doc = json.loads((data_dir / "octagon_8x8.json").read_text())
    games = {
        "octagon": octagon,
        "octagon_8x8": make_game(doc["a"], doc["b"]),
        "rank2": rank2,
        "rank2_reduced": reduce_game(rank2, 1.0).game,
        "pair_2x2": make_game(A2, B2),
        "pair_3x3": make_game(A3, B3),
        "pair_3x3_reduced": reduce_game(make_game(A3, B3), -1.0).game,
    }
    rng = np.random.default_rng(7)
    for i in range(3):
        a = rng.integers(-5, 6, (3, 3)).astype(float)
        games[f"zero_sum_{i}"] = make_game(a, -a)
    inst = cli.gen_instance(cli.GenSpec(seed=0, **cli.PRESETS["n100"]))
    games["n100_reduced"] = reduce_game(inst, 1.0).game
    return games


def test_ac6_cross_route(octagon, rank2, data_dir_module, record):
    bad = []
    games = _acceptance_games(octagon, rank2, data_dir_module)
    for name, g in games.items():
        for player in (1, 2):
            direct = vertex_array(compute_epigraph_vertices(g, player, "direct"))
            calculus = vertex_array(compute_epigraph_vertices(g, player, "calculus"))
            if not same_rows(direct, calculus, tol=1e-7):
                bad.append(f"{name}/player{player}")
    ok = not bad
    record("AC6 direct and calculus epigraph vertices agree within 1e-7", ok, f"{len(games)} games; mismatches {bad}")
    assert ok


def test_ac7_reduced_values(record):
    worst = 0.0
    restorable = 0
    seed = 0
    rng = np.random.default_rng(11)
    while restorable < 10:
        g = cli.gen_instance(cli.GenSpec(20, 20, 2, 2, ((-3, 3),) * 4, seed=seed))
        seed += 1
        if not check_restorable(g.a, g.b, 1.0):
            continue
        restorable += 1
        r = reduce_game(g, 1.0)
        for y in rng.dirichlet(np.ones(20), size=50):
            gap = abs(eta(g, y).value - eta(r.game, r.v.T @ y).value)
            worst = max(worst, gap / g.payoff_scale)
    ok = worst <= 1e-7
    record("AC7 reduced value function matches on 10 x 50 samples", ok, f"max relative gap {worst:.1e}")
    assert ok


def test_ac8_scale(record):
    times, sizes = [], []
    for seed in range(10):
        g = cli.gen_instance(cli.GenSpec(seed=seed, **cli.PRESETS["n500"]))
        start = time.perf_counter()
        report = cli.cmd_reduce(g, t=1.0)
        times.append(time.perf_counter() - start)
        sizes.append(report["k"] if report["restorable"] else None)
    ok = all(k is None or k <= 4 for k in sizes) and max(times) <= 120
    record("AC8 500x500 instances reduce to <= 4x4 within 120 s", ok, f"k {sizes}, max {max(times):.1f} s")
    assert ok


def test_ac9_zero_sum(record):
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(50):
        m, n = rng.integers(1, 5, 2)
        a = rng.integers(-5, 6, (m, n)).astype(float)
        v = highs_minimax(a)
        for e in solve_game(make_game(a, -a)).equilibria:
            worst = max(worst, abs(e.beta - v))
    ok = worst <= 1e-7
    record("AC9 zero-sum payoffs equal the minimax value within 1e-7", ok, f"max gap {worst:.1e} over 50 games")
    assert ok
