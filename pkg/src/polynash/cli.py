"""Command-line front end.

Subcommands::

    polynash solve GAME.json [--method direct] [--out report.json] [--plot plot.svg]
    polynash reduce GAME.json [--t 1] [--compare-original] [--out report.json]
    polynash gen --preset n100 --seed 7 --out game.json
    polynash plot REPORT.json --out plot.svg
    polynash vertices GAME.json

Game files are JSON objects with matrices ``a`` and ``b`` (lists of rows) and
optional strategy sets ``s`` and ``t``, each either ``{"vertices": [[...], ...]}``
or ``{"ineq": {"A": [[...]], "b": [...]}}``. Missing sets are probability simplices.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from polynash import __version__
from polynash.errors import ConsistencyError, GameError, NotReducibleError
from polynash.game import EPIGRAPH_ROUTES, ConstrainedGame, Polytope, compute_epigraph_vertices, make_game
from polynash.linalg import DEFAULT_RANK_TOL
from polynash.nash import EQ_TOL, NashResult, PayoffRegion, solve_game
from polynash.reduce import choose_t, lift_faces, lifted_region, reduce_game, region_discrepancy
from polynash.reps import HRep

log = logging.getLogger("polynash")

SIG_DIGITS = 12


# ---------------------------------------------------------------- game files


def _field_error(field: str, msg: str) -> GameError:
    return GameError(f"field {field!r}: {msg}")


def _matrix(field: str, value) -> np.ndarray:
    if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
        raise _field_error(field, "expected a nonempty list of rows")
    width = len(value[0])
    for i, row in enumerate(value):
        if len(row) != width:
            raise _field_error(field, f"row {i} has {len(row)} entries, row 0 has {width}")
        for j, x in enumerate(row):
            if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
                raise _field_error(field, f"entry ({i}, {j}) is not a finite number: {x!r}")
    if width == 0:
        raise _field_error(field, "rows are empty")
    return np.array(value, dtype=float)


def _vector(field: str, value) -> np.ndarray:
    if not isinstance(value, list):
        raise _field_error(field, "expected a list of numbers")
    return _matrix(field, [value])[0] if value else np.zeros(0)


def _polytope(field: str, spec, dim: int) -> Polytope | None:
    if spec is None:
        return None
    if not isinstance(spec, dict) or len(spec) != 1 or next(iter(spec)) not in ("vertices", "ineq"):
        raise _field_error(field, 'expected {"vertices": [...]} or {"ineq": {"A": [...], "b": [...]}}')
    if "vertices" in spec:
        pts = _matrix(f"{field}.vertices", spec["vertices"])
        if pts.shape[1] != dim:
            raise _field_error(f"{field}.vertices", f"points have {pts.shape[1]} coordinates, expected {dim}")
        return Polytope.from_vertices(pts)
    ineq = spec["ineq"]
    if not isinstance(ineq, dict) or set(ineq) != {"A", "b"}:
        raise _field_error(f"{field}.ineq", 'expected keys "A" and "b"')
    a = _matrix(f"{field}.ineq.A", ineq["A"])
    b = _vector(f"{field}.ineq.b", ineq["b"])
    if a.shape[1] != dim or len(b) != a.shape[0]:
        raise _field_error(f"{field}.ineq", f"A is {a.shape[0]}x{a.shape[1]}, b has {len(b)} entries, dimension {dim}")
    return Polytope.from_hrep(HRep(a, b))


def game_from_dict(doc) -> ConstrainedGame:
    if not isinstance(doc, dict):
        raise GameError("game file must hold a JSON object")
    unknown = set(doc) - {"a", "b", "s", "t"}
    if unknown:
        raise GameError(f"unknown fields {sorted(unknown)}")
    for key in ("a", "b"):
        if key not in doc:
            raise _field_error(key, "missing")
    a = _matrix("a", doc["a"])
    b = _matrix("b", doc["b"])
    if a.shape != b.shape:
        raise GameError(f"a is {a.shape[0]}x{a.shape[1]} but b is {b.shape[0]}x{b.shape[1]}")
    m, n = a.shape
    return make_game(a, b, _polytope("s", doc.get("s"), m), _polytope("t", doc.get("t"), n))


def parse_game(path) -> ConstrainedGame:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return game_from_dict(doc)


def game_to_dict(g: ConstrainedGame) -> dict:
    doc = {"a": g.a.tolist(), "b": g.b.tolist()}
    if not g.s.is_simplex():
        doc["s"] = {"vertices": g.s.vertices.tolist()}
    if not g.t.is_simplex():
        doc["t"] = {"vertices": g.t.vertices.tolist()}
    return doc


def write_game(g: ConstrainedGame, path) -> None:
    Path(path).write_text(json.dumps(game_to_dict(g)) + "\n")


# ---------------------------------------------------------------- generator


@dataclass(frozen=True)
class GenSpec:
    """``A = M_A N_A`` and ``B = M_B N_B`` with integer factors drawn uniformly from ``ranges``.

    ``ranges`` lists the closed intervals for ``M_A, N_A, M_B, N_B`` in that order.
    """

    m: int
    n: int
    ra: int
    rb: int
    ranges: tuple[tuple[int, int], ...]
    seed: int = 0

    def __post_init__(self):
        if min(self.m, self.n) < 1 or min(self.ra, self.rb) < 1:
            raise ValueError("sizes and ranks must be positive")
        if len(self.ranges) != 4 or any(len(r) != 2 or r[0] > r[1] for r in self.ranges):
            raise ValueError("ranges must be four nonempty integer intervals")


PRESETS = {
    "n100": dict(m=100, n=100, ra=2, rb=2, ranges=((-2, 2), (1, 4), (-2, 2), (1, 4))),
    "n500": dict(m=500, n=500, ra=2, rb=2, ranges=((-3, 3),) * 4),
}


def gen_instance(spec: GenSpec) -> ConstrainedGame:
    rng = np.random.default_rng(spec.seed)
    shapes = [(spec.m, spec.ra), (spec.ra, spec.n), (spec.m, spec.rb), (spec.rb, spec.n)]
    ma, na, mb, nb = (rng.integers(lo, hi + 1, size=shape) for (lo, hi), shape in zip(spec.ranges, shapes))
    return make_game((ma @ na).astype(float), (mb @ nb).astype(float))


# ---------------------------------------------------------------- reports


def _num(x: float) -> float:
    v = float(f"{float(x):.{SIG_DIGITS}g}")
    return 0.0 if v == 0 else v


def _arr(a) -> list:
    a = np.asarray(a, dtype=float)
    if a.ndim == 0:
        return _num(a)
    return [_arr(row) for row in a] if a.ndim > 1 else [_num(x) for x in a]


def _region_dict(reg: PayoffRegion) -> dict:
    return {
        "i_set": list(reg.face.i_set),
        "j_set": list(reg.face.j_set),
        "p1_range": _arr(reg.p1_range),
        "p2_range": _arr(reg.p2_range),
        "kind": reg.kind,
    }


def solve_report(g: ConstrainedGame, res: NashResult, method: str) -> dict:
    return {
        "shape": [g.m, g.n],
        "method": method,
        "n_xi_vertices": len(res.xi_verts),
        "n_eta_vertices": len(res.eta_verts),
        "n_equilibria": len(res.equilibria),
        "n_faces": len(res.faces),
        "equilibria": [
            {"x": _arr(e.x), "y": _arr(e.y), "alpha": _num(e.alpha), "beta": _num(e.beta)} for e in res.equilibria
        ],
        "regions": [_region_dict(r) for r in res.regions],
    }


def dump_report(report: dict, out: str | None) -> None:
    text = json.dumps(report, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def strip_timing(report: dict) -> dict:
    """Report without wall-clock fields, for determinism comparisons."""
    return {k: (strip_timing(v) if isinstance(v, dict) else v) for k, v in report.items() if k != "timing"}


# ---------------------------------------------------------------- plotting

PALETTE = ("#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22")


def _ticks(lo: float, hi: float, count: int = 5) -> np.ndarray:
    span = hi - lo
    raw = span / count
    step = 10 ** math.floor(math.log10(raw))
    for mult in (1, 2, 5, 10):
        if mult * step >= raw:
            step *= mult
            break
    return np.arange(math.ceil(lo / step) * step, hi + 1e-9 * step, step)


def emit_plot(regions: list[dict], path, points=None, title: str = "payoff plot") -> None:
    """Write an SVG payoff plot: one shape per face region, red dots at equilibrium payoffs.

    ``regions`` carry ``p1_range`` (horizontal) and ``p2_range`` (vertical);
    ``points`` are ``(p1, p2)`` pairs.
    """
    if not regions:
        raise GameError("nothing to plot: the region list is empty")
    points = np.asarray(points if points is not None else [], dtype=float).reshape(-1, 2)
    xs = [v for r in regions for v in r["p1_range"]] + points[:, 0].tolist()
    ys = [v for r in regions for v in r["p2_range"]] + points[:, 1].tolist()
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    pad_x = 0.08 * (x1 - x0) or 1.0
    pad_y = 0.08 * (y1 - y0) or 1.0
    x0, x1, y0, y1 = x0 - pad_x, x1 + pad_x, y0 - pad_y, y1 + pad_y
    width, height, left, right, top, bottom = 560, 440, 70, 20, 40, 60
    pw, ph = width - left - right, height - top - bottom

    def px(x):
        return left + (x - x0) / (x1 - x0) * pw

    def py(y):
        return top + (y1 - y) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{width / 2}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">{title}</text>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        out.append(f'<line x1="{px(t):.2f}" y1="{top + ph}" x2="{px(t):.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(
            f'<text x="{px(t):.2f}" y="{top + ph + 18}" text-anchor="middle" font-family="sans-serif" '
            f'font-size="11">{t:g}</text>'
        )
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{left - 5}" y1="{py(t):.2f}" x2="{left}" y2="{py(t):.2f}" stroke="black"/>')
        out.append(
            f'<text x="{left - 8}" y="{py(t) + 4:.2f}" text-anchor="end" font-family="sans-serif" '
            f'font-size="11">{t:g}</text>'
        )
    out.append(
        f'<text x="{left + pw / 2}" y="{height - 15}" text-anchor="middle" font-family="sans-serif" '
        'font-size="13">player 1 payoff</text>'
    )
    out.append(
        f'<text x="18" y="{top + ph / 2}" text-anchor="middle" font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 18 {top + ph / 2})">player 2 payoff</text>'
    )
    for idx, reg in enumerate(regions):
        color = PALETTE[idx % len(PALETTE)]
        (a, b), (c, d) = reg["p1_range"], reg["p2_range"]
        kind = reg.get("kind") or PayoffRegion((a, b), (c, d), None).kind
        if kind == "rectangle":
            out.append(
                f'<rect class="face" x="{px(a):.2f}" y="{py(d):.2f}" width="{px(b) - px(a):.2f}" '
                f'height="{py(c) - py(d):.2f}" fill="{color}" fill-opacity="0.45" stroke="{color}"/>'
            )
        elif kind == "segment":
            out.append(
                f'<line class="face" x1="{px(a):.2f}" y1="{py(c):.2f}" x2="{px(b):.2f}" y2="{py(d):.2f}" '
                f'stroke="{color}" stroke-width="3"/>'
            )
        else:
            out.append(f'<circle class="face" cx="{px(a):.2f}" cy="{py(c):.2f}" r="6" fill="{color}"/>')
    for p1, p2 in points:
        out.append(f'<circle class="equilibrium" cx="{px(p1):.2f}" cy="{py(p2):.2f}" r="3" fill="red"/>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")


def _report_plot_data(report: dict):
    part = report["reduced"] if "reduced" in report else report
    points = [(e["beta"], e["alpha"]) for e in part["equilibria"]]
    return part["regions"], points


# ---------------------------------------------------------------- commands


def cmd_solve(g: ConstrainedGame, method: str = "direct", tol_eq: float | None = None, threads: int = 1) -> dict:
    start = time.perf_counter()
    res = solve_game(g, method, tol_eq, threads)
    report = solve_report(g, res, method)
    report["timing"] = {"seconds": time.perf_counter() - start}
    return report


def cmd_reduce(
    g: ConstrainedGame,
    t: float | None = None,
    tol_rank: float = DEFAULT_RANK_TOL,
    method: str = "direct",
    tol_eq: float | None = None,
    threads: int = 1,
    lift: bool = True,
    compare_original: bool = False,
) -> dict:
    """Reduce, solve the reduced game, lift its faces and compare payoff regions."""
    start = time.perf_counter()
    if t is None:
        t = choose_t(g.a, g.b, tol=tol_rank)
    r = reduce_game(g, t, tol_rank)
    reduced_at = time.perf_counter()
    res = solve_game(r.game, method, tol_eq, threads)
    solved_at = time.perf_counter()
    report = {
        "shape": [g.m, g.n],
        "t": _num(r.t),
        "k": r.k,
        "restorable": r.restorable,
        "sigma": _arr(r.sigma),
        "abar": _arr(r.abar),
        "bbar": _arr(r.bbar),
        "sbar_vertices": _arr(r.sbar.vertices),
        "tbar_vertices": _arr(r.tbar.vertices),
        "reduced": solve_report(r.game, res, method),
        "lifted_regions": None,
        "lift_discrepancy": None,
    }
    if not r.restorable:
        log.warning("t=%g does not satisfy the restorability condition; faces are not lifted", r.t)
    elif lift:
        lifted = lift_faces(r, res.faces, res.xi_verts, res.eta_verts, g)
        regions = [lifted_region(f, face) for f, face in zip(lifted, res.faces)]
        report["lifted_regions"] = [_region_dict(reg) for reg in regions]
        report["lift_discrepancy"] = _num(max((_gap(p, q) for p, q in zip(regions, res.regions)), default=0.0))
    lifted_at = time.perf_counter()
    timing = {"reduce": reduced_at - start, "solve_reduced": solved_at - reduced_at, "lift": lifted_at - solved_at}
    if compare_original:
        orig = solve_game(g, method, tol_eq, threads)
        report["original"] = solve_report(g, orig, method)
        report["original_discrepancy"] = _num(region_discrepancy(orig.regions, res.regions))
        timing["solve_original"] = time.perf_counter() - lifted_at
    timing["total"] = time.perf_counter() - start
    report["timing"] = timing
    return report


def _gap(p: PayoffRegion, q: PayoffRegion) -> float:
    return float(np.abs(np.array([*p.p1_range, *p.p2_range]) - np.array([*q.p1_range, *q.p2_range])).max())


def cmd_vertices(g: ConstrainedGame, method: str = "direct") -> dict:
    out = {}
    for player, name in ((2, "xi"), (1, "eta")):
        verts = compute_epigraph_vertices(g, player, method)
        out[name] = [{"point": _arr(v.point), "value": _num(v.value)} for v in verts]
    return out


# ---------------------------------------------------------------- argument parsing


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", choices=sorted(EPIGRAPH_ROUTES), default="direct", help="epigraph construction")
    p.add_argument("--tol-eq", type=float, default=EQ_TOL, help="relative tolerance of the equilibrium test")
    p.add_argument("--threads", type=int, default=1, help="threads for vertex-pair checking")
    p.add_argument("--out", help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polynash", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="extremal equilibria, maximal Nash faces and payoff regions")
    p.add_argument("game")
    _common(p)
    p.add_argument("--plot", help="also write an SVG payoff plot")

    p = sub.add_parser("reduce", help="reduce a low-rank game, solve it and lift the faces back")
    p.add_argument("game")
    _common(p)
    p.add_argument("--t", type=float, help="mixing parameter (default: first suitable candidate)")
    p.add_argument("--tol-rank", type=float, default=DEFAULT_RANK_TOL, help="relative singular value cutoff")
    p.add_argument("--no-lift", action="store_true", help="skip lifting faces to the original game")
    p.add_argument("--compare-original", action="store_true", help="also solve the original game directly")
    p.add_argument("--plot", help="also write an SVG payoff plot of the reduced game")

    p = sub.add_parser("gen", help="random low-rank integer game")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--ra", type=int)
    p.add_argument("--rb", type=int)
    p.add_argument(
        "--ranges", type=int, nargs=8, metavar="INT", help="lo hi for M_A, N_A, M_B, N_B (eight integers)"
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output game file (default: stdout)")

    p = sub.add_parser("plot", help="SVG payoff plot from a solve or reduce report")
    p.add_argument("report")
    p.add_argument("--out", required=True)

    p = sub.add_parser("vertices", help="dump epigraph vertices (debugging)")
    p.add_argument("game")
    p.add_argument("--method", choices=sorted(EPIGRAPH_ROUTES), default="direct")
    p.add_argument("--out")
    return parser


def _gen_spec(args) -> GenSpec:
    fields = dict(PRESETS[args.preset]) if args.preset else {}
    for key in ("m", "n", "ra", "rb"):
        if getattr(args, key) is not None:
            fields[key] = getattr(args, key)
    if args.ranges is not None:
        r = args.ranges
        fields["ranges"] = tuple((r[i], r[i + 1]) for i in range(0, 8, 2))
    missing = {"m", "n", "ra", "rb", "ranges"} - set(fields)
    if missing:
        raise GameError(f"gen needs --preset or all of {sorted(missing)}")
    return GenSpec(seed=args.seed, **fields)


def run(args) -> None:
    if args.command == "solve":
        report = cmd_solve(parse_game(args.game), args.method, args.tol_eq, args.threads)
        dump_report(report, args.out)
        if args.plot:
            regions, points = _report_plot_data(report)
            emit_plot(regions, args.plot, points)
    elif args.command == "reduce":
        report = cmd_reduce(
            parse_game(args.game),
            args.t,
            args.tol_rank,
            args.method,
            args.tol_eq,
            args.threads,
            lift=not args.no_lift,
            compare_original=args.compare_original,
        )
        dump_report(report, args.out)
        if args.plot:
            regions, points = _report_plot_data(report)
            emit_plot(regions, args.plot, points)
    elif args.command == "gen":
        g = gen_instance(_gen_spec(args))
        if args.out:
            write_game(g, args.out)
        else:
            sys.stdout.write(json.dumps(game_to_dict(g)) + "\n")
    elif args.command == "plot":
        try:
            report = json.loads(Path(args.report).read_text())
            regions, points = _report_plot_data(report)
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise GameError(f"{args.report}: not a solve or reduce report ({exc})") from None
        emit_plot(regions, args.out, points)
    elif args.command == "vertices":
        dump_report(cmd_vertices(parse_game(args.game), args.method), args.out)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        run(args)
    except (GameError, NotReducibleError, ConsistencyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
