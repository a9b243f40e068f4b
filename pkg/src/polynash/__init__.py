"""Extremal Nash equilibria of constrained bi-matrix games and low-rank game reduction."""

from polynash.errors import (
    ConsistencyError,
    DegenerateInputError,
    DegenerateParameterError,
    GameError,
    NotReducibleError,
)
from polynash.game import ConstrainedGame, Polytope, make_game
from polynash.nash import extremal_nash, solve_game
from polynash.reduce import check_restorable, choose_t, reduce_game, restore

__all__ = [
    "ConsistencyError",
    "ConstrainedGame",
    "DegenerateInputError",
    "DegenerateParameterError",
    "GameError",
    "NotReducibleError",
    "Polytope",
    "check_restorable",
    "choose_t",
    "extremal_nash",
    "make_game",
    "reduce_game",
    "restore",
    "solve_game",
]

__version__ = "0.1.0"
