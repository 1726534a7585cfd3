"""Domain error types shared across the engine, analyzer, and service.

Each carries a stable machine-readable `code` so the HTTP layer can map
errors to status codes without string matching. Plain ``ValueError`` is
used for malformed arguments and corresponds to the "invalid-argument"
code at the service boundary.
"""
from __future__ import annotations

__all__ = [
    "CapacityError",
    "GameError",
    "IllegalMove",
    "PeekBudgetExhausted",
    "PlacementFailure",
    "StoryEnded",
]


class GameError(Exception):
    """Base class for rule violations and unsatisfiable requests."""

    code = "game-error"


class IllegalMove(GameError):
    """A move or flip that the current game state does not allow."""

    code = "illegal-move"


class CapacityError(GameError):
    """A request exceeding a hard capacity limit (e.g. lever count)."""

    code = "capacity"


class PlacementFailure(GameError):
    """Objective placement could not satisfy the requested targets."""

    code = "placement-failure"


class PeekBudgetExhausted(GameError):
    """A vision was already spent on that branch this decision."""

    code = "peek-budget-exhausted"


class StoryEnded(GameError):
    """The story session is at a leaf; no further choices exist."""

    code = "story-already-ended"
