"""Deterministic cave-generation game engine and design workbench.

Levels are generated by a seeded cellular automaton; in-world levers
re-generate the map by nudging the generator's parameters, and the
analyzer treats the resulting space of maps as a searchable game-state
graph. A sibling story engine pre-generates full branching narratives
and sells vague glimpses of real futures. Everything is reproducible
bit-for-bit from seeds.
"""
from .ca import CaRule, GenParams, Grid, RandomField, ca_step, format_grid, generate, parse_grid, random_field, threshold_initial
from .errors import (
    CapacityError,
    GameError,
    IllegalMove,
    PeekBudgetExhausted,
    PlacementFailure,
    StoryEnded,
)
from .levels import (
    GameState,
    Lever,
    LeverConfig,
    LevelSpec,
    effective_params,
    flip,
    format_level,
    move,
    new_game,
    preview_diff,
    realize,
    spec_from_json,
    spec_to_json,
)
from .analysis import (
    AnalysisReport,
    StateGraph,
    StateNode,
    analyze,
    brute_force_oracle,
    build_state_graph,
    default_levers,
    enumerate_configs,
    expressive_sweep,
    place_objectives,
    reachable_cells,
)
from .story import (
    StoryNode,
    StorySession,
    StoryTree,
    Vision,
    futures_count,
    generate_story_tree,
    new_session,
    reveal_count,
    vision_hit_rate,
)

__version__ = "0.1.0"
