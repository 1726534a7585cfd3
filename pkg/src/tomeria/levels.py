"""Lever worlds: levels whose map is re-generated when levers change.

A level is a frozen description (base generation params, levers, start,
exit, treasures). The playable map for any lever configuration is fully
determined by the base seed and the effective parameters, so flipping a
lever re-derives the whole grid deterministically rather than editing
it. Start, exit, and lever cells are carved OPEN after generation so the
world never strands its own fixtures; treasure cells are left untouched
and may be buried under some configurations.

IRC is carried internally in integer millionths ("micro-units") so that
lever deltas are exact: a default IRC lever moves the effective value by
exactly 5000 micro-units, with no floating-point drift regardless of
flip order or count.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .ca import CaRule, GenParams, Grid, format_grid, generate_from_field, random_field
from .errors import IllegalMove

Cell = tuple[int, int]

AXIS_IRC = "IRC"
AXIS_NOI = "NOI"

IRC_STEP = 0.005
NOI_STEP = 1

MICRO = 1_000_000

DIRECTIONS: dict[str, Cell] = {"N": (0, -1), "E": (1, 0), "S": (0, 1), "W": (-1, 0)}
DIRECTION_ORDER = ("N", "E", "S", "W")

__all__ = [
    "AXIS_IRC",
    "AXIS_NOI",
    "Cell",
    "DIRECTIONS",
    "DIRECTION_ORDER",
    "GameState",
    "IRC_STEP",
    "Lever",
    "LeverConfig",
    "LevelSpec",
    "MICRO",
    "NOI_STEP",
    "effective_params",
    "flip",
    "format_level",
    "from_micro",
    "move",
    "new_game",
    "preview_diff",
    "realize",
    "spec_from_dict",
    "spec_from_json",
    "spec_to_dict",
    "spec_to_json",
    "to_micro",
]


def to_micro(x: float) -> int:
    """Quantize an IRC-scale float to integer millionths."""
    return round(x * MICRO)


def from_micro(m: int) -> float:
    return m / MICRO


@dataclass(frozen=True)
class Lever:
    """One lever: its floor cell and the parameter nudge it toggles.

    LEFT is the rest position and contributes nothing; RIGHT applies
    `delta` to the axis it controls. Magnitudes default to 0.005 (IRC)
    and 1 (NOI) but are configurable per lever.
    """

    id: int
    cell: Cell
    axis: str
    delta: float

    def __post_init__(self) -> None:
        if self.id < 0:
            raise ValueError(f"lever id must be >= 0, got {self.id}")
        if self.axis not in (AXIS_IRC, AXIS_NOI):
            raise ValueError(f"lever axis must be {AXIS_IRC} or {AXIS_NOI}, got {self.axis!r}")
        if self.axis == AXIS_IRC:
            if not -1.0 <= self.delta <= 1.0 or to_micro(self.delta) == 0:
                raise ValueError(f"IRC lever delta must be a nonzero fraction, got {self.delta}")
        else:
            if self.delta != int(self.delta) or int(self.delta) == 0:
                raise ValueError(f"NOI lever delta must be a nonzero integer, got {self.delta}")

    @property
    def delta_micro(self) -> int:
        """IRC delta in micro-units (only meaningful for IRC levers)."""
        return to_micro(self.delta)

    @property
    def delta_noi(self) -> int:
        return int(self.delta)


@dataclass(frozen=True)
class LeverConfig:
    """Positions of every lever in id order; False is LEFT, True is RIGHT."""

    states: tuple[bool, ...]

    @classmethod
    def all_left(cls, count: int) -> "LeverConfig":
        return cls(states=(False,) * count)

    @classmethod
    def from_string(cls, text: str) -> "LeverConfig":
        states = []
        for ch in text:
            if ch == "L":
                states.append(False)
            elif ch == "R":
                states.append(True)
            else:
                raise ValueError(f"config string may contain only 'L' and 'R', got {ch!r}")
        return cls(states=tuple(states))

    def to_string(self) -> str:
        return "".join("R" if s else "L" for s in self.states)

    def toggled(self, index: int) -> "LeverConfig":
        if not 0 <= index < len(self.states):
            raise ValueError(f"lever index {index} out of range for {len(self.states)} levers")
        states = list(self.states)
        states[index] = not states[index]
        return LeverConfig(states=tuple(states))

    def __len__(self) -> int:
        return len(self.states)


def _sorted_cells(cells) -> tuple[Cell, ...]:
    return tuple(sorted(((int(x), int(y)) for x, y in cells), key=lambda c: (c[1], c[0])))


@dataclass(frozen=True)
class LevelSpec:
    """Frozen level description; everything else is derived from it."""

    base: GenParams
    levers: tuple[Lever, ...]
    start: Cell
    exit: Cell
    treasures: tuple[Cell, ...] = ()
    initial_config: LeverConfig = None  # type: ignore[assignment]  # defaulted in __post_init__
    preview_enabled: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "levers", tuple(self.levers))
        object.__setattr__(self, "treasures", _sorted_cells(self.treasures))
        if self.initial_config is None:
            object.__setattr__(self, "initial_config", LeverConfig.all_left(len(self.levers)))
        w, h = self.base.width, self.base.height

        def check_cell(cell: Cell, what: str) -> None:
            x, y = cell
            if not (0 <= x < w and 0 <= y < h):
                raise ValueError(f"{what} cell {cell} outside {w}x{h} grid")

        for i, lever in enumerate(self.levers):
            if lever.id != i:
                raise ValueError("lever ids must be 0..L-1 in order")
            check_cell(lever.cell, f"lever {i}")
        lever_cells = [lv.cell for lv in self.levers]
        if len(set(lever_cells)) != len(lever_cells):
            raise ValueError("lever cells must be pairwise distinct")
        check_cell(self.start, "start")
        check_cell(self.exit, "exit")
        reserved = {self.start, self.exit, *lever_cells}
        seen: set[Cell] = set()
        for t in self.treasures:
            check_cell(t, "treasure")
            if t in reserved:
                raise ValueError(f"treasure cell {t} collides with start/exit/lever")
            if t in seen:
                raise ValueError(f"duplicate treasure cell {t}")
            seen.add(t)
        if len(self.initial_config) != len(self.levers):
            raise ValueError("initial config length must equal lever count")

    @property
    def lever_cells(self) -> tuple[Cell, ...]:
        return tuple(lv.cell for lv in self.levers)


@dataclass(frozen=True)
class GameState:
    """One moment of play; operations return new states."""

    spec: LevelSpec
    config: LeverConfig
    player: Cell
    collected: frozenset[Cell]
    flip_count: int
    complete: bool


def effective_params(spec: LevelSpec, config: LeverConfig) -> GenParams:
    """Base params with every RIGHT lever's delta applied, then clamped.

    IRC accumulates in micro-units and clamps to [0, 1]; NOI clamps at 0.
    """
    if len(config) != len(spec.levers):
        raise ValueError("config length must equal lever count")
    irc_micro = to_micro(spec.base.irc)
    noi = spec.base.noi
    for lever, on in zip(spec.levers, config.states):
        if not on:
            continue
        if lever.axis == AXIS_IRC:
            irc_micro += lever.delta_micro
        else:
            noi += lever.delta_noi
    irc_micro = min(max(irc_micro, 0), MICRO)
    noi = max(noi, 0)
    return replace(spec.base, irc=from_micro(irc_micro), noi=noi)


@lru_cache(maxsize=128)
def _field_cached(seed: int, width: int, height: int):
    return random_field(seed, width, height)


@lru_cache(maxsize=4096)
def _realize_cached(spec: LevelSpec, irc_micro: int, noi: int) -> Grid:
    field = _field_cached(spec.base.seed, spec.base.width, spec.base.height)
    grid = generate_from_field(field, from_micro(irc_micro), noi, spec.base.rule)
    blocks = np.array(grid.blocks)
    for x, y in (spec.start, spec.exit, *spec.lever_cells):
        blocks[y, x] = False
    return Grid(blocks)


def realize(spec: LevelSpec, config: LeverConfig) -> Grid:
    """The playable grid for a configuration.

    Generates from the shared per-seed field at the effective params,
    then carves start, exit, and lever cells OPEN. Treasure cells are
    not carved. Memoized on the effective parameters, so configurations
    that collapse to the same (IRC, NOI) share one grid.
    """
    eff = effective_params(spec, config)
    return _realize_cached(spec, to_micro(eff.irc), eff.noi)


def new_game(spec: LevelSpec) -> GameState:
    """Fresh session at the start cell with the level's initial config."""
    return GameState(
        spec=spec,
        config=spec.initial_config,
        player=spec.start,
        collected=frozenset(),
        flip_count=0,
        complete=spec.start == spec.exit,
    )


def move(state: GameState, direction: str) -> GameState:
    """Step one cell N/E/S/W; collects treasure and detects the exit."""
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTION_ORDER}, got {direction!r}")
    dx, dy = DIRECTIONS[direction]
    x, y = state.player
    target = (x + dx, y + dy)
    grid = realize(state.spec, state.config)
    if not grid.is_open(*target):
        raise IllegalMove(f"cannot move {direction} from {state.player}: target is blocked")
    collected = state.collected
    if target in state.spec.treasures and target not in collected:
        collected = collected | {target}
    return replace(
        state,
        player=target,
        collected=collected,
        complete=state.complete or target == state.spec.exit,
    )


def flip(state: GameState, lever_id: int) -> GameState:
    """Throw the lever under the player's feet, re-deriving the map.

    The player must be standing on that lever's cell; lever cells stay
    carved OPEN in every configuration, so the player is never buried.
    """
    if not 0 <= lever_id < len(state.spec.levers):
        raise ValueError(f"unknown lever id {lever_id}")
    lever = state.spec.levers[lever_id]
    if state.player != lever.cell:
        raise IllegalMove(
            f"player at {state.player} is not on lever {lever_id}'s cell {lever.cell}"
        )
    return replace(
        state,
        config=state.config.toggled(lever_id),
        flip_count=state.flip_count + 1,
    )


def preview_diff(state: GameState, lever_id: int) -> frozenset[Cell]:
    """Cells that would change state if the lever were flipped now.

    Read-only: the game state is untouched. Disabled per level via
    `preview_enabled`.
    """
    if not 0 <= lever_id < len(state.spec.levers):
        raise ValueError(f"unknown lever id {lever_id}")
    if not state.spec.preview_enabled:
        raise IllegalMove("preview is disabled for this level")
    before = realize(state.spec, state.config)
    after = realize(state.spec, state.config.toggled(lever_id))
    diff = np.argwhere(before.blocks != after.blocks)
    return frozenset((int(x), int(y)) for y, x in diff)


def spec_to_dict(spec: LevelSpec) -> dict:
    """Canonical JSON form (stable key order, treasures sorted row-major)."""
    d = {
        "base": {
            "seed": spec.base.seed,
            "width": spec.base.width,
            "height": spec.base.height,
            "irc": spec.base.irc,
            "noi": spec.base.noi,
            "blockThreshold": spec.base.rule.block_threshold,
        },
        "levers": [
            {
                "id": lv.id,
                "cell": [lv.cell[0], lv.cell[1]],
                "axis": lv.axis,
                "delta": lv.delta_noi if lv.axis == AXIS_NOI else lv.delta,
            }
            for lv in spec.levers
        ],
        "start": [spec.start[0], spec.start[1]],
        "exit": [spec.exit[0], spec.exit[1]],
        "treasures": [[x, y] for x, y in spec.treasures],
        "initialConfig": spec.initial_config.to_string(),
    }
    if not spec.preview_enabled:
        d["previewEnabled"] = False
    return d


def spec_to_json(spec: LevelSpec) -> str:
    return json.dumps(spec_to_dict(spec), indent=2) + "\n"


def _cell_from(value, what: str) -> Cell:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(v, int) and not isinstance(v, bool) for v in value)
    ):
        raise ValueError(f"{what} must be a two-integer [x, y] pair, got {value!r}")
    return (value[0], value[1])


def spec_from_dict(data: dict) -> LevelSpec:
    """Parse and fully validate a level description."""
    if not isinstance(data, dict):
        raise ValueError("level spec must be a JSON object")
    allowed = {"base", "levers", "start", "exit", "treasures", "initialConfig", "previewEnabled"}
    unknown = set(data) - allowed
    if unknown:
        raise ValueError(f"unknown level spec keys: {sorted(unknown)}")
    try:
        b = data["base"]
        base = GenParams(
            seed=b["seed"],
            width=b["width"],
            height=b["height"],
            irc=b["irc"],
            noi=b["noi"],
            rule=CaRule(block_threshold=b.get("blockThreshold", 5)),
        )
        levers = tuple(
            Lever(
                id=lv["id"],
                cell=_cell_from(lv["cell"], "lever cell"),
                axis=lv["axis"],
                delta=lv["delta"],
            )
            for lv in data.get("levers", [])
        )
        start = _cell_from(data["start"], "start")
        exit_ = _cell_from(data["exit"], "exit")
        treasures = tuple(_cell_from(t, "treasure") for t in data.get("treasures", []))
        config_text = data.get("initialConfig")
        initial = (
            LeverConfig.from_string(config_text)
            if config_text is not None
            else LeverConfig.all_left(len(levers))
        )
        preview = data.get("previewEnabled", True)
        if not isinstance(preview, bool):
            raise ValueError("previewEnabled must be a boolean")
    except KeyError as exc:
        raise ValueError(f"missing level spec key: {exc.args[0]}") from None
    except TypeError as exc:
        raise ValueError(f"malformed level spec: {exc}") from None
    return LevelSpec(
        base=base,
        levers=levers,
        start=start,
        exit=exit_,
        treasures=treasures,
        initial_config=initial,
        preview_enabled=preview,
    )


def spec_from_json(text: str) -> LevelSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid JSON: {exc}") from None
    return spec_from_dict(data)


def format_level(spec: LevelSpec, config: LeverConfig | None = None) -> str:
    """Annotated grid text: the realized map with S/E/L/T overlays.

    Overlays are drawn on OPEN cells only (a buried treasure stays '#'),
    with precedence S > E > L > T when cells coincide. The header shows
    the effective parameters for the rendered configuration.
    """
    if config is None:
        config = spec.initial_config
    grid = realize(spec, config)
    eff = effective_params(spec, config)
    lines = format_grid(grid, eff).splitlines()
    rows = [list(line) for line in lines[1:]]
    for x, y in spec.treasures:
        if not grid.is_block(x, y):
            rows[y][x] = "T"
    for lv in spec.levers:
        x, y = lv.cell
        rows[y][x] = "L"
    ex, ey = spec.exit
    rows[ey][ex] = "E"
    sx, sy = spec.start
    rows[sy][sx] = "S"
    return "\n".join([lines[0]] + ["".join(r) for r in rows]) + "\n"
