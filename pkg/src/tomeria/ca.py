"""Cave generation: seeded random field, threshold, cellular-automaton smoothing.

A level is generated in three stages: a deterministic random field is
drawn for the seed, cells whose value falls below the initial random
chance (IRC) start as BLOCK, and then a fixed number of iterations (NOI)
of a majority-style smoothing rule are applied. Out-of-bounds cells
always count as BLOCK, which biases the rule toward walled map borders.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .prng import unit_floats

BLOCK_CHAR = "#"
OPEN_CHAR = "."

__all__ = [
    "BLOCK_CHAR",
    "OPEN_CHAR",
    "CaRule",
    "GenParams",
    "Grid",
    "RandomField",
    "ca_step",
    "format_grid",
    "generate",
    "generate_from_field",
    "parse_grid",
    "random_field",
    "threshold_initial",
]


@dataclass(frozen=True)
class CaRule:
    """Smoothing rule: a cell becomes BLOCK iff its 3x3 neighborhood
    (self-inclusive, out-of-bounds counted as BLOCK) contains at least
    `block_threshold` BLOCK cells."""

    block_threshold: int = 5

    def __post_init__(self) -> None:
        if not isinstance(self.block_threshold, int) or isinstance(self.block_threshold, bool):
            raise ValueError("block_threshold must be an integer")
        if not 0 <= self.block_threshold <= 9:
            raise ValueError(f"block_threshold must be in [0, 9], got {self.block_threshold}")


@dataclass(frozen=True)
class GenParams:
    """Complete generation input: one seed plus the tunable knobs."""

    seed: int
    width: int
    height: int
    irc: float
    noi: int
    rule: CaRule = field(default_factory=CaRule)

    def __post_init__(self) -> None:
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if self.width < 1 or self.height < 1:
            raise ValueError(f"grid dimensions must be positive, got {self.width}x{self.height}")
        if not 0.0 <= self.irc <= 1.0:
            raise ValueError(f"irc must be in [0, 1], got {self.irc}")
        if self.noi < 0:
            raise ValueError(f"noi must be >= 0, got {self.noi}")


@dataclass(frozen=True, eq=False)
class RandomField:
    """Per-cell uniform values in [0, 1), row-major from the seed's stream."""

    values: NDArray[np.float64]

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise ValueError("field values must be a 2-D array")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RandomField):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash((self.values.shape, self.values.tobytes()))


@dataclass(frozen=True, eq=False)
class Grid:
    """Rectangular cave map. ``blocks[y, x]`` is True for BLOCK, False for OPEN."""

    blocks: NDArray[np.bool_]

    def __post_init__(self) -> None:
        b = np.array(self.blocks, dtype=bool)
        if b.ndim != 2:
            raise ValueError("grid blocks must be a 2-D array")
        b.setflags(write=False)
        object.__setattr__(self, "blocks", b)

    @property
    def width(self) -> int:
        return self.blocks.shape[1]

    @property
    def height(self) -> int:
        return self.blocks.shape[0]

    def in_bounds(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height

    def is_block(self, x: int, y: int) -> bool:
        """Cell state with the boundary convention: out-of-bounds is BLOCK."""
        if not self.in_bounds(x, y):
            return True
        return bool(self.blocks[y, x])

    def is_open(self, x: int, y: int) -> bool:
        return not self.is_block(x, y)

    def open_count(self) -> int:
        return int(np.count_nonzero(~self.blocks))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Grid):
            return NotImplemented
        return np.array_equal(self.blocks, other.blocks)

    def __hash__(self) -> int:
        return hash((self.blocks.shape, self.blocks.tobytes()))


def random_field(seed: int, width: int, height: int) -> RandomField:
    """Draw the width*height random field for `seed`, row-major."""
    if width < 1 or height < 1:
        raise ValueError(f"grid dimensions must be positive, got {width}x{height}")
    if not 0 <= seed < 2**64:
        raise ValueError("seed must fit in an unsigned 64-bit integer")
    return RandomField(unit_floats(seed, width * height).reshape(height, width))


def threshold_initial(field: RandomField, irc: float) -> Grid:
    """Initial map: a cell starts BLOCK iff its field value is strictly below `irc`."""
    if not 0.0 <= irc <= 1.0:
        raise ValueError(f"irc must be in [0, 1], got {irc}")
    return Grid(field.values < irc)


def ca_step(grid: Grid, rule: CaRule) -> Grid:
    """One smoothing iteration over the whole grid simultaneously."""
    h, w = grid.blocks.shape
    padded = np.pad(grid.blocks, 1, constant_values=True).astype(np.uint8)
    counts = np.zeros((h, w), dtype=np.uint8)
    for dy in range(3):
        for dx in range(3):
            counts += padded[dy : dy + h, dx : dx + w]
    return Grid(counts >= rule.block_threshold)


def generate_from_field(field: RandomField, irc: float, noi: int, rule: CaRule) -> Grid:
    """Threshold an existing field and smooth it `noi` times.

    Splitting this out of `generate` lets callers that vary only IRC/NOI
    (lever worlds, parameter sweeps) reuse one field per seed.
    """
    if noi < 0:
        raise ValueError(f"noi must be >= 0, got {noi}")
    grid = threshold_initial(field, irc)
    for _ in range(noi):
        grid = ca_step(grid, rule)
    return grid


def generate(params: GenParams) -> Grid:
    """Full pipeline: field, threshold, `params.noi` smoothing steps."""
    field = random_field(params.seed, params.width, params.height)
    return generate_from_field(field, params.irc, params.noi, params.rule)


def format_grid(grid: Grid, params: GenParams) -> str:
    """Canonical text form: one header line, then '#'/'.' rows.

    Header: ``width height seed irc noi block_threshold`` with irc at six
    decimals (the engine quantizes IRC to millionths, so this is exact).
    """
    if (grid.height, grid.width) != (params.height, params.width):
        raise ValueError("grid dimensions do not match params")
    lines = [
        f"{params.width} {params.height} {params.seed} "
        f"{params.irc:.6f} {params.noi} {params.rule.block_threshold}"
    ]
    for row in grid.blocks:
        lines.append("".join(BLOCK_CHAR if cell else OPEN_CHAR for cell in row))
    return "\n".join(lines) + "\n"


def parse_grid(text: str) -> tuple[Grid, GenParams]:
    """Inverse of `format_grid`. Raises ValueError on any malformation."""
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty grid text")
    head = lines[0].split()
    if len(head) != 6:
        raise ValueError(f"grid header must have 6 fields, got {len(head)}")
    try:
        width, height, seed = int(head[0]), int(head[1]), int(head[2])
        irc = float(head[3])
        noi, threshold = int(head[4]), int(head[5])
    except ValueError as exc:
        raise ValueError(f"bad grid header: {exc}") from None
    params = GenParams(seed=seed, width=width, height=height, irc=irc, noi=noi,
                       rule=CaRule(block_threshold=threshold))
    rows = lines[1:]
    if len(rows) != height:
        raise ValueError(f"expected {height} grid rows, got {len(rows)}")
    blocks = np.zeros((height, width), dtype=bool)
    for y, row in enumerate(rows):
        if len(row) != width:
            raise ValueError(f"row {y} has length {len(row)}, expected {width}")
        for x, ch in enumerate(row):
            if ch == BLOCK_CHAR:
                blocks[y, x] = True
            elif ch != OPEN_CHAR:
                raise ValueError(f"unexpected character {ch!r} at row {y}")
    return Grid(blocks), params
