"""Analyzer semantics: hand-enumerated state graphs, dual-route agreement
on randomized levels, placement guarantees, and sweep metrics."""
from __future__ import annotations

import random
from collections import deque

import pytest

from tomeria.ca import CaRule, GenParams
from tomeria.errors import CapacityError, PlacementFailure
from tomeria.levels import (
    AXIS_IRC,
    AXIS_NOI,
    Lever,
    LeverConfig,
    LevelSpec,
    flip,
    move,
    new_game,
    realize,
)
from tomeria.analysis import (
    MAX_LEVERS,
    analyze,
    brute_force_oracle,
    build_state_graph,
    default_levers,
    enumerate_configs,
    expressive_sweep,
    path_moves,
    place_objectives,
    reachable_cells,
    report_to_json,
    sweep_to_csv,
)


def naive_flood_fill(grid, origin):
    """Independent reference for reachable_cells (set-based BFS)."""
    if grid.is_block(*origin):
        return frozenset()
    seen = {origin}
    queue = deque([origin])
    while queue:
        x, y = queue.popleft()
        for nx, ny in ((x, y - 1), (x + 1, y), (x, y + 1), (x - 1, y)):
            if (nx, ny) not in seen and grid.is_open(nx, ny):
                seen.add((nx, ny))
                queue.append((nx, ny))
    return frozenset(seen)


def test_reachable_cells_matches_reference():
    rng = random.Random(4)
    for _ in range(20):
        params = GenParams(seed=rng.randrange(2**32), width=rng.randint(2, 16),
                           height=rng.randint(2, 16), irc=rng.uniform(0.3, 0.6), noi=1)
        from tomeria.ca import generate

        grid = generate(params)
        origin = (rng.randrange(params.width), rng.randrange(params.height))
        assert reachable_cells(grid, origin) == naive_flood_fill(grid, origin)


# -- hand-enumerated state graphs ------------------------------------------

def test_graph_all_open_world_with_burying_lever():
    # 5x3 world, irc=0: config L is fully open. Lever 0 at the start cell
    # pushes IRC to 1.0: config R is all-BLOCK except the three carved
    # cells, and the player's component is just the lever cell.
    base = GenParams(seed=1, width=5, height=3, irc=0.0, noi=0)
    spec = LevelSpec(
        base=base,
        levers=(Lever(id=0, cell=(0, 0), axis=AXIS_IRC, delta=1.0),),
        start=(0, 0),
        exit=(4, 2),
    )
    graph = build_state_graph(spec)
    assert len(graph.nodes) == 2
    assert graph.root.component == (0, 0)
    other = [n for n in graph.nodes if n is not graph.root][0]
    assert other.config.to_string() == "R"
    assert other.component == (0, 0)
    # the reverse edge exists: flipping back from the buried config
    assert graph.edges[(other, 0)] == graph.root
    report = analyze(spec)
    assert report.solvable and report.min_flips == 0
    assert len(report.explorable_cells) == 15  # the whole open world
    assert report.reachable_configs == 2
    assert report.explorable_fraction == 1.0


def test_graph_exit_needs_one_flip_with_exact_solution():
    # All-BLOCK base (irc=1). Carved: start (0,0), lever (1,0), exit (4,0).
    # Config L: start and lever form one component; the exit is isolated.
    # Flipping drops IRC to 0: everything opens. Canonical solution is
    # hand-checkable: E, flip 0, E, E, E.
    base = GenParams(seed=1, width=5, height=1, irc=1.0, noi=0)
    spec = LevelSpec(
        base=base,
        levers=(Lever(id=0, cell=(1, 0), axis=AXIS_IRC, delta=-1.0),),
        start=(0, 0),
        exit=(4, 0),
    )
    report = analyze(spec)
    assert report.solvable
    assert report.min_flips == 1
    assert report.solution == (
        ("move", "E"), ("flip", 0), ("move", "E"), ("move", "E"), ("move", "E"),
    )
    oracle = brute_force_oracle(spec)
    assert oracle == report  # every field, including the canonical solution


def test_unsolvable_when_exit_never_connects():
    # No levers, all-BLOCK map: exit carved but unreachable.
    base = GenParams(seed=1, width=4, height=4, irc=1.0, noi=0)
    spec = LevelSpec(base=base, levers=(), start=(0, 0), exit=(3, 3))
    report = analyze(spec)
    assert not report.solvable
    assert report.min_flips is None
    assert report.solution is None
    assert report.explorable_cells == frozenset({(0, 0)})
    assert brute_force_oracle(spec) == report


# -- randomized dual-route agreement ---------------------------------------

def random_small_spec(rng: random.Random) -> LevelSpec:
    w, h = rng.randint(6, 16), rng.randint(6, 16)
    base = GenParams(seed=rng.randrange(2**32), width=w, height=h,
                     irc=rng.uniform(0.35, 0.55), noi=rng.randint(0, 3))
    cells = [(x, y) for x in range(w) for y in range(h)]
    rng.shuffle(cells)
    lever_count = rng.randint(0, 3)
    levers = []
    for k in range(lever_count):
        if rng.random() < 0.5:
            axis, delta = AXIS_IRC, rng.choice([-0.005, 0.005, -0.01, 0.01])
        else:
            axis, delta = AXIS_NOI, rng.choice([-1, 1, 2])
        levers.append(Lever(id=k, cell=cells.pop(), axis=axis, delta=delta))
    start = cells.pop()
    exit_ = cells.pop()
    treasures = tuple(cells.pop() for _ in range(rng.randint(0, 2)))
    return LevelSpec(base=base, levers=tuple(levers), start=start, exit=exit_,
                     treasures=treasures)


def test_randomized_reports_identical_across_routes():
    rng = random.Random(20260822)
    for _ in range(30):
        spec = random_small_spec(rng)
        a = analyze(spec)
        b = brute_force_oracle(spec)
        assert a == b
        assert report_to_json(a) == report_to_json(b)


def test_solution_replays_to_completion():
    rng = random.Random(99)
    replayed = 0
    while replayed < 10:
        spec = random_small_spec(rng)
        report = analyze(spec)
        if not report.solvable:
            continue
        state = new_game(spec)
        flips = 0
        for op, arg in report.solution:
            if op == "move":
                state = move(state, arg)
            else:
                state = flip(state, arg)
                flips += 1
        assert state.complete
        assert flips == report.min_flips
        replayed += 1


# -- configuration enumeration ---------------------------------------------

def test_enumerate_configs_counts_and_sharing():
    base = GenParams(seed=11, width=8, height=8, irc=0.45, noi=1)
    spec = LevelSpec(
        base=base,
        levers=(
            Lever(id=0, cell=(1, 1), axis=AXIS_IRC, delta=-0.005),
            Lever(id=1, cell=(6, 6), axis=AXIS_IRC, delta=-0.005),
        ),
        start=(0, 0),
        exit=(7, 7),
    )
    grids = enumerate_configs(spec)
    assert len(grids) == 4
    rl = grids[LeverConfig.from_string("RL")]
    lr = grids[LeverConfig.from_string("LR")]
    assert rl is lr  # same effective params -> one shared grid object


def test_lever_capacity_enforced():
    base = GenParams(seed=1, width=30, height=30, irc=0.0, noi=0)
    levers = tuple(
        Lever(id=k, cell=(k, 0), axis=AXIS_IRC, delta=-0.005)
        for k in range(MAX_LEVERS + 1)
    )
    spec = LevelSpec(base=base, levers=levers, start=(0, 1), exit=(29, 29))
    with pytest.raises(CapacityError):
        enumerate_configs(spec)
    with pytest.raises(CapacityError):
        analyze(spec)
    with pytest.raises(CapacityError):
        brute_force_oracle(spec)


# -- placement --------------------------------------------------------------

def test_place_objectives_meets_floor_and_is_deterministic():
    base = GenParams(seed=5, width=24, height=16, irc=0.45, noi=2)
    suite = default_levers(base, 4)
    spec1 = place_objectives(base, suite, min_flips_at_least=1, treasure_count=2)
    spec2 = place_objectives(base, suite, min_flips_at_least=1, treasure_count=2)
    assert spec1 == spec2
    report = analyze(spec1)
    assert report.solvable and report.min_flips >= 1
    assert all(ok for _t, ok in report.treasure_reachability)
    assert len(spec1.treasures) == 2


def test_place_objectives_auto_start_is_largest_component_root():
    from tomeria.ca import generate
    from scipy import ndimage
    import numpy as np

    base = GenParams(seed=5, width=24, height=16, irc=0.45, noi=2)
    spec = place_objectives(base, default_levers(base, 2))
    grid = generate(base)
    labels, _ = ndimage.label(~grid.blocks, structure=np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]]))
    sizes = np.bincount(labels.ravel())
    sizes[0] = 0
    best = int(np.argmax(sizes))
    ys, xs = np.nonzero(labels == best)
    cells = sorted(zip(xs.tolist(), ys.tolist()), key=lambda c: (c[1], c[0]))
    assert spec.start == cells[0]


def test_place_objectives_failure_is_clean():
    base = GenParams(seed=5, width=12, height=10, irc=0.45, noi=2)
    with pytest.raises(PlacementFailure):
        place_objectives(base, default_levers(base, 2), min_flips_at_least=50)


def test_default_levers_distinct_and_in_bounds():
    base = GenParams(seed=9, width=20, height=12, irc=0.45, noi=2)
    suite = default_levers(base, 6)
    cells = [lv.cell for lv in suite]
    assert len(set(cells)) == 6
    assert all(0 <= x < 20 and 0 <= y < 12 for x, y in cells)
    assert [lv.id for lv in suite] == list(range(6))


# -- path helper ------------------------------------------------------------

def test_path_moves_canonical_order():
    base = GenParams(seed=1, width=3, height=3, irc=0.0, noi=0)
    spec = LevelSpec(base=base, levers=(), start=(0, 0), exit=(2, 2))
    grid = realize(spec, spec.initial_config)
    # N-E-S-W expansion order makes the east-first staircase canonical.
    assert path_moves(grid, (0, 0), (2, 2)) == ["E", "E", "S", "S"]
    assert path_moves(grid, (1, 1), (1, 1)) == []
    with pytest.raises(ValueError):
        blocked = realize(
            LevelSpec(base=GenParams(seed=1, width=3, height=1, irc=1.0, noi=0),
                      levers=(), start=(0, 0), exit=(2, 0)),
            LeverConfig.all_left(0),
        )
        path_moves(blocked, (0, 0), (2, 0))


# -- sweep ------------------------------------------------------------------

def test_sweep_shape_and_csv_format():
    rows = expressive_sweep(16, 12, [0.40, 0.45], [0, 1], seeds=5)
    assert len(rows) == 4
    assert [(r.irc, r.noi) for r in rows] == [(0.40, 0), (0.40, 1), (0.45, 0), (0.45, 1)]
    for r in rows:
        assert 0.0 <= r.density <= 1.0
        assert r.boundary_pairs >= 0.0
        assert 0.0 <= r.largest_component_fraction <= 1.0
    csv = sweep_to_csv(rows)
    lines = csv.splitlines()
    assert lines[0] == "irc,noi,density,boundary_pairs,largest_component_fraction"
    assert len(lines) == 5
    assert lines[1].startswith("0.400000,0,")
    assert csv == sweep_to_csv(expressive_sweep(16, 12, [0.40, 0.45], [0, 1], seeds=5))


def test_sweep_boundary_pairs_definition():
    # Independent count on one grid: noi=0, so the grid is the raw
    # threshold field; compare against a per-pair loop.
    from tomeria.ca import generate

    params = GenParams(seed=1, width=10, height=6, irc=0.5, noi=0)
    grid = generate(params)
    b = grid.blocks
    count = 0
    for y in range(6):
        for x in range(10):
            if x + 1 < 10 and b[y, x] != b[y, x + 1]:
                count += 1
            if y + 1 < 6 and b[y, x] != b[y + 1, x]:
                count += 1
    rows = expressive_sweep(10, 6, [0.5], [0], seeds=1)
    assert rows[0].boundary_pairs == float(count)
