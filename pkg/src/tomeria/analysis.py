"""Design-time analysis of lever worlds.

The playable "meaning" of a level is a graph whose nodes are (lever
configuration, connected component) pairs: the player occupies one node,
walking moves freely within a node, and throwing a reachable lever is an
edge to another node. Everything the workbench reports — solvability,
minimum flips, explorable area, treasure reachability — is a property of
this graph, computed by breadth-first closure from the initial state.

A brute-force oracle that searches raw (configuration, cell) states with
no component abstraction is kept alongside the graph route; the two are
required to agree exactly, which guards the abstraction itself.
"""
from __future__ import annotations

import json
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import ndimage

from .ca import CaRule, GenParams, Grid, generate, generate_from_field, random_field
from .errors import CapacityError, PlacementFailure
from .levels import (
    AXIS_IRC,
    Cell,
    DIRECTION_ORDER,
    DIRECTIONS,
    IRC_STEP,
    Lever,
    LeverConfig,
    LevelSpec,
    effective_params,
    realize,
    to_micro,
)

MAX_LEVERS = 16

_CROSS = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=np.uint8)

__all__ = [
    "MAX_LEVERS",
    "AnalysisReport",
    "StateGraph",
    "StateNode",
    "SweepCell",
    "analyze",
    "brute_force_oracle",
    "build_state_graph",
    "default_levers",
    "enumerate_configs",
    "expressive_sweep",
    "path_moves",
    "place_objectives",
    "reachable_cells",
    "report_to_dict",
    "report_to_json",
    "sweep_to_csv",
]


def reachable_cells(grid: Grid, origin: Cell) -> frozenset[Cell]:
    """Open cells connected to `origin` by 4-neighbor steps (flood fill).

    Returns the empty set if the origin itself is blocked.
    """
    x0, y0 = origin
    if grid.is_block(x0, y0):
        return frozenset()
    seen = {origin}
    queue = deque([origin])
    while queue:
        x, y = queue.popleft()
        for d in DIRECTION_ORDER:
            dx, dy = DIRECTIONS[d]
            nxt = (x + dx, y + dy)
            if nxt not in seen and grid.is_open(*nxt):
                seen.add(nxt)
                queue.append(nxt)
    return frozenset(seen)


def path_moves(grid: Grid, src: Cell, dst: Cell) -> list[str]:
    """Shortest move sequence from `src` to `dst` inside one grid.

    Breadth-first with the fixed N, E, S, W expansion order, so the path
    for a given grid is canonical. Raises ValueError if unreachable.
    """
    if src == dst:
        return []
    parent: dict[Cell, tuple[Cell, str]] = {src: (src, "")}
    queue = deque([src])
    while queue:
        cell = queue.popleft()
        for d in DIRECTION_ORDER:
            dx, dy = DIRECTIONS[d]
            nxt = (cell[0] + dx, cell[1] + dy)
            if nxt in parent or not grid.is_open(*nxt):
                continue
            parent[nxt] = (cell, d)
            if nxt == dst:
                moves: list[str] = []
                cur = dst
                while cur != src:
                    cur, step = parent[cur]
                    moves.append(step)
                moves.reverse()
                return moves
            queue.append(nxt)
    raise ValueError(f"no path from {src} to {dst}")


# ---------------------------------------------------------------------------
# Component labeling (cached per distinct effective parameters)

def _labels_for(spec: LevelSpec, config: LeverConfig):
    eff = effective_params(spec, config)
    return _label_grid(spec, to_micro(eff.irc), eff.noi)


@lru_cache(maxsize=4096)
def _label_grid(spec: LevelSpec, irc_micro: int, noi: int):
    """Label the realized grid's open components: (labels, roots).

    `labels[y, x]` is 0 for BLOCK, else a component id; `roots` maps each
    id to its smallest row-major cell, the canonical component identity.
    """
    from .levels import _realize_cached

    grid = _realize_cached(spec, irc_micro, noi)
    labels, count = ndimage.label(~grid.blocks, structure=_CROSS)
    w = grid.width
    flat = labels.ravel()
    uniq, first = np.unique(flat, return_index=True)
    roots: dict[int, Cell] = {}
    for lab, idx in zip(uniq.tolist(), first.tolist()):
        if lab != 0:
            roots[lab] = (idx % w, idx // w)
    return labels, roots


@dataclass(frozen=True)
class StateNode:
    """One game state up to free movement: a configuration plus the
    component the player is in, identified by its smallest row-major cell."""

    config: LeverConfig
    component: Cell


@dataclass
class StateGraph:
    root: StateNode
    nodes: list[StateNode]
    edges: dict[tuple[StateNode, int], StateNode]
    dist: dict[StateNode, int]
    parents: dict[StateNode, tuple[StateNode, int] | None]


def _check_lever_capacity(spec: LevelSpec) -> None:
    if len(spec.levers) > MAX_LEVERS:
        raise CapacityError(
            f"analysis supports at most {MAX_LEVERS} levers, got {len(spec.levers)}"
        )


def build_state_graph(spec: LevelSpec) -> StateGraph:
    """Breadth-first closure of (config, component) states from the start.

    Every edge (node, lever) -> target has its reverse present, because a
    lever's cell is carved OPEN in every configuration: whoever threw it
    can always throw it back.
    """
    _check_lever_capacity(spec)
    labels0, roots0 = _labels_for(spec, spec.initial_config)
    sx, sy = spec.start
    root = StateNode(spec.initial_config, roots0[int(labels0[sy, sx])])
    nodes = [root]
    dist = {root: 0}
    parents: dict[StateNode, tuple[StateNode, int] | None] = {root: None}
    edges: dict[tuple[StateNode, int], StateNode] = {}
    queue = deque([root])
    while queue:
        node = queue.popleft()
        labels, _roots = _labels_for(spec, node.config)
        cx, cy = node.component
        lab = int(labels[cy, cx])
        for k, lever in enumerate(spec.levers):
            lx, ly = lever.cell
            if int(labels[ly, lx]) != lab:
                continue
            nconfig = node.config.toggled(k)
            nlabels, nroots = _labels_for(spec, nconfig)
            target = StateNode(nconfig, nroots[int(nlabels[ly, lx])])
            edges[(node, k)] = target
            if target not in dist:
                dist[target] = dist[node] + 1
                parents[target] = (node, k)
                nodes.append(target)
                queue.append(target)
    return StateGraph(root=root, nodes=nodes, edges=edges, dist=dist, parents=parents)


def enumerate_configs(spec: LevelSpec) -> dict[LeverConfig, Grid]:
    """Realized grid for every lever configuration, in integer order
    (lever 0 is the low bit). Distinct configurations that collapse to
    the same effective parameters share one grid object."""
    _check_lever_capacity(spec)
    count = len(spec.levers)
    out: dict[LeverConfig, Grid] = {}
    for ci in range(1 << count):
        config = LeverConfig(tuple(bool((ci >> i) & 1) for i in range(count)))
        out[config] = realize(spec, config)
    return out


@dataclass(frozen=True)
class AnalysisReport:
    """Everything the workbench asserts about one level."""

    solvable: bool
    min_flips: int | None
    explorable_cells: frozenset[Cell]
    explorable_fraction: float
    reachable_configs: int
    treasure_reachability: tuple[tuple[Cell, bool], ...]
    solution: tuple[tuple[str, int | str], ...] | None
    open_union_count: int
    area_fraction: float


def _exit_nodes(spec: LevelSpec, graph: StateGraph) -> list[StateNode]:
    ex, ey = spec.exit
    found = []
    for node in graph.nodes:
        labels, _ = _labels_for(spec, node.config)
        cx, cy = node.component
        if int(labels[ey, ex]) == int(labels[cy, cx]):
            found.append(node)
    return found


def _graph_solution(spec: LevelSpec, graph: StateGraph,
                    exit_nodes: list[StateNode]) -> tuple[tuple[str, int | str], ...]:
    """Canonical solution: lexicographically-smallest minimal flip-id
    sequence, with canonical per-grid move paths between flips."""
    adj: dict[StateNode, list[tuple[int, StateNode]]] = {n: [] for n in graph.nodes}
    for (node, k), target in graph.edges.items():
        adj[node].append((k, target))
    for lst in adj.values():
        lst.sort()
    rdist: dict[StateNode, int] = {n: 0 for n in exit_nodes}
    queue = deque(exit_nodes)
    while queue:
        node = queue.popleft()
        for _k, target in adj[node]:
            if target not in rdist:
                rdist[target] = rdist[node] + 1
                queue.append(target)
    actions: list[tuple[str, int | str]] = []
    cur = graph.root
    player = spec.start
    grid = realize(spec, cur.config)
    while rdist[cur] > 0:
        for k, target in adj[cur]:
            if rdist.get(target, -1) == rdist[cur] - 1:
                lever_cell = spec.levers[k].cell
                for step in path_moves(grid, player, lever_cell):
                    actions.append(("move", step))
                actions.append(("flip", k))
                player = lever_cell
                cur = target
                grid = realize(spec, cur.config)
                break
        else:  # pragma: no cover - rdist guarantees a downhill edge
            raise AssertionError("no downhill edge from a node with positive rdist")
    for step in path_moves(grid, player, spec.exit):
        actions.append(("move", step))
    return tuple(actions)


def _warm_label_cache(spec: LevelSpec, jobs: int) -> None:
    """Realize and label every distinct effective-parameter grid in a
    thread pool. numpy and scipy release the GIL for the heavy array
    work, so grids materialize concurrently; the graph traversal that
    follows then runs entirely against warm caches."""
    _check_lever_capacity(spec)
    count = len(spec.levers)
    distinct: set[tuple[int, int]] = set()
    for ci in range(1 << count):
        config = LeverConfig(tuple(bool((ci >> i) & 1) for i in range(count)))
        eff = effective_params(spec, config)
        distinct.add((to_micro(eff.irc), eff.noi))
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        for future in [
            pool.submit(_label_grid, spec, micro, noi)
            for micro, noi in sorted(distinct)
        ]:
            future.result()


def analyze(spec: LevelSpec, jobs: int = 1) -> AnalysisReport:
    """Full graph-route analysis of one level.

    `jobs` > 1 parallelizes the per-configuration grid realization and
    component labeling; the result is identical to the sequential run.
    """
    if jobs > 1:
        _warm_label_cache(spec, jobs)
    graph = build_state_graph(spec)
    h, w = spec.base.height, spec.base.width
    explorable_mask = np.zeros((h, w), dtype=bool)
    open_mask = np.zeros((h, w), dtype=bool)
    seen_components: set[tuple[int, int, int]] = set()
    seen_grids: set[tuple[int, int]] = set()
    for node in graph.nodes:
        eff = effective_params(spec, node.config)
        key = (to_micro(eff.irc), eff.noi)
        labels, _ = _labels_for(spec, node.config)
        cx, cy = node.component
        lab = int(labels[cy, cx])
        if key + (lab,) not in seen_components:
            seen_components.add(key + (lab,))
            explorable_mask |= labels == lab
        if key not in seen_grids:
            seen_grids.add(key)
            open_mask |= labels != 0
    explorable_count = int(explorable_mask.sum())
    open_union_count = int(open_mask.sum())
    ys, xs = np.nonzero(explorable_mask)
    explorable = frozenset((int(x), int(y)) for x, y in zip(xs, ys))
    exit_nodes = _exit_nodes(spec, graph)
    solvable = bool(exit_nodes)
    min_flips = min(graph.dist[n] for n in exit_nodes) if solvable else None
    solution = _graph_solution(spec, graph, exit_nodes) if solvable else None
    return AnalysisReport(
        solvable=solvable,
        min_flips=min_flips,
        explorable_cells=explorable,
        explorable_fraction=explorable_count / open_union_count,
        reachable_configs=len({n.config for n in graph.nodes}),
        treasure_reachability=tuple((t, t in explorable) for t in spec.treasures),
        solution=solution,
        open_union_count=open_union_count,
        area_fraction=explorable_count / (w * h),
    )


# ---------------------------------------------------------------------------
# Brute-force oracle: raw (configuration, cell) search, no abstraction.

def brute_force_oracle(spec: LevelSpec) -> AnalysisReport:
    """Independent ground truth for `analyze`.

    Searches raw states (configuration bitmask, player cell) where moves
    cost nothing and flips cost one, using a 0-1 BFS. Shares only the
    grid generator and the canonical move-path helper with the graph
    route; solvability, flip counts, explorable cells, configuration
    counts, and treasure reachability are all re-derived from scratch.
    """
    _check_lever_capacity(spec)
    count = len(spec.levers)
    lever_at: dict[Cell, int] = {lv.cell: k for k, lv in enumerate(spec.levers)}

    def config_of(ci: int) -> LeverConfig:
        return LeverConfig(tuple(bool((ci >> i) & 1) for i in range(count)))

    grids: dict[int, Grid] = {}

    def grid_of(ci: int) -> Grid:
        if ci not in grids:
            grids[ci] = realize(spec, config_of(ci))
        return grids[ci]

    init = 0
    for i, on in enumerate(spec.initial_config.states):
        if on:
            init |= 1 << i
    start_state = (init, spec.start)
    dist: dict[tuple[int, Cell], int] = {start_state: 0}
    queue: deque[tuple[int, tuple[int, Cell]]] = deque([(0, start_state)])
    while queue:
        d, state = queue.popleft()
        if d > dist[state]:
            continue
        ci, (x, y) = state
        grid = grid_of(ci)
        for dname in DIRECTION_ORDER:
            dx, dy = DIRECTIONS[dname]
            nxt = (x + dx, y + dy)
            if grid.is_open(*nxt):
                ns = (ci, nxt)
                if d < dist.get(ns, math.inf):
                    dist[ns] = d
                    queue.appendleft((d, ns))
        k = lever_at.get((x, y))
        if k is not None:
            ns = (ci ^ (1 << k), (x, y))
            if d + 1 < dist.get(ns, math.inf):
                dist[ns] = d + 1
                queue.append((d + 1, ns))

    explorable = frozenset(cell for _ci, cell in dist)
    configs_seen = sorted({ci for ci, _cell in dist})
    h, w = spec.base.height, spec.base.width
    open_mask = np.zeros((h, w), dtype=bool)
    for ci in configs_seen:
        open_mask |= ~grid_of(ci).blocks
    open_union_count = int(open_mask.sum())
    exit_cell = spec.exit
    exit_dists = [dist[(ci, exit_cell)] for ci in configs_seen if (ci, exit_cell) in dist]
    solvable = bool(exit_dists)
    min_flips = min(exit_dists) if solvable else None
    solution = (
        _oracle_solution(spec, init, dist, grid_of, min_flips) if solvable else None
    )
    return AnalysisReport(
        solvable=solvable,
        min_flips=min_flips,
        explorable_cells=explorable,
        explorable_fraction=len(explorable) / open_union_count,
        reachable_configs=len(configs_seen),
        treasure_reachability=tuple((t, t in explorable) for t in spec.treasures),
        solution=solution,
        open_union_count=open_union_count,
        area_fraction=len(explorable) / (w * h),
    )


def _oracle_solution(spec, init: int, dist, grid_of, min_flips: int):
    """Canonical solution derived from the raw state space.

    Backward 0-1 BFS from every reachable exit state gives each state
    its flips-to-exit; the walk then greedily takes the smallest lever
    id that moves strictly closer. This mirrors the graph route's
    lex-minimal choice without sharing its structures.
    """
    exit_cell = spec.exit
    lever_at = {lv.cell: k for k, lv in enumerate(spec.levers)}
    rdist: dict[tuple[int, Cell], int] = {}
    queue: deque[tuple[int, tuple[int, Cell]]] = deque()
    for state, _d in dist.items():
        if state[1] == exit_cell:
            rdist[state] = 0
            queue.append((0, state))
    while queue:
        d, state = queue.popleft()
        if d > rdist[state]:
            continue
        ci, (x, y) = state
        grid = grid_of(ci)
        for dname in DIRECTION_ORDER:
            dx, dy = DIRECTIONS[dname]
            nxt = (x + dx, y + dy)
            ns = (ci, nxt)
            if ns in dist and grid.is_open(*nxt) and d < rdist.get(ns, math.inf):
                rdist[ns] = d
                queue.appendleft((d, ns))
        k = lever_at.get((x, y))
        if k is not None:
            ns = (ci ^ (1 << k), (x, y))
            if ns in dist and d + 1 < rdist.get(ns, math.inf):
                rdist[ns] = d + 1
                queue.append((d + 1, ns))
    assert rdist[(init, spec.start)] == min_flips
    actions: list[tuple[str, int | str]] = []
    ci, player = init, spec.start
    while rdist[(ci, player)] > 0:
        grid = grid_of(ci)
        closure = reachable_cells(grid, player)
        remaining = rdist[(ci, player)]
        chosen: tuple[int, Cell] | None = None
        for k, lever in enumerate(spec.levers):
            if lever.cell in closure and rdist.get((ci ^ (1 << k), lever.cell)) == remaining - 1:
                chosen = (k, lever.cell)
                break
        assert chosen is not None
        k, cell = chosen
        for step in path_moves(grid, player, cell):
            actions.append(("move", step))
        actions.append(("flip", k))
        player = cell
        ci ^= 1 << k
    for step in path_moves(grid_of(ci), player, exit_cell):
        actions.append(("move", step))
    return tuple(actions)


# ---------------------------------------------------------------------------
# Objective placement

def default_levers(base: GenParams, count: int, *, axis: str = AXIS_IRC,
                   delta: float = -IRC_STEP) -> tuple[Lever, ...]:
    """A spread-out lever suite for design sweeps.

    Anchors an evenly spaced grid of points over the map and snaps each
    to the nearest unused open cell of the base grid (any unused cell as
    a fallback — lever cells are carved OPEN regardless). The default
    axis/delta lowers IRC by one step per lever, which monotonically
    opens space as levers are thrown.
    """
    if count < 0:
        raise ValueError("lever count must be >= 0")
    grid0 = generate(base)
    w, h = base.width, base.height
    if count > w * h:
        raise ValueError(f"cannot place {count} levers on a {w}x{h} grid")
    cols = max(1, math.ceil(math.sqrt(count)))
    rows = max(1, math.ceil(count / cols))
    used: set[Cell] = set()
    levers = []
    for k in range(count):
        ax = int((k % cols + 0.5) * w / cols)
        ay = int((k // cols + 0.5) * h / rows)
        ax, ay = min(ax, w - 1), min(ay, h - 1)
        cell = _nearest_unused_open(grid0, (ax, ay), used)
        used.add(cell)
        levers.append(Lever(id=k, cell=cell, axis=axis, delta=delta))
    return tuple(levers)


def _nearest_unused_open(grid: Grid, anchor: Cell, used: set[Cell]) -> Cell:
    ax, ay = anchor
    w, h = grid.width, grid.height
    fallback: Cell | None = None
    for r in range(max(w, h)):
        ring = []
        for y in range(max(0, ay - r), min(h, ay + r + 1)):
            for x in range(max(0, ax - r), min(w, ax + r + 1)):
                if max(abs(x - ax), abs(y - ay)) == r and (x, y) not in used:
                    ring.append((x, y))
        ring.sort(key=lambda c: (c[1], c[0]))
        for cell in ring:
            if grid.is_open(*cell):
                return cell
        if fallback is None and ring:
            fallback = ring[0]
    if fallback is None:  # every cell already used
        raise PlacementFailure("no free cell for a lever")
    return fallback


def place_objectives(base: GenParams, levers: tuple[Lever, ...], *,
                     start: Cell | None = None, min_flips_at_least: int = 0,
                     treasure_count: int = 0,
                     max_exit_candidates: int = 128) -> LevelSpec:
    """Pick start, exit, and treasures so the level meets design targets.

    The start (when not given) is the smallest row-major open cell of
    the base grid's largest component. The exit maximizes the flips
    needed to reach it, subject to the `min_flips_at_least` floor; ties
    prefer cells farther (shortest-path) from their component's entry
    point, then smaller row-major order. Treasures prefer cells that
    need at least one flip, padded from the start component. Every
    candidate level is re-verified with `analyze` before being returned,
    because carving the exit open can change connectivity.
    """
    grid0 = generate(base)
    if start is None:
        start = _auto_start(grid0)
        if start is None:
            raise PlacementFailure("base grid has no open cells")
    probe = LevelSpec(base=base, levers=levers, start=start, exit=start)
    graph = build_state_graph(probe)
    cell_flips: dict[Cell, int] = {}
    entry_dist: dict[Cell, int] = {}
    for node in graph.nodes:
        labels, _ = _labels_for(probe, node.config)
        cx, cy = node.component
        lab = int(labels[cy, cx])
        parent = graph.parents[node]
        entry = start if parent is None else probe.levers[parent[1]].cell
        grid = realize(probe, node.config)
        dists = _bfs_distances(grid, entry)
        ys, xs = np.nonzero(labels == lab)
        for x, y in zip(xs.tolist(), ys.tolist()):
            cell = (x, y)
            if cell not in cell_flips:
                cell_flips[cell] = graph.dist[node]
                entry_dist[cell] = dists[cell]
    w = base.width
    candidates = [c for c, f in cell_flips.items() if f >= min_flips_at_least]
    candidates.sort(key=lambda c: (-cell_flips[c], -entry_dist[c], c[1] * w + c[0]))
    lever_cells = set(lv.cell for lv in levers)
    for exit_cell in candidates[:max_exit_candidates]:
        pool = [
            c
            for c in sorted(cell_flips, key=lambda c: (-cell_flips[c], c[1] * w + c[0]))
            if c not in lever_cells and c != start and c != exit_cell
        ]
        if len(pool) < treasure_count:
            continue
        candidate = LevelSpec(
            base=base,
            levers=levers,
            start=start,
            exit=exit_cell,
            treasures=tuple(pool[:treasure_count]),
        )
        report = analyze(candidate)
        if (
            report.solvable
            and report.min_flips is not None
            and report.min_flips >= min_flips_at_least
            and all(ok for _t, ok in report.treasure_reachability)
        ):
            return candidate
    raise PlacementFailure(
        f"no exit placement reaches min flips >= {min_flips_at_least} "
        f"for seed {base.seed}; try another seed or more levers"
    )


def _auto_start(grid: Grid) -> Cell | None:
    labels, count = ndimage.label(~grid.blocks, structure=_CROSS)
    if count == 0:
        return None
    sizes = np.bincount(labels.ravel())
    sizes[0] = 0
    best = int(np.argmax(sizes))  # ties: argmax takes the first, i.e. smallest label,
    # and smaller labels are discovered in row-major order
    idx = int(np.argmax(labels.ravel() == best))
    return (idx % grid.width, idx // grid.width)


def _bfs_distances(grid: Grid, origin: Cell) -> dict[Cell, int]:
    out = {origin: 0}
    queue = deque([origin])
    while queue:
        x, y = queue.popleft()
        for d in DIRECTION_ORDER:
            dx, dy = DIRECTIONS[d]
            nxt = (x + dx, y + dy)
            if nxt not in out and grid.is_open(*nxt):
                out[nxt] = out[(x, y)] + 1
                queue.append(nxt)
    return out


# ---------------------------------------------------------------------------
# Expressive-range sweep

@dataclass(frozen=True)
class SweepCell:
    """Mean metrics for one (irc, noi) parameter point."""

    irc: float
    noi: int
    density: float
    boundary_pairs: float
    largest_component_fraction: float


def expressive_sweep(width: int, height: int, ircs: list[float], nois: list[int],
                     seeds: int, rule=None) -> list[SweepCell]:
    """Metric means over seeds 1..`seeds` for every (irc, noi) pair.

    density: fraction of BLOCK cells. boundary_pairs: orthogonally
    adjacent cell pairs whose states differ (a roughness measure).
    largest_component_fraction: largest open component over all open
    cells (0 when the grid has no open cell). Rows iterate irc outer,
    noi inner.
    """
    if rule is None:
        rule = CaRule()
    if seeds < 1:
        raise ValueError("seeds must be >= 1")
    sums = {(i, n): [0.0, 0.0, 0.0] for i in range(len(ircs)) for n in range(len(nois))}
    for seed in range(1, seeds + 1):
        field = random_field(seed, width, height)
        for i, irc in enumerate(ircs):
            for n, noi in enumerate(nois):
                grid = generate_from_field(field, irc, noi, rule)
                b = grid.blocks
                acc = sums[(i, n)]
                acc[0] += float(b.mean())
                acc[1] += float(
                    np.count_nonzero(b[:, 1:] != b[:, :-1])
                    + np.count_nonzero(b[1:, :] != b[:-1, :])
                )
                open_count = b.size - int(np.count_nonzero(b))
                if open_count:
                    labels, count = ndimage.label(~b, structure=_CROSS)
                    largest = int(np.bincount(labels.ravel())[1:].max())
                    acc[2] += largest / open_count
    out = []
    for i, irc in enumerate(ircs):
        for n, noi in enumerate(nois):
            acc = sums[(i, n)]
            out.append(
                SweepCell(
                    irc=irc,
                    noi=noi,
                    density=acc[0] / seeds,
                    boundary_pairs=acc[1] / seeds,
                    largest_component_fraction=acc[2] / seeds,
                )
            )
    return out


def sweep_to_csv(rows: list[SweepCell]) -> str:
    lines = ["irc,noi,density,boundary_pairs,largest_component_fraction"]
    for r in rows:
        lines.append(
            f"{r.irc:.6f},{r.noi},{r.density:.6f},{r.boundary_pairs:.6f},"
            f"{r.largest_component_fraction:.6f}"
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Report serialization

def report_to_dict(report: AnalysisReport) -> dict:
    """Canonical report JSON (stable key order)."""
    return {
        "solvable": report.solvable,
        "minFlips": report.min_flips,
        "explorableFraction": report.explorable_fraction,
        "reachableConfigs": report.reachable_configs,
        "treasures": [
            {"cell": [x, y], "reachable": ok} for (x, y), ok in report.treasure_reachability
        ],
        "solution": (
            None
            if report.solution is None
            else [{"op": op, "arg": arg} for op, arg in report.solution]
        ),
    }


def report_to_json(report: AnalysisReport) -> str:
    return json.dumps(report_to_dict(report), indent=2) + "\n"
