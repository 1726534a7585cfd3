"""Branching stories with pre-generated futures and vague visions.

The whole story is a full b-ary tree generated up front from one seed,
so every possible future exists concretely before play begins. A
"vision" peeks at one branch: it uniformly samples a real node `d`
levels ahead inside that branch and reveals only a prefix of its
attributes — the farther the look, the vaguer the reveal. The player
may spend one vision per branch per decision; choosing resets the
budget and commits to a child.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CapacityError, PeekBudgetExhausted, StoryEnded
from .prng import SplitMix64

# Attribute names in vagueness order: a distant vision reveals a prefix
# of this list, so emotion comes through first and exact words last.
ATTRIBUTE_ORDER = ("emotion", "location", "timeOfDay", "companion", "dialogueLine")

EMOTIONS = (
    "hopeful", "uneasy", "elated", "wistful", "furious", "calm",
    "anxious", "curious", "defiant", "tender", "weary", "resolute",
)
LOCATIONS = (
    "the train platform", "the night market", "the river bridge",
    "the hospital ward", "the rooftop garden", "the old library",
    "the harbor front", "the motorway underpass", "the corner cafe",
    "the courthouse steps", "the fairground", "the backstage corridor",
)
TIMES_OF_DAY = (
    "at dawn", "mid-morning", "at noon", "in the afternoon",
    "at dusk", "in the evening", "at midnight", "in the small hours",
)
COMPANIONS = (
    "your sister", "an old friend", "the detective",
    "a stranger in a gray coat", "your mentor", "the landlady",
    "a runaway kid", "the night porter", "your rival", "no one at all",
)
DIALOGUE_LINES = (
    "We shouldn't be here.",
    "You came. I wasn't sure you would.",
    "There's still time to turn back.",
    "Don't look down.",
    "I kept your letter.",
    "They know. They've known for days.",
    "This changes nothing.",
    "Tell me the truth, just once.",
    "We can fix this together.",
    "I never meant for any of it.",
    "Keep your voice down.",
    "It ends tonight.",
)
CHOICE_LABELS = (
    "Run for it", "Wait and see", "Speak up", "Slip away",
    "Follow them", "Turn back", "Ask for help", "Keep quiet",
    "Make the call", "Break it open", "Hide the letter", "Face them",
)

_POOLS = (EMOTIONS, LOCATIONS, TIMES_OF_DAY, COMPANIONS, DIALOGUE_LINES)

DEFAULT_NODE_CAP = 100_000

MAX_PEEK_REVEAL = 5

__all__ = [
    "ATTRIBUTE_ORDER",
    "DEFAULT_NODE_CAP",
    "SceneAttributes",
    "StoryNode",
    "StorySession",
    "StoryTree",
    "Vision",
    "futures_count",
    "generate_story_tree",
    "new_session",
    "reveal_count",
    "tree_to_dict",
    "vision_hit_rate",
]


@dataclass(frozen=True)
class SceneAttributes:
    emotion: str
    location: str
    time_of_day: str
    companion: str
    dialogue_line: str

    def ordered_items(self) -> tuple[tuple[str, str], ...]:
        """(name, value) pairs in vagueness order."""
        return (
            ("emotion", self.emotion),
            ("location", self.location),
            ("timeOfDay", self.time_of_day),
            ("companion", self.companion),
            ("dialogueLine", self.dialogue_line),
        )

    def as_dict(self) -> dict[str, str]:
        return dict(self.ordered_items())


@dataclass(frozen=True)
class StoryNode:
    """One scene. Ids use heap numbering: children of n are n*b+1+i."""

    id: int
    depth: int
    attributes: SceneAttributes
    scene_text: str
    choice_labels: tuple[str, ...]
    children: tuple["StoryNode", ...]

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class StoryTree:
    seed: int
    branching: int
    depth: int
    root: StoryNode
    nodes_by_id: dict[int, StoryNode] = field(compare=False, repr=False, default=None)  # type: ignore[assignment]

    def node(self, node_id: int) -> StoryNode:
        return self.nodes_by_id[node_id]


def render_scene(attrs: SceneAttributes) -> str:
    return (
        f"You reach {attrs.location} {attrs.time_of_day}, "
        f"{attrs.companion} at your side. You feel {attrs.emotion}. "
        f'"{attrs.dialogue_line}"'
    )


def _attr_total() -> int:
    total = 1
    for pool in _POOLS:
        total *= len(pool)
    return total


def _combine(indices: tuple[int, ...]) -> int:
    c = 0
    for idx, pool in zip(indices, _POOLS):
        c = c * len(pool) + idx
    return c


def _split(c: int) -> tuple[int, ...]:
    out = []
    for pool in reversed(_POOLS):
        out.append(c % len(pool))
        c //= len(pool)
    return tuple(reversed(out))


def generate_story_tree(seed: int, branching: int, depth: int,
                        max_nodes: int = DEFAULT_NODE_CAP) -> StoryTree:
    """Deterministically generate the full tree for (seed, b, depth).

    Nodes are processed in id (breadth-first) order, each drawing its
    five attribute indices and, for decision nodes, its choice labels
    from one SplitMix64 stream. Siblings are forced to differ in at
    least one attribute: a colliding draw is deterministically
    linear-probed through the combined attribute space.
    """
    if branching < 2:
        raise ValueError(f"branching must be >= 2, got {branching}")
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    total_nodes = (branching ** (depth + 1) - 1) // (branching - 1)
    if total_nodes > max_nodes:
        raise CapacityError(
            f"story tree would have {total_nodes} nodes (cap {max_nodes})"
        )
    rng = SplitMix64(seed)
    attr_total = _attr_total()
    if branching > attr_total:
        raise ValueError("branching exceeds the distinct-scene space")

    attrs_by_id: dict[int, SceneAttributes] = {}
    labels_by_id: dict[int, tuple[str, ...]] = {}
    level = [0]
    for d in range(depth + 1):
        next_level = []
        for node_id in level:
            parent = (node_id - 1) // branching if node_id else None
            siblings = []
            if parent is not None:
                first = parent * branching + 1
                for sib in range(first, node_id):
                    siblings.append(_combine_attrs(attrs_by_id[sib]))
            indices = tuple(rng.randrange(len(pool)) for pool in _POOLS)
            c = _combine(indices)
            while c in siblings:
                c = (c + 1) % attr_total
            e, lo, t, co, di = _split(c)
            attrs = SceneAttributes(
                emotion=EMOTIONS[e],
                location=LOCATIONS[lo],
                time_of_day=TIMES_OF_DAY[t],
                companion=COMPANIONS[co],
                dialogue_line=DIALOGUE_LINES[di],
            )
            attrs_by_id[node_id] = attrs
            if d < depth:
                labels_by_id[node_id] = _draw_labels(rng, branching)
                first_child = node_id * branching + 1
                next_level.extend(range(first_child, first_child + branching))
        level = next_level

    by_id: dict[int, StoryNode] = {}

    def build(node_id: int, d: int) -> StoryNode:
        children = tuple(
            build(node_id * branching + 1 + i, d + 1) for i in range(branching)
        ) if d < depth else ()
        node = StoryNode(
            id=node_id,
            depth=d,
            attributes=attrs_by_id[node_id],
            scene_text=render_scene(attrs_by_id[node_id]),
            choice_labels=labels_by_id.get(node_id, ()),
            children=children,
        )
        by_id[node_id] = node
        return node

    root = build(0, 0)
    tree = StoryTree(seed=seed, branching=branching, depth=depth, root=root)
    object.__setattr__(tree, "nodes_by_id", by_id)
    return tree


def _combine_attrs(attrs: SceneAttributes) -> int:
    values = (attrs.emotion, attrs.location, attrs.time_of_day,
              attrs.companion, attrs.dialogue_line)
    return _combine(tuple(pool.index(v) for v, pool in zip(values, _POOLS)))


def _draw_labels(rng: SplitMix64, branching: int) -> tuple[str, ...]:
    if branching > len(CHOICE_LABELS):
        return tuple(f"Path {i + 1}" for i in range(branching))
    used: set[int] = set()
    out = []
    for _ in range(branching):
        idx = rng.randrange(len(CHOICE_LABELS))
        while idx in used:
            idx = (idx + 1) % len(CHOICE_LABELS)
        used.add(idx)
        out.append(CHOICE_LABELS[idx])
    return tuple(out)


def futures_count(branching: int, d: int) -> int:
    """Number of concrete futures a depth-`d` vision samples from."""
    if d < 1:
        raise ValueError(f"vision depth must be >= 1, got {d}")
    return branching ** (d - 1)


def reveal_count(d: int) -> int:
    """How many attributes a depth-`d` vision reveals: nearer is clearer.

    One attribute at d <= 2, then one more per level, capped at the full
    attribute count.
    """
    if d < 1:
        raise ValueError(f"vision depth must be >= 1, got {d}")
    return min(max(1, d - 1), MAX_PEEK_REVEAL)


@dataclass(frozen=True)
class Vision:
    """The vague glimpse returned by a peek: a real future, truncated."""

    choice: int
    depth: int
    futures_count: int
    revealed: tuple[tuple[str, str], ...]
    node_id: int

    def revealed_dict(self) -> dict[str, str]:
        return dict(self.revealed)


class StorySession:
    """Mutable play state over a frozen tree.

    One vision may be spent per branch per decision; the budget resets
    when a choice is made. Vision sampling consumes the session PRNG, so
    a session seed makes every peek reproducible.
    """

    def __init__(self, tree: StoryTree, session_seed: int) -> None:
        self.tree = tree
        self.session_seed = session_seed
        self.rng = SplitMix64(session_seed)
        self.current = tree.root
        self.peeked: set[int] = set()
        self.log: list[str] = []
        self.path: list[int] = []

    @property
    def ended(self) -> bool:
        return self.current.is_leaf

    @property
    def remaining_depth(self) -> int:
        return self.tree.depth - self.current.depth

    def peek(self, choice: int, d: int) -> Vision:
        """Spend this decision's vision for branch `choice`, looking `d` deep."""
        if self.ended:
            raise StoryEnded("the story has ended; there is nothing to peek at")
        if not 0 <= choice < self.tree.branching:
            raise ValueError(f"choice must be in [0, {self.tree.branching}), got {choice}")
        if not 1 <= d <= self.remaining_depth:
            raise ValueError(
                f"vision depth must be in [1, {self.remaining_depth}], got {d}"
            )
        if choice in self.peeked:
            raise PeekBudgetExhausted(
                f"branch {choice} was already peeked this decision"
            )
        n = futures_count(self.tree.branching, d)
        pick = self.rng.randrange(n)
        node = self.current.children[choice]
        digits = []
        for _ in range(d - 1):
            digits.append(pick % self.tree.branching)
            pick //= self.tree.branching
        for digit in reversed(digits):
            node = node.children[digit]
        k = reveal_count(d)
        vision = Vision(
            choice=choice,
            depth=d,
            futures_count=n,
            revealed=node.attributes.ordered_items()[:k],
            node_id=node.id,
        )
        self.peeked.add(choice)
        self.log.append(f"PEEK choice={choice} d={d} reveals={k}")
        return vision

    def choose(self, choice: int) -> StoryNode:
        """Commit to a branch; resets the vision budget."""
        if self.ended:
            raise StoryEnded("the story has ended; no choices remain")
        if not 0 <= choice < self.tree.branching:
            raise ValueError(f"choice must be in [0, {self.tree.branching}), got {choice}")
        self.current = self.current.children[choice]
        self.peeked.clear()
        self.path.append(choice)
        self.log.append(f"CHOOSE {choice}")
        return self.current

    def transcript(self) -> str:
        return "".join(line + "\n" for line in self.log)


def new_session(tree: StoryTree, session_seed: int) -> StorySession:
    return StorySession(tree, session_seed)


def vision_hit_rate(branching: int, d: int, trials: int, seed: int = 1) -> float:
    """Monte-Carlo estimate of P(vision comes true).

    A vision uniformly samples one of b**(d-1) futures in the chosen
    branch; the walk that follows enters that branch and takes d-1
    further uniform choices. Both are simulated as independent draws
    over the same future space; the expected rate is b**-(d-1).
    """
    if branching < 2:
        raise ValueError(f"branching must be >= 2, got {branching}")
    if d < 1:
        raise ValueError(f"vision depth must be >= 1, got {d}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    n = futures_count(branching, d)
    rng = SplitMix64(seed)
    hits = 0
    for _ in range(trials):
        vision = rng.randrange(n)
        walked = 0
        for _step in range(d - 1):
            walked = walked * branching + rng.randrange(branching)
        if vision == walked:
            hits += 1
    return hits / trials


def tree_to_dict(node: StoryNode) -> dict:
    """Canonical nested JSON form of a (sub)tree."""
    return {
        "id": node.id,
        "attributes": node.attributes.as_dict(),
        "sceneText": node.scene_text,
        "children": [tree_to_dict(child) for child in node.children],
    }
