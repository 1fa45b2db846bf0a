"""Ordered binary bracketings and the moves between them.

A tree's in-order leaf sequence is the current tensor order. Vertices are
addressed by paths of ``"L"``/``"R"`` steps from the root (``""``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Union


class TreeError(ValueError):
    pass


@dataclass(frozen=True)
class Leaf:
    index: int
    weight: int

    def leaves(self) -> list["Leaf"]:
        return [self]

    @property
    def size(self) -> int:
        return 1


@dataclass(frozen=True)
class Node:
    left: "Tree"
    right: "Tree"
    label: Optional[int] = None

    def leaves(self) -> list[Leaf]:
        return self.left.leaves() + self.right.leaves()

    @property
    def size(self) -> int:
        return self.left.size + self.right.size


Tree = Union[Leaf, Node]


def is_leaf(t: Tree) -> bool:
    return isinstance(t, Leaf)


@dataclass(frozen=True)
class Move:
    kind: str  # "flip" or "rotate"
    path: str
    direction: Optional[str] = None  # rotate: "right" ((AB)C)->(A(BC)), "left" the reverse

    def __post_init__(self):
        if self.kind == "flip":
            if self.direction is not None:
                raise TreeError("flip takes no direction")
        elif self.kind == "rotate":
            if self.direction not in ("right", "left"):
                raise TreeError(f"bad rotation direction {self.direction!r}")
        else:
            raise TreeError(f"unknown move kind {self.kind!r}")

    def inverse(self) -> "Move":
        if self.kind == "flip":
            return self
        return Move("rotate", self.path, "left" if self.direction == "right" else "right")

    def __str__(self):
        where = self.path or "root"
        return f"flip@{where}" if self.kind == "flip" else f"rot-{self.direction}@{where}"


# --- construction -----------------------------------------------------------------


def leaves_from_weights(weights: Sequence[int], order: Optional[Sequence[int]] = None) -> list[Leaf]:
    order = list(order) if order is not None else list(range(1, len(weights) + 1))
    return [Leaf(i, int(weights[i - 1])) for i in order]


def left_comb(leaves: Sequence[Leaf]) -> Tree:
    t: Tree = leaves[0]
    for leaf in leaves[1:]:
        t = Node(t, leaf)
    return t


def right_comb(leaves: Sequence[Leaf]) -> Tree:
    t: Tree = leaves[-1]
    for leaf in reversed(leaves[:-1]):
        t = Node(leaf, t)
    return t


def all_trees(leaves: Sequence[Leaf]) -> list[Tree]:
    """Every bracketing of the given leaf sequence (Catalan many)."""
    leaves = tuple(leaves)
    return [_fill(shape, leaves) for shape in _shapes(len(leaves))]


@lru_cache(maxsize=None)
def _shapes(n: int) -> tuple:
    if n == 1:
        return (None,)
    out = []
    for k in range(1, n):
        for a in _shapes(k):
            for b in _shapes(n - k):
                out.append((a, b))
    return tuple(out)


def _fill(shape, leaves: Sequence[Leaf]) -> Tree:
    if shape is None:
        return leaves[0]
    k = _shape_size(shape[0])
    return Node(_fill(shape[0], leaves[:k]), _fill(shape[1], leaves[k:]))


def _shape_size(shape) -> int:
    return 1 if shape is None else _shape_size(shape[0]) + _shape_size(shape[1])


def shape(t: Tree):
    """Unlabelled shape: ``None`` for a leaf, pair of shapes for a node."""
    return None if is_leaf(t) else (shape(t.left), shape(t.right))


def with_shape(t: Tree, target) -> bool:
    return shape(t) == target


# --- addressing ---------------------------------------------------------------------


def subtree(t: Tree, path: str) -> Tree:
    for step in path:
        if is_leaf(t):
            raise TreeError(f"path {path!r} runs past a leaf")
        t = t.left if step == "L" else t.right
    return t


def replace(t: Tree, path: str, new: Tree) -> Tree:
    if not path:
        return new
    if is_leaf(t):
        raise TreeError(f"path {path!r} runs past a leaf")
    if path[0] == "L":
        return Node(replace(t.left, path[1:], new), t.right, t.label)
    return Node(t.left, replace(t.right, path[1:], new), t.label)


def inner_paths(t: Tree, prefix: str = "") -> list[str]:
    if is_leaf(t):
        return []
    return [prefix] + inner_paths(t.left, prefix + "L") + inner_paths(t.right, prefix + "R")


def inner_spans(t: Tree) -> dict[str, tuple[int, int]]:
    """0-based half-open position range covered by each inner vertex."""
    out: dict[str, tuple[int, int]] = {}

    def walk(s: Tree, path: str, lo: int) -> int:
        if is_leaf(s):
            return lo + 1
        mid = walk(s.left, path + "L", lo)
        hi = walk(s.right, path + "R", mid)
        out[path] = (lo, hi)
        return hi

    walk(t, "", 0)
    return out


def labels_of(t: Tree) -> dict[str, Optional[int]]:
    return {p: subtree(t, p).label for p in inner_paths(t)}


def relabel(t: Tree, labels: dict[str, int], prefix: str = "") -> Tree:
    if is_leaf(t):
        return t
    return Node(
        relabel(t.left, labels, prefix + "L"),
        relabel(t.right, labels, prefix + "R"),
        labels.get(prefix, t.label),
    )


def strip_labels(t: Tree) -> Tree:
    if is_leaf(t):
        return t
    return Node(strip_labels(t.left), strip_labels(t.right))


def block_label(t: Tree) -> int:
    """Label of an inner vertex, or the highest weight of a leaf."""
    if is_leaf(t):
        return t.weight
    if t.label is None:
        raise TreeError("unlabelled vertex")
    return t.label


# --- serialization -----------------------------------------------------------------


def to_nested(t: Tree):
    return t.index if is_leaf(t) else [to_nested(t.left), to_nested(t.right)]


def from_nested(nested, weights: Sequence[int]) -> Tree:
    """Build a tree from nested leaf indices, weights given in original order."""
    if isinstance(nested, int):
        if not 1 <= nested <= len(weights):
            raise TreeError(f"leaf index {nested} out of range")
        return Leaf(nested, int(weights[nested - 1]))
    if len(nested) != 2:
        raise TreeError(f"every vertex needs two children, got {nested!r}")
    return Node(from_nested(nested[0], weights), from_nested(nested[1], weights))


def parse_tree(text: str, weights: Sequence[int]) -> Tree:
    t = from_nested(json.loads(text), weights)
    idx = sorted(leaf.index for leaf in t.leaves())
    if idx != list(range(1, len(weights) + 1)):
        raise TreeError(f"leaves {idx} are not a permutation of 1..{len(weights)}")
    return t


def path_key(path: str) -> str:
    return "^" + path


def key_path(key: str) -> str:
    if not key.startswith("^"):
        raise TreeError(f"bad vertex path {key!r}")
    return key[1:]


@dataclass(frozen=True)
class LabelState:
    """A bracketing with an intermediate weight on every inner vertex."""

    tree: Node

    def __post_init__(self):
        if is_leaf(self.tree):
            raise TreeError("label states need at least two leaves")
        for p in inner_paths(self.tree):
            if subtree(self.tree, p).label is None:
                raise TreeError(f"vertex {p or 'root'} carries no label")

    @property
    def nu(self) -> int:
        return self.tree.label

    @property
    def labels(self) -> dict[str, int]:
        return labels_of(self.tree)

    @property
    def weights(self) -> tuple[int, ...]:
        return tuple(leaf.weight for leaf in self.tree.leaves())

    @property
    def order(self) -> tuple[int, ...]:
        return tuple(leaf.index for leaf in self.tree.leaves())

    def label_at(self, path: str) -> int:
        return subtree(self.tree, path).label

    def key(self) -> tuple:
        return (json.dumps(to_nested(self.tree)), tuple(sorted(self.labels.items())))

    def to_dict(self, original_weights: Optional[Sequence[int]] = None) -> dict:
        if original_weights is None:
            by_index = {leaf.index: leaf.weight for leaf in self.tree.leaves()}
            original_weights = [by_index[i] for i in sorted(by_index)]
        return {
            "tree": to_nested(self.tree),
            "weights": list(original_weights),
            "labels": {path_key(p): mu for p, mu in sorted(self.labels.items())},
            "nu": self.nu,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LabelState":
        t = from_nested(data["tree"], data["weights"])
        labels = {key_path(k): int(v) for k, v in data["labels"].items()}
        state = cls(relabel(t, labels))
        if "nu" in data and data["nu"] != state.nu:
            raise TreeError("nu disagrees with root label")
        return state

    def __str__(self):
        return _render(self.tree)


def _render(t: Tree) -> str:
    if is_leaf(t):
        return str(t.index)
    return f"({_render(t.left)} {_render(t.right)})[{t.label}]"


# --- structural moves ---------------------------------------------------------------


def rotate_right(t: Tree, new_label: Optional[int] = None) -> Node:
    """((A B) C) -> (A (B C))."""
    if is_leaf(t) or is_leaf(t.left):
        raise TreeError("right rotation needs ((A B) C)")
    a, b, c = t.left.left, t.left.right, t.right
    return Node(a, Node(b, c, new_label), t.label)


def rotate_left(t: Tree, new_label: Optional[int] = None) -> Node:
    """(A (B C)) -> ((A B) C)."""
    if is_leaf(t) or is_leaf(t.right):
        raise TreeError("left rotation needs (A (B C))")
    a, b, c = t.left, t.right.left, t.right.right
    return Node(Node(a, b, new_label), c, t.label)


def flip(t: Tree) -> Node:
    if is_leaf(t):
        raise TreeError("cannot flip a leaf")
    return Node(t.right, t.left, t.label)


def rotation_blocks(t: Tree, direction: str) -> tuple[Tree, Tree, Tree]:
    """The three blocks (A, B, C) of a rotation at ``t``."""
    if direction == "right":
        if is_leaf(t) or is_leaf(t.left):
            raise TreeError("right rotation needs ((A B) C)")
        return t.left.left, t.left.right, t.right
    if is_leaf(t) or is_leaf(t.right):
        raise TreeError("left rotation needs (A (B C))")
    return t.left, t.right.left, t.right.right


def apply_shape_move(t: Tree, m: Move) -> Tree:
    """Apply a move ignoring labels (any new vertex is unlabelled)."""
    s = subtree(t, m.path)
    if m.kind == "flip":
        new = flip(s)
    elif m.direction == "right":
        new = rotate_right(s)
    else:
        new = rotate_left(s)
    return replace(t, m.path, new)


def apply_shape_moves(t: Tree, moves: Sequence[Move]) -> Tree:
    for m in moves:
        t = apply_shape_move(t, m)
    return t


# --- planning ------------------------------------------------------------------------


def plan_split(t: Tree, k: int, path: str = "") -> tuple[Tree, list[Move]]:
    """Rotations making the vertex at ``path`` split after its k-th leaf."""
    if is_leaf(t) or not 0 < k < t.size:
        raise TreeError(f"cannot split {t.size} leaves at {k}")
    s = t.left.size
    if s == k:
        return t, []
    if s > k:
        left, moves = plan_split(t.left, k, path + "L")
        return rotate_right(Node(left, t.right, t.label)), moves + [Move("rotate", path, "right")]
    right, moves = plan_split(t.right, k - s, path + "R")
    return rotate_left(Node(t.left, right, t.label)), moves + [Move("rotate", path, "left")]


def plan_reshape(t: Tree, target, path: str = "") -> tuple[Tree, list[Move]]:
    """Rotations turning ``t`` into a tree of the given shape (same leaf order)."""
    if target is None:
        if not is_leaf(t):
            raise TreeError("shape size mismatch")
        return t, []
    t, moves = plan_split(t, _shape_size(target[0]), path)
    left, m1 = plan_reshape(t.left, target[0], path + "L")
    right, m2 = plan_reshape(t.right, target[1], path + "R")
    return Node(left, right, t.label), moves + m1 + m2


def plan_reshape_via_comb(t: Tree, target) -> tuple[Tree, list[Move]]:
    """A second route to the same shape: first to the left comb, then out."""
    n = t.size
    comb = shape(left_comb([Leaf(i, 0) for i in range(n)]))
    mid, m1 = plan_reshape(t, comb)
    # leave the comb along the reverse of the route target -> comb
    probe = _fill(target, mid.leaves())
    _, back = plan_reshape(probe, comb)
    moves = m1 + [m.inverse() for m in reversed(back)]
    return apply_shape_moves(t, moves), moves


def plan_segment(t: Tree, a: int, c: int, path: str = "", offset: int = 0) -> tuple[Tree, list[Move], str]:
    """Rotations creating a vertex covering positions [a, c] (1-based, inclusive)."""
    lo, hi = offset + 1, offset + t.size
    if (a, c) == (lo, hi):
        return t, [], path
    if is_leaf(t):
        raise TreeError("segment not inside tree")
    m = offset + t.left.size
    if c <= m:
        left, moves, p = plan_segment(t.left, a, c, path + "L", offset)
        return Node(left, t.right, t.label), moves, p
    if a > m:
        right, moves, p = plan_segment(t.right, a, c, path + "R", m)
        return Node(t.left, right, t.label), moves, p
    k = a - 1 - offset if a > lo else c - offset
    t, moves = plan_split(t, k, path)
    t2, more, p = plan_segment(t, a, c, path, offset)
    return t2, moves + more, p


def plan_block_swap(t: Tree, start: int, mid: int, end: int) -> tuple[Tree, list[Move]]:
    """Canonical moves exchanging blocks [start, mid] and [mid+1, end].

    If the blocks already are sibling subtrees the swap is one flip. Otherwise
    rotations bring them together, one flip exchanges them, and rotations
    restore the original shape.
    """
    original = shape(t)
    cur, moves, p = plan_segment(t, start, end)
    node = subtree(cur, p)
    k = mid - start + 1
    if node.left.size != k:
        node, more = plan_split(node, k, p)
        cur = replace(cur, p, node)
        moves = moves + more
    moves = moves + [Move("flip", p)]
    cur = replace(cur, p, flip(node))
    if moves[:-1]:
        cur, out = plan_reshape(cur, original)
        moves = moves + out
    return cur, moves
