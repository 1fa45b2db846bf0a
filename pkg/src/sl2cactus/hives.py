"""HIVES calculus for sl2: Clebsch-Gordan intervals, occurrence sets and the
associator acting on bracketing labels.

Flips act as the identity on labels; rotations act by the associator
``mu -> max(lA + lC, lB + nu) - mu``.
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence

from .cactus import CactusWord, word_block_swaps
from .trees import (
    LabelState,
    Move,
    Node,
    Tree,
    block_label,
    is_leaf,
    plan_block_swap,
    plan_reshape,
    replace,
    rotation_blocks,
    shape,
    strip_labels,
    subtree,
)


class HiveError(ValueError):
    pass


def cg_interval(l1: int, l2: int) -> list[int]:
    if l1 < 0 or l2 < 0:
        raise HiveError("highest weights must be nonnegative")
    return list(range(abs(l1 - l2), l1 + l2 + 1, 2))


def admissible(a: int, b: int, mu: int) -> bool:
    return abs(a - b) <= mu <= a + b and (a + b - mu) % 2 == 0


def triple_interval(la: int, lb: int, lc: int, nu: int) -> list[int]:
    """Occurrences of L(nu) in (L(la) L(lb)) L(lc), indexed by the middle weight."""
    return [mu for mu in cg_interval(la, lb) if admissible(mu, lc, nu)]


def associator_psi(mu: int, la: int, lb: int, lc: int, nu: int) -> int:
    if not (admissible(la, lb, mu) and admissible(mu, lc, nu)):
        raise HiveError(f"mu={mu} is not an occurrence for ({la} {lb}) {lc} -> {nu}")
    return max(la + lc, lb + nu) - mu


def _assignments(t: Tree) -> list[Tree]:
    """All labellings of ``t`` satisfying the Clebsch-Gordan rule at each vertex."""
    if is_leaf(t):
        return [t]
    out = []
    for left in _assignments(t.left):
        a = block_label(left)
        for right in _assignments(t.right):
            b = block_label(right)
            for mu in cg_interval(a, b):
                out.append(Node(left, right, mu))
    return out


def occurrence_set(tree: Tree, nu: int) -> list[LabelState]:
    """Admissible label states with root label ``nu``, sorted by labels."""
    tree = strip_labels(tree)
    if is_leaf(tree):
        raise HiveError("need at least two factors")
    states = [LabelState(t) for t in _assignments(tree) if t.label == nu]
    return sorted(states, key=lambda s: s.key())


def occurrence_count(tree: Tree, nu: int) -> int:
    """|occurrence_set(tree, nu)| by dynamic programming."""

    def counts(t: Tree) -> dict[int, int]:
        if is_leaf(t):
            return {t.weight: 1}
        left, right = counts(t.left), counts(t.right)
        out: dict[int, int] = {}
        for a, ca in left.items():
            for b, cb in right.items():
                for mu in cg_interval(a, b):
                    out[mu] = out.get(mu, 0) + ca * cb
        return out

    return counts(tree).get(nu, 0)


def check_state(state: LabelState) -> None:
    """Raise unless every vertex satisfies the Clebsch-Gordan rule."""

    def walk(t: Tree):
        if is_leaf(t):
            return
        walk(t.left)
        walk(t.right)
        a, b = block_label(t.left), block_label(t.right)
        if not admissible(a, b, t.label):
            raise HiveError(f"label {t.label} not admissible for children {a}, {b}")

    walk(state.tree)


# A rotation rule maps (state, move) to the new middle label.
RotationRule = Callable[[LabelState, Move], int]


def psi_rule(state: LabelState, m: Move) -> int:
    s = subtree(state.tree, m.path)
    a, b, c = (block_label(x) for x in rotation_blocks(s, m.direction))
    middle = s.left.label if m.direction == "right" else s.right.label
    if m.direction == "right":
        return associator_psi(middle, a, b, c, s.label)
    # the inverse rotation uses the same formula with the roles of A and C exchanged
    return associator_psi(middle, c, b, a, s.label)


def apply_move(state: LabelState, m: Move, rule: Optional[RotationRule] = None) -> LabelState:
    s = subtree(state.tree, m.path)
    if is_leaf(s):
        raise HiveError(f"{m} addresses a leaf")
    if m.kind == "flip":
        new = Node(s.right, s.left, s.label)
    else:
        mu = (rule or psi_rule)(state, m)
        a, b, c = rotation_blocks(s, m.direction)
        if m.direction == "right":
            new = Node(a, Node(b, c, mu), s.label)
        else:
            new = Node(Node(a, b, mu), c, s.label)
    return LabelState(replace(state.tree, m.path, new))


def apply_moves(state: LabelState, moves: Sequence[Move], rule: Optional[RotationRule] = None) -> LabelState:
    for m in moves:
        state = apply_move(state, m, rule)
    return state


def realize_word(w: CactusWord, tree: Tree) -> tuple[Tree, list[Move]]:
    """Canonical move sequence realising a cactus word starting at ``tree``."""
    if w.n != tree.size:
        raise HiveError(f"word arity {w.n} does not match {tree.size} leaves")
    moves: list[Move] = []
    cur = strip_labels(tree)
    for sw in word_block_swaps(w):
        cur, more = plan_block_swap(cur, sw.start, sw.mid, sw.end)
        moves.extend(more)
    return cur, moves


def cactus_act_labels(w: CactusWord, state: LabelState, rule: Optional[RotationRule] = None) -> LabelState:
    _, moves = realize_word(w, state.tree)
    return apply_moves(state, moves, rule)


def reshape_labels(state: LabelState, target, rule: Optional[RotationRule] = None) -> LabelState:
    """Carry a label state by rotations to the bracketing shape ``target``."""
    _, moves = plan_reshape(strip_labels(state.tree), target)
    return apply_moves(state, moves, rule)


def act_in_shape(w: CactusWord, state: LabelState, rule: Optional[RotationRule] = None) -> LabelState:
    """Word action followed by rotations back to the starting shape.

    Words equal in the cactus group may end at different bracketings of the
    same leaf order; this makes their results directly comparable.
    """
    return reshape_labels(cactus_act_labels(w, state, rule), shape(state.tree), rule)


def rp1_loop_moves() -> list[Move]:
    """Moves of the loop 0 -> 1 -> infinity -> 0 on RP^1 starting at ((1 2) 3)."""
    return [
        Move("rotate", "", "right"),  # (12)3 -> 1(23)
        Move("flip", "R"),  # 1(32)
        Move("rotate", "", "left"),  # (13)2
        Move("flip", "L"),  # (31)2
        Move("rotate", "", "right"),  # 3(12)
        Move("flip", ""),  # (12)3
    ]


def label_map(states: Sequence[LabelState], act: Callable[[LabelState], LabelState]) -> dict:
    return {s.key(): act(s).key() for s in states}
