"""sl2 crystals of tensor products B_{l1} x ... x B_{ln}.

An element is a tuple of coordinates ``x_i`` in ``[0, l_i]``; ``x_i`` counts
lowering steps from the highest vector of the i-th factor. Tensor products
are evaluated left-associatively with Kashiwara's two-factor rule.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Sequence

from .cactus import BlockSwap, CactusWord, word_block_swaps
from .trees import LabelState, Tree, inner_spans, is_leaf, relabel

__all__ = [
    "CrystalError",
    "CrystalElem",
    "HighestSet",
    "weight",
    "eps",
    "phi",
    "e_tilde",
    "f_tilde",
    "elements",
    "highest_elements",
    "schuetzenberger",
    "commutor",
    "paper_closed_form_commutor",
    "ClosedFormResult",
    "block_swap",
    "cactus_act",
    "cactus_square",
    "top_weight",
    "bracketing_label",
]


class CrystalError(ValueError):
    pass


@dataclass(frozen=True)
class CrystalElem:
    weights: tuple[int, ...]
    coords: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        object.__setattr__(self, "coords", tuple(int(x) for x in self.coords))
        if len(self.weights) != len(self.coords):
            raise CrystalError("weights and coords differ in length")
        for lam, x in zip(self.weights, self.coords):
            if lam < 0:
                raise CrystalError(f"negative highest weight {lam}")
            if not 0 <= x <= lam:
                raise CrystalError(f"coordinate {x} outside [0, {lam}]")

    @property
    def n(self) -> int:
        return len(self.weights)

    def sub(self, start: int, stop: int) -> "CrystalElem":
        """Factors at 0-based positions ``start:stop``."""
        return CrystalElem(self.weights[start:stop], self.coords[start:stop])

    def to_dict(self) -> dict:
        return {"weights": list(self.weights), "coords": list(self.coords)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "CrystalElem":
        return cls(tuple(data["weights"]), tuple(data["coords"]))

    def __str__(self):
        return "(" + ",".join(map(str, self.coords)) + ")"


def concat(*parts: CrystalElem) -> CrystalElem:
    return CrystalElem(
        tuple(w for p in parts for w in p.weights),
        tuple(x for p in parts for x in p.coords),
    )


def weight(b: CrystalElem) -> int:
    return sum(b.weights) - 2 * sum(b.coords)


def _prefix_string_data(b: CrystalElem) -> list[tuple[int, int]]:
    """(eps, phi) of each left prefix b_1 x ... x b_k."""
    out = []
    e_acc = p_acc = None
    for lam, x in zip(b.weights, b.coords):
        e2, p2 = x, lam - x
        if e_acc is None:
            e_acc, p_acc = e2, p2
        else:
            e_acc, p_acc = e_acc + max(0, e2 - p_acc), p2 + max(0, p_acc - e2)
        out.append((e_acc, p_acc))
    return out


def eps(b: CrystalElem) -> int:
    if b.n == 0:
        return 0
    return _prefix_string_data(b)[-1][0]


def phi(b: CrystalElem) -> int:
    if b.n == 0:
        return 0
    return _prefix_string_data(b)[-1][1]


def _act(b: CrystalElem, raising: bool) -> Optional[CrystalElem]:
    if b.n == 0:
        return None
    pre = _prefix_string_data(b)
    i = b.n - 1
    while i > 0:
        phi_prefix = pre[i - 1][1]
        eps_last = b.coords[i]
        # e acts on the prefix when phi(P) >= eps(b_i); f when phi(P) > eps(b_i)
        go_left = phi_prefix >= eps_last if raising else phi_prefix > eps_last
        if not go_left:
            break
        i -= 1
    x = b.coords[i] + (-1 if raising else 1)
    if not 0 <= x <= b.weights[i]:
        return None
    coords = b.coords[:i] + (x,) + b.coords[i + 1:]
    return CrystalElem(b.weights, coords)


def e_tilde(b: CrystalElem) -> Optional[CrystalElem]:
    return _act(b, True)


def f_tilde(b: CrystalElem) -> Optional[CrystalElem]:
    return _act(b, False)


def elements(weights: Sequence[int], slice_sum: Optional[int] = None) -> Iterator[CrystalElem]:
    """All elements, or those with sum of coordinates equal to ``slice_sum``."""
    weights = tuple(weights)
    if slice_sum is None:
        for coords in itertools.product(*(range(w + 1) for w in weights)):
            yield CrystalElem(weights, coords)
        return
    for coords in _compositions(weights, slice_sum):
        yield CrystalElem(weights, coords)


def _compositions(bounds: Sequence[int], total: int) -> Iterator[tuple[int, ...]]:
    if not bounds:
        if total == 0:
            yield ()
        return
    rest = sum(bounds[1:])
    for x in range(max(0, total - rest), min(bounds[0], total) + 1):
        for tail in _compositions(bounds[1:], total - x):
            yield (x,) + tail


@dataclass(frozen=True)
class HighestSet:
    weights: tuple[int, ...]
    nu: int
    elements: tuple[CrystalElem, ...]
    parity_ok: bool = True

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def to_dict(self) -> dict:
        return {
            "weights": list(self.weights),
            "nu": self.nu,
            "parity_ok": self.parity_ok,
            "elements": [list(b.coords) for b in self.elements],
        }


def highest_elements(weights: Sequence[int], nu: int) -> HighestSet:
    weights = tuple(int(w) for w in weights)
    if nu < 0:
        raise CrystalError("top weight must be nonnegative")
    diff = sum(weights) - nu
    if diff < 0 or diff % 2:
        return HighestSet(weights, nu, (), parity_ok=diff >= 0 and diff % 2 == 0)
    found = tuple(b for b in elements(weights, diff // 2) if e_tilde(b) is None)
    return HighestSet(weights, nu, found)


def top_weight(b: CrystalElem) -> int:
    """Highest weight of the connected component containing ``b``."""
    return eps(b) + phi(b)


def schuetzenberger(b: CrystalElem) -> CrystalElem:
    """Reverse the sl2 string through ``b``."""
    e, p = eps(b), phi(b)
    step = f_tilde if p > e else e_tilde
    for _ in range(abs(p - e)):
        b = step(b)
    return b


def commutor(b: CrystalElem, split: int) -> CrystalElem:
    """Crystal commutor B x C -> C x B, the first ``split`` factors forming B.

    Realised as sigma(b x c) = xi(xi(c) x xi(b)) with xi the Schuetzenberger
    involution of the respective block.
    """
    if not 0 < split < b.n:
        raise CrystalError(f"split {split} invalid for {b.n} factors")
    left, right = b.sub(0, split), b.sub(split, b.n)
    return schuetzenberger(concat(schuetzenberger(right), schuetzenberger(left)))


@dataclass(frozen=True)
class ClosedFormResult:
    x: int
    y: int
    in_range: bool


def paper_closed_form_commutor(x: int, y: int, lam1: int, lam2: int) -> ClosedFormResult:
    """The two-factor piecewise-linear formula taken literally.

    Diagnostic only: it disagrees with :func:`commutor` and can leave the box.
    """
    if not (0 <= x <= lam1 and 0 <= y <= lam2):
        raise CrystalError("point outside [0,lam1]x[0,lam2]")
    a = max(0, lam1 - x - y)
    c = max(0, lam2 - x - y)
    x2, y2 = y + a - c, x + c - a
    return ClosedFormResult(x2, y2, 0 <= x2 <= lam2 and 0 <= y2 <= lam1)


SwapRule = Callable[[CrystalElem, int], CrystalElem]


def closed_form_swap(b: CrystalElem, split: int) -> CrystalElem:
    """Block swap using the literal closed form on single-factor pairs.

    Falls back to :func:`commutor` for larger blocks. Raises when the formula
    leaves the crystal.
    """
    if b.n == 2 and split == 1:
        r = paper_closed_form_commutor(b.coords[0], b.coords[1], *b.weights)
        if not r.in_range:
            raise CrystalError(f"closed form sends {b} outside the crystal: ({r.x},{r.y})")
        return CrystalElem((b.weights[1], b.weights[0]), (r.x, r.y))
    return commutor(b, split)


def block_swap(b: CrystalElem, swap: BlockSwap, rule: SwapRule = commutor) -> CrystalElem:
    if swap.end > b.n:
        raise CrystalError(f"{swap} exceeds {b.n} factors")
    a, c = swap.start - 1, swap.end
    middle = rule(b.sub(a, c), swap.mid - swap.start + 1)
    return concat(b.sub(0, a), middle, b.sub(c, b.n))


def cactus_square(b: CrystalElem, x: int, y: int, rule: SwapRule = commutor) -> tuple[CrystalElem, CrystalElem]:
    """Both sides of the cactus relation on X x Y x Z, with |X| = x, |Y| = y.

    Returns (s_{YX,Z} . (s_{X,Y} x 1))(b) and (s_{X,ZY} . (1 x s_{Y,Z}))(b).
    """
    n = b.n
    if not (x >= 1 and y >= 1 and x + y < n):
        raise CrystalError(f"blocks {x},{y} do not fit {n} factors")
    top = block_swap(block_swap(b, BlockSwap(1, x, x + y), rule), BlockSwap(1, x + y, n), rule)
    bottom = block_swap(block_swap(b, BlockSwap(x + 1, x + y, n), rule), BlockSwap(1, x, n), rule)
    return top, bottom


def cactus_act(w: CactusWord, b: CrystalElem, rule: SwapRule = commutor) -> CrystalElem:
    """Action of a cactus word; the returned element carries the permuted weights."""
    if w.n != b.n:
        raise CrystalError(f"word arity {w.n} does not match {b.n} factors")
    for swap in word_block_swaps(w):
        b = block_swap(b, swap, rule)
    return b


def bracketing_label(b: CrystalElem, tree: Tree) -> LabelState:
    """Intermediate highest weights of ``b`` along the bracketing ``tree``."""
    if is_leaf(tree):
        raise CrystalError("a bracketing needs at least two factors")
    leaf_weights = tuple(leaf.weight for leaf in tree.leaves())
    if leaf_weights != b.weights:
        raise CrystalError(f"tree leaves {leaf_weights} do not match weights {b.weights}")
    if e_tilde(b) is not None:
        raise CrystalError(f"{b} is not a highest element")
    labels = {path: top_weight(b.sub(lo, hi)) for path, (lo, hi) in inner_spans(tree).items()}
    return LabelState(relabel(tree, labels))
