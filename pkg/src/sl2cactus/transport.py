"""Numeric transport of Gaudin eigenlines along one-parameter families.

Along an edge the Hamiltonian degenerates to the pencil
H(t) = (1 - t) C_X - t C_Y of two partial Casimirs. Its eigenvalue curves
never meet, so following them by order transports labels from one end to the
other. All floating-point work lives in this module.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .cactus import CactusWord
from .gaudin import (
    ExactOperator,
    apply_casimir,
    bracketing_eigenbasis,
    gram_diagonal,
    gram_pair,
    restrict,
)
from .hives import apply_move, apply_moves, occurrence_set, psi_rule, realize_word, rp1_loop_moves
from .trees import (
    LabelState,
    Move,
    Tree,
    inner_spans,
    leaves_from_weights,
    left_comb,
    plan_reshape,
    rotation_blocks,
    shape,
    strip_labels,
    subtree,
    to_nested,
)

DEFAULT_TOL = 1e-8
DEFAULT_GRID = 1024
MAX_REFINEMENTS = 4
MODES = ("combinatorial", "numeric")


class TransportError(ValueError):
    pass


class PossibleCrossing(TransportError):
    """The eigenvalue gap could not be certified; no permutation is emitted."""

    def __init__(self, message: str, min_gap: float, grid: int):
        super().__init__(message)
        self.min_gap = min_gap
        self.grid = grid


@dataclass(frozen=True)
class GramDiagonal:
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        entries = tuple(Fraction(x) for x in self.entries)
        object.__setattr__(self, "entries", entries)
        if any(x <= 0 for x in entries):
            raise TransportError("Gram entries must be positive")

    @classmethod
    def for_slice(cls, weights: Sequence[int], nu: Optional[int] = None) -> "GramDiagonal":
        return cls(gram_diagonal(weights, nu))

    def __len__(self):
        return len(self.entries)


def _check_self_adjoint(rows, g: Sequence[Fraction]):
    d = len(rows)
    for i in range(d):
        for j in range(d):
            if g[i] * rows[i][j] != rows[j][i] * g[j]:
                raise TransportError("operator is not self-adjoint for the given form")


def symmetrize(op: ExactOperator, g: GramDiagonal) -> np.ndarray:
    """D^(1/2) op D^(-1/2) as a float array, after an exact self-adjointness check."""
    if len(g) != op.dim:
        raise TransportError("Gram form and operator differ in size")
    _check_self_adjoint(op.rows, g.entries)
    root = np.sqrt(np.array([float(x) for x in g.entries]))
    m = op.to_float()
    s = root[:, None] * m / root[None, :]
    return (s + s.T) / 2


def symmetric_restriction(op: ExactOperator, gram: Sequence[Sequence[Fraction]]) -> np.ndarray:
    """Symmetric form of ``op`` for a general positive definite Gram matrix."""
    d = op.dim
    for i in range(d):
        for j in range(d):
            lhs = sum((gram[i][k] * op.rows[k][j] for k in range(d)), Fraction(0))
            rhs = sum((op.rows[k][i] * gram[k][j] for k in range(d)), Fraction(0))
            if lhs != rhs:
                raise TransportError("operator is not self-adjoint for the given form")
    g = np.array([[float(x) for x in r] for r in gram], dtype=float)
    low = np.linalg.cholesky(g)
    s = low.T @ op.to_float() @ np.linalg.inv(low.T)
    return (s + s.T) / 2


# --- pencils -------------------------------------------------------------------------------


@dataclass(frozen=True)
class TransportReport:
    permutation: tuple[int, ...]
    min_gap: Optional[float]
    certified_gap: Optional[float]
    grid: int
    certified: bool
    ts: np.ndarray = field(repr=False, compare=False, default=None)
    curves: np.ndarray = field(repr=False, compare=False, default=None)

    def to_dict(self) -> dict:
        return {
            "permutation": list(self.permutation),
            "min_gap": self.min_gap,
            "certified_gap": self.certified_gap,
            "grid": self.grid,
            "certified": self.certified,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def curves_csv(self) -> str:
        out = io.StringIO()
        d = self.curves.shape[1] if self.curves is not None else 0
        out.write(",".join(["t"] + [f"lambda_{i + 1}" for i in range(d)]) + "\n")
        if self.curves is not None:
            for t, row in zip(self.ts, self.curves):
                out.write(",".join(repr(float(x)) for x in (t, *row)) + "\n")
        return out.getvalue()


@dataclass
class Pencil:
    a: np.ndarray
    b: np.ndarray
    grid: int = DEFAULT_GRID
    tol: float = DEFAULT_TOL
    max_refinements: int = MAX_REFINEMENTS

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        if self.a.shape != self.b.shape or self.a.ndim != 2 or self.a.shape[0] != self.a.shape[1]:
            raise TransportError("pencil ends must be square matrices of one size")
        scale = max(np.abs(self.a).max(initial=0.0), np.abs(self.b).max(initial=0.0), 1.0)
        for m in (self.a, self.b):
            if np.abs(m - m.T).max(initial=0.0) > 1e-12 * scale:
                raise TransportError("pencil ends must be symmetric")
        if self.grid < 1:
            raise TransportError("grid must be positive")

    def at(self, t):
        t = np.asarray(t, dtype=float)
        return (1 - t)[..., None, None] * self.a - t[..., None, None] * self.b

    def norm(self) -> float:
        return max(np.linalg.norm(self.a, 2), np.linalg.norm(self.b, 2)) if self.a.size else 0.0

    def sample(self, grid: int) -> tuple[np.ndarray, np.ndarray]:
        ts = np.linspace(0.0, 1.0, grid + 1)
        return ts, np.linalg.eigvalsh(self.at(ts))


def pencil_track(p: Pencil) -> TransportReport:
    """Follow eigenvalues of H(t) = (1-t)A - tB by order from t=0 to t=1.

    Each eigenvalue is Lipschitz in t with constant ||A + B||, so gaps g_i at
    consecutive samples h apart bound the gap in between from below by
    (g_i(t_k) + g_i(t_k+1))/2 - ||A + B|| h. The grid is doubled until that
    bound exceeds tol * ||H||.
    """
    d = p.a.shape[0]
    if d <= 1:
        ts, curves = p.sample(1)
        return TransportReport(tuple(range(d)), None, None, 1, True, ts, curves)
    lip = float(np.linalg.norm(p.a + p.b, 2))
    floor = p.tol * max(p.norm(), 1e-300)
    grid = p.grid
    for _ in range(p.max_refinements + 1):
        ts, curves = p.sample(grid)
        gaps = np.diff(curves, axis=1)
        min_gap = float(gaps.min())
        if min_gap <= floor:
            raise PossibleCrossing(f"possible crossing: gap {min_gap:.3e} at grid {grid}", min_gap, grid)
        bound = float(((gaps[:-1] + gaps[1:]) / 2).min() - lip / grid)
        if bound > floor:
            return TransportReport(tuple(range(d)), min_gap, bound, grid, True, ts, curves)
        grid *= 2
    raise PossibleCrossing(f"possible crossing: gap not certified at grid {grid // 2}", min_gap, grid // 2)


def mu_from_casimir(c: float, tol: float = 1e-6) -> int:
    """Invert c = mu(mu+2)/2 for a nonnegative integer mu."""
    mu = -1 + math.sqrt(max(1 + 2 * c, 0.0))
    r = round(mu)
    if r < 0 or abs(mu - r) > tol * max(1.0, abs(mu)):
        raise TransportError(f"eigenvalue {c} is not a Casimir value")
    return r


# --- edges ---------------------------------------------------------------------------------


def _rotation_sites(tree: Tree, m: Move) -> tuple[list[int], list[int], str, str]:
    """Sites of the two Casimirs at the ends of a rotation and the middle paths."""
    s = subtree(tree, m.path)
    a, b, c = rotation_blocks(s, m.direction)
    lo, _ = inner_spans(tree)[m.path]
    sa = list(range(lo, lo + a.size))
    sb = list(range(lo + a.size, lo + a.size + b.size))
    sc = list(range(lo + a.size + b.size, lo + s.size))
    if m.direction == "right":
        return sa + sb, sb + sc, m.path + "L", m.path + "R"
    return sb + sc, sa + sb, m.path + "R", m.path + "L"


@dataclass(frozen=True)
class EdgeBlock:
    """Transport on one block of states sharing every label except the middle one."""

    sources: tuple[LabelState, ...]
    targets: tuple[int, ...]
    report: Optional[TransportReport]


def numeric_edge_blocks(
    tree: Tree, m: Move, nu: int, tol: float = DEFAULT_TOL, grid: int = DEFAULT_GRID
) -> list[EdgeBlock]:
    tree = strip_labels(tree)
    if m.kind != "rotate":
        raise TransportError("edge transport needs a rotation")
    x_sites, y_sites, mid_from, _ = _rotation_sites(tree, m)
    weights = tuple(leaf.weight for leaf in tree.leaves())
    groups: dict[tuple, list] = {}
    for vec, state in bracketing_eigenbasis(tree, nu):
        rest = tuple(sorted((p, mu) for p, mu in state.labels.items() if p != mid_from))
        groups.setdefault(rest, []).append((state.label_at(mid_from), vec, state))
    out = []
    for rest in sorted(groups):
        members = sorted(groups[rest], key=lambda x: x[0])
        vecs = [v for _, v, _ in members]
        ca = restrict(lambda v: apply_casimir(v, x_sites, weights), vecs)
        cb = restrict(lambda v: apply_casimir(v, y_sites, weights), vecs)
        g = GramDiagonal(tuple(gram_pair(v, v, weights) for v in vecs))
        pencil = Pencil(symmetrize(ca, g), symmetrize(cb, g), grid=grid, tol=tol)
        report = pencil_track(pencil)
        # the i-th smallest eigenvalue of C_X at t=0 ends as the i-th smallest of -C_Y
        end = report.curves[-1]
        targets = tuple(mu_from_casimir(-x) for x in end)
        start = report.curves[0]
        for (mu, _, _), x in zip(members, start):
            if mu_from_casimir(x) != mu:
                raise TransportError("pencil start spectrum disagrees with the exact labels")
        out.append(EdgeBlock(tuple(s for _, _, s in members), targets, report))
    return out


class NumericRule:
    """Rotation rule reading new labels off certified pencil transports."""

    def __init__(self, tol: float = DEFAULT_TOL, grid: int = DEFAULT_GRID):
        self.tol = tol
        self.grid = grid
        self._cache: dict = {}
        self.reports: list[TransportReport] = []

    def table(self, tree: Tree, m: Move, nu: int) -> dict:
        bare = strip_labels(tree)
        key = (json.dumps(to_nested(bare)), tuple(leaf.weight for leaf in bare.leaves()), nu, m)
        if key not in self._cache:
            table = {}
            for blk in numeric_edge_blocks(bare, m, nu, self.tol, self.grid):
                self.reports.append(blk.report)
                for s, mu in zip(blk.sources, blk.targets):
                    table[s.key()] = mu
            self._cache[key] = table
        return self._cache[key]

    def __call__(self, state: LabelState, m: Move) -> int:
        return self.table(state.tree, m, state.nu)[state.key()]

    def min_gap(self) -> Optional[float]:
        gaps = [r.min_gap for r in self.reports if r.min_gap is not None]
        return min(gaps) if gaps else None


def rule_for(mode: str, tol: float = DEFAULT_TOL, grid: int = DEFAULT_GRID):
    if mode == "combinatorial":
        return psi_rule
    if mode == "numeric":
        return NumericRule(tol, grid)
    raise TransportError(f"unknown mode {mode!r}; expected one of {MODES}")


@dataclass(frozen=True)
class LabelMap:
    mapping: dict
    states: dict
    reports: tuple[TransportReport, ...] = ()

    def __eq__(self, other):
        return isinstance(other, LabelMap) and self.mapping == other.mapping

    def is_identity(self) -> bool:
        return all(k == v for k, v in self.mapping.items())

    def to_dict(self) -> dict:
        def name(k):
            return str(self.states[k])

        return {name(k): name(v) for k, v in sorted(self.mapping.items())}


def _label_map(states: Sequence[LabelState], act, reports=()) -> LabelMap:
    mapping, names = {}, {}
    for s in states:
        t = act(s)
        mapping[s.key()] = t.key()
        names[s.key()] = s
        names[t.key()] = t
    return LabelMap(mapping, names, tuple(reports))


def edge_transport(
    tree: Tree, m: Move, nu: int, mode: str = "combinatorial", tol: float = DEFAULT_TOL, grid: int = DEFAULT_GRID
) -> LabelMap:
    """Label map across one rotation, by the associator or by the pencil."""
    if m.kind != "rotate":
        raise TransportError("edge transport needs a rotation")
    rule = rule_for(mode, tol, grid)
    states = occurrence_set(tree, nu)
    lm = _label_map(states, lambda s: apply_move(s, m, rule))
    return LabelMap(lm.mapping, lm.states, tuple(getattr(rule, "reports", ())))


def loop_monodromy(
    w: CactusWord,
    weights: Sequence[int],
    nu: int,
    mode: str = "combinatorial",
    tree: Optional[Tree] = None,
    tol: float = DEFAULT_TOL,
    grid: int = DEFAULT_GRID,
) -> LabelMap:
    """Compose transports and flips along the canonical realisation of ``w``.

    The path is closed up by rotations back to the starting bracketing, so a
    pure word yields a permutation of the label set of ``tree`` (left comb by
    default); otherwise a bijection onto another leaf order's set.
    """
    if tree is None:
        tree = left_comb(leaves_from_weights(weights))
    tree = strip_labels(tree)
    end, moves = realize_word(w, tree)
    _, back = plan_reshape(end, shape(tree))
    moves = moves + back
    rule = rule_for(mode, tol, grid)
    states = occurrence_set(tree, nu)
    lm = _label_map(states, lambda s: apply_moves(s, moves, rule))
    return LabelMap(lm.mapping, lm.states, tuple(getattr(rule, "reports", ())))


def rp1_loop(weights: Sequence[int], nu: int, mode: str = "combinatorial", tol: float = DEFAULT_TOL, grid: int = DEFAULT_GRID) -> LabelMap:
    """Monodromy of the real projective line loop 0 -> 1 -> infinity -> 0 for n = 3."""
    if len(weights) != 3:
        raise TransportError("the projective line loop needs three factors")
    tree = left_comb(leaves_from_weights(weights))
    rule = rule_for(mode, tol, grid)
    states = occurrence_set(tree, nu)
    lm = _label_map(states, lambda s: apply_moves(s, rp1_loop_moves(), rule))
    return LabelMap(lm.mapping, lm.states, tuple(getattr(rule, "reports", ())))


def cycle_type(lm: LabelMap) -> list[int]:
    seen, out = set(), []
    for k in sorted(lm.mapping):
        if k in seen:
            continue
        n, cur = 0, k
        while cur not in seen:
            seen.add(cur)
            cur = lm.mapping[cur]
            n += 1
        out.append(n)
    return sorted(out, reverse=True)


def generated_group_is_cyclic(maps: Sequence[LabelMap]) -> bool:
    """Whether the permutations generate a cyclic group (checked by closure)."""
    if not maps:
        return True
    keys = sorted(maps[0].mapping)
    idx = {k: i for i, k in enumerate(keys)}
    gens = [tuple(idx[m.mapping[k]] for k in keys) for m in maps]
    ident = tuple(range(len(keys)))
    group = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                gh = tuple(h[g[i]] for i in range(len(g)))
                if gh not in group:
                    group.add(gh)
                    nxt.append(gh)
        frontier = nxt
    for g in group:
        powers, cur = {ident}, g
        while cur not in powers:
            powers.add(cur)
            cur = tuple(g[cur[i]] for i in range(len(g)))
        if len(powers) == len(group):
            return True
    return False


__all__ = [
    "DEFAULT_GRID",
    "DEFAULT_TOL",
    "EdgeBlock",
    "GramDiagonal",
    "LabelMap",
    "MODES",
    "NumericRule",
    "Pencil",
    "PossibleCrossing",
    "TransportError",
    "TransportReport",
    "cycle_type",
    "edge_transport",
    "generated_group_is_cyclic",
    "loop_monodromy",
    "mu_from_casimir",
    "numeric_edge_blocks",
    "pencil_track",
    "rp1_loop",
    "rule_for",
    "symmetric_restriction",
    "symmetrize",
]
