"""Exact sl2 Gaudin operators on V_{l1} x ... x V_{ln}.

Each factor uses the divided-power basis v_k = f^(k) v, so that

    H v_k = (l - 2k) v_k,  F v_k = (k+1) v_{k+1},  E v_k = (l - k + 1) v_{k-1}

and every structure constant is an integer. Operators are dense matrices of
Fractions over a weight slice (or the whole space).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd, lcm, prod
from typing import Iterable, Optional, Sequence

from .crystal import _compositions
from .hives import cg_interval
from .linalg import Matrix, frac_str, matmul, nullspace, solve_in_span, zeros
from .trees import LabelState, Node, Tree, block_label, inner_spans, is_leaf, strip_labels

Basis = tuple[tuple[int, ...], ...]
SparseVec = dict[tuple[int, ...], Fraction]


class GaudinError(ValueError):
    pass


def casimir_value(mu: int) -> Fraction:
    return Fraction(mu * (mu + 2), 2)


# --- bases -------------------------------------------------------------------------------


def slice_sum(weights: Sequence[int], nu: int) -> int:
    d = sum(weights) - nu
    if d < 0 or d % 2:
        raise GaudinError(f"weight {nu} does not occur in {tuple(weights)}")
    return d // 2


@lru_cache(maxsize=None)
def _slice_basis(weights: tuple[int, ...], nu: Optional[int]) -> Basis:
    if nu is None:
        from itertools import product

        return tuple(product(*(range(w + 1) for w in weights)))
    return tuple(_compositions(weights, slice_sum(weights, nu)))


def slice_basis(weights: Sequence[int], nu: Optional[int] = None) -> Basis:
    """Basis tuples of the weight-``nu`` slice, or of the whole space if ``nu`` is None."""
    return _slice_basis(tuple(int(w) for w in weights), nu)


# --- sparse actions ---------------------------------------------------------------------


def _add(out: SparseVec, key, c):
    if c:
        v = out.get(key, 0) + c
        if v:
            out[key] = v
        else:
            out.pop(key, None)


def apply_e(vec: SparseVec, i: int, weights: Sequence[int]) -> SparseVec:
    lam = weights[i]
    out: SparseVec = {}
    for key, c in vec.items():
        k = key[i]
        if k > 0:
            _add(out, key[:i] + (k - 1,) + key[i + 1:], c * (lam - k + 1))
    return out


def apply_f(vec: SparseVec, i: int, weights: Sequence[int]) -> SparseVec:
    lam = weights[i]
    out: SparseVec = {}
    for key, c in vec.items():
        k = key[i]
        if k < lam:
            _add(out, key[:i] + (k + 1,) + key[i + 1:], c * (k + 1))
    return out


def apply_h(vec: SparseVec, i: int, weights: Sequence[int]) -> SparseVec:
    lam = weights[i]
    out: SparseVec = {}
    for key, c in vec.items():
        _add(out, key, c * (lam - 2 * key[i]))
    return out


def _sum(vecs: Iterable[SparseVec], scale=1) -> SparseVec:
    out: SparseVec = {}
    for v in vecs:
        for key, c in v.items():
            _add(out, key, c * scale)
    return out


def apply_total(op: str, vec: SparseVec, sites: Iterable[int], weights: Sequence[int]) -> SparseVec:
    fn = {"E": apply_e, "F": apply_f, "H": apply_h}[op]
    return _sum(fn(vec, i, weights) for i in sites)


def apply_casimir(vec: SparseVec, sites: Sequence[int], weights: Sequence[int]) -> SparseVec:
    """C_J v with C = EF + FE + H^2/2 pushed to the sites J (0-based)."""
    ef = apply_total("E", apply_total("F", vec, sites, weights), sites, weights)
    fe = apply_total("F", apply_total("E", vec, sites, weights), sites, weights)
    h = apply_total("H", vec, sites, weights)
    hh = apply_total("H", h, sites, weights)
    return _sum([ef, fe, {k: c / 2 for k, c in hh.items()}])


def apply_omega(vec: SparseVec, i: int, j: int, weights: Sequence[int]) -> SparseVec:
    """(C_ij - C_i - C_j)/2 = e_i f_j + f_i e_j + h_i h_j / 2."""
    a = apply_e(apply_f(vec, j, weights), i, weights)
    b = apply_f(apply_e(vec, j, weights), i, weights)
    hh = apply_h(apply_h(vec, j, weights), i, weights)
    return _sum([a, b, {k: c / 2 for k, c in hh.items()}])


# --- exact operators -----------------------------------------------------------------------


@dataclass(frozen=True)
class ExactOperator:
    weights: tuple[int, ...]
    nu: Optional[int]
    basis: Basis
    rows: tuple[tuple[Fraction, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    @classmethod
    def from_columns(cls, weights, nu, basis: Basis, columns: Sequence[SparseVec]) -> "ExactOperator":
        index = {b: i for i, b in enumerate(basis)}
        m = zeros(len(basis), len(basis))
        for j, col in enumerate(columns):
            for key, c in col.items():
                if key not in index:
                    raise GaudinError("operator leaves the declared slice")
                m[index[key]][j] = Fraction(c)
        return cls(tuple(weights), nu, basis, tuple(tuple(r) for r in m))

    def _like(self, m: Matrix) -> "ExactOperator":
        return ExactOperator(self.weights, self.nu, self.basis, tuple(tuple(r) for r in m))

    def _check(self, other: "ExactOperator"):
        if other.basis != self.basis or other.weights != self.weights:
            raise GaudinError("operators live on different bases")

    def __add__(self, other: "ExactOperator") -> "ExactOperator":
        self._check(other)
        return self._like([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "ExactOperator") -> "ExactOperator":
        self._check(other)
        return self._like([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def scale(self, c) -> "ExactOperator":
        c = Fraction(c)
        return self._like([[a * c for a in r] for r in self.rows])

    def __matmul__(self, other: "ExactOperator") -> "ExactOperator":
        self._check(other)
        return self._like(matmul([list(r) for r in self.rows], [list(r) for r in other.rows]))

    def commutator(self, other: "ExactOperator") -> "ExactOperator":
        return self @ other - other @ self

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def is_scalar(self) -> Optional[Fraction]:
        if self.dim == 0:
            return None
        c = self.rows[0][0]
        for i, r in enumerate(self.rows):
            for j, x in enumerate(r):
                if x != (c if i == j else 0):
                    return None
        return c

    def apply(self, vec: SparseVec) -> SparseVec:
        index = {b: i for i, b in enumerate(self.basis)}
        out: SparseVec = {}
        for key, c in vec.items():
            j = index[key]
            for i in range(self.dim):
                x = self.rows[i][j]
                if x:
                    _add(out, self.basis[i], x * c)
        return out

    def to_float(self):
        import numpy as np

        return np.array([[float(x) for x in r] for r in self.rows], dtype=float).reshape(self.dim, self.dim)

    def to_dict(self) -> dict:
        return {
            "weights": list(self.weights),
            "nu": self.nu,
            "basis": [list(b) for b in self.basis],
            "matrix": [[frac_str(x) for x in r] for r in self.rows],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "ExactOperator":
        basis = tuple(tuple(b) for b in data["basis"])
        rows = tuple(tuple(Fraction(x) for x in r) for r in data["matrix"])
        return cls(tuple(data["weights"]), data["nu"], basis, rows)


def operator_from_action(weights, nu, action) -> ExactOperator:
    weights = tuple(int(w) for w in weights)
    basis = slice_basis(weights, nu)
    cols = [action({b: Fraction(1)}) for b in basis]
    return ExactOperator.from_columns(weights, nu, basis, cols)


def rep_matrices(lam: int) -> tuple[ExactOperator, ExactOperator, ExactOperator]:
    """(E, F, H) on V_lam in the basis v_0, ..., v_lam."""
    if lam < 0:
        raise GaudinError("highest weight must be nonnegative")
    w = (lam,)
    e = operator_from_action(w, None, lambda v: apply_e(v, 0, w))
    f = operator_from_action(w, None, lambda v: apply_f(v, 0, w))
    h = operator_from_action(w, None, lambda v: apply_h(v, 0, w))
    return e, f, h


def _sites(subset: Iterable[int], n: int) -> list[int]:
    sites = sorted({int(i) - 1 for i in subset})
    if not sites:
        raise GaudinError("subset must be nonempty")
    if sites[0] < 0 or sites[-1] >= n:
        raise GaudinError(f"subset {subset} outside 1..{n}")
    return sites


def casimir_on_subset(subset: Iterable[int], weights: Sequence[int], nu: Optional[int] = None) -> ExactOperator:
    """C_J on the weight-``nu`` slice (positions J are 1-based)."""
    weights = tuple(int(w) for w in weights)
    sites = _sites(subset, len(weights))
    return operator_from_action(weights, nu, lambda v: apply_casimir(v, sites, weights))


def omega(i: int, j: int, weights: Sequence[int], nu: Optional[int] = None) -> ExactOperator:
    weights = tuple(int(w) for w in weights)
    return operator_from_action(weights, nu, lambda v: apply_omega(v, i - 1, j - 1, weights))


def hamiltonian(i: int, z: Sequence, weights: Sequence[int], nu: Optional[int] = None) -> ExactOperator:
    """H_i = sum_{j != i} (C_ij - C_i - C_j) / (2 (z_i - z_j))."""
    weights = tuple(int(w) for w in weights)
    n = len(weights)
    z = [Fraction(x) for x in z]
    if len(z) != n:
        raise GaudinError("need one point per factor")
    if len(set(z)) != n:
        raise GaudinError("degenerate configuration; use edge transport instead")
    if not 1 <= i <= n:
        raise GaudinError(f"site {i} outside 1..{n}")

    def action(v):
        return _sum(
            {k: c / (z[i - 1] - z[j]) for k, c in apply_omega(v, i - 1, j, weights).items()}
            for j in range(n)
            if j != i - 1
        )

    return operator_from_action(weights, nu, action)


def raising_matrix(weights: Sequence[int], nu: int) -> Matrix:
    """Total E from the nu-slice to the (nu+2)-slice, rows indexed by the target."""
    weights = tuple(int(w) for w in weights)
    src = slice_basis(weights, nu)
    if nu + 2 > sum(weights):
        return []
    dst = slice_basis(weights, nu + 2)
    index = {b: i for i, b in enumerate(dst)}
    m = zeros(len(dst), len(src))
    for j, b in enumerate(src):
        for key, c in apply_total("E", {b: Fraction(1)}, range(len(weights)), weights).items():
            m[index[key]][j] = c
    return m


def gram_diagonal(weights: Sequence[int], nu: Optional[int] = None) -> tuple[Fraction, ...]:
    """Contravariant form <v_k, v_k> = prod binom(l_i, k_i) on the basis tuples."""
    return tuple(Fraction(prod(comb(l, k) for l, k in zip(weights, b))) for b in slice_basis(weights, nu))


def gram_pair(u: SparseVec, v: SparseVec, weights: Sequence[int]) -> Fraction:
    return sum(
        (c * v[k] * prod(comb(l, x) for l, x in zip(weights, k)) for k, c in u.items() if k in v),
        Fraction(0),
    )


# --- singular vectors ---------------------------------------------------------------------


@dataclass(frozen=True)
class SingularSubspace:
    weights: tuple[int, ...]
    nu: int
    slice_basis: Basis
    basis: tuple[tuple[Fraction, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def vectors(self) -> list[SparseVec]:
        return [{b: c for b, c in zip(self.slice_basis, v) if c} for v in self.basis]


def singular_basis(weights: Sequence[int], nu: int) -> SingularSubspace:
    weights = tuple(int(w) for w in weights)
    try:
        basis = slice_basis(weights, nu)
    except GaudinError:
        return SingularSubspace(weights, nu, (), ())
    kernel = nullspace(raising_matrix(weights, nu), len(basis))
    return SingularSubspace(weights, nu, basis, tuple(tuple(v) for v in kernel))


# --- bracketing eigenbases -------------------------------------------------------------------


@lru_cache(maxsize=None)
def two_factor_highest(a: int, b: int, mu: int) -> tuple[Fraction, ...]:
    """Coefficients c_j of the highest vector sum_j c_j v_j x v'_{k-j} of weight mu in V_a x V_b.

    Solved as the kernel of E on the two-factor slice; the list is indexed by
    j from max(0, k-b) to min(k, a) and normalised to a leading 1.
    """
    k = (a + b - mu) // 2
    js = list(range(max(0, k - b), min(k, a) + 1))
    targets = [(j, k - 1 - j) for j in range(max(0, k - 1 - b), min(k - 1, a) + 1)] if k > 0 else []
    tindex = {t: r for r, t in enumerate(targets)}
    m = zeros(len(targets), len(js))
    for col, j in enumerate(js):
        m2 = k - j
        if j > 0:
            m[tindex[(j - 1, m2)]][col] += a - j + 1
        if m2 > 0:
            m[tindex[(j, m2 - 1)]][col] += b - m2 + 1
    kernel = nullspace(m, len(js))
    if len(kernel) != 1:
        raise GaudinError(f"no unique highest vector of weight {mu} in V_{a} x V_{b}")
    v = kernel[0]
    lead = next(x for x in v if x != 0)
    return tuple(x / lead for x in v)


# The recursion below works with integer vectors: F^(j) has integer entries in
# the divided-power basis, so F^j u / j! stays integral and the division is exact.


def _divided_powers(u: dict, top: int, weights: Sequence[int]) -> list[dict]:
    sites = range(len(weights))
    out = [u]
    for j in range(1, top + 1):
        nxt = apply_total("F", out[-1], sites, weights)
        out.append({k: c // j for k, c in nxt.items()})
    return out


def _tensor(u: dict, w: dict, c: int, out: dict):
    for k1, c1 in u.items():
        for k2, c2 in w.items():
            _add(out, k1 + k2, c * c1 * c2)


def _primitive(vec: dict) -> dict:
    g = 0
    for c in vec.values():
        g = gcd(g, c)
    sign = -1 if vec[min(vec)] < 0 else 1
    return {k: sign * c // g for k, c in vec.items()}


def _normalized(vec: dict) -> SparseVec:
    lead = vec[min(vec)]
    return {k: Fraction(c, lead) for k, c in vec.items()}


@lru_cache(maxsize=4096)
def _eigen_pieces(t: Tree) -> tuple[tuple[Tree, SparseVec], ...]:
    """Highest vectors of every admissible labelling of ``t`` (all top weights)."""
    if is_leaf(t):
        return ((t, {(0,): 1}),)
    lw = tuple(leaf.weight for leaf in t.left.leaves())
    rw = tuple(leaf.weight for leaf in t.right.leaves())
    right = [(rt, block_label(rt), _divided_powers(w, block_label(rt), rw)) for rt, w in _eigen_pieces(t.right)]
    out = []
    for lt, u in _eigen_pieces(t.left):
        a = block_label(lt)
        fu = _divided_powers(u, a, lw)
        for rt, b, fw in right:
            for mu in cg_interval(a, b):
                k = (a + b - mu) // 2
                coeffs = two_factor_highest(a, b, mu)
                scale = lcm(*(c.denominator for c in coeffs))
                vec: dict = {}
                for c, j in zip(coeffs, range(max(0, k - b), min(k, a) + 1)):
                    _tensor(fu[j], fw[k - j], int(c * scale), vec)
                out.append((Node(lt, rt, mu), _primitive(vec)))
    return tuple(out)


def bracketing_eigenbasis(tree: Tree, nu: int) -> list[tuple[SparseVec, LabelState]]:
    """Joint eigenvectors of the Casimirs C_{LR(I)} along ``tree`` in the singular nu-slice.

    Vector coordinates follow the tree's leaf order.
    """
    tree = strip_labels(tree)
    if is_leaf(tree):
        raise GaudinError("need at least two factors")
    out = [(_normalized(vec), LabelState(t)) for t, vec in _eigen_pieces(tree) if t.label == nu]
    return sorted(out, key=lambda p: p[1].key())


def sites_of(tree: Tree, path: str) -> list[int]:
    """0-based positions of the leaves under the vertex at ``path``."""
    lo, hi = inner_spans(tree)[path]
    return list(range(lo, hi))


def restrict(action, vectors: Sequence[SparseVec], labels: Optional[Sequence] = None) -> ExactOperator:
    """Matrix of ``action`` on the span of ``vectors`` (which it must preserve)."""
    if not vectors:
        return ExactOperator((), None, (), ())
    keys = sorted({k for v in vectors for k in v})
    cols = [[v.get(k, Fraction(0)) for k in keys] for v in vectors]
    m = zeros(len(vectors), len(vectors))
    for j, v in enumerate(vectors):
        img = action(v)
        if set(img) - set(keys):
            raise GaudinError("subspace is not invariant")
        coeffs = solve_in_span(cols, [img.get(k, Fraction(0)) for k in keys])
        for i, c in enumerate(coeffs):
            m[i][j] = c
    basis = tuple(labels) if labels is not None else tuple(range(len(vectors)))
    return ExactOperator((), None, basis, tuple(tuple(r) for r in m))


@dataclass(frozen=True)
class ModuliPointZ:
    z: tuple[Fraction, ...]

    def __post_init__(self):
        z = tuple(Fraction(x) for x in self.z)
        object.__setattr__(self, "z", z)
        if len(set(z)) != len(z):
            raise GaudinError("degenerate configuration; use edge transport instead")

    @property
    def n(self) -> int:
        return len(self.z)

    def affine(self, a, b) -> "ModuliPointZ":
        a, b = Fraction(a), Fraction(b)
        if a == 0:
            raise GaudinError("scale factor must be nonzero")
        return ModuliPointZ(tuple(a * x + b for x in self.z))


def hamiltonians_on_singular(z: Sequence, weights: Sequence[int], nu: int) -> tuple[SingularSubspace, list[ExactOperator]]:
    """Every H_i restricted to the singular nu-slice, in its kernel basis."""
    weights = tuple(int(w) for w in weights)
    sing = singular_basis(weights, nu)
    pt = ModuliPointZ(tuple(z))
    vecs = sing.vectors()
    ops = []
    for i in range(1, len(weights) + 1):
        h = hamiltonian(i, pt.z, weights, nu)
        ops.append(restrict(h.apply, vecs))
    return sing, ops


def singular_gram(sing: SingularSubspace) -> Matrix:
    vecs = sing.vectors()
    return [[gram_pair(u, v, sing.weights) for v in vecs] for u in vecs]


@dataclass(frozen=True)
class SimplicityReport:
    weights: tuple[int, ...]
    nu: int
    z: tuple[Fraction, ...]
    coefficients: tuple[Fraction, ...]
    dim: int
    eigenvalues: tuple[float, ...]
    min_gap: Optional[float]
    relative_gap: Optional[float]
    certified: bool
    message: str

    def to_dict(self) -> dict:
        return {
            "weights": list(self.weights),
            "nu": self.nu,
            "z": [frac_str(x) for x in self.z],
            "coefficients": [frac_str(x) for x in self.coefficients],
            "dim": self.dim,
            "eigenvalues": list(self.eigenvalues),
            "min_gap": self.min_gap,
            "relative_gap": self.relative_gap,
            "certified": self.certified,
            "message": self.message,
        }


def check_simple_spectrum(z: Sequence, weights: Sequence[int], nu: int, tol: float = 1e-8, coefficients: Optional[Sequence] = None, seed: int = 0) -> SimplicityReport:
    """Minimal eigenvalue gap of a generic combination sum c_i H_i on the singular slice.

    The combination is symmetrised with the contravariant form before the
    numeric eigenvalue solve. A small gap is reported, not raised.
    """
    import numpy as np

    from .transport import symmetric_restriction

    weights = tuple(int(w) for w in weights)
    n = len(weights)
    if coefficients is None:
        rng = np.random.default_rng(seed)
        coefficients = [Fraction(int(k), 97) for k in rng.integers(1, 97, size=n)]
    coefficients = tuple(Fraction(c) for c in coefficients)
    zt = ModuliPointZ(tuple(z)).z
    if n < 2:
        sing = singular_basis(weights, nu)
        return SimplicityReport(weights, nu, zt, coefficients, sing.dim, (0.0,) * sing.dim, None, None, True, "trivially simple")
    sing, ops = hamiltonians_on_singular(zt, weights, nu)
    if sing.dim == 0:
        return SimplicityReport(weights, nu, zt, coefficients, 0, (), None, None, True, "empty singular space")
    combo = ops[0].scale(coefficients[0])
    for c, op in zip(coefficients[1:], ops[1:]):
        combo = combo + op.scale(c)
    sym = symmetric_restriction(combo, singular_gram(sing))
    ev = np.linalg.eigvalsh(sym)
    if sing.dim == 1:
        return SimplicityReport(weights, nu, zt, coefficients, 1, (float(ev[0]),), None, None, True, "trivially simple")
    gap = float(np.min(np.diff(ev)))
    scale = max(float(np.max(np.abs(ev))), 1e-300)
    rel = gap / scale
    ok = rel > tol
    msg = "simple spectrum certified" if ok else "simplicity not certified"
    return SimplicityReport(weights, nu, zt, coefficients, sing.dim, tuple(float(x) for x in ev), gap, rel, ok, msg)
