import itertools
import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sl2cactus.gaudin import (
    ExactOperator,
    GaudinError,
    ModuliPointZ,
    apply_casimir,
    apply_total,
    bracketing_eigenbasis,
    casimir_on_subset,
    casimir_value,
    check_simple_spectrum,
    hamiltonian,
    hamiltonians_on_singular,
    operator_from_action,
    rep_matrices,
    restrict,
    singular_basis,
)
from sl2cactus.hives import occurrence_set
from sl2cactus.trees import all_trees, inner_spans, leaves_from_weights, left_comb


def spin_matrices(lam):
    # independent oracle: orthonormal weight basis, sqrt matrix elements
    d = lam + 1
    h = np.diag([lam - 2 * k for k in range(d)]).astype(float)
    e = np.zeros((d, d))
    for k in range(1, d):
        e[k - 1, k] = np.sqrt(k * (lam - k + 1))
    return e, e.T.copy(), h


def embed(op, i, weights):
    mats = [np.eye(w + 1) for w in weights]
    mats[i] = op
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def oracle_casimir(sites, weights):
    e = sum(embed(spin_matrices(weights[i])[0], i, weights) for i in sites)
    f = sum(embed(spin_matrices(weights[i])[1], i, weights) for i in sites)
    h = sum(embed(spin_matrices(weights[i])[2], i, weights) for i in sites)
    return e @ f + f @ e + h @ h / 2


def test_rep_matrix_examples():
    e, f, h = rep_matrices(1)
    assert h.rows == ((1, 0), (0, -1))
    e2, f2, h2 = rep_matrices(2)
    assert e2.apply({(1,): Fraction(1)}) == {(0,): 2}
    assert e2.apply({(0,): Fraction(1)}) == {}
    for lam in range(6):
        e, f, h = rep_matrices(lam)
        assert e.commutator(f) == h


def test_casimir_examples():
    assert casimir_on_subset([1], (2, 1)).is_scalar() == 4
    sing = singular_basis((1, 1), 0)
    c = restrict(lambda v: apply_casimir(v, [0, 1], (1, 1)), sing.vectors())
    assert c.is_scalar() == 0
    full = casimir_on_subset([1, 2, 3], (1, 2, 1), 2)
    for j in ([1], [2, 3], [1, 2], [3]):
        assert full.commutator(casimir_on_subset(j, (1, 2, 1), 2)).is_zero()


def test_casimir_spectrum_matches_oracle():
    for weights in [(1, 1), (1, 2, 1), (2, 1, 1, 1)]:
        for sites in ([0, 1], list(range(len(weights)))):
            exact = casimir_on_subset([i + 1 for i in sites], weights).to_float()
            want = np.linalg.eigvalsh(oracle_casimir(sites, weights))
            got = np.sort(np.linalg.eigvals(exact).real)
            assert np.allclose(got, want)


def test_nested_or_disjoint_casimirs_commute():
    for n in (2, 3, 4):
        subsets = [s for k in range(1, n + 1) for s in itertools.combinations(range(1, n + 1), k)]
        weights = (1, 2, 1, 1)[:n]
        for nu in range(sum(weights) % 2, sum(weights) + 1, 2):
            ops = {s: casimir_on_subset(s, weights, nu) for s in subsets}
            for a, b in itertools.combinations(subsets, 2):
                sa, sb = set(a), set(b)
                if sa <= sb or sb <= sa or not sa & sb:
                    assert ops[a].commutator(ops[b]).is_zero()


def test_hamiltonian_example_on_singular_line():
    for z in [(0, 1), (3, Fraction(1, 2)), (-2, 5)]:
        sing, ops = hamiltonians_on_singular(z, (1, 1), 0)
        assert sing.dim == 1
        z1, z2 = map(Fraction, z)
        assert ops[0].is_scalar() == Fraction(-3, 2) / (z1 - z2)


def test_coincident_points_rejected():
    with pytest.raises(GaudinError, match="degenerate configuration"):
        hamiltonian(1, (0, 0, 1), (1, 1, 1))
    with pytest.raises(GaudinError):
        ModuliPointZ((1, 2, 1))


def test_singular_dimensions():
    assert singular_basis((1, 1), 0).dim == 1
    assert singular_basis((2, 2, 2), 2).dim == 3
    assert singular_basis((1,), 1).dim == 1
    assert singular_basis((1, 1), 1).dim == 0


def test_eigenbasis_examples():
    t = left_comb(leaves_from_weights((1, 1, 1)))
    out = bracketing_eigenbasis(t, 1)
    assert [s.label_at("L") for _, s in out] == [0, 2]
    for vec, s in out:
        c = apply_casimir(vec, [0, 1], (1, 1, 1))
        assert c == {k: casimir_value(s.label_at("L")) * x for k, x in vec.items() if s.label_at("L")}
        root = apply_casimir(vec, [0, 1, 2], (1, 1, 1))
        assert root == {k: Fraction(3, 2) * x for k, x in vec.items()}
    (vec, s), = bracketing_eigenbasis(left_comb(leaves_from_weights((1, 1))), 0)
    assert apply_casimir(vec, [0, 1], (1, 1)) == {}
    assert vec[min(vec)] == 1


@pytest.mark.parametrize("n", [2, 3, 4])
def test_eigenbasis_law_and_labels(n):
    top = 3 if n < 4 else 2
    for lam in itertools.product(range(top + 1), repeat=n):
        for t in all_trees(leaves_from_weights(lam))[:3]:
            weights = tuple(leaf.weight for leaf in t.leaves())
            spans = inner_spans(t)
            for nu in range(sum(lam) % 2, sum(lam) + 1, 2):
                out = bracketing_eigenbasis(t, nu)
                assert [s.key() for _, s in out] == [s.key() for s in occurrence_set(t, nu)]
                for vec, s in out:
                    assert apply_total("E", vec, range(n), weights) == {}
                    for path, (lo, hi) in spans.items():
                        mu = s.label_at(path)
                        got = apply_casimir(vec, list(range(lo, hi)), weights)
                        assert got == {k: casimir_value(mu) * x for k, x in vec.items() if mu}


def test_operator_json_round_trip():
    op = hamiltonian(2, (0, Fraction(1, 3), 2), (1, 2, 1), 2)
    data = json.loads(op.to_json())
    assert all(isinstance(x, str) and "/" in x for r in data["matrix"] for x in r)
    assert ExactOperator.from_dict(data) == op


def test_simplicity_examples():
    r = check_simple_spectrum((0, 1, 4), (1, 1, 1), 1)
    assert r.dim == 2 and r.certified
    assert len(set(np.round(r.eigenvalues, 9))) == 2
    assert check_simple_spectrum((0,), (3,), 3).certified
    r = check_simple_spectrum((0, Fraction(1, 3), 5), (2, 2, 2), 2)
    assert r.dim == 3 and r.certified


rational = st.fractions(min_value=-20, max_value=20, max_denominator=12)
configs = st.integers(2, 4).flatmap(
    lambda n: st.tuples(
        st.lists(rational, min_size=n, max_size=n, unique=True),
        st.tuples(*(st.integers(0, 2) for _ in range(n))),
    )
)


@settings(max_examples=25, deadline=None)
@given(configs)
def test_hamiltonians_sum_to_zero(cfg):
    z, weights = cfg
    nu = sum(weights) % 2
    total = None
    for i in range(1, len(z) + 1):
        h = hamiltonian(i, z, weights, nu)
        total = h if total is None else total + h
    assert total.is_zero()


@settings(max_examples=25, deadline=None)
@given(configs, rational.filter(lambda a: a != 0), rational)
def test_hamiltonians_are_homogeneous(cfg, a, b):
    z, weights = cfg
    nu = sum(weights) % 2
    moved = [a * x + b for x in z]
    for i in range(1, len(z) + 1):
        assert hamiltonian(i, moved, weights, nu) == hamiltonian(i, z, weights, nu).scale(1 / a)


@settings(max_examples=15, deadline=None)
@given(configs)
def test_hamiltonians_commute_with_diagonal_action(cfg):
    z, weights = cfg
    n = len(weights)
    total = {
        op: operator_from_action(weights, None, lambda v, op=op: apply_total(op, v, range(n), weights))
        for op in "EFH"
    }
    for i in range(1, n + 1):
        h = hamiltonian(i, z, weights)
        for g in total.values():
            assert h.commutator(g).is_zero()
