import itertools

import pytest
from hypothesis import given, strategies as st

from sl2cactus.cactus import BlockSwap, relation_instances, word
from sl2cactus.crystal import (
    CrystalElem,
    CrystalError,
    block_swap,
    bracketing_label,
    cactus_act,
    cactus_square,
    closed_form_swap,
    commutor,
    e_tilde,
    elements,
    eps,
    f_tilde,
    highest_elements,
    paper_closed_form_commutor,
    phi,
    schuetzenberger,
    top_weight,
    weight,
)
from sl2cactus.trees import leaves_from_weights, left_comb, right_comb


def B(weights, coords):
    return CrystalElem(tuple(weights), tuple(coords))


# --- independent oracle: right-associated evaluation of the two-factor rule ---


def _split(parts):
    return parts[0], parts[1:]


def o_eps_phi(parts):
    if len(parts) == 1:
        lam, x = parts[0]
        return x, lam - x
    head, tail = _split(parts)
    e1, p1 = o_eps_phi([head])
    e2, p2 = o_eps_phi(tail)
    return e1 + max(0, e2 - p1), p2 + max(0, p1 - e2)


def o_apply(parts, raising):
    if len(parts) == 1:
        lam, x = parts[0]
        x += -1 if raising else 1
        return [(lam, x)] if 0 <= x <= lam else None
    head, tail = _split(parts)
    _, p1 = o_eps_phi([head])
    e2, _ = o_eps_phi(tail)
    on_head = p1 >= e2 if raising else p1 > e2
    if on_head:
        h = o_apply([head], raising)
        return None if h is None else h + list(tail)
    t = o_apply(list(tail), raising)
    return None if t is None else [head] + t


def as_parts(b):
    return list(zip(b.weights, b.coords))


def weight_lists(n, top):
    return itertools.product(range(top + 1), repeat=n)


# --- examples -----------------------------------------------------------------


def test_weight_examples():
    assert weight(B((1, 1), (0, 0))) == 2
    assert weight(B((2,), (2,))) == -2
    assert weight(B((1, 1, 1), (0, 1, 0))) == 1


def test_string_data_examples():
    assert (eps(B((1,), (1,))), phi(B((1,), (1,)))) == (1, 0)
    assert phi(B((1, 1), (0, 0))) == 2
    assert (phi(B((1, 1), (0, 1))), eps(B((1, 1), (0, 1)))) == (0, 0)


def test_operator_examples():
    assert f_tilde(B((1, 1), (0, 0))) == B((1, 1), (1, 0))
    assert e_tilde(B((1, 1), (0, 1))) is None
    assert e_tilde(B((1, 1, 1), (0, 1, 1))) == B((1, 1, 1), (0, 1, 0))


def test_highest_examples():
    assert [b.coords for b in highest_elements((1, 1), 0)] == [(0, 1)]
    assert {b.coords for b in highest_elements((1, 1, 1), 1)} == {(0, 0, 1), (0, 1, 0)}
    assert [b.coords for b in highest_elements((2,), 2)] == [(0,)]
    bad = highest_elements((1, 1), 1)
    assert len(bad) == 0 and not bad.parity_ok


def test_schuetzenberger_examples():
    assert schuetzenberger(B((2,), (0,))) == B((2,), (2,))
    assert schuetzenberger(B((1, 1), (1, 0))) == B((1, 1), (1, 0))
    assert schuetzenberger(B((1, 1), (0, 1))) == B((1, 1), (0, 1))


def test_commutor_examples():
    assert commutor(B((1, 1), (1, 0)), 1) == B((1, 1), (1, 0))
    assert commutor(B((1, 1, 1), (0, 0, 1)), 2) == B((1, 1, 1), (0, 1, 0))
    assert commutor(B((1, 1, 1), (0, 1, 0)), 2) == B((1, 1, 1), (0, 0, 1))


def test_closed_form_examples():
    r = paper_closed_form_commutor(2, 0, 2, 2)
    assert (r.x, r.y) == (0, 2)
    r = paper_closed_form_commutor(1, 0, 1, 1)
    assert (r.x, r.y) == (0, 1)
    r = paper_closed_form_commutor(0, 0, 2, 0)
    assert (r.x, r.y) == (2, -2) and not r.in_range


def test_closed_form_differs_from_commutor_on_midpoint():
    b = B((1, 1), (1, 0))
    assert commutor(b, 1) == b
    assert closed_form_swap(b, 1) == B((1, 1), (0, 1))


def test_cactus_act_examples():
    b = B((1, 1, 1), (0, 0, 1))
    assert cactus_act(word(3, (2, 3)), b) == b
    assert cactus_act(word(3, (1, 3)), b) == B((1, 1, 1), (0, 1, 0))
    for c in elements((1, 2, 1)):
        assert cactus_act(word(3, (1, 3), (1, 3)), c) == c


def test_cactus_act_permutes_weights():
    b = B((1, 2, 3), (0, 0, 0))
    assert cactus_act(word(3, (1, 3)), b).weights == (3, 2, 1)


def test_bracketing_label_examples():
    lw = leaves_from_weights((1, 1, 1))
    assert bracketing_label(B((1, 1, 1), (0, 0, 1)), left_comb(lw)).label_at("L") == 2
    assert bracketing_label(B((1, 1, 1), (0, 1, 0)), left_comb(lw)).label_at("L") == 0
    s = bracketing_label(B((1, 1, 1), (0, 0, 1)), right_comb(lw))
    assert s.label_at("R") == 0 and s.nu == 1


def test_errors():
    with pytest.raises(CrystalError):
        B((1,), (2,))
    with pytest.raises(CrystalError):
        commutor(B((1, 1), (0, 0)), 2)
    with pytest.raises(CrystalError):
        bracketing_label(B((1, 1, 1), (1, 0, 0)), left_comb(leaves_from_weights((1, 1, 1))))
    with pytest.raises(CrystalError):
        closed_form_swap(B((2, 0), (0, 0)), 1)


# --- exhaustive properties ------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3])
def test_operators_match_right_associated_oracle(n):
    for lam in weight_lists(n, 3):
        for b in elements(lam):
            parts = as_parts(b)
            assert (eps(b), phi(b)) == o_eps_phi(parts)
            for raising, op in ((True, e_tilde), (False, f_tilde)):
                got, want = op(b), o_apply(parts, raising)
                assert (got is None and want is None) or as_parts(got) == want


def test_partial_inverse_axiom():
    for n in (1, 2, 3, 4):
        for lam in weight_lists(n, 4 if n < 4 else 2):
            for b in elements(lam):
                up = e_tilde(b)
                if up is not None:
                    assert f_tilde(up) == b
                down = f_tilde(b)
                if down is not None:
                    assert e_tilde(down) == b
                    assert weight(down) == weight(b) - 2
                assert phi(b) - eps(b) == weight(b)


def test_two_factor_commutor_matches_component_oracle():
    # B_a x B_b is multiplicity free, so sigma is fixed by (component, depth)
    for a in range(4):
        for c in range(4):
            target = {(top_weight(x), eps(x)): x for x in elements((c, a))}
            for b in elements((a, c)):
                assert commutor(b, 1) == target[(top_weight(b), eps(b))]


def test_commutor_intertwines_and_preserves_weight():
    for lam in itertools.chain(weight_lists(2, 3), weight_lists(3, 2)):
        for split in range(1, len(lam)):
            for b in elements(lam):
                s = commutor(b, split)
                assert weight(s) == weight(b)
                for op in (e_tilde, f_tilde):
                    ob = op(b)
                    assert (ob is None and op(s) is None) or commutor(ob, split) == op(s)


def test_rotation_labels_follow_associator():
    from sl2cactus.hives import associator_psi

    for lam in weight_lists(3, 3):
        lw = leaves_from_weights(lam)
        for nu in range(sum(lam) % 2, sum(lam) + 1, 2):
            for b in highest_elements(lam, nu):
                before = bracketing_label(b, left_comb(lw)).label_at("L")
                after = bracketing_label(b, right_comb(lw)).label_at("R")
                assert after == associator_psi(before, *lam, nu)


small = st.lists(st.integers(0, 3), min_size=1, max_size=4).flatmap(
    lambda ws: st.tuples(st.just(tuple(ws)), st.tuples(*(st.integers(0, w) for w in ws)))
).map(lambda p: CrystalElem(*p))


@given(small)
def test_schuetzenberger_is_involution_negating_weight(b):
    s = schuetzenberger(b)
    assert schuetzenberger(s) == b
    assert weight(s) == -weight(b)


@given(small, st.data())
def test_commutor_is_involutive(b, data):
    if b.n < 2:
        return
    split = data.draw(st.integers(1, b.n - 1))
    assert commutor(commutor(b, split), b.n - split) == b


@given(small)
def test_cactus_square_holds(b):
    if b.n < 3:
        return
    for x in range(1, b.n - 1):
        for y in range(1, b.n - x):
            top, bottom = cactus_square(b, x, y)
            assert top == bottom


three_factor = st.tuples(*(st.integers(0, 2) for _ in range(3))).flatmap(
    lambda ws: st.tuples(st.just(ws), st.tuples(*(st.integers(0, w) for w in ws)))
).map(lambda p: CrystalElem(*p))


@given(three_factor)
def test_relations_hold_elementwise(b):
    for lhs, rhs in relation_instances(3):
        assert cactus_act(lhs, b) == cactus_act(rhs, b)


@given(small, st.data())
def test_block_swap_reorders_weights(b, data):
    if b.n < 2:
        return
    start = data.draw(st.integers(1, b.n - 1))
    end = data.draw(st.integers(start + 1, b.n))
    mid = data.draw(st.integers(start, end - 1))
    sw = BlockSwap(start, mid, end)
    assert list(block_swap(b, sw).weights) == sw.apply_to_order(b.weights)
