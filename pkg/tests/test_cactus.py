import itertools

import pytest
from hypothesis import given, strategies as st

from sl2cactus.cactus import (
    BlockSwap,
    CactusError,
    CactusGenerator,
    CactusWord,
    Permutation,
    all_generators,
    block_swap_word,
    decompose_generator,
    is_pure,
    project_to_symmetric,
    pure_loop_n3,
    relation_instances,
    reverse_segment,
    word,
    word_block_swaps,
)


def compose_by_hand(n, pairs):
    # independent oracle: track where each original factor sits
    pos = {i: i for i in range(1, n + 1)}
    for p, q in reversed(pairs):
        pos = {i: (p + q - k if p <= k <= q else k) for i, k in pos.items()}
    images = [0] * n
    for i, k in pos.items():
        images[k - 1] = i
    return tuple(images)


def test_empty_word_is_identity():
    assert project_to_symmetric(CactusWord(3)).is_identity()


def test_single_reversal():
    assert project_to_symmetric(word(2, (1, 2))).images == (2, 1)


def test_composite_projection():
    assert project_to_symmetric(word(3, (1, 3), (1, 2))).images == (3, 1, 2)


def test_purity_examples():
    assert is_pure(word(2, (1, 2), (1, 2)))
    assert not is_pure(word(2, (1, 2)))
    w = word(3, (2, 3), (1, 3), (1, 2))
    assert is_pure(w) == (compose_by_hand(3, w.pairs()) == (1, 2, 3))


def test_pure_loop_word_is_pure():
    assert is_pure(pure_loop_n3())


def test_relation_instances_n2():
    assert relation_instances(2) == [(word(2, (1, 2), (1, 2)), CactusWord(2))]


def test_relation_instances_contains_examples():
    rels4 = relation_instances(4)
    assert (word(4, (1, 2), (3, 4)), word(4, (3, 4), (1, 2))) in rels4
    assert (word(3, (1, 3), (1, 2), (1, 3)), word(3, (2, 3))) in relation_instances(3)


def test_decompose_examples():
    assert decompose_generator(CactusGenerator(1, 2, 2)) == [BlockSwap(1, 1, 2)]
    assert decompose_generator(CactusGenerator(1, 3, 3)) == [BlockSwap(1, 2, 3), BlockSwap(1, 1, 2)]
    assert decompose_generator(CactusGenerator(2, 4, 4)) == [BlockSwap(2, 3, 4), BlockSwap(2, 2, 3)]


@pytest.mark.parametrize("n", range(2, 7))
def test_decomposition_reproduces_reversal(n):
    for g in all_generators(n):
        order = list(range(1, n + 1))
        for sw in reversed(decompose_generator(g)):
            order = sw.apply_to_order(order)
        assert order == reverse_segment(range(1, n + 1), g.p, g.q)


@pytest.mark.parametrize("n", range(2, 6))
def test_projection_respects_relations(n):
    for lhs, rhs in relation_instances(n):
        assert project_to_symmetric(lhs) == project_to_symmetric(rhs)


def test_block_swap_word_projects_to_block_exchange():
    for n in range(2, 6):
        for k, l, m in itertools.combinations_with_replacement(range(1, n + 1), 3):
            if not k <= l < m:
                continue
            expected = BlockSwap(k, l, m).apply_to_order(range(1, n + 1))
            assert list(project_to_symmetric(block_swap_word(k, l, m, n)).images) == expected


def test_word_block_swaps_order():
    w = word(3, (1, 2), (1, 3))
    assert word_block_swaps(w) == [BlockSwap(1, 1, 2), BlockSwap(1, 2, 3), BlockSwap(1, 1, 2)]


def test_errors():
    with pytest.raises(CactusError):
        CactusGenerator(2, 2, 3)
    with pytest.raises(CactusError):
        word(3, (1, 2)) * word(4, (1, 2))
    with pytest.raises(CactusError):
        Permutation((1, 1))
    with pytest.raises(CactusError):
        relation_instances(1)


def test_json_round_trip():
    w = word(4, (1, 3), (2, 4))
    assert CactusWord.from_json(w.to_json()) == w


words_n5 = st.lists(st.sampled_from(all_generators(5)), max_size=6).map(lambda gs: CactusWord(5, tuple(gs)))


@given(words_n5)
def test_projection_matches_hand_composition(w):
    assert project_to_symmetric(w).images == compose_by_hand(5, w.pairs())


@given(st.sampled_from(all_generators(6)))
def test_square_of_generator_is_pure(g):
    w = CactusWord(6, (g,))
    assert is_pure(w * w)


@given(words_n5)
def test_inverse_word_projects_to_inverse(w):
    p = project_to_symmetric(w * w.inverse())
    assert p.is_identity()
